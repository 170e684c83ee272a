"""Compressions PAP and pinchings Σ P_i A P_i."""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.config import settings
from src.errors import DimensionMismatch, NotMutuallyOrthogonal
from src.linalg.core import ComplexMatrix, Projection, as_matrix, operator_norm
from src.linalg.schatten import schatten_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitCheck:
    lhs: float
    rhs: float
    commuting: bool


@dataclass(frozen=True)
class BlockAdditivity:
    lhs: float
    rhs: float


def _check_dims(P: Projection, A: ComplexMatrix) -> None:
    if P.dim != A.shape[0]:
        raise DimensionMismatch(f"projection has dim {P.dim}, operator has dim {A.shape[0]}")


def compress(P: Projection, A) -> ComplexMatrix:
    A = as_matrix(A)
    _check_dims(P, A)
    return P.matrix @ A @ P.matrix


def pinch(A, Ps: Sequence[Projection]) -> ComplexMatrix:
    """Σ P_i A P_i over mutually orthogonal projections (they need not sum to I)."""
    A = as_matrix(A)
    for P in Ps:
        _check_dims(P, A)
    for i in range(len(Ps)):
        for j in range(i + 1, len(Ps)):
            overlap = operator_norm(Ps[i].matrix @ Ps[j].matrix)
            if overlap > settings.tau_proj:
                raise NotMutuallyOrthogonal(f"‖P_{i} P_{j}‖_∞ = {overlap:.3e}")
    logger.debug(f"pinch dim={A.shape[0]} blocks={len(Ps)}")
    result = np.zeros_like(A)
    for P in Ps:
        result += P.matrix @ A @ P.matrix
    return result


def split_bound_check(A, P: Projection) -> SplitCheck:
    """‖PAP‖_1 + ‖QAQ‖_1 against ‖A‖_1, Q = I − P."""
    A = as_matrix(A)
    _check_dims(P, A)
    Q = P.complement()
    lhs = schatten_norm(compress(P, A), 1) + schatten_norm(compress(Q, A), 1)
    rhs = schatten_norm(A, 1)
    commuting = operator_norm(P.matrix @ A - A @ P.matrix) <= settings.tau_proj
    return SplitCheck(lhs, rhs, commuting)


def block_additivity_check(A, P: Projection) -> BlockAdditivity:
    """‖PAP‖_1 + ‖QAQ‖_1 against ‖PAP + QAQ‖_1; the two agree for every projection."""
    A = as_matrix(A)
    _check_dims(P, A)
    Q = P.complement()
    pap = compress(P, A)
    qaq = compress(Q, A)
    return BlockAdditivity(
        lhs=schatten_norm(pap, 1) + schatten_norm(qaq, 1),
        rhs=schatten_norm(pap + qaq, 1),
    )
