"""Seeded generation of model states, random density matrices and estimates.

Every random object is drawn from numpy's counter-based Philox generator
keyed by a SeedSequence over (seed, *stream), so outputs depend only on the
arguments and never on call order or thread schedule.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.special

from src.bounds.models import DecayModel, Exponential, PowerLaw
from src.errors import DegenerateNorm
from src.linalg.core import (
    ComplexMatrix,
    Projection,
    Spectrum,
    as_matrix,
    dagger,
    hermitian_eig,
)
from src.linalg.schatten import schatten_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratedState:
    matrix: ComplexMatrix
    spectrum: Spectrum
    model: Optional[DecayModel]
    truncation_remainder: float

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def envelope_excess(self) -> float:
        """Largest |λ_n| minus the model envelope at n; at most 0 when the model dominates."""
        if not isinstance(self.model, (PowerLaw, Exponential)):
            raise ValueError("envelope needs a PowerLaw or Exponential model")
        return max(
            (float(m) - self.model.envelope(n) for n, m in enumerate(self.spectrum.moduli)),
            default=-math.inf,
        )


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _rng(seed: Union[int, np.random.Generator]) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else make_rng(seed)


def ginibre(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Standard complex Gaussian matrix, E|g_ij|² = 1."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)


def random_unitary(dim: int, seed: Union[int, np.random.Generator]) -> ComplexMatrix:
    """Haar-distributed unitary: QR of a Ginibre matrix with the phases of R removed."""
    q, r = np.linalg.qr(ginibre(dim, _rng(seed)))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_projection_family(
    dim: int, ranks: Sequence[int], seed: Union[int, np.random.Generator]
) -> list[Projection]:
    """Mutually orthogonal projections onto disjoint column blocks of a Haar unitary."""
    if sum(ranks) > dim or any(r < 0 for r in ranks):
        raise ValueError(f"ranks {list(ranks)} do not fit in dimension {dim}")
    U = random_unitary(dim, seed)
    family = []
    start = 0
    for rank in ranks:
        V = U[:, start:start + rank]
        P = V @ dagger(V)
        family.append(Projection((P + dagger(P)) / 2, rank))
        start += rank
    return family


def random_projection(dim: int, rank: int, seed: Union[int, np.random.Generator]) -> Projection:
    return random_projection_family(dim, [rank], seed)[0]


def _state_from_eigenvalues(
    eigenvalues: np.ndarray,
    basis_seed: Optional[int],
    model: Optional[DecayModel],
    remainder: float,
) -> GeneratedState:
    dim = eigenvalues.shape[0]
    if basis_seed is None:
        basis = np.eye(dim, dtype=np.complex128)
    else:
        basis = random_unitary(dim, basis_seed)
    spectrum = Spectrum(eigenvalues.astype(np.complex128), basis, dim)
    matrix = spectrum.matrix()
    return GeneratedState((matrix + dagger(matrix)) / 2, spectrum, model, remainder)


def gibbs_state(beta: float, dim: int, basis_seed: Optional[int] = None) -> GeneratedState:
    """Thermal state with eigenvalues ∝ e^{-beta n}, n < dim, renormalized.

    The declared Exponential constant is the finite normalizer
    (1 − e^{-beta}) / (1 − e^{-beta dim}) so the kept levels stay dominated.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    weights = np.exp(-beta * np.arange(dim, dtype=np.float64))
    C = 1.0 / math.fsum(weights)
    eigenvalues = C * weights
    remainder = math.exp(-beta * dim)
    logger.debug(f"gibbs_state beta={beta} dim={dim} remainder={remainder:.3e}")
    return _state_from_eigenvalues(eigenvalues, basis_seed, Exponential(C=C, beta=beta), remainder)


def power_law_normalizer(alpha: float) -> float:
    """C = 1/ζ(alpha), normalizing (n+1)^{-alpha} over all n ≥ 0."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    return 1.0 / float(scipy.special.zeta(alpha, 1.0))


def power_law_state(alpha: float, dim: int, basis_seed: Optional[int] = None) -> GeneratedState:
    """State with eigenvalues ∝ (n+1)^{-alpha}, n < dim, renormalized.

    truncation_remainder is the model mass C_dim Σ_{n≥dim} (n+1)^{-alpha}
    beyond the kept levels (a Hurwitz zeta value).
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    weights = np.arange(1, dim + 1, dtype=np.float64) ** (-alpha)
    C = 1.0 / math.fsum(weights)
    eigenvalues = C * weights
    remainder = C * float(scipy.special.zeta(alpha, dim + 1.0))
    return _state_from_eigenvalues(eigenvalues, basis_seed, PowerLaw(C=C, alpha=alpha), remainder)


def random_density_matrix(dim: int, seed: int) -> GeneratedState:
    """ρ = GG*/tr(GG*) for a seeded Ginibre matrix G."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    G = ginibre(dim, make_rng(seed))
    rho = G @ dagger(G)
    rho = rho / np.trace(rho).real
    rho = (rho + dagger(rho)) / 2
    return GeneratedState(rho, hermitian_eig(rho), None, 0.0)


def state_from_matrix(M, model: Optional[DecayModel] = None) -> GeneratedState:
    """Wrap a loaded Hermitian operator so sweeps can use it as A0."""
    M = as_matrix(M)
    return GeneratedState(M, hermitian_eig(M), model, 0.0)


def random_trace_one_operator(dim: int, seed: int, hermitian: bool = True) -> ComplexMatrix:
    """Seeded operator with unit trace norm; generally not positive."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    G = ginibre(dim, make_rng(seed))
    if hermitian:
        G = (G + dagger(G)) / 2
    return G / schatten_norm(G, 1)


def perturb_renormalized(
    A0: GeneratedState,
    magnitude: float,
    seed: int,
    hermitian: bool = True,
    p: float = 2.0,
) -> ComplexMatrix:
    """(A0 + magnitude·E) / ‖A0 + magnitude·E‖_1 with E seeded and ‖E‖_p = 1."""
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    E = ginibre(A0.dim, make_rng(seed))
    if hermitian:
        E = (E + dagger(E)) / 2
    E = E / schatten_norm(E, p)

    B = A0.matrix + magnitude * E
    norm = schatten_norm(B, 1)
    if norm < 1e-12:
        raise DegenerateNorm(f"‖A0 + magnitude·E‖_1 = {norm:.3e}")
    A = B / norm
    if hermitian:
        A = (A + dagger(A)) / 2
    return A
