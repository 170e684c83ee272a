"""Schatten p-norms ‖A‖_p = (Σ λ_n(A)^p)^{1/p} for 1 ≤ p ≤ ∞."""
import math

import numpy as np

from src.config import settings
from src.errors import InvalidExponent
from src.linalg.core import as_matrix, singular_values

INF = math.inf


def validate_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"Schatten exponent must satisfy 1 ≤ p ≤ ∞, got {p}")
    return p


def validate_open_exponent(p: float) -> float:
    """Exponent restricted to 1 < p < ∞, the range of the trace-norm bound."""
    p = validate_exponent(p)
    if p == 1.0 or math.isinf(p):
        raise InvalidExponent("p must satisfy 1 < p < ∞")
    return p


def conjugate_exponent(p: float) -> float:
    """q with 1/p + 1/q = 1 (q = ∞ for p = 1, q = 1 for p = ∞)."""
    p = validate_exponent(p)
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def norm_from_singular_values(s: np.ndarray, p: float) -> float:
    p = validate_exponent(p)
    s = np.asarray(s, dtype=np.float64)
    if s.size == 0:
        return 0.0
    top = float(np.max(s))
    if top == 0.0:
        return 0.0
    s = np.where(s < settings.zero_cutoff * top, 0.0, s)
    if math.isinf(p):
        return top
    if p == 1.0:
        return math.fsum(s)
    # factor out the largest value so large p cannot overflow
    return top * math.fsum((s / top) ** p) ** (1.0 / p)


def schatten_norm(M, p: float) -> float:
    return norm_from_singular_values(singular_values(M), p)


def trace(M) -> complex:
    return complex(np.trace(as_matrix(M)))
