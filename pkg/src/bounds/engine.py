"""Trace-norm error bounds from p-norm errors and eigenvalue tails.

The central estimate, for A0 normal and ‖A0‖_1 = ‖A‖_1 = 1, is

    ‖A0 − A‖_1 ≤ 3 N^{(p−1)/p} ‖A0 − A‖_p + 2 Σ_{n≥N} |μ_n(A0)|

for every N ≥ 0. This module evaluates it, picks the best N, and provides
the closed-form tails of power-law and exponential decay models.
"""
import logging
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.bounds.models import Certificate, DecayModel, Empirical, Exponential, PowerLaw
from src.config import settings
from src.errors import CountOverflow, DimensionMismatch, NotNormalized, UnsupportedModel
from src.linalg.core import Spectrum, as_matrix
from src.linalg.schatten import (
    conjugate_exponent,
    schatten_norm,
    validate_open_exponent,
)

logger = logging.getLogger(__name__)

# N beyond this is past double-precision resolution; n_epsilon stops refining there
_EXACT_INT_LIMIT = 2**52
_LOG_EXACT_LIMIT = math.log(_EXACT_INT_LIMIT)
_LOG_FLOAT_MAX = math.log(sys.float_info.max)
_MAX_COUNT_BITS = 4096


def count_power(N: int, exponent: float) -> float:
    """N**exponent for a count N that may be too large to convert to float.

    Goes through log(N), which Python evaluates for ints of any size.
    Returns inf when the result itself overflows.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if N == 0:
        return 0.0 if exponent > 0 else 1.0
    try:
        return math.exp(exponent * math.log(N))
    except OverflowError:
        return math.inf


def _exp_count(log_x: float) -> int:
    """floor(exp(log_x)) + 1 as an exact int, to double precision in the leading bits."""
    k, frac = divmod(log_x / math.log(2.0), 1.0)
    if log_x < _LOG_EXACT_LIMIT or k < 52:
        return math.floor(math.exp(log_x)) + 1
    if k >= _MAX_COUNT_BITS:
        raise CountOverflow(f"N_eps exceeds 2**{_MAX_COUNT_BITS}")
    return (int(2.0**frac * 2**52) << (int(k) - 52)) + 1


@dataclass(frozen=True)
class ExactCertification:
    certificate: Certificate
    true_1_error: float
    p_error: float


def tail_sum(moduli: Sequence[float], N: int) -> float:
    """Σ_{n≥N} moduli[n] with compensated summation; 0 past the end."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return math.fsum(moduli[N:])


class ExactRunningSum:
    """Running sum kept as non-overlapping partials, so `value` is correctly rounded.

    Adding one term touches only the partials, whose count stays small for
    sums of non-negative doubles; reading the value is an fsum over them.
    """

    def __init__(self):
        self.partials: list[float] = []

    def add(self, x: float) -> None:
        i = 0
        for y in self.partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                self.partials[i] = lo
                i += 1
            x = hi
        self.partials[i:] = [x]

    @property
    def value(self) -> float:
        return math.fsum(self.partials)


def empirical_tails(moduli: Sequence[float], n_max: int) -> np.ndarray:
    """tail_sum(moduli, N) for N = 0..n_max in one reverse pass."""
    values = list(moduli)
    tails = np.zeros(n_max + 1)
    running = ExactRunningSum()
    for N in range(len(values) - 1, -1, -1):
        running.add(values[N])
        if N <= n_max:
            tails[N] = running.value
    return tails


def closed_form_tail(model: DecayModel, N: int) -> float:
    if N < 1:
        raise ValueError("closed-form tails are defined for N ≥ 1")
    if isinstance(model, PowerLaw):
        return model.C / (model.alpha - 1.0) * float(N) ** (1.0 - model.alpha)
    if isinstance(model, Exponential):
        return model.C * math.exp(-model.beta * N) / -math.expm1(-model.beta)
    raise UnsupportedModel("closed-form tail needs a PowerLaw or Exponential model; use tail_sum")


def model_tail(model: DecayModel, N: int) -> float:
    """Tail of a unit-trace-norm operator dominated by `model`.

    Analytic tails are capped at the total mass 1; at N = 0 the tail is exactly 1.
    """
    if isinstance(model, Empirical):
        return tail_sum(model.moduli, N)
    if N == 0:
        return 1.0
    return min(1.0, closed_form_tail(model, N))


def _model_tails(model: DecayModel, n_max: int) -> np.ndarray:
    if isinstance(model, Empirical):
        return empirical_tails(model.moduli, n_max)
    N = np.arange(n_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore"):
        if isinstance(model, PowerLaw):
            tails = model.C / (model.alpha - 1.0) * N ** (1.0 - model.alpha)
        else:
            tails = model.C * np.exp(-model.beta * N) / -math.expm1(-model.beta)
    tails = np.minimum(tails, 1.0)
    tails[0] = 1.0
    return tails


def theorem1_curve(p_error: float, p: float, tails: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Truncation and tail terms of the bound for N = 0..len(tails)−1."""
    p = validate_open_exponent(p)
    N = np.arange(len(tails), dtype=np.float64)
    truncation = 3.0 * N ** ((p - 1.0) / p) * p_error
    return truncation, 2.0 * np.asarray(tails, dtype=np.float64)


def theorem1_bound(
    p_error: float,
    p: float,
    N: int,
    tail: float,
    tail_source: Optional[DecayModel] = None,
) -> Certificate:
    p = validate_open_exponent(p)
    if p_error < 0:
        raise ValueError("p_error must be non-negative")
    if N < 0:
        raise ValueError("N must be non-negative")
    if tail < 0:
        raise ValueError("tail must be non-negative")

    truncation_term = 3.0 * float(N) ** ((p - 1.0) / p) * p_error
    tail_term = 2.0 * tail
    return Certificate(
        p=p,
        p_error=p_error,
        N=N,
        truncation_term=truncation_term,
        tail_term=tail_term,
        bound=truncation_term + tail_term,
        tail_source=tail_source,
    )


def default_n_max(model: DecayModel, p_error: float) -> int:
    if isinstance(model, Empirical):
        return max(1, len(model.moduli))
    if p_error <= 0:
        return settings.scan_limit
    try:
        return max(1, 4 * n_epsilon(model, p_error))
    except CountOverflow as e:
        logger.warning(f"[SCAN] {e}; scanning up to scan_limit={settings.scan_limit}")
        return settings.scan_limit


def optimal_certificate(
    p_error: float,
    p: float,
    model: DecayModel,
    N_max: Optional[int] = None,
) -> Certificate:
    """Certificate minimizing the bound over N = 0..N_max, smallest N on ties."""
    p = validate_open_exponent(p)
    if p_error < 0:
        raise ValueError("p_error must be non-negative")
    if N_max is None:
        N_max = default_n_max(model, p_error)
    if N_max < 1:
        raise ValueError("N_max must be at least 1")
    if N_max > settings.scan_limit:
        logger.warning(f"[SCAN] N_max={N_max} capped at scan_limit={settings.scan_limit}")
        N_max = settings.scan_limit

    truncation, tail_terms = theorem1_curve(p_error, p, _model_tails(model, N_max))
    best = int(np.argmin(truncation + tail_terms))
    logger.debug(f"[SCAN] p={p} p_error={p_error:.3e} N*={best} of 0..{N_max}")
    return theorem1_bound(p_error, p, best, model_tail(model, best), tail_source=model)


def _power_law_log_inverse(model: PowerLaw, eps: float) -> float:
    """log of (C/((α−1)eps))^{1/(α−1)}, the x where the closed-form tail equals eps."""
    return (math.log(model.C) - math.log((model.alpha - 1.0) * eps)) / (model.alpha - 1.0)


def n_epsilon(model: DecayModel, eps: float) -> int:
    """Smallest N whose tail is below eps (closed-form tail for analytic models)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(model, Empirical):
        tails = empirical_tails(model.moduli, len(model.moduli))
        return int(np.argmax(tails < eps))
    if model_tail(model, 0) < eps:
        return 0

    if isinstance(model, PowerLaw):
        N = max(1, _exp_count(_power_law_log_inverse(model, eps)))
    else:
        x = math.log(model.C / (eps * -math.expm1(-model.beta))) / model.beta
        N = max(1, math.floor(x) + 1)

    if N < _EXACT_INT_LIMIT:
        # the closed-form inversion can be off by one in floating point
        for _ in range(4):
            if N > 1 and model_tail(model, N - 1) < eps:
                N -= 1
            elif model_tail(model, N) >= eps:
                N += 1
            else:
                break
    return N


def n_epsilon_bracket(model: DecayModel, eps: float) -> tuple[float, float]:
    """Analytic (lower, upper) bounds on N_{A0}(eps); unknown sides are 0 and ∞.

    PowerLaw: lower bound (C/(eps(α−1)))^{1/(α−1)} − 1 for 0 < eps < C/(α−1).
    Exponential: upper bound ln(C/(eps(1−e^{−β})))/β + 1 for 0 < eps < 1.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(model, Empirical):
        exact = float(n_epsilon(model, eps))
        return exact, exact
    if isinstance(model, PowerLaw):
        if eps >= model.C / (model.alpha - 1.0):
            return 0.0, math.inf
        log_x = _power_law_log_inverse(model, eps)
        lower = math.exp(log_x) - 1.0 if log_x < _LOG_FLOAT_MAX else sys.float_info.max
        return max(0.0, lower), math.inf
    if eps >= 1.0:
        return 0.0, math.inf
    upper = math.log(model.C / (eps * -math.expm1(-model.beta))) / model.beta + 1.0
    return 0.0, upper


def corollary2_bound(p_error: float, p: float, model: DecayModel) -> float:
    """(3 N_{A0}(ε)^{1/q} + 2) ε with ε = p_error and q = p/(p−1)."""
    if p_error <= 0:
        raise ValueError("p_error must be positive")
    q = conjugate_exponent(validate_open_exponent(p))
    N = n_epsilon(model, p_error)
    return (3.0 * count_power(N, 1.0 / q) + 2.0) * p_error


def corollary1_thresholds(model: DecayModel, p: float, eps: float) -> tuple[int, float]:
    """(N_eps, p-error threshold) guaranteeing a trace-norm error below eps.

    N_eps has tail < eps/4; any p-error below N_eps^{(1−p)/p}·eps/6 then
    makes the bound at N_eps smaller than eps.
    """
    p = validate_open_exponent(p)
    if eps <= 0:
        raise ValueError("eps must be positive")
    N_eps = n_epsilon(model, eps / 4.0)
    if N_eps == 0:
        return 0, math.inf
    return N_eps, count_power(N_eps, (1.0 - p) / p) * eps / 6.0


def spectrum_model(spectrum: Spectrum) -> Empirical:
    return Empirical(moduli=tuple(sorted((float(m) for m in spectrum.moduli), reverse=True)))


def certify_exact(A0_spectrum: Spectrum, A, p: float) -> ExactCertification:
    """Certify ‖A0 − A‖_1 from ‖A0 − A‖_p and compare with the true value."""
    p = validate_open_exponent(p)
    A = as_matrix(A)
    A0 = A0_spectrum.matrix()
    if A.shape != A0.shape:
        raise DimensionMismatch(f"A0 has dim {A0.shape[0]}, A has dim {A.shape[0]}")

    norm_a0 = math.fsum(A0_spectrum.moduli)
    norm_a = schatten_norm(A, 1)
    if abs(norm_a0 - 1.0) > settings.tau_norm:
        raise NotNormalized(f"‖A0‖_1 = {norm_a0!r}, expected 1")
    if abs(norm_a - 1.0) > settings.tau_norm:
        raise NotNormalized(f"‖A‖_1 = {norm_a!r}, expected 1")

    diff = A0 - A
    p_error = schatten_norm(diff, p)
    true_1_error = schatten_norm(diff, 1)
    model = spectrum_model(A0_spectrum)
    certificate = optimal_certificate(p_error, p, model, N_max=max(1, A0.shape[0]))
    logger.debug(
        f"certify_exact p={p} p_error={p_error:.3e} true={true_1_error:.3e} "
        f"bound={certificate.bound:.3e} N={certificate.N}"
    )
    return ExactCertification(certificate, true_1_error, p_error)
