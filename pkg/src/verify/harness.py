"""Verification campaigns and convergence sweeps.

Each campaign draws an independent RNG stream per trial from
(campaign seed, trial index), evaluates a list of checks and reduces them,
in trial order, into a VerificationReport.
"""
import hashlib
import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from src.bounds.engine import (
    certify_exact,
    corollary2_bound,
    count_power,
    empirical_tails,
    n_epsilon,
    theorem1_curve,
)
from src.bounds.models import DecayModel
from src.bounds.proof import Check, proof_chain
from src.config import settings
from src.linalg.core import (
    Spectrum,
    as_matrix,
    hermitian_eig,
    projection_from_vectors,
    singular_values,
)
from src.linalg.pinching import block_additivity_check, pinch, split_bound_check
from src.linalg.schatten import conjugate_exponent, norm_from_singular_values, schatten_norm
from src.states.generator import (
    GeneratedState,
    ginibre,
    gibbs_state,
    make_rng,
    perturb_renormalized,
    power_law_state,
    random_density_matrix,
    random_projection,
    random_projection_family,
    random_trace_one_operator,
    random_unitary,
)
from src.verify.reports import (
    CampaignConfig,
    SweepRow,
    SweepTable,
    VerificationReport,
    Violation,
)

logger = logging.getLogger(__name__)


@dataclass
class TrialResult:
    digest: str
    checks: list[tuple[Check, float]] = field(default_factory=list)
    observations: Counter = field(default_factory=Counter)

    def add(self, check: Check, tolerance: float) -> None:
        self.checks.append((check, tolerance))


def digest(*matrices: np.ndarray) -> str:
    h = hashlib.sha256()
    for M in matrices:
        h.update(np.ascontiguousarray(M).tobytes())
    return h.hexdigest()[:16]


def _map_trials(trial_fn: Callable[[int], TrialResult], trials: int) -> list[TrialResult]:
    if settings.workers <= 1:
        return [trial_fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        return list(pool.map(trial_fn, range(trials)))


def _run_campaign(
    name: str,
    trials: int,
    config: CampaignConfig,
    trial_fn: Callable[[int], TrialResult],
) -> VerificationReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    logger.info(f"[CAMPAIGN] {name}: {trials} trials, dims={config.dims}, seed={config.seed}")
    started = time.perf_counter()

    violations: list[Violation] = []
    observations: Counter = Counter()
    min_slack = math.inf
    n_checks = 0
    status = "ok"
    for trial, result in enumerate(_map_trials(trial_fn, trials)):
        observations.update(result.observations)
        for check, tolerance in result.checks:
            n_checks += 1
            slack = check.slack
            min_slack = min(min_slack, slack)
            if slack >= -tolerance:
                continue
            violations.append(
                Violation(
                    trial=trial,
                    check=check.name,
                    digest=result.digest,
                    lhs=check.lhs,
                    rhs=check.rhs,
                    slack=slack,
                    tolerance=tolerance,
                )
            )
            logger.warning(f"[VIOLATION] {name} trial={trial} {check.name} slack={slack:.3e}")
            status = "violations"
            if slack < -settings.abort_threshold:
                logger.error(f"[VIOLATION] {name} trial={trial} {check.name}: mathematical violation, aborting")
                status = "mathematical_violation"
                break
        if status == "mathematical_violation":
            break

    elapsed = time.perf_counter() - started
    logger.info(
        f"[CAMPAIGN] {name}: {n_checks} checks, {len(violations)} violations, "
        f"min_slack={min_slack:.3e}, {elapsed:.2f}s"
    )
    return VerificationReport(
        campaign=name,
        trials=trials,
        checks=n_checks,
        violations=violations,
        min_slack=min_slack if n_checks else 0.0,
        config=config,
        status=status,
        observations=dict(sorted(observations.items())),
        elapsed=elapsed,
    )


def check_theorem1_pair(A0_spectrum: Spectrum, A, p_grid: Sequence[float]) -> list[Check]:
    """The trace-norm bound at every N in 0..dim and every p in the grid."""
    A = as_matrix(A)
    D = A0_spectrum.matrix() - A
    s = singular_values(D)
    error_1 = norm_from_singular_values(s, 1)
    tails = empirical_tails([float(m) for m in A0_spectrum.moduli], A0_spectrum.dim)
    checks = []
    for p in p_grid:
        truncation, tail_terms = theorem1_curve(norm_from_singular_values(s, p), p, tails)
        for N, rhs in enumerate(truncation + tail_terms):
            checks.append(Check(f"theorem1[p={p:g},N={N}]", error_1, float(rhs), "le"))
    return checks


def _theorem_corpus(seed: int, trial: int, dims: Sequence[int]) -> tuple[GeneratedState, np.ndarray, str]:
    """Stratified pair (A0, A): 40% Gibbs, 20% power-law, 20% random density,
    20% non-positive estimates; matched (perturbed) and independent A alternate."""
    rng = make_rng(seed, trial)
    dim = int(rng.choice(list(dims)))
    stratum = trial % 10
    matched = (trial // 10) % 2 == 0
    sub = int(rng.integers(2**31))
    magnitude = 10.0 ** rng.uniform(-6.0, 0.0)

    if stratum < 4:
        A0 = gibbs_state(float(rng.uniform(0.2, 3.0)), dim, basis_seed=sub)
        kind = "gibbs"
    elif stratum < 6:
        A0 = power_law_state(float(rng.uniform(1.1, 3.0)), dim, basis_seed=sub)
        kind = "powerlaw"
    else:
        A0 = random_density_matrix(dim, sub)
        kind = "density"

    if stratum >= 8:
        hermitian = stratum == 8
        kind = "estimate-hermitian" if hermitian else "estimate-general"
        if matched:
            A = perturb_renormalized(A0, magnitude, sub + 1, hermitian=hermitian)
        else:
            A = random_trace_one_operator(dim, sub + 1, hermitian=hermitian)
    elif matched:
        A = perturb_renormalized(A0, magnitude, sub + 1)
    else:
        A = random_density_matrix(dim, sub + 1).matrix
    return A0, A, f"{kind}-{'matched' if matched else 'independent'}"


def verify_theorem1(
    trials: Optional[int] = None,
    dims: Optional[Sequence[int]] = None,
    p_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    trials = settings.theorem_trials if trials is None else trials
    dims = list(settings.campaign_dims if dims is None else dims)
    p_grid = list(settings.theorem_p_grid if p_grid is None else p_grid)
    tolerance = settings.theorem_tolerance if tolerance is None else tolerance

    def trial_fn(trial: int) -> TrialResult:
        A0, A, kind = _theorem_corpus(seed, trial, dims)
        result = TrialResult(digest(A0.matrix, A))
        result.observations[kind] += 1
        for check in check_theorem1_pair(A0.spectrum, A, p_grid):
            result.add(check, tolerance)
        return result

    config = CampaignConfig(dims=dims, p_grid=p_grid, seed=seed, tolerance=tolerance)
    return _run_campaign("theorem1", trials, config, trial_fn)


def _random_family_ranks(dim: int, rng: np.random.Generator) -> list[int]:
    """Random partition of dim into blocks, some blocks dropped."""
    cuts = sorted(rng.choice(np.arange(1, dim), size=int(rng.integers(0, dim)), replace=False).tolist()) if dim > 1 else []
    sizes = [b - a for a, b in zip([0, *cuts], [*cuts, dim])]
    kept = [s for s in sizes if rng.random() >= 0.3]
    return kept or sizes[:1]


def verify_lemmas(
    trials: Optional[int] = None,
    dims: Optional[Sequence[int]] = None,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    trials = settings.lemma_trials if trials is None else trials
    dims = list(settings.lemma_dims if dims is None else dims)
    tolerance = settings.theorem_tolerance if tolerance is None else tolerance
    eq_tolerance = settings.equality_tolerance

    def trial_fn(trial: int) -> TrialResult:
        rng = make_rng(seed, trial)
        dim = int(rng.choice(dims))
        hermitian = trial % 2 == 0
        A = random_trace_one_operator(dim, int(rng.integers(2**31)), hermitian=hermitian)
        norm_a = schatten_norm(A, 1)
        P = random_projection(dim, int(rng.integers(0, dim + 1)), rng)
        result = TrialResult(digest(A, P.matrix))

        additivity = block_additivity_check(A, P)
        result.add(Check("block_additivity", additivity.lhs, additivity.rhs, "eq"), eq_tolerance * norm_a)

        family = random_projection_family(dim, _random_family_ranks(dim, rng), rng)
        result.add(Check("pinching_contraction", schatten_norm(pinch(A, family), 1), norm_a, "le"), tolerance)

        split = split_bound_check(A, P)
        result.add(Check("split_bound", split.lhs, split.rhs, "le"), tolerance)
        if split.rhs - split.lhs > tolerance:
            result.observations["split_bound_strict"] += 1

        # commuting case: P built from eigenvectors (Hermitian A) or coordinates (diagonal A)
        if hermitian:
            C, basis = A, hermitian_eig(A).eigenvectors
        else:
            C = np.diag(np.diagonal(A))
            C = C / schatten_norm(C, 1)
            basis = np.eye(dim, dtype=np.complex128)
        rank = int(rng.integers(0, dim + 1))
        P_c = projection_from_vectors([basis[:, i] for i in range(rank)], dim=dim)
        commuting = split_bound_check(C, P_c)
        if commuting.commuting:
            result.add(
                Check("split_bound_commuting", commuting.lhs, commuting.rhs, "eq"),
                eq_tolerance * schatten_norm(C, 1),
            )
        else:
            result.observations["commuting_not_detected"] += 1
        return result

    config = CampaignConfig(
        dims=dims, seed=seed, tolerance=tolerance, equality_tolerance=eq_tolerance
    )
    return _run_campaign("lemmas", trials, config, trial_fn)


def verify_norm_relations(
    trials: Optional[int] = None,
    dims: Optional[Sequence[int]] = None,
    p_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    tolerance: float = 1e-10,
) -> VerificationReport:
    trials = settings.norm_trials if trials is None else trials
    dims = list(settings.lemma_dims if dims is None else dims)
    p_grid = sorted(settings.norm_p_grid if p_grid is None else p_grid)

    def trial_fn(trial: int) -> TrialResult:
        rng = make_rng(seed, trial)
        dim = int(rng.choice(dims))
        M = ginibre(dim, rng) * 10.0 ** rng.uniform(-2.0, 2.0)
        B = ginibre(dim, rng) * 10.0 ** rng.uniform(-2.0, 2.0)
        U = random_unitary(dim, rng)
        V = random_unitary(dim, rng)
        result = TrialResult(digest(M, B))

        s_m = singular_values(M)
        s_b = singular_values(B)
        norm_m = {p: norm_from_singular_values(s_m, p) for p in p_grid}
        norm_b = {p: norm_from_singular_values(s_b, p) for p in p_grid}

        for i, p in enumerate(p_grid):
            for q in p_grid[i + 1:]:
                result.add(Check(f"monotone[{p:g}<{q:g}]", norm_m[q], norm_m[p], "le"), tolerance * max(1.0, norm_m[p]))

            scale = max(1.0, norm_m[p] + norm_b[p])
            result.add(Check(f"triangle[{p:g}]", schatten_norm(M + B, p), norm_m[p] + norm_b[p], "le"), tolerance * scale)

            product = norm_m[p] * schatten_norm(B, conjugate_exponent(p))
            result.add(Check(f"holder[{p:g}]", schatten_norm(M @ B, 1), product, "le"), tolerance * max(1.0, product))

            rotated = schatten_norm(U @ M @ V, p)
            result.add(Check(f"unitary[{p:g}]", rotated, norm_m[p], "eq"), 1e-9 * max(1.0, norm_m[p]))

        product = norm_from_singular_values(s_m, 1) * norm_from_singular_values(s_b, math.inf)
        result.add(Check("holder_trace_operator", schatten_norm(M @ B, 1), product, "le"), tolerance * max(1.0, product))

        rank = int(rng.integers(1, dim + 1))
        P = random_projection(dim, rank, rng)
        s_p = singular_values(P.matrix)
        for p in p_grid:
            q = conjugate_exponent(p)
            expected = float(rank) ** (1.0 / q)
            result.add(Check(f"projection_norm[q={q:g}]", norm_from_singular_values(s_p, q), expected, "eq"), 1e-12 * max(1.0, expected))

        u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        R = np.outer(u, v.conj())
        s_r = singular_values(R)
        top = norm_from_singular_values(s_r, math.inf)
        for p in p_grid:
            result.add(Check(f"rank_one[{p:g}]", norm_from_singular_values(s_r, p), top, "eq"), 1e-12 * max(1.0, top))
        return result

    config = CampaignConfig(dims=dims, p_grid=p_grid, seed=seed, tolerance=tolerance)
    return _run_campaign("norms", trials, config, trial_fn)


def verify_proof_chain(
    trials: Optional[int] = None,
    dims: Optional[Sequence[int]] = None,
    p_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    """Every intermediate inequality of the bound's derivation, over the theorem corpus."""
    trials = settings.proof_trials if trials is None else trials
    dims = list(settings.campaign_dims if dims is None else dims)
    p_grid = list(settings.theorem_p_grid if p_grid is None else p_grid)
    tolerance = settings.theorem_tolerance if tolerance is None else tolerance
    eq_tolerance = settings.equality_tolerance

    def trial_fn(trial: int) -> TrialResult:
        A0, A, kind = _theorem_corpus(seed, trial, dims)
        rng = make_rng(seed, trial, 1)
        result = TrialResult(digest(A0.matrix, A))
        result.observations[kind] += 1
        ranks = sorted({0, A0.dim // 2, A0.dim, int(rng.integers(0, A0.dim + 1))})
        for p in p_grid:
            for N in ranks:
                for check in proof_chain(A0.spectrum, A, p, N).checks():
                    named = Check(f"{check.name}[p={p:g},N={N}]", check.lhs, check.rhs, check.kind)
                    result.add(named, eq_tolerance if check.kind == "eq" else tolerance)
        return result

    config = CampaignConfig(
        dims=dims, p_grid=p_grid, seed=seed, tolerance=tolerance, equality_tolerance=eq_tolerance
    )
    return _run_campaign("proof-chain", trials, config, trial_fn)


CAMPAIGNS: dict[str, Callable[..., VerificationReport]] = {
    "theorem1": verify_theorem1,
    "lemmas": verify_lemmas,
    "norms": verify_norm_relations,
    "proof-chain": verify_proof_chain,
}


def run_campaign(name: str, trials: Optional[int], seed: int, dims: Optional[Sequence[int]] = None) -> VerificationReport:
    """Dispatch a campaign by name with the shared CLI arguments."""
    if name not in CAMPAIGNS:
        raise ValueError(f"unknown campaign {name!r}; choose from {sorted(CAMPAIGNS)}")
    return CAMPAIGNS[name](trials=trials, dims=dims, seed=seed)


def sweep_corollary1(
    A0: GeneratedState,
    p: float,
    magnitudes: Sequence[float],
    seed: int,
    hermitian: bool = True,
) -> SweepTable:
    """Certificate and true trace-norm error along shrinking perturbations of A0."""
    if not magnitudes:
        raise ValueError("magnitude grid must not be empty")
    rows = []
    for magnitude in magnitudes:
        A = perturb_renormalized(A0, magnitude, seed, hermitian=hermitian, p=p)
        exact = certify_exact(A0.spectrum, A, p)
        cert = exact.certificate
        rows.append(
            SweepRow(
                swept=magnitude,
                N=cert.N,
                truncation_term=cert.truncation_term,
                tail_term=cert.tail_term,
                bound=cert.bound,
                true_error=exact.true_1_error,
                p_error=exact.p_error,
            )
        )
        logger.info(
            f"[SWEEP] corollary1 magnitude={magnitude:.1e} p_error={exact.p_error:.3e} "
            f"true={exact.true_1_error:.3e} bound={cert.bound:.3e} N={cert.N}"
        )
    return SweepTable(kind="corollary1", swept_name="magnitude", p=p, rows=rows)


def sweep_corollary2(model: DecayModel, p: float, eps_grid: Sequence[float]) -> SweepTable:
    """(ε, N_{A0}(ε), (3 N^{1/q} + 2) ε) along an ε grid."""
    if not eps_grid:
        raise ValueError("epsilon grid must not be empty")
    q = conjugate_exponent(p)
    rows = []
    for eps in eps_grid:
        N = n_epsilon(model, eps)
        bound = corollary2_bound(eps, p, model)
        rows.append(
            SweepRow(
                swept=eps,
                N=N,
                truncation_term=3.0 * count_power(N, 1.0 / q) * eps,
                tail_term=2.0 * eps,
                bound=bound,
                p_error=eps,
            )
        )
        logger.info(f"[SWEEP] corollary2 eps={eps:.1e} N={N} bound={bound:.3e}")
    return SweepTable(kind="corollary2", swept_name="epsilon", p=p, rows=rows)
