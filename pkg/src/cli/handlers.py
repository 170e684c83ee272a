import argparse
import functools
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ValidationError

from src.bounds.engine import certify_exact, optimal_certificate
from src.bounds.models import Certificate, DecayModel, Exponential, PowerLaw
from src.config import settings
from src.errors import (
    CertifyError,
    InvalidExponent,
    InvalidMatrix,
    MatrixFileError,
    NotHermitian,
)
from src.linalg.core import hermitian_eig, is_normal
from src.linalg.schatten import validate_open_exponent
from src.states.generator import (
    gibbs_state,
    power_law_state,
    random_density_matrix,
    random_trace_one_operator,
    state_from_matrix,
)
from src.storage.matrix_file import MatrixMetadata, store
from src.verify.harness import CAMPAIGNS, run_campaign, sweep_corollary1, sweep_corollary2

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class CertifyOutput(BaseModel):
    mode: str
    certificate: Certificate
    true_1_error: Optional[float] = None


def fail(kind: str, message: str, code: int) -> int:
    """One machine-parsable line on stderr, mapped to an exit code."""
    logger.error(f"[ERR] {kind}: {message}")
    print(f"error: {kind}: {message}", file=sys.stderr)
    return code


def guarded(handler):
    """Map library and file errors raised by a command to exit codes."""

    @functools.wraps(handler)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            return handler(args)
        except UsageError as e:
            return fail("usage", str(e), EXIT_USAGE)
        except InvalidExponent:
            return fail("validation", "p must satisfy 1 < p < ∞", EXIT_USAGE)
        except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
            return fail("io", f"{e.strerror}: {e.filename}", EXIT_IO)
        except MatrixFileError as e:
            return fail("parse", str(e), EXIT_IO)
        except ValidationError as e:
            return fail("validation", e.errors()[0]["msg"], EXIT_USAGE)
        except (CertifyError, ValueError) as e:
            return fail("validation", str(e), EXIT_USAGE)
        except ArithmeticError as e:
            return fail("validation", f"numerical range exceeded: {e}", EXIT_USAGE)

    return wrapper


def parse_model(tokens: list[str]) -> DecayModel:
    """`powerlaw C ALPHA`, `exponential C BETA` or `empirical FILE`."""
    if not tokens:
        raise UsageError("--model needs a model kind")
    kind, params = tokens[0].lower(), tokens[1:]
    if kind == "empirical" and len(params) == 1:
        return store.load_moduli(params[0])
    if kind in ("powerlaw", "exponential") and len(params) == 2:
        try:
            C, rate = float(params[0]), float(params[1])
        except ValueError:
            raise UsageError(f"--model {kind} expects two numbers, got {params}")
        if kind == "powerlaw":
            return PowerLaw(C=C, alpha=rate)
        model = Exponential(C=C, beta=rate)
        if not model.normalizes_state:
            logger.warning(f"[CMD] exponential C={C} is below 1 - e^-beta; no unit-trace state fits under this envelope")
        return model
    raise UsageError("--model must be 'powerlaw C ALPHA', 'exponential C BETA' or 'empirical FILE'")


def _emit(payload: BaseModel, out: Optional[str]) -> None:
    print(payload.model_dump_json(indent=2))
    if out:
        store.write_json(out, payload)


@guarded
def cmd_certify(args: argparse.Namespace) -> int:
    """Certify a trace-norm error, from two matrix files or from a p-error and a decay model."""
    p = validate_open_exponent(args.p)
    logger.info(f"[CMD] certify p={p} mode={'exact' if args.a0 or args.a else 'model'}")

    if args.a0 or args.a:
        if not (args.a0 and args.a):
            raise UsageError("exact mode needs both --a0 and --a")
        A0 = store.load_matrix(args.a0)
        A = store.load_matrix(args.a)
        if not is_normal(A0, settings.tau_herm):
            raise InvalidMatrix("A0 is not normal within tolerance")
        try:
            spectrum = hermitian_eig(A0)
        except NotHermitian:
            raise InvalidMatrix("A0 must be Hermitian; other normal operators are accepted as spectrum data only")
        result = certify_exact(spectrum, A, p)
        _emit(CertifyOutput(mode="exact", certificate=result.certificate, true_1_error=result.true_1_error), args.out)
        return EXIT_OK

    if args.p_error is None or args.model is None:
        raise UsageError("give --a0 and --a, or --p-error and --model")
    if args.p_error < 0:
        raise UsageError("--p-error must be non-negative")
    model = parse_model(args.model)
    cert = optimal_certificate(args.p_error, p, model, N_max=args.n_max)
    _emit(CertifyOutput(mode="model", certificate=cert), args.out)
    return EXIT_OK


@guarded
def cmd_verify(args: argparse.Namespace) -> int:
    """Run verification campaigns; exit 1 if any check is violated."""
    names = sorted(CAMPAIGNS) if args.campaign == "all" else [args.campaign]
    logger.info(f"[CMD] verify campaigns={names} trials={args.trials} seed={args.seed}")

    failed = False
    for name in names:
        report = run_campaign(name, args.trials, args.seed, dims=args.dims)
        if args.out and len(names) == 1:
            path = Path(args.out)
        elif args.out:
            path = Path(args.out) / f"report-{name}.json"
        else:
            path = store.default_path(f"report-{name}.json")
        store.write_json(path, report)
        print(f"{name}: status={report.status} checks={report.checks} "
              f"violations={len(report.violations)} min_slack={report.min_slack:.3e}")
        failed = failed or not report.passed
    return EXIT_VIOLATIONS if failed else EXIT_OK


@guarded
def cmd_generate(args: argparse.Namespace) -> int:
    """Write a model state, random density matrix or trace-one estimate to a matrix file."""
    logger.info(f"[CMD] generate state={args.state} dim={args.dim}")
    if args.dim < 1:
        raise UsageError("--dim must be at least 1")

    if args.state == "gibbs":
        if args.beta is None:
            raise UsageError("gibbs needs --beta")
        state = gibbs_state(args.beta, args.dim, basis_seed=args.basis_seed)
        matrix, model = state.matrix, state.model
        logger.debug(f"[CMD] generate envelope excess={state.envelope_excess():.3e}")
    elif args.state == "powerlaw":
        if args.alpha is None:
            raise UsageError("powerlaw needs --alpha")
        state = power_law_state(args.alpha, args.dim, basis_seed=args.basis_seed)
        matrix, model = state.matrix, state.model
        logger.debug(f"[CMD] generate envelope excess={state.envelope_excess():.3e}")
    elif args.state == "density":
        matrix, model = random_density_matrix(args.dim, args.seed).matrix, None
    else:
        matrix, model = random_trace_one_operator(args.dim, args.seed, hermitian=not args.non_hermitian), None

    metadata = MatrixMetadata(
        name=f"{args.state}-dim{args.dim}",
        model=model,
        seed=args.seed if args.state in ("density", "estimate") else None,
        basis_seed=args.basis_seed,
    )
    path = args.out or store.default_path(f"{args.state}-dim{args.dim}.json")
    store.save_matrix(path, matrix, metadata)
    print(str(path))
    return EXIT_OK


@guarded
def cmd_sweep(args: argparse.Namespace) -> int:
    """Write a convergence sweep as CSV."""
    p = validate_open_exponent(args.p)
    logger.info(f"[CMD] sweep kind={args.kind} p={p}")

    if args.kind == "corollary2":
        if args.model is None:
            raise UsageError("corollary2 sweep needs --model")
        eps_grid = args.eps if args.eps is not None else [10.0 ** -k for k in range(1, 7)]
        if not eps_grid:
            raise UsageError("epsilon grid must not be empty")
        table = sweep_corollary2(parse_model(args.model), p, eps_grid)
    else:
        magnitudes = args.magnitudes if args.magnitudes is not None else [10.0 ** -k for k in range(1, 7)]
        if not magnitudes:
            raise UsageError("magnitude grid must not be empty")
        if args.a0:
            A0 = state_from_matrix(store.load_matrix(args.a0))
        else:
            A0 = gibbs_state(args.beta if args.beta is not None else 1.0, args.dim or 16, basis_seed=args.basis_seed)
        table = sweep_corollary1(A0, p, magnitudes, args.seed, hermitian=not args.non_hermitian)

    path = args.out or store.default_path(f"sweep-{args.kind}.csv")
    store.write_sweep(path, table)
    print(str(path))
    return EXIT_OK


HANDLERS = {
    "certify": cmd_certify,
    "verify": cmd_verify,
    "generate": cmd_generate,
    "sweep": cmd_sweep,
}

