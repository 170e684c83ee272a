import argparse
import logging
import sys
from typing import Optional, Sequence

from src.cli.handlers import EXIT_USAGE, HANDLERS
from src.config import settings

logger = logging.getLogger(__name__)


def int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schatten-certify",
        description="Trace-norm error certificates from Schatten p-norm errors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    certify = sub.add_parser("certify", help="certify a trace-norm error")
    certify.add_argument("--p", type=float, required=True, help="Schatten exponent, 1 < p < inf")
    certify.add_argument("--a0", help="matrix file of the reference operator (exact mode)")
    certify.add_argument("--a", help="matrix file of the estimate (exact mode)")
    certify.add_argument("--p-error", type=float, help="known p-norm error (model mode)")
    certify.add_argument(
        "--model", nargs="+", metavar="ARG",
        help="powerlaw C ALPHA | exponential C BETA | empirical FILE",
    )
    certify.add_argument("--n-max", type=int, help="largest truncation rank scanned")
    certify.add_argument("--out", help="also write the certificate JSON here")

    verify = sub.add_parser("verify", help="run verification campaigns")
    verify.add_argument(
        "--campaign", default="all",
        choices=["theorem1", "lemmas", "norms", "proof-chain", "all"],
    )
    verify.add_argument("--trials", type=int, help="trials per campaign (campaign default if omitted)")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--dims", type=int_list, help="comma-separated dimensions, e.g. 2,4,8")
    verify.add_argument("--out", help="report file, or a directory when running all campaigns")

    generate = sub.add_parser(
        "generate",
        help="write a state or estimate to a matrix file",
        description=(
            "Random draws use numpy's Philox generator keyed by SeedSequence([seed, *stream]). "
            "Rerunning with the same arguments writes a byte-identical matrix file."
        ),
    )
    generate.add_argument("--state", required=True, choices=["gibbs", "powerlaw", "density", "estimate"])
    generate.add_argument("--dim", type=int, required=True)
    generate.add_argument("--beta", type=float)
    generate.add_argument("--alpha", type=float)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--basis-seed", type=int, help="rotate model states by a seeded Haar unitary")
    generate.add_argument("--non-hermitian", action="store_true", help="general (non-Hermitian) estimate")
    generate.add_argument("--out")

    sweep = sub.add_parser(
        "sweep",
        help="write a convergence sweep as CSV",
        description=(
            "CSV columns, in order: the swept value (magnitude for corollary1, epsilon for corollary2), "
            "then N, truncation_term, tail_term, bound, true_error. "
            "true_error is empty when no reference operator is available."
        ),
    )
    sweep.add_argument("--kind", required=True, choices=["corollary1", "corollary2"])
    sweep.add_argument("--p", type=float, required=True)
    sweep.add_argument("--model", nargs="+", metavar="ARG")
    sweep.add_argument("--eps", type=float, nargs="*", help="p-error grid (default 1e-1 .. 1e-6)")
    sweep.add_argument("--magnitudes", type=float, nargs="*", help="perturbation grid (default 1e-1 .. 1e-6)")
    sweep.add_argument("--a0", help="matrix file of the reference state")
    sweep.add_argument("--beta", type=float, help="Gibbs reference state when --a0 is absent (default 1)")
    sweep.add_argument("--dim", type=int, help="Gibbs reference dimension (default 16)")
    sweep.add_argument("--basis-seed", type=int)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--non-hermitian", action="store_true")
    sweep.add_argument("--out")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help and 2 for usage errors
        return EXIT_USAGE if e.code else 0

    code = HANDLERS[args.command](args)
    logger.info(f"[CMD] {args.command} finished exit={code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
