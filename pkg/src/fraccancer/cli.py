"""Command-line front-end: ``run`` sweeps and ``equilibria`` reports.

Exit status is 0 on full success, 2 when some sweep cells failed and 1 on a
configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import __version__
from .batch import emit_equilibrium_report, format_number, run_sweep
from .config import load_config
from .errors import ConfigError
from .model import ProvenanceWarning
from .optimizer import Scenario

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (status 1), not partial failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fraccancer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="optimise every (alpha, gamma1) cell of a scenario")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--scenario", choices=[s.value for s in Scenario])
    run.add_argument("--alpha", type=_float_list, help="comma-separated fractional orders")
    run.add_argument("--gamma1", type=_float_list, help="comma-separated chemo decay rates")
    run.add_argument("--tf", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--out", type=str)
    run.add_argument("--workers", type=int)

    eq = sub.add_parser("equilibria", help="equilibrium and stability report at constant doses")
    eq.add_argument("--config", required=True, type=Path)
    eq.add_argument("--u1", required=True, type=float)
    eq.add_argument("--u2", required=True, type=float)
    eq.add_argument("--out", required=True, type=Path)
    return parser


def _load(path: Path):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ProvenanceWarning)
        cfg = load_config(path)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load(args.config)
    cfg = cfg.with_overrides(
        scenario=Scenario.parse(args.scenario) if args.scenario else None,
        alpha_list=args.alpha,
        gamma1_list=args.gamma1,
        t_f=args.tf,
        dt=args.dt,
        output_dir=args.out,
        workers=args.workers,
    )
    result = run_sweep(cfg)
    for (alpha, gamma1, scenario), cell in sorted(result.cells.items()):
        status = "ok" if cell.ok else (cell.error or "not converged")
        cost = "-" if cell.cost is None else format_number(cell.cost)
        print(f"{scenario} alpha={alpha!r} gamma1={gamma1!r} J={cost} sweeps={cell.sweeps_used} {status}")
    return EXIT_PARTIAL if result.failures else EXIT_OK


def _cmd_equilibria(args) -> int:
    cfg = _load(args.config)
    if args.u1 < 0 or args.u2 < 0:
        raise ConfigError("doses must be non-negative")
    path = emit_equilibrium_report(cfg.params, args.u1, args.u2, args.out / "report.txt")
    print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_equilibria(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
