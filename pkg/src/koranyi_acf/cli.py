"""Command-line entry point: ``koranyi-acf <command> [flags]``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import report
from .errors import KoranyiError
from .quad import QuadSpec

COMMANDS = ("verify-identities", "lemma-integrals", "eig", "h-scan", "acf-scan", "report")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    tol: float = 1e-6
    grid: Optional[list] = None
    seed: int = 42
    output: str = "json"
    out_path: Optional[str] = None
    phi: Optional[list] = None
    beta: Optional[list] = None
    r: Optional[list] = None
    pair: str = "xpair"
    grid2d: list = field(default_factory=lambda: [128, 128])


def _float_list(s: str) -> list:
    try:
        vals = [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {s!r}")
    return vals


def _int_list(s: str) -> list:
    try:
        vals = [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None
    if not vals or min(vals) <= 0:
        raise argparse.ArgumentTypeError(f"grid sizes must be positive, got {s!r}")
    return vals


def _tol(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance {s!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_tol, default=1e-6, help="check tolerance (default 1e-6)")
    common.add_argument("--grid", type=_int_list, default=None,
                        help="N or N,N,N: sample count, eigen grid or quadrature panels, per command")
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", dest="out_path", default=None, metavar="PATH", help="write report here")

    p = argparse.ArgumentParser(prog="koranyi-acf", description="Sub-Riemannian calculus checks on the Heisenberg group.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("verify-identities", parents=[common], help="frame identities against finite differences")
    sub.add_parser("lemma-integrals", parents=[common], help="closed-form integrals and quotients")
    e = sub.add_parser("eig", parents=[common], help="ground state of a cap around the t-axis")
    e.add_argument("--phi", type=_float_list, default=[math.pi / 2], help="cap half-opening (default pi/2)")
    h = sub.add_parser("h-scan", parents=[common], help="tabulate h(phi) on a phi grid")
    h.add_argument("--phi", type=_float_list, default=None, help="phi grid (default 21 points in [0.1, pi-0.1])")
    a = sub.add_parser("acf-scan", parents=[common], help="J_beta on a beta by r grid with monotonicity verdicts")
    a.add_argument("--pair", default="xpair", help="xpair, tpair or tpair(a,b)")
    a.add_argument("--beta", type=_float_list, default=[3.0, 4.0, 5.0])
    a.add_argument("--r", type=_float_list, default=[0.25, 0.5, 1.0])
    r = sub.add_parser("report", parents=[common], help="every suite in one report")
    r.add_argument("--grid2d", type=_int_list, default=[128, 128], help="theta,phi cells of the 2-D Ritz grid")
    return p


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command, tol=ns.tol, grid=ns.grid, seed=ns.seed, output=ns.output, out_path=ns.out_path)
    for k in ("phi", "beta", "r", "pair", "grid2d"):
        if hasattr(ns, k):
            setattr(cfg, k, getattr(ns, k))
    return cfg


def _quad_spec(grid) -> QuadSpec:
    if grid is None:
        return QuadSpec()
    if len(grid) == 1:
        grid = grid * 3
    if len(grid) != 3:
        raise UsageError("--grid takes one or three panel counts")
    return QuadSpec(*grid)


def _single(grid, default: int, what: str) -> int:
    if grid is None:
        return default
    if len(grid) != 1:
        raise UsageError(f"--grid takes a single {what}")
    return grid[0]


def run(cfg: RunConfig) -> report.Report:
    if cfg.command == "verify-identities":
        return report.verify_identities(cfg.seed, cfg.tol, _single(cfg.grid, 1000, "sample count"))
    if cfg.command == "lemma-integrals":
        return report.lemma_integrals(min(cfg.tol, 1e-9), _quad_spec(cfg.grid))
    if cfg.command == "eig":
        if len(cfg.phi) != 1:
            raise UsageError("eig takes a single --phi")
        return report.eig(cfg.phi[0], _single(cfg.grid, 2000, "eigen grid"))
    if cfg.command == "h-scan":
        return report.h_scan(_single(cfg.grid, 2000, "eigen grid"), cfg.phi, cfg.tol)
    if cfg.command == "acf-scan":
        return report.acf_scan(cfg.pair, cfg.beta, cfg.r, _quad_spec(cfg.grid), cfg.tol)
    if len(cfg.grid2d) != 2:
        raise UsageError("--grid2d takes two cell counts")
    return report.full_report(cfg.seed, cfg.tol, QuadSpec(), _single(cfg.grid, 2000, "eigen grid"), tuple(cfg.grid2d))


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        rep = run(cfg)
        text = rep.render(cfg.output)
    except (UsageError, KoranyiError, ValueError) as exc:
        print(f"koranyi-acf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.out_path:
            with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except OSError as exc:
        print(f"koranyi-acf: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
