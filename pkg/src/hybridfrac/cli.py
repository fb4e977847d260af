"""Command-line entry point.

Exit codes: 0 success, 1 I/O or format error, 2 certification failure,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

import numpy as np

from . import expr as ex
from .hypotheses import certify
from .fracops import SampledFunction
from .mnc import (
    FunctionFamily,
    condition_m_diagnostic,
    contraction_diagnostic,
)
from .problemfile import ProblemFile, ProblemFileError, bundled, load
from .selftest import run_all
from .solver import SolveResult, SolveSettings, solve

EXIT_OK = 0
EXIT_IO = 1
EXIT_CERT = 2
EXIT_NOCONV = 3

DIAGNOSE_ITERATES = 8


def _kv(out: TextIO, items) -> None:
    for k, v in items:
        out.write(f"{k} = {v}\n")


def _table(out: TextIO, header: Sequence[str], rows) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{float(v):.12g}"


def write_solution(out: TextIO, x: SampledFunction) -> None:
    _table(out, ("t", "x"), zip(x.t, x.values))


def _load(args) -> ProblemFile:
    path = args.file
    if path.startswith("@"):
        path = bundled(path[1:])
    pf = load(path)
    return pf.with_overrides(
        grid=getattr(args, "grid", None),
        tol=getattr(args, "tol", None),
        max_iter=getattr(args, "max_iter", None),
        seed=getattr(args, "seed", None),
    )


def cmd_check(args, out: TextIO) -> int:
    pf = _load(args)
    report = certify(pf.spec, seed=pf.seed)
    out.write("# hypothesis report\n")
    _kv(out, [("seed", pf.seed)] + report.as_items())
    return EXIT_OK if report.certified else EXIT_CERT


def cmd_solve(args, out: TextIO) -> int:
    pf = _load(args)
    res = solve(pf.spec, pf.settings)
    out.write("# solve summary\n")
    _kv(out, res.summary_items())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_solution(fh, res.x)
    else:
        out.write("\n")
        write_solution(out, res.x)
    return EXIT_OK if res.converged else EXIT_NOCONV


def harvest_family(res: SolveResult, n: int = DIAGNOSE_ITERATES) -> FunctionFamily:
    """Iterates x_1..x_n of a run; x_0 is added when fewer than two are available."""
    members = res.iterates[1 : n + 1]
    if len(members) < 2:
        members = res.iterates[: max(2, len(members) + 1)]
    return FunctionFamily.of(members)


def cmd_diagnose(args, out: TextIO) -> int:
    pf = _load(args)
    settings = SolveSettings(
        grid_points=pf.settings.grid_points,
        tol=pf.settings.tol,
        max_iter=min(pf.settings.max_iter, DIAGNOSE_ITERATES),
        damping=pf.settings.damping,
        keep_iterates=True,
    )
    res = solve(pf.spec, settings)
    X = harvest_family(res)
    diag = contraction_diagnostic(X, pf.spec)
    cond = condition_m_diagnostic(diag.images_f, diag.images_g)

    curves = {
        "X": diag.curve_x,
        "FX": diag.curve_fx,
        "GX": diag.curve_gx,
        "TX": diag.curve_tx,
    }
    # omegas are listed for decreasing eps, so they must not increase
    monotone = all(bool(np.all(np.diff(c.omegas) <= 0)) for c in curves.values())
    cond_ok = all(r.holds for r in cond)
    out.write("# diagnose summary\n")
    _kv(
        out,
        [
            ("family_size", len(X)),
            ("grid_points", X.grid.n_points),
            ("curves_monotone", str(monotone).lower()),
            ("condition_m_holds", str(cond_ok).lower()),
        ],
    )
    for name, c in curves.items():
        out.write(f"\n# modulus {name}\n")
        _table(out, ("eps", "omega"), c.rows())
    out.write("\n# contraction\n")
    _table(
        out,
        ("eps", "omega_X", "omega_TX", "bound"),
        [(r.eps, r.omega_x, r.omega_tx, r.bound) for r in diag.rows],
    )
    out.write("\n# condition_m FX GX\n")
    _table(out, ("eps", "omega_XY", "rhs", "holds"), [(r.eps, r.omega_xy, r.rhs, r.holds) for r in cond])
    return EXIT_OK if (monotone and cond_ok) else EXIT_CERT


def cmd_selftest(args, out: TextIO) -> int:
    checks = run_all()
    for c in checks:
        out.write(c.line() + "\n")
    failed = [c.name for c in checks if not c.passed]
    out.write(f"# {len(checks) - len(failed)}/{len(checks)} checks passed\n")
    if failed:
        out.write(f"# failing: {', '.join(failed)}\n")
    return EXIT_OK if not failed else EXIT_CERT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridfrac",
        description="Hybrid fractional pantograph problems: certify, solve, diagnose.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="problem file, or @name for a bundled one (e.g. @example1)")
        sp.add_argument("--grid", type=int, help="override grid_points")
        sp.add_argument("--tol", type=float, help="override tol")
        sp.add_argument("--max-iter", type=int, dest="max_iter", help="override max_iter")
        sp.add_argument("--seed", type=int, help="override seed")
        return sp

    with_file("check", "certify the existence hypotheses").set_defaults(func=cmd_check)
    sp = with_file("solve", "compute a fixed point")
    sp.add_argument("--out", help="write the t,x table here instead of stdout")
    sp.set_defaults(func=cmd_solve)
    with_file("diagnose", "modulus-of-continuity tables").set_defaults(func=cmd_diagnose)
    sub.add_parser("selftest", help="run the bundled numerical checks").set_defaults(
        func=cmd_selftest
    )
    return p


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (OSError, ProblemFileError, ex.ExprError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
