"""Bundled numerical self-checks: oracles, comparison-function properties and the worked example."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hypotheses, mnc
from .fracops import Grid, SampledFunction, frac_derivative, frac_integral, product_trapezoid_weights
from .gamma import gamma
from .problem import derive_constants, example1
from .solver import Sign, SolveSettings, solve

# errors at or below this are treated as exact when estimating convergence order
ROUNDOFF_FLOOR = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def power_rule_errors(alpha: float, beta: float, sizes) -> list[float]:
    """Max node error of the discrete integral of t^beta against the closed form."""
    out = []
    for n in sizes:
        g = Grid(n)
        z = frac_integral(SampledFunction(g, g.nodes**beta), alpha).values
        exact = math.gamma(beta + 1) / math.gamma(alpha + beta + 1) * g.nodes ** (alpha + beta)
        out.append(float(np.max(np.abs(z - exact))))
    return out


def observed_orders(errors) -> list[float]:
    e = np.asarray(errors)
    return list(np.log2(e[:-1] / e[1:]))


def roundtrip_error(alpha: float, n: int) -> float:
    """Interior max error of D^a I^a y for y = t(1-t), relative to max |y|."""
    g = Grid(n)
    y = SampledFunction(g, g.nodes * (1 - g.nodes))
    back = frac_derivative(frac_integral(y, alpha), alpha).values
    return float(np.max(np.abs(back - y.values)[1:-1]) / np.max(np.abs(y.values)))


def _check_gamma() -> Check:
    g = gamma(1.5)
    xs = np.linspace(1e-3, 10.0, 4001)
    rel = max(abs(gamma(x) / math.gamma(x) - 1) for x in xs)
    ok = abs(g - 0.8862) <= 5e-5 and rel <= 1e-10
    return Check("gamma", ok, f"Gamma(3/2)={g:.10f}, max rel err on (0,10]={rel:.2e}")


def _check_power_rule() -> Check:
    worst, details, ok = 0.0, [], True
    for a, b in ((0.5, 1), (0.5, 2), (0.25, 1), (0.75, 1)):
        errs = power_rule_errors(a, b, (129, 257, 513, 1025))
        worst = max(worst, errs[-1])
        if errs[-1] > 1e-4:
            ok = False
        if min(errs) > ROUNDOFF_FLOOR:
            order = min(observed_orders(errs))
            ok &= order >= 1.9
            details.append(f"({a},{b}) order {order:.2f}")
        else:
            ok &= max(errs) <= ROUNDOFF_FLOOR
            details.append(f"({a},{b}) exact")
    return Check("power-rule", ok, f"max err {worst:.2e}; " + ", ".join(details))


def _check_weights() -> Check:
    worst = 0.0
    for a in (0.1, 0.5, 0.9):
        w = product_trapezoid_weights(257, a)
        b = w.matrix()
        t = Grid(257).nodes
        exact = t**a / gamma(a + 1)
        rel = np.abs(b.sum(axis=1)[1:] - exact[1:]) / exact[1:]
        worst = max(worst, float(rel.max()))
        if b.min() < 0:
            return Check("weights", False, f"negative weight for alpha={a}")
    return Check("weights", worst <= 1e-12, f"row-sum identity max rel err {worst:.2e}")


def _check_roundtrip() -> Check:
    ok, parts = True, []
    for a in (0.3, 0.5, 0.7):
        e1, e2 = roundtrip_error(a, 1025), roundtrip_error(a, 2049)
        ok &= e2 <= 1e-2 and e2 < e1
        parts.append(f"a={a}: {e2:.2e}")
    return Check("roundtrip", ok, ", ".join(parts))


def _check_comparison_fn() -> Check:
    bad = {}
    for i, k in enumerate((0.1, 0.25, 0.5, 0.9)):
        v = hypotheses.comparison_violations(k, 10_000, seed=i)
        if any(v.values()):
            bad[k] = v
    c = hypotheses.comparison
    lhs = abs(float(c(3.0, 0.5) - c(1.0, 0.5)))
    rhs = float(c(2.0, 0.5))
    ok = not bad and lhs <= rhs
    return Check("comparison-fn", ok, f"violations={bad or 0}; |c(3)-c(1)|={lhs:.3f} <= c(2)={rhs:.3f}")


def _check_class_f() -> Check:
    results = {k: mnc.class_f_check(f) for k, f in mnc.class_f_members(beta=0.5).items()}
    ok = all(r[0] for r in results.values())
    return Check("comparison-class", ok, ", ".join(f"{k}:{'ok' if r[0] else r[1]}" for k, r in results.items()))


def _check_example1() -> Check:
    spec = example1()
    c = derive_constants(spec)
    psi1, psi2 = hypotheses.h4_functions(c.K1, c.K2, spec.k_exp, spec.r_exp, spec.alpha)
    r0 = hypotheses.find_r0(c.K1, c.K2, spec.k_exp, spec.r_exp, spec.alpha, 2.0)
    ok = (
        c.K1 == 0.5
        and c.K2 == 2 / 3
        and -0.0035 <= psi2(0.8) <= -0.0025
        and psi1(0.8) <= 0
        and r0 is not None
        and r0 <= 0.8
    )
    return Check(
        "example1-constants",
        ok,
        f"K1={c.K1:g} K2={c.K2:.6f} psi2(0.8)={psi2(0.8):.5f} psi1(0.8)={psi1(0.8):.4f} r0={r0}",
    )


def _check_example1_solve() -> Check:
    res = solve(example1(), SolveSettings(grid_points=513))
    ok = res.converged and res.sup_norm <= 0.801 and res.sign is Sign.POSITIVE
    return Check(
        "example1-solve",
        ok,
        f"iterations={res.iterations} sup_norm={res.sup_norm:.6f} sign={res.sign.value}",
    )


CHECKS: list[Callable[[], Check]] = [
    _check_gamma,
    _check_power_rule,
    _check_weights,
    _check_roundtrip,
    _check_comparison_fn,
    _check_class_f,
    _check_example1,
    _check_example1_solve,
]


def run_all() -> list[Check]:
    out = []
    for fn in CHECKS:
        try:
            out.append(fn())
        except Exception as err:  # a crashing check is a failing check
            out.append(Check(fn.__name__.lstrip("_"), False, f"raised {err!r}"))
    return out
