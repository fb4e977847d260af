"""Empirical certification of the growth condition on f, g and the radius search for r0.

The growth condition asks that the increments of f (resp. g) are bounded by the
comparison function ``c_k(d) = (d + 1)^k - 1`` of ``d = max(|dx|, |dy|)``. It is
checked by seeded random sampling on ``[0,1] x [-R, R]^4``; passing means the
data are empirically consistent with the bound, not that it is proved.

The radius r0 must satisfy

    ((r0+1)^k - 1 + K1) ((r0+1)^r - 1 + K2) <= r0 Gamma(alpha+1)
    (r0+1)^r - 1 + K2 <= Gamma(alpha+1)

which makes the ball of radius r0 invariant under the fixed-point operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import expr as ex
from .gamma import gamma
from .problem import DerivedConstants, ProblemSpec, Violation, derive_constants, validate

H3_SLACK = 1e-12
H4_SLACK = 1e-12
R0_PRECISION = 1e-6
DEFAULT_SCAN = 2000
_CHUNK = 50_000


def comparison(d, k: float):
    """``(d + 1)^k - 1``; nondecreasing, concave and subadditive on [0, inf)."""
    return np.expm1(k * np.log1p(d))


@dataclass(frozen=True)
class H3Result:
    ok: bool
    worst_margin: float
    witness: dict[str, float]
    n_trials: int
    error: Optional[str] = None


def _h3_one(fn, k: float, R: float, n_trials: int, rng: np.random.Generator) -> H3Result:
    worst = -np.inf
    witness: dict[str, float] = {}
    done = 0
    while done < n_trials:
        m = min(_CHUNK, n_trials - done)
        t = rng.uniform(0.0, 1.0, m)
        x1, y1, x2, y2 = rng.uniform(-R, R, (4, m))
        try:
            df = np.abs(fn(t, x1, y1) - fn(t, x2, y2))
        except ex.ExprDomainError as err:
            i = err.index or 0
            witness = dict(t=t[i], x1=x1[i], y1=y1[i], x2=x2[i], y2=y2[i])
            return H3Result(False, np.inf, _floats(witness), done + i + 1, str(err))
        margin = df - comparison(np.maximum(np.abs(x1 - x2), np.abs(y1 - y2)), k)
        # argmax picks the lowest trial index among ties
        i = int(np.argmax(margin))
        if margin[i] > worst:
            worst = float(margin[i])
            witness = dict(t=t[i], x1=x1[i], y1=y1[i], x2=x2[i], y2=y2[i])
        done += m
    return H3Result(worst <= H3_SLACK, worst, _floats(witness), n_trials)


def _floats(d: dict) -> dict[str, float]:
    return {k: float(v) for k, v in d.items()}


def check_h3(spec: ProblemSpec, n_trials: int, seed: int) -> tuple[H3Result, H3Result]:
    """Sample the growth bound for f (exponent k) and g (exponent r).

    f and g draw from independent child streams of ``seed`` so each result is
    reproducible on its own.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    R = spec.r0_search_max
    f_seq, g_seq = np.random.SeedSequence(seed).spawn(2)
    rf = _h3_one(spec.f, spec.k_exp, R, n_trials, np.random.default_rng(f_seq))
    rg = _h3_one(spec.g, spec.r_exp, R, n_trials, np.random.default_rng(g_seq))
    return rf, rg


def h4_functions(
    K1: float, K2: float, k: float, r: float, alpha: float
) -> tuple[Callable, Callable]:
    """The two radius inequalities written as ``psi(r0) <= 0``."""
    g1 = gamma(alpha + 1.0)

    def psi1(r0):
        return (comparison(r0, k) + K1) * (comparison(r0, r) + K2) - r0 * g1

    def psi2(r0):
        return comparison(r0, r) + K2 - g1

    return psi1, psi2


def find_r0(
    K1: float,
    K2: float,
    k: float,
    r: float,
    alpha: float,
    r_max: float,
    n_scan: int = DEFAULT_SCAN,
) -> Optional[float]:
    """Smallest feasible radius in (0, r_max], or None.

    psi1 can change sign twice, so the interval is scanned first and only the
    first infeasible-to-feasible transition is refined by bisection.
    """
    if r_max <= 0 or n_scan < 2:
        raise ValueError("need r_max > 0 and n_scan >= 2")
    psi1, psi2 = h4_functions(K1, K2, k, r, alpha)

    def feasible(r0):
        return (psi1(r0) <= H4_SLACK) & (psi2(r0) <= H4_SLACK)

    grid = r_max * np.arange(1, n_scan + 1) / n_scan
    ok = feasible(grid)
    if not np.any(ok):
        return None
    j = int(np.argmax(ok))
    lo = grid[j - 1] if j > 0 else 0.0
    hi = float(grid[j])
    while hi - lo > R0_PRECISION:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    # the returned radius is re-checked by the caller-facing report as well
    assert feasible(hi)
    return hi


@dataclass
class HypothesisReport:
    violations: list[Violation]
    h3_f: H3Result
    h3_g: H3Result
    constants: DerivedConstants
    r0: Optional[float]
    h4_lhs_at_r0: float = float("nan")
    h4_rhs_at_r0: float = float("nan")
    h4_second_lhs: float = float("nan")
    h4_second_rhs: float = float("nan")
    notes: list[str] = field(default_factory=list)

    @property
    def h1_h2_ok(self) -> bool:
        return not self.violations

    @property
    def certified(self) -> bool:
        return self.h1_h2_ok and self.h3_f.ok and self.h3_g.ok and self.r0 is not None

    def as_items(self) -> list[tuple[str, str]]:
        """Ordered key/value pairs for the text report."""

        def fmt(v):
            return "none" if v is None else f"{v:.12g}"

        items = [
            ("h1_h2_ok", str(self.h1_h2_ok).lower()),
            ("h1_h2_violations", str(len(self.violations))),
        ]
        for i, v in enumerate(self.violations):
            items.append((f"violation_{i}", str(v)))
        for name, res in (("f", self.h3_f), ("g", self.h3_g)):
            items += [
                (f"h3_{name}_ok", str(res.ok).lower()),
                (f"h3_{name}_trials", str(res.n_trials)),
                (f"h3_{name}_worst_margin", fmt(res.worst_margin)),
                (
                    f"h3_{name}_witness",
                    " ".join(f"{k}={v:.12g}" for k, v in res.witness.items()),
                ),
            ]
            if res.error:
                items.append((f"h3_{name}_error", res.error))
        items += [
            ("K1", fmt(self.constants.K1)),
            ("K2", fmt(self.constants.K2)),
            ("r0", fmt(self.r0)),
            ("h4_lhs_at_r0", fmt(self.h4_lhs_at_r0)),
            ("h4_rhs_at_r0", fmt(self.h4_rhs_at_r0)),
            ("h4_second_lhs", fmt(self.h4_second_lhs)),
            ("h4_second_rhs", fmt(self.h4_second_rhs)),
            ("certified", str(self.certified).lower()),
        ]
        items += [("note", n) for n in self.notes]
        return items


def certify(
    spec: ProblemSpec,
    seed: int = 0,
    n_trials: Optional[int] = None,
    n_samples: int = 1001,
    n_scan: int = DEFAULT_SCAN,
) -> HypothesisReport:
    """Run every check and collect the outcome in one report."""
    violations = validate(spec, n_samples)
    consts = derive_constants(spec, n_samples)
    rf, rg = check_h3(spec, n_trials or spec.sample_budget, seed)
    r0 = find_r0(
        consts.K1, consts.K2, spec.k_exp, spec.r_exp, spec.alpha, spec.r0_search_max, n_scan
    )
    report = HypothesisReport(violations, rf, rg, consts, r0)
    report.notes.append(
        f"growth bound is empirically consistent over {rf.n_trials} sampled trials; "
        "this is not a proof"
    )
    if r0 is not None:
        g1 = gamma(spec.alpha + 1.0)
        cf = comparison(r0, spec.k_exp)
        cg = comparison(r0, spec.r_exp)
        report.h4_lhs_at_r0 = float((cf + consts.K1) * (cg + consts.K2))
        report.h4_rhs_at_r0 = float(r0 * g1)
        report.h4_second_lhs = float(cg + consts.K2)
        report.h4_second_rhs = g1
    return report


def comparison_violations(k: float, n_pairs: int, seed: int, t_max: float = 10.0) -> dict[str, int]:
    """Count sampled failures of monotonicity and of ``|c(t) - c(s)| <= c(|t - s|)``."""
    rng = np.random.default_rng(seed)
    t, s = rng.uniform(0.0, t_max, (2, n_pairs))
    ct, cs = comparison(t, k), comparison(s, k)
    lo, hi = np.minimum(t, s), np.maximum(t, s)
    mono = int(np.sum(comparison(lo, k) > comparison(hi, k)))
    sub = int(np.sum(np.abs(ct - cs) > comparison(np.abs(t - s), k) + 1e-15))
    return {"monotone": mono, "subadditive": sub}
