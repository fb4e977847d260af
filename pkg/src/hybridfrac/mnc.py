"""Modulus-of-continuity diagnostics for families of sampled functions.

Only finite-epsilon curves are produced, down to the grid spacing. The limit
epsilon -> 0 is never reported as a number since a finite sample cannot tell a
zero limit from a small positive one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fracops import Grid, SampledFunction
from .problem import ProblemSpec
from .solver import Operator

# lags are computed as floor(eps / h + _LAG_SLACK) so eps = m h hits lag m exactly
_LAG_SLACK = 1e-9


@dataclass(frozen=True)
class FunctionFamily:
    members: tuple[SampledFunction, ...]

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise ValueError("a function family needs at least one member")
        n = members[0].grid.n_points
        if any(m.grid.n_points != n for m in members):
            raise ValueError("family members must share one grid")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Sequence[SampledFunction]) -> "FunctionFamily":
        return cls(tuple(members))

    @property
    def grid(self) -> Grid:
        return self.members[0].grid

    def norm(self) -> float:
        return max(m.sup_norm() for m in self.members)

    def values(self) -> np.ndarray:
        return np.stack([m.values for m in self.members])

    def map_values(self, fn) -> "FunctionFamily":
        return FunctionFamily(tuple(SampledFunction(self.grid, fn(m.values)) for m in self.members))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ModulusCurve:
    epsilons: np.ndarray
    omegas: np.ndarray

    def rows(self):
        return list(zip(self.epsilons.tolist(), self.omegas.tolist()))


def _max_lag(eps: float, h: float) -> int:
    return int(np.floor(eps / h + _LAG_SLACK))


def lag_increments(values: np.ndarray, max_lag: int) -> np.ndarray:
    """``D[m-1] = max_i |v[i+m] - v[i]|`` for m = 1..max_lag; rows of a 2-D input are pooled."""
    v = np.atleast_2d(values)
    n = v.shape[1]
    max_lag = min(max_lag, n - 1)
    out = np.empty(max_lag)
    for m in range(1, max_lag + 1):
        out[m - 1] = np.max(np.abs(v[:, m:] - v[:, :-m]))
    return out


def modulus(x: SampledFunction, eps: float) -> float:
    """Largest ``|x(t_i) - x(t_j)|`` over node pairs with ``|t_i - t_j| <= eps``."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    lag = _max_lag(eps, x.grid.h)
    if lag == 0:
        return 0.0
    return float(np.max(lag_increments(x.values, lag)))


def default_epsilons(grid: Grid) -> np.ndarray:
    """Dyadic ladder 2^-1, 2^-2, ... down to the grid spacing."""
    m_max = int(np.floor(np.log2(grid.n_points - 1) + 1e-12))
    return 2.0 ** -np.arange(1, m_max + 1)


def _check_epsilons(epsilons, h: float) -> np.ndarray:
    eps = np.asarray(epsilons, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise ValueError("epsilons must be a nonempty 1-D sequence")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be strictly decreasing")
    if eps[0] > 1.0:
        raise ValueError("epsilons must not exceed 1")
    if eps[-1] < h * (1 - _LAG_SLACK):
        raise ValueError(f"epsilon {eps[-1]:g} is below the grid spacing {h:g}")
    return eps


def _curve_from_values(values: np.ndarray, eps: np.ndarray, h: float) -> np.ndarray:
    lags = np.array([_max_lag(e, h) for e in eps])
    inc = np.maximum.accumulate(lag_increments(values, int(lags.max())))
    return inc[np.minimum(lags, inc.size) - 1]


def family_modulus_curve(X: FunctionFamily, epsilons=None) -> ModulusCurve:
    """``omega(X, eps) = max over members of modulus(x, eps)`` for each eps."""
    h = X.grid.h
    eps = _check_epsilons(default_epsilons(X.grid) if epsilons is None else epsilons, h)
    return ModulusCurve(eps, _curve_from_values(X.values(), eps, h))


@dataclass(frozen=True)
class ContractionRow:
    eps: float
    omega_x: float
    omega_tx: float
    bound: float


@dataclass(frozen=True)
class ContractionDiagnostic:
    rows: list[ContractionRow]
    curve_x: ModulusCurve
    curve_fx: ModulusCurve
    curve_gx: ModulusCurve
    curve_tx: ModulusCurve
    images_f: FunctionFamily
    images_g: FunctionFamily
    images_t: FunctionFamily


def contraction_diagnostic(X: FunctionFamily, spec: ProblemSpec, epsilons=None) -> ContractionDiagnostic:
    """Tabulate omega(X), omega(TX) and the comparison bound (omega(X)+1)^k - 1.

    The curves for the two factors F X and G X come out of the same pass. No
    verdict is attached: the contraction concerns the eps -> 0 limit.
    """
    grid = X.grid
    eps = _check_epsilons(default_epsilons(grid) if epsilons is None else epsilons, grid.h)
    T = Operator(spec, grid)
    FX = X.map_values(T.F)
    GX = X.map_values(T.G)
    TX = FunctionFamily(
        tuple(SampledFunction(grid, f.values * g.values) for f, g in zip(FX.members, GX.members))
    )
    cx, cf, cg, ct = (family_modulus_curve(Y, eps) for Y in (X, FX, GX, TX))
    bound = (cx.omegas + 1.0) ** spec.k_exp - 1.0
    rows = [
        ContractionRow(float(e), float(a), float(b), float(c))
        for e, a, b, c in zip(eps, cx.omegas, ct.omegas, bound)
    ]
    return ContractionDiagnostic(rows, cx, cf, cg, ct, FX, GX, TX)


@dataclass(frozen=True)
class ConditionMRow:
    eps: float
    omega_xy: float
    rhs: float
    slack: float = 0.0  # absorbs rounding in the products

    @property
    def holds(self) -> bool:
        return self.omega_xy <= self.rhs + self.slack


def product_family(X: FunctionFamily, Y: FunctionFamily) -> FunctionFamily:
    vx, vy = X.values(), Y.values()
    prods = (vx[:, None, :] * vy[None, :, :]).reshape(-1, vx.shape[1])
    return FunctionFamily(tuple(SampledFunction(X.grid, p) for p in prods))


def condition_m_diagnostic(X: FunctionFamily, Y: FunctionFamily, epsilons=None) -> list[ConditionMRow]:
    """``omega(XY, eps)`` against ``|X| omega(Y, eps) + |Y| omega(X, eps)``.

    XY is the family of all pairwise pointwise products. The inequality holds
    exactly at every eps in exact arithmetic; rows carry a rounding slack of a
    few ulps of ``|X| |Y|``.
    """
    if X.grid.n_points != Y.grid.n_points:
        raise ValueError("families must share one grid")
    grid = X.grid
    eps = _check_epsilons(default_epsilons(grid) if epsilons is None else epsilons, grid.h)
    XY = product_family(X, Y)
    nx, ny = X.norm(), Y.norm()
    wx = family_modulus_curve(X, eps).omegas
    wy = family_modulus_curve(Y, eps).omegas
    wxy = family_modulus_curve(XY, eps).omegas
    slack = 8 * np.finfo(float).eps * nx * ny
    return [
        ConditionMRow(float(e), float(a), float(nx * b + ny * c), slack)
        for e, a, b, c in zip(eps, wxy, wy, wx)
    ]


# ------------------------------------------------ comparison-class checks


def class_f_members(beta: float = 1.0, alpha: float = 0.5):
    """Functions (0, inf) -> (1, inf) that tend to 1 exactly when t -> 0."""
    return {
        "exp_sqrt": lambda t: np.exp(np.sqrt(t)),
        "one_plus_t2_pow": lambda t: (1.0 + t * t) ** beta,
        "two_minus_atan": lambda t: 2.0 - (2.0 / np.pi) * np.arctan(1.0 / t**alpha),
        "shift_one": lambda t: t + 1.0,
    }


def class_f_check(phi, t_away: float = 0.1, n: int = 200) -> tuple[bool, str]:
    """Sampled membership test for the comparison class.

    Along ``t_n = 2^-n`` the values must approach 1 from above; on
    ``[t_away, 100]`` they must stay above ``1 + delta`` for a positive delta.
    """
    tn = 2.0 ** -np.arange(1, 60)
    v = phi(tn)
    if not np.all(v > 1.0 - 1e-15):
        return False, "value not above 1 near 0"
    if abs(v[-1] - 1.0) > 1e-6:
        return False, f"phi(t_n) does not approach 1 (last {v[-1]:.3g})"
    if np.any(np.diff(np.abs(v - 1.0)) > 1e-15):
        return False, "phi(t_n) - 1 is not shrinking along t_n -> 0"
    far = phi(np.linspace(t_away, 100.0, n))
    delta = float(np.min(far) - 1.0)
    if delta <= 0:
        return False, f"phi reaches 1 away from 0 (min excess {delta:.3g})"
    return True, f"delta={delta:.6g} on [{t_away:g}, 100]"
