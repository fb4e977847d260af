"""Picard iteration for x = f(t, x(t), x(phi t)) * I^alpha[g(s, x(s), x(rho s))](t).

The iteration is only a computational device: existence of a fixed point in the
invariant ball does not imply that the iteration converges, so non-convergence
is reported as an outcome rather than assumed away.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import expr as ex
from .fracops import Grid, SampledFunction, product_trapezoid_weights
from .problem import ProblemSpec

# factor by which the quadrature grid is refined when measuring the residual
RESIDUAL_REFINE = 8
# phi/rho values farther than this outside [0, 1] are rejected rather than clamped
DELAY_CLAMP_TOL = 1e-12


class Sign(str, Enum):
    POSITIVE = "positive-on-(0,1)"
    NEGATIVE = "negative-on-(0,1)"
    ZERO = "zero"
    CHANGING = "sign-changing"


class OperatorDomainError(ex.ExprDomainError):
    """A data function failed at a grid node; ``t`` names the node."""

    def __init__(self, which: str, message: str, t: float):
        self.which = which
        self.t = t
        super().__init__(f"{which}: {message} at t={t:.12g}")


@dataclass(frozen=True)
class SolveSettings:
    grid_points: int = 1025
    tol: float = 1e-10
    max_iter: int = 200
    damping: float = 1.0
    keep_iterates: bool = False

    def __post_init__(self) -> None:
        if self.grid_points < 33:
            raise ValueError(f"grid_points must be >= 33, got {self.grid_points}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass
class SolveResult:
    x: SampledFunction
    converged: bool
    iterations: int
    final_step: float
    residual: float
    fixed_point_defect: float
    sup_norm: float
    sign: Sign
    history: list[float]
    contraction_estimate: float
    iterates: list[SampledFunction] = field(default_factory=list)

    def summary_items(self) -> list[tuple[str, str]]:
        return [
            ("status", "converged" if self.converged else "not-converged"),
            ("grid_points", str(self.x.grid.n_points)),
            ("iterations", str(self.iterations)),
            ("final_step", f"{self.final_step:.6e}"),
            ("fixed_point_defect", f"{self.fixed_point_defect:.6e}"),
            ("contraction_estimate", f"{self.contraction_estimate:.6g}"),
            ("residual", f"{self.residual:.6e}"),
            ("sup_norm", f"{self.sup_norm:.12g}"),
            ("sign", self.sign.value),
        ]


class Operator:
    """The fixed-point map T = F * G on one grid, with delay points precomputed.

    ``F x = f(t, x(t), x(phi t))`` and ``G x = I^alpha g(s, x(s), x(rho s))``.
    """

    def __init__(self, spec: ProblemSpec, grid: Grid):
        self.spec = spec
        self.grid = grid
        self.weights = product_trapezoid_weights(grid.n_points, spec.alpha)
        t = grid.nodes
        self.phi_t = self._delay_points("phi", spec.phi_expr, t)
        self.rho_t = self._delay_points("rho", spec.rho_expr, t)

    @staticmethod
    def _delay_points(which: str, e: ex.Expr, t: np.ndarray) -> np.ndarray:
        try:
            v = np.broadcast_to(ex.evaluate(e, {"t": t}), t.shape).astype(float)
        except ex.ExprDomainError as err:
            raise OperatorDomainError(which, err.message, t[err.index or 0]) from None
        bad = (v < -DELAY_CLAMP_TOL) | (v > 1.0 + DELAY_CLAMP_TOL)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise OperatorDomainError(which, f"value {v[i]:.12g} outside [0, 1]", t[i])
        return np.clip(v, 0.0, 1.0)

    def _call(self, which: str, fn, x: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        t = self.grid.nodes
        try:
            return np.asarray(fn(t, x, np.interp(delayed, t, x)), dtype=float)
        except ex.ExprDomainError as err:
            raise OperatorDomainError(which, err.message, t[err.index or 0]) from None

    def F(self, x: np.ndarray) -> np.ndarray:
        return self._call("f", self.spec.f, x, self.phi_t)

    def g_values(self, x: np.ndarray) -> np.ndarray:
        return self._call("g", self.spec.g, x, self.rho_t)

    def G(self, x: np.ndarray) -> np.ndarray:
        return self.weights.apply(self.g_values(x))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = self.F(x) * self.G(x)
        out[0] = 0.0
        return out


def apply_T(x: SampledFunction, spec: ProblemSpec) -> SampledFunction:
    return SampledFunction(x.grid, Operator(spec, x.grid)(x.values))


def integral_equation_residual(x: SampledFunction, spec: ProblemSpec, refine: int = RESIDUAL_REFINE) -> float:
    """Defect ``max_i |x(t_i) - (T x)(t_i)|`` with T evaluated on a finer grid.

    The iterate is extended by linear interpolation to a grid ``refine`` times
    finer, the operator is applied there, and the result is compared with x at
    the original nodes. This is independent of the iteration's own quadrature,
    so it measures how well x satisfies the continuous integral equation.
    """
    n = x.grid.n_points
    fine = Grid(refine * (n - 1) + 1)
    xf = np.interp(fine.nodes, x.grid.nodes, x.values)
    tx = Operator(spec, fine)(xf)[::refine]
    return float(np.max(np.abs(x.values - tx)))


def classify_sign(x: SampledFunction, zero_tol: Optional[float] = None) -> Sign:
    """Sign of x on the interior nodes; default tolerance is 1e-8 * max(1, |x|)."""
    if zero_tol is None:
        zero_tol = 1e-8 * max(1.0, x.sup_norm())
    v = x.values[1:-1]
    if np.all(v > zero_tol):
        return Sign.POSITIVE
    if np.all(v < -zero_tol):
        return Sign.NEGATIVE
    if np.all(np.abs(v) <= zero_tol):
        return Sign.ZERO
    return Sign.CHANGING


def solve(spec: ProblemSpec, settings: SolveSettings = SolveSettings()) -> SolveResult:
    """Damped Picard iteration from x = 0.

    Stops when the sup-norm update falls below ``settings.tol``. When
    ``max_iter`` is reached first the result has ``converged=False`` and carries
    the iterate with the smallest update seen.
    """
    grid = Grid(settings.grid_points)
    T = Operator(spec, grid)
    d = settings.damping
    x = np.zeros(grid.n_points)
    history: list[float] = []
    iterates = [SampledFunction(grid, x)] if settings.keep_iterates else []
    best_x, best_step = x, np.inf
    converged = False
    for _ in range(settings.max_iter):
        tx = T(x)
        x_new = tx if d == 1.0 else (1.0 - d) * x + d * tx
        x_new[0] = 0.0
        step = float(np.max(np.abs(x_new - x)))
        history.append(step)
        x = x_new
        if settings.keep_iterates:
            iterates.append(SampledFunction(grid, x))
        if step < best_step:
            best_x, best_step = x, step
        if step < settings.tol:
            converged = True
            break
    if not converged:
        x = best_x
    sol = SampledFunction(grid, x)
    defect = float(np.max(np.abs(x - T(x))))
    return SolveResult(
        x=sol,
        converged=converged,
        iterations=len(history),
        final_step=history[-1],
        residual=integral_equation_residual(sol, spec),
        fixed_point_defect=defect,
        sup_norm=sol.sup_norm(),
        sign=classify_sign(sol),
        history=history,
        contraction_estimate=_contraction_estimate(history),
        iterates=iterates,
    )


def _contraction_estimate(history: list[float]) -> float:
    """Median ratio of successive updates over the last few steps (nan if too short)."""
    h = np.asarray(history[-6:])
    h = h[h > 0]
    if h.size < 2:
        return float("nan")
    return float(np.median(h[1:] / h[:-1]))
