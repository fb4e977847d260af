"""Riemann-Liouville fractional integral and derivative on uniform grids over [0, 1].

The integral uses the product-trapezoidal rule: the integrand is replaced by its
piecewise-linear interpolant and the kernel moments are integrated exactly. On a
uniform grid with spacing ``h`` this gives

    I^a y(t_n) ~ h^a / Gamma(a + 2) * (A_n y_0 + sum_{j=1}^{n} c_{n-j} y_j)

with ``c_0 = 1``, ``c_m = (m+1)^b - 2 m^b + (m-1)^b`` and
``A_n = (n-1)^b - (n-1-a) n^b/n``, where ``b = a + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .gamma import gamma

# series is used for m >= _SERIES_FROM; u = 1/m <= 1/16 converges to double
# precision in well under _SERIES_TERMS terms
_SERIES_FROM = 16
_SERIES_TERMS = 24


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``t_i = i h`` on [0, 1] with ``h = 1 / (n_points - 1)``."""

    n_points: int

    def __post_init__(self) -> None:
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n_points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n_points, dtype=float) * self.h
        t[-1] = 1.0
        t.flags.writeable = False
        return t


@dataclass(frozen=True)
class SampledFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, fn, grid: Grid) -> "SampledFunction":
        return cls(grid, np.broadcast_to(fn(grid.nodes), (grid.n_points,)))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __call__(self, s) -> np.ndarray:
        """Piecewise-linear interpolation at arbitrary points of [0, 1]."""
        return np.interp(s, self.grid.nodes, self.values)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _binom_series(beta: float, n_terms: int) -> np.ndarray:
    """Coefficients binom(beta, k) for k = 0..n_terms-1."""
    out = np.empty(n_terms)
    out[0] = 1.0
    for k in range(1, n_terms):
        out[k] = out[k - 1] * (beta - k + 1) / k
    return out


def _second_differences(m: np.ndarray, beta: float) -> np.ndarray:
    """``(m+1)^b - 2 m^b + (m-1)^b`` for integers m >= 1, without cancellation."""
    m = np.asarray(m, dtype=float)
    out = (m + 1.0) ** beta - 2.0 * m**beta + (m - 1.0) ** beta
    big = m >= _SERIES_FROM
    if np.any(big):
        mb = m[big]
        u2 = (1.0 / mb) ** 2
        coef = _binom_series(beta, _SERIES_TERMS)
        acc = np.zeros_like(mb)
        # only even powers survive the symmetric difference
        for k in range(_SERIES_TERMS - 2, 1, -2):
            acc = acc * u2 + coef[k]
        out[big] = 2.0 * mb**beta * acc * u2
    return out


def _start_weights(n: np.ndarray, alpha: float) -> np.ndarray:
    """Weight of y_0 at node n >= 1: ``(n-1)^b - (n-1-a) n^a``."""
    beta = alpha + 1.0
    n = np.asarray(n, dtype=float)
    out = (n - 1.0) ** beta - (n - 1.0 - alpha) * n**alpha
    big = n >= _SERIES_FROM
    if np.any(big):
        nb = n[big]
        u = -1.0 / nb
        coef = _binom_series(beta, _SERIES_TERMS)
        # (1-1/n)^b - 1 + b/n + ... ; the (1+a)/n term cancels against b/n
        acc = np.zeros_like(nb)
        for k in range(_SERIES_TERMS - 1, 1, -1):
            acc = acc * u + coef[k]
        out[big] = nb**beta * acc * u * u
    return out


@dataclass(frozen=True)
class ProductTrapezoidWeights:
    """Weight table for I^alpha on a uniform grid, shared read-only."""

    n_points: int
    alpha: float
    scale: float
    start: np.ndarray  # weight of y_0 at each node (start[0] == 0)
    conv: np.ndarray  # c_m for m = 0..n_points-2

    def matrix(self) -> np.ndarray:
        """Dense lower-triangular matrix ``b[i, j]`` (tests and small grids only)."""
        n = self.n_points
        b = np.zeros((n, n))
        b[:, 0] = self.start
        for i in range(1, n):
            b[i, 1 : i + 1] = self.conv[:i][::-1]
        return self.scale * b

    def apply(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        z = np.empty(self.n_points)
        z[0] = 0.0
        z[1:] = np.convolve(self.conv, y[1:])[: self.n_points - 1]
        z[1:] += self.start[1:] * y[0]
        return self.scale * z


@lru_cache(maxsize=32)
def product_trapezoid_weights(n_points: int, alpha: float) -> ProductTrapezoidWeights:
    alpha = _check_alpha(alpha)
    grid = Grid(n_points)
    beta = alpha + 1.0
    idx = np.arange(1, n_points, dtype=float)
    conv = np.empty(n_points - 1)
    conv[0] = 1.0
    conv[1:] = _second_differences(idx[:-1], beta)
    start = np.zeros(n_points)
    start[1:] = _start_weights(idx, alpha)
    for arr in (conv, start):
        arr.flags.writeable = False
    scale = grid.h**alpha / gamma(alpha + 2.0)
    return ProductTrapezoidWeights(n_points, alpha, scale, start, conv)


def frac_integral(y: SampledFunction, alpha: float) -> SampledFunction:
    """Riemann-Liouville integral of order ``alpha`` in (0, 1)."""
    w = product_trapezoid_weights(y.grid.n_points, _check_alpha(alpha))
    return SampledFunction(y.grid, w.apply(y.values))


def frac_derivative(y: SampledFunction, alpha: float) -> SampledFunction:
    """Riemann-Liouville derivative as d/dt of the integral of order 1 - alpha.

    Central differences inside, second-order one-sided differences at both ends.
    A nonzero ``y(0)`` produces a t^-alpha singularity that the grid cannot resolve.
    """
    alpha = _check_alpha(alpha)
    z = frac_integral(y, 1.0 - alpha)
    d = np.gradient(z.values, y.grid.h, edge_order=2)
    return SampledFunction(y.grid, d)
