"""Problem data for D^a[x / f(t, x, x(phi t))] = g(t, x, x(rho t)), x(0) = 0 on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expr as ex

DEFAULT_T_SAMPLES = 1001
DEFAULT_BOX_SAMPLES = 101
# values of |f| at or below this count as vanishing
F_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ProblemSpec:
    """Fractional order, the four data functions, and the growth exponents k and r.

    ``k_exp`` and ``r_exp`` are the exponents of the comparison function
    ``(d + 1)^k - 1`` that bounds the increments of f and g respectively.
    """

    alpha: float
    f_expr: ex.Expr
    g_expr: ex.Expr
    phi_expr: ex.Expr
    rho_expr: ex.Expr
    k_exp: float
    r_exp: float
    r0_search_max: float = 2.0
    sample_budget: int = 100_000

    def __post_init__(self) -> None:
        for name in ("alpha", "k_exp", "r_exp"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {value}")
        if not self.r0_search_max > 0:
            raise ValueError(f"r0_search_max must be positive, got {self.r0_search_max}")
        if self.sample_budget < 1:
            raise ValueError(f"sample_budget must be >= 1, got {self.sample_budget}")
        for name, allowed in (
            ("f_expr", ex.F_VARS),
            ("g_expr", ex.F_VARS),
            ("phi_expr", ex.DELAY_VARS),
            ("rho_expr", ex.DELAY_VARS),
        ):
            extra = ex.variables(getattr(self, name)) - allowed
            if extra:
                raise ValueError(f"{name} uses undeclared variables {sorted(extra)}")

    @classmethod
    def from_sources(
        cls, alpha: float, f: str, g: str, phi: str, rho: str, k: float, r: float, **kw
    ) -> "ProblemSpec":
        return cls(
            alpha=alpha,
            f_expr=ex.parse(f, ex.F_VARS),
            g_expr=ex.parse(g, ex.F_VARS),
            phi_expr=ex.parse(phi, ex.DELAY_VARS),
            rho_expr=ex.parse(rho, ex.DELAY_VARS),
            k_exp=k,
            r_exp=r,
            **kw,
        )

    def f(self, t, x, y):
        return _eval_txy(self.f_expr, t, x, y)

    def g(self, t, x, y):
        return _eval_txy(self.g_expr, t, x, y)

    def phi(self, t):
        return _eval_t(self.phi_expr, t)

    def rho(self, t):
        return _eval_t(self.rho_expr, t)


def _eval_txy(e, t, x, y):
    t, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, y)))
    out = ex.evaluate(e, {"t": t, "x": x, "y": y})
    return np.broadcast_to(out, t.shape) if t.ndim else out


def _eval_t(e, t):
    t = np.asarray(t, dtype=float)
    out = ex.evaluate(e, {"t": t})
    return np.broadcast_to(out, t.shape) if t.ndim else out


def example1(a: float = 4.0, b: float = 3.0) -> ProblemSpec:
    """The worked example: alpha = 1/2, phi = t/(1+t), rho = atan t, k = 1/4, r = 1/3.

    ``a`` and ``b`` are the scaling constants dividing f and g.
    """
    return ProblemSpec.from_sources(
        alpha=0.5,
        f=f"(1/{a:g})*((1+abs(x))^(1/4) + (1+abs(y))^(1/4))",
        g=f"(1/{b:g})*((1+abs(x))^(1/3) + (1+abs(y))^(1/3))",
        phi="t/(1+t)",
        rho="atan(t)",
        k=0.25,
        r=1 / 3,
    )


@dataclass(frozen=True)
class Violation:
    kind: str  # "phi-range", "rho-range", "f-zero", "domain"
    message: str
    witness: dict[str, float] = field(default_factory=dict)

    def __str__(self) -> str:
        where = ", ".join(f"{k}={v:.12g}" for k, v in self.witness.items())
        return f"{self.kind}: {self.message} at ({where})"


@dataclass(frozen=True)
class DerivedConstants:
    K1: float
    K2: float


def _delay_violations(name: str, e: ex.Expr, t: np.ndarray) -> list[Violation]:
    try:
        v = _eval_t(e, t)
    except ex.ExprDomainError as err:
        i = err.index or 0
        return [Violation("domain", f"{name}: {err.message}", {"t": float(t[i])})]
    bad = np.flatnonzero((v < 0.0) | (v > 1.0))
    if bad.size == 0:
        return []
    # report the worst offender
    excess = np.maximum(v[bad] - 1.0, -v[bad])
    i = bad[int(np.argmax(excess))]
    return [
        Violation(
            f"{name}-range",
            f"{name}(t) = {v[i]:.12g} lies outside [0, 1]",
            {"t": float(t[i])},
        )
    ]


def _f_zero_violations(spec: ProblemSpec, t: np.ndarray, n_box: int) -> list[Violation]:
    R = spec.r0_search_max
    xs = np.linspace(-R, R, n_box)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    lo_val, lo_at = np.inf, None
    fmin, fmax = np.inf, -np.inf
    # chunk over t to bound memory
    chunk = max(1, 2_000_000 // X.size)
    for start in range(0, t.size, chunk):
        tt = t[start : start + chunk]
        T = np.repeat(tt, X.size)
        XX = np.tile(X, tt.size)
        YY = np.tile(Y, tt.size)
        try:
            v = spec.f(T, XX, YY)
        except ex.ExprDomainError as err:
            i = err.index or 0
            return [
                Violation(
                    "domain",
                    f"f: {err.message}",
                    {"t": float(T[i]), "x": float(XX[i]), "y": float(YY[i])},
                )
            ]
        j = int(np.argmin(np.abs(v)))
        if abs(v[j]) < lo_val:
            lo_val, lo_at = abs(v[j]), (T[j], XX[j], YY[j])
        fmin = min(fmin, float(v.min()))
        fmax = max(fmax, float(v.max()))
    if lo_val <= F_ZERO_TOL or (fmin < 0.0 < fmax):
        t0, x0, y0 = lo_at
        if lo_val <= F_ZERO_TOL:
            msg = f"f vanishes (|f| = {lo_val:.3g})"
        else:
            msg = f"f changes sign on the sampled box (min |f| = {lo_val:.3g})"
        return [
            Violation("f-zero", msg, {"t": float(t0), "x": float(x0), "y": float(y0)})
        ]
    return []


def validate(
    spec: ProblemSpec,
    n_samples: int = DEFAULT_T_SAMPLES,
    n_box: int = DEFAULT_BOX_SAMPLES,
) -> list[Violation]:
    """Sample-based check that phi, rho map [0,1] into [0,1] and f stays away from 0.

    f is sampled on [0,1] x [-R, R]^2 with R = ``spec.r0_search_max``, using
    ``n_samples`` values of t and ``n_box`` values per x, y axis.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    t = np.linspace(0.0, 1.0, n_samples)
    out = []
    out += _delay_violations("phi", spec.phi_expr, t)
    out += _delay_violations("rho", spec.rho_expr, t)
    out += _f_zero_violations(spec, t, n_box)
    try:
        spec.g(t, 0.0, 0.0)
    except ex.ExprDomainError as err:
        out.append(Violation("domain", f"g: {err.message}", {"t": float(t[err.index or 0])}))
    return out


def derive_constants(spec: ProblemSpec, n_samples: int = DEFAULT_T_SAMPLES) -> DerivedConstants:
    """Sampled K1 = max |f(t,0,0)| and K2 = max |g(t,0,0)| over t in [0, 1]."""
    t = np.linspace(0.0, 1.0, n_samples)
    K1 = float(np.max(np.abs(spec.f(t, 0.0, 0.0))))
    K2 = float(np.max(np.abs(spec.g(t, 0.0, 0.0))))
    return DerivedConstants(K1, K2)
