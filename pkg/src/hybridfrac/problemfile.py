"""Problem files: UTF-8 text, one ``key = value`` per line, ``#`` starts a comment.

Required keys are alpha, f, g, phi, rho, k and r. Real-valued keys accept any
constant expression (``k = 1/4``).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import expr as ex
from .problem import ProblemSpec
from .solver import SolveSettings

REQUIRED = ("alpha", "f", "g", "phi", "rho", "k", "r")
DEFAULTS = {
    "r0_search_max": 2.0,
    "grid_points": 1025,
    "tol": 1e-10,
    "max_iter": 200,
    "damping": 1.0,
    "seed": 0,
    "sample_budget": 100_000,
}
_INT_KEYS = {"grid_points", "max_iter", "seed", "sample_budget"}
_EXPR_KEYS = {"f", "g", "phi", "rho"}
KEYS = REQUIRED + tuple(DEFAULTS)


class ProblemFileError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemFile:
    spec: ProblemSpec
    settings: SolveSettings
    seed: int

    def with_overrides(
        self,
        grid: Optional[int] = None,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> "ProblemFile":
        changes = {}
        if grid is not None:
            changes["grid_points"] = grid
        if tol is not None:
            changes["tol"] = tol
        if max_iter is not None:
            changes["max_iter"] = max_iter
        try:
            settings = dataclasses.replace(self.settings, **changes)
        except ValueError as err:
            raise ProblemFileError(str(err)) from None
        return ProblemFile(self.spec, settings, self.seed if seed is None else seed)


def _real(key: str, text: str, lineno: int) -> float:
    try:
        return float(ex.evaluate(ex.parse(text, frozenset()), {}))
    except ex.ExprError as err:
        raise ProblemFileError(f"line {lineno}: {key}: {err}") from None


def _int(key: str, text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ProblemFileError(f"line {lineno}: {key} must be an integer, got {text!r}") from None


def loads(text: str) -> ProblemFile:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ProblemFileError(f"line {lineno}: expected 'key = value'")
        if key not in KEYS:
            raise ProblemFileError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ProblemFileError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ProblemFileError(f"line {lineno}: empty value for {key!r}")
        raw[key] = (value, lineno)
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ProblemFileError(f"missing required key(s): {', '.join(missing)}")

    vals: dict = dict(DEFAULTS)
    exprs = {}
    for key, (value, lineno) in raw.items():
        if key in _EXPR_KEYS:
            allowed = ex.F_VARS if key in ("f", "g") else ex.DELAY_VARS
            try:
                exprs[key] = ex.parse(value, allowed)
            except ex.ExprError as err:
                raise ProblemFileError(f"line {lineno}: {key}: {err}") from None
        elif key in _INT_KEYS:
            vals[key] = _int(key, value, lineno)
        else:
            vals[key] = _real(key, value, lineno)
    try:
        spec = ProblemSpec(
            alpha=vals["alpha"],
            f_expr=exprs["f"],
            g_expr=exprs["g"],
            phi_expr=exprs["phi"],
            rho_expr=exprs["rho"],
            k_exp=vals["k"],
            r_exp=vals["r"],
            r0_search_max=vals["r0_search_max"],
            sample_budget=vals["sample_budget"],
        )
        settings = SolveSettings(
            grid_points=vals["grid_points"],
            tol=vals["tol"],
            max_iter=vals["max_iter"],
            damping=vals["damping"],
        )
    except ValueError as err:
        raise ProblemFileError(str(err)) from None
    return ProblemFile(spec, settings, vals["seed"])


def load(path) -> ProblemFile:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(pf: ProblemFile) -> str:
    s, st = pf.spec, pf.settings
    lines = [
        f"alpha = {s.alpha!r}",
        f"f = {ex.to_source(s.f_expr)}",
        f"g = {ex.to_source(s.g_expr)}",
        f"phi = {ex.to_source(s.phi_expr)}",
        f"rho = {ex.to_source(s.rho_expr)}",
        f"k = {s.k_exp!r}",
        f"r = {s.r_exp!r}",
        f"r0_search_max = {s.r0_search_max!r}",
        f"grid_points = {st.grid_points}",
        f"tol = {st.tol!r}",
        f"max_iter = {st.max_iter}",
        f"damping = {st.damping!r}",
        f"seed = {pf.seed}",
        f"sample_budget = {s.sample_budget}",
    ]
    return "\n".join(lines) + "\n"


def bundled(name: str = "example1") -> Path:
    """Path of a problem file shipped with the package."""
    return Path(str(resources.files("hybridfrac") / "data" / f"{name}.txt"))
