"""Gamma function via the Lanczos approximation (g = 7, nine coefficients)."""

from __future__ import annotations

import math

import numpy as np

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma(x: float) -> float:
    """Return Gamma(x) for real x that is not a nonpositive integer.

    Arguments below 1/2 go through the reflection formula.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _COEFFS[0]
    for i, c in enumerate(_COEFFS[1:], start=1):
        acc += c / (z + i)
    w = z + _G + 0.5
    return _SQRT_2PI * w ** (z + 0.5) * math.exp(-w) * acc


def gamma_array(x) -> np.ndarray:
    return np.vectorize(gamma, otypes=[float])(np.asarray(x, dtype=float))
