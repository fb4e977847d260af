"""Numerics for hybrid fractional pantograph equations

    D^alpha [ x(t) / f(t, x(t), x(phi(t))) ] = g(t, x(t), x(rho(t))),  x(0) = 0,

on [0, 1] with 0 < alpha < 1, solved through the equivalent fixed-point equation
x = f(t, x, x o phi) * I^alpha g(., x, x o rho).
"""

from .hypotheses import HypothesisReport, certify, check_h3, find_r0, h4_functions
from .expr import evaluate, parse
from .fracops import Grid, SampledFunction, frac_derivative, frac_integral
from .gamma import gamma
from .mnc import (
    FunctionFamily,
    condition_m_diagnostic,
    contraction_diagnostic,
    family_modulus_curve,
    modulus,
)
from .problem import ProblemSpec, derive_constants, example1, validate
from .solver import Sign, SolveResult, SolveSettings, apply_T, classify_sign, solve

__version__ = "0.1.0"
