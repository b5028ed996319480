"""Puiseux-series solutions of nonlinear q-difference equations.

The pipeline: parse an equation into a q-difference polynomial, run the
Newton polygon process to branch over leading exponents and characteristic
roots, stabilize into the linear (pivot) regime, and report the solutions'
exponent structure and q-Gevrey order.
"""

from qpuiseux.field import (
    EXACT,
    EvalDenominatorZero,
    ExactField,
    KScalar,
    NumericField,
    QMonomialSum,
    kscalar,
    qpow,
)
from qpuiseux.poly import PuiseuxSeries, QDiffPolynomial
from qpuiseux.polygon import NewtonPolygon, build_polygon
from qpuiseux.charpoly import CharPolynomial, RootCandidate, build_char_poly, nonzero_roots
from qpuiseux.solver import SolverConfig, SolutionBranch, SolveResult, solve
from qpuiseux.gevrey import GevreyReport, empirical_order, theoretical_bound
from qpuiseux.parser import lower, parse_equation, parse_scalar

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "EvalDenominatorZero",
    "ExactField",
    "KScalar",
    "NumericField",
    "QMonomialSum",
    "kscalar",
    "qpow",
    "PuiseuxSeries",
    "QDiffPolynomial",
    "NewtonPolygon",
    "build_polygon",
    "CharPolynomial",
    "RootCandidate",
    "build_char_poly",
    "nonzero_roots",
    "SolverConfig",
    "SolutionBranch",
    "SolveResult",
    "solve",
    "GevreyReport",
    "empirical_order",
    "theoretical_bound",
    "lower",
    "parse_equation",
    "parse_scalar",
]
