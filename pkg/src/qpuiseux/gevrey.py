"""q-Gevrey order: empirical estimation and the theoretical bound.

A power series sum(a_m * x^m) is q-Gevrey of order s (for |q| != 1) when

    |a_m| <= C * A^m * |q|^(s * m^2 / 2)

for some constants C, A.  The order is read off coefficient growth:
pointwise, s_m = 2*ln|a_m| / (m^2 * ln|q|); more robustly, as the
least-squares slope of ln|a_m| against m^2*ln|q|/2 (the affine intercept
absorbs C, making the estimate scale-invariant).

Ramified branches are re-indexed onto the integer grid m = exponent / step
using the branch's exponent lattice before estimating.

The theoretical bound is expressed in terms of the order n of the equation
(the largest shift appearing): solutions are q-Gevrey of order at most n.
The bound is tight: y = x * y(q^n x) + x is solved by a_m = q^(n*m(m-1)/2),
which has order exactly n, and n = 0 means an algebraic equation, whose
Puiseux solutions are convergent (order 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np

from qpuiseux.field import KScalar
from qpuiseux.poly import INF
from qpuiseux.solver import EXACT_ZERO, PivotData, SolutionBranch, exponent_grid


class InsufficientCoefficients(ValueError):
    """The estimation window holds fewer known coefficients than required."""


class QModulusOne(ValueError):
    """|q| = 1 does not separate q-Gevrey classes."""


MIN_WINDOW_COEFFS = 20


@dataclass
class GevreyReport:
    s_emp: float
    s_pointwise: float
    fit_window: Tuple[int, int]
    per_m: List[Tuple[int, float]]
    s_bound: Optional[Fraction] = None
    dominated: Optional[bool] = None

    def to_json(self) -> dict:
        out = {
            "s_emp": self.s_emp,
            "s_pointwise": self.s_pointwise,
            "fit_window": list(self.fit_window),
            "n_points": len(self.per_m),
            "per_m": [[m, v] for m, v in self.per_m],
        }
        if self.s_bound is not None:
            out["s_bound"] = str(self.s_bound)
            out["dominated"] = self.dominated
        return out


def _log_abs_scalar(c, q_value: complex) -> Optional[float]:
    """ln|c(q)| computed in high precision; coefficients like q^(m^2/2)
    overflow doubles long before the fit window ends."""
    with mpmath.workdps(60):
        q = mpmath.mpmathify(q_value)

        def qsum(s) -> mpmath.mpf:
            total = mpmath.mpf(0)
            for e, r in s.terms:
                term = mpmath.mpf(r.numerator) / r.denominator
                total += term * mpmath.power(q, mpmath.mpf(e.numerator) / e.denominator)
            return total

        if isinstance(c, KScalar):
            num = qsum(c.num)
            den = qsum(c.den)
            if den == 0:
                return None
            val = num / den
        else:
            val = mpmath.mpmathify(c)
        a = abs(val)
        if a == 0:
            return None
        return float(mpmath.log(a))


def reindexed_coefficients(branch: SolutionBranch) -> Tuple[Dict[int, object], float]:
    """Coefficients on the integer grid m = exponent/step, plus the largest m
    known (inf for exact branches, whose tail is identically zero)."""
    grid = exponent_grid(branch)
    step = grid.step
    coeffs: Dict[int, object] = {}
    for e, c in branch.series.terms:
        m = e / step
        if m.denominator != 1:
            raise ValueError(
                "exponent %s is not on the step-%s grid" % (e, step))
        coeffs[int(m)] = c
    if branch.status == EXACT_ZERO or branch.series.trunc == INF:
        known = math.inf
    else:
        known = math.floor(branch.series.trunc / step)
    return coeffs, known


def fit_order(points: List[Tuple[int, float]], abs_log_q: float) -> Tuple[float, float]:
    """(least-squares slope, pointwise estimate at the top of the window).

    Fewer than two nonzero coefficients means the tail vanishes on the
    window; both estimates default to 0 (polynomial/convergent behaviour).
    """
    if len(points) < 2:
        return 0.0, 0.0
    xs = np.array([0.5 * m * m * abs_log_q for m, _ in points])
    ys = np.array([v for _, v in points])
    slope, _intercept = np.polyfit(xs, ys, 1)
    m_top, v_top = points[-1]
    pointwise = 2.0 * v_top / (m_top * m_top * abs_log_q)
    return float(slope), float(pointwise)


def empirical_order(branch: SolutionBranch, q_value: complex,
                    window: Tuple[int, int]) -> GevreyReport:
    """Estimate the q-Gevrey order of a solution branch from its coefficients.

    The window (m_lo, m_hi) is on the re-indexed integer grid and must
    contain at least 20 known coefficient slots (known zeros count: an
    exact branch knows its whole tail).
    """
    q_value = complex(q_value)
    if q_value == 0:
        raise ValueError("q must be nonzero")
    if abs(abs(q_value) - 1.0) < 1e-12:
        raise QModulusOne("|q| = 1 is not supported")
    m_lo, m_hi = int(window[0]), int(window[1])
    if m_lo > m_hi:
        raise ValueError("empty window")

    coeffs, known = reindexed_coefficients(branch)
    top_known = min(m_hi, known)
    slots = int(top_known - m_lo + 1) if top_known >= m_lo else 0
    if slots < MIN_WINDOW_COEFFS:
        raise InsufficientCoefficients(
            "window [%d, %d] holds %d known coefficients; need %d"
            % (m_lo, m_hi, max(slots, 0), MIN_WINDOW_COEFFS))

    abs_log_q = math.log(abs(q_value))
    per_m: List[Tuple[int, float]] = []
    for m in sorted(coeffs):
        if m_lo <= m <= m_hi:
            v = _log_abs_scalar(coeffs[m], q_value)
            if v is not None:
                per_m.append((m, v))
    s_emp, s_pointwise = fit_order(per_m, abs_log_q)
    return GevreyReport(s_emp=s_emp, s_pointwise=s_pointwise,
                        fit_window=(m_lo, m_hi), per_m=per_m)


def theoretical_bound(n: int, pivot: Optional[PivotData] = None) -> Fraction:
    """Upper bound for the q-Gevrey order of any solution, in terms of the
    equation order n.  Monotone in n; zero for algebraic equations; attained
    by the order-n family y = x * y(q^n x) + x."""
    if n < 0:
        raise ValueError("equation order must be nonnegative")
    return Fraction(n)


def gevrey_report(branch: SolutionBranch, equation_order: int,
                  q_value: complex, window: Tuple[int, int],
                  tolerance: float = 0.1) -> GevreyReport:
    """Full report: empirical estimate plus bound comparison."""
    report = empirical_order(branch, q_value, window)
    report.s_bound = theoretical_bound(equation_order, branch.pivot)
    report.dominated = report.s_emp <= float(report.s_bound) + tolerance
    return report
