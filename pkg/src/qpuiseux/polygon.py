"""Newton polygon of a q-difference polynomial.

Every term a * x^alpha * prod_j yj^tj is mapped to the cloud point
(alpha, |tau|); the q-shift preserves x-valuation, so no shift correction
enters the point map.  The polygon is the lower-left convex hull of the
cloud: the set of minimizers of alpha + mu*|tau| over co-slopes mu > 0.

Everything here is exact rational arithmetic; no floating point touches the
hull, which keeps downstream branching deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from qpuiseux.poly import QDiffPolynomial, TermKey, mi_height, mi_weight
from qpuiseux.field import as_fraction


class EmptyPolynomial(ValueError):
    """Raised when a polygon is requested for a (effectively) zero polynomial."""


@dataclass(frozen=True)
class CloudPoint:
    alpha: Fraction
    height: int
    sources: Tuple[TermKey, ...] = ()

    def pair(self) -> Tuple[Fraction, int]:
        return (self.alpha, self.height)


@dataclass(frozen=True)
class Edge:
    """Hull edge from the higher-height vertex to the lower one."""

    high: Tuple[Fraction, int]
    low: Tuple[Fraction, int]

    @property
    def coslope(self) -> Fraction:
        # (alpha_low - alpha_high) / (h_high - h_low), positive along the hull
        return (self.low[0] - self.high[0]) / (self.high[1] - self.low[1])

    @property
    def reaches_height_zero(self) -> bool:
        """Edges ending above height 0 cannot terminate a branch: a nonzero
        characteristic root needs the supporting line to reach the constant
        terms eventually."""
        return self.low[1] == 0

    def level(self) -> Fraction:
        """Value alpha + h*mu shared by all points on the supporting line."""
        return self.high[0] + self.high[1] * self.coslope


def lower_hull(points: Sequence[Tuple[Fraction, int]]) -> List[Tuple[Fraction, int]]:
    """Vertices of the lower-left hull, ordered by decreasing height.

    Input points are (alpha, height) pairs; duplicates allowed.  Only the
    part of the hull supporting directions with mu > 0 is kept, i.e. edge
    co-slopes along the result are positive and strictly increasing.
    """
    if not points:
        return []
    best: Dict[int, Fraction] = {}
    for alpha, h in points:
        if h not in best or alpha < best[h]:
            best[h] = alpha
    pts = sorted(((h, a) for h, a in best.items()), reverse=True)

    chain: List[Tuple[int, Fraction]] = []
    for h, a in pts:
        while len(chain) >= 2:
            h1, a1 = chain[-2]
            h2, a2 = chain[-1]
            # keep (h2, a2) iff coslope(1->2) < coslope(2->new), exactly
            if (a2 - a1) * (h2 - h) >= (a - a2) * (h1 - h2):
                chain.pop()
            else:
                break
        chain.append((h, a))

    # prune the high-height end while its first co-slope is <= 0: those
    # vertices never minimize alpha + mu*h for any mu > 0
    while len(chain) >= 2 and (chain[1][1] - chain[0][1]) <= 0:
        chain.pop(0)
    return [(a, h) for h, a in chain]


class NewtonPolygon:
    """Cloud, hull vertices and edges of a q-difference polynomial.

    A cloud point is kept only if it genuinely contributes to some
    characteristic polynomial: terms sharing (alpha, |tau|) are grouped by
    weight w(tau), and the point survives iff some weight-group coefficient
    sum is nonzero.  (Terms of equal weight can cancel each other exactly;
    such a point would put a spurious vertex on the hull.)
    """

    def __init__(self, points: List[CloudPoint]):
        self.points = sorted(points, key=lambda p: (p.alpha, p.height))
        self.vertices: List[Tuple[Fraction, int]] = lower_hull(
            [p.pair() for p in self.points])
        self.edges: List[Edge] = [
            Edge(high=self.vertices[i], low=self.vertices[i + 1])
            for i in range(len(self.vertices) - 1)
        ]

    def support_value(self, mu: Fraction) -> Fraction:
        """min(alpha + h*mu) over the cloud, evaluated on the hull vertices."""
        mu = as_fraction(mu)
        if not self.vertices:
            raise EmptyPolynomial("no cloud points")
        return min(a + h * mu for a, h in self.vertices)

    def coslopes(self) -> List[Fraction]:
        return [e.coslope for e in self.edges]

    def on_hull(self, point: Tuple[Fraction, int]) -> bool:
        alpha, h = point
        if point in self.vertices:
            return True
        for e in self.edges:
            if e.low[1] <= h <= e.high[1] and alpha + h * e.coslope == e.level():
                return True
        return False

    def __repr__(self):
        return "NewtonPolygon(vertices=%s, coslopes=%s)" % (
            self.vertices, self.coslopes())


def build_polygon(P: QDiffPolynomial) -> NewtonPolygon:
    if P.is_zero():
        raise EmptyPolynomial("cannot build the polygon of the zero polynomial")
    field = P.field
    grouped: Dict[Tuple[Fraction, int], List[TermKey]] = {}
    for key in P.terms:
        xexp, tau = key
        grouped.setdefault((xexp, mi_height(tau)), []).append(key)

    points = []
    for (alpha, h), keys in grouped.items():
        by_weight: Dict[int, object] = {}
        for key in keys:
            w = mi_weight(key[1])
            c = P.terms[key]
            by_weight[w] = by_weight[w] + c if w in by_weight else c
        if any(not field.is_zero(c) for c in by_weight.values()):
            points.append(CloudPoint(alpha, h, tuple(sorted(keys))))
    if not points:
        raise EmptyPolynomial(
            "every cloud point cancels; the polynomial vanishes on all c*x^mu")
    return NewtonPolygon(points)


def support_value(P: QDiffPolynomial, mu: Fraction) -> Fraction:
    """min(alpha + |tau|*mu) over the genuine cloud of P."""
    return build_polygon(P).support_value(mu)


def points_on_line(P: QDiffPolynomial, mu: Fraction) -> List[TermKey]:
    """Term keys sitting on the supporting line alpha + |tau|*mu = omega(mu)."""
    mu = as_fraction(mu)
    omega = support_value(P, mu)
    return sorted(key for key in P.terms
                  if key[0] + mi_height(key[1]) * mu == omega)


def admissible_coslopes(NP: NewtonPolygon, mu_min: Fraction) -> List[Fraction]:
    """Edge co-slopes exceeding mu_min, ascending.

    Includes edges that stop above height 0 (see Edge.reaches_height_zero);
    they still produce legitimate intermediate steps of the process.
    """
    mu_min = as_fraction(mu_min)
    return [e.coslope for e in NP.edges if e.coslope > mu_min]
