"""Driver for the Newton polygon process on q-difference equations.

Starting from P(x, y0, ..., yn) = 0, the process picks an admissible
co-slope mu of the Newton polygon (mu strictly larger than the previous
exponent), a nonzero root c of the characteristic polynomial Phi_mu, and
recurses on P(x, c*x^mu + y).  Each choice contributes a term c*x^mu to a
solution branch; branching is depth-first over (mu ascending, roots in
canonical order) so output is deterministic.

The process stabilizes at a *pivot*: a height-1 vertex (alpha_p, 1) of the
polygon that is the upper endpoint of every remaining admissible edge.
From there on each coefficient solves a first-degree equation

    D(mu) * c = -(coefficient of x^(alpha_p + mu) in the y-free part)

where D(mu) = sum a_j * q^(j*mu) collects the height-1 terms at alpha_p.
Vanishing of D at a candidate exponent is a resonance: it either obstructs
the branch (nonzero numerator) or frees the coefficient (the solver forks
on the value 0 and flags the branch).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from qpuiseux.field import EXACT, ExactField, KScalar, NumericField, as_fraction
from qpuiseux.poly import (
    INF,
    Exponent,
    PuiseuxSeries,
    QDiffPolynomial,
    format_exponent,
    mi_height,
    mi_weight,
    shift_substitute,
    substitute_series,
    truncate_x,
)
from qpuiseux.polygon import EmptyPolynomial, admissible_coslopes, build_polygon
from qpuiseux.charpoly import (
    CharPolynomial,
    ExactRootsUnavailable,
    _exact_roots,
    build_char_poly,
    nonzero_roots,
)

# branch statuses
EXACT_ZERO = "exact-zero"
TRUNCATED = "truncated"
FREE_PARAMETER = "free-parameter"
RESONANCE_OBSTRUCTED = "resonance-obstructed"
ROOT_UNREPRESENTABLE = "root-unrepresentable"


class SolverError(RuntimeError):
    """An emitted branch failed its own residual check (raise working_trunc)."""


@dataclass
class SolverConfig:
    trunc_T: Fraction
    max_branches: int = 64
    max_steps_before_pivot: int = 64
    mode: str = "exact"  # "exact" | "numeric"
    q_value: Optional[complex] = None
    working_trunc: Optional[Fraction] = None  # default: trunc_T + x-span of P
    use_linear_tail: bool = True  # False: keep running full polygon steps

    def __post_init__(self):
        self.trunc_T = as_fraction(self.trunc_T)
        if self.trunc_T <= 0:
            raise ValueError("trunc_T must be positive")
        if self.max_branches < 1:
            raise ValueError("max_branches must be at least 1")
        if self.mode not in ("exact", "numeric"):
            raise ValueError("mode must be 'exact' or 'numeric'")
        if self.mode == "numeric" and self.q_value is None:
            raise ValueError("numeric mode requires q_value")
        if self.working_trunc is not None:
            self.working_trunc = as_fraction(self.working_trunc)
            if self.working_trunc < self.trunc_T:
                raise ValueError("working_trunc must be >= trunc_T")


class LinearDivisor:
    """D(mu) = sum a_j * q^(j*mu) assembled from the pivot's height-1 terms.

    Stored by shift weight j, like a characteristic polynomial read in the
    unknown exponent mu.
    """

    def __init__(self, coeffs: Dict[int, object], field=EXACT):
        self.coeffs = {j: c for j, c in coeffs.items() if not field.is_zero(c)}
        self.field = field

    def value_at(self, mu: Fraction):
        mu = as_fraction(mu)
        total = self.field.zero()
        for j, c in self.coeffs.items():
            total = total + c * self.field.qpow(j * mu)
        return total

    def resonant_exponents(self, lo: Fraction, hi: Fraction) -> Optional[List[Fraction]]:
        """Rational mu in (lo, hi] with D(mu) = 0, found exactly.

        Writing u = q^mu turns D into a polynomial in u over the field;
        resonances correspond to roots that are pure powers q^e.  Returns
        None when the root structure is not recognized (the caller then
        only sees resonances at realized exponents).
        """
        if not isinstance(self.field, ExactField):
            return []
        phi = CharPolynomial(dict(self.coeffs), Fraction(0), self.field).stripped()
        if phi.degree == 0:
            return []
        roots = _exact_roots(phi)
        if roots is None:
            return None
        out = []
        for r in roots:
            if not r.is_monomial():
                continue
            coeff, exp = r.as_monomial()
            if coeff == 1 and lo < exp <= hi:
                out.append(exp)
        return sorted(out)

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j in sorted(self.coeffs):
            c = self.field.render(self.coeffs[j])
            base = "1" if j == 0 else ("q^u" if j == 1 else "q^(%d*u)" % j)
            parts.append("(%s)*%s" % (c, base))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {str(j): self.field.render(c) for j, c in sorted(self.coeffs.items())}


@dataclass
class PivotData:
    alpha: Fraction
    divisor: LinearDivisor
    ramification: int

    def to_json(self) -> dict:
        return {
            "alpha": format_exponent(self.alpha),
            "divisor": self.divisor.to_json(),
            "ramification": self.ramification,
        }


@dataclass
class ChoiceEntry:
    mu: Fraction
    root: Optional[object]  # scalar; None for an unrepresentable root
    multiplicity: int

    def to_json(self, field) -> dict:
        return {
            "mu": format_exponent(self.mu),
            "root": None if self.root is None else field.render(self.root),
            "multiplicity": self.multiplicity,
        }


@dataclass
class BranchState:
    P_current: QDiffPolynomial
    partial: PuiseuxSeries
    mu_last: Fraction
    choice_log: List[ChoiceEntry]
    pivot: Optional[PivotData] = None
    free_count: int = 0
    steps: int = 0
    lossless: bool = True  # no truncation dropped a term along this branch

    def head_exponents(self) -> List[Fraction]:
        return [entry.mu for entry in self.choice_log if entry.root is not None]


@dataclass
class GridReport:
    head: List[Fraction]
    start: Fraction
    step: Fraction
    verified: bool

    def to_json(self) -> dict:
        return {
            "head": [format_exponent(e) for e in self.head],
            "start": format_exponent(self.start),
            "step": format_exponent(self.step),
            "verified": self.verified,
        }


@dataclass
class SolutionBranch:
    series: PuiseuxSeries
    status: str
    free_parameters: int
    choice_log: List[ChoiceEntry]
    pivot: Optional[PivotData]
    residual_valuation: Optional[Exponent] = None  # None: nothing within window
    residual_window: Exponent = INF

    def status_text(self) -> str:
        if self.status == FREE_PARAMETER:
            return "%s(%d)" % (FREE_PARAMETER, self.free_parameters)
        return self.status

    def head_exponents(self) -> List[Fraction]:
        return [entry.mu for entry in self.choice_log if entry.root is not None]


@dataclass
class SolveResult:
    branches: List[SolutionBranch]
    budget_exhausted: bool = False
    diagnostics: List[str] = dc_field(default_factory=list)

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)

    def __getitem__(self, i):
        return self.branches[i]


class _BudgetStop(Exception):
    pass


def _truncate_tracked(P: QDiffPolynomial, T) -> Tuple[QDiffPolynomial, bool]:
    """truncate_x plus a flag telling whether anything was dropped.

    Exactness claims are only allowed on branches where no truncation ever
    removed a term; otherwise the status is downgraded to truncated."""
    out = truncate_x(P, T)
    return out, len(out.terms) != len(P.terms)


def _lcm_denominators(exponents) -> int:
    d = 1
    for e in exponents:
        d = d * e.denominator // math.gcd(d, e.denominator)
    return d


def detect_pivot(state: BranchState) -> Optional[PivotData]:
    """Pivot criterion: a height-1 cloud vertex (alpha_p, 1) such that every
    height >= 2 cloud point stays strictly above its supporting line for all
    admissible mu > mu_last, i.e. (alpha - alpha_p) + (h - 1)*mu_last >= 0.
    """
    P = state.P_current
    if P.is_zero():
        return None
    try:
        polygon = build_polygon(P)
    except EmptyPolynomial:
        return None
    height1 = [p for p in polygon.points if p.height == 1]
    if not height1:
        return None
    alpha_p = min(p.alpha for p in height1)
    for p in polygon.points:
        if p.height >= 2 and (p.alpha - alpha_p) + (p.height - 1) * state.mu_last < 0:
            return None
    coeffs: Dict[int, object] = {}
    for (xexp, tau), c in P.terms.items():
        if xexp == alpha_p and mi_height(tau) == 1:
            j = mi_weight(tau)
            coeffs[j] = coeffs[j] + c if j in coeffs else c
    divisor = LinearDivisor(coeffs, P.field)
    if not divisor.coeffs:
        return None
    d = _lcm_denominators(state.head_exponents())
    return PivotData(alpha=alpha_p, divisor=divisor, ramification=d)


@dataclass
class TailResult:
    series: PuiseuxSeries
    status: str
    free_added: int
    mu_last: Fraction
    P_final: QDiffPolynomial
    lossless: bool = True


def extend_linear_tail(state: BranchState, upto: Fraction) -> TailResult:
    """Extend a pivoted branch by the induced linear recurrence up to the
    target exponent.  Statuses carry the outcome; no exceptions are raised
    for resonances or free coefficients.
    """
    if state.pivot is None:
        raise ValueError("extend_linear_tail requires a pivot")
    upto = as_fraction(upto)
    pivot = state.pivot
    field = state.P_current.field
    x_cap = pivot.alpha + upto  # terms beyond never influence exponents <= upto

    P, dropped = _truncate_tracked(state.P_current, x_cap)
    lossless = state.lossless and not dropped
    series = state.partial
    mu_last = state.mu_last
    free_added = 0
    status = TRUNCATED

    resonances = pivot.divisor.resonant_exponents(mu_last, upto)
    pending_res = list(resonances or ())

    while True:
        events = [xexp - pivot.alpha for xexp in P.constant_part()
                  if mu_last < xexp - pivot.alpha <= upto]
        events.extend(mu for mu in pending_res if mu > mu_last)
        if not events:
            # a truly empty residual certifies an exact solution, but only
            # when no truncation has hidden terms along the way
            status = EXACT_ZERO if (not P.constant_part() and lossless) else TRUNCATED
            break
        mu_star = min(events)
        b = P.constant_part().get(pivot.alpha + mu_star, field.zero())
        D = pivot.divisor.value_at(mu_star)
        if not field.is_zero(D):
            # ordinary step: cancel the leading residual term
            c_star = -b / D if isinstance(b, KScalar) else (-b) / D
            P, dropped = _truncate_tracked(shift_substitute(P, c_star, mu_star), x_cap)
            lossless = lossless and not dropped
            series = series + PuiseuxSeries.monomial(c_star, mu_star,
                                                     series.trunc, field)
        elif field.is_zero(b):
            # free coefficient: fork on the value 0 and flag the branch
            free_added += 1
        else:
            status = RESONANCE_OBSTRUCTED
            mu_last = mu_star
            break
        mu_last = mu_star

    return TailResult(series=series, status=status, free_added=free_added,
                      mu_last=mu_last, P_final=P, lossless=lossless)


def exponent_grid(branch: SolutionBranch) -> GridReport:
    """Exponent-set structure: head exponents chosen by polygon steps, then a
    tail on the lattice start + (1/d) * Z>=0 with d the lcm of the head
    denominators.  ``verified`` records whether the emitted exponents do lie
    on that lattice."""
    if branch.pivot is None and branch.status not in (EXACT_ZERO, FREE_PARAMETER):
        raise ValueError("exponent grid needs a pivot or an exact branch")
    head = branch.head_exponents()
    d = branch.pivot.ramification if branch.pivot else _lcm_denominators(head)
    step = Fraction(1, d)
    head_set = set(head)
    post = [e for e, _ in branch.series.terms if e not in head_set]
    if post:
        start = post[0]
    elif head:
        start = head[-1] + step
    else:
        start = step
    verified = all((e - start) % step == 0 and e >= start for e in post)
    if head:
        anchor = head[-1]
        verified = verified and (start - anchor) % step == 0 and start > anchor
    return GridReport(head=head, start=start, step=step, verified=verified)


def _residual_check(P0: QDiffPolynomial, branch: SolutionBranch,
                    cfg: SolverConfig) -> None:
    """Every emitted exact/truncated branch must have residual valuation
    beyond trunc_T; exact branches must have an identically zero residual
    within the validity window."""
    if branch.status not in (EXACT_ZERO, TRUNCATED, FREE_PARAMETER):
        return
    residual = substitute_series(P0, branch.series)
    val = residual.valuation()
    branch.residual_valuation = val
    branch.residual_window = residual.trunc
    if val is not None and val <= cfg.trunc_T:
        raise SolverError(
            "branch %s fails its residual check (valuation %s <= %s); "
            "increase working_trunc" % (branch.series, val, cfg.trunc_T))


def solve(P: QDiffPolynomial, cfg: SolverConfig) -> SolveResult:
    """Enumerate truncated Puiseux-series solutions of P = 0.

    Depth-first over admissible co-slopes and characteristic roots; linear
    tails are delegated to :func:`extend_linear_tail` once a pivot is
    detected (unless cfg.use_linear_tail is off, for cross-checking).
    """
    if P.is_zero():
        raise ValueError("the zero polynomial has every series as a solution")
    if not P.has_y():
        raise ValueError("the equation must involve y")

    if cfg.mode == "numeric":
        field = NumericField(cfg.q_value)
        P0 = P.specialize(field) if isinstance(P.field, ExactField) else P
    else:
        if not isinstance(P.field, ExactField):
            raise ValueError("exact mode requires exact coefficients")
        field = P.field
        P0 = P

    working = cfg.working_trunc
    if working is None:
        working = cfg.trunc_T + P0.x_span()

    result = SolveResult(branches=[])

    def emit(branch: SolutionBranch):
        if len(result.branches) >= cfg.max_branches:
            result.budget_exhausted = True
            raise _BudgetStop()
        _residual_check(P0, branch, cfg)
        result.branches.append(branch)

    def finish_state(state: BranchState, status: str) -> SolutionBranch:
        free = state.free_count
        kind = status
        if kind == EXACT_ZERO and not state.lossless:
            kind = TRUNCATED
        if free > 0 and kind in (EXACT_ZERO, TRUNCATED, FREE_PARAMETER):
            kind = FREE_PARAMETER
        series = state.partial
        if kind == EXACT_ZERO:
            series = series.with_trunc(INF)
        return SolutionBranch(series=series, status=kind, free_parameters=free,
                              choice_log=list(state.choice_log), pivot=state.pivot)

    def recurse(state: BranchState):
        if state.steps > 0 and state.pivot is None:
            state.pivot = detect_pivot(state)

        if state.pivot is not None and cfg.use_linear_tail:
            tail = extend_linear_tail(state, cfg.trunc_T)
            done = BranchState(P_current=tail.P_final, partial=tail.series,
                               mu_last=tail.mu_last, choice_log=state.choice_log,
                               pivot=state.pivot,
                               free_count=state.free_count + tail.free_added,
                               steps=state.steps, lossless=tail.lossless)
            emit(finish_state(done, tail.status))
            return

        const = state.P_current.constant_part()
        if not const:
            # the current partial sum is itself an exact solution (when no
            # truncation losses occurred); other solutions may still extend
            # it with further terms
            emit(finish_state(state, EXACT_ZERO))

        if state.pivot is None and state.steps >= cfg.max_steps_before_pivot:
            result.diagnostics.append(
                "branch %s aborted: %d polygon steps without reaching a pivot"
                % (_log_text(state.choice_log, field), state.steps))
            return

        try:
            polygon = build_polygon(state.P_current)
        except EmptyPolynomial:
            if const:
                result.diagnostics.append(
                    "branch %s discarded: degenerate polygon"
                    % _log_text(state.choice_log, field))
            return

        candidates = admissible_coslopes(polygon, state.mu_last)
        if state.steps == 0 and not candidates and const:
            # a leading term needs a positive co-slope joining a y-point to
            # the constant part; report when only mu <= 0 would work
            alpha_const = min(const)
            best = max(((alpha_const - p.alpha) / p.height
                        for p in polygon.points if p.height >= 1), default=None)
            if best is not None and best <= 0:
                result.diagnostics.append(
                    "unsupported: leading exponent would be nonpositive "
                    "(best co-slope %s)" % format_exponent(best))
        usable = [mu for mu in candidates if mu <= cfg.trunc_T]
        beyond = [mu for mu in candidates if mu > cfg.trunc_T]

        if const and beyond:
            # all remaining corrections live past the truncation target
            emit(finish_state(state, TRUNCATED))

        for mu in usable:
            phi = build_char_poly(state.P_current, mu)
            try:
                roots = nonzero_roots(phi, mode=cfg.mode, q_value=cfg.q_value)
            except ExactRootsUnavailable:
                stub = BranchState(
                    P_current=state.P_current, partial=state.partial,
                    mu_last=mu,
                    choice_log=state.choice_log + [ChoiceEntry(mu, None, 0)],
                    pivot=state.pivot, free_count=state.free_count,
                    steps=state.steps + 1)
                emit(finish_state(stub, ROOT_UNREPRESENTABLE))
                continue
            for root in roots:
                child_P, dropped = _truncate_tracked(
                    shift_substitute(state.P_current, root.value, mu), working)
                child = BranchState(
                    P_current=child_P,
                    partial=state.partial + PuiseuxSeries.monomial(
                        root.value, mu, state.partial.trunc, field),
                    mu_last=mu,
                    choice_log=state.choice_log + [
                        ChoiceEntry(mu, root.value, root.multiplicity)],
                    pivot=state.pivot,
                    free_count=state.free_count,
                    steps=state.steps + 1,
                    lossless=state.lossless and not dropped)
                recurse(child)

    root_P, root_dropped = _truncate_tracked(P0, working)
    root_state = BranchState(
        P_current=root_P,
        partial=PuiseuxSeries.zero(cfg.trunc_T, field),
        mu_last=Fraction(0),
        choice_log=[],
        lossless=not root_dropped,
    )
    try:
        recurse(root_state)
    except _BudgetStop:
        pass
    return result


def _log_text(choice_log: List[ChoiceEntry], field) -> str:
    if not choice_log:
        return "<root>"
    return " -> ".join(
        "x^(%s)%s" % (format_exponent(e.mu),
                      "" if e.root is None else " (c=%s)" % field.render(e.root))
        for e in choice_log)


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------


def branch_to_json(branch: SolutionBranch, field) -> dict:
    if branch.residual_valuation is not None:
        residual = format_exponent(branch.residual_valuation)
    elif branch.residual_window == INF:
        residual = "inf"
    else:
        residual = ">%s" % format_exponent(branch.residual_window)
    grid = None
    if branch.pivot is not None or branch.status in (EXACT_ZERO, FREE_PARAMETER):
        grid = exponent_grid(branch).to_json()
    return {
        "series": [[format_exponent(e), field.render(c)]
                   for e, c in branch.series.terms],
        "status": branch.status_text(),
        "choice_log": [entry.to_json(field) for entry in branch.choice_log],
        "pivot": branch.pivot.to_json() if branch.pivot else None,
        "exponent_grid": grid,
        "residual_valuation": residual,
    }


def result_to_json(P: QDiffPolynomial, result: SolveResult,
                   cfg: SolverConfig) -> dict:
    field = result.branches[0].series.field if result.branches else P.field
    if cfg.mode == "numeric":
        q_mode = "numeric(q=%r)" % cfg.q_value
    else:
        q_mode = "exact"
    return {
        "equation": P.render(),
        "q_mode": q_mode,
        "trunc": format_exponent(cfg.trunc_T),
        "branches": [branch_to_json(b, field) for b in result.branches],
        "budget_exhausted": result.budget_exhausted,
        "diagnostics": list(result.diagnostics),
    }
