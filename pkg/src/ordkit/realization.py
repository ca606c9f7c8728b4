"""Dynamical realization of an ordering: an order-preserving embedding
t: Γ → Q with t(id) = 0 built by the max/min/midpoint induction, and the
induced piecewise-linear action g(t(h)) = t(gh) on the realized prefix.

The action is grid-limited: values are exact rationals, products that fall
outside the realized prefix raise DomainError (except for the boundary
translation convention), and crossing/almost-free diagnostics are stated
at grid resolution — interval-interior conditions are exact order-sign
facts, fixed-point equalities go through the PL extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ArchimedeanViolationError,
    DomainError,
    IdentityElementError,
    OrdkitError,
)
from .groups import ElementIndex, GroupElement
from .orders import OrderingOracle


@dataclass
class Realization:
    """Finite table g ↦ t(g) plus the enumeration that produced it."""

    source: OrderingOracle
    elements: list[GroupElement]          # enumeration order, elements[0] = id
    tvalues: list[Fraction]               # parallel to elements
    grid: list[tuple[Fraction, int]]      # (t, element index) sorted by t
    index: ElementIndex                   # membership in the realized prefix

    def __len__(self):
        return len(self.elements)

    def t(self, i: int) -> Fraction:
        return self.tvalues[i]

    def find(self, g: GroupElement) -> int | None:
        return self.index.find(g)

    def image_t(self, g: GroupElement, i: int) -> Fraction:
        """t(g · elements[i]); DomainError when the product left the prefix."""
        prod = self.source.group.op(g, self.elements[i])
        j = self.index.find(prod)
        if j is None:
            raise DomainError(
                f"product g·h outside the realized prefix (h = index {i})"
            )
        return self.tvalues[j]

    def displacement_sign(self, g: GroupElement, i: int) -> int:
        """Exact sign of g(t(h)) − t(h) for h = elements[i]: the sign of
        h⁻¹gh under the source ordering.  Always computable."""
        group = self.source.group
        h = self.elements[i]
        return self.source.signum(group.op(group.op(group.invert(h), g), h))


def build_realization(
    o: OrderingOracle,
    count: int,
    enumeration: Sequence[GroupElement] | None = None,
) -> Realization:
    """Run the induction: new maximum ⇒ max+1, new minimum ⇒ min−1,
    otherwise the midpoint of the immediate neighbors already placed.

    The default enumeration is the shortlex generator ball, truncated to
    ``count`` elements.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    group = o.group
    if enumeration is None:
        radius = 1
        elems = group.ball(radius)
        while len(elems) < count:
            radius += 1
            bigger = group.ball(radius)
            if len(bigger) == len(elems):
                raise OrdkitError(
                    f"group exhausted at {len(elems)} elements, need {count}"
                )
            elems = bigger
        enumeration = elems[:count]
    else:
        enumeration = list(enumeration)[:count]
        if len(enumeration) < count:
            raise ValueError("enumeration yielded fewer elements than requested")
    if not group.is_identity(enumeration[0]):
        raise ValueError("enumeration must start with the identity")

    index = ElementIndex(group)
    elements: list[GroupElement] = []
    tvalues: list[Fraction] = []
    order: list[int] = []  # element indices sorted by the ordering

    for g in enumeration:
        if index.find(g) is not None:
            raise OrdkitError("enumeration produced a repeated element")
        gi = index.add(g)
        elements.append(g)
        if not order:
            tvalues.append(Fraction(0))
            order.append(gi)
            continue
        # binary search for the insertion point among placed elements
        lo, hi = 0, len(order)
        while lo < hi:
            mid = (lo + hi) // 2
            cmp = o.compare(elements[order[mid]], g)
            if cmp == "=":
                raise OrdkitError("enumeration produced a repeated element")
            if cmp == "<":
                lo = mid + 1
            else:
                hi = mid
        if lo == len(order):
            tvalues.append(tvalues[order[-1]] + 1)
        elif lo == 0:
            tvalues.append(tvalues[order[0]] - 1)
        else:
            tvalues.append((tvalues[order[lo - 1]] + tvalues[order[lo]]) / 2)
        order.insert(lo, gi)

    grid = sorted((tvalues[i], i) for i in range(len(elements)))
    return Realization(o, elements, tvalues, grid, index)


def evaluate_action(r: Realization, g: GroupElement, x: Fraction) -> Fraction:
    """Exact PL action: grid points map equivariantly, between grid points
    affinely, beyond the extremes by the boundary translation."""
    x = Fraction(x)
    grid = r.grid
    lo, hi = 0, len(grid)
    while lo < hi:
        mid = (lo + hi) // 2
        if grid[mid][0] < x:
            lo = mid + 1
        else:
            hi = mid
    # lo = first grid position with t >= x
    if lo < len(grid) and grid[lo][0] == x:
        return r.image_t(g, grid[lo][1])
    if lo == 0:
        t0, i0 = grid[0]
        return x + (r.image_t(g, i0) - t0)
    if lo == len(grid):
        t1, i1 = grid[-1]
        return x + (r.image_t(g, i1) - t1)
    (ta, ia), (tb, ib) = grid[lo - 1], grid[lo]
    ya, yb = r.image_t(g, ia), r.image_t(g, ib)
    return ya + (x - ta) * (yb - ya) / (tb - ta)


def recover_order(r: Realization) -> OrderingOracle:
    """Partial oracle on the realized prefix: positive iff g moves 0 right,
    i.e. t(g) > 0."""

    def sign_fn(g: GroupElement) -> int:
        j = r.index.find(g)
        if j is None:
            raise DomainError("element outside the realized prefix")
        t = r.tvalues[j]
        return (t > 0) - (t < 0)

    return OrderingOracle(
        r.source.group,
        f"recovered({r.source.label})",
        frozenset(),
        sign_fn,
    )


# ---------------------------------------------------------------------------
# crossing detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossingWitness:
    """Re-checkable desk-scale witness.

    The displacement sign of an element at a grid point is exact; a +→−
    sign change across consecutive grid points certifies a genuine fixed
    point of the (increasing) realized map inside the open gap.  a and b
    are exact rationals inside such gaps.

    kind='transversal': f has a certified fixed point at a (signs +,− on
    the gap around a), g one at b, a < b, and on every grid point strictly
    between, f moves down while g moves up.
    kind='crossed': both gaps belong to f (descending at a, ascending at
    b), f moves every grid point between down, and g maps a or b into
    ]a,b[ under the PL extension.
    """

    f: GroupElement
    g: GroupElement
    a: Fraction
    b: Fraction
    kind: str


@dataclass
class CrossingReport:
    witness: CrossingWitness | None
    pairs_examined: int
    budget_exhausted: bool


def _sign_change_gaps(r: Realization, g_idx: int):
    """Grid gaps where the displacement sign of the element changes.

    Returns (descending, ascending, signs): lists of gap indices k with
    sign +→− (resp. −→+) between grid positions k and k+1, plus the full
    sign vector along the grid.
    """
    g = r.elements[g_idx]
    grid = r.grid
    signs = [r.displacement_sign(g, i) for (_, i) in grid]
    desc = [k for k in range(len(grid) - 1) if signs[k] > 0 > signs[k + 1]]
    asc = [k for k in range(len(grid) - 1) if signs[k] < 0 < signs[k + 1]]
    return desc, asc, signs


def _gap_midpoint(r: Realization, k: int) -> Fraction:
    return (r.grid[k][0] + r.grid[k + 1][0]) / 2


def detect_crossing(r: Realization, budget: int = 200_000) -> CrossingReport:
    """Scan prefix pairs for the transversal-position pattern (or the
    crossed-interval pattern) at grid resolution.  Sound for the grid-level
    pattern; absence within budget proves nothing."""
    n = len(r.elements)
    examined = 0

    data: dict[int, tuple] = {}

    def element_data(i: int):
        if i not in data:
            data[i] = _sign_change_gaps(r, i)
        return data[i]

    crossers = []
    for i in range(1, n):
        desc, asc, signs = element_data(i)
        if desc or asc:
            crossers.append(i)

    # transversal pattern first
    for fi in crossers:
        f_desc, _, f_signs = element_data(fi)
        if not f_desc:
            continue
        for gi in crossers:
            if gi == fi:
                continue
            g_desc, _, g_signs = element_data(gi)
            for ka in f_desc:
                for kb in g_desc:
                    examined += 1
                    if examined > budget:
                        return CrossingReport(None, examined, True)
                    if not ka < kb:
                        continue
                    # grid points strictly between the gaps: k in [ka+1, kb]
                    if all(
                        f_signs[k] < 0 < g_signs[k]
                        for k in range(ka + 1, kb + 1)
                    ):
                        return CrossingReport(
                            CrossingWitness(
                                r.elements[fi],
                                r.elements[gi],
                                _gap_midpoint(r, ka),
                                _gap_midpoint(r, kb),
                                "transversal",
                            ),
                            examined,
                            False,
                        )
    # crossed pattern
    for fi in crossers:
        f_desc, f_asc, f_signs = element_data(fi)
        for ka in f_desc:
            for kb in f_asc:
                if not ka < kb:
                    continue
                if any(f_signs[k] >= 0 for k in range(ka + 1, kb + 1)):
                    continue
                a, b = _gap_midpoint(r, ka), _gap_midpoint(r, kb)
                for gi in range(1, n):
                    if gi == fi:
                        continue
                    examined += 1
                    if examined > budget:
                        return CrossingReport(None, examined, True)
                    g = r.elements[gi]
                    try:
                        ga = evaluate_action(r, g, a)
                        gb = evaluate_action(r, g, b)
                    except DomainError:
                        continue
                    if a < ga < b or a < gb < b:
                        return CrossingReport(
                            CrossingWitness(r.elements[fi], g, a, b, "crossed"),
                            examined,
                            False,
                        )
    return CrossingReport(None, examined, False)


def _locate_gap(r: Realization, x: Fraction) -> int | None:
    """Index k with grid[k].t < x < grid[k+1].t, or None."""
    grid = r.grid
    for k in range(len(grid) - 1):
        if grid[k][0] < x < grid[k + 1][0]:
            return k
    return None


def verify_crossing_witness(r: Realization, w: CrossingWitness) -> bool:
    """Independent re-check: replay the grid sign evaluations (and, for the
    crossed kind, the PL image evaluations) behind a witness."""
    ka = _locate_gap(r, w.a)
    kb = _locate_gap(r, w.b)
    if ka is None or kb is None or not ka < kb:
        return False
    fi = r.find(w.f)
    gi = r.find(w.g)
    if fi is None or gi is None:
        return False
    f_signs = [r.displacement_sign(w.f, i) for (_, i) in r.grid]
    if not (f_signs[ka] > 0 > f_signs[ka + 1]):
        return False
    if w.kind == "transversal":
        g_signs = [r.displacement_sign(w.g, i) for (_, i) in r.grid]
        if not (g_signs[kb] > 0 > g_signs[kb + 1]):
            return False
        return all(
            f_signs[k] < 0 < g_signs[k] for k in range(ka + 1, kb + 1)
        )
    if w.kind == "crossed":
        if not (f_signs[kb] < 0 < f_signs[kb + 1]):
            return False
        if any(f_signs[k] >= 0 for k in range(ka + 1, kb + 1)):
            return False
        try:
            ga = evaluate_action(r, w.g, w.a)
            gb = evaluate_action(r, w.g, w.b)
        except DomainError:
            return False
        return w.a < ga < w.b or w.a < gb < w.b
    return False


# ---------------------------------------------------------------------------
# almost-free check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlmostFreeWitness:
    g: GroupElement
    x: Fraction  # grid point moved right
    y: Fraction  # grid point moved left


def check_almost_free(
    r: Realization, samples: Iterable[GroupElement] | None = None
) -> AlmostFreeWitness | None:
    """None when every sampled element moves all grid points one way;
    otherwise a witness element with grid points pushed both ways."""
    elems = list(samples) if samples is not None else r.elements[1:]
    for g in elems:
        up = down = None
        for (t, i) in r.grid:
            s = r.displacement_sign(g, i)
            if s > 0 and up is None:
                up = t
            elif s < 0 and down is None:
                down = t
            if up is not None and down is not None:
                return AlmostFreeWitness(g, up, down)
    return None


# ---------------------------------------------------------------------------
# the Archimedean bracket q(p)/p
# ---------------------------------------------------------------------------

@dataclass
class HolderResult:
    ratios: list[Fraction]        # q(p)/p for p = 1..pmax
    qs: list[int]
    bracket_width: Fraction       # 1/pmax


def holder_embedding(
    o: OrderingOracle,
    f: GroupElement,
    g: GroupElement,
    pmax: int,
    exponent_bound: int = 10**7,
) -> HolderResult:
    """For p = 1..pmax find the unique q with f^q ≼ g^p ≺ f^{q+1} by exact
    bracketing, returning the sequence q(p)/p.

    Requires sign(f) = +.  If the bracketing search escapes the exponent
    bound the ordering is behaving non-Archimedean on (f, g) and an error
    is raised.
    """
    group = o.group
    if o.signum(f) != 1:
        raise IdentityElementError("holder_embedding requires a positive f")

    def cmp_q(q: int, gp: GroupElement) -> int:
        # sign of g^p relative to f^q: + means f^q ≺ g^p
        fq = group.power(f, q)
        return o.signum(group.op(group.invert(fq), gp))

    qs: list[int] = []
    ratios: list[Fraction] = []
    for p in range(1, pmax + 1):
        gp = group.power(g, p)
        # find lo with f^lo ≼ g^p and hi with g^p ≺ f^hi
        if cmp_q(0, gp) >= 0:
            lo = 0
            hi = 1
            while cmp_q(hi, gp) >= 0:
                lo = hi
                hi *= 2
                if hi > exponent_bound:
                    raise ArchimedeanViolationError(
                        f"no power of f dominates g^{p} within {exponent_bound}"
                    )
        else:
            hi = 0
            lo = -1
            while cmp_q(lo, gp) < 0:
                hi = lo
                lo *= 2
                if -lo > exponent_bound:
                    raise ArchimedeanViolationError(
                        f"g^{p} below all powers of f within {exponent_bound}"
                    )
        # invariant: f^lo ≼ g^p ≺ f^hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if cmp_q(mid, gp) >= 0:
                lo = mid
            else:
                hi = mid
        qs.append(lo)
        ratios.append(Fraction(lo, p))
    return HolderResult(ratios, qs, Fraction(1, pmax))
