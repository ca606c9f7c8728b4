"""Desk-scale combinatorics of the space of orderings.

Ball restrictions and the ultrametric, depth-bounded consistency search for
finite sign assignments (the finitary orderability criteria), isolated-point
probes, Conradian/right-recurrence/positive-word diagnostics, the Conradian
soul of braid orderings, and approximation of an ordering by its conjugates.

All verdicts are bounded: eliminations carry replayable certificates, and
"none within budget" is reported honestly rather than claimed as a proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import braid as braid_mod
from .errors import OrdkitError, ResourceLimitError
from .groups import (
    BraidGroup,
    BraidWord,
    ElementIndex,
    Group,
    GroupElement,
)
from .numbers import QuadraticNumber
from .orders import (
    MembershipPredicate,
    OrderingOracle,
    conjugate_order,
    dd_order,
    dehornoy_order,
    extend_order,
    klein_a_member,
    parabolic_member,
    reverse_order,
    zn_order,
)

MODE_LEFT = "left"
MODE_BI = "bi"
MODE_CONRAD = "conrad"


# ---------------------------------------------------------------------------
# ball restrictions and the ultrametric
# ---------------------------------------------------------------------------

@dataclass
class BallRestriction:
    """Sign table of an ordering on the nonidentity part of a generator ball.

    Elements are the deterministic shortlex-BFS representatives, so two
    restrictions at the same radius are comparable sign-by-sign.
    """

    group: Group
    radius: int
    elements: list[GroupElement]
    signs: list[int]

    def table(self) -> dict[str, str]:
        return {
            self.group.format(e): ("+" if s > 0 else "-")
            for e, s in zip(self.elements, self.signs)
        }

    def __eq__(self, other):
        return (
            isinstance(other, BallRestriction)
            and self.radius == other.radius
            and self.group.name == other.group.name
            and self.signs == other.signs
        )


def restrict_to_ball(o: OrderingOracle, radius: int, cap: int | None = None) -> BallRestriction:
    ball = o.group.ball(radius) if cap is None else o.group.ball(radius, cap)
    elems = ball[1:]
    return BallRestriction(o.group, radius, elems, [o.sign(g) for g in elems])


@dataclass
class DistanceResult:
    """dist'(o1, o2) = e^{-n'} with n' the largest radius of agreement.

    n_prime is None when the orderings agree on every ball up to max_radius
    (distance reported as "<=e-{max_radius}", value 0 at this resolution).
    """

    n_prime: int | None
    max_radius: int
    discriminator: GroupElement | None

    @property
    def distance(self) -> str:
        if self.n_prime is None:
            return f"<=e^-{self.max_radius}"
        if self.n_prime == 0:
            return "1"
        return f"e^-{self.n_prime}"


def order_distance(o1: OrderingOracle, o2: OrderingOracle, max_radius: int) -> DistanceResult:
    if type(o1.group) is not type(o2.group) or o1.group.name != o2.group.name:
        raise OrdkitError("orderings live on different groups")
    elems, offsets = o1.group.ball_with_offsets(max_radius)
    for n in range(1, max_radius + 1):
        for g in elems[offsets[n - 1]:offsets[n]]:
            if o1.sign(g) != o2.sign(g):
                return DistanceResult(n - 1, max_radius, g)
    return DistanceResult(None, max_radius, None)


# ---------------------------------------------------------------------------
# depth-bounded consistency search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    """Expression tree recording how an element entered the closure."""

    rule: str                       # 'assigned' | 'product' | 'conjugation' | 'conrad'
    key: object
    parents: tuple["Derivation", ...] = ()

    def leaves(self) -> list[object]:
        if self.rule == "assigned":
            return [self.key]
        out = []
        for p in self.parents:
            out.extend(p.leaves())
        return out


@dataclass(frozen=True)
class Certificate:
    """Replayable refutation: either the identity was derived positive, or
    some element and its inverse both were."""

    kind: str                       # 'identity' | 'sign-clash'
    trees: tuple[Derivation, ...]


@dataclass
class SearchVerdict:
    status: str                     # 'consistent' | 'inconsistent' | 'unknown'
    certificate: object | None = None


@dataclass
class Assignment:
    """A surviving sign assignment on the ball."""

    signs: dict                     # canonical-ish key -> +1/-1 (ball elements)
    saturated: bool                 # closure reached a fixpoint within depth


@dataclass
class ExtensionEnumeration:
    mode: str
    depth: int
    radius: int
    assignments: list[Assignment]
    eliminated: list[tuple[dict, Certificate]]
    verdict: SearchVerdict
    ball_elements: list[GroupElement] = field(default_factory=list)


class _Region:
    """Closure region: a finite ball with an equality index."""

    def __init__(self, group: Group, radius: int, cap: int):
        self.group = group
        elems, offsets = group.ball_with_offsets(radius, cap)
        self.elems = elems
        self.offsets = offsets
        self.index = ElementIndex(group)
        for e in elems:
            self.index.add(e)
        self.inverse = [self.index.find(group.invert(e)) for e in elems]

    def find(self, g: GroupElement) -> int | None:
        return self.index.find(g)


def _saturate(
    region: _Region,
    positive: dict[int, Derivation],
    mode: str,
    depth: int,
) -> tuple[Certificate | None, dict[int, Derivation], bool]:
    """Region-bounded closure of the positive set under the mode's rules.

    Returns (certificate-or-None, closure, reached_fixpoint).  Products that
    leave the region are dropped (a conservative over-approximation: fewer
    contradictions can be derived, never more).
    """
    group = region.group
    current = dict(positive)

    def clash(idx: int) -> Certificate | None:
        if region.group.is_identity(region.elems[idx]):
            return Certificate("identity", (current[idx],))
        inv = region.inverse[idx]
        if inv is not None and inv in current:
            return Certificate("sign-clash", (current[idx], current[inv]))
        return None

    for idx in list(current):
        c = clash(idx)
        if c:
            return c, current, False
    frontier = dict(current)
    for _ in range(depth):
        new: dict[int, Derivation] = {}

        def emit(g: GroupElement, rule: str, parents) -> Certificate | None:
            j = region.find(g)
            if j is None or j in current or j in new:
                return None
            new[j] = Derivation(rule, j, parents)
            return None

        items = list(current.items())
        fresh = list(frontier.items())
        # semi-naive: at least one operand from the last layer
        for (i, di), (j, dj) in itertools.chain(
            itertools.product(fresh, items),
            itertools.product(items, fresh),
        ):
            gi, gj = region.elems[i], region.elems[j]
            emit(group.op(gi, gj), "product", (di, dj))
            if mode == MODE_BI:
                emit(group.conjugate(gi, gj), "conj", (di, dj))
                emit(
                    group.op(group.op(group.invert(gi), gj), gi),
                    "conj-inv",
                    (di, dj),
                )
            elif mode == MODE_CONRAD:
                # f^{-1} g f^2
                emit(
                    group.op(group.op(group.invert(gi), gj), group.op(gi, gi)),
                    "conrad",
                    (di, dj),
                )
        if not new:
            return None, current, True
        for idx, d in new.items():
            current[idx] = d
        for idx in new:
            c = clash(idx)
            if c:
                return c, current, False
        frontier = new
    return None, current, False


def _replay_derivation(region: _Region, d: Derivation) -> GroupElement:
    group = region.group
    if d.rule == "assigned":
        return region.elems[d.key]
    a = _replay_derivation(region, d.parents[0])
    b = _replay_derivation(region, d.parents[1])
    if d.rule == "product":
        return group.op(a, b)
    if d.rule == "conj":
        return group.conjugate(a, b)
    if d.rule == "conj-inv":
        return group.op(group.op(group.invert(a), b), a)
    if d.rule == "conrad":
        return group.op(group.op(group.invert(a), b), group.op(a, a))
    raise OrdkitError(f"unknown rule {d.rule}")


def replay_certificate(region: _Region, cert: Certificate) -> bool:
    """Re-derive the contradiction from the assigned leaves."""
    group = region.group
    if cert.kind == "identity":
        g = _replay_derivation(region, cert.trees[0])
        return group.is_identity(g)
    if cert.kind == "sign-clash":
        g = _replay_derivation(region, cert.trees[0])
        h = _replay_derivation(region, cert.trees[1])
        return group.is_identity(group.op(g, h))
    return False


def consistent_extensions(
    group: Group,
    radius: int,
    partial_signs: dict | None = None,
    mode: str = MODE_LEFT,
    depth: int = 6,
    region_radius: int | None = None,
    region_cap: int = 200_000,
    max_nodes: int = 200_000,
) -> ExtensionEnumeration:
    """Enumerate the sign assignments on the radius ball that survive
    depth-bounded saturation of the mode's closure rules.

    Sound for elimination (every certificate replays); the surviving set
    over-approximates the restrictions of genuine orderings.  partial_signs
    maps ball elements (or their canonical keys) to required signs.
    """
    if mode not in (MODE_LEFT, MODE_BI, MODE_CONRAD):
        raise ValueError(f"unknown mode {mode!r}")
    rr = region_radius if region_radius is not None else 3 * radius
    region = _Region(group, max(rr, radius), region_cap)
    ball_size = region.offsets[radius]
    ball_idx = list(range(1, ball_size))  # region indices of nonidentity ball elements

    # inverse-closed pairing of the ball
    pair_of: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for i in ball_idx:
        if i in pair_of:
            continue
        inv = region.inverse[i]
        if inv is None or inv >= ball_size:
            raise OrdkitError("generator ball is not inverse-closed")
        pair_of[i] = inv
        pair_of[inv] = i
        pairs.append((i, inv) if i <= inv else (inv, i))

    fixed: dict[int, int] = {}
    if partial_signs:
        for g, s in partial_signs.items():
            if not isinstance(g, GroupElement):
                raise ValueError("partial_signs keys must be group elements")
            i = region.find(g)
            if i is None or i >= ball_size:
                raise ValueError("partial sign given outside the ball")
            fixed[i] = s
            fixed[pair_of[i]] = -s

    assignments: list[Assignment] = []
    eliminated: list[tuple[dict, Certificate]] = []
    nodes = 0
    hit_node_cap = False

    def ball_signs_of(chosen: dict[int, int]) -> dict:
        return {
            region.group.bucket_key(region.elems[i]): chosen[i] for i in ball_idx
        }

    def search(pos: int, chosen: dict[int, int]):
        nonlocal nodes, hit_node_cap
        nodes += 1
        if nodes > max_nodes:
            hit_node_cap = True
            return
        positive = {
            i: Derivation("assigned", i)
            for i in ball_idx
            if chosen.get(i) == 1
        }
        cert, closure, fixpoint = _saturate(region, positive, mode, depth)
        if cert is not None:
            eliminated.append((dict(chosen), cert))
            return
        # closure forces signs of ball elements derived positive
        forced = dict(chosen)
        for i in closure:
            if i < ball_size and i != 0:
                if forced.get(i) == -1:
                    # the saturation would have clashed; defensive
                    eliminated.append(
                        (dict(chosen), Certificate("sign-clash", (closure[i],)))
                    )
                    return
                forced[i] = 1
                forced[pair_of[i]] = -1
        if forced != chosen:
            # re-run with the forced signs folded in (cheap fixpoint loop)
            search(pos, forced)
            return
        while pos < len(pairs) and pairs[pos][0] in chosen:
            pos += 1
        if pos == len(pairs):
            assignments.append(Assignment(ball_signs_of(chosen), fixpoint))
            return
        lo, hi = pairs[pos]
        for s in (1, -1):
            branch = dict(chosen)
            branch[lo] = s
            branch[hi] = -s
            search(pos + 1, branch)

    initial: dict[int, int] = dict(fixed)
    search(0, initial)

    if hit_node_cap:
        verdict = SearchVerdict("unknown", None)
    elif assignments:
        verdict = SearchVerdict("consistent", [a.signs for a in assignments])
    else:
        verdict = SearchVerdict(
            "inconsistent", eliminated[0][1] if eliminated else None
        )
    enum = ExtensionEnumeration(
        mode, depth, radius, assignments, eliminated, verdict,
        [region.elems[i] for i in ball_idx],
    )
    enum._region = region  # for certificate replay by callers/tests
    return enum


def restriction_signs(o: OrderingOracle, enum: ExtensionEnumeration) -> dict:
    """o's sign table on the enumeration's ball, keyed like Assignment.signs."""
    return {
        o.group.bucket_key(g): o.sign(g) for g in enum.ball_elements
    }


# ---------------------------------------------------------------------------
# isolated-point probe
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    status: str                     # 'alternative' | 'unrealized' | 'none-within-budget'
    alternative: OrderingOracle | None = None
    assignment: Assignment | None = None
    discriminator: GroupElement | None = None
    examined: int = 0
    notes: list[str] = field(default_factory=list)


def _agrees_on_ball(o1: OrderingOracle, o2: OrderingOracle, elems) -> bool:
    return all(o1.sign(g) == o2.sign(g) for g in elems)


def _first_discriminator(o1, o2, max_radius, skip_radius):
    """First ball element (beyond skip_radius) where the two orderings
    disagree, scanning sphere by sphere so the search stops as soon as a
    discriminator appears."""
    for r in range(skip_radius + 1, max_radius + 1):
        elems, offsets = o1.group.ball_with_offsets(r)
        for g in elems[offsets[r - 1]:offsets[r]]:
            if o1.sign(g) != o2.sign(g):
                return g
    return None


def isolated_probe(
    o: OrderingOracle,
    radius: int,
    depth: int = 6,
    budget: int = 2000,
    discriminator_radius: int | None = None,
) -> ProbeResult:
    """Look for an ordering distinct from o that agrees with o on the radius
    ball: first realized candidates from the shipped parametric families
    (slope perturbation, conjugation, reversal-extension over known convex
    subgroups), then consistency enumeration one radius out.
    """
    group = o.group
    ball = group.ball(radius)[1:]
    examined = 0
    notes: list[str] = []
    if discriminator_radius is not None:
        disc_radius = discriminator_radius
    elif isinstance(group, BraidGroup):
        disc_radius = radius + 4  # braid balls grow exponentially
    else:
        disc_radius = 4 * radius + 8

    def realized(candidate: OrderingOracle) -> ProbeResult | None:
        nonlocal examined
        examined += 1
        if not _agrees_on_ball(o, candidate, ball):
            return None
        disc = _first_discriminator(o, candidate, disc_radius, radius)
        if disc is None:
            return None
        return ProbeResult("alternative", candidate, None, disc, examined, notes)

    # slope perturbation
    if "slope" in o.params:
        n, slope = o.params["n"], o.params["slope"]
        for k in range(1, budget):
            for sgn in (1, -1):
                delta = QuadraticNumber(sgn, 0, slope[0].d) / (2 ** k)
                for coord in range(n):
                    pert = list(slope)
                    pert[coord] = pert[coord] + delta
                    if all(x.is_zero() for x in pert):
                        continue
                    res = realized(zn_order(n, pert))
                    if res:
                        return res
                    if examined > budget:
                        return ProbeResult(
                            "none-within-budget", examined=examined, notes=notes
                        )

    # conjugation
    for f in group.ball(radius + 1)[1:]:
        res = realized(conjugate_order(o, f))
        if res:
            return res
        if examined > budget:
            return ProbeResult("none-within-budget", examined=examined, notes=notes)

    # reversal-extension over the known convex subgroups of the family
    for member in _known_convex_members(group):
        inner = reverse_order(o)
        res = realized(extend_order(o, member, inner))
        if res:
            return res
        if examined > budget:
            return ProbeResult("none-within-budget", examined=examined, notes=notes)

    # consistency enumeration one radius out, pinned to o on the inner ball
    region_radius = None
    if isinstance(group, BraidGroup):
        region_radius = radius + 3  # resource bound; ball(3r) is out of reach
        notes.append(f"consistency region limited to ball({region_radius})")
    partial = {g: o.sign(g) for g in ball}
    try:
        enum = consistent_extensions(
            group,
            radius + 1,
            partial_signs=partial,
            depth=depth,
            region_radius=region_radius,
        )
    except ResourceLimitError as e:
        notes.append(f"consistency enumeration skipped: {e}")
        return ProbeResult("none-within-budget", examined=examined, notes=notes)
    own = {
        group.bucket_key(g): o.sign(g) for g in enum.ball_elements
    }
    for a in enum.assignments:
        if a.signs != own:
            return ProbeResult(
                "unrealized", None, a, None, examined, notes
            )
    return ProbeResult("none-within-budget", examined=examined, notes=notes)


def _known_convex_members(group: Group) -> list[MembershipPredicate]:
    if isinstance(group, BraidGroup):
        return [parabolic_member(group.strands, j) for j in range(2, group.strands)]
    from .groups import KleinGroup

    if isinstance(group, KleinGroup):
        return [klein_a_member()]
    return []


# ---------------------------------------------------------------------------
# Conradian / positive-word / right-recurrence diagnostics
# ---------------------------------------------------------------------------

def positive_pairs(
    o: OrderingOracle, radius: int, limit: int | None = None
) -> list[tuple[GroupElement, GroupElement]]:
    """Deterministic pair source: positive ball elements, pairs ordered by
    combined ball position."""
    pos = [g for g in o.group.ball(radius)[1:] if o.sign(g) == 1]
    pairs = [
        (pos[i], pos[j])
        for (i, j) in sorted(
            itertools.product(range(len(pos)), repeat=2), key=lambda ij: (ij[0] + ij[1], ij)
        )
    ]
    return pairs[:limit] if limit else pairs


def conrad_check(
    o: OrderingOracle,
    pair_source: Iterable[tuple[GroupElement, GroupElement]],
) -> tuple[GroupElement, GroupElement] | None:
    """Definitive non-Conradian witness (f, g) with f g² ≺ g, or None when
    every sampled pair passes."""
    group = o.group
    for f, g in pair_source:
        w = group.op(group.op(group.invert(g), f), group.op(g, g))
        if o.signum(w) == -1:
            return (f, g)
    return None


def positive_word_check(
    o: OrderingOracle,
    f: GroupElement,
    g: GroupElement,
    exponents: Sequence[tuple[int, int]],
) -> int:
    """Sign of W(f,g) = f^{m1} g^{n1} ... f^{mk} g^{nk}.

    Requires f, g positive and both exponent sums positive; for Conradian
    orderings the result must be +1.
    """
    if o.signum(f) != 1 or o.signum(g) != 1:
        raise OrdkitError("positive_word_check requires positive f and g")
    if sum(m for m, _ in exponents) <= 0 or sum(n for _, n in exponents) <= 0:
        raise OrdkitError("exponent sums must both be positive")
    group = o.group
    w = group.identity()
    for m, n in exponents:
        if m:
            w = group.op(w, group.power(f, m))
        if n:
            w = group.op(w, group.power(g, n))
    return o.sign(w)


def right_recurrence_check(
    o: OrderingOracle,
    pair_source: Iterable[tuple[GroupElement, GroupElement]],
    nmax: int = 20,
) -> tuple[GroupElement, GroupElement, int] | None:
    """Search n ≤ nmax with g fⁿ ≻ fⁿ for each sampled positive pair; a pair
    with no such n is returned as a suspect (not a disproof)."""
    group = o.group
    for f, g in pair_source:
        found = False
        fn = group.identity()
        for _ in range(nmax):
            fn = group.op(fn, f)
            w = group.op(group.op(group.invert(fn), g), fn)
            if o.signum(w) == 1:
                found = True
                break
        if not found:
            return (f, g, nmax)
    return None


# ---------------------------------------------------------------------------
# approximation by conjugates
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceStep:
    target_radius: int
    conjugator: GroupElement
    agreement_radius: int
    discriminator: GroupElement


@dataclass
class ConvergenceReport:
    steps: list[ConvergenceStep]
    reached: bool
    fixed_point_candidates: int
    candidates_scanned: int
    note: str = ""


def conjugate_convergence(
    o: OrderingOracle,
    conj_radius: int,
    targets: int,
    against: OrderingOracle | None = None,
    scan_cap: int | None = None,
) -> ConvergenceReport:
    """For each m = 1..targets, find the shortlex-first conjugate of o that
    agrees with the base ordering (o itself, or ``against``) on the radius-m
    ball while provably differing (a discriminator element is returned).

    Emitted agreement radii are strictly increasing.  Conjugates that agree
    through the scan cap with no discriminator found are counted as
    fixed-point candidates and never emitted.
    """
    base = against if against is not None else o
    group = o.group
    cap = scan_cap if scan_cap is not None else targets + 3
    elems, offsets = group.ball_with_offsets(cap)
    spheres = [
        elems[offsets[r - 1]:offsets[r]] for r in range(1, cap + 1)
    ]
    base_signs = [[base.sign(g) for g in sph] for sph in spheres]
    candidates = group.ball(conj_radius)[1:]

    # agreement radius of each candidate, computed lazily and memoized;
    # value cap means "agrees through the scan cap" (fixed-point candidate)
    agreement: dict[int, tuple[int, GroupElement | None]] = {}

    def agree_data(ci: int) -> tuple[int, GroupElement | None]:
        got = agreement.get(ci)
        if got is not None:
            return got
        conj = conjugate_order(o, candidates[ci])
        n = 0
        disc = None
        for r in range(cap):
            mismatch = None
            for g, s in zip(spheres[r], base_signs[r]):
                if conj.sign(g) != s:
                    mismatch = g
                    break
            if mismatch is not None:
                disc = mismatch
                break
            n += 1
        agreement[ci] = (n, disc)
        return agreement[ci]

    steps: list[ConvergenceStep] = []
    prev = 0
    reached = True
    for m in range(1, targets + 1):
        target_n = max(m, prev + 1)
        hit = None
        for ci in range(len(candidates)):
            n, disc = agree_data(ci)
            if n >= target_n and disc is not None:
                hit = ConvergenceStep(m, candidates[ci], n, disc)
                break
        if hit is None:
            reached = False
            break
        steps.append(hit)
        prev = hit.agreement_radius
    fixed = sum(1 for (n, d) in agreement.values() if d is None)
    note = ""
    if against is None and fixed == len(candidates) and candidates:
        note = "every scanned conjugate agrees through the cap: fixed point of the action"
    return ConvergenceReport(steps, reached, fixed, len(agreement), note)


# ---------------------------------------------------------------------------
# the Conradian soul of braid orderings
# ---------------------------------------------------------------------------

@dataclass
class SoulResult:
    strands: int
    which: str
    soul_level: int                 # j: the soul is <σ_j, ..., σ_{n-1}> (n means trivial)
    soul_generators: list[int]
    witness: tuple[GroupElement, GroupElement] | None
    killed_level: int | None

    def witness_exponents(self):
        # g^{-1} f g^2 as a two-block positive-sum word: f^0 g^-1 f^1 g^2
        return ((0, -1), (1, 2))


def conradian_soul_braid(
    n: int,
    which: str = "dehornoy",
    search_radius: int = 4,
) -> SoulResult:
    """Walk the convex chain {id} ⊂ <σ_{n-1}> ⊂ <σ_{n-2}, σ_{n-1}> ⊂ … ⊂ B_n
    from the bottom; at each level search positive pairs of the subgroup for
    a definitive witness f g² ≺ g.  The soul is the last level with no
    witness found."""
    if n > 5:
        raise OrdkitError("soul computation is desk-scale: n ≤ 5")
    if which == "dehornoy":
        o = dehornoy_order(n)
    elif which == "dd":
        o = dd_order(n)
    else:
        raise ValueError("which must be 'dehornoy' or 'dd'")

    soul = n  # trivial subgroup
    for j in range(n - 1, 0, -1):
        # elements of <σ_j, ..., σ_{n-1}>: shifted ball of B_{n-j+1}
        sub = BraidGroup(n - j + 1)
        elems = [
            braid_mod.shift_word(w, j - 1, n) for w in sub.ball(search_radius)[1:]
        ]
        pos = [g for g in elems if o.signum(g) == 1]
        order = sorted(
            itertools.product(range(len(pos)), repeat=2),
            key=lambda ij: (len(pos[ij[0]].letters) + len(pos[ij[1]].letters), ij),
        )
        witness = conrad_check(o, ((pos[i], pos[j2]) for i, j2 in order))
        if witness is not None:
            return SoulResult(
                n, which, soul, list(range(soul, n)), witness, j
            )
        soul = j
    return SoulResult(n, which, 1, list(range(1, n)), None, None)
