"""Ordering oracles: total left-invariant orders presented as sign functions.

An oracle evaluates sign(g) ∈ {+1, -1} on nonidentity elements; g ≺ h holds
exactly when sign(g⁻¹h) = +1.  Shipped families: the Dehornoy and
Dubrovina-Dubrovin braid orderings, slope/lexicographic orderings of Zⁿ,
Smirnov orderings of the affine group, the Magnus ordering of free groups,
and the four orderings of the Klein-bottle group.  Operators: conjugation,
reversal, and extension across a convex subgroup.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import braid as braid_mod
from .errors import IdentityElementError, OrdkitError
from .groups import (
    AffineElement,
    AffineGroup,
    BraidGroup,
    FreeGroup,
    FreeWord,
    Group,
    GroupElement,
    KleinElement,
    KleinGroup,
    ZnGroup,
    ZnVector,
    group_from_name,
)
from .numbers import QuadraticNumber, parse_quadratic

LEFT_INVARIANT = "left-invariant"
BI_INVARIANT = "bi-invariant"
CONRADIAN = "Conradian"
ARCHIMEDEAN = "Archimedean"
RIGHT_RECURRENT = "right-recurrent"


@dataclass(frozen=True)
class OrderingOracle:
    """A left-invariant total order, presented as a sign function.

    ``signum`` returns +1/-1 on nonidentity elements and 0 on the identity;
    results are memoized per oracle.  ``claims`` lists properties asserted
    by the construction, used for test selection only.
    """

    group: Group
    label: str
    claims: frozenset[str]
    sign_fn: Callable[[GroupElement], int]
    params: dict = field(default_factory=dict, compare=False, repr=False)
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def signum(self, g: GroupElement) -> int:
        key = self.group.memo_key(g)
        s = self._memo.get(key)
        if s is None:
            s = self.sign_fn(g)
            self._memo[key] = s
        return s

    def sign(self, g: GroupElement) -> int:
        s = self.signum(g)
        if s == 0:
            raise IdentityElementError(f"sign of the identity is undefined ({self.label})")
        return s

    def compare(self, g: GroupElement, h: GroupElement) -> str:
        """'<' when g ≺ h, '=' when equal, '>' otherwise."""
        s = self.signum(self.group.op(self.group.invert(g), h))
        return "<" if s > 0 else ("=" if s == 0 else ">")

    def less(self, g: GroupElement, h: GroupElement) -> bool:
        return self.compare(g, h) == "<"

    def __repr__(self):
        return f"OrderingOracle({self.label})"


# ---------------------------------------------------------------------------
# braid orderings
# ---------------------------------------------------------------------------

def dehornoy_order(n: int) -> OrderingOracle:
    """The ordering of B_n whose positive cone is the σ-positive elements."""
    group = BraidGroup(n)
    return OrderingOracle(
        group=group,
        label=f"dehornoy:b{n}",
        claims=frozenset({LEFT_INVARIANT}),
        sign_fn=lambda w: braid_mod.dehornoy_sign(w).sign,
    )


def dd_order(n: int) -> OrderingOracle:
    """The Dubrovina-Dubrovin ordering of B_n (finitely generated cone)."""
    group = BraidGroup(n)
    return OrderingOracle(
        group=group,
        label=f"dd:b{n}",
        claims=frozenset({LEFT_INVARIANT}),
        sign_fn=braid_mod.dd_sign,
    )


# ---------------------------------------------------------------------------
# abelian / affine / free / Klein orderings
# ---------------------------------------------------------------------------

def _rank_of_pair_matrix(slope: Sequence[QuadraticNumber]) -> int:
    """Rank over Q of the 2×n matrix of rational and sqrt parts."""
    rows = [
        [Fraction(s.a) for s in slope],
        [Fraction(s.b) for s in slope],
    ]
    rank = 0
    cols = len(slope)
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, 2):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(2):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == 2:
            break
    return rank


def zn_order(
    n: int,
    slope: Sequence[QuadraticNumber | Fraction | int],
    tiebreak: Sequence[int] | None = None,
    label: str | None = None,
) -> OrderingOracle:
    """Ordering of Zⁿ: sign of ⟨slope, v⟩ when nonzero, else lexicographic
    comparison of v in tiebreak coordinate order."""
    group = ZnGroup(n)
    s = tuple(
        x if isinstance(x, QuadraticNumber) else QuadraticNumber(x, 0) for x in slope
    )
    if len(s) != n:
        raise ValueError(f"slope must have {n} entries")
    if all(x.is_zero() for x in s):
        raise ValueError("slope must be nonzero")
    tb = tuple(tiebreak) if tiebreak is not None else tuple(range(1, n + 1))
    if any(not 1 <= i <= n for i in tb):
        raise ValueError("tiebreak indices out of range")

    def sign_fn(v: ZnVector) -> int:
        acc = QuadraticNumber(0, 0, s[0].d)
        for c, x in zip(s, v.coords):
            if x:
                acc = acc + c * x
        sg = acc.sign()
        if sg:
            return sg
        for i in tb:
            if v.coords[i - 1]:
                return 1 if v.coords[i - 1] > 0 else -1
        return 0

    claims = {LEFT_INVARIANT, BI_INVARIANT, CONRADIAN, RIGHT_RECURRENT}
    # the slope functional is injective iff its rational/sqrt parts have
    # trivial common integer kernel; then the order is Archimedean
    if n == 1 or (n == 2 and _rank_of_pair_matrix(s) == 2):
        claims.add(ARCHIMEDEAN)
    if label is None:
        label = f"zn:slope:{','.join(str(x) for x in s)}"
    return OrderingOracle(
        group, label, frozenset(claims), sign_fn, params={"n": n, "slope": s}
    )


def zn_lex_order(n: int) -> OrderingOracle:
    slope = [QuadraticNumber(1, 0)] + [QuadraticNumber(0, 0)] * (n - 1)
    return zn_order(n, slope, label=f"zn:lex:{n}")


def smirnov_order(epsilon: QuadraticNumber) -> OrderingOracle:
    """Ordering of the affine group over Q: (b, a) is positive iff
    b + εa > 1, i.e. the map moves the point 1/ε to the right."""
    if epsilon.b == 0:
        raise ValueError("Smirnov parameter must be irrational")
    group = AffineGroup()

    def sign_fn(g: AffineElement) -> int:
        return (QuadraticNumber(g.b - 1, 0, epsilon.d) + epsilon * g.a).sign()

    return OrderingOracle(
        group,
        f"smirnov:{epsilon}",
        frozenset({LEFT_INVARIANT}),
        sign_fn,
    )


def _magnus_letter_series(index: int, sgn: int, degree: int) -> dict[tuple, int]:
    # xᵢ ↦ 1 + Xᵢ,  xᵢ⁻¹ ↦ 1 - Xᵢ + Xᵢ² - ...
    if sgn > 0:
        return {(): 1, (index,): 1}
    out = {(): 1}
    for k in range(1, degree + 1):
        out[(index,) * k] = (-1) ** k
    return out


def _series_mul(p: dict, q: dict, degree: int) -> dict:
    out: dict[tuple, int] = {}
    for mp, cp in p.items():
        if len(mp) > degree:
            continue
        for mq, cq in q.items():
            m = mp + mq
            if len(m) > degree:
                continue
            c = out.get(m, 0) + cp * cq
            if c:
                out[m] = c
            elif m in out:
                del out[m]
    return out


def magnus_expansion(w: FreeWord, degree: int) -> dict[tuple, int]:
    """Truncated expansion of w under xᵢ ↦ 1 + Xᵢ in noncommuting series."""
    series = {(): 1}
    for i, e in w.letters:
        letter = _magnus_letter_series(i, 1 if e > 0 else -1, degree)
        for _ in range(abs(e)):
            series = _series_mul(series, letter, degree)
    return series


def magnus_order(rank: int) -> OrderingOracle:
    """Bi-invariant ordering of F_rank by the first nonzero coefficient of
    the Magnus expansion, monomials in graded-lexicographic order."""
    group = FreeGroup(rank)

    def sign_fn(w: FreeWord) -> int:
        if not w.letters:
            return 0
        total = sum(abs(e) for _, e in w.letters)
        for degree in range(1, total + 1):
            series = magnus_expansion(w, degree)
            nonzero = [(len(m), m) for m, c in series.items() if m and c]
            if nonzero:
                m = min(nonzero)[1]
                return 1 if series[m] > 0 else -1
        raise AssertionError("reduced nonempty word with vanishing expansion")

    return OrderingOracle(
        group,
        f"magnus:f{rank}",
        frozenset({LEFT_INVARIANT, BI_INVARIANT, CONRADIAN, RIGHT_RECURRENT}),
        sign_fn,
    )


def klein_orders() -> list[OrderingOracle]:
    """The four orderings of <a, b | bab⁻¹ = a⁻¹>, indexed by the signs
    given to b and to a."""
    group = KleinGroup()
    out = []
    for s_b in (1, -1):
        for s_a in (1, -1):
            def sign_fn(g: KleinElement, s_b=s_b, s_a=s_a) -> int:
                if g.n:
                    return s_b if g.n > 0 else -s_b
                if g.m:
                    return s_a if g.m > 0 else -s_a
                return 0

            tag = ("+" if s_b > 0 else "-") + ("+" if s_a > 0 else "-")
            out.append(
                OrderingOracle(
                    group,
                    f"klein:{tag}",
                    frozenset({LEFT_INVARIANT, CONRADIAN, RIGHT_RECURRENT}),
                    sign_fn,
                )
            )
    return out


# ---------------------------------------------------------------------------
# operators on orderings
# ---------------------------------------------------------------------------

def conjugate_order(o: OrderingOracle, f: GroupElement) -> OrderingOracle:
    """The image of o under f: positive cone f P⁺ f⁻¹."""
    group = o.group
    return OrderingOracle(
        group,
        f"{o.label}!conj={group.format(f)}",
        o.claims,
        lambda g: o.signum(group.conjugate(f, g)),
    )


def reverse_order(o: OrderingOracle) -> OrderingOracle:
    """Pointwise sign negation (swap the positive and negative cones)."""
    claims = {LEFT_INVARIANT}
    if BI_INVARIANT in o.claims:
        claims |= {BI_INVARIANT, CONRADIAN, RIGHT_RECURRENT}
    if ARCHIMEDEAN in o.claims:
        claims.add(ARCHIMEDEAN)
    return OrderingOracle(
        o.group,
        f"{o.label}!reverse",
        frozenset(claims),
        lambda g: -o.signum(g),
    )


@dataclass(frozen=True)
class MembershipPredicate:
    """Named membership test for a (caller-asserted convex) subgroup."""

    label: str
    contains: Callable[[GroupElement], bool]


def extend_order(
    outer: OrderingOracle,
    member: MembershipPredicate,
    inner: OrderingOracle,
) -> OrderingOracle:
    """Extension across a convex subgroup: positive cone
    (P⁺_outer ∖ Γ*) ∪ P⁺_inner."""

    def sign_fn(g: GroupElement) -> int:
        if member.contains(g):
            return inner.signum(g)
        return outer.signum(g)

    return OrderingOracle(
        outer.group,
        f"{outer.label}!extend={member.label}:{inner.label}",
        frozenset({LEFT_INVARIANT}),
        sign_fn,
    )


def parabolic_member(n: int, j: int) -> MembershipPredicate:
    """Membership in <σ_j, ..., σ_{n-1}> ≤ B_n."""
    return MembershipPredicate(
        label=f"p{j}",
        contains=lambda w: braid_mod.parabolic_membership(w, j)[0],
    )


def klein_a_member() -> MembershipPredicate:
    return MembershipPredicate(label="a", contains=lambda g: g.n == 0)


# ---------------------------------------------------------------------------
# order-spec strings (CLI and fixtures)
# ---------------------------------------------------------------------------

def parse_order_spec(spec: str) -> OrderingOracle:
    """URI-like order specs: dehornoy:b3, dd:b4, zn:lex:2,
    zn:slope:1,sqrt2, smirnov:sqrt2-1, magnus:f2, klein:++, with modifiers
    !reverse, !conj=<word>, !extend=<member>:<inner-spec>."""
    base, sep, rest = spec.partition("!")
    oracle = _parse_base_spec(base.strip())
    while sep:
        if rest.startswith("extend="):
            # the inner spec may itself carry modifiers: consume the remainder
            body = rest[len("extend="):]
            member_name, _, inner_spec = body.partition(":")
            member = _parse_member(oracle.group, member_name)
            inner = parse_order_spec(inner_spec)
            if type(inner.group) is not type(oracle.group):
                raise ValueError("inner order must live on the same group")
            return extend_order(oracle, member, inner)
        mod, sep, rest = rest.partition("!")
        mod = mod.strip()
        if mod == "reverse":
            oracle = reverse_order(oracle)
        elif mod.startswith("conj="):
            oracle = conjugate_order(oracle, oracle.group.parse(mod[len("conj="):]))
        else:
            raise ValueError(f"unknown order modifier {mod!r}")
    return oracle


def _parse_member(group: Group, name: str) -> MembershipPredicate:
    if isinstance(group, BraidGroup) and (m := re.fullmatch(r"p(\d+)", name)):
        return parabolic_member(group.strands, int(m.group(1)))
    if isinstance(group, KleinGroup) and name == "a":
        return klein_a_member()
    raise ValueError(f"unknown member predicate {name!r} for {group.name}")


def _parse_base_spec(base: str) -> OrderingOracle:
    parts = base.split(":")
    head = parts[0]
    if head == "dehornoy":
        return dehornoy_order(_strands(parts, 1))
    if head == "dd":
        return dd_order(_strands(parts, 1))
    if head == "zn":
        if len(parts) < 3:
            raise ValueError(f"bad zn spec {base!r}")
        if parts[1] == "lex":
            return zn_lex_order(int(parts[2]))
        if parts[1] == "slope":
            entries = [parse_quadratic(tok) for tok in ":".join(parts[2:]).split(",")]
            return zn_order(len(entries), entries)
        raise ValueError(f"bad zn spec {base!r}")
    if head == "smirnov":
        return smirnov_order(parse_quadratic(":".join(parts[1:])))
    if head == "magnus":
        m = re.fullmatch(r"f(\d+)", parts[1])
        if not m:
            raise ValueError(f"bad magnus spec {base!r}")
        return magnus_order(int(m.group(1)))
    if head == "klein":
        tag = parts[1]
        for o in klein_orders():
            if o.label == f"klein:{tag}":
                return o
        raise ValueError(f"bad klein spec {base!r} (use ++, +-, -+, --)")
    raise ValueError(f"unknown order family {head!r}")


def _strands(parts: list[str], idx: int) -> int:
    m = re.fullmatch(r"b(\d+)", parts[idx])
    if not m:
        raise ValueError(f"expected b<n>, got {parts[idx]!r}")
    return int(m.group(1))
