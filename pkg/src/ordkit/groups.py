"""Element representations, exact arithmetic, normal forms, and ball enumeration.

Five group families are supported: free groups F_k, braid groups B_n,
free abelian groups Z^n, the affine group over Q (maps x ↦ bx + a with
b > 0), and the Klein-bottle group <a, b | bab⁻¹ = a⁻¹> in the normal
form bⁿaᵐ.  All values are immutable; every operation is a pure function.

Braid words are *not* canonical: equality is decided by the reduction
machinery in :mod:`ordkit.braid`, which this module calls lazily.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GroupMismatchError, ResourceLimitError

DEFAULT_BALL_CAP = 500_000

# (family, parameters) -> (elements, offsets); balls are deterministic
_BALL_CACHE: dict = {}


# ---------------------------------------------------------------------------
# element types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word; letters are (generator index ≥ 1, exponent ≠ 0)."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for (g, e) in self.letters:
            if g < 1 or e == 0:
                raise ValueError(f"bad free-word letter ({g},{e})")
        for (g1, _), (g2, _) in zip(self.letters, self.letters[1:]):
            if g1 == g2:
                raise ValueError("free word is not reduced")

    def length(self) -> int:
        return sum(abs(e) for _, e in self.letters)


@dataclass(frozen=True)
class BraidWord:
    """Word in the Artin generators of B_n.

    ``letters`` holds signed indices: +i is the i-th generator, -i its
    inverse.  Words are not canonical; see :func:`ordkit.braid.braid_equal`.
    """

    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 2:
            raise ValueError("braid group needs at least 2 strands")
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise ValueError(f"letter {x} out of range for B_{self.strands}")

    def length(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class ZnVector:
    coords: tuple[int, ...]


@dataclass(frozen=True)
class AffineElement:
    """The map x ↦ bx + a with rational b > 0, a."""

    b: Fraction
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "a", Fraction(self.a))
        if self.b <= 0:
            raise ValueError("affine slope must be positive")


@dataclass(frozen=True)
class KleinElement:
    """bⁿaᵐ in <a, b | bab⁻¹ = a⁻¹>."""

    n: int
    m: int


GroupElement = FreeWord | BraidWord | ZnVector | AffineElement | KleinElement


# ---------------------------------------------------------------------------
# products and inverses (dispatch on the element type)
# ---------------------------------------------------------------------------

def _free_concat(u: tuple[tuple[int, int], ...], v: tuple[tuple[int, int], ...]):
    out = list(u)
    for (g, e) in v:
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            out.pop()
            if s != 0:
                out.append((g, s))
        else:
            out.append((g, e))
    return tuple(out)


def group_op(g: GroupElement, h: GroupElement) -> GroupElement:
    """Product of two elements of the same group instance."""
    if type(g) is not type(h):
        raise GroupMismatchError(f"cannot multiply {type(g).__name__} by {type(h).__name__}")
    if isinstance(g, FreeWord):
        return FreeWord(_free_concat(g.letters, h.letters))
    if isinstance(g, BraidWord):
        if g.strands != h.strands:
            raise GroupMismatchError(f"strand counts differ: {g.strands} vs {h.strands}")
        return BraidWord(g.strands, g.letters + h.letters)
    if isinstance(g, ZnVector):
        if len(g.coords) != len(h.coords):
            raise GroupMismatchError("vector lengths differ")
        return ZnVector(tuple(x + y for x, y in zip(g.coords, h.coords)))
    if isinstance(g, AffineElement):
        return AffineElement(g.b * h.b, g.b * h.a + g.a)
    if isinstance(g, KleinElement):
        sgn = -1 if h.n % 2 else 1
        return KleinElement(g.n + h.n, sgn * g.m + h.m)
    raise GroupMismatchError(f"unsupported element {type(g).__name__}")


def invert(g: GroupElement) -> GroupElement:
    """Group inverse; group_op(g, invert(g)) is the identity."""
    if isinstance(g, FreeWord):
        return FreeWord(tuple((i, -e) for i, e in reversed(g.letters)))
    if isinstance(g, BraidWord):
        return BraidWord(g.strands, tuple(-x for x in reversed(g.letters)))
    if isinstance(g, ZnVector):
        return ZnVector(tuple(-x for x in g.coords))
    if isinstance(g, AffineElement):
        return AffineElement(1 / g.b, -g.a / g.b)
    if isinstance(g, KleinElement):
        sgn = -1 if g.n % 2 else 1
        return KleinElement(-g.n, -sgn * g.m)
    raise GroupMismatchError(f"unsupported element {type(g).__name__}")


def klein_normal_form(word: str | Sequence[tuple[str, int]]) -> KleinElement:
    """Fold a word in a^{±1}, b^{±1} into the normal form bⁿaᵐ.

    Accepts the text syntax ("b a b^-1") or a sequence of (letter, exponent).
    """
    if isinstance(word, str):
        letters = _parse_letter_word(word, {"a", "b"})
    else:
        letters = list(word)
    out = KleinElement(0, 0)
    for name, e in letters:
        if name == "a":
            step = KleinElement(0, 1 if e > 0 else -1)
        elif name == "b":
            step = KleinElement(1 if e > 0 else -1, 0)
        else:
            raise ValueError(f"Klein letters are a, b; got {name!r}")
        for _ in range(abs(e)):
            out = group_op(out, step)
    return out


# ---------------------------------------------------------------------------
# group instances
# ---------------------------------------------------------------------------

class Group:
    """A group family instance: identity, generators, equality, balls, text I/O."""

    name: str

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def op(self, g, h):
        return group_op(g, h)

    def invert(self, g):
        return invert(g)

    def generators(self) -> tuple[GroupElement, ...]:
        raise NotImplementedError

    def is_identity(self, g) -> bool:
        return self.canonical_key(g) == self.canonical_key(self.identity())

    def equal(self, g, h) -> bool:
        return self.canonical_key(g) == self.canonical_key(h)

    def canonical_key(self, g):
        """Exact hashable key, or None when no canonical form exists (braids)."""
        raise NotImplementedError

    def bucket_key(self, g):
        """Sound invariant key: equal elements always share a bucket."""
        return self.canonical_key(g)

    def memo_key(self, g):
        """Hashable key for sign-memoization (word-level is fine)."""
        return self.canonical_key(g)

    def power(self, g, k: int):
        if k == 0:
            return self.identity()
        base = g if k > 0 else self.invert(g)
        out = None
        e = abs(k)
        while e:
            if e & 1:
                out = base if out is None else self.op(out, base)
            base = self.op(base, base)
            e >>= 1
        return out

    def parse(self, text: str) -> GroupElement:
        raise NotImplementedError

    def format(self, g) -> str:
        raise NotImplementedError

    def conjugate(self, f, g):
        """f g f⁻¹."""
        return self.op(self.op(f, g), self.invert(f))

    def cache_tag(self) -> str:
        return self.name

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupElement]:
        return self.ball_with_offsets(radius, cap)[0]

    def ball_with_offsets(self, radius: int, cap: int = DEFAULT_BALL_CAP):
        """All distinct elements of ≤ radius generator letters, in shortlex
        BFS order, plus the prefix lengths of each sub-ball.

        offsets[r] = number of elements of word length ≤ r, so
        ball(r) == elems[:offsets[r]].  Balls are deterministic per family,
        so results are cached process-wide; callers must not mutate them.
        """
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        tag = (type(self).__name__, self.cache_tag())
        cached = _BALL_CACHE.get(tag)
        if cached is not None and len(cached[1]) > radius:
            elems, offsets = cached
            return elems[: offsets[radius]], offsets[: radius + 1]
        ident = self.identity()
        index = ElementIndex(self)
        index.add(ident)
        elems = [ident]
        offsets = [1]
        frontier = [ident]
        gens = self.generators()
        for _ in range(radius):
            new = []
            for g in frontier:
                for s in gens:
                    h = self.op(g, s)
                    if index.find(h) is None:
                        index.add(h)
                        elems.append(h)
                        new.append(h)
                        if len(elems) > cap:
                            raise ResourceLimitError(
                                f"ball enumeration exceeded cap of {cap} elements"
                            )
            frontier = new
            offsets.append(len(elems))
        prior = _BALL_CACHE.get(tag)
        if prior is None or len(prior[1]) <= radius:
            _BALL_CACHE[tag] = (elems, offsets)
        return elems, offsets


class ElementIndex:
    """Membership index over possibly non-canonical elements.

    Elements are bucketed by a sound invariant key; equality within a
    bucket is confirmed by the group's equality test.
    """

    def __init__(self, group: Group):
        self.group = group
        self.items: list[GroupElement] = []
        self._buckets: dict = {}

    def __len__(self):
        return len(self.items)

    def find(self, g) -> int | None:
        bucket = self._buckets.get(self.group.bucket_key(g))
        if not bucket:
            return None
        for idx in bucket:
            if self.group.equal(self.items[idx], g):
                return idx
        return None

    def add(self, g) -> int:
        idx = len(self.items)
        self.items.append(g)
        self._buckets.setdefault(self.group.bucket_key(g), []).append(idx)
        return idx


_GEN_NAMES = "abcdefghijklmnopqrstuvwxyz"


class FreeGroup(Group):
    def __init__(self, rank: int):
        if not 1 <= rank <= 26:
            raise ValueError("rank must be between 1 and 26")
        self.rank = rank
        self.name = f"f{rank}"

    def identity(self):
        return FreeWord()

    def generators(self):
        out = []
        for i in range(1, self.rank + 1):
            out.append(FreeWord(((i, 1),)))
            out.append(FreeWord(((i, -1),)))
        return tuple(out)

    def canonical_key(self, g: FreeWord):
        return g.letters

    def parse(self, text: str) -> FreeWord:
        names = {_GEN_NAMES[i]: i + 1 for i in range(self.rank)}
        letters = _parse_letter_word(text, set(names))
        w = FreeWord()
        for name, e in letters:
            w = group_op(w, FreeWord(((names[name], e),)))
        return w

    def format(self, g: FreeWord) -> str:
        if not g.letters:
            return ""
        parts = []
        for i, e in g.letters:
            parts.append(_GEN_NAMES[i - 1] + (f"^{e}" if e != 1 else ""))
        return " ".join(parts)


class BraidGroup(Group):
    def __init__(self, strands: int):
        if strands < 2:
            raise ValueError("braid group needs at least 2 strands")
        self.strands = strands
        self.name = f"b{strands}"

    def identity(self):
        return BraidWord(self.strands)

    def generators(self):
        out = []
        for i in range(1, self.strands):
            out.append(BraidWord(self.strands, (i,)))
            out.append(BraidWord(self.strands, (-i,)))
        return tuple(out)

    def canonical_key(self, g: BraidWord):
        return None

    def bucket_key(self, g: BraidWord):
        from . import braid

        return braid.burau_key(g)

    def memo_key(self, g: BraidWord):
        return g.letters

    def is_identity(self, g: BraidWord) -> bool:
        from . import braid

        return braid.dehornoy_sign(g).sign == 0

    def equal(self, g: BraidWord, h: BraidWord) -> bool:
        from . import braid

        return braid.braid_equal(g, h)

    def word(self, letters: Iterable[int]) -> BraidWord:
        return BraidWord(self.strands, tuple(letters))

    def parse(self, text: str) -> BraidWord:
        letters: list[int] = []
        for tok in text.split():
            m = re.fullmatch(r"s(\d+)(?:\^(-?\d+))?", tok)
            if not m:
                raise ValueError(f"bad braid letter {tok!r} (expected e.g. s1, s2^-1)")
            i = int(m.group(1))
            e = int(m.group(2)) if m.group(2) else 1
            if not 1 <= i < self.strands:
                raise ValueError(f"generator s{i} out of range for B_{self.strands}")
            letters.extend([i if e > 0 else -i] * abs(e))
        return BraidWord(self.strands, tuple(letters))

    def format(self, g: BraidWord) -> str:
        parts = []
        for x in g.letters:
            parts.append(f"s{x}" if x > 0 else f"s{-x}^-1")
        return " ".join(parts)


class ZnGroup(Group):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.name = f"z{n}"

    def identity(self):
        return ZnVector((0,) * self.n)

    def generators(self):
        out = []
        for i in range(self.n):
            e = [0] * self.n
            e[i] = 1
            out.append(ZnVector(tuple(e)))
            e[i] = -1
            out.append(ZnVector(tuple(e)))
        return tuple(out)

    def canonical_key(self, g: ZnVector):
        return g.coords

    def power(self, g: ZnVector, k: int):
        return ZnVector(tuple(k * x for x in g.coords))

    def parse(self, text: str) -> ZnVector:
        s = text.strip()
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        coords = tuple(int(p) for p in s.split(","))
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(coords)}")
        return ZnVector(coords)

    def format(self, g: ZnVector) -> str:
        return "(" + ",".join(str(x) for x in g.coords) + ")"


class AffineGroup(Group):
    """Affine maps x ↦ bx + a over Q, generated by x↦2x and x↦x+1."""

    name = "affine"

    def identity(self):
        return AffineElement(Fraction(1), Fraction(0))

    def generators(self):
        return (
            AffineElement(Fraction(2), Fraction(0)),
            AffineElement(Fraction(1, 2), Fraction(0)),
            AffineElement(Fraction(1), Fraction(1)),
            AffineElement(Fraction(1), Fraction(-1)),
        )

    def canonical_key(self, g: AffineElement):
        return (g.b, g.a)

    def power(self, g: AffineElement, k: int):
        if k == 0:
            return self.identity()
        if g.b == 1:
            return AffineElement(Fraction(1), k * g.a)
        # (b,a)^k has slope b^k and offset a(b^k − 1)/(b − 1)
        bk = g.b ** k
        return AffineElement(bk, g.a * (bk - 1) / (g.b - 1))

    def parse(self, text: str) -> AffineElement:
        m = re.fullmatch(r"\(\s*b\s*=\s*([^,]+)\s*,\s*a\s*=\s*([^)]+)\s*\)", text.strip())
        if not m:
            raise ValueError(f"bad affine element {text!r} (expected '(b=1/2, a=3)')")
        return AffineElement(Fraction(m.group(1).strip()), Fraction(m.group(2).strip()))

    def format(self, g: AffineElement) -> str:
        return f"(b={g.b}, a={g.a})"


class KleinGroup(Group):
    """<a, b | bab⁻¹ = a⁻¹> in the normal form bⁿaᵐ."""

    name = "klein"

    def identity(self):
        return KleinElement(0, 0)

    def generators(self):
        return (
            KleinElement(0, 1),
            KleinElement(0, -1),
            KleinElement(1, 0),
            KleinElement(-1, 0),
        )

    def canonical_key(self, g: KleinElement):
        return (g.n, g.m)

    def power(self, g: KleinElement, k: int):
        if g.n % 2 == 0:
            return KleinElement(k * g.n, k * g.m)
        return super().power(g, k)

    def parse(self, text: str) -> KleinElement:
        return klein_normal_form(text)

    def format(self, g: KleinElement) -> str:
        parts = []
        if g.n:
            parts.append("b" + (f"^{g.n}" if g.n != 1 else ""))
        if g.m:
            parts.append("a" + (f"^{g.m}" if g.m != 1 else ""))
        return " ".join(parts)


# ---------------------------------------------------------------------------
# shared word-parsing helper
# ---------------------------------------------------------------------------

def _parse_letter_word(text: str, names: set[str]) -> list[tuple[str, int]]:
    letters = []
    for tok in text.split():
        m = re.fullmatch(r"([a-z])(?:\^(-?\d+))?", tok)
        if not m or m.group(1) not in names:
            raise ValueError(f"bad letter {tok!r}; expected one of {sorted(names)}")
        e = int(m.group(2)) if m.group(2) else 1
        if e != 0:
            letters.append((m.group(1), e))
    return letters


def group_from_name(name: str) -> Group:
    """Construct a group instance from a compact name: b3, f2, z2, affine, klein."""
    s = name.strip().lower()
    if m := re.fullmatch(r"b(\d+)", s):
        return BraidGroup(int(m.group(1)))
    if m := re.fullmatch(r"f(\d+)", s):
        return FreeGroup(int(m.group(1)))
    if m := re.fullmatch(r"z(\d+)", s):
        return ZnGroup(int(m.group(1)))
    if s == "affine":
        return AffineGroup()
    if s == "klein":
        return KleinGroup()
    raise ValueError(f"unknown group name {name!r}")
