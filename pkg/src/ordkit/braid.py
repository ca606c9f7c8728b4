"""Decision procedures for braid groups.

The workhorse is handle reduction: a subword of the form
σᵢ^e v σᵢ^{-e} whose interior v only uses generators of index > i is a
*handle*; rewriting it away (replacing each σ_{i+1}^{±1} in v by
σ_{i+1}^{-e} σᵢ^{±1} σ_{i+1}^{e} and dropping the bracketing letters)
yields an equal braid word.  Iterating until no handle remains leaves a
word that is empty, or in which the lowest occurring generator index
appears with only one sign.  That trichotomy decides the word problem
and evaluates the Dehornoy ordering.

We always reduce the handle whose closing letter is leftmost; such a
handle can contain no nested handle, and the traversal is deterministic.
A step cap guards against pathological growth (never observed at desk
scale); configure it via ORDKIT_STEP_CAP.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import OrdkitError, ResourceLimitError
from .groups import BraidWord
from .groups import invert as group_invert

DEFAULT_STEP_CAP = 10**6

_REDUCE_CACHE: dict[tuple[int, ...], tuple[int, ...]] = {}
_REDUCE_CACHE_MAX = 1 << 18


def step_cap() -> int:
    env = os.environ.get("ORDKIT_STEP_CAP")
    return int(env) if env else DEFAULT_STEP_CAP


# ---------------------------------------------------------------------------
# reduction core (letters are signed ints; +i = σᵢ, -i = σᵢ⁻¹)
# ---------------------------------------------------------------------------

def _free_reduce(letters) -> list[int]:
    out: list[int] = []
    push = out.append
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            push(x)
    return out


def _find_handle(w: list[int]):
    """Span (p, q) of the handle with the leftmost closing letter, or None."""
    n = len(w)
    for q in range(1, n):
        xq = w[q]
        iq = xq if xq > 0 else -xq
        p = q - 1
        while p >= 0:
            xp = w[p]
            ip = xp if xp > 0 else -xp
            if ip < iq:
                break
            if ip == iq:
                if xp == -xq:
                    return p, q
                break
            p -= 1
    return None


def reduce_letters(letters: tuple[int, ...], cap: int | None = None) -> tuple[int, ...]:
    """Fully handle-reduce a letter sequence."""
    cached = _REDUCE_CACHE.get(letters)
    if cached is not None:
        return cached
    limit = cap if cap is not None else step_cap()
    w = _free_reduce(letters)
    steps = 0
    while True:
        h = _find_handle(w)
        if h is None:
            break
        steps += 1
        if steps > limit:
            raise ResourceLimitError(
                f"handle reduction exceeded step cap {limit} "
                f"(word length {len(letters)})"
            )
        p, q = h
        first = w[p]
        i = first if first > 0 else -first
        e = 1 if first > 0 else -1
        j = i + 1
        mid: list[int] = []
        for x in w[p + 1:q]:
            if x == j:
                mid.extend((-e * j, i, e * j))
            elif x == -j:
                mid.extend((-e * j, -i, e * j))
            else:
                mid.append(x)
        w = _free_reduce(w[:p] + mid + w[q + 1:])
    result = tuple(w)
    if len(_REDUCE_CACHE) >= _REDUCE_CACHE_MAX:
        _REDUCE_CACHE.clear()
    _REDUCE_CACHE[letters] = result
    return result


def handle_reduce(w: BraidWord, cap: int | None = None) -> BraidWord:
    """Handle-free word equal to w in B_n."""
    return BraidWord(w.strands, reduce_letters(w.letters, cap))


# ---------------------------------------------------------------------------
# signs and equality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DehornoySign:
    """sign ∈ {+1, -1, 0}; witness_index is the i with the reduced word
    σᵢ-positive/negative, None for the identity."""

    sign: int
    witness_index: int | None


def dehornoy_sign(w: BraidWord, cap: int | None = None) -> DehornoySign:
    reduced = reduce_letters(w.letters, cap)
    if not reduced:
        return DehornoySign(0, None)
    i = min(abs(x) for x in reduced)
    occ = [x for x in reduced if abs(x) == i]
    # handle-freeness forces a single sign at the lowest index
    assert all(x > 0 for x in occ) or all(x < 0 for x in occ)
    return DehornoySign(1 if occ[0] > 0 else -1, i)


def permutation_image(w: BraidWord) -> tuple[int, ...]:
    """Underlying permutation (σᵢ ↦ transposition i, i+1); a cheap invariant."""
    perm = list(range(w.strands))
    for x in w.letters:
        i = abs(x) - 1
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    return tuple(perm)


def braid_equal(w1: BraidWord, w2: BraidWord, cap: int | None = None) -> bool:
    """Word-problem solution: w1 and w2 represent the same element of B_n."""
    if w1.strands != w2.strands:
        raise OrdkitError(
            f"strand counts differ: {w1.strands} vs {w2.strands}"
        )
    if w1.letters == w2.letters:
        return True
    if permutation_image(w1) != permutation_image(w2):
        return False
    prod = w1.letters + tuple(-x for x in reversed(w2.letters))
    return not reduce_letters(prod, cap)


def parabolic_membership(w: BraidWord, j: int, cap: int | None = None):
    """Membership of w in <σ_j, ..., σ_{n-1}>.

    Returns (member, rewriting): on success the rewriting is an equal word
    using only generators of index ≥ j.  An element lies in the parabolic
    subgroup exactly when it is neither σᵢ-positive nor σᵢ-negative for any
    i < j; the handle-reduced word shows this directly.
    """
    if not 1 <= j <= w.strands - 1:
        raise ValueError(f"j must be in 1..{w.strands - 1}")
    reduced = reduce_letters(w.letters, cap)
    if any(abs(x) < j for x in reduced):
        return False, None
    return True, BraidWord(w.strands, reduced)


def shift_word(w: BraidWord, offset: int, strands: int) -> BraidWord:
    """Reindex σᵢ ↦ σ_{i+offset} into B_strands."""
    letters = tuple((abs(x) + offset) * (1 if x > 0 else -1) for x in w.letters)
    return BraidWord(strands, letters)


# ---------------------------------------------------------------------------
# the finitely generated positive cone
# ---------------------------------------------------------------------------

def dd_sign(w: BraidWord, cap: int | None = None) -> int:
    """Sign of w in the Dubrovina-Dubrovin ordering of B_n (+1, -1, 0).

    The ordering extends the reverse of the one on the parabolic copy of
    B_{n-1} by the Dehornoy ordering; unrolled, the Dehornoy sign gets
    flipped once per recursion level, i.e. exactly when the witness index
    has even position (witness_index - 1 odd).
    """
    ds = dehornoy_sign(w, cap)
    if ds.sign == 0:
        return 0
    flip = (ds.witness_index - 1) % 2
    return -ds.sign if flip else ds.sign


@dataclass(frozen=True)
class ConeSpec:
    """Generators u₁, ..., u_{n-1} of the finitely generated positive cone,
    with uᵢ = vᵢ^{(-1)^{i-1}} and vᵢ = σᵢ σ_{i+1} ⋯ σ_{n-1}."""

    strands: int
    vs: tuple[BraidWord, ...]
    generators: tuple[BraidWord, ...]


def cone_generators(n: int) -> ConeSpec:
    vs = []
    us = []
    for i in range(1, n):
        v = BraidWord(n, tuple(range(i, n)))
        vs.append(v)
        us.append(v if i % 2 == 1 else group_invert(v))
    return ConeSpec(n, tuple(vs), tuple(us))


def u_word_to_braid(u_word, n: int = 3) -> BraidWord:
    """Spell a word over the cone generators as a braid word."""
    spec = cone_generators(n)
    out = BraidWord(n)
    for idx in u_word:
        out = BraidWord(n, out.letters + spec.generators[idx - 1].letters)
    return out


def dd_cone_rewrite(w: BraidWord, cap: int | None = None) -> tuple[int, ...]:
    """Express a positive element of the B₃ cone as a positive word in
    u₁ = σ₁σ₂ and u₂ = σ₂⁻¹ (returned as a tuple of indices 1/2).

    Three stages: pure σ₂-powers map to u₂-powers; otherwise the reduced
    σ₁-positive word is rewritten with σ₁ = u₁u₂, σ₂ = u₂⁻¹; finally
    negative u₂-letters are removed with u₂⁻¹u₁ = u₁²u₂ and u₁u₂⁻¹ = u₂u₁²
    (both restatements of u₂u₁²u₂ = u₁).
    """
    if w.strands != 3:
        raise OrdkitError("cone rewriting is implemented for B_3 only")
    if dd_sign(w, cap) != 1:
        raise OrdkitError("dd_cone_rewrite requires a positive element")
    reduced = reduce_letters(w.letters, cap)
    lowest = min(abs(x) for x in reduced)
    if lowest == 2:
        # σ₂^m with m < 0 (positivity): u₂^{-m}
        m = sum(1 if x > 0 else -1 for x in reduced)
        return (2,) * (-m)
    # σ₁-positive: substitute letters
    tokens: list[int] = []  # +1=u₁, +2=u₂, -2=u₂⁻¹
    for x in reduced:
        if x == 1:
            tokens.extend((1, 2))
        elif x == 2:
            tokens.append(-2)
        elif x == -2:
            tokens.append(2)
        else:  # x == -1 cannot occur in a σ₁-positive reduced word
            raise AssertionError("σ₁⁻¹ in a σ₁-positive reduced word")
    limit = cap if cap is not None else step_cap()
    steps = 0
    while True:
        changed = False
        k = 0
        while k + 1 < len(tokens):
            a, b = tokens[k], tokens[k + 1]
            if (a == 2 and b == -2) or (a == -2 and b == 2):
                del tokens[k:k + 2]
                changed = True
                k = max(k - 1, 0)
            elif a == -2 and b == 1:
                tokens[k:k + 2] = [1, 1, 2]
                changed = True
            elif a == 1 and b == -2:
                tokens[k:k + 2] = [2, 1, 1]
                changed = True
                k = max(k - 1, 0)
            else:
                k += 1
        if not changed:
            break
        steps += 1
        if steps > limit:
            raise ResourceLimitError("cone rewriting exceeded the step cap")
    if any(t < 0 for t in tokens):
        raise AssertionError("negative letters survived cone rewriting")
    result = tuple(tokens)
    if not braid_equal(u_word_to_braid(result, 3), w, cap):
        raise AssertionError("cone rewriting produced an unequal word")
    return result


# ---------------------------------------------------------------------------
# reduced Burau matrices over Z[t, t^-1]: sound bucket keys for indexing
# ---------------------------------------------------------------------------

def _poly_mul(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for dp, cp in p.items():
        for dq, cq in q.items():
            d = dp + dq
            c = out.get(d, 0) + cp * cq
            if c:
                out[d] = c
            elif d in out:
                del out[d]
    return out


def _poly_add(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    out = dict(p)
    for d, c in q.items():
        s = out.get(d, 0) + c
        if s:
            out[d] = s
        elif d in out:
            del out[d]
    return out


def _mat_mul(A, B, size):
    return tuple(
        tuple(
            _reduce_sum([_poly_mul(A[i][k], B[k][j]) for k in range(size)])
            for j in range(size)
        )
        for i in range(size)
    )


def _reduce_sum(polys):
    out: dict[int, int] = {}
    for p in polys:
        out = _poly_add(out, p)
    return out


def _burau_generator(n: int, letter: int):
    """Reduced Burau image of σᵢ^{±1} as an (n-1)×(n-1) matrix of Laurent
    polynomials (dicts degree→coefficient)."""
    size = n - 1
    k = abs(letter) - 1
    rows = [[{0: 1} if i == j else {} for j in range(size)] for i in range(size)]
    if letter > 0:
        rows[k][k] = {1: -1}
        if k >= 1:
            rows[k][k - 1] = {1: 1}
        if k <= size - 2:
            rows[k][k + 1] = {0: 1}
    else:
        rows[k][k] = {-1: -1}
        if k >= 1:
            rows[k][k - 1] = {0: 1}
        if k <= size - 2:
            rows[k][k + 1] = {-1: 1}
    return tuple(tuple(r) for r in rows)


_BURAU_GENS: dict[tuple[int, int], tuple] = {}


def burau_key(w: BraidWord):
    """Frozen reduced-Burau matrix of w: a sound (homomorphic) bucket key."""
    size = w.strands - 1
    mat = tuple(
        tuple({0: 1} if i == j else {} for j in range(size)) for i in range(size)
    )
    for x in w.letters:
        gen = _BURAU_GENS.get((w.strands, x))
        if gen is None:
            gen = _burau_generator(w.strands, x)
            _BURAU_GENS[(w.strands, x)] = gen
        mat = _mat_mul(mat, gen, size)
    return tuple(
        tuple(tuple(sorted(entry.items())) for entry in row) for row in mat
    )
