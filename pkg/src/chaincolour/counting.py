"""Validity checks and exact counts of (r, k)-colourings.

An (r, k)-colouring gives every member of a family one of ``r`` colours so
that no colour class contains a chain of ``k`` sets.  All public counts are
Python ints (arbitrary precision); numpy is used only on paths whose totals
are proven to fit in 64 bits.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapabilityError, UsageError
from .lattice import (
    SetFamily,
    connected_components,
    height,
    linear_extension,
    minimal_sets,
)

DEFAULT_BUDGET = 2**32
METHODS = ("auto", "bruteforce", "backtrack", "layered")
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Colouring:
    colours: tuple[int, ...]
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise UsageError(f"number of colours must be positive, got {self.r}")
        bad = [c for c in self.colours if not 0 <= c < self.r]
        if bad:
            raise UsageError(f"colour indices {bad} outside [0, {self.r})")

    def __len__(self):
        return len(self.colours)


def _colours(fam: SetFamily, c) -> tuple[int, ...]:
    cols = tuple(int(x) for x in (c.colours if isinstance(c, Colouring) else c))
    if len(cols) != len(fam):
        raise UsageError(f"colouring has {len(cols)} entries for a family of {len(fam)} sets")
    if any(x < 0 for x in cols):
        raise UsageError("colour indices must be non-negative")
    return cols


def _check_rk(r: int, k: int) -> None:
    if r < 1:
        raise UsageError(f"number of colours r must be >= 1, got {r}")
    if k < 2:
        raise UsageError(f"chain bound k must be >= 2, got {k}")


def _predecessors(fam: SetFamily, order: Sequence[int]) -> list[list[int]]:
    """For each position in ``order``, positions of its strict subsets."""
    pos = {i: p for p, i in enumerate(order)}
    out = []
    for i in order:
        d = fam.down_masks[i]
        ps = []
        while d:
            low = d & -d
            ps.append(pos[low.bit_length() - 1])
            d ^= low
        out.append(sorted(ps))
    return out


def _mono_chain_lengths(fam: SetFamily, cols: Sequence[int]) -> tuple[list[int], list[int]]:
    order = linear_extension(fam).order
    preds = _predecessors(fam, order)
    length = [0] * len(order)
    back = [-1] * len(order)
    for p, i in enumerate(order):
        for q in preds[p]:
            if cols[order[q]] == cols[i] and length[q] > length[p]:
                length[p], back[p] = length[q], q
        length[p] += 1
    return length, back


def is_valid(fam: SetFamily, colouring, k: int) -> bool:
    """True iff no colour class contains a k-chain."""
    if k < 2:
        raise UsageError(f"chain bound k must be >= 2, got {k}")
    cols = _colours(fam, colouring)
    length, _ = _mono_chain_lengths(fam, cols)
    return max(length, default=0) <= k - 1


def monochromatic_chain(fam: SetFamily, colouring, k: int) -> list[int] | None:
    """Masks of a monochromatic k-chain (bottom to top), or None if the colouring is valid."""
    cols = _colours(fam, colouring)
    order = linear_extension(fam).order
    length, back = _mono_chain_lengths(fam, cols)
    for p in range(len(order)):
        if length[p] >= k:
            chain = []
            q = p
            while q != -1 and len(chain) < k:
                chain.append(fam.members[order[q]])
                q = back[q]
            return chain[::-1]
    return None


# -- brute force ----------------------------------------------------------------

def _valid_mask_chunks(fam: SetFamily, r: int, k: int, budget: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(codes, ok)`` over all r^m assignments; digit i of a code is the colour of member i."""
    m = len(fam)
    total = r**m
    if total > budget:
        raise CapabilityError(f"brute force needs {r}^{m} = {total} assignments, budget is {budget}")
    if total > 2**62:
        raise CapabilityError("brute-force codes must fit in 63 bits")
    order = sorted(range(m), key=lambda i: (fam.sizes[i], fam.members[i]))
    downs = [[j for j in range(m) if fam.down_masks[i] >> j & 1] for i in range(m)]
    powers = [r**i for i in range(m)]
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        if r == 2:
            cols = [(codes >> i) & 1 for i in range(m)]
        else:
            cols = [(codes // powers[i]) % r for i in range(m)]
        ok = np.ones(codes.shape, dtype=bool)
        longest: list[np.ndarray | None] = [None] * m
        for i in order:
            best = np.zeros(codes.shape, dtype=np.int16)
            for j in downs[i]:
                np.maximum(best, np.where(cols[j] == cols[i], longest[j], 0), out=best)
            longest[i] = best + 1
            ok &= longest[i] <= k - 1
        yield codes, ok


def count_bruteforce(fam: SetFamily, r: int, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Enumerate every r-colouring and count the valid ones.  The oracle for every other counter."""
    _check_rk(r, k)
    return sum(int(ok.sum()) for _, ok in _valid_mask_chunks(fam, r, k, budget))


def valid_colourings(fam: SetFamily, k: int, budget: int = 2**24) -> np.ndarray:
    """All valid 2-colourings as int64 codes (bit i = colour of member i)."""
    _check_rk(2, k)
    if len(fam) > 62:
        raise CapabilityError("explicit 2-colouring lists need at most 62 members")
    parts = [codes[ok] for codes, ok in _valid_mask_chunks(fam, 2, k, budget)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


# -- backtracking ----------------------------------------------------------------

@dataclass(frozen=True)
class _Component:
    preds: tuple[tuple[int, ...], ...]
    tail: int  # first position of the maximal-element suffix


def _component(fam: SetFamily, comp: list[int], order: Sequence[int]) -> _Component:
    members = set(comp)
    sub_order = [i for i in order if i in members]
    preds = _predecessors(fam, sub_order)
    tail = len(sub_order)
    while tail > 0 and fam.up_masks[sub_order[tail - 1]] == 0:
        tail -= 1
    return _Component(tuple(tuple(p) for p in preds), tail)


def _dfs(comp: _Component, r: int, k: int, cols: list[int], lengths: list[int], start: int) -> int:
    preds, tail, m = comp.preds, comp.tail, len(comp.preds)
    cap = k - 1

    def allowed(p: int) -> list[int]:
        best = [0] * r
        for q in preds[p]:
            if lengths[q] > best[cols[q]]:
                best[cols[q]] = lengths[q]
        return best

    def rec(p: int) -> int:
        if p == tail:
            prod = 1
            for q in range(tail, m):
                if cap == 1:
                    # any same-coloured predecessor already forms a 2-chain
                    seen = 0
                    for s in preds[q]:
                        seen |= 1 << cols[s]
                    free = r - seen.bit_count()
                else:
                    free = sum(1 for b in allowed(q) if b < cap)
                if free == 0:
                    return 0
                prod *= free
            return prod
        total = 0
        best = allowed(p)
        for c in range(r):
            if best[c] < cap:
                cols[p] = c
                lengths[p] = best[c] + 1
                total += rec(p + 1)
        return total

    return rec(start)


def _prefixes(comp: _Component, r: int, k: int, first: int, want: int):
    """Valid partial assignments of positions ``first..d-1`` for the smallest d giving >= want branches."""
    m = len(comp.preds)
    frontier = [([0] * m, [0] * m)]
    depth = first
    while len(frontier) < want and depth < comp.tail:
        nxt = []
        for cols, lengths in frontier:
            best = [0] * r
            for q in comp.preds[depth]:
                best[cols[q]] = max(best[cols[q]], lengths[q])
            for c in range(r):
                if best[c] < k - 1:
                    c2, l2 = cols[:], lengths[:]
                    c2[depth], l2[depth] = c, best[c] + 1
                    nxt.append((c2, l2))
        frontier = nxt
        depth += 1
    return frontier, depth


def _run_prefix(args) -> int:
    comp, r, k, cols, lengths, depth = args
    return _dfs(comp, r, k, cols, lengths, depth)


def _count_component(comp: _Component, r: int, k: int, symmetry: bool, workers: int) -> int:
    m = len(comp.preds)
    if m == 1:
        return r
    cols, lengths = [0] * m, [0] * m
    factor, start = 1, 0
    if symmetry and comp.tail > 0:
        # validity is invariant under permuting colours, so pin the first colour
        cols[0], lengths[0] = 0, 1
        factor, start = r, 1
    if workers <= 1:
        return factor * _dfs(comp, r, k, cols, lengths, start)
    frontier, depth = _prefixes(comp, r, k, start, 4 * workers)
    if start == 1:
        for c, l in frontier:
            c[0], l[0] = 0, 1
    jobs = [(comp, r, k, c, l, depth) for c, l in frontier]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return factor * sum(pool.map(_run_prefix, jobs))


def count_backtrack(fam: SetFamily, r: int, k: int, symmetry: bool = True, workers: int = 1) -> int:
    """Depth-first count over a linear extension, factorised over comparability components."""
    _check_rk(r, k)
    order = linear_extension(fam).order
    total = 1
    for comp in connected_components(fam):
        total *= _count_component(_component(fam, comp, order), r, k, symmetry, workers)
        if total == 0:
            return 0
    return total


# -- two-layer counting ----------------------------------------------------------

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def layered_applicable(fam: SetFamily, k: int) -> bool:
    return k == 2 and height(fam) <= 2


def _layered_component(fam: SetFamily, comp: list[int], r: int) -> int:
    if len(comp) == 1:
        return r
    upper = [i for i in comp if fam.up_masks[i] == 0]
    lower = [i for i in comp if fam.up_masks[i] != 0]
    # enumerate the upper layer (ties) or the smaller side
    free, bound = (upper, lower) if len(upper) <= len(lower) else (lower, upper)
    col_of = {i: c for c, i in enumerate(free)}
    nbrs = [[col_of[j] for j in free if (fam.up_masks[i] | fam.down_masks[i]) >> j & 1] for i in bound]
    exact64 = r ** len(comp) < 2**62
    total = 0
    n_free = len(free)
    size = r**n_free
    powers = np.array([r**i for i in range(n_free)], dtype=np.int64)
    for lo in range(0, size, _CHUNK):
        codes = np.arange(lo, min(size, lo + _CHUNK), dtype=np.int64)
        cols = (codes[:, None] // powers[None, :]) % r
        onehot = np.left_shift(np.int64(1), cols)
        factors = np.empty((codes.size, len(bound)), dtype=np.int64)
        for b, nb in enumerate(nbrs):
            seen = np.bitwise_or.reduce(onehot[:, nb], axis=1) if nb else np.zeros(codes.size, np.int64)
            factors[:, b] = r - _POPCOUNT8[seen]
        if exact64:
            total += int(np.prod(factors, axis=1).sum())
        else:
            total += int(np.prod(factors.astype(object), axis=1).sum())
    return total


def count_layered(fam: SetFamily, r: int, k: int = 2) -> int:
    """k = 2 counter for families of height <= 2: enumerate one layer, multiply the other's choices."""
    _check_rk(r, k)
    if not layered_applicable(fam, k):
        raise CapabilityError("layered counting needs k = 2 and a family of height at most 2")
    if r > 8:
        raise CapabilityError("layered counting supports at most 8 colours")
    total = 1
    for comp in connected_components(fam):
        total *= _layered_component(fam, comp, r)
        if total == 0:
            return 0
    return total


# -- dispatch --------------------------------------------------------------------

def auto_method(fam: SetFamily, r: int, k: int) -> str:
    h = height(fam)
    if h <= 1:
        return "antichain"
    if h <= k - 1:
        return "chain-free"
    if h > r * (k - 1):
        return "chain-bound"
    if layered_applicable(fam, k) and r <= 8:
        return "layered"
    return "backtrack"


def count(fam: SetFamily, r: int, k: int, method: str = "auto", *, symmetry: bool = True,
          workers: int = 1, strict: bool = False, budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of (r, k)-colourings of ``fam``.

    ``auto`` short-circuits chain-free families (every assignment is valid)
    and families with a chain longer than r(k-1) (pigeonhole forces a
    monochromatic k-chain), then picks ``layered`` or ``backtrack``.  An
    explicitly requested method that does not fit the family falls back to
    backtracking unless ``strict`` is set.
    """
    _check_rk(r, k)
    if method not in METHODS:
        raise UsageError(f"unknown counting method {method!r}; expected one of {METHODS}")
    if method == "auto":
        method = auto_method(fam, r, k)
        if method in ("antichain", "chain-free"):
            return r ** len(fam)
        if method == "chain-bound":
            return 0
    if method == "bruteforce":
        return count_bruteforce(fam, r, k, budget)
    if method == "layered":
        if layered_applicable(fam, k) and r <= 8:
            return count_layered(fam, r, k)
        if strict:
            raise CapabilityError("layered method is inapplicable to this family")
    return count_backtrack(fam, r, k, symmetry=symmetry, workers=workers)


def minimal_set_bound(fam: SetFamily) -> int:
    """2^|minimal sets|: every (2,2)-colouring is fixed by its restriction to the minimal sets."""
    return 2 ** len(minimal_sets(fam))


def log2_count(value: int) -> float:
    return math.log2(value) if value > 0 else float("-inf")
