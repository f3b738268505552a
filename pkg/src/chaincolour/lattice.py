"""Subsets of [n] as bitmasks, set families, and their comparability structure.

A subset of the ground set ``[n] = {1, ..., n}`` is an integer whose bit
``i - 1`` is set when element ``i`` belongs to it.  Families are ordered
tuples of distinct masks; all comparability queries are answered from
per-member bitmasks over family *indices*, so degree counts reduce to
``int.bit_count``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapabilityError, UsageError

MAX_N = 16
MAX_CANONICAL_N = 8
MAX_ALL_FAMILIES_N = 4


def elements_of(mask: int) -> list[int]:
    """Sorted 1-based elements of a subset mask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(elements: Iterable[int], n: int) -> int:
    mask = 0
    for e in elements:
        if not isinstance(e, (int, np.integer)) or isinstance(e, bool):
            raise UsageError(f"set elements must be integers, got {e!r}")
        if not 1 <= e <= n:
            raise UsageError(f"element {e} outside [1..{n}]")
        bit = 1 << (int(e) - 1)
        if mask & bit:
            raise UsageError(f"element {e} repeated inside one set")
        mask |= bit
    return mask


def is_proper_subset(a: int, b: int) -> bool:
    return a != b and a & b == a


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise UsageError(f"ground size n must lie in [1, {MAX_N}], got {n!r}")


@dataclass(frozen=True)
class Subset:
    """A subset of [n] carrying its ground size."""

    bits: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise UsageError(f"mask {self.bits:#x} has bits at positions >= n={self.n}")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> "Subset":
        return cls(mask_of(elements, n), n)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def elements(self) -> list[int]:
        return elements_of(self.bits)

    def __repr__(self):
        return f"Subset({{{', '.join(map(str, self.elements()))}}}, n={self.n})"


def _bits(x, n: int) -> int:
    if isinstance(x, Subset):
        if x.n != n:
            raise UsageError(f"ground size mismatch: subset over n={x.n}, expected n={n}")
        return x.bits
    x = int(x)
    if x < 0 or x >> n:
        raise UsageError(f"mask {x:#x} is not a subset of [{n}]")
    return x


def comparable(a: Subset, b: Subset) -> bool:
    """True iff one set strictly contains the other."""
    if not (isinstance(a, Subset) and isinstance(b, Subset)):
        raise UsageError("comparable expects two Subset values")
    if a.n != b.n:
        raise UsageError(f"ground size mismatch: {a.n} vs {b.n}")
    return is_proper_subset(a.bits, b.bits) or is_proper_subset(b.bits, a.bits)


def _rows_to_masks(matrix: np.ndarray) -> list[int]:
    """Convert each boolean row into an int whose bit j is ``row[j]``."""
    if matrix.shape[1] == 0:
        return [0] * matrix.shape[0]
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


class SetFamily:
    """An ordered family of distinct subsets of [n].

    Immutable after construction.  ``membership`` is the 2^n-bit
    characteristic mask (bit ``s`` set iff subset ``s`` is a member).
    """

    def __init__(self, n: int, members: Iterable[int] = ()):
        _check_n(n)
        self.n = int(n)
        ms = tuple(int(m) for m in members)
        index = {}
        for i, m in enumerate(ms):
            if m < 0 or m >> self.n:
                raise UsageError(f"mask {m:#x} is not a subset of [{self.n}]")
            if m in index:
                raise UsageError(f"duplicate set {elements_of(m)} in family")
            index[m] = i
        self.members = ms
        self._index = index

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, [mask_of(s, n) for s in sets])

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __getitem__(self, i: int) -> int:
        return self.members[i]

    def __contains__(self, mask) -> bool:
        if isinstance(mask, Subset):
            return mask.n == self.n and mask.bits in self._index
        return int(mask) in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, SetFamily) and self.n == other.n and self.members == other.members

    def __hash__(self) -> int:
        return hash((self.n, self.members))

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, elements_of(m))) + "}" for m in self.members[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"SetFamily(n={self.n}, [{body}{more}], size={len(self)})"

    def index(self, mask: int) -> int:
        return self._index[int(mask)]

    def subset(self, i: int) -> Subset:
        return Subset(self.members[i], self.n)

    def sets(self) -> list[list[int]]:
        return [elements_of(m) for m in self.members]

    def same_sets(self, other: "SetFamily") -> bool:
        return self.n == other.n and set(self.members) == set(other.members)

    @cached_property
    def membership(self) -> int:
        out = 0
        for m in self.members:
            out |= 1 << m
        return out

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(m.bit_count() for m in self.members)

    @cached_property
    def _comparability(self) -> tuple[list[int], list[int]]:
        m = len(self.members)
        if m == 0:
            return [], []
        arr = np.asarray(self.members, dtype=np.int64)
        ups: list[int] = []
        downs: list[int] = []
        step = max(1, min(m, 2_000_000 // max(m, 1)))
        for lo in range(0, m, step):
            rows = arr[lo:lo + step, None]
            inter = rows & arr[None, :]
            # row i, column j: members[j] strictly contains members[i]
            sup = (inter == rows) & (rows != arr[None, :])
            sub = (inter == arr[None, :]) & (rows != arr[None, :])
            ups.extend(_rows_to_masks(sup))
            downs.extend(_rows_to_masks(sub))
        return ups, downs

    @property
    def up_masks(self) -> list[int]:
        """Per index, a bitmask over indices of members strictly containing it."""
        return self._comparability[0]

    @property
    def down_masks(self) -> list[int]:
        return self._comparability[1]

    def subfamily(self, indices: Iterable[int]) -> "SetFamily":
        return SetFamily(self.n, [self.members[i] for i in indices])

    def with_members(self, extra: Iterable[int]) -> "SetFamily":
        return SetFamily(self.n, list(self.members) + [int(x) for x in extra])

    def without(self, mask: int) -> "SetFamily":
        return SetFamily(self.n, [m for m in self.members if m != mask])

    def permuted(self, perm: Sequence[int]) -> "SetFamily":
        """Relabel ground elements: element ``i+1`` goes to ``perm[i]+1``."""
        table = _image_table(self.n, tuple(perm))
        return SetFamily(self.n, [table[m] for m in self.members])

    def complemented(self) -> "SetFamily":
        full = (1 << self.n) - 1
        return SetFamily(self.n, [full ^ m for m in self.members])


def _image_table(n: int, perm: tuple[int, ...]) -> list[int]:
    if sorted(perm) != list(range(n)):
        raise UsageError(f"{perm} is not a permutation of range({n})")
    table = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        table[s] = table[s ^ low] | (1 << perm[low.bit_length() - 1])
    return table


# -- comparability queries ----------------------------------------------------

def degrees(F, fam: SetFamily) -> tuple[int, int]:
    """(up-degree, down-degree) of ``F`` in ``fam``; ``F`` itself is never counted."""
    f = _bits(F, fam.n)
    up = down = 0
    for g in fam.members:
        if g != f and g & f == f:
            up += 1
        elif g != f and g & f == g:
            down += 1
    return up, down


def comparable_pair_count(fam: SetFamily) -> int:
    return sum(u.bit_count() for u in fam.up_masks)


def _size_order(fam: SetFamily) -> list[int]:
    return sorted(range(len(fam)), key=lambda i: (fam.sizes[i], fam.members[i]))


def height(fam: SetFamily) -> int:
    """Number of sets in a longest chain; longest-path DP over a size-sorted linear extension."""
    if len(fam) == 0:
        return 0
    down = fam.down_masks
    longest = [0] * len(fam)
    for i in _size_order(fam):
        best = 0
        d = down[i]
        while d:
            low = d & -d
            j = low.bit_length() - 1
            if longest[j] > best:
                best = longest[j]
            d ^= low
        longest[i] = best + 1
    return max(longest)


def mirsky_index(fam: SetFamily) -> list[int]:
    """1-based peeling round in which each member is maximal.

    Equals the number of sets in a longest chain starting at the member and
    going up, which is what iterated removal of maximal elements produces.
    """
    up = fam.up_masks
    part = [0] * len(fam)
    for i in reversed(_size_order(fam)):
        best = 0
        u = up[i]
        while u:
            low = u & -u
            j = low.bit_length() - 1
            if part[j] > best:
                best = part[j]
            u ^= low
        part[i] = best + 1
    return part


@dataclass(frozen=True)
class AntichainDecomposition:
    parts: tuple[tuple[int, ...], ...]

    @property
    def height(self) -> int:
        return sum(1 for p in self.parts if p)


def mirsky_decompose(fam: SetFamily) -> AntichainDecomposition:
    """Peel maximal elements; part ``i`` (0-based here) holds the round-``i+1`` maxima."""
    idx = mirsky_index(fam)
    h = max(idx, default=0)
    parts: list[list[int]] = [[] for _ in range(h)]
    for i, p in enumerate(idx):
        parts[p - 1].append(i)
    return AntichainDecomposition(tuple(tuple(p) for p in parts))


@dataclass(frozen=True)
class LinearExtension:
    order: tuple[int, ...]

    def position(self) -> list[int]:
        pos = [0] * len(self.order)
        for p, i in enumerate(self.order):
            pos[i] = p
        return pos


def linear_extension(fam: SetFamily) -> LinearExtension:
    """Containment-compatible order: Mirsky part descending, then size, then mask value."""
    idx = mirsky_index(fam)
    order = sorted(range(len(fam)), key=lambda i: (-idx[i], fam.sizes[i], fam.members[i]))
    return LinearExtension(tuple(order))


def is_antichain(fam: SetFamily, indices: Iterable[int] | None = None) -> bool:
    if indices is None:
        return all(u == 0 for u in fam.up_masks)
    sel = 0
    idx = list(indices)
    for i in idx:
        sel |= 1 << i
    return all(fam.up_masks[i] & sel == 0 for i in idx)


def minimal_sets(fam: SetFamily) -> SetFamily:
    return SetFamily(fam.n, [m for m, d in zip(fam.members, fam.down_masks) if d == 0])


def longest_chain(fam: SetFamily) -> list[int]:
    """Masks of one longest chain, bottom to top."""
    if len(fam) == 0:
        return []
    down = fam.down_masks
    longest = [0] * len(fam)
    prev = [-1] * len(fam)
    for i in _size_order(fam):
        d = down[i]
        while d:
            low = d & -d
            j = low.bit_length() - 1
            if longest[j] > longest[i]:
                longest[i], prev[i] = longest[j], j
            d ^= low
        longest[i] += 1
    i = max(range(len(fam)), key=lambda t: longest[t])
    chain = []
    while i != -1:
        chain.append(fam.members[i])
        i = prev[i]
    return chain[::-1]


def connected_components(fam: SetFamily) -> list[list[int]]:
    """Components of the comparability graph, each sorted, listed by smallest index."""
    adj = [u | d for u, d in zip(fam.up_masks, fam.down_masks)]
    seen = 0
    comps = []
    for start in range(len(fam)):
        if seen >> start & 1:
            continue
        comp = 1 << start
        frontier = comp
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            nb = adj[low.bit_length() - 1] & ~comp
            comp |= nb
            frontier |= nb
        seen |= comp
        comps.append([i for i in range(len(fam)) if comp >> i & 1])
    return comps


# -- canonical forms -------------------------------------------------------------

@lru_cache(maxsize=None)
def _perm_images(n: int) -> np.ndarray:
    perms = list(itertools.permutations(range(n)))
    out = np.empty((len(perms), 1 << n), dtype=np.int16)
    for row, p in enumerate(perms):
        out[row] = _image_table(n, p)
    return out


def canonical_form(fam: SetFamily) -> int:
    """Least characteristic mask over all relabelings of the ground set."""
    if fam.n > MAX_CANONICAL_N:
        raise CapabilityError(f"canonical_form enumerates n! permutations; n={fam.n} > {MAX_CANONICAL_N}")
    if len(fam) == 0:
        return 0
    images = _perm_images(fam.n)[:, np.asarray(fam.members, dtype=np.int64)]
    # integer order of sum(2**x) equals lexicographic order of the descending-sorted rows
    desc = np.sort(images, axis=1)[:, ::-1]
    best = np.lexsort(desc.T[::-1])[0]
    out = 0
    for s in images[best]:
        out |= 1 << int(s)
    return out


def family_from_membership(n: int, membership: int) -> SetFamily:
    return SetFamily(n, [s for s in range(1 << n) if membership >> s & 1])


def all_canonical_forms(n: int) -> np.ndarray:
    """Canonical mask of every one of the 2^(2^n) families over [n] (n <= 4), vectorised."""
    if n > MAX_ALL_FAMILIES_N:
        raise CapabilityError(f"full family enumeration is capped at n <= {MAX_ALL_FAMILIES_N}")
    width = 1 << n
    masks = np.arange(1 << width, dtype=np.uint64)
    best = masks.copy()
    for img in _perm_images(n):
        out = np.zeros_like(masks)
        for s in range(width):
            out |= ((masks >> np.uint64(s)) & np.uint64(1)) << np.uint64(int(img[s]))
        np.minimum(best, out, out=best)
    return best


# -- level arithmetic --------------------------------------------------------------

def middle_level_range(n: int, j: int) -> range:
    """Sizes of the ``j`` largest levels; ties go to the lower block."""
    if not 1 <= j <= n + 1:
        raise UsageError(f"number of levels j must lie in [1, {n + 1}], got {j}")
    lo = (n - j + 1) // 2
    return range(lo, lo + j)


def m_levels(n: int, k: int) -> int:
    """Total size of the k-1 largest levels of 2^[n]."""
    if not 2 <= k <= n + 1:
        raise UsageError(f"chain bound k must lie in [2, {n + 1}], got {k}")
    return sum(math.comb(n, i) for i in range((n - k + 2) // 2, (n + k - 2) // 2 + 1))


def full_lattice(n: int) -> SetFamily:
    _check_n(n)
    return SetFamily(n, sorted(range(1 << n), key=lambda s: (s.bit_count(), s)))


def level(n: int, j: int) -> SetFamily:
    _check_n(n)
    if not 0 <= j <= n:
        raise UsageError(f"level {j} outside [0, {n}]")
    return SetFamily(n, [s for s in range(1 << n) if s.bit_count() == j])


def levels(n: int, sizes: Iterable[int]) -> SetFamily:
    _check_n(n)
    wanted = set(sizes)
    if any(not 0 <= j <= n for j in wanted):
        raise UsageError(f"levels {sorted(wanted)} outside [0, {n}]")
    return SetFamily(n, sorted((s for s in range(1 << n) if s.bit_count() in wanted),
                               key=lambda s: (s.bit_count(), s)))


def random_family(n: int, p: float, seed: int) -> SetFamily:
    """Each subset kept independently with probability ``p`` (numpy PCG64 stream from ``seed``)."""
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"inclusion probability must lie in [0, 1], got {p}")
    rng = np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))
    keep = rng.random(1 << n) < p
    return SetFamily(n, sorted((int(s) for s in np.flatnonzero(keep)), key=lambda s: (s.bit_count(), s)))
