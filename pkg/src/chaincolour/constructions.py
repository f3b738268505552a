"""Explicit families and colourings with many chain-free colourings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapabilityError, UsageError
from .lattice import SetFamily, _check_n, level, levels, middle_level_range

# the three ways to split four colours into two pairs
FOUR_COLOUR_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def middle_levels(n: int, j: int, upper: bool = False) -> SetFamily:
    """Union of the ``j`` largest levels of 2^[n].

    When two blocks tie (n - j even) the lower block is returned, or its
    complement-image when ``upper`` is set.
    """
    _check_n(n)
    sizes = middle_level_range(n, j)
    if upper:
        sizes = range(n - sizes[-1], n - sizes[0] + 1)
    return levels(n, sizes)


def _two_middle_levels(n: int) -> tuple[SetFamily, int, int]:
    _check_n(n)
    if n % 2 == 0:
        raise UsageError(f"the paired construction needs odd n, got {n}")
    m = n // 2
    return levels(n, (m, m + 1)), len(level(n, m)), len(level(n, m + 1))


def paired_four_colouring_family(n: int) -> SetFamily:
    """Levels floor(n/2) and ceil(n/2) of an odd-n lattice, lower level first."""
    return _two_middle_levels(n)[0]


def paired_four_colourings(n: int) -> Iterator[tuple[int, ...]]:
    """Every colouring of the paired construction, once per (pairing, orientation).

    The lower level uses only the two colours of one pair and the upper level
    only the other pair, so no comparable pair can be monochromatic.  The
    same colouring can be produced by several pairings.
    """
    _, lo, hi = _two_middle_levels(n)
    for pair_a, pair_b in FOUR_COLOUR_PAIRINGS:
        for low_pair, high_pair in ((pair_a, pair_b), (pair_b, pair_a)):
            for low in itertools.product(low_pair, repeat=lo):
                for high in itertools.product(high_pair, repeat=hi):
                    yield low + high


def paired_construction_size(n: int) -> int:
    """Number of distinct colourings produced by :func:`paired_four_colourings`, by inclusion-exclusion."""
    _, lo, hi = _two_middle_levels(n)
    options = []
    for pair_a, pair_b in FOUR_COLOUR_PAIRINGS:
        options.append((set(pair_a), set(pair_b)))
        options.append((set(pair_b), set(pair_a)))
    total = 0
    for size in range(1, len(options) + 1):
        for combo in itertools.combinations(options, size):
            low = set.intersection(*(c[0] for c in combo))
            high = set.intersection(*(c[1] for c in combo))
            total += (-1) ** (size + 1) * len(low) ** lo * len(high) ** hi
    return total


@dataclass(frozen=True)
class LevelAssignment:
    """Which colours may be used on which level.

    Levels are numbered ``0 .. r(k-1)/3 - 1`` and colours ``0 .. r-1``.
    """

    r: int
    k: int
    colours_of_level: tuple[frozenset[int], ...]
    levels_of_colour: tuple[frozenset[int], ...]

    @property
    def num_levels(self) -> int:
        return len(self.colours_of_level)

    def check(self) -> list[str]:
        """Broken invariants, as messages; empty when the assignment is sound."""
        problems = []
        for c, ls in enumerate(self.levels_of_colour):
            if len(ls) != self.k - 1:
                problems.append(f"colour {c} covers {len(ls)} levels, expected {self.k - 1}")
        for lv, cs in enumerate(self.colours_of_level):
            if len(cs) != 3:
                problems.append(f"level {lv} carries {len(cs)} colours, expected 3")
        for c, ls in enumerate(self.levels_of_colour):
            for lv in ls:
                if c not in self.colours_of_level[lv]:
                    problems.append(f"colour {c} and level {lv} disagree")
        return problems

    def family(self, n: int) -> SetFamily:
        """The ``num_levels`` largest levels of 2^[n]; position i is the i-th smallest size."""
        return middle_levels(n, self.num_levels)

    def sample_colourings(self, fam: SetFamily, count: int, seed: int) -> np.ndarray:
        """``count`` random colourings refining the assignment (each set picks one of its level's colours)."""
        sizes = sorted(set(fam.sizes))
        if len(sizes) != self.num_levels:
            raise UsageError(f"family spans {len(sizes)} levels, assignment has {self.num_levels}")
        slot = {s: i for i, s in enumerate(sizes)}
        table = np.array([sorted(self.colours_of_level[i]) for i in range(self.num_levels)], dtype=np.int64)
        level_idx = np.array([slot[s] for s in fam.sizes], dtype=np.int64)
        rng = np.random.Generator(np.random.PCG64(seed))
        choice = rng.integers(0, 3, size=(count, len(fam)))
        return table[level_idx[None, :], choice]


def level_assignment(r: int, k: int) -> LevelAssignment:
    """Give each colour k-1 levels and each level three colours, via a thrice-repeated cyclic list."""
    if r < 3 or k < 2:
        raise UsageError(f"level assignment needs r >= 3 and k >= 2, got r={r}, k={k}")
    if r * (k - 1) % 3:
        raise CapabilityError(f"the three-colours-per-level assignment needs 3 | r(k-1); r(k-1) = {r * (k - 1)}")
    num = r * (k - 1) // 3
    cyclic = list(range(num)) * 3
    of_colour = [frozenset(cyclic[c * (k - 1):(c + 1) * (k - 1)]) for c in range(r)]
    of_level = [frozenset(c for c in range(r) if lv in of_colour[c]) for lv in range(num)]
    return LevelAssignment(r, k, tuple(of_level), tuple(of_colour))


def max_product_with_sum(total: int) -> tuple[int, tuple[int, ...]]:
    """Largest product of positive integers summing to ``total``, and one optimal multiset.

    Threes are best; a remainder of 1 turns one 3 into a pair of 2s.  This is
    why a per-set budget of colour options is spent best at three per set.
    """
    if total < 1:
        raise UsageError(f"total must be positive, got {total}")
    if total <= 4:
        return total, (total,)
    threes, rest = divmod(total, 3)
    if rest == 1:
        parts = (3,) * (threes - 1) + (2, 2)
    elif rest == 2:
        parts = (3,) * threes + (2,)
    else:
        parts = (3,) * threes
    prod = 1
    for p in parts:
        prod *= p
    return prod, parts
