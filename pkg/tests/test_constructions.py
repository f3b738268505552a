from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from chaincolour.constructions import (
    LevelAssignment,
    level_assignment,
    max_product_with_sum,
    middle_levels,
    paired_construction_size,
    paired_four_colouring_family,
    paired_four_colourings,
)
from chaincolour.counting import count_bruteforce, count_layered, is_valid
from chaincolour.errors import CapabilityError, UsageError
from chaincolour.lattice import level, levels


def test_middle_levels_examples():
    assert middle_levels(4, 1).same_sets(level(4, 2)) and len(middle_levels(4, 1)) == 6
    fam = middle_levels(5, 2)
    assert fam.same_sets(levels(5, (2, 3))) and len(fam) == 20
    assert middle_levels(3, 1).same_sets(level(3, 1))
    assert middle_levels(3, 1, upper=True).same_sets(level(3, 2))


def test_paired_colourings_at_three():
    fam = paired_four_colouring_family(3)
    generated = list(paired_four_colourings(3))
    assert len(generated) == 6 * 2**3 * 2**3 == 384
    assert all(is_valid(fam, c, 2) for c in generated)
    assert len(set(generated)) == paired_construction_size(3) == 372
    # every distinct paired colouring is one of the 732 exact ones
    assert paired_construction_size(3) <= count_bruteforce(fam, 4, 2) == 732


def test_paired_count_at_five():
    lower = paired_construction_size(5)
    assert 4**10 < lower <= count_layered(paired_four_colouring_family(5), 4, 2)


def test_paired_needs_odd_n():
    with pytest.raises(UsageError):
        paired_four_colouring_family(4)


def test_level_assignment_examples():
    one = level_assignment(3, 2)
    assert one.colours_of_level == (frozenset({0, 1, 2}),)
    three = level_assignment(3, 4)
    assert three.num_levels == 3 and not three.check()
    assert all(len(ls) == 3 for ls in three.levels_of_colour)
    six = level_assignment(6, 2)
    assert six.num_levels == 2 and not six.check()
    assert sorted(len(c) for c in six.colours_of_level) == [3, 3]
    assert all(len(ls) == 1 for ls in six.levels_of_colour)


def test_level_assignment_rejects():
    with pytest.raises(CapabilityError):
        level_assignment(4, 2)
    with pytest.raises(UsageError):
        level_assignment(2, 4)


def test_check_reports_broken_invariants():
    bad = LevelAssignment(3, 2, (frozenset({0, 1}),), (frozenset({0}), frozenset({0}), frozenset()))
    problems = bad.check()
    assert any("carries 2 colours" in p for p in problems)
    assert any("covers 0 levels" in p for p in problems)


@given(st.integers(3, 9), st.integers(2, 6), st.integers(0, 1000))
def test_level_assignment_invariants_and_samples(r, k, seed):
    if r * (k - 1) % 3:
        return
    la = level_assignment(r, k)
    assert not la.check()
    if la.num_levels > 7:
        return
    fam = la.family(7)
    for row in la.sample_colourings(fam, 5, seed):
        assert is_valid(fam, row.tolist(), k)


def best_partition_product(total, largest=None):
    largest = total if largest is None else largest
    if total == 0:
        return 1
    return max(part * best_partition_product(total - part, part) for part in range(1, min(total, largest) + 1))


@pytest.mark.parametrize("total", range(1, 16))
def test_max_product_with_sum(total):
    prod, parts = max_product_with_sum(total)
    assert prod == best_partition_product(total) == math.prod(parts)
    assert sum(parts) == total
