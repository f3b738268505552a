from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, strategies as st

from chaincolour.errors import UsageError
from chaincolour.lattice import (
    SetFamily,
    Subset,
    all_canonical_forms,
    canonical_form,
    comparable,
    connected_components,
    degrees,
    family_from_membership,
    full_lattice,
    height,
    is_antichain,
    level,
    levels,
    linear_extension,
    longest_chain,
    m_levels,
    mask_of,
    elements_of,
    middle_level_range,
    minimal_sets,
    mirsky_decompose,
    random_family,
)

from conftest import families


def fam_of(n, *sets):
    return SetFamily.from_sets(n, sets)


def part_sets(fam, dec):
    return [sorted(elements_of(fam[i]) for i in part) for part in dec.parts]


def brute_height(fam):
    best = 0
    ms = list(fam)
    for size in range(len(ms), 0, -1):
        for combo in itertools.combinations(sorted(ms, key=int.bit_count), size):
            if all(a & b == a and a != b for a, b in zip(combo, combo[1:])):
                return size
    return best


def test_masks_round_trip():
    assert mask_of([1, 3], 3) == 0b101
    assert elements_of(0b101) == [1, 3]
    with pytest.raises(UsageError):
        mask_of([4], 3)


@pytest.mark.parametrize("a, b, want", [([1], [1, 2], True), ([1], [2], False), ([1], [1], False)])
def test_comparable_examples(a, b, want):
    assert comparable(Subset(mask_of(a, 2), 2), Subset(mask_of(b, 2), 2)) is want


def test_degree_examples():
    assert degrees(0, full_lattice(2)) == (3, 0)
    assert degrees(mask_of([1], 2), fam_of(2, [], [1], [2], [1, 2])) == (1, 1)
    assert degrees(0b11, level(2, 1)) == (0, 2)


def test_height_examples():
    assert height(full_lattice(2)) == 3
    assert height(level(5, 2)) == 1
    assert height(fam_of(2, [], [1], [2])) == 2
    assert height(SetFamily(3, [])) == 0


def test_mirsky_examples():
    lat = full_lattice(2)
    assert part_sets(lat, mirsky_decompose(lat)) == [[[1, 2]], [[1], [2]], [[]]]
    lv = level(4, 2)
    assert part_sets(lv, mirsky_decompose(lv)) == [sorted(lv.sets())]
    fam = fam_of(3, [], [1], [1, 2], [2, 3])
    assert part_sets(fam, mirsky_decompose(fam)) == [[[1, 2], [2, 3]], [[1]], [[]]]


def test_minimal_sets_examples():
    assert minimal_sets(full_lattice(2)).sets() == [[]]
    lv = level(4, 1)
    assert minimal_sets(lv).same_sets(lv)
    assert sorted(minimal_sets(fam_of(3, [1], [2], [1, 2], [1, 3])).sets()) == [[1], [2]]


def test_canonical_examples():
    assert canonical_form(fam_of(2, [1])) == canonical_form(fam_of(2, [2]))
    lat = full_lattice(3)
    assert canonical_form(lat) == lat.membership
    assert canonical_form(fam_of(2, [1], [1, 2])) == canonical_form(fam_of(2, [2], [1, 2]))
    assert canonical_form(fam_of(2, [1])) != canonical_form(fam_of(2, [1, 2]))


@pytest.mark.parametrize("n, k, want", [(4, 2, 6), (5, 3, 20), (3, 4, 7), (6, 3, 35), (1, 2, 1), (2, 3, 3)])
def test_m_levels(n, k, want):
    # n=3, k=4 takes the three largest levels 3+3+1; the fourth level is beyond a 3-chain bound
    assert m_levels(n, k) == want


def test_m_levels_rejects_k_beyond_lattice():
    with pytest.raises(UsageError):
        m_levels(3, 5)


def test_middle_level_ties_break_low():
    assert list(middle_level_range(3, 1)) == [1]
    assert list(middle_level_range(4, 1)) == [2]
    assert list(middle_level_range(5, 2)) == [2, 3]
    assert list(middle_level_range(4, 2)) == [1, 2]


def test_family_rejects_duplicates_and_out_of_range():
    with pytest.raises(UsageError):
        SetFamily(2, [1, 1])
    with pytest.raises(UsageError):
        SetFamily(2, [4])
    with pytest.raises(UsageError):
        SetFamily(0, [])


def burnside_classes(n):
    total = 0
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        image = SetFamily(n, range(1 << n)).permuted(perm).members
        seen, cycles = set(), 0
        for s in range(1 << n):
            if s not in seen:
                cycles += 1
                while s not in seen:
                    seen.add(s)
                    s = image[s]
        total += 2**cycles
    return total // len(perms)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_all_canonical_forms_orbits(n):
    forms = all_canonical_forms(n)
    assert len(forms) == 1 << (1 << n)
    assert len(set(forms.tolist())) == burnside_classes(n)


def test_random_family_is_seeded():
    a, b = random_family(5, 0.3, 17), random_family(5, 0.3, 17)
    assert a == b
    assert random_family(5, 0.3, 18) != a


@given(families())
def test_linear_extension_respects_containment(fam):
    pos = linear_extension(fam).position()
    for i, up in enumerate(fam.up_masks):
        for j in range(len(fam)):
            if up >> j & 1:
                assert pos[i] < pos[j]


@given(families())
def test_mirsky_parts_are_antichains_covering(fam):
    dec = mirsky_decompose(fam)
    seen = sorted(i for part in dec.parts for i in part)
    assert seen == list(range(len(fam)))
    assert all(is_antichain(fam, part) for part in dec.parts)
    assert dec.height == height(fam) == brute_height(fam)


@given(families())
def test_longest_chain_is_a_chain_of_height(fam):
    chain = longest_chain(fam)
    assert len(chain) == height(fam)
    assert all(a & b == a and a != b for a, b in zip(chain, chain[1:]))


@given(st.data())
def test_canonical_form_is_permutation_invariant(data):
    fam = data.draw(families(max_n=4))
    perm = data.draw(st.permutations(range(fam.n)))
    assert canonical_form(fam.permuted(perm)) == canonical_form(fam)


@given(families(max_n=3))
def test_canonical_form_is_orbit_minimum(fam):
    # independent route: smallest membership mask over all relabelings
    best = min(fam.permuted(p).membership for p in itertools.permutations(range(fam.n)))
    assert canonical_form(fam) == best


@given(families())
def test_degrees_match_pair_scan(fam):
    for f in fam:
        up = sum(1 for g in fam if g != f and g & f == f)
        down = sum(1 for g in fam if g != f and g & f == g)
        assert degrees(f, fam) == (up, down)


@given(families())
def test_components_partition_family(fam):
    comps = connected_components(fam)
    assert sorted(i for c in comps for i in c) == list(range(len(fam)))
    where = {i: c for c, comp in enumerate(comps) for i in comp}
    for i, up in enumerate(fam.up_masks):
        for j in range(len(fam)):
            if up >> j & 1:
                assert where[i] == where[j]


@given(st.data())
def test_m_levels_is_sum_of_largest_binomials(data):
    n = data.draw(st.integers(1, 8))
    k = data.draw(st.integers(2, n + 1))
    sizes = sorted((math.comb(n, s) for s in range(n + 1)), reverse=True)
    assert m_levels(n, k) == sum(sizes[: k - 1])


@given(st.integers(1, 6), st.integers(0, 6))
def test_levels_have_binomial_size(n, j):
    if j > n:
        return
    assert len(level(n, j)) == math.comb(n, j)
    assert len(levels(n, range(n + 1))) == 1 << n


@given(families(max_n=4))
def test_membership_round_trip(fam):
    assert family_from_membership(fam.n, fam.membership).same_sets(fam)
