from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from chaincolour.constructions import middle_levels
from chaincolour.counting import (
    Colouring,
    auto_method,
    count,
    count_backtrack,
    count_bruteforce,
    count_layered,
    is_valid,
    layered_applicable,
    minimal_set_bound,
    monochromatic_chain,
    valid_colourings,
)
from chaincolour.errors import CapabilityError, UsageError
from chaincolour.lattice import SetFamily, full_lattice, height, level, levels

from conftest import families

CHAIN3 = SetFamily.from_sets(2, [[], [1], [1, 2]])


def naive_count(fam, r, k):
    """Pure-Python enumeration with an explicit chain scan; independent of the numpy oracle."""
    chains = [c for c in itertools.permutations(range(len(fam)), k)
              if all(fam[a] & fam[b] == fam[a] and fam[a] != fam[b] for a, b in zip(c, c[1:]))]
    return sum(1 for cols in itertools.product(range(r), repeat=len(fam))
               if not any(len({cols[i] for i in c}) == 1 for c in chains))


def test_is_valid_examples():
    assert is_valid(CHAIN3, (0, 1, 2), 2)
    assert not is_valid(full_lattice(2), (0, 0, 0, 0), 3)
    assert is_valid(full_lattice(2), (0, 0, 0, 0), 4)


def test_monochromatic_chain_witness():
    chain = monochromatic_chain(full_lattice(2), (0, 0, 0, 0), 3)
    assert len(chain) == 3 and chain[0] == 0 and chain[-1] == 0b11
    assert monochromatic_chain(CHAIN3, (0, 1, 2), 2) is None


def test_colouring_rejects_out_of_range():
    with pytest.raises(UsageError):
        Colouring((0, 3), 3)


@pytest.mark.parametrize("method", ["bruteforce", "backtrack", "auto"])
def test_small_examples(method):
    assert count(level(4, 2), 3, 2, method) == 729
    assert count(full_lattice(2), 2, 2, method) == 0
    assert count(full_lattice(2), 2, 3, method) == 10
    assert count(CHAIN3, 3, 2, method) == 6


def test_two_middle_levels_of_five_exceed_antichain():
    fam = levels(5, (2, 3))
    # frozen from two independent routes (layered and backtracking)
    assert count_layered(fam, 4, 2) == count_backtrack(fam, 4, 2) == 217727724
    assert 217727724 > 4**10


def test_two_middle_levels_of_three():
    fam = levels(3, (1, 2))
    assert count_bruteforce(fam, 4, 2) == count_layered(fam, 4, 2) == naive_count(fam, 4, 2) == 732


def test_minimal_set_bound_examples():
    assert minimal_set_bound(full_lattice(2)) == 2
    assert minimal_set_bound(level(4, 1)) == 16 == count(level(4, 1), 2, 2)
    fam = SetFamily.from_sets(2, [[], [1], [2]])
    # ∅ one colour, both singletons the other
    assert minimal_set_bound(fam) == 2 == count_bruteforce(fam, 2, 2)


def test_auto_method_names():
    assert auto_method(level(4, 2), 3, 2) == "antichain"
    assert auto_method(levels(4, (1, 2)), 3, 3) == "chain-free"
    assert auto_method(full_lattice(3), 2, 2) == "chain-bound"
    assert auto_method(levels(4, (1, 2)), 3, 2) == "layered"
    assert auto_method(levels(4, (1, 2, 3)), 3, 2) == "backtrack"


def test_strict_layered_refuses_tall_family():
    with pytest.raises(CapabilityError):
        count(full_lattice(2), 3, 2, "layered", strict=True)
    assert count(full_lattice(2), 3, 2, "layered") == count_bruteforce(full_lattice(2), 3, 2)


def test_bruteforce_budget_is_enforced():
    with pytest.raises(CapabilityError):
        count_bruteforce(level(6, 3), 3, 2, budget=1000)


def test_bad_parameters():
    with pytest.raises(UsageError):
        count(CHAIN3, 0, 2)
    with pytest.raises(UsageError):
        count(CHAIN3, 2, 1)
    with pytest.raises(UsageError):
        count(CHAIN3, 2, 2, "magic")


def test_parallel_backtrack_matches_serial():
    fam = middle_levels(5, 2)
    assert count_backtrack(fam, 3, 2, workers=2) == count_backtrack(fam, 3, 2)


def test_valid_colourings_lists_exactly_the_valid_ones():
    fam = levels(3, (0, 1, 2))
    codes = set(valid_colourings(fam, 3).tolist())
    want = {sum(c << i for i, c in enumerate(cols))
            for cols in itertools.product((0, 1), repeat=len(fam)) if is_valid(fam, cols, 3)}
    assert codes == want


@given(families(max_n=3, max_size=6), st.integers(1, 3), st.integers(2, 4))
def test_bruteforce_matches_naive(fam, r, k):
    assert count_bruteforce(fam, r, k) == naive_count(fam, r, k)


@given(families(max_n=4, max_size=9), st.integers(1, 4), st.integers(2, 4))
def test_routes_agree(fam, r, k):
    want = count_bruteforce(fam, r, k)
    assert count(fam, r, k) == want
    assert count_backtrack(fam, r, k) == want
    assert count_backtrack(fam, r, k, symmetry=False) == want
    if layered_applicable(fam, k):
        assert count_layered(fam, r, k) == want


@given(st.data())
def test_invariant_under_relabelling_and_complement(data):
    fam = data.draw(families(max_n=4, max_size=10))
    perm = data.draw(st.permutations(range(fam.n)))
    r, k = data.draw(st.integers(2, 3)), data.draw(st.integers(2, 3))
    c = count(fam, r, k)
    assert count(fam.permuted(perm), r, k) == c
    assert count(fam.complemented(), r, k) == c


@given(families(max_n=4, max_size=10), st.integers(2, 3), st.integers(2, 3))
def test_deleting_a_set_loses_at_most_a_factor_r(fam, r, k):
    c = count(fam, r, k)
    for m in fam:
        smaller = count(fam.without(m), r, k)
        assert c <= r * smaller


@given(families(max_n=4, max_size=10), st.integers(2, 3))
def test_count_grows_with_colours_and_chain_bound(fam, k):
    assert count(fam, 2, k) <= count(fam, 3, k)
    assert count(fam, 2, k) <= count(fam, 2, k + 1)


@given(families(max_n=4, max_size=10), st.integers(1, 4), st.integers(2, 4))
def test_trivial_regimes(fam, r, k):
    h = height(fam)
    if h < k:
        assert count(fam, r, k) == r ** len(fam)
    if h > r * (k - 1):
        assert count(fam, r, k) == 0


@given(families(max_n=4, max_size=10))
def test_minimal_set_bound_dominates_two_colourings(fam):
    assert count(fam, 2, 2) <= minimal_set_bound(fam)
