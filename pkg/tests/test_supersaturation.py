from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chaincolour.constructions import middle_levels
from chaincolour.errors import PreconditionError, UsageError
from chaincolour.lattice import SetFamily, full_lattice, level, levels, mask_of
from chaincolour.supersaturation import (
    comparable_pairs,
    comparable_pairs_scan,
    family_weight,
    kleitman_required,
    lym_sum,
    lym_sums_batch,
    mc_classification,
    parse_rational,
    supersat_check,
    transference_check,
    weight,
    weight_bounds_hold,
)

from conftest import families


def chain(length):
    return SetFamily(max(length - 1, 1), [(1 << i) - 1 for i in range(length)])


def test_comparable_pair_examples():
    assert comparable_pairs(level(5, 2)) == 0
    assert comparable_pairs(full_lattice(2)) == 5
    for m in range(1, 7):
        assert comparable_pairs(chain(m)) == m * (m - 1) // 2


@pytest.mark.parametrize("n, size, want", [(2, 4, 4), (4, 6, 0), (3, 5, 4), (4, 3, 0), (5, 11, 3)])
def test_kleitman_required(n, size, want):
    assert kleitman_required(n, size) == want


def test_weight_examples():
    assert weight(0, 4, 2) == Fraction(1, 4)
    assert weight(mask_of([1], 4), 4, 2) == Fraction(1, 4)
    for n in range(2, 9):
        for k in range(2, 5):
            assert weight((1 << (n // 2)) - 1, n, k) == Fraction(1, math.comb(n, n // 2))
    # too few elements for a k-chain of middle levels: the cap is dropped
    assert weight(0, 2, 3) == 1


def test_family_weight_examples():
    for n, k in ((4, 2), (5, 3), (6, 3), (7, 4)):
        assert family_weight(middle_levels(n, k - 1), k) == k - 1
    assert family_weight(SetFamily(4, []), 2) == 0
    assert family_weight(SetFamily(4, [0]), 2) == Fraction(1, 4)


def test_weight_bounds_at_large_n():
    n, k = 16, 2
    assert all(weight_bounds_hold(n, k, s) for s in range(n + 1))


def test_lym_examples():
    assert lym_sum(level(4, 2)) == 1
    assert lym_sum(SetFamily.from_sets(2, [[], [1]])) == 1
    for n in range(1, 6):
        assert lym_sum(SetFamily(n, [0])) == 1
    with pytest.raises(PreconditionError):
        lym_sum(full_lattice(2))


def test_supersat_examples():
    rep = supersat_check(level(4, 2), 2, Fraction(1, 6))
    assert rep.r == 0 and rep.holds
    empty = supersat_check(SetFamily(4, []), 2, Fraction(1, 6))
    assert empty.family_weight == 0 and empty.r < 0 and empty.holds
    plus = supersat_check(level(4, 2).with_members([0b0111]), 2, Fraction(1, 6))
    # one extra 3-set of weight 1/4 over a middle level of 6
    assert plus.r == Fraction(6, 4) and plus.observed_pairs == 3
    assert plus.required_pairs == Fraction(1, 3) * Fraction(3, 2) * 4 and plus.holds
    assert not plus.hypothesis_met
    with pytest.raises(UsageError):
        supersat_check(level(4, 2), 2, Fraction(1, 2))


def test_transference_examples():
    rep = transference_check(middle_levels(5, 2), [], 3, 0)
    assert rep.fired and rep.holds and rep.weight_lhs == 2 == rep.weight_rhs
    assert transference_check(SetFamily(5, [1]), [], 3, 0).outcome == "vacuous"
    base = level(4, 2)
    extra = level(4, 3).members[:3]
    rep = transference_check(base.with_members(extra), [], 2, 3)
    assert rep.outcome == "holds"
    split = transference_check(base.with_members(extra[:1]), [(Fraction(1), SetFamily(4, extra[1:]))], 2, 3)
    assert split.outcome == "holds"


def test_mc_classification_hand_case():
    A, B = level(4, 2), level(4, 3)
    X = SetFamily.from_sets(4, [[1, 2, 3]])
    res = mc_classification(A, B, X, {a: 0 for a in A})
    assert res.b_mc.same_sets(B)
    # direct scans
    def nbrs(f, fam):
        return [g for g in fam if g != f and g & f in (f, g)]
    assert res.a3.same_sets(SetFamily(4, [a for a in A if not nbrs(a, X)]))
    assert res.a2.same_sets(SetFamily(4, [a for a in A if len(nbrs(a, B)) ** 2 >= 4 and not nbrs(a, X)]))
    assert res.a1.same_sets(SetFamily(4, [a for a in A if len(nbrs(a, B)) ** 2 < 4]))


def test_mc_classification_rainbow_and_full_x():
    A, B = level(4, 1), level(4, 2)
    res = mc_classification(A, B, B, list(range(len(A))))
    assert len(res.b_mc) == 0 and res.a1.same_sets(A)
    mono = mc_classification(A, B, B, [0] * len(A))
    assert len(mono.a3) == 0


def test_mc_classification_rejects_bad_input():
    A, B = level(4, 1), level(4, 2)
    with pytest.raises(UsageError):
        mc_classification(A, A, A, [0] * len(A))
    with pytest.raises(UsageError):
        mc_classification(A, B, level(4, 3), [0] * len(A))


def test_parse_rational():
    assert parse_rational("1/6") == Fraction(1, 6)
    with pytest.raises(UsageError):
        parse_rational("one sixth")


@given(families(max_n=5, max_size=20))
def test_pair_counters_agree(fam):
    assert comparable_pairs(fam) == comparable_pairs_scan(fam)


@given(families(max_n=5, max_size=32))
def test_kleitman_holds(fam):
    assert comparable_pairs(fam) >= kleitman_required(fam.n, len(fam))


@given(families(max_n=5, max_size=31))
def test_lym_at_most_one_and_batch_agrees(fam):
    full = (1 << fam.n) - 1
    if full in fam:
        fam = fam.without(full)
    value = lym_sum(fam)
    assert value <= 1
    row = np.zeros((1, 1 << fam.n), dtype=bool)
    row[0, list(fam.members)] = True
    assert lym_sums_batch(fam.n, row) == [value]


@given(st.integers(2, 12), st.integers(2, 4))
def test_middle_levels_weigh_k_minus_one(n, k):
    if k - 1 > n + 1:
        return
    assert family_weight(middle_levels(n, k - 1), k) == k - 1


@given(families(max_n=6, max_size=30), st.integers(2, 3))
def test_weight_is_additive(fam, k):
    total = sum((weight(m, fam.n, k) for m in fam), Fraction(0))
    assert family_weight(fam, k) == total


@given(st.integers(4, 7), st.integers(2, 3), st.integers(0, 5), st.integers(0, 10**6))
def test_transference_on_middle_levels_plus_next_level(n, k, t, seed):
    base = middle_levels(n, k - 1)
    top = max(base.sizes)
    nxt = top + 1 if top < n else min(base.sizes) - 1
    pool = level(n, nxt).members
    t = min(t, len(pool))
    rng = np.random.Generator(np.random.PCG64(seed))
    extra = [int(x) for x in rng.choice(pool, size=t, replace=False)] if t else []
    rep = transference_check(base.with_members(extra), [], k, t)
    assert rep.fired and rep.holds
