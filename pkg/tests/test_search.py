from __future__ import annotations

import csv
import io

import pytest

from chaincolour.counting import count
from chaincolour.errors import CapabilityError, UsageError
from chaincolour.lattice import canonical_form, family_from_membership, level, levels
from chaincolour.search import exhaustive_search, local_search


def test_two_colours_three_elements():
    rep = exhaustive_search(3, 2, 2)
    assert rep.best_count == 8
    assert sorted(rep.maximisers) == sorted({canonical_form(level(3, 1)), canonical_form(level(3, 2))})
    assert sum(c.orbit for c in rep.classes) == 256
    assert rep.crosschecked == rep.classes_examined


def test_two_colours_four_elements():
    rep = exhaustive_search(4, 2, 2)
    assert rep.best_count == 64
    assert rep.maximisers == [canonical_form(level(4, 2))]
    assert sum(c.orbit for c in rep.classes) == 65536


def test_three_chain_bound_at_three_elements():
    # an empirical value: seven sets cannot avoid a 3-chain, so 2^7 is out of reach
    rep = exhaustive_search(3, 2, 3)
    assert rep.best_count == 64
    assert [family_from_membership(3, m).same_sets(levels(3, (1, 2))) for m in rep.maximisers] == [True]


def test_parallel_search_matches_serial():
    a, b = exhaustive_search(3, 3, 2), exhaustive_search(3, 3, 2, workers=2)
    assert a.to_dict() == b.to_dict() and a.classes == b.classes


def test_csv_lists_every_class_at_three():
    rep = exhaustive_search(3, 2, 2)
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert len(rows) == rep.classes_examined
    assert rows[0]["count"] == "8"


def test_csv_top_hundred_at_four():
    rows = list(csv.DictReader(io.StringIO(exhaustive_search(4, 2, 2).to_csv())))
    assert len(rows) == 100


def test_exhaustive_caps_n():
    with pytest.raises(CapabilityError):
        exhaustive_search(5, 2, 2)


def test_local_search_stays_on_middle_level():
    rep = local_search(4, 2, 2, budget=200, seed=1)
    assert rep.best_count == 64 and not rep.partial
    assert rep.maximisers == [canonical_form(level(4, 2))]
    assert "no optimality claim" in rep.note


def test_local_search_beats_antichain_with_four_colours():
    rep = local_search(5, 4, 2, budget=60, seed=0)
    assert rep.best_count > 4**10
    best = family_from_membership(5, rep.maximisers[0])
    assert count(best, 4, 2) == rep.best_count


def test_local_search_is_reproducible():
    a = local_search(4, 3, 2, budget=50, seed=3, start="random")
    b = local_search(4, 3, 2, budget=50, seed=3, start="random")
    assert a.to_dict() == b.to_dict()


def test_local_search_rejects_bad_start():
    with pytest.raises(UsageError):
        local_search(4, 2, 2, start="nowhere")
