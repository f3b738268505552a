from __future__ import annotations

import json

import pytest
from hypothesis import given

from chaincolour.errors import UsageError
from chaincolour.familyio import dumps, family_from_dict, loads, parse_family, read_family, write_family
from chaincolour.lattice import full_lattice, level, levels

from conftest import families


@given(families(max_n=6, max_size=20))
def test_round_trip(fam):
    assert loads(dumps(fam)) == fam


def test_file_round_trip(tmp_path):
    fam = levels(4, (1, 2))
    path = tmp_path / "fam.json"
    write_family(fam, path)
    assert read_family(path) == fam
    assert parse_family(f"file:{path}", None) == fam
    with pytest.raises(UsageError):
        parse_family(f"file:{path}", 5)


@pytest.mark.parametrize("data", [
    {"n": 2, "sets": [[1], [1]]},
    {"n": 2, "sets": [[3]]},
    {"n": 2, "sets": [[0]]},
    {"n": "2", "sets": []},
    {"sets": []},
    {"n": 2, "sets": "[[1]]"},
    [1, 2],
])
def test_malformed_families_rejected(data):
    with pytest.raises(UsageError):
        family_from_dict(data)


def test_malformed_json_rejected():
    with pytest.raises(UsageError):
        loads("{not json")


def test_specifiers():
    assert parse_family("all", 3) == full_lattice(3)
    assert parse_family("level:2", 4) == level(4, 2)
    assert parse_family("middle:1", 3).same_sets(level(3, 1))
    assert parse_family("middle:1,upper", 3).same_sets(level(3, 2))
    assert parse_family("middle:2", 5).same_sets(levels(5, (2, 3)))
    assert parse_family("random:0.5,7", 4) == parse_family("random:0.5,7", 4)
    assert parse_family("random:1,0", 3).same_sets(full_lattice(3))
    assert len(parse_family("random:0,3", 3)) == 0


@pytest.mark.parametrize("spec", ["bogus", "level:x", "middle:1,sideways", "random:p,1", "all"])
def test_bad_specifiers(spec):
    with pytest.raises(UsageError):
        parse_family(spec, None if spec == "all" else 3)


def test_dumps_is_plain_json():
    assert json.loads(dumps(level(3, 1))) == {"n": 3, "sets": [[1], [2], [3]]}
