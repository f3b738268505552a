"""One test per acceptance criterion, at full size; a summary line per criterion is printed at the end."""
from __future__ import annotations

import pytest

from chaincolour import acceptance

RESULTS: dict[int, acceptance.CriterionResult] = {}

CRITERIA = [
    acceptance.oracle_equivalence,
    acceptance.antichain_identity,
    acceptance.two_colour_tightness,
    acceptance.kleitman_exhaustive,
    acceptance.lym_sweep,
    acceptance.weight_checks,
    acceptance.partition_contract,
    acceptance.four_colour_example,
    acceptance.level_assignment_checks,
    acceptance.determinism,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    result = criterion()
    RESULTS[result.number] = result
    print(result.line())
    failed = [name for name, ok in result.checks.items() if not ok]
    assert not failed, f"{result.line()}\n{result.details.get('failure_counts', '')}"
    assert result.within_time, result.line()
