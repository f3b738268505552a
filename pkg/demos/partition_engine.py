"""
The four-stage partition engine
===============================

The engine keeps the full list of (2,k)-colourings and splits the family
into parts A, U, D, P and R while recording how much each operation shrinks
the list.  On the middle levels nothing happens; on other families sets get
coloured, branched on and reserved.
"""
import json

from chaincolour.constructions import middle_levels
from chaincolour.counting import count
from chaincolour.lattice import SetFamily, levels
from chaincolour.partition import partition

# the extremal family is left alone when omega is small
res = partition(middle_levels(5, 2), 3, omega=0)
print("middle levels, stage reached:", res.state.stage, "ledger entries:", len(res.state.ledger))
print("qualities pass:", res.qualities.passed, "properties pass:", res.properties.passed)

# two full levels of 2^[3] with k=2: stage I must colour and branch
fam = levels(3, (1, 2))
res = partition(fam, 2, omega=0, paranoid=True)
for entry in res.state.ledger:
    print(json.dumps(entry.to_dict()))
print("exact count", count(fam, 2, 2), "retained", res.state.colourings.size)

# the counting bound needs the default omega; with omega = 0 it can fail
tiny = SetFamily.from_sets(1, [[], [1]])
for omega in (0, None):
    p1 = partition(tiny, 2, omega=omega).properties.checks["P1"]
    print(f"omega={omega}: P1 {'holds' if p1.passed else 'fails'}; log2 count {p1.witness['log2_count']:.3f}"
          f" vs log2 bound {p1.witness['log2_bound']:.5f}")
