"""
Comparable pairs, weights and the LYM-type sum
==============================================

Families larger than the middle level are forced to contain comparable
pairs.  The weight w_k is a capped inverse binomial under which the k-1
middle levels weigh exactly k-1.
"""
from fractions import Fraction

import numpy as np

from chaincolour.constructions import middle_levels
from chaincolour.lattice import level, random_family
from chaincolour.supersaturation import (
    comparable_pairs,
    family_weight,
    kleitman_required,
    lym_sum,
    lym_sums_batch,
    supersat_check,
    transference_check,
)

# grow the middle level of 2^[5] by sets from the level above
base = level(5, 2)
for extra in range(0, 6):
    fam = base.with_members(level(5, 3).members[:extra])
    print(f"|F| = {len(fam):2d}: {comparable_pairs(fam):3d} comparable pairs, at least "
          f"{kleitman_required(5, len(fam))} forced")

# the k-1 middle levels weigh k-1 exactly
for n, k in ((4, 2), (5, 3), (6, 3), (8, 4)):
    print(f"n={n} k={k}: weight of middle levels = {family_weight(middle_levels(n, k - 1), k)}")

# one set above the middle: how many pairs does supersaturation promise?
rep = supersat_check(level(6, 3).with_members([0b000111 | 0b001000]), 2, Fraction(1, 6))
print("excess r =", rep.r, "pairs observed", rep.observed_pairs, "required", rep.required_pairs)

# adding t sets of the next level to the middle levels pushes the weight up accordingly
rep = transference_check(middle_levels(6, 2).with_members(level(6, 4).members[:3]), [], 3, 3)
print("transfer:", rep.outcome, rep.weight_lhs, ">=", rep.weight_rhs)

# the LYM-type sum stays at most one; batch evaluation over 2000 random families at n=5
print("LYM sum of a random family:", lym_sum(random_family(5, 0.3, 4).without(31)))
rng = np.random.Generator(np.random.PCG64(1))
included = rng.random((2000, 32)) < 0.4
included[:, 31] = False
sums = lym_sums_batch(5, included)
print("largest of 2000 sums:", max(sums))
