"""
Searching for the best family
=============================

For n <= 4 every family can be examined up to relabelling.  Beyond that a
seeded hill-climb over add/remove moves gives empirical lower bounds only.
"""
from chaincolour.lattice import family_from_membership
from chaincolour.search import exhaustive_search, local_search

for n, r, k in ((3, 2, 2), (4, 2, 2), (3, 2, 3), (3, 4, 2)):
    rep = exhaustive_search(n, r, k)
    best = [family_from_membership(n, m).sets() for m in rep.maximisers]
    print(f"n={n} r={r} k={k}: max {rep.best_count} over {rep.classes_examined} classes; maximisers {best}")

# four colours at n=5: the hill-climb leaves the single middle level behind
rep = local_search(5, 4, 2, budget=80, seed=0)
print("local search n=5 r=4:", rep.best_count, "vs 4^10 =", 4**10, "-", rep.note)
print(rep.to_csv())
