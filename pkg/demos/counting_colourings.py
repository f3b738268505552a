"""
Counting chain-free colourings
==============================

How many ways can the sets of a family be coloured so that no colour
class holds a k-chain?  For an antichain every assignment works.  Once the
family has comparable pairs the count depends on r.
"""
from chaincolour.constructions import paired_four_colouring_family, paired_construction_size
from chaincolour.counting import auto_method, count, count_backtrack, count_bruteforce, count_layered
from chaincolour.lattice import level, levels

# the middle level of 2^[4] is an antichain of six sets: 3^6 colourings
middle = level(4, 2)
print("middle level of n=4, r=3:", count(middle, 3, 2), "via", auto_method(middle, 3, 2))

# a 3-chain needs three different colours when k=2: 3 * 2 * 1
chain = levels(2, (0, 1, 2)).subfamily([0, 1, 3])
print("3-chain, r=3, k=2:", count_bruteforce(chain, 3, 2))

# with two colours no family beats the largest antichain at n=4 ...
print("n=4, two levels, r=2:", count(levels(4, (1, 2)), 2, 2), "vs 2^6 =", 2**6)

# ... but with four colours two adjacent levels win
for n in (3, 5):
    fam = paired_four_colouring_family(n)
    antichain = 4 ** len(level(n, n // 2))
    exact = count_layered(fam, 4, 2)
    print(f"n={n}: two middle levels have {exact} (4,2)-colourings; one level has {antichain}")
    print(f"      pairing colours across the two levels already gives {paired_construction_size(n)}")

# the layered counter and the backtracking counter agree
fam5 = paired_four_colouring_family(5)
assert count_layered(fam5, 4, 2) == count_backtrack(fam5, 4, 2)
