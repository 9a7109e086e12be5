"""
Labeling a 4-regular graph as a Schreier graph
===============================================

"""

from itertools import combinations

from invschreier import RootedMultigraph, schreier_structure, validate
from invschreier.schreier import a_cycles, contains, schreier_generators

# K_5 is 4-regular, so it should carry a rank-2 structure
k5 = RootedMultigraph(5, tuple(combinations(range(5), 2)), 0)
sg = schreier_structure(k5, seed=1)
print(validate(sg).summary())

# each generator acts as a permutation, so its edges split into cycles
for i in (1, 2):
    lengths = [len(c.vertices) for c in a_cycles(sg, i).cycles]
    print(f"a{i}-cycles of lengths {lengths}")

# the root stabilizer has index 5 in F_2, hence rank 5 * (2 - 1) + 1
gens = schreier_generators(sg)
print(len(gens), "free generators:", ", ".join(map(str, gens)))
assert all(contains(sg, h) for h in gens)

# other seeds label the same edges differently
for seed in range(3):
    print(seed, schreier_structure(k5, seed).labels)
