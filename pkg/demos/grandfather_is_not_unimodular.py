"""
The grandfather graph: labelable but not unimodular
====================================================

"""

from invschreier import ball, canonical_key
from invschreier.factorize import extend_structure
from invschreier.lazy import grandfather, tree
from invschreier.measures import check_unimodular, dirac

G = grandfather(3)

# every vertex looks the same up to radius 3
keys = {canonical_key(ball(G, v, 3)) for v in ball(G, None, 1).source_ids}
print("distinct 3-ball types around the root:", len(keys))

# yet the root has one grandparent edge and four grandchild edges;
# a point mass cannot balance an edge class against its swap
rep = check_unimodular(dirac(G, 2), 1)
print(rep.summary())
for c in rep.violations:
    print("  ", c.lhs, "vs", c.rhs, "weights", c.weights)

# the 3-regular tree has no such bias
print(check_unimodular(dirac(tree(4), 2), 1).summary())

# the grandfather ball still extends to a labeled 2-ball
ext = extend_structure(G, 2, seed=0)
print(ext.graph.n_vertices, "labeled vertices, search", ext.certificate)
