"""
Reversing diagonals of the Z^2 grid
===================================

"""

from invschreier import ball
from invschreier.io import schreier_from_ball
from invschreier.lazy import z2_with_diagonal
from invschreier.measures import (
    ReversalModel,
    check_shift_invariance,
    compare_to_exact,
    distinctness_witness,
    estimate_cylinder,
    exact_reversal_measure,
)
from invschreier.schreier import a_cycles, reverse_cycle
from invschreier.words import Word

G = z2_with_diagonal()

# a3 runs along the diagonals; flip each one with probability 1/2
model = ReversalModel(G, 3, 0.5)
exact = exact_reversal_measure(model, 1)
emp = estimate_cylinder(model, 1, 20000, seed=0)
print(len(exact.keys()), "ball types at radius 1")
fit = compare_to_exact(emp, exact)
print("empirical fit ok:", fit.ok, "worst z %.2f" % fit.worst.z)

# moving the root along a generator leaves the law unchanged
for w in ("a1", "a2^-1", "a3"):
    print(w, check_shift_invariance(model, Word.parse(w), 1, 5000, seed=1).ok)

# flipping the root diagonal changes the stabilizer; find a word telling them apart
A = schreier_from_ball(ball(G, None, 4))
root_cycle = next(c for c in a_cycles(A, 3).cycles if A.root in c.vertices)
print("witness:", distinctness_witness(A, reverse_cycle(A, root_cycle), 4))
