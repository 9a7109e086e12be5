import random

import pytest

from corpus import cycle, e6, nx_automorphism_count, nx_root_orbit, path3, random_regular
from invschreier import RootedMultigraph
from invschreier.errors import PreconditionError, SizeLimitError
from invschreier.graph_core import (
    Neighborhood,
    as_neighborhood,
    automorphisms_fixing_root,
    ball,
    canonical_key,
    edge_neighborhood,
    is_rigid,
    isomorphic,
    neighborhood_from_key,
    orbit_weight,
    orbits_fixing_root,
    root_neighbors,
    sub_ball,
)
from invschreier.lazy import grandfather
from invschreier.schreier import a_cycles, from_permutations, reverse_cycle


def relabel(g: RootedMultigraph, perm) -> RootedMultigraph:
    return RootedMultigraph(g.n_vertices, tuple((perm[u], perm[v]) for u, v in g.edges), perm[g.root])


class TestConstruction:
    def test_loops_count_twice(self):
        g = RootedMultigraph(1, ((0, 0), (0, 0)))
        assert g.degree(0) == 4 and g.is_regular(4)

    def test_rejects_disconnected(self):
        with pytest.raises(PreconditionError, match="connected"):
            RootedMultigraph(2, ())

    def test_rejects_degree_bound(self):
        with pytest.raises(PreconditionError, match="bound"):
            RootedMultigraph(2, ((0, 1), (0, 1), (0, 0)), degree_bound=3)

    def test_rejects_bad_endpoint(self):
        with pytest.raises(PreconditionError):
            RootedMultigraph(2, ((0, 2),))


class TestBall:
    def test_radius_zero(self):
        b = ball(cycle(4), 0, 0)
        assert b.n_vertices == 1 and b.edges == ()

    def test_whole_cycle(self):
        b = ball(cycle(4), 0, 2)
        assert b.n_vertices == 4 and len(b.edges) == 4
        assert sorted(b.dist) == [0, 1, 1, 2]

    def test_grandfather_star(self):
        b = ball(grandfather(3), None, 1)
        assert b.n_vertices == 9
        assert b.local_degree(b.root) == 8
        assert b.deficits[b.root] == 0
        assert all(b.deficits[v] == 8 - b.local_degree(v) > 0 for v in range(1, 9))

    def test_bad_center(self):
        with pytest.raises(Exception):
            ball(cycle(4), 7, 1)


class TestCanonicalKey:
    def test_relabeling_invariance(self):
        rng = random.Random(1)
        g = random_regular(12, 2, rng)
        base = canonical_key(ball(g, g.root, 2))
        for _ in range(100):
            perm = list(range(12))
            rng.shuffle(perm)
            h = relabel(g, perm)
            assert canonical_key(ball(h, h.root, 2)) == base

    def test_c4_copies_and_c4_vs_c5(self):
        assert canonical_key(ball(cycle(4, 0), 0, 2)) == canonical_key(ball(cycle(4, 3), 3, 2))
        assert canonical_key(ball(cycle(4), 0, 2)) != canonical_key(ball(cycle(5), 0, 2))

    def test_c3_orientations_collide(self):
        cw = from_permutations([[1, 2, 0]])
        ccw = from_permutations([[2, 0, 1]])
        assert canonical_key(as_neighborhood(cw)) == canonical_key(as_neighborhood(ccw))

    def test_decode_round_trip(self):
        for nb in (ball(cycle(5), 0, 2), as_neighborhood(e6()), edge_neighborhood(ball(cycle(6), 0, 2), 1, 1)):
            k = canonical_key(nb)
            assert canonical_key(neighborhood_from_key(k)) == k


class TestIsomorphic:
    def test_identity(self):
        U = ball(cycle(5), 0, 2)
        assert isomorphic(U, U)

    def test_root_signatures_differ(self):
        U = ball(cycle(4), 0, 2)
        assert not isomorphic(U, U.with_roots(0, 1))

    def test_distinct_labelings_of_e6(self):
        A = e6()
        B = reverse_cycle(A, a_cycles(A, 1).cycles[0])
        assert not isomorphic(as_neighborhood(A), as_neighborhood(B))


class TestAutomorphisms:
    def test_p3_center(self):
        auts = automorphisms_fixing_root(as_neighborhood(path3(1)))
        assert len(auts) == 2 and auts[0] == (0, 1, 2)

    def test_p3_endpoint(self):
        assert automorphisms_fixing_root(as_neighborhood(path3(0))) == [(0, 1, 2)]

    def test_grandfather_star_order_matches_oracle(self):
        b = ball(grandfather(3), None, 1)
        order = len(automorphisms_fixing_root(b))
        # frozen from the VF2 oracle: swapping the two children carries their grandchildren along
        assert order == nx_automorphism_count(b) == 8

    def test_group_closure(self):
        auts = automorphisms_fixing_root(ball(cycle(6), 0, 3))
        S = set(auts)
        for a in auts:
            assert tuple(sorted(range(len(a)), key=a.__getitem__)) in S
            for b in auts:
                assert tuple(a[b[v]] for v in range(len(a))) in S

    def test_size_cap(self):
        with pytest.raises(SizeLimitError):
            automorphisms_fixing_root(ball(cycle(50), 0, 25), vertex_cap=10)

    def test_schreier_balls_are_rigid(self):
        rng = random.Random(3)
        from corpus import random_schreier

        for _ in range(20):
            sg = random_schreier(rng.randint(2, 15), 2, rng)
            assert automorphisms_fixing_root(ball(sg, sg.root, 2)) == [tuple(range(ball(sg, sg.root, 2).n_vertices))]


class TestOrbitWeight:
    def test_p3(self):
        nb = as_neighborhood(path3(1))
        assert orbit_weight(nb, 0) == orbit_weight(nb, 2) == 2
        assert orbit_weight(nb, 1) == 1

    def test_labeled_weight_one(self):
        nb = as_neighborhood(e6())
        assert all(orbit_weight(nb, y) == 1 for y in range(6))

    def test_grandfather_child_matches_oracle(self):
        b = ball(grandfather(3), None, 2)
        for y in root_neighbors(b):
            assert orbit_weight(b, y) == len(nx_root_orbit(b, y))

    def test_orbit_sizes_partition(self):
        nb = ball(cycle(7), 0, 3)
        orbits = orbits_fixing_root(nb)
        reps = set(orbits)
        assert sum(orbit_weight(nb, y, orbits) for y in reps) == nb.n_vertices


def test_rigidity_probe():
    assert not is_rigid(as_neighborhood(cycle(5)))
    assert is_rigid(as_neighborhood(RootedMultigraph(
        7, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)))))


def test_sub_ball_and_edge_neighborhood():
    big = ball(cycle(10), 0, 4)
    small = sub_ball(big, big.root, 2)
    assert canonical_key(small) == canonical_key(ball(cycle(10), 0, 2))
    y = root_neighbors(big)[0]
    D = edge_neighborhood(big, y, 1)
    assert D.second_root is not None and D.n_vertices == 4
    assert isinstance(D, Neighborhood)
