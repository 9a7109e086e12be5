import random

import pytest

from corpus import brute_two_factors, cycle, random_regular
from invschreier import RootedMultigraph
from invschreier.errors import BudgetExhausted, PreconditionError
from invschreier.factorize import (
    close_up,
    euler_tour,
    extend_structure,
    orient_by_tour,
    perfect_matchings,
    schreier_structure,
    two_factorize,
)
from invschreier.graph_core import ball, canonical_key, sub_ball
from invschreier.lazy import Forgotten, from_selector, grandfather, line, tree, z2
from invschreier.schreier import forget, validate


def k5() -> RootedMultigraph:
    return RootedMultigraph(5, tuple((u, v) for u in range(5) for v in range(u + 1, 5)))


def petersen() -> RootedMultigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return RootedMultigraph(10, tuple(outer + spokes + inner))


def bouquet_base(n=2) -> RootedMultigraph:
    return RootedMultigraph(1, ((0, 0),) * n)


def _is_closed_tour(g, tour):
    if sorted(e for e, _, _ in tour) != list(range(len(g.edges))):
        return False
    return all(tour[k][2] == tour[(k + 1) % len(tour)][1] for k in range(len(tour)))


class TestEulerTour:
    @pytest.mark.parametrize("g,length", [(cycle(3), 3), (bouquet_base(), 2), (k5(), 10)])
    def test_lengths_and_closure(self, g, length):
        tour = euler_tour(g)
        assert len(tour) == length and _is_closed_tour(g, tour)

    def test_shuffled_tours_still_close(self):
        rng = random.Random(0)
        g = random_regular(30, 3, rng)
        for s in range(10):
            assert _is_closed_tour(g, euler_tour(g, rng=random.Random(s)))

    def test_odd_degree_rejected(self):
        with pytest.raises(PreconditionError, match="odd"):
            euler_tour(petersen())


class TestOrientation:
    @pytest.mark.parametrize("g,n", [(cycle(4), 1), (k5(), 2), (bouquet_base(), 2)])
    def test_balanced(self, g, n):
        indeg, outdeg = orient_by_tour(g, euler_tour(g)).in_out()
        assert indeg == outdeg == [n] * g.n_vertices

    def test_loop_counts_once_each_way(self):
        o = orient_by_tour(bouquet_base(1), euler_tour(bouquet_base(1)))
        assert o.pairs == ((0, 0),) and o.in_out() == ([1], [1])


class TestMatchings:
    def test_one_regular(self):
        assert perfect_matchings(3, [(0, 2), (1, 0), (2, 1)], 1) == [[0, 1, 2]]

    def test_eight_cycle(self):
        edges = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 0)]
        ms = perfect_matchings(4, edges, 2)
        assert len(ms) == 2 and sorted(ms[0] + ms[1]) == list(range(8))
        for m in ms:
            assert sorted(edges[e][1] for e in m) == [0, 1, 2, 3]

    def test_k5_double(self):
        o = orient_by_tour(k5(), euler_tour(k5()))
        ms = perfect_matchings(5, o.pairs, 2)
        assert set(ms[0]).isdisjoint(ms[1])
        for m in ms:
            assert sorted(o.pairs[e][0] for e in m) == sorted(o.pairs[e][1] for e in m) == list(range(5))

    def test_not_regular(self):
        with pytest.raises(PreconditionError):
            perfect_matchings(2, [(0, 0), (0, 1), (1, 1), (0, 0)], 2)


class TestTwoFactorize:
    def test_c6_single_factor(self):
        tf = two_factorize(cycle(6))
        assert tf.n_factors == 1 and tf.factor_edges(1) == list(range(6))

    def test_k5_against_brute_force(self):
        g = k5()
        brute = set(brute_two_factors(5, g.edges))
        assert len(brute) == 12  # Hamiltonian cycles of K_5
        for s in range(20):
            tf = two_factorize(g, random.Random(s))
            assert {frozenset(tf.factor_edges(1)), frozenset(tf.factor_edges(2))} <= brute

    def test_bouquet_loops(self):
        tf = two_factorize(bouquet_base())
        assert sorted(tf.factor) == [1, 2]

    def test_regularity_required(self):
        with pytest.raises(PreconditionError, match="regular"):
            two_factorize(RootedMultigraph(3, ((0, 1), (1, 2))))


class TestSchreierStructure:
    def test_c4(self):
        sg = schreier_structure(cycle(4))
        assert validate(sg).ok and sg.rank == 1

    def test_k5(self):
        for seed in (0, 1, None):
            sg = schreier_structure(k5(), seed)
            assert validate(sg).ok and forget(sg) == k5()

    def test_petersen_rejected(self):
        with pytest.raises(PreconditionError):
            schreier_structure(petersen())

    def test_seed_diversifies_and_reproduces(self):
        g = random_regular(20, 2, random.Random(4))
        outs = {schreier_structure(g, s) for s in range(10)}
        assert len(outs) > 1
        assert schreier_structure(g, 3) == schreier_structure(g, 3)


class TestCloseUp:
    def test_line_gives_cycle(self):
        for r in (1, 2, 4):
            c = close_up(ball(Forgotten(line()), None, r))
            assert c.n_vertices == 2 * r + 1 and c.is_regular(2)
            assert len(c.edges) == 2 * r + 1

    def test_tree_one_ball(self):
        U = ball(tree(4), None, 1)
        assert sum(U.deficits) == 12
        c = close_up(U, pairing_seed=3)
        assert len(c.edges) == 4 + 6 and c.is_regular(4)
        assert c.edges[:4] == U.edges

    @pytest.mark.parametrize("sel", ["grandfather:3", "tree:4", "forget:z2", "forget:z2diag", "line", "tree:6"])
    def test_cut_parity_on_shipped_graphs(self, sel):
        G = from_selector(sel)
        for r in range(3):
            U = ball(G, None, r)
            assert sum(U.deficits) % 2 == 0
            close_up(U, pairing_seed=r)

    def test_odd_degree_rejected(self):
        with pytest.raises(PreconditionError):
            close_up(ball(tree(3), None, 1))


class TestExtend:
    def test_line_orients_one_way(self):
        ext = extend_structure(line(), 3)
        sg = ext.graph
        assert validate(sg).ok and sg.n_vertices == 7
        # a path labeled by a_1 with a consistent direction: every vertex has at most one out-edge
        tails = [u for u, _ in sg.edges]
        assert len(set(tails)) == len(tails) == 6

    def test_grandfather_radius_two(self):
        ext = extend_structure(grandfather(3), 2, seed=1)
        assert validate(ext.graph).ok and ext.graph.rank == 4

    def test_tree_every_ball_valid(self):
        ext = extend_structure(tree(4), 3, seed=2)
        b = ext.ball
        for v in range(b.n_vertices):
            assert validate(sub_ball(b, v, 1)).ok
        for r, piece in enumerate(ext.chain):
            assert canonical_key(sub_ball(b, b.root, r)) == canonical_key(piece)

    def test_certificate(self):
        ext = extend_structure(Forgotten(z2()), 2, seed=3)
        cert = ext.certificate
        assert cert["radius"] == 2 and cert["searched_radius"] == 3 and cert["seed"] == 3

    def test_budget(self):
        with pytest.raises(BudgetExhausted) as info:
            extend_structure(tree(4), 4, budget=5)
        assert info.value.deepest < 4 and info.value.nodes >= 5

    def test_odd_degree(self):
        with pytest.raises(PreconditionError):
            extend_structure(tree(3), 2)
