import itertools
import random

import pytest

from corpus import e6, random_schreier
from invschreier.errors import PreconditionError
from invschreier.graph_core import as_neighborhood, ball, canonical_key
from invschreier.lazy import line, z2_with_diagonal
from invschreier.schreier import (
    SchreierGraph,
    a_cycles,
    contains,
    forget,
    from_permutations,
    from_subgroup,
    in_subgroup,
    is_vertex_transitive,
    read_word,
    reverse_cycle,
    reverse_cycles,
    schreier_generators,
    shift_root,
    validate,
)
from invschreier.words import Word

W = Word.parse


def bouquet(n=2):
    return from_permutations([[0]] * n)


def c4():
    return from_permutations([[1, 2, 3, 0]])


def key(sg):
    return canonical_key(as_neighborhood(sg))


class TestValidate:
    def test_bouquet(self):
        assert validate(bouquet()).ok

    def test_c4(self):
        assert validate(c4()).ok

    def test_flipped_edge(self):
        sg = c4()
        edges = list(sg.edges)
        edges[0] = (edges[0][1], edges[0][0])
        rep = validate(SchreierGraph(4, 1, tuple(edges), sg.labels))
        assert not rep.ok and len(rep.violations) == 2

    def test_reports_every_violation(self):
        # two outgoing a_1 edges at 0, none at 1
        sg = SchreierGraph(2, 1, ((0, 1), (0, 1)), (1, 1))
        rep = validate(sg)
        assert not rep.ok and {(v, i) for v, i, _ in rep.violations} == {(0, 1), (1, 1)}


class TestWords:
    def test_c4_reading(self):
        assert read_word(c4(), 0, W("a1^4")) == 0
        assert read_word(c4(), 0, W("a1 a1^-1")) == 0
        assert read_word(c4(), 0, W("a1^-1")) == 3

    def test_bouquet_reading(self):
        assert read_word(bouquet(), 0, W("a1 a2^-3 a1")) == 0

    def test_shift_root(self):
        sg = c4()
        assert shift_root(sg, Word()) == sg
        assert shift_root(shift_root(sg, W("a1^2")), W("a1^2")).root == sg.root
        g = W("a1 a1")
        assert key(shift_root(shift_root(sg, g), g.inverse())) == key(sg)

    def test_contains(self):
        assert contains(c4(), W("a1^4")) and not contains(c4(), W("a1^2"))
        assert contains(bouquet(), W("a1 a2 a1^-5"))
        for k in (1, -1, 3, 7):
            assert contains(line(), Word.gen(1, k)) is False


class TestGenerators:
    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_cycle(self, k):
        sg = from_permutations([[(v + 1) % k for v in range(k)]])
        gens = schreier_generators(sg)
        assert len(gens) == 1 and gens[0].reduce() in (Word.gen(1, k), Word.gen(1, -k))

    def test_bouquet(self):
        assert sorted(schreier_generators(bouquet()), key=str) == [W("a1"), W("a2")]

    def test_e6_rank_and_membership(self):
        gens = schreier_generators(e6())
        assert len(gens) == 12 - 6 + 1
        assert all(contains(e6(), g) for g in gens)


class TestFromSubgroup:
    def test_cycle_round_trip(self):
        sg = from_subgroup([W("a1^4")], 1)
        assert not sg.truncated and sg.n_vertices == 4 and validate(sg).ok
        for k in range(-9, 10):
            assert contains(sg, Word.gen(1, k) if k else Word()) == (k % 4 == 0)

    def test_whole_group(self):
        sg = from_subgroup([W("a1"), W("a2")], 2)
        assert sg.n_vertices == 1 and len(sg.edges) == 2

    def test_trivial_subgroup_tree(self):
        sg = from_subgroup([], 2, depth=3)
        assert sg.truncated and sg.n_vertices == 1 + 4 + 12 + 36
        assert validate(sg).ok
        assert contains(sg, W("a1 a2")) is False
        assert contains(sg, W("a1^5")) is None

    def test_finite_index_generators_round_trip(self):
        # kernel of F_2 -> Z/2 x Z/2, index 4
        klein = from_permutations([[1, 0, 3, 2], [2, 3, 0, 1]])
        gens = schreier_generators(klein)
        sg = from_subgroup(gens, 2)
        assert not sg.truncated and sg.n_vertices == 4 and key(sg) == key(klein)
        back = schreier_generators(sg)
        for g in gens + back:
            assert contains(sg, g) and contains(klein, g)

    def test_infinite_index_is_truncated(self):
        sg = from_subgroup([W("a1^2"), W("a2^2"), W("a1 a2 a1^-1 a2^-1")], 2, depth=2)
        assert sg.truncated and validate(sg).ok

    def test_rejects_rank_overflow(self):
        with pytest.raises(PreconditionError):
            from_subgroup([W("a3")], 2)


class TestCycles:
    def test_c4(self):
        cyc = a_cycles(c4(), 1).cycles
        assert len(cyc) == 1 and len(cyc[0]) == 4 and cyc[0].closed

    def test_bouquet_loop(self):
        cyc = a_cycles(bouquet(), 2).cycles
        assert len(cyc) == 1 and len(cyc[0]) == 1

    def test_e6(self):
        assert [set(c.vertices) for c in a_cycles(e6(), 1).cycles] == [{0, 1, 2}, {3, 4, 5}]

    def test_lazy_line_and_diagonals(self):
        (c,) = a_cycles(line(), 1, radius=3).cycles
        assert not c.closed
        diags = a_cycles(z2_with_diagonal(), 3, radius=1).cycles
        assert len(diags) == 3 and {d.key for d in diags} == {-1, 0, 1}

    def test_reverse(self):
        A = e6()
        c = a_cycles(A, 1).cycles[0]
        B = reverse_cycle(A, c)
        assert validate(B).ok and key(B) != key(A)
        assert reverse_cycle(B, a_cycles(B, 1).cycles[0]) == A

    def test_reverse_loop_is_invisible(self):
        sg = bouquet(1)
        assert key(reverse_cycle(sg, a_cycles(sg, 1).cycles[0])) == key(sg)

    def test_pattern_length_checked(self):
        with pytest.raises(PreconditionError):
            reverse_cycles(e6(), 1, [True])


class TestForget:
    def test_c4_and_bouquet(self):
        assert forget(c4()).degrees() == [2] * 4
        b = forget(bouquet())
        assert b.n_vertices == 1 and b.degree(0) == 4

    def test_counts_preserved(self):
        rng = random.Random(5)
        for _ in range(100):
            sg = random_schreier(rng.randint(1, 12), rng.randint(1, 3), rng)
            g = forget(sg)
            assert (g.n_vertices, len(g.edges), g.root) == (sg.n_vertices, len(sg.edges), sg.root)


def test_vertex_transitivity_probe():
    assert is_vertex_transitive(c4())
    assert is_vertex_transitive(from_permutations([[1, 0, 3, 2], [2, 3, 0, 1]]))
    assert not is_vertex_transitive(from_permutations([[1, 0, 2], [0, 2, 1]]))


def test_lazy_shift_and_membership():
    G = z2_with_diagonal()
    assert contains(G, W("a3 a2^-1 a1^-1"))
    assert read_word(G, G.root, W("a1 a2")) == read_word(G, G.root, W("a3"))
    assert ball(shift_root(G, W("a1")), None, 1).n_vertices == 7


class TestInSubgroup:
    def test_products_of_generators(self):
        gens = [Word.parse("a1^2"), Word.parse("a2 a1 a2^-1")]
        pool = gens + [g.inverse() for g in gens]
        for k in range(4):
            for combo in itertools.product(pool, repeat=k):
                h = Word()
                for g in combo:
                    h = h * g
                assert in_subgroup(gens, 2, h)

    def test_non_members(self):
        gens = [Word.parse("a1^2"), Word.parse("a2")]
        # both leave the core, which is a single a1-cycle of length 2 with an a2 loop at the root
        assert not in_subgroup(gens, 2, Word.parse("a1 a2"))
        assert not in_subgroup(gens, 2, Word.parse("a1"))
        assert in_subgroup(gens, 2, Word.parse("a2 a1^2 a2^-1"))
