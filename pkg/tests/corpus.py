"""Deterministic random corpora and brute-force oracles shared by the tests."""
from __future__ import annotations

import itertools
import random
import time
from collections import Counter

import networkx as nx
from networkx.algorithms.isomorphism import MultiDiGraphMatcher, MultiGraphMatcher

from invschreier import RootedMultigraph, SchreierGraph, from_permutations

SESSION_START = time.monotonic()
CRITERIA: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    """Store the outcome of acceptance criterion n for the end-of-run report."""
    CRITERIA[n] = (ok, detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def _connected(n: int, edges) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(n)}) == 1


def random_regular(n_vertices: int, n: int, rng: random.Random) -> RootedMultigraph:
    """Connected 2n-regular multigraph from a uniformly random stub pairing."""
    while True:
        stubs = [v for v in range(n_vertices) for _ in range(2 * n)]
        rng.shuffle(stubs)
        edges = list(zip(stubs[::2], stubs[1::2]))
        if _connected(n_vertices, edges):
            return RootedMultigraph(n_vertices, tuple(edges), rng.randrange(n_vertices))


def regular_corpus(count: int = 500, seed: int = 2024, max_vertices: int = 200) -> list[RootedMultigraph]:
    """Mix of sizes: a third tiny (<= 6), a third small (<= 30), the rest up to ``max_vertices``."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = 1 + k % 4
        tier = k % 3
        hi = {0: 6, 1: 30, 2: max_vertices}[tier]
        out.append(random_regular(rng.randint(1, hi), n, rng))
    return out


def has_loop(g) -> bool:
    return any(u == v for u, v in g.edges)


def has_parallel(g) -> bool:
    c = Counter(tuple(sorted(e)) for e in g.edges if e[0] != e[1])
    return any(m > 1 for m in c.values())


def random_schreier(n_vertices: int, rank: int, rng: random.Random) -> SchreierGraph:
    """Connected Schreier graph from ``rank`` uniformly random permutations."""
    while True:
        perms = []
        for _ in range(rank):
            p = list(range(n_vertices))
            rng.shuffle(p)
            perms.append(p)
        edges = [(v, p[v]) for p in perms for v in range(n_vertices)]
        if _connected(n_vertices, edges):
            return from_permutations(perms, rng.randrange(n_vertices))


# ---------------------------------------------------------------------------
# oracles

def nx_multigraph(g) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.n_vertices))
    h.add_edges_from(g.edges)
    return h


def nx_automorphism_count(g, fix_root: bool = True) -> int:
    """Number of (root-fixing) automorphisms of an unlabeled multigraph, via VF2."""
    h = nx_multigraph(g)
    for v in h:
        h.nodes[v]["mark"] = int(fix_root and v == g.root)
    nm = lambda a, b: a["mark"] == b["mark"]  # noqa: E731
    em = lambda a, b: len(a) == len(b)  # noqa: E731
    return sum(1 for _ in MultiGraphMatcher(h, h, node_match=nm, edge_match=em).isomorphisms_iter())


def nx_labeled_automorphisms(sg) -> list[dict]:
    """All root-fixing, label- and orientation-preserving automorphisms, via VF2."""
    h = nx.MultiDiGraph()
    h.add_nodes_from(range(sg.n_vertices))
    for v in h:
        h.nodes[v]["root"] = v == sg.root
    for (u, v), i in zip(sg.edges, sg.labels):
        h.add_edge(u, v, label=i)
    nm = lambda a, b: a["root"] == b["root"]  # noqa: E731
    em = lambda a, b: sorted(d["label"] for d in a.values()) == sorted(d["label"] for d in b.values())  # noqa: E731
    return list(MultiDiGraphMatcher(h, h, node_match=nm, edge_match=em).isomorphisms_iter())


def brute_canonical(n: int, edges) -> tuple:
    """Greatest relabeled multiplicity matrix over all permutations that sort a vertex invariant.

    The invariant (loop count, neighbor multiplicities) is preserved by any
    isomorphism, so restricting to invariant-sorting permutations still gives
    a complete invariant.
    """
    mult = Counter(tuple(sorted(e)) for e in edges)
    inv = []
    for v in range(n):
        loops = mult.get((v, v), 0)
        nbr = sorted(m for (a, b), m in mult.items() if a != b and v in (a, b))
        inv.append((loops, tuple(nbr)))
    classes = [[v for v in range(n) if inv[v] == key] for key in sorted(set(inv))]
    M = [[0] * n for _ in range(n)]
    for (a, b), m in mult.items():
        M[a][b] = M[b][a] = m
    best = None
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in parts for v in part]
        form = tuple(M[order[i]][order[j]] for i in range(n) for j in range(i, n))
        if best is None or form > best:
            best = form
    return best


def four_regular_multigraphs(max_vertices: int = 6) -> list[tuple[int, tuple]]:
    """Every connected 4-regular multigraph (loops allowed) on <= max_vertices vertices, up to isomorphism."""
    found = []
    for n in range(1, max_vertices + 1):
        seen = set()

        def fill(rem, edges):
            v = next((u for u in range(n) if rem[u]), None)
            if v is None:
                if _connected(n, edges):
                    c = brute_canonical(n, edges)
                    if c not in seen:
                        seen.add(c)
                        found.append((n, tuple(edges)))
                return
            # canonical order: partners non-decreasing for the first open vertex
            lo = edges[-1][1] if edges and edges[-1][0] == v else v
            for w in range(lo, n):
                need = 2 if w == v else 1
                if rem[w] < need or (w != v and rem[v] < 1):
                    continue
                rem[v] -= 1
                rem[w] -= 1
                edges.append((v, w))
                fill(rem, edges)
                edges.pop()
                rem[v] += 1
                rem[w] += 1

        fill([4] * n, [])
    return found


def brute_two_factors(n: int, edges) -> list[frozenset]:
    """Edge-id sets forming spanning 2-regular subgraphs (loops count twice)."""
    m = len(edges)
    out = []
    for subset in itertools.combinations(range(m), n):
        deg = [0] * n
        for e in subset:
            u, v = edges[e]
            deg[u] += 1
            deg[v] += 1
        if all(d == 2 for d in deg):
            out.append(frozenset(subset))
    return out


def path3(root: int = 1) -> RootedMultigraph:
    return RootedMultigraph(3, ((0, 1), (1, 2)), root)


def cycle(k: int, root: int = 0) -> RootedMultigraph:
    return RootedMultigraph(k, tuple((v, (v + 1) % k) for v in range(k)), root)


def e6() -> SchreierGraph:
    return from_permutations([[1, 2, 0, 4, 5, 3], [3, 4, 5, 1, 2, 0]])


def rigid_control() -> SchreierGraph:
    """Rank-2 Schreier graph on 9 vertices with a rigid underlying graph and two a_1-cycles.

    Found by random search over permutation pairs, kept only after the VF2
    oracle reported a trivial automorphism group; frozen here.
    """
    a1 = [1, 8, 3, 6, 5, 7, 2, 0, 4]
    a2 = [0, 5, 6, 1, 2, 7, 8, 4, 3]
    return from_permutations([a1, a2])


def nx_root_orbit(nb, y, candidates=None) -> set:
    """Vertices z such that some root-fixing automorphism of ``nb`` maps y to z (VF2).

    Nodes are coloured by their distances to the root and to y (resp. z);
    any automorphism fixing the root and sending y to z preserves these.
    """
    h = nx_multigraph(nb)
    to_root = nx.single_source_shortest_path_length(h, nb.root)
    em = lambda a, b: len(a) == len(b)  # noqa: E731
    nm = lambda a, b: a["c"] == b["c"]  # noqa: E731

    def coloured(t):
        g = h.copy()
        dt = nx.single_source_shortest_path_length(h, t)
        for v in g:
            g.nodes[v]["c"] = (to_root[v], dt[v])
        return g

    src = coloured(y)
    out = set()
    for z in range(nb.n_vertices) if candidates is None else candidates:
        if to_root[z] != to_root[y] or nb.degree(z) != nb.degree(y):
            continue
        if MultiGraphMatcher(src, coloured(z), node_match=nm, edge_match=em).is_isomorphic():
            out.add(z)
    return out
