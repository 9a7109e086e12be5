"""Labeling even-regular graphs by free-group generators.

Finite graphs go through Euler tour -> balanced orientation -> bipartite
double -> n perfect matchings; matching k becomes generator a_k.  Balls of
infinite graphs are handled by closing them up into finite regular graphs
(for value hints) and a depth-first search over radius levels that only
keeps labelings extendable one level further.
"""
from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExhausted, InternalError, PreconditionError
from .graph_core import Neighborhood, RootedMultigraph, _adjacency, _check_connected, ball
from .lazy import Forgotten
from .schreier import SchreierGraph, validate

Traversal = tuple[int, int, int]  # (edge id, tail, head)


def _as_multigraph(g) -> RootedMultigraph:
    if isinstance(g, RootedMultigraph):
        return g
    if isinstance(g, Neighborhood):
        return g.graph
    return RootedMultigraph(g.n_vertices, tuple(g.edges), getattr(g, "root", 0))


def _regular_rank(g: RootedMultigraph) -> int:
    degs = set(g.degrees())
    if len(degs) != 1:
        raise PreconditionError(f"graph is not regular (degrees {sorted(degs)})")
    d = degs.pop()
    if d % 2:
        raise PreconditionError(f"graph is {d}-regular; an even degree is required")
    return d // 2


# ---------------------------------------------------------------------------
# Euler tours and orientations

def euler_tour(g, start: int | None = None, rng: random.Random | None = None) -> list[Traversal]:
    """Closed trail through every edge exactly once (Hierholzer).

    Args:
        g: Connected multigraph with all degrees even.
        start: First vertex of the tour (default: the root).
        rng: If given, shuffles the adjacency order.

    Returns:
        Traversals ``(edge id, tail, head)`` in tour order; consecutive
        traversals share a vertex and the last one returns to the start.
    """
    g = _as_multigraph(g)
    adj = _adjacency(g.n_vertices, g.edges)
    for v, a in enumerate(adj):
        if len(a) % 2:
            raise PreconditionError(f"vertex {v} has odd degree {len(a)}")
    if not _check_connected(g.n_vertices, adj):
        raise PreconditionError("graph is not connected")
    if rng is not None:
        adj = [rng.sample(a, len(a)) for a in adj]
    if start is None:
        start = g.root
    used = [False] * len(g.edges)
    ptr = [0] * g.n_vertices
    stack: list[tuple[int, Traversal | None]] = [(start, None)]
    circuit: list[Traversal] = []
    while stack:
        v, via = stack[-1]
        a = adj[v]
        while ptr[v] < len(a) and used[a[ptr[v]].edge]:
            ptr[v] += 1
        if ptr[v] < len(a):
            h = a[ptr[v]]
            used[h.edge] = True
            stack.append((h.other, (h.edge, v, h.other)))
        else:
            stack.pop()
            if via is not None:
                circuit.append(via)
    circuit.reverse()
    return circuit


@dataclass(frozen=True)
class BalancedOrientation:
    """``pairs[e] = (tail, head)`` for every edge id ``e``."""

    n_vertices: int
    pairs: tuple[tuple[int, int], ...]

    def in_out(self) -> tuple[list[int], list[int]]:
        indeg = [0] * self.n_vertices
        outdeg = [0] * self.n_vertices
        for u, v in self.pairs:
            outdeg[u] += 1
            indeg[v] += 1
        return indeg, outdeg


def orient_by_tour(g, tour: Sequence[Traversal]) -> BalancedOrientation:
    """Orient each edge the way the tour crosses it; in = out everywhere."""
    g = _as_multigraph(g)
    pairs: list[tuple[int, int] | None] = [None] * len(g.edges)
    for e, u, v in tour:
        pairs[e] = (u, v)
    if any(p is None for p in pairs):
        raise PreconditionError("tour misses an edge")
    orient = BalancedOrientation(g.n_vertices, tuple(pairs))  # type: ignore[arg-type]
    indeg, outdeg = orient.in_out()
    if indeg != outdeg:
        raise InternalError("tour orientation is not balanced")
    return orient


# ---------------------------------------------------------------------------
# bipartite matchings

def _max_matching(n: int, edges: Sequence[tuple[int, int]], alive: Sequence[bool],
                  adj: list[list[tuple[int, int]]]) -> list[int | None]:
    """Hopcroft-Karp on an n+n bipartite multigraph; returns the matched edge per left vertex."""
    match_l: list[int | None] = [None] * n
    match_r: list[int | None] = [None] * n
    inf = float("inf")
    while True:
        dist = [inf] * n
        queue = deque()
        for u in range(n):
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
        found = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= found:
                continue
            for r, e in adj[u]:
                if not alive[e]:
                    continue
                f = match_r[r]
                if f is None:
                    found = min(found, dist[u] + 1)
                else:
                    w = edges[f][0]
                    if dist[w] == inf:
                        dist[w] = dist[u] + 1
                        queue.append(w)
        if found == inf:
            return match_l
        it = [0] * n
        for u in range(n):
            if match_l[u] is not None:
                continue
            stack, path = [u], []
            while stack:
                x = stack[-1]
                if it[x] >= len(adj[x]):
                    dist[x] = inf
                    stack.pop()
                    if path:
                        path.pop()
                    continue
                r, e = adj[x][it[x]]
                it[x] += 1
                if not alive[e]:
                    continue
                f = match_r[r]
                if f is None:
                    if dist[x] + 1 == found:
                        path.append(e)
                        for x2, e2 in zip(stack, path):
                            match_l[x2] = e2
                            match_r[edges[e2][1]] = e2
                        break
                else:
                    w = edges[f][0]
                    if dist[w] == dist[x] + 1:
                        path.append(e)
                        stack.append(w)


def perfect_matchings(n: int, edges: Sequence[tuple[int, int]], k: int) -> list[list[int]]:
    """Split a k-regular bipartite multigraph into k perfect matchings.

    Args:
        n: Size of each side.
        edges: ``(left, right)`` pairs; list positions are edge ids.
        k: The common degree.

    Returns:
        ``k`` lists of edge ids; list ``j`` holds the edge matched at each
        left vertex in round ``j``.
    """
    if len(edges) != n * k:
        raise PreconditionError(f"expected {n * k} edges for a {k}-regular bipartite graph")
    left = [0] * n
    right = [0] * n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (u, r) in enumerate(edges):
        left[u] += 1
        right[r] += 1
        adj[u].append((r, e))
    if set(left) | set(right) != {k} and n > 0:
        raise PreconditionError("bipartite graph is not regular")
    alive = [True] * len(edges)
    out = []
    for _ in range(k):
        m = _max_matching(n, edges, alive, adj)
        if any(e is None for e in m):
            raise InternalError("regular bipartite graph without a perfect matching")
        for e in m:
            alive[e] = False  # type: ignore[index]
        out.append(list(m))  # type: ignore[arg-type]
    return out


# ---------------------------------------------------------------------------
# 2-factorization and Schreier structures

@dataclass(frozen=True)
class TwoFactorization:
    """``factor[e]`` in ``1..n`` for each edge id, plus the orientation used."""

    factor: tuple[int, ...]
    orientation: BalancedOrientation

    @property
    def n_factors(self) -> int:
        return max(self.factor, default=0)

    def factor_edges(self, k: int) -> list[int]:
        return [e for e, f in enumerate(self.factor) if f == k]


def two_factorize(g, rng: random.Random | None = None) -> TwoFactorization:
    """Split a connected 2n-regular multigraph into n spanning 2-regular factors."""
    g = _as_multigraph(g)
    n = _regular_rank(g)
    start = None if rng is None else rng.randrange(g.n_vertices)
    orient = orient_by_tour(g, euler_tour(g, start, rng))
    # bipartite double: out-copy of the tail to in-copy of the head
    matchings = perfect_matchings(g.n_vertices, orient.pairs, n)
    factor = [0] * len(g.edges)
    for k, m in enumerate(matchings, start=1):
        for e in m:
            factor[e] = k
    tf = TwoFactorization(tuple(factor), orient)
    for k in range(1, n + 1):
        deg = [0] * g.n_vertices
        for e in tf.factor_edges(k):
            u, v = g.edges[e]
            deg[u] += 1
            deg[v] += 1
        if any(d != 2 for d in deg):
            raise InternalError(f"factor {k} is not spanning 2-regular")
    return tf


def schreier_structure(g, seed: int | None = 0) -> SchreierGraph:
    """Schreier structure on a finite connected rooted 2n-regular multigraph.

    Edge ``e`` keeps its id, is oriented along an Euler tour and labeled by
    the matching that contains it.  ``seed`` shuffles the tour start, the
    adjacency order and the factor order; ``None`` uses the plain order.
    """
    g = _as_multigraph(g)
    rng = None if seed is None else random.Random(seed)
    tf = two_factorize(g, rng)
    n = tf.n_factors
    perm = list(range(1, n + 1))
    if rng is not None:
        rng.shuffle(perm)
    labels = tuple(perm[f - 1] for f in tf.factor)
    sg = SchreierGraph(g.n_vertices, n, tf.orientation.pairs, labels, g.root)
    report = validate(sg)
    if not report:
        raise InternalError(f"pipeline produced an invalid structure: {report.summary()}")
    return sg


# ---------------------------------------------------------------------------
# closing up balls of infinite graphs

def close_up(U: Neighborhood, pairing_seed: int | None = None) -> RootedMultigraph:
    """Pair the cut-set slots of ``U`` into new edges.

    Slots ``(vertex, j)`` for ``j < deficit`` are listed in order, shuffled
    by ``pairing_seed`` when given, and joined two by two.  Edges of ``U``
    keep their ids; the new edges follow.
    """
    if U.deficits is None:
        raise PreconditionError("neighborhood carries no boundary deficits")
    degs = {U.degree(v) for v in range(U.n_vertices)}
    if len(degs) != 1 or next(iter(degs)) % 2:
        raise PreconditionError(f"source graph is not even-regular (degrees {sorted(degs)})")
    slots = [(v, j) for v in range(U.n_vertices) for j in range(U.deficits[v])]
    if len(slots) % 2:
        raise InternalError(f"cut set has odd size {len(slots)}")
    if pairing_seed is not None:
        random.Random(pairing_seed).shuffle(slots)
    new = [(slots[k][0], slots[k + 1][0]) for k in range(0, len(slots), 2)]
    closed = RootedMultigraph(U.n_vertices, tuple(U.edges) + tuple(new), U.root)
    if not closed.is_regular(next(iter(degs))):
        raise InternalError("closed-up graph is not regular")
    return closed


# ---------------------------------------------------------------------------
# radius-by-radius extension

@dataclass
class Extension:
    """Outcome of :func:`extend_structure`.

    ``ball`` is the labeled R-ball; ``chain[r]`` its restriction to radius r.
    ``certificate`` records the radii searched and the search effort.
    """

    ball: Neighborhood
    chain: list[Neighborhood]
    certificate: dict = field(default_factory=dict)

    @property
    def graph(self) -> SchreierGraph:
        b = self.ball
        boundary = [v for v in range(b.n_vertices) if b.deficits and b.deficits[v] > 0]
        return SchreierGraph(b.n_vertices, b.rank, b.edges, b.labels, b.root,
                             truncated=bool(boundary), boundary=frozenset(boundary))


def _prefix(big: Neighborhood, dist: Sequence[int], r: int, edge_ids: Sequence[int],
            orient=None, labels=None, rank=None) -> Neighborhood:
    m = sum(1 for d in dist if d <= r)  # BFS order: the r-ball is a prefix
    edges, labs, local = [], [], [0] * m
    for e in edge_ids:
        u, v = big.edges[e] if orient is None else orient[e]
        edges.append((u, v))
        local[u] += 1
        local[v] += 1
        if labels is not None:
            labs.append(labels[e])
    deficits = tuple(big.degree(v) - local[v] for v in range(m))
    return Neighborhood(m, tuple(edges), 0, r, tuple(labs) if labels is not None else None,
                        rank, None, deficits, tuple(big.source_ids[:m]) if big.source_ids else None)


class _LevelSearch:
    """Iterative depth-first filling of radius levels with slot constraints."""

    def __init__(self, big, dist, levels, n, hints, rng, budget):
        self.big, self.dist, self.levels, self.n = big, dist, levels, n
        self.hints, self.rng, self.budget = hints, rng, budget
        nv = big.n_vertices
        self.out_slot = [[False] * (n + 1) for _ in range(nv)]
        self.in_slot = [[False] * (n + 1) for _ in range(nv)]
        self.orient: list[tuple[int, int] | None] = [None] * len(big.edges)
        self.label = [0] * len(big.edges)
        self.at_vertex: list[list[int]] = [[] for _ in range(nv)]
        for e, (u, v) in enumerate(big.edges):
            self.at_vertex[u].append(e)
            if v != u:
                self.at_vertex[v].append(e)
        self.layer: dict[int, list[int]] = {}
        for v in range(nv):
            self.layer.setdefault(dist[v], []).append(v)
        self.nodes = 0
        self.deepest = -1
        self.failed: set = set()

    def options(self, e: int) -> list[tuple[int, tuple[int, int]]]:
        u, v = self.big.edges[e]
        pairs = [(u, v)] if u == v else [(u, v), (v, u)]
        out_slot, in_slot = self.out_slot, self.in_slot
        return [(i, (a, b)) for i in range(1, self.n + 1) for a, b in pairs
                if not out_slot[a][i] and not in_slot[b][i]]

    def frontier(self, r: int) -> tuple:
        return (r,) + tuple((tuple(self.out_slot[v]), tuple(self.in_slot[v]))
                            for v in self.layer.get(r, ()))

    def set_edge(self, e, i, pair, on):
        a, b = pair
        self.out_slot[a][i] = on
        self.in_slot[b][i] = on
        self.orient[e] = pair if on else None
        self.label[e] = i if on else 0

    def touch(self, pair, todo, count, heap):
        for v in set(pair):
            for f in self.at_vertex[v]:
                if f in todo:
                    count[f] = len(self.options(f))
                    heapq.heappush(heap, (count[f], f))

    def run(self, depth: int) -> None:
        # frames: ("edge", e, options, index) or ("level", r, frontier key)
        frames: list[tuple] = []
        r = 0
        todo = set(self.levels[0])
        count = {e: len(self.options(e)) for e in todo}
        heap = [(c, e) for e, c in count.items()]
        heapq.heapify(heap)
        saved: list[tuple] = []
        while True:
            dead = False
            if not todo:
                self.deepest = max(self.deepest, r)
                if r == depth:
                    return
                key = self.frontier(r)
                if key in self.failed:
                    dead = True
                else:
                    frames.append(("level", r, key))
                    saved.append((todo, count, heap))
                    r += 1
                    todo = set(self.levels[r])
                    count = {e: len(self.options(e)) for e in todo}
                    heap = [(c, e) for e, c in count.items()]
                    heapq.heapify(heap)
                    continue
            else:
                while heap and (heap[0][1] not in todo or heap[0][0] != count[heap[0][1]]):
                    heapq.heappop(heap)
                e = heap[0][1]
                opts = self.options(e)
                if opts:
                    hint = self.hints[e]
                    rest = [o for o in opts if o != hint]
                    self.rng.shuffle(rest)
                    ordered = ([hint] if hint in opts else []) + rest
                    todo.discard(e)
                    frames.append(("edge", e, ordered, -1))
                else:
                    dead = True
            if dead:
                # unwind until some edge has an untried option
                while True:
                    if not frames:
                        raise InternalError("no Schreier structure exists on this ball")
                    top = frames[-1]
                    if top[0] == "level":
                        frames.pop()
                        self.failed.add(top[2])
                        r = top[1]
                        todo, count, heap = saved.pop()
                        continue
                    _, e, ordered, idx = top
                    if idx >= 0:
                        i, pair = ordered[idx]
                        self.set_edge(e, i, pair, False)
                        self.touch(pair, todo, count, heap)
                    if idx + 1 < len(ordered):
                        break
                    frames.pop()
                    todo.add(e)
                    count[e] = len(self.options(e))
                    heapq.heappush(heap, (count[e], e))
            # advance the top edge frame to its next option
            _, e, ordered, idx = frames[-1]
            idx += 1
            frames[-1] = ("edge", e, ordered, idx)
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExhausted(
                    f"search budget of {self.budget} assignments exhausted; "
                    f"deepest complete radius {self.deepest}",
                    nodes=self.nodes, deepest=self.deepest,
                )
            i, pair = ordered[idx]
            self.set_edge(e, i, pair, True)
            self.touch(pair, todo, count, heap)


def extend_structure(G, R: int, seed: int = 0, budget: int = 10**6,
                     lookahead: int = 1) -> Extension:
    """Schreier structure on the R-ball of an infinite 2n-regular graph.

    Levels r = 0, 1, ... are the edges whose farther endpoint sits at
    distance r from the root.  Each level is filled depth first, one edge
    at a time (fewest feasible choices first), keeping at most one outgoing
    and one incoming a_i-edge per vertex.  Choices are tried starting with
    the one a Schreier structure of ``close_up(U_r)`` suggests.  A level
    counts as done only if the search reaches R + ``lookahead``, and failed
    frontier states are memoized.

    Raises:
        PreconditionError: ``G`` is not even-regular.
        BudgetExhausted: more than ``budget`` edge assignments were tried.
    """
    if R < 0 or lookahead < 0:
        raise PreconditionError("radius and lookahead must be non-negative")
    if getattr(G, "rank", None) is not None:
        G = Forgotten(G)
    d = G.degree(G.root)
    if d % 2:
        raise PreconditionError(f"graph is {d}-regular; an even degree is required")
    n = d // 2
    depth = R + lookahead
    big = ball(G, G.root, depth)
    dist = [0] * big.n_vertices
    for v in range(big.n_vertices):
        dist[v] = big.dist[v]
    levels: list[list[int]] = [[] for _ in range(depth + 1)]
    for e, (u, v) in enumerate(big.edges):
        levels[max(dist[u], dist[v])].append(e)
    rng = random.Random(seed)

    # per-level value hints from closing up U_r
    hints: dict[int, tuple[int, tuple[int, int]]] = {}
    for r in range(depth + 1):
        ids = [e for lv in levels[: r + 1] for e in lv]
        U = _prefix(big, dist, r, ids)
        sg = schreier_structure(close_up(U, rng.randrange(2**31)), rng.randrange(2**31))
        pos = {k: j for j, k in enumerate(ids)}
        for k in levels[r]:
            hints[k] = (sg.labels[pos[k]], sg.edges[pos[k]])

    search = _LevelSearch(big, dist, levels, n, hints, rng, budget)
    search.run(depth)
    orient, label = search.orient, search.label
    chain = []
    for r in range(R + 1):
        ids = [e for lv in levels[: r + 1] for e in lv]
        chain.append(_prefix(big, dist, r, ids, orient, label, n))
    certificate = {
        "radius": R,
        "lookahead": lookahead,
        "searched_radius": depth,
        "nodes": search.nodes,
        "memoized_failures": len(search.failed),
        "seed": seed,
    }
    return Extension(chain[R], chain, certificate)
