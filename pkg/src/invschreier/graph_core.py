"""Rooted multigraphs, r-balls, canonical keys, and root-fixing automorphisms.

Every graph-like object in the package (finite or lazy) exposes
``root``, ``degree(v)`` and ``incident(v)``; the latter lists half-edges.  A
loop shows up twice in ``incident`` (once per end) so that
``len(incident(v)) == degree(v)`` on finite graphs.
"""
from __future__ import annotations

import json
import sys
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

from . import _canon
from .errors import PreconditionError, SizeLimitError

DEFAULT_VERTEX_CAP = 10_000
DEFAULT_ORDER_CAP = 100_000


class HalfEdge(NamedTuple):
    """One end of an edge as seen from a vertex.

    ``edge`` identifies the edge (shared by both ends), ``label`` is the
    generator index or ``None``, and ``outgoing`` says whether the edge is
    oriented away from the vertex (meaningless for unlabeled edges).
    """

    edge: Hashable
    other: Hashable
    label: int | None = None
    outgoing: bool = True


def _adjacency(n: int, edges: Sequence[tuple[int, int]], labels=None) -> list[list[HalfEdge]]:
    adj: list[list[HalfEdge]] = [[] for _ in range(n)]
    for k, (u, v) in enumerate(edges):
        lab = None if labels is None else labels[k]
        adj[u].append(HalfEdge(k, v, lab, True))
        adj[v].append(HalfEdge(k, u, lab, False))
    return adj


def _check_connected(n: int, adj: list[list[HalfEdge]], start: int = 0) -> bool:
    if n == 0:
        return False
    seen = [False] * n
    seen[start] = True
    stack = [start]
    while stack:
        v = stack.pop()
        for h in adj[v]:
            if not seen[h.other]:
                seen[h.other] = True
                stack.append(h.other)
    return all(seen)


@dataclass(frozen=True)
class RootedMultigraph:
    """Finite connected undirected multigraph with a root.

    Edges are unordered pairs stored as ``(min, max)``; a loop ``(v, v)``
    contributes 2 to ``deg(v)``.  Edge ids are positions in ``edges``.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    root: int = 0
    degree_bound: int | None = None

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise PreconditionError("a graph needs at least one vertex")
        norm = []
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            norm.append((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(norm))
        if not 0 <= self.root < n:
            raise PreconditionError(f"root {self.root} is not a vertex")
        if self.degree_bound is not None:
            for v, d in enumerate(self.degrees()):
                if d > self.degree_bound:
                    raise PreconditionError(f"vertex {v} has degree {d} > bound {self.degree_bound}")
        if not _check_connected(n, self._adj):
            raise PreconditionError("graph is not connected")

    rank = None  # unlabeled

    @cached_property
    def _adj(self) -> list[list[HalfEdge]]:
        return _adjacency(self.n_vertices, self.edges)

    def incident(self, v: int) -> list[HalfEdge]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def is_regular(self, k: int | None = None) -> bool:
        degs = set(self.degrees())
        return len(degs) == 1 and (k is None or degs == {k})

    def vertices(self) -> range:
        return range(self.n_vertices)

    def with_root(self, v: int) -> "RootedMultigraph":
        return RootedMultigraph(self.n_vertices, self.edges, v, self.degree_bound)

    def edge_multiset(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Neighborhood:
    """A finite rooted (optionally doubly rooted, optionally labeled) graph.

    Usually the r-ball of some larger graph.  Vertex 0 need not be the root.
    For labeled neighborhoods ``edges[k] = (tail, head)`` carries label
    ``labels[k]``.  ``deficits[v]`` records how many edge-ends at ``v`` lie
    outside the neighborhood; ``source_ids[v]`` is the vertex id in the
    graph the ball was cut from.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    root: int = 0
    radius: int | None = None
    labels: tuple[int, ...] | None = None
    rank: int | None = None
    second_root: int | None = None
    deficits: tuple[int, ...] | None = None
    source_ids: tuple | None = field(default=None, compare=False)
    truncated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.edges):
            raise PreconditionError("labels and edges differ in length")
        if self.labels is not None and self.rank is None:
            object.__setattr__(self, "rank", max(self.labels, default=0))

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    @cached_property
    def _adj(self) -> list[list[HalfEdge]]:
        return _adjacency(self.n_vertices, self.edges, self.labels)

    def incident(self, v: int) -> list[HalfEdge]:
        return self._adj[v]

    def local_degree(self, v: int) -> int:
        return len(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v]) + (self.deficits[v] if self.deficits else 0)

    def vertices(self) -> range:
        return range(self.n_vertices)

    @cached_property
    def dist(self) -> tuple[int, ...]:
        """Distance from the root inside the neighborhood."""
        return tuple(_bfs_dist(self, self.root, self.n_vertices))

    def boundary(self) -> list[int]:
        if not self.deficits:
            return []
        return [v for v in range(self.n_vertices) if self.deficits[v] > 0]

    @property
    def graph(self) -> RootedMultigraph:
        return RootedMultigraph(self.n_vertices, self.edges, self.root)

    def unlabeled(self) -> "Neighborhood":
        return Neighborhood(
            self.n_vertices, self.edges, self.root, self.radius, None, None,
            self.second_root, self.deficits, self.source_ids, self.truncated,
        )

    def with_roots(self, root: int, second_root: int | None = None) -> "Neighborhood":
        return Neighborhood(
            self.n_vertices, self.edges, root, self.radius, self.labels, self.rank,
            second_root, self.deficits, self.source_ids, self.truncated,
        )


def _bfs_dist(graph, start, n: int) -> list[int]:
    dist = [-1] * n
    dist[start] = 0
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for h in graph.incident(v):
            if dist[h.other] < 0:
                dist[h.other] = dist[v] + 1
                queue.append(h.other)
    return dist


def ball(graph, center=None, r: int = 1) -> Neighborhood:
    """The r-ball around ``center`` (default: the graph's root).

    Works for any object with ``incident``/``degree`` (finite graphs,
    Schreier graphs, neighborhoods, lazy graphs).  The result contains every
    vertex within distance ``r`` and every edge among them; the center gets
    index 0 and the others follow in BFS order.
    """
    if r < 0:
        raise PreconditionError("radius must be non-negative")
    if center is None:
        center = graph.root
    n_total = getattr(graph, "n_vertices", None)
    if n_total is not None and not (isinstance(center, int) and 0 <= center < n_total):
        raise PreconditionError(f"center {center!r} is not a vertex")
    index = {center: 0}
    order = [center]
    dist = [0]
    queue = deque([center])
    while queue:
        v = queue.popleft()
        d = dist[index[v]]
        if d == r:
            continue
        for h in graph.incident(v):
            if h.other not in index:
                index[h.other] = len(order)
                order.append(h.other)
                dist.append(d + 1)
                queue.append(h.other)
    labeled = getattr(graph, "rank", None) is not None
    edges: list[tuple[int, int]] = []
    labels: list[int] = []
    seen: set = set()
    local_deg = [0] * len(order)
    for i, v in enumerate(order):
        for h in graph.incident(v):
            j = index.get(h.other)
            if j is None:
                continue
            local_deg[i] += 1
            if h.edge in seen:
                continue
            seen.add(h.edge)
            if labeled:
                edges.append((i, j) if h.outgoing else (j, i))
                labels.append(h.label)
            else:
                edges.append((i, j))
    deficits = tuple(graph.degree(v) - local_deg[i] for i, v in enumerate(order))
    src_trunc = getattr(graph, "truncated", False)
    return Neighborhood(
        len(order), tuple(edges), 0, r,
        tuple(labels) if labeled else None,
        graph.rank if labeled else None,
        None, deficits, tuple(order), bool(src_trunc),
    )


def induced(nbhd: Neighborhood, keep: Iterable[int], root: int, second_root: int | None = None) -> Neighborhood:
    """Sub-neighborhood on the vertex set ``keep`` (renumbered, root first)."""
    keep = set(keep)
    order = [root] + sorted(keep - {root})
    index = {v: i for i, v in enumerate(order)}
    edges, labels = [], []
    local = [0] * len(order)
    for k, (u, v) in enumerate(nbhd.edges):
        if u in index and v in index:
            edges.append((index[u], index[v]))
            local[index[u]] += 1
            local[index[v]] += 1
            if nbhd.labels is not None:
                labels.append(nbhd.labels[k])
    deficits = tuple(nbhd.degree(v) - local[index[v]] for v in order)
    src = nbhd.source_ids
    return Neighborhood(
        len(order), tuple(edges), 0, None,
        tuple(labels) if nbhd.labels is not None else None, nbhd.rank,
        None if second_root is None else index[second_root],
        deficits, tuple(src[v] for v in order) if src else tuple(order),
        nbhd.truncated,
    )


def sub_ball(nbhd: Neighborhood, center: int, r: int) -> Neighborhood:
    """The r-ball of ``center`` computed inside ``nbhd``."""
    dist = _bfs_dist(nbhd, center, nbhd.n_vertices)
    out = induced(nbhd, [v for v in range(nbhd.n_vertices) if 0 <= dist[v] <= r], center)
    return _with_radius(out, r)


def edge_neighborhood(nbhd: Neighborhood, y: int, r: int) -> Neighborhood:
    """Doubly rooted r-neighborhood of the edge (root, y) inside ``nbhd``.

    Exact whenever ``nbhd`` is an (r+1)-ball of the ambient graph.
    """
    dx = nbhd.dist
    dy = _bfs_dist(nbhd, y, nbhd.n_vertices)
    keep = [v for v in range(nbhd.n_vertices) if 0 <= dx[v] <= r or 0 <= dy[v] <= r]
    out = induced(nbhd, keep, nbhd.root, y)
    return _with_radius(out, r)


def _with_radius(nb: Neighborhood, r: int) -> Neighborhood:
    return Neighborhood(
        nb.n_vertices, nb.edges, nb.root, r, nb.labels, nb.rank,
        nb.second_root, nb.deficits, nb.source_ids, nb.truncated,
    )


def root_neighbors(nbhd: Neighborhood) -> list[int]:
    """Distinct vertices adjacent to the root (the root itself excluded)."""
    out = []
    for h in nbhd.incident(nbhd.root):
        if h.other != nbhd.root and h.other not in out:
            out.append(h.other)
    return out


# ---------------------------------------------------------------------------
# canonical keys

CanonicalKey = bytes


def _marks(nbhd: Neighborhood) -> dict[int, int]:
    marks = {nbhd.root: 1}
    if nbhd.second_root is not None:
        marks[nbhd.second_root] = 2
    return marks


def _label_deterministic(nbhd: Neighborhood) -> bool:
    """At most one outgoing and one incoming edge per label at every vertex."""
    seen = set()
    for (u, v), lab in zip(nbhd.edges, nbhd.labels):
        if (u, lab, 1) in seen or (v, lab, -1) in seen:
            return False
        seen.add((u, lab, 1))
        seen.add((v, lab, -1))
    return True


def _slot_maps(nbhd: Neighborhood):
    out: dict[tuple[int, int], int] = {}
    inn: dict[tuple[int, int], int] = {}
    for (u, v), lab in zip(nbhd.edges, nbhd.labels):
        out[(u, lab)] = v
        inn[(v, lab)] = u
    return out, inn


def _labeled_bfs_key(nbhd: Neighborhood) -> CanonicalKey:
    out, inn = _slot_maps(nbhd)
    rank = nbhd.rank or 0
    number = {nbhd.root: 0}
    order = [nbhd.root]
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for lab in range(1, rank + 1):
            for w in (out.get((v, lab)), inn.get((v, lab))):
                if w is not None and w not in number:
                    number[w] = len(order)
                    order.append(w)
    if len(order) != nbhd.n_vertices:
        raise PreconditionError("neighborhood is not connected")
    table = [[number.get(out.get((v, lab)), -1) if (v, lab) in out else -1
              for lab in range(1, rank + 1)] for v in order]
    second = -1 if nbhd.second_root is None else number[nbhd.second_root]
    payload = {"k": "L", "rank": rank, "n": len(order), "second": second, "out": table}
    return json.dumps(payload, separators=(",", ":")).encode()


def _colored(nbhd: Neighborhood, rooted: bool = True) -> _canon.ColoredGraph:
    return _canon.ColoredGraph.build(
        nbhd.n_vertices, nbhd.edges, nbhd.labels, _marks(nbhd) if rooted else None
    )


def _search(nbhd: Neighborhood, canonical: bool, rooted: bool = True,
            vertex_cap: int = DEFAULT_VERTEX_CAP) -> _canon.SearchResult:
    if nbhd.n_vertices > vertex_cap:
        raise SizeLimitError(f"{nbhd.n_vertices} vertices exceeds the cap of {vertex_cap}")
    limit = sys.getrecursionlimit()
    if limit < 4 * nbhd.n_vertices + 200:
        sys.setrecursionlimit(4 * nbhd.n_vertices + 200)
    return _canon.search(_colored(nbhd, rooted), canonical=canonical)


def canonical_key(nbhd: Neighborhood) -> CanonicalKey:
    """Byte string identifying the rooted isomorphism class of ``nbhd``.

    Root, second root and (when present) labels and orientations are
    preserved.  Label-deterministic labeled graphs use a BFS numbering in the
    generator order a_1, a_1^-1, ..., a_n, a_n^-1; everything else goes
    through refinement + backtracking.  Keys decode via
    :func:`neighborhood_from_key`.
    """
    if nbhd.labels is not None and _label_deterministic(nbhd):
        return _labeled_bfs_key(nbhd)
    res = _search(nbhd, canonical=True)
    vinfo, edges = res.encoding
    payload = {
        "k": "C" if nbhd.labels is not None else "U",
        "rank": nbhd.rank or 0,
        "v": [[m, list(loops)] for m, loops in vinfo],
        "e": [[a, b, [list(s) if isinstance(s, tuple) else s for s in sig]] for a, b, sig in edges],
    }
    return json.dumps(payload, separators=(",", ":")).encode()


def neighborhood_from_key(key: CanonicalKey, radius: int | None = None) -> Neighborhood:
    """Rebuild a representative neighborhood from a canonical key."""
    d = json.loads(key)
    if d["k"] == "L":
        edges, labels = [], []
        for v, row in enumerate(d["out"]):
            for lab, w in enumerate(row, start=1):
                if w >= 0:
                    edges.append((v, w))
                    labels.append(lab)
        second = None if d["second"] < 0 else d["second"]
        return Neighborhood(d["n"], tuple(edges), 0, radius, tuple(labels), d["rank"], second)
    labeled = d["k"] == "C"
    edges, labels = [], []
    root, second = 0, None
    for v, (mark, loops) in enumerate(d["v"]):
        if mark == 1:
            root = v
        elif mark == 2:
            second = v
        for lab in loops:
            edges.append((v, v))
            labels.append(lab)
    for a, b, sig in d["e"]:
        for s in sig:
            if labeled:
                lab, sgn = s
                edges.append((a, b) if sgn == 1 else (b, a))
                labels.append(lab)
            else:
                edges.append((a, b))
    return Neighborhood(
        len(d["v"]), tuple(edges), root, radius,
        tuple(labels) if labeled else None, (d["rank"] or None) if labeled else None, second,
    )


def _root_signature(nb: Neighborhood) -> tuple:
    return (nb.second_root is not None, nb.labels is not None, nb.rank if nb.labels is not None else None)


def isomorphic(a: Neighborhood, b: Neighborhood) -> bool:
    """Root- (and label-) preserving isomorphism test.

    Neighborhoods with different root signatures (single vs double root,
    labeled vs unlabeled) are never isomorphic.
    """
    if _root_signature(a) != _root_signature(b):
        return False
    if (a.n_vertices, len(a.edges)) != (b.n_vertices, len(b.edges)):
        return False
    return canonical_key(a) == canonical_key(b)


# ---------------------------------------------------------------------------
# automorphisms and orbit weights

def automorphism_generators(nbhd: Neighborhood, fix_root: bool = True,
                            vertex_cap: int = DEFAULT_VERTEX_CAP) -> list[tuple[int, ...]]:
    """Generators of Aut_x(nbhd) (or of Aut(nbhd) with ``fix_root=False``)."""
    return _search(nbhd, canonical=False, rooted=fix_root, vertex_cap=vertex_cap).generators


def automorphisms_fixing_root(nbhd: Neighborhood, vertex_cap: int = DEFAULT_VERTEX_CAP,
                              order_cap: int = DEFAULT_ORDER_CAP) -> list[tuple[int, ...]]:
    """Every root-fixing automorphism, as vertex permutations (identity first).

    Labels, orientations and the second root (if any) are respected.
    """
    gens = automorphism_generators(nbhd, vertex_cap=vertex_cap)
    try:
        return _canon.close_group(nbhd.n_vertices, gens, order_cap)
    except OverflowError:
        raise SizeLimitError(f"automorphism group has more than {order_cap} elements") from None


def orbits_fixing_root(nbhd: Neighborhood, vertex_cap: int = DEFAULT_VERTEX_CAP) -> list[int]:
    """Orbit representative of each vertex under Aut_x(nbhd)."""
    return _canon.orbit_partition(nbhd.n_vertices, automorphism_generators(nbhd, vertex_cap=vertex_cap))


def orbit_weight(nbhd: Neighborhood, y: int, orbits: Sequence[int] | None = None) -> int:
    """w_U(y): size of the orbit of ``y`` under root-fixing automorphisms."""
    if orbits is None:
        orbits = orbits_fixing_root(nbhd)
    return sum(1 for o in orbits if o == orbits[y])


def is_rigid(nbhd: Neighborhood) -> bool:
    """Whether the (unrooted) automorphism group is trivial."""
    return not automorphism_generators(nbhd, fix_root=False)


def as_neighborhood(graph) -> Neighborhood:
    """View any finite graph (multigraph, Schreier graph) as a neighborhood."""
    if isinstance(graph, Neighborhood):
        return graph
    labels = getattr(graph, "labels", None)
    return Neighborhood(
        graph.n_vertices, tuple(graph.edges), graph.root, None,
        tuple(labels) if labels is not None else None, getattr(graph, "rank", None),
        None, tuple([0] * graph.n_vertices), tuple(range(graph.n_vertices)),
        bool(getattr(graph, "truncated", False)),
    )
