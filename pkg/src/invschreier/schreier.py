"""Schreier graphs of the free group and the subgroup <-> graph dictionary.

A Schreier structure orients every edge and labels it by a generator index
so that each vertex has exactly one outgoing and one incoming edge per
label.  Reading a word from the root and checking whether the walk closes up
decides membership in the subgroup the graph encodes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .errors import OutsideGraphError, PreconditionError
from .graph_core import (
    HalfEdge,
    Neighborhood,
    RootedMultigraph,
    _adjacency,
    _check_connected,
)
from .lazy import Forgotten, LabeledLazyGraph, LazyGraph, ReversedCycles
from .words import Word


@dataclass(frozen=True)
class SchreierGraph:
    """Finite rooted graph with oriented, generator-labeled edges.

    ``edges[k] = (tail, head)`` carries label ``labels[k]`` in ``1..rank``.
    A truncated graph (e.g. a finite piece of an infinite Schreier graph)
    may miss edge slots at the vertices listed in ``boundary``; walks that
    need a missing slot raise :class:`OutsideGraphError`.
    """

    n_vertices: int
    rank: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[int, ...]
    root: int = 0
    truncated: bool = False
    boundary: frozenset = field(default=frozenset())

    def __post_init__(self):
        n = self.n_vertices
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        if n < 1:
            raise PreconditionError("a Schreier graph needs at least one vertex")
        if len(self.edges) != len(self.labels):
            raise PreconditionError("edges and labels differ in length")
        for (u, v), lab in zip(self.edges, self.labels):
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if not 1 <= lab <= self.rank:
                raise PreconditionError(f"label {lab} outside 1..{self.rank}")
        if not 0 <= self.root < n:
            raise PreconditionError(f"root {self.root} is not a vertex")
        if not _check_connected(n, self._adj):
            raise PreconditionError("graph is not connected")

    @cached_property
    def _adj(self) -> list[list[HalfEdge]]:
        return _adjacency(self.n_vertices, self.edges, self.labels)

    @cached_property
    def _slots(self) -> tuple[list[list], list[list]]:
        out = [[None] * (self.rank + 1) for _ in range(self.n_vertices)]
        inn = [[None] * (self.rank + 1) for _ in range(self.n_vertices)]
        for (u, v), lab in zip(self.edges, self.labels):
            if out[u][lab] is None:
                out[u][lab] = v
            if inn[v][lab] is None:
                inn[v][lab] = u
        return out, inn

    def incident(self, v: int) -> list[HalfEdge]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return 2 * self.rank if self.truncated else len(self._adj[v])

    def vertices(self) -> range:
        return range(self.n_vertices)

    def step(self, v: int, letter: int) -> int:
        out, inn = self._slots
        i = abs(letter)
        if not 1 <= i <= self.rank:
            raise PreconditionError(f"letter {letter} outside rank {self.rank}")
        w = out[v][i] if letter > 0 else inn[v][i]
        if w is None:
            raise OutsideGraphError(f"no {'outgoing' if letter > 0 else 'incoming'} a{i}-edge at vertex {v}")
        return w

    def cycle_key(self, v: int, i: int) -> int:
        return self._cycle_index(i)[v]

    def _cycle_index(self, i: int) -> list[int]:
        cache = self.__dict__.setdefault("_cycle_cache", {})
        if i not in cache:
            idx = [-1] * self.n_vertices
            for c in a_cycles(self, i).cycles:
                for v in c.vertices:
                    idx[v] = c.key
            cache[i] = idx
        return cache[i]

    def with_root(self, v: int) -> "SchreierGraph":
        return SchreierGraph(self.n_vertices, self.rank, self.edges, self.labels, v,
                             self.truncated, self.boundary)


# ---------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    ok: bool
    violations: list[tuple[int, int, str]]

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "valid"
        head = ", ".join(f"vertex {v} label a{i}: {why}" for v, i, why in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        return f"{len(self.violations)} violations: {head}{more}"


def validate(sg) -> ValidationReport:
    """Check the one-in/one-out-per-label condition at every vertex.

    Boundary vertices of truncated graphs and of labeled neighborhoods
    (positive deficit) may miss slots but never have duplicates.  Never
    raises on a malformed labeling; the report lists each offending
    (vertex, label) pair once.
    """
    n, rank = sg.n_vertices, sg.rank or 0
    if isinstance(sg, Neighborhood):
        if sg.labels is None:
            return ValidationReport(False, [(v, 0, "unlabeled") for v in range(n)])
        partial = set(sg.boundary())
    else:
        partial = set(sg.boundary) if sg.truncated else set()
    n_out = [[0] * (rank + 1) for _ in range(n)]
    n_in = [[0] * (rank + 1) for _ in range(n)]
    violations = []
    for (u, v), lab in zip(sg.edges, sg.labels):
        if not 1 <= lab <= rank:
            violations.append((u, lab, "label out of range"))
            continue
        n_out[u][lab] += 1
        n_in[v][lab] += 1
    for v in range(n):
        for i in range(1, rank + 1):
            o, k = n_out[v][i], n_in[v][i]
            problems = []
            if o > 1:
                problems.append(f"{o} outgoing")
            if k > 1:
                problems.append(f"{k} incoming")
            if v not in partial:
                if o == 0:
                    problems.append("no outgoing")
                if k == 0:
                    problems.append("no incoming")
            if problems:
                violations.append((v, i, ", ".join(problems)))
    return ValidationReport(not violations, violations)


def label_permutations(sg) -> dict[int, list[int | None]]:
    """For each label, the map v -> head of v's outgoing edge (None if absent)."""
    rank = sg.rank
    maps = {i: [None] * sg.n_vertices for i in range(1, rank + 1)}
    for (u, v), lab in zip(sg.edges, sg.labels):
        maps[lab][u] = v
    return maps


# ---------------------------------------------------------------------------
# words, roots and subgroups

def read_word(sg, start, w: Iterable[int]):
    """Endpoint of the path spelling ``w`` from ``start``.

    a_i follows the outgoing i-edge, a_i^-1 the incoming one backwards.
    """
    v = start
    for letter in w:
        v = sg.step(v, letter)
    return v


def shift_root(sg, g: Iterable[int]):
    """Move the root along ``g``: the conjugation action (g, H) -> g^-1 H g read from the root."""
    return sg.with_root(read_word(sg, sg.root, g))


def contains(sg, h: Iterable[int]) -> bool | None:
    """Whether ``h`` lies in the subgroup encoded by ``sg``.

    Returns ``None`` when the walk leaves a truncated graph (the answer is
    then unknown, never guessed).
    """
    h = Word(h).reduce()
    try:
        return read_word(sg, sg.root, h) == sg.root
    except OutsideGraphError:
        return None


def in_subgroup(gens: Sequence[Iterable[int]], rank: int, h: Iterable[int]) -> bool:
    """Membership in <gens> <= F_rank.

    On the folded core graph a reduced word either spells a loop at the
    root or does not; leaving the core settles the answer as no.
    """
    return contains(from_subgroup(gens, rank), h) is True


def spanning_tree_words(sg: SchreierGraph) -> tuple[list[Word | None], set[int]]:
    """BFS tree from the root: tree-path word to every vertex, and tree edge ids."""
    words: list[Word | None] = [None] * sg.n_vertices
    words[sg.root] = Word()
    tree_edges: set[int] = set()
    queue = deque([sg.root])
    while queue:
        v = queue.popleft()
        for h in sg.incident(v):
            if words[h.other] is None:
                letter = h.label if h.outgoing else -h.label
                words[h.other] = words[v] * (letter,)
                tree_edges.add(h.edge)
                queue.append(h.other)
    return words, tree_edges


def schreier_generators(sg: SchreierGraph) -> list[Word]:
    """Free basis of pi_1(sg, root) from a BFS spanning tree.

    One generator w(u) a_i w(v)^-1 per non-tree edge u -> v labeled a_i;
    there are |E| - |V| + 1 of them.
    """
    words, tree_edges = spanning_tree_words(sg)
    out = []
    for k, ((u, v), lab) in enumerate(zip(sg.edges, sg.labels)):
        if k in tree_edges:
            continue
        out.append((words[u] * (lab,) * words[v].inverse()).reduce())
    return out


def _fold(n_vertices: int, edges: list[tuple[int, int, int]]) -> tuple[list[int], set[tuple[int, int, int]]]:
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    current = set(edges)
    while True:
        current = {(find(u), lab, find(v)) for u, lab, v in current}
        out: dict[tuple[int, int], int] = {}
        inn: dict[tuple[int, int], int] = {}
        merge = None
        for u, lab, v in sorted(current):
            w = out.setdefault((u, lab), v)
            if w != v:
                merge = (w, v)
                break
            w = inn.setdefault((v, lab), u)
            if w != u:
                merge = (w, u)
                break
        if merge is None:
            return [find(x) for x in range(n_vertices)], current
        a, b = find(merge[0]), find(merge[1])
        parent[max(a, b)] = min(a, b)


def from_subgroup(gens: Sequence[Iterable[int]], rank: int, depth: int = 0) -> SchreierGraph:
    """Schreier graph of H = <gens> <= F_rank via Stallings folding.

    The wedge of petals spelling the generators is folded until label
    deterministic.  A complete core is returned as is (finite index).
    Otherwise hanging tree branches are added at missing slots of vertices
    closer than ``depth`` to the root, and the result is marked truncated;
    remaining gaps form its boundary.
    """
    edges: list[tuple[int, int, int]] = []
    n = 1
    for g in gens:
        w = Word(g).reduce()
        if any(abs(x) > rank for x in w):
            raise PreconditionError(f"word {w} uses a generator beyond rank {rank}")
        if not w:
            continue
        cur = 0
        for pos, x in enumerate(w):
            nxt = 0 if pos == len(w) - 1 else n
            if nxt:
                n += 1
            if x > 0:
                edges.append((cur, x, nxt))
            else:
                edges.append((nxt, -x, cur))
            cur = nxt
    reps, folded = _fold(n, edges)
    # renumber in BFS order from the root
    adj: dict[int, list[int]] = {}
    for u, _, v in folded:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    order = [reps[0]]
    index = {reps[0]: 0}
    queue = deque(order)
    while queue:
        v = queue.popleft()
        for w in sorted(adj.get(v, [])):
            if w not in index:
                index[w] = len(order)
                order.append(w)
                queue.append(w)
    core = sorted((index[u], lab, index[v]) for u, lab, v in folded)
    n_core = len(order)
    out = [[None] * (rank + 1) for _ in range(n_core)]
    inn = [[None] * (rank + 1) for _ in range(n_core)]
    for u, lab, v in core:
        out[u][lab] = v
        inn[v][lab] = u
    dist = [0] * n_core
    seen = [False] * n_core
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for lab in range(1, rank + 1):
            for w in (out[v][lab], inn[v][lab]):
                if w is not None and not seen[w]:
                    seen[w] = True
                    dist[w] = dist[v] + 1
                    queue.append(w)
    complete = all(out[v][i] is not None and inn[v][i] is not None
                   for v in range(n_core) for i in range(1, rank + 1))
    if complete:
        return SchreierGraph(n_core, rank, [(u, v) for u, _, v in core],
                             [lab for _, lab, _ in core], 0)
    # hang labeled tree branches on missing slots
    all_edges = [(u, v) for u, _, v in core]
    labels = [lab for _, lab, _ in core]
    queue = deque(sorted(range(n_core), key=lambda v: (dist[v], v)))
    total = n_core
    while queue:
        v = queue.popleft()
        if dist[v] >= depth:
            continue
        for lab in range(1, rank + 1):
            if out[v][lab] is None:
                w = total
                total += 1
                out.append([None] * (rank + 1))
                inn.append([None] * (rank + 1))
                dist.append(dist[v] + 1)
                out[v][lab] = w
                inn[w][lab] = v
                all_edges.append((v, w))
                labels.append(lab)
                queue.append(w)
            if inn[v][lab] is None:
                w = total
                total += 1
                out.append([None] * (rank + 1))
                inn.append([None] * (rank + 1))
                dist.append(dist[v] + 1)
                inn[v][lab] = w
                out[w][lab] = v
                all_edges.append((w, v))
                labels.append(lab)
                queue.append(w)
    boundary = [v for v in range(total)
                if any(out[v][i] is None or inn[v][i] is None for i in range(1, rank + 1))]
    return SchreierGraph(total, rank, all_edges, labels, 0, bool(boundary), boundary)


# ---------------------------------------------------------------------------
# a_i-cycles and reversal

@dataclass(frozen=True)
class ACycle:
    """One a_i-cycle: vertices in the order a_i-edges traverse them.

    ``closed`` cycles are complete; open ones are windows of a bi-infinite
    line (lazy graphs), bounded by two frontier vertices.
    """

    label: int
    vertices: tuple
    closed: bool
    key: Hashable

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def frontier(self) -> tuple:
        return () if self.closed else (self.vertices[0], self.vertices[-1])


@dataclass(frozen=True)
class ACyclePartition:
    label: int
    cycles: tuple[ACycle, ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)


def a_cycles(sg, i: int, radius: int | None = None, window: int | None = None) -> ACyclePartition:
    """Decompose into a_i-cycles (orbits of the label-i out-edge map).

    For lazy graphs only the cycles meeting the ``radius``-ball of the root
    are returned; each is followed at most ``window`` steps each way
    (default ``2 * radius + 2``) and reported open if it does not close.
    """
    if isinstance(sg, LazyGraph):
        from .graph_core import ball

        if radius is None:
            raise PreconditionError("a radius is required for lazy graphs")
        window = 2 * radius + 2 if window is None else window
        cycles = []
        seen = set()
        for v in ball(sg, sg.root, radius).source_ids:
            key = sg.cycle_key(v, i)
            if key in seen:
                continue
            seen.add(key)
            fwd = [v]
            w = sg.step(v, i)
            closed = False
            while len(fwd) <= window:
                if w == v:
                    closed = True
                    break
                fwd.append(w)
                w = sg.step(w, i)
            if closed:
                cycles.append(ACycle(i, tuple(fwd), True, key))
                continue
            back = []
            w = sg.step(v, -i)
            for _ in range(window):
                back.append(w)
                w = sg.step(w, -i)
            cycles.append(ACycle(i, tuple(reversed(back)) + tuple(fwd), False, key))
        return ACyclePartition(i, tuple(cycles))
    if not 1 <= i <= sg.rank:
        raise PreconditionError(f"label {i} outside 1..{sg.rank}")
    nxt = label_permutations(sg)[i]
    has_pred = [False] * sg.n_vertices
    for w in nxt:
        if w is not None:
            has_pred[w] = True
    seen = [False] * sg.n_vertices
    cycles = []
    # open paths (truncated graphs) first, each walked from its first vertex
    starts = [v for v in range(sg.n_vertices) if not has_pred[v]]
    for v in starts + list(range(sg.n_vertices)):
        if seen[v]:
            continue
        cyc = [v]
        seen[v] = True
        w = nxt[v]
        closed = True
        while w != v:
            if w is None or seen[w]:
                closed = False
                break
            cyc.append(w)
            seen[w] = True
            w = nxt[w]
        cycles.append(ACycle(i, tuple(cyc), closed, min(cyc)))
    cycles.sort(key=lambda c: c.key)
    return ACyclePartition(i, tuple(cycles))


def reverse_cycle(sg, cycle: ACycle):
    """Apply a_i -> a_i^-1 along one a_i-cycle; the result is again a Schreier structure."""
    if isinstance(sg, LabeledLazyGraph):
        if isinstance(sg, ReversedCycles) and sg.i == cycle.label:
            prev = sg.is_reversed
            key = cycle.key
            return ReversedCycles(sg.base, sg.i, lambda k: prev(k) != (k == key)).with_root(sg.root)
        return ReversedCycles(sg, cycle.label, lambda k: k == cycle.key)
    members = set(cycle.vertices)
    edges = list(sg.edges)
    for k, ((u, v), lab) in enumerate(zip(sg.edges, sg.labels)):
        if lab == cycle.label and u in members:
            edges[k] = (v, u)
    return SchreierGraph(sg.n_vertices, sg.rank, edges, sg.labels, sg.root,
                         sg.truncated, sg.boundary)


def reverse_cycles(sg: SchreierGraph, i: int, pattern: Sequence[bool]) -> SchreierGraph:
    """Reverse the a_i-cycles whose entry in ``pattern`` is true."""
    cycles = a_cycles(sg, i).cycles
    if len(pattern) != len(cycles):
        raise PreconditionError(f"pattern has {len(pattern)} entries for {len(cycles)} cycles")
    members = set()
    for c, flip in zip(cycles, pattern):
        if flip:
            members.update(c.vertices)
    edges = [
        (v, u) if lab == i and u in members else (u, v)
        for (u, v), lab in zip(sg.edges, sg.labels)
    ]
    return SchreierGraph(sg.n_vertices, sg.rank, edges, sg.labels, sg.root,
                         sg.truncated, sg.boundary)


# ---------------------------------------------------------------------------
# forgetting and labeling

def forget(sg):
    """Drop labels and orientations, keeping the root."""
    if isinstance(sg, LabeledLazyGraph):
        return Forgotten(sg)
    if isinstance(sg, Neighborhood):
        return sg.unlabeled()
    return RootedMultigraph(sg.n_vertices, sg.edges, sg.root)


def with_labels(g: RootedMultigraph, orientation: Sequence[tuple[int, int]],
                labels: Sequence[int], rank: int) -> SchreierGraph:
    """Put an orientation and labels on the edges of ``g`` (edge ids kept)."""
    if len(orientation) != len(g.edges) or len(labels) != len(g.edges):
        raise PreconditionError("one orientation and one label per edge required")
    for (a, b), (u, v) in zip(g.edges, orientation):
        if {a, b} != {u, v}:
            raise PreconditionError(f"orientation ({u}, {v}) does not match edge ({a}, {b})")
    return SchreierGraph(g.n_vertices, rank, orientation, labels, g.root)


def from_permutations(perms: Sequence[Sequence[int]], root: int = 0) -> SchreierGraph:
    """Schreier graph whose a_i acts on vertices as ``perms[i-1]``."""
    n = len(perms[0])
    edges, labels = [], []
    for i, p in enumerate(perms, start=1):
        if sorted(p) != list(range(n)):
            raise PreconditionError(f"a{i} is not a permutation of 0..{n - 1}")
        for v in range(n):
            edges.append((v, p[v]))
            labels.append(i)
    return SchreierGraph(n, len(perms), edges, labels, root)


def is_vertex_transitive(sg: SchreierGraph) -> bool:
    """Whether every re-rooting gives the same labeled graph (H normal)."""
    from .graph_core import as_neighborhood, canonical_key

    keys = {canonical_key(as_neighborhood(sg.with_root(v))) for v in range(sg.n_vertices)}
    return len(keys) == 1
