"""Colour refinement + individualisation search for small multigraphs.

The search computes, in one pass, a canonical labelling (the leaf that
minimises the pair (node-invariant path, adjacency encoding)) and a
generating set of the automorphism group of the vertex-coloured multigraph.
Pruning follows the usual first-path scheme: a subtree known to be an
automorphic image of an explored one is skipped, and a subtree whose
invariant path differs from the first path and exceeds the best path cannot
matter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import heapq
from typing import Hashable, Iterable, Sequence

Perm = tuple[int, ...]


@dataclass
class ColoredGraph:
    """Multigraph with per-vertex info and per-pair edge signatures.

    ``adj[v][w]`` (``w != v``) is a sorted tuple of edge colours as seen from
    ``v``; loops live in ``vinfo``.  Everything must be orderable.
    """

    n: int
    vinfo: list[tuple]
    adj: list[dict[int, tuple]]

    @classmethod
    def build(
        cls,
        n: int,
        edges: Sequence[tuple[int, int]],
        labels: Sequence[int] | None = None,
        marks: dict[int, int] | None = None,
    ) -> "ColoredGraph":
        """``marks`` maps vertices to small ints (1 = root, 2 = second root)."""
        marks = marks or {}
        loops: list[list] = [[] for _ in range(n)]
        pair: list[dict[int, list]] = [dict() for _ in range(n)]
        for k, (u, v) in enumerate(edges):
            lab = 0 if labels is None else labels[k]
            if u == v:
                loops[u].append(lab)
                continue
            if labels is None:
                su, sv = 0, 0
            else:
                su, sv = (lab, 1), (lab, -1)
            pair[u].setdefault(v, []).append(su)
            pair[v].setdefault(u, []).append(sv)
        vinfo = [(marks.get(v, 0), tuple(sorted(loops[v]))) for v in range(n)]
        adj = [{w: tuple(sorted(s)) for w, s in pair[v].items()} for v in range(n)]
        return cls(n, vinfo, adj)


def _rank(values: Sequence[Hashable]) -> list[int]:
    index = {s: i for i, s in enumerate(sorted(set(values)))}
    return [index[s] for s in values]


class Partition:
    """Ordered partition: ``cells[start]`` lists the members of the cell
    occupying positions ``start .. start + len - 1``; ``cell_of[v]`` is the
    start of v's cell and doubles as v's colour."""

    __slots__ = ("cells", "cell_of")

    def __init__(self, cells: dict[int, list[int]], cell_of: list[int]):
        self.cells = cells
        self.cell_of = cell_of

    @classmethod
    def from_colors(cls, colors: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            groups.setdefault(c, []).append(v)
        cells, cell_of, pos = {}, [0] * len(colors), 0
        for c in sorted(groups):
            cells[pos] = groups[c]
            for v in groups[c]:
                cell_of[v] = pos
            pos += len(groups[c])
        return cls(cells, cell_of)

    def copy(self) -> "Partition":
        return Partition({s: list(m) for s, m in self.cells.items()}, list(self.cell_of))

    def discrete(self) -> bool:
        return len(self.cells) == len(self.cell_of)

    def target_cell(self) -> list[int] | None:
        for s in sorted(self.cells):
            if len(self.cells[s]) > 1:
                return sorted(self.cells[s])
        return None

    def individualize(self, v: int) -> int:
        """Split v off the front of its cell; returns the new singleton's start."""
        s = self.cell_of[v]
        members = self.cells[s]
        rest = [u for u in members if u != v]
        self.cells[s] = [v]
        self.cells[s + 1] = rest
        for u in rest:
            self.cell_of[u] = s + 1
        return s


def refine(g: ColoredGraph, part: Partition, splitters: Iterable[int], radj) -> int:
    """Refine ``part`` in place to the coarsest equitable partition.

    Every decision depends only on cell positions and edge signatures, so
    the result (and the returned trace hash) is isomorphism invariant.
    """
    heap = list(set(splitters))
    heapq.heapify(heap)
    queued = set(heap)
    trace = 0
    cells, cell_of = part.cells, part.cell_of
    while heap:
        w_start = heapq.heappop(heap)
        queued.discard(w_start)
        counts: dict[int, dict] = {}
        for w in cells[w_start]:
            for v, sig in radj[w]:
                d = counts.get(v)
                if d is None:
                    counts[v] = {sig: 1}
                else:
                    d[sig] = d.get(sig, 0) + 1
        touched: dict[int, list[int]] = {}
        for v in counts:
            touched.setdefault(cell_of[v], []).append(v)
        for x_start in sorted(touched):
            members = cells[x_start]
            if len(members) == 1:
                continue
            groups: dict[tuple, list[int]] = {}
            for v in members:
                d = counts.get(v)
                key = tuple(sorted(d.items())) if d else ()
                groups.setdefault(key, []).append(v)
            if len(groups) == 1:
                continue
            pos = x_start
            frag = []
            for key in sorted(groups):
                mem = groups[key]
                cells[pos] = mem
                for v in mem:
                    cell_of[v] = pos
                frag.append((key, len(mem)))
                if pos not in queued:
                    queued.add(pos)
                    heapq.heappush(heap, pos)
                pos += len(mem)
            trace = hash((trace, w_start, x_start, tuple(frag)))
    return trace


def _encode(g: ColoredGraph, colors: list[int]) -> tuple:
    order = sorted(range(g.n), key=colors.__getitem__)
    vinfo = tuple(g.vinfo[v] for v in order)
    edges = []
    for v in range(g.n):
        cv = colors[v]
        for w, s in g.adj[v].items():
            if cv < colors[w]:
                edges.append((cv, colors[w], s))
    edges.sort()
    return vinfo, tuple(edges)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def orbit_partition(n: int, generators: Sequence[Perm]) -> list[int]:
    """Orbit representative (smallest member) of every point."""
    uf = _UnionFind(n)
    for g in generators:
        for x in range(n):
            uf.union(x, g[x])
    return [uf.find(x) for x in range(n)]


@dataclass
class SearchResult:
    encoding: tuple
    labeling: list[int]  # vertex -> canonical index
    generators: list[Perm] = field(default_factory=list)
    nodes: int = 0


class _Leaf:
    __slots__ = ("inv", "enc", "colors", "seq")

    def __init__(self, inv, enc, colors, seq):
        self.inv = inv
        self.enc = enc
        self.colors = colors
        self.seq = seq


class _Jump(Exception):
    def __init__(self, level: int):
        self.level = level


def _search_core(g: ColoredGraph, canonical: bool = True) -> SearchResult:
    """Canonical form and automorphism generators of ``g``.

    With ``canonical=False`` only subtrees able to hold automorphic images of
    the first leaf are explored.
    """
    radj = [[(v, g.adj[v][w]) for v in g.adj[w]] for w in range(g.n)]
    part0 = Partition.from_colors(_rank(g.vinfo))
    inv0 = refine(g, part0, list(part0.cells), radj)
    first: _Leaf | None = None
    best: _Leaf | None = None
    gens: list[Perm] = []
    supports: list[tuple[int, ...]] = []
    nodes = 0

    def add_auto(src: list[int], dst: list[int]) -> None:
        # src, dst: vertex -> canonical index at two equivalent leaves
        inv_dst = [0] * g.n
        for v, c in enumerate(dst):
            inv_dst[c] = v
        perm = tuple(inv_dst[src[v]] for v in range(g.n))
        support = tuple(v for v in range(g.n) if perm[v] != v)
        if support:
            gens.append(perm)
            supports.append(support)

    def visit(part: Partition, seq: tuple[int, ...], inv: tuple) -> None:
        nonlocal first, best, nodes
        nodes += 1
        cell = part.target_cell()
        if cell is None:
            colors = part.cell_of
            enc = _encode(g, colors)
            leaf = _Leaf(inv, enc, colors, seq)
            if first is None:
                first = best = leaf
                return
            if inv == first.inv and enc == first.enc:
                add_auto(first.colors, colors)
                common = 0
                while common < len(seq) and seq[common] == first.seq[common]:
                    common += 1
                raise _Jump(common)
            assert best is not None
            if (inv, enc) == (best.inv, best.enc):
                add_auto(best.colors, colors)
            elif (inv, enc) < (best.inv, best.enc):
                best = leaf
            return
        depth = len(seq)
        done: list[int] = []
        # orbits of the generators fixing seq pointwise, updated as gens grow
        uf: _UnionFind | None = None
        n_gens_seen = 0
        for v in cell:
            if done and len(gens) > n_gens_seen:
                for k in range(n_gens_seen, len(gens)):
                    p = gens[k]
                    if all(p[s] == s for s in seq):
                        if uf is None:
                            uf = _UnionFind(g.n)
                        for x in supports[k]:
                            uf.union(x, p[x])
                n_gens_seen = len(gens)
            if uf is not None:
                rv = uf.find(v)
                if any(uf.find(u) == rv for u in done):
                    continue
            child = part.copy()
            start = child.individualize(v)
            cinv = refine(g, child, [start], radj)
            path = inv + (cinv,)
            if first is not None:
                on_first = path == first.inv[: len(path)]
                if not on_first:
                    if not canonical:
                        done.append(v)
                        continue
                    assert best is not None
                    if path > best.inv[: len(path)]:
                        done.append(v)
                        continue
            try:
                visit(child, seq + (v,), path)
            except _Jump as j:
                if j.level < depth:
                    raise
            done.append(v)

    visit(part0, (), (inv0,))
    assert best is not None
    return SearchResult(best.enc, best.colors, gens, nodes)


def _twin_classes(g: ColoredGraph) -> list[list[int]]:
    """Classes of non-adjacent twins (same vertex info, same neighbourhood)."""
    groups: dict[tuple, list[int]] = {}
    for v in range(g.n):
        key = (g.vinfo[v], tuple(sorted(g.adj[v].items())))
        groups.setdefault(key, []).append(v)
    return sorted(groups.values())


def search(g: ColoredGraph, canonical: bool = True) -> SearchResult:
    """Canonical form and automorphism generators of ``g``.

    Twins are swapped by transpositions, so they are collapsed first and the
    quotient (vertex info extended by class size) is searched instead.
    """
    classes = _twin_classes(g)
    if len(classes) == g.n:
        return _search_core(g, canonical)
    cls_of = [0] * g.n
    for c, members in enumerate(classes):
        for v in members:
            cls_of[v] = c
    q_vinfo = [(g.vinfo[m[0]], len(m)) for m in classes]
    q_adj = [{cls_of[w]: sig for w, sig in g.adj[m[0]].items()} for m in classes]
    sub = search(ColoredGraph(len(classes), q_vinfo, q_adj), canonical)
    gens: list[Perm] = []
    for members in classes:
        for a, b in zip(members, members[1:]):
            perm = list(range(g.n))
            perm[a], perm[b] = b, a
            gens.append(tuple(perm))
    for qp in sub.generators:
        perm = [0] * g.n
        for c, members in enumerate(classes):
            for a, b in zip(members, classes[qp[c]]):
                perm[a] = b
        gens.append(tuple(perm))
    # expand the quotient labelling class by class
    order = sorted(range(len(classes)), key=sub.labeling.__getitem__)
    colors = [0] * g.n
    pos = 0
    for c in order:
        for v in classes[c]:
            colors[v] = pos
            pos += 1
    return SearchResult(_encode(g, colors), colors, gens, sub.nodes)


def close_group(n: int, generators: Sequence[Perm], max_order: int) -> list[Perm]:
    """All elements of the group generated by ``generators`` (BFS closure)."""
    identity = tuple(range(n))
    seen = {identity}
    out = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for q in generators:
                r = tuple(q[p[x]] for x in range(n))
                if r not in seen:
                    seen.add(r)
                    out.append(r)
                    nxt.append(r)
                    if len(out) > max_order:
                        raise OverflowError(len(out))
        frontier = nxt
    return out
