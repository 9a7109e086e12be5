"""Infinite bounded-degree graphs generated on demand.

Vertices are hashable addresses; ``incident(v)`` computes neighbours by
address arithmetic, so every query is deterministic and stateless.  Labeled
lazy graphs are Cayley graphs and additionally implement ``step`` (follow
one letter) and ``cycle_key`` (name the a_i-cycle through a vertex).
"""
from __future__ import annotations

import copy
from typing import Callable, Hashable

from .graph_core import HalfEdge
from .errors import PreconditionError


class LazyGraph:
    """Unlabeled lazy graph of constant degree."""

    rank: int | None = None
    truncated = False
    name = "lazy"

    def __init__(self, degree: int, root: Hashable):
        self._degree = degree
        self.root = root

    def degree(self, v) -> int:
        return self._degree

    def incident(self, v) -> list[HalfEdge]:
        raise NotImplementedError

    def neighbors(self, v) -> list:
        return [h.other for h in self.incident(v)]

    def with_root(self, v) -> "LazyGraph":
        g = copy.copy(self)
        g.root = v
        return g

    def __repr__(self) -> str:
        return f"<{self.name} rooted at {self.root!r}>"


class LabeledLazyGraph(LazyGraph):
    """Lazy Cayley graph with a Schreier labeling of rank ``rank``."""

    def __init__(self, rank: int, root: Hashable):
        super().__init__(2 * rank, root)
        self.rank = rank

    def step(self, v, letter: int):
        raise NotImplementedError

    def cycle_key(self, v, i: int) -> Hashable:
        raise NotImplementedError

    def edge_id(self, tail, head, i: int) -> Hashable:
        return (tail, i)

    def incident(self, v) -> list[HalfEdge]:
        out = []
        for i in range(1, self.rank + 1):
            w = self.step(v, i)
            out.append(HalfEdge(self.edge_id(v, w, i), w, i, True))
            u = self.step(v, -i)
            out.append(HalfEdge(self.edge_id(u, v, i), u, i, False))
        return out


class Line(LabeledLazyGraph):
    """Z with generator a_1 = +1."""

    name = "line"

    def __init__(self):
        super().__init__(1, 0)

    def step(self, v, letter):
        if abs(letter) != 1:
            raise PreconditionError(f"line has rank 1, got letter {letter}")
        return v + (1 if letter > 0 else -1)

    def cycle_key(self, v, i):
        return 0


_Z2_STEPS = {1: (1, 0), 2: (0, 1), 3: (1, 1)}


class Z2(LabeledLazyGraph):
    """Z^2 with a_1 = (1,0), a_2 = (0,1); rank 3 adds the diagonal a_3 = (1,1)."""

    def __init__(self, diagonal: bool = False):
        super().__init__(3 if diagonal else 2, (0, 0))
        self.name = "z2diag" if diagonal else "z2"

    def step(self, v, letter):
        i = abs(letter)
        if not 1 <= i <= self.rank:
            raise PreconditionError(f"{self.name} has rank {self.rank}, got letter {letter}")
        dx, dy = _Z2_STEPS[i]
        s = 1 if letter > 0 else -1
        return (v[0] + s * dx, v[1] + s * dy)

    def cycle_key(self, v, i):
        # a_1-lines are rows, a_2-lines columns, a_3-lines the diagonals y - x = c
        x, y = v
        return {1: y, 2: x, 3: y - x}[i]


class FreeGroupCayley(LabeledLazyGraph):
    """Cayley graph of F_n: the 2n-regular tree; vertices are reduced words."""

    def __init__(self, rank: int):
        super().__init__(rank, ())
        self.name = f"free:{rank}"

    def step(self, v, letter):
        if v and v[-1] == -letter:
            return v[:-1]
        return v + (letter,)

    def cycle_key(self, v, i):
        while v and abs(v[-1]) == i:
            v = v[:-1]
        return v


class Tree(LazyGraph):
    """The d-regular tree; vertices are child-index tuples from the root."""

    def __init__(self, d: int):
        if d < 1:
            raise PreconditionError("tree degree must be positive")
        super().__init__(d, ())
        self.d = d
        self.name = f"tree:{d}"

    def incident(self, v):
        out = []
        if v:
            out.append(HalfEdge(v, v[:-1]))
        n_children = self.d if not v else self.d - 1
        for j in range(n_children):
            c = v + (j,)
            out.append(HalfEdge(c, c))
        return out


class Grandfather(LazyGraph):
    """Trofimov's grandfather graph over the d-regular tree with a fixed end.

    A vertex is ``(k, s)``: descend from the k-th vertex of a fixed ray
    towards the end along the child digits ``s`` (each in ``0..d-2``).  On
    the ray, digit 0 at x_k leads to x_{k-1}; addresses are normalised so
    that ``s`` never starts with 0 when ``k >= 1``.  Edges: parent, d-1
    children, grandparent, (d-1)^2 grandchildren; degree d^2 - d + 2.
    """

    def __init__(self, d: int):
        if d < 3:
            raise PreconditionError("grandfather graph needs d >= 3")
        super().__init__(d * d - d + 2, (0, ()))
        self.d = d
        self.name = f"grandfather:{d}"

    @staticmethod
    def _norm(k: int, s: tuple) -> tuple:
        while k >= 1 and s and s[0] == 0:
            k, s = k - 1, s[1:]
        return (k, s)

    def parent(self, v):
        k, s = v
        if s:
            return (k, s[:-1])
        return (k + 1, ())

    def children(self, v):
        k, s = v
        return [self._norm(k, s + (j,)) for j in range(self.d - 1)]

    def height(self, v) -> int:
        """Horocycle index: increases by one at each step towards the end."""
        k, s = v
        return k - len(s)

    def incident(self, v):
        p = self.parent(v)
        out = [HalfEdge(("t", v), p)]
        out.append(HalfEdge(("g", v), self.parent(p)))
        kids = self.children(v)
        for c in kids:
            out.append(HalfEdge(("t", c), c))
        for c in kids:
            for gc in self.children(c):
                out.append(HalfEdge(("g", gc), gc))
        return out


class Forgotten(LazyGraph):
    """Unlabeled view of a labeled lazy graph."""

    def __init__(self, base: LabeledLazyGraph):
        super().__init__(base.degree(base.root), base.root)
        self.base = base
        self.name = f"forget({base.name})"

    def incident(self, v):
        return [HalfEdge(h.edge, h.other) for h in self.base.incident(v)]

    def with_root(self, v):
        return Forgotten(self.base.with_root(v))


class ReversedCycles(LabeledLazyGraph):
    """``base`` with the a_i-cycles selected by ``is_reversed`` reversed.

    ``is_reversed`` receives a cycle key; it is consulted lazily, so coin
    flips can be drawn on demand.
    """

    def __init__(self, base: LabeledLazyGraph, i: int, is_reversed: Callable[[Hashable], bool]):
        super().__init__(base.rank, base.root)
        self.base = base
        self.i = i
        self.is_reversed = is_reversed
        self.name = f"{base.name}~rev{i}"

    def _flip(self, v) -> bool:
        return self.is_reversed(self.base.cycle_key(v, self.i))

    def step(self, v, letter):
        if abs(letter) == self.i and self._flip(v):
            letter = -letter
        return self.base.step(v, letter)

    def cycle_key(self, v, i):
        return self.base.cycle_key(v, i)

    def edge_id(self, tail, head, i):
        if i == self.i and self._flip(tail):
            return self.base.edge_id(head, tail, i)
        return self.base.edge_id(tail, head, i)


def reverse_cycles(base: LabeledLazyGraph, i: int, keys) -> ReversedCycles:
    keys = frozenset(keys)
    return ReversedCycles(base, i, keys.__contains__)


def line() -> Line:
    return Line()


def z2() -> Z2:
    return Z2(False)


def z2_with_diagonal() -> Z2:
    return Z2(True)


def tree(d: int) -> Tree:
    return Tree(d)


def grandfather(d: int) -> Grandfather:
    return Grandfather(d)


def free_cayley(rank: int) -> FreeGroupCayley:
    return FreeGroupCayley(rank)


def from_selector(text: str) -> LazyGraph:
    """Parse ``grandfather:<d>``, ``z2``, ``z2diag``, ``tree:<d>``, ``line``, ``free:<n>``.

    A ``forget:`` prefix drops the labeling of a labeled graph.
    """
    if text.startswith("forget:"):
        g = from_selector(text[len("forget:"):])
        return Forgotten(g) if g.rank is not None else g
    name, _, arg = text.partition(":")
    if name == "line":
        return line()
    if name == "z2":
        return z2()
    if name == "z2diag":
        return z2_with_diagonal()
    try:
        if name == "tree":
            return tree(int(arg))
        if name == "grandfather":
            return grandfather(int(arg))
        if name == "free":
            return free_cayley(int(arg))
    except ValueError:
        raise PreconditionError(f"bad lazy-graph argument in {text!r}") from None
    raise PreconditionError(f"unknown lazy graph selector {text!r}")
