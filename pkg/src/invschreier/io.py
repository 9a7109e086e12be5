"""Text formats: edge lists (.el), labeled edge lists (.sg), measure JSON, DOT.

Edge list::

    # comment
    graph 5
    bound 4          (optional degree bound)
    edge 0 1         (one line per edge; loops as edge v v)
    root 0
    deficit 3 2      (optional: edge-ends missing at vertex 3, for balls)

Labeled edge list::

    schreier 6 2
    edge 0 1 1       (oriented 0 -> 1, labeled a_1)
    root 0
    boundary 5       (optional: vertex 5 may miss edge slots)

Writers emit exactly this layout, so reading and writing round-trips byte
for byte.
"""
from __future__ import annotations

import base64
import json
from fractions import Fraction
from pathlib import Path

from .errors import GraphFormatError, PreconditionError
from .graph_core import Neighborhood, RootedMultigraph
from .measures import CylinderMeasure
from .schreier import SchreierGraph


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _ints(tokens, no, count):
    if len(tokens) != count:
        raise GraphFormatError(f"expected {count} fields after {tokens[0]!r}", no)
    try:
        return [int(t) for t in tokens[1:]]
    except ValueError:
        raise GraphFormatError(f"non-integer field in {' '.join(tokens)!r}", no) from None


def parse_edge_list(text: str) -> RootedMultigraph | Neighborhood:
    """Parse the .el format; a file with ``deficit`` lines becomes a Neighborhood."""
    n = None
    bound = None
    root = 0
    edges: list[tuple[int, int]] = []
    edge_lines: list[int] = []
    deficits: dict[int, int] = {}
    for no, tok in _lines(text):
        head = tok[0]
        if n is None and head != "graph":
            raise GraphFormatError("file must start with 'graph <n_vertices>'", no)
        if head == "graph":
            if n is not None:
                raise GraphFormatError("duplicate graph header", no)
            (n,) = _ints(tok, no, 2)
            if n < 1:
                raise GraphFormatError("a graph needs at least one vertex", no)
        elif head == "bound":
            (bound,) = _ints(tok, no, 2)
        elif head == "edge":
            u, v = _ints(tok, no, 3)
            if not (0 <= u < n and 0 <= v < n):  # type: ignore[operator]
                raise GraphFormatError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}", no)  # type: ignore[operator]
            edges.append((u, v))
            edge_lines.append(no)
        elif head == "root":
            (root,) = _ints(tok, no, 2)
            if not 0 <= root < n:  # type: ignore[operator]
                raise GraphFormatError(f"root {root} is not a vertex", no)
        elif head == "deficit":
            v, k = _ints(tok, no, 3)
            deficits[v] = k
        else:
            raise GraphFormatError(f"unknown directive {head!r}", no)
    if n is None:
        raise GraphFormatError("empty file: missing 'graph <n_vertices>' header", 1)
    if bound is not None:
        deg = [0] * n
        for (u, v), no in zip(edges, edge_lines):
            deg[u] += 1
            deg[v] += 1
            if deg[u] > bound or deg[v] > bound:
                w = u if deg[u] > bound else v
                raise GraphFormatError(f"vertex {w} exceeds the degree bound {bound}", no)
    try:
        g = RootedMultigraph(n, tuple(edges), root, bound)
    except PreconditionError as exc:
        raise GraphFormatError(str(exc)) from None
    if deficits:
        return Neighborhood(n, g.edges, root, None, None, None, None,
                            tuple(deficits.get(v, 0) for v in range(n)))
    return g


def format_edge_list(g) -> str:
    out = [f"graph {g.n_vertices}"]
    bound = getattr(g, "degree_bound", None)
    if bound is not None:
        out.append(f"bound {bound}")
    for u, v in g.edges:
        out.append(f"edge {min(u, v)} {max(u, v)}")
    out.append(f"root {g.root}")
    deficits = getattr(g, "deficits", None)
    if deficits:
        out.extend(f"deficit {v} {k}" for v, k in enumerate(deficits) if k)
    return "\n".join(out) + "\n"


def parse_schreier(text: str) -> SchreierGraph:
    n = rank = None
    root = 0
    edges, labels, boundary = [], [], []
    for no, tok in _lines(text):
        head = tok[0]
        if n is None and head != "schreier":
            raise GraphFormatError("file must start with 'schreier <n_vertices> <rank>'", no)
        if head == "schreier":
            if n is not None:
                raise GraphFormatError("duplicate schreier header", no)
            n, rank = _ints(tok, no, 3)
            if n < 1 or rank < 0:
                raise GraphFormatError("need at least one vertex and a non-negative rank", no)
        elif head == "edge":
            u, v, i = _ints(tok, no, 4)
            if not (0 <= u < n and 0 <= v < n):  # type: ignore[operator]
                raise GraphFormatError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}", no)  # type: ignore[operator]
            if not 1 <= i <= rank:  # type: ignore[operator]
                raise GraphFormatError(f"label {i} outside 1..{rank}", no)
            edges.append((u, v))
            labels.append(i)
        elif head == "root":
            (root,) = _ints(tok, no, 2)
            if not 0 <= root < n:  # type: ignore[operator]
                raise GraphFormatError(f"root {root} is not a vertex", no)
        elif head == "boundary":
            (b,) = _ints(tok, no, 2)
            boundary.append(b)
        else:
            raise GraphFormatError(f"unknown directive {head!r}", no)
    if n is None:
        raise GraphFormatError("empty file: missing 'schreier <n_vertices> <rank>' header", 1)
    try:
        return SchreierGraph(n, rank, tuple(edges), tuple(labels), root,  # type: ignore[arg-type]
                             bool(boundary), frozenset(boundary))
    except PreconditionError as exc:
        raise GraphFormatError(str(exc)) from None


def format_schreier(sg: SchreierGraph) -> str:
    out = [f"schreier {sg.n_vertices} {sg.rank}"]
    for (u, v), i in zip(sg.edges, sg.labels):
        out.append(f"edge {u} {v} {i}")
    out.append(f"root {sg.root}")
    out.extend(f"boundary {b}" for b in sorted(sg.boundary))
    return "\n".join(out) + "\n"


def schreier_from_ball(nb: Neighborhood) -> SchreierGraph:
    """A labeled ball as a (truncated) Schreier graph."""
    boundary = nb.boundary()
    return SchreierGraph(nb.n_vertices, nb.rank, nb.edges, nb.labels, nb.root,  # type: ignore[arg-type]
                         bool(boundary), frozenset(boundary))


# ---------------------------------------------------------------------------
# measures

def measure_to_json(m: CylinderMeasure) -> str:
    entries = []
    for k in m.keys():
        if m.exact:
            q = m.masses[k]  # type: ignore[index]
            mass: object = f"{q.numerator}/{q.denominator}"
        else:
            mass = {"count": m.counts[k], "n": m.n}  # type: ignore[index]
        entries.append({"key": base64.b64encode(k).decode("ascii"), "mass": mass})
    doc = {"v": 1, "space": m.space, "radius": m.radius, "truncated": m.truncated, "entries": entries}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def measure_from_json(text: str) -> CylinderMeasure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        if doc.get("v") != 1:
            raise GraphFormatError(f"unsupported measure version {doc.get('v')!r}")
        masses, counts, n = {}, {}, None
        for entry in doc["entries"]:
            key = base64.b64decode(entry["key"])
            mass = entry["mass"]
            if isinstance(mass, str):
                masses[key] = Fraction(mass)
            else:
                counts[key] = int(mass["count"])
                n = int(mass["n"])
        if masses and counts:
            raise GraphFormatError("measure mixes exact and empirical entries")
        if counts:
            return CylinderMeasure(int(doc["radius"]), doc["space"], counts=counts, n=n,
                                   truncated=bool(doc.get("truncated", False)))
        return CylinderMeasure(int(doc["radius"]), doc["space"], masses=masses,
                               truncated=bool(doc.get("truncated", False)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"malformed measure document: {exc}") from None


# ---------------------------------------------------------------------------
# DOT

_COLORS = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]


def to_dot(g) -> str:
    """DOT source; labeled graphs get one colour per generator and arrowheads."""
    labels = getattr(g, "labels", None)
    out = ["digraph G {" if labels is not None else "graph G {"]
    out.append(f'  {g.root} [shape=doublecircle];')
    for v in range(g.n_vertices):
        if v != g.root:
            out.append(f"  {v};")
    for k, (u, v) in enumerate(g.edges):
        if labels is None:
            out.append(f"  {u} -- {v};")
        else:
            i = labels[k]
            color = _COLORS[(i - 1) % len(_COLORS)]
            out.append(f'  {u} -> {v} [label="a{i}", color={color}, fontcolor={color}];')
    out.append("}")
    return "\n".join(out) + "\n"


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def load_graph(path: str | Path):
    """Read a .el or .sg file, deciding by the header line."""
    text = read_text(path)
    for _, tok in _lines(text):
        if tok[0] == "schreier":
            return parse_schreier(text)
        break
    return parse_edge_list(text)
