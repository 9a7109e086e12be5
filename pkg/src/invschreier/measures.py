"""Cylinder measures on rooted graphs and the checks run against them.

A measure at radius r assigns mass to canonical keys of r-balls.  Exact
measures hold :class:`fractions.Fraction` masses; empirical ones hold counts
out of ``n`` samples.  Unimodularity is tested on doubly rooted classes
(edge neighborhoods of radius r) derived from (r+1)-balls, each neighbor of
the root counted with its orbit weight.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Hashable, Iterable, Sequence

from .errors import PreconditionError, SizeLimitError
from .graph_core import (
    CanonicalKey,
    Neighborhood,
    _label_deterministic,
    as_neighborhood,
    ball,
    canonical_key,
    edge_neighborhood,
    is_rigid,
    neighborhood_from_key,
    orbits_fixing_root,
    root_neighbors,
    sub_ball,
)
from .lazy import LabeledLazyGraph, LazyGraph, ReversedCycles
from .schreier import SchreierGraph, a_cycles, contains, forget, read_word, reverse_cycles
from .words import Word, letters, reduced_words

SIGMA = 3.0


def bonferroni_z(k: int, sigma: float = SIGMA) -> float:
    """Two-sided threshold keeping the family-wise level of one ``sigma`` test over k tests."""
    if k <= 1:
        return sigma
    alpha = 2 * (1 - NormalDist().cdf(sigma))
    return NormalDist().inv_cdf(1 - alpha / (2 * k))


def _space(labeled: bool) -> str:
    return "lambda" if labeled else "omega"


# ---------------------------------------------------------------------------
# measures

@dataclass
class CylinderMeasure:
    """Mass on canonical keys of r-balls.

    Exactly one of ``masses`` (exact) and ``counts`` (empirical, out of
    ``n`` samples) is populated.  ``reps`` optionally caches one
    representative neighborhood per key.  ``truncated`` marks measures built
    from finite pieces of infinite graphs.
    """

    radius: int
    space: str
    masses: dict[CanonicalKey, Fraction] | None = None
    counts: dict[CanonicalKey, int] | None = None
    n: int | None = None
    truncated: bool = False
    reps: dict[CanonicalKey, Neighborhood] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if (self.masses is None) == (self.counts is None):
            raise PreconditionError("a measure is either exact or empirical")
        if self.counts is not None and not self.n:
            raise PreconditionError("empirical measures need a positive sample size")

    @property
    def exact(self) -> bool:
        return self.masses is not None

    def keys(self) -> list[CanonicalKey]:
        return sorted(self.masses if self.exact else self.counts)  # type: ignore[arg-type]

    def mass(self, key: CanonicalKey) -> Fraction:
        """Exact mass, or the empirical frequency as a fraction."""
        if self.exact:
            return self.masses.get(key, Fraction(0))  # type: ignore[union-attr]
        return Fraction(self.counts.get(key, 0), self.n)  # type: ignore[union-attr]

    def stderr(self, key: CanonicalKey) -> float:
        """sqrt(p(1-p)/n) for empirical measures; 0 for exact ones."""
        if self.exact:
            return 0.0
        p = self.counts.get(key, 0) / self.n  # type: ignore[union-attr, operator]
        return math.sqrt(p * (1 - p) / self.n)  # type: ignore[operator]

    def total(self) -> Fraction:
        return sum((self.mass(k) for k in self.keys()), Fraction(0))

    def rep(self, key: CanonicalKey) -> Neighborhood:
        nb = self.reps.get(key)
        if nb is None:
            nb = neighborhood_from_key(key, self.radius)
            self.reps[key] = nb
        return nb

    def restrict(self, r: int) -> "CylinderMeasure":
        """Image under the restriction map to radius ``r`` <= radius."""
        if r > self.radius or r < 0:
            raise PreconditionError(f"cannot restrict a radius-{self.radius} measure to radius {r}")
        if r == self.radius:
            return self
        acc: dict[CanonicalKey, Fraction | int] = {}
        reps = {}
        for k in self.keys():
            small = sub_ball(self.rep(k), self.rep(k).root, r)
            sk = canonical_key(small)
            reps.setdefault(sk, small)
            acc[sk] = acc.get(sk, 0) + (self.masses[k] if self.exact else self.counts[k])  # type: ignore[index]
        if self.exact:
            return CylinderMeasure(r, self.space, masses=dict(acc), truncated=self.truncated, reps=reps)
        return CylinderMeasure(r, self.space, counts=dict(acc), n=self.n, truncated=self.truncated, reps=reps)

    def is_consistent_with(self, coarser: "CylinderMeasure") -> bool:
        """Whether restricting this measure to ``coarser.radius`` reproduces it exactly."""
        down = self.restrict(coarser.radius)
        return all(down.mass(k) == coarser.mass(k) for k in set(down.keys()) | set(coarser.keys()))

    def merge(self, other: "CylinderMeasure") -> "CylinderMeasure":
        """Pool two empirical measures over the same space by adding counts."""
        if self.exact or other.exact or (self.radius, self.space) != (other.radius, other.space):
            raise PreconditionError("only empirical measures on the same space can be merged")
        counts = Counter(self.counts)
        counts.update(other.counts)
        return CylinderMeasure(self.radius, self.space, counts=dict(counts), n=self.n + other.n,
                               truncated=self.truncated or other.truncated,
                               reps={**self.reps, **other.reps})


def uniform_root_measure(g, r: int) -> CylinderMeasure:
    """Root a finite graph uniformly at random and look at the r-ball."""
    if r < 0:
        raise PreconditionError("radius must be non-negative")
    n = g.n_vertices
    counts: Counter = Counter()
    reps = {}
    for v in range(n):
        b = ball(g, v, r)
        k = canonical_key(b)
        counts[k] += 1
        reps.setdefault(k, b)
    labeled = getattr(g, "rank", None) is not None
    return CylinderMeasure(r, _space(labeled), masses={k: Fraction(c, n) for k, c in counts.items()},
                           reps=reps)


def dirac(g, r: int) -> CylinderMeasure:
    """Point mass on the r-ball at the root of ``g`` (flagged truncated for lazy graphs)."""
    b = ball(g, g.root, r)
    k = canonical_key(b)
    labeled = getattr(g, "rank", None) is not None
    return CylinderMeasure(r, _space(labeled), masses={k: Fraction(1)},
                           truncated=isinstance(g, LazyGraph), reps={k: b})


def pushforward_forget(m: CylinderMeasure) -> CylinderMeasure:
    """Sum masses of labeled keys over their common unlabeled key."""
    acc: dict[CanonicalKey, Fraction | int] = {}
    reps = {}
    for k in m.keys():
        nb = m.rep(k).unlabeled()
        uk = canonical_key(nb)
        reps.setdefault(uk, nb)
        acc[uk] = acc.get(uk, 0) + (m.masses[k] if m.exact else m.counts[k])  # type: ignore[index]
    if m.exact:
        return CylinderMeasure(m.radius, "omega", masses=dict(acc), truncated=m.truncated, reps=reps)
    return CylinderMeasure(m.radius, "omega", counts=dict(acc), n=m.n, truncated=m.truncated, reps=reps)


def total_variation(a: CylinderMeasure, b: CylinderMeasure) -> Fraction:
    keys = set(a.keys()) | set(b.keys())
    return sum((abs(a.mass(k) - b.mass(k)) for k in keys), Fraction(0)) / 2


# ---------------------------------------------------------------------------
# unimodularity

@dataclass
class ClassComparison:
    """Lifted masses of a doubly rooted class D = (U, x, y) and of its swap.

    ``lhs`` is the mass of D, ``rhs`` that of the swapped class.  ``where``
    names one occurrence as (x, y) in source-vertex ids and ``weights`` the
    orbit weights of y (in D) and of x (in the swap) at that occurrence.
    """

    key: CanonicalKey
    swapped: CanonicalKey
    lhs: Fraction | float
    rhs: Fraction | float
    se: float = 0.0
    where: tuple | None = None
    weights: tuple[int, int] | None = None

    @property
    def difference(self):
        return self.lhs - self.rhs

    @property
    def z(self) -> float:
        diff = float(self.difference)
        if self.se == 0:
            return 0.0 if diff == 0 else math.inf
        return abs(diff) / self.se


@dataclass
class UnimodularityReport:
    ok: bool
    radius: int
    exact: bool
    comparisons: list[ClassComparison]
    threshold: float = 0.0
    truncated: bool = False
    n_classes: int = 0

    def __bool__(self) -> bool:
        return self.ok

    @property
    def violations(self) -> list[ClassComparison]:
        if self.exact:
            return [c for c in self.comparisons if c.lhs != c.rhs]
        return [c for c in self.comparisons if c.z > self.threshold]

    @property
    def worst(self) -> ClassComparison | None:
        bad = self.violations
        if not bad:
            return None
        if self.exact:
            return max(bad, key=lambda c: abs(c.difference))
        return max(bad, key=lambda c: c.z)

    def summary(self) -> str:
        scope = f"witness at radius {self.radius}" if self.truncated else f"radius {self.radius}"
        if self.ok:
            return (f"unimodular check passed ({scope}, {self.n_classes} class{'' if self.n_classes == 1 else 'es'}, "
                    f"{len(self.comparisons)} swap pairs compared)")
        w = self.worst
        assert w is not None
        return (f"unimodular check failed ({scope}): {len(self.violations)} class pairs differ; "
                f"worst {_fmt(w.lhs)} vs {_fmt(w.rhs)}")


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else f"{x:.6g}"


def _neighbor_classes(V: Neighborhood, r: int) -> list[tuple]:
    """Classes (D, swap(D)) of the root's edges in an (r+1)-ball, one per orbit.

    Returns (key of D, key of the swap, w_V(y), D, swap, occurrence) per orbit rep y.
    """
    if V.labels is not None and _label_deterministic(V):
        orbits = list(range(V.n_vertices))  # labeled balls are rigid
    else:
        orbits = orbits_fixing_root(V)
    out = []
    seen = set()
    for y in root_neighbors(V):
        if orbits[y] in seen:
            continue
        seen.add(orbits[y])
        w = sum(1 for o in orbits if o == orbits[y])
        D = edge_neighborhood(V, y, r)
        swapped = D.with_roots(D.second_root, D.root)  # type: ignore[arg-type]
        src = V.source_ids
        where = (src[V.root], src[y]) if src else (V.root, y)
        out.append((canonical_key(D), canonical_key(swapped), w, D, swapped, where))
    return out


def _swap_weight(swapped: Neighborhood) -> int:
    """Orbit weight of the secondary root under automorphisms fixing the principal one."""
    if swapped.labels is not None and _label_deterministic(swapped):
        return 1
    nb = swapped.with_roots(swapped.root)
    orbits = orbits_fixing_root(nb)
    y = swapped.second_root
    return sum(1 for o in orbits if o == orbits[y])


def check_unimodular(m: CylinderMeasure, r: int | None = None) -> UnimodularityReport:
    """Compare the lifted mass of every doubly rooted class with its swap.

    The lift of D = (U, x, y) sums mu(V) * w_V(y) over balls V whose
    root edge towards y has radius-r neighborhood D.  Requires a measure at
    radius >= r + 1 (default r = radius - 1).  Exact measures need exact
    equality; empirical ones compare per-sample differences with a
    Bonferroni-corrected 3-sigma threshold.
    """
    if r is None:
        r = m.radius - 1
    if r < 0 or m.radius < r + 1:
        raise PreconditionError(f"a radius-{m.radius} measure supports checks up to radius {m.radius - 1}")
    mm = m.restrict(r + 1)
    # per ball key: class -> summed weight; swapped partner of every class
    contrib: dict[CanonicalKey, dict[CanonicalKey, int]] = {}
    partner: dict[CanonicalKey, CanonicalKey] = {}
    info: dict[CanonicalKey, tuple] = {}
    for k in mm.keys():
        V = mm.rep(k)
        row: dict[CanonicalKey, int] = {}
        for dk, sk, w, D, swapped, where in _neighbor_classes(V, r):
            row[dk] = row.get(dk, 0) + w
            partner[dk] = sk
            partner[sk] = dk
            info.setdefault(dk, (where, w, swapped))
        contrib[k] = row
    pairs = []
    done = set()
    for dk in sorted(partner):
        sk = partner[dk]
        if dk in done or sk == dk:
            done.add(dk)
            continue
        done.update((dk, sk))
        pairs.append((dk, sk))
    # balls touching each class, so each pair only scans its own support
    support: dict[CanonicalKey, list[CanonicalKey]] = {}
    for k, row in contrib.items():
        for dk in row:
            support.setdefault(dk, []).append(k)
    comparisons = []
    if mm.exact:
        tot = {dk: sum((mm.mass(k) * contrib[k][dk] for k in ks), Fraction(0))
               for dk, ks in support.items()}
        for dk, sk in pairs:
            lhs, rhs = tot.get(dk, Fraction(0)), tot.get(sk, Fraction(0))
            comparisons.append(_comparison(dk, sk, lhs, rhs, 0.0, info))
        ok = all(c.lhs == c.rhs for c in comparisons)
        return UnimodularityReport(ok, r, True, comparisons, 0.0, m.truncated, len(partner))
    n = mm.n
    counts = mm.counts
    for dk, sk in pairs:
        mean = sq = lhs = 0.0
        for k in set(support.get(dk, ())) | set(support.get(sk, ())):
            c = counts[k]  # type: ignore[index]
            a = contrib[k].get(dk, 0)
            z = a - contrib[k].get(sk, 0)
            mean += c * z
            sq += c * z * z
            lhs += c * a
        mean /= n
        lhs /= n
        var = max(sq / n - mean * mean, 0.0)
        comparisons.append(_comparison(dk, sk, lhs, lhs - mean, math.sqrt(var / n), info))
    thr = bonferroni_z(len(comparisons))
    ok = all(c.z <= thr for c in comparisons)
    return UnimodularityReport(ok, r, False, comparisons, thr, m.truncated, len(partner))


def _comparison(dk, sk, lhs, rhs, se, info) -> ClassComparison:
    src = info.get(dk) or info.get(sk)
    where, weights = None, None
    if src is not None:
        where, w, swapped = src
        if dk not in info:
            where = (where[1], where[0])
        weights = (w, _swap_weight(swapped)) if dk in info else None
    return ClassComparison(dk, sk, lhs, rhs, se, where, weights)


# ---------------------------------------------------------------------------
# samplers

def _coin(seed: int, sample: int, key: Hashable, p: float) -> bool:
    h = hashlib.blake2b(f"{seed}|{sample}|{key!r}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "big") / 2**64 < p


@dataclass
class DiracSampler:
    """Every sample is the same rooted graph."""

    graph: object

    def draw(self, seed: int, s: int):
        return self.graph

    def local_state(self, seed: int, s: int, radius: int) -> Hashable:
        return None

    @property
    def labeled(self) -> bool:
        return getattr(self.graph, "rank", None) is not None


@dataclass
class ReversalModel:
    """nu_p: reverse each a_i-cycle of ``source`` independently with probability p.

    Coins are a hash of (seed, sample index, cycle key), so sample s is
    reproducible on its own and samples can be drawn in any order.
    """

    source: object
    i: int
    p: float
    seed: int = 0
    allow_degenerate: bool = False
    _near: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        lo_ok = 0 <= self.p <= 1 if self.allow_degenerate else 0 < self.p < 1
        if not lo_ok:
            raise PreconditionError(f"p = {self.p} must lie strictly inside (0, 1)")
        rank = getattr(self.source, "rank", None)
        if rank is None:
            raise PreconditionError("reversal needs a labeled source")
        if not 1 <= self.i <= rank:
            raise PreconditionError(f"generator index {self.i} outside 1..{rank}")
        if isinstance(self.source, LazyGraph) and not isinstance(self.source, LabeledLazyGraph):
            raise PreconditionError("lazy reversal sources must be labeled")

    @property
    def labeled(self) -> bool:
        return True

    def cycles_near(self, radius: int) -> tuple:
        """Keys of the a_i-cycles meeting the radius-ball of the root, in BFS order."""
        if radius not in self._near:
            keys: list = []
            b = ball(self.source, self.source.root, radius)
            try:
                for v in b.source_ids:
                    k = self.source.cycle_key(v, self.i)
                    if k not in keys:
                        keys.append(k)
            except NotImplementedError:
                raise PreconditionError("source cannot name its a_i-cycles") from None
            self._near[radius] = tuple(keys)
        return self._near[radius]

    def flips(self, seed: int, s: int) -> Callable[[Hashable], bool]:
        return lambda key: _coin(seed, s, key, self.p)

    def realize(self, is_reversed: Callable[[Hashable], bool]):
        """The source with the cycles selected by ``is_reversed`` reversed."""
        src = self.source
        if isinstance(src, LabeledLazyGraph):
            return ReversedCycles(src, self.i, is_reversed)
        cycles = a_cycles(src, self.i).cycles
        return reverse_cycles(src, self.i, [is_reversed(c.key) for c in cycles])

    def draw(self, seed: int, s: int):
        return self.realize(self.flips(seed, s))

    def local_state(self, seed: int, s: int, radius: int) -> Hashable:
        return tuple(_coin(seed, s, k, self.p) for k in self.cycles_near(radius))


def sample_reversal(model: ReversalModel, r: int, count: int | None = None,
                    seed: int | None = None) -> Iterable[Neighborhood]:
    """Stream of labeled r-balls at the root of independent nu_p samples."""
    seed = model.seed if seed is None else seed
    s = 0
    while count is None or s < count:
        yield ball(model.draw(seed, s), None, r)
        s += 1


def exact_reversal_measure(model: ReversalModel, r: int, p: Fraction | None = None) -> CylinderMeasure:
    """Exact nu_p law of the r-ball, by enumerating coin patterns of the nearby cycles."""
    p = Fraction(model.p).limit_denominator(10**6) if p is None else Fraction(p)
    keys = model.cycles_near(r)
    if len(keys) > 20:
        raise SizeLimitError(f"{len(keys)} cycles meet the ball; enumeration is capped at 20")
    masses: dict[CanonicalKey, Fraction] = {}
    reps = {}
    for pattern in itertools.product((False, True), repeat=len(keys)):
        chosen = {k for k, f in zip(keys, pattern) if f}
        b = ball(model.realize(chosen.__contains__), None, r)
        k = canonical_key(b)
        reps.setdefault(k, b)
        weight = Fraction(1)
        for f in pattern:
            weight *= p if f else 1 - p
        masses[k] = masses.get(k, Fraction(0)) + weight
    return CylinderMeasure(r, "lambda", masses=masses, truncated=isinstance(model.source, LazyGraph),
                           reps=reps)


def estimate_cylinder(sampler, r: int, N: int, seed: int = 0) -> CylinderMeasure:
    """Empirical radius-r measure from N samples (memoized on local coin patterns)."""
    if N < 1:
        raise PreconditionError("N must be at least 1")
    memo: dict = {}
    counts: Counter = Counter()
    reps = {}
    for s in range(N):
        state = sampler.local_state(seed, s, r)
        k = memo.get(state)
        if k is None:
            b = ball(sampler.draw(seed, s), None, r)
            k = canonical_key(b)
            reps.setdefault(k, b)
            memo[state] = k
        counts[k] += 1
    src = getattr(sampler, "source", getattr(sampler, "graph", None))
    return CylinderMeasure(r, _space(sampler.labeled), counts=dict(counts), n=N,
                           truncated=isinstance(src, LazyGraph), reps=reps)


@dataclass
class KeyComparison:
    key: CanonicalKey
    observed: float
    expected: float
    z: float


@dataclass
class FitReport:
    """Per-key z scores against a Bonferroni-corrected threshold."""

    ok: bool
    threshold: float
    rows: list[KeyComparison]

    def __bool__(self) -> bool:
        return self.ok

    @property
    def worst(self) -> KeyComparison | None:
        return max(self.rows, key=lambda row: row.z, default=None)


def _z(diff: float, se: float) -> float:
    if se == 0:
        return 0.0 if diff == 0 else math.inf
    return abs(diff) / se


def compare_to_exact(emp: CylinderMeasure, exact: CylinderMeasure) -> FitReport:
    """Does an empirical measure agree with an exact one key by key?"""
    if emp.exact or not exact.exact:
        raise PreconditionError("expected an empirical and an exact measure")
    keys = sorted(set(emp.keys()) | set(exact.keys()))
    rows = []
    for k in keys:
        p = float(exact.mass(k))
        obs = float(emp.mass(k))
        rows.append(KeyComparison(k, obs, p, _z(obs - p, math.sqrt(p * (1 - p) / emp.n))))  # type: ignore[operator]
    thr = bonferroni_z(len(rows))
    return FitReport(all(row.z <= thr for row in rows), thr, rows)


def compare_empirical(a: CylinderMeasure, b: CylinderMeasure, sigma: float = SIGMA) -> FitReport:
    """Two-sample z per key; ``ok`` means no key differs by more than ``sigma``."""
    keys = sorted(set(a.keys()) | set(b.keys()))
    rows = []
    for k in keys:
        pa, pb = float(a.mass(k)), float(b.mass(k))
        se = math.sqrt(a.stderr(k) ** 2 + b.stderr(k) ** 2)
        rows.append(KeyComparison(k, pa, pb, _z(pa - pb, se)))
    return FitReport(all(row.z <= sigma for row in rows), sigma, rows)


@dataclass
class ShiftReport:
    ok: bool
    word: Word
    radius: int
    n: int
    threshold: float
    rows: list[KeyComparison]

    def __bool__(self) -> bool:
        return self.ok


def check_shift_invariance(sampler, g: Iterable[int], r: int, N: int, seed: int = 0) -> ShiftReport:
    """Compare the r-ball law at the root with the law at the end of ``g``.

    For each sample the root ball key and the key of the ball around
    ``read_word(root, g)`` are recorded; per key, the paired differences of
    indicator values give a z score, tested at Bonferroni-corrected 3 sigma.
    """
    g = Word(g)
    if r < 0 or N < 1:
        raise PreconditionError("need r >= 0 and N >= 1")
    memo: dict = {}
    at_root: list = []
    shifted: list = []
    for s in range(N):
        state = sampler.local_state(seed, s, r + len(g))
        pair = memo.get(state)
        if pair is None:
            G = sampler.draw(seed, s)
            y = read_word(G, G.root, g)
            pair = (canonical_key(ball(G, G.root, r)), canonical_key(ball(G, y, r)))
            memo[state] = pair
        at_root.append(pair[0])
        shifted.append(pair[1])
    keys = sorted(set(at_root) | set(shifted))
    rows = []
    for k in keys:
        diffs = [(a == k) - (b == k) for a, b in zip(at_root, shifted)]
        mean = sum(diffs) / N
        var = max(sum(d * d for d in diffs) / N - mean * mean, 0.0)
        fa = sum(1 for a in at_root if a == k) / N
        rows.append(KeyComparison(k, fa, fa - mean, _z(mean, math.sqrt(var / N))))
    thr = bonferroni_z(len(rows))
    return ShiftReport(all(row.z <= thr for row in rows), g, r, N, thr, rows)


# ---------------------------------------------------------------------------
# reversal families

@dataclass
class ReversalCount:
    """Distinct rooted labeled graphs among all 2^J reversal patterns."""

    count: int
    n_cycles: int
    rigid: bool
    collisions: list[tuple[tuple[bool, ...], tuple[bool, ...]]]

    @property
    def full(self) -> bool:
        return self.count == 2 ** self.n_cycles


def reversal_family_count(sg: SchreierGraph, i: int, max_cycles: int = 20) -> ReversalCount:
    """Key every reversal pattern of the a_i-cycles of a finite Schreier graph.

    Also reports whether the underlying unlabeled graph is rigid and, for
    each pattern whose key was already seen, the first pattern it collides
    with.
    """
    cycles = a_cycles(sg, i).cycles
    J = len(cycles)
    if J > max_cycles:
        raise SizeLimitError(f"{J} a_{i}-cycles exceed the budget of {max_cycles}")
    first: dict[CanonicalKey, tuple[bool, ...]] = {}
    collisions = []
    for pattern in itertools.product((False, True), repeat=J):
        k = canonical_key(as_neighborhood(reverse_cycles(sg, i, pattern)))
        if k in first:
            collisions.append((first[k], pattern))
        else:
            first[k] = pattern
    rigid = is_rigid(as_neighborhood(forget(sg)))
    return ReversalCount(len(first), J, rigid, collisions)


# ---------------------------------------------------------------------------
# sofic lifting

@dataclass
class SoficReport:
    labeled: list[CylinderMeasure]
    unlabeled: list[CylinderMeasure]
    tv_labeled: list[Fraction]
    tv_unlabeled: list[Fraction]

    def stabilized_from(self, which: str = "labeled") -> int | None:
        """First index from which all later consecutive TV distances vanish."""
        tv = self.tv_labeled if which == "labeled" else self.tv_unlabeled
        start = len(tv)
        while start > 0 and tv[start - 1] == 0:
            start -= 1
        return start if start < len(tv) else None


def sofic_lift(graphs: Sequence, r: int, seed: int = 0) -> SoficReport:
    """Label each finite graph, root uniformly and track consecutive TV distances."""
    from .factorize import schreier_structure

    lab, unl = [], []
    for g in graphs:
        lab.append(uniform_root_measure(schreier_structure(g, seed), r))
        unl.append(uniform_root_measure(g, r))
    tv_l = [total_variation(a, b) for a, b in zip(lab, lab[1:])]
    tv_u = [total_variation(a, b) for a, b in zip(unl, unl[1:])]
    return SoficReport(lab, unl, tv_l, tv_u)


# ---------------------------------------------------------------------------
# distinctness witnesses

def _safe_step(G, v, letter):
    try:
        return G.step(v, letter)
    except Exception:
        return None


def _common_geodesics(A, B, max_len: int) -> dict:
    """BFS from the root over edges on which A and B agree: vertex -> word."""
    words = {A.root: Word()}
    frontier = [A.root]
    alphabet = letters(A.rank)
    for _ in range(max_len):
        nxt = []
        for v in frontier:
            for x in alphabet:
                w = _safe_step(A, v, x)
                if w is None or w in words or _safe_step(B, v, x) != w:
                    continue
                words[w] = words[v] * (x,)
                nxt.append(w)
        frontier = nxt
    return words


def distinctness_witness(A, B, max_len: int = 8) -> Word | None:
    """A word in exactly one of the two subgroups, or None within ``max_len``.

    First tries loops that walk a shared geodesic to a vertex v, take a
    letter on which A and B disagree at v, and return along a shared
    geodesic; then falls back to all reduced words up to ``max_len``.
    """
    if A.rank != B.rank or A.root != B.root:
        raise PreconditionError("graphs must share rank and root")
    geo = _common_geodesics(A, B, max_len)
    best = None
    for v, wv in geo.items():
        for x in letters(A.rank):
            u = _safe_step(A, v, x)
            if u is None or _safe_step(B, v, x) == u or u not in geo:
                continue
            h = (wv * (x,) * geo[u].inverse()).reduce()
            if not h or len(h) > max_len or (best is not None and len(h) >= len(best)):
                continue
            a, b = contains(A, h), contains(B, h)
            if a is not None and b is not None and a != b:
                best = h
    if best is not None:
        return best
    for h in reduced_words(A.rank, max_len):
        if not h:
            continue
        a, b = contains(A, h), contains(B, h)
        if a is not None and b is not None and a != b:
            return h
    return None
