"""One-inclusion graphs, orientations and the one-inclusion prediction rule."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, MutableMapping

from .concept_class import BitVector, ProjectedClass, project
from .errors import InputError, InvariantViolation, RealizabilityError
from .mixing import TAG_PERMUTE, keyed_mix


@dataclass(frozen=True)
class OneInclusionGraph:
    """Vertices are the hypotheses of ``cls`` (canonical order); edges join Hamming neighbors.

    Each edge is ``(i, j, coord)`` with vertex indices ``i < j`` and ``coord``
    the 1-based coordinate on which the endpoints differ.
    """

    cls: ProjectedClass
    edges: tuple[tuple[int, int, int], ...]
    _lookup: dict = field(repr=False, compare=False)
    _incident: tuple = field(repr=False, compare=False)

    @property
    def vertices(self) -> tuple[BitVector, ...]:
        return self.cls.hypotheses

    def vertex_index(self, v: BitVector) -> int:
        i = self.cls.index(v)
        if i < 0:
            raise InputError(f"{v} is not a vertex of this graph")
        return i

    def edge_between(self, u: BitVector, v: BitVector) -> int:
        i, j = sorted((self.vertex_index(u), self.vertex_index(v)))
        try:
            return self._lookup[(i, j)]
        except KeyError:
            raise InputError(f"{u} and {v} are not adjacent") from None

    def incident(self, i: int) -> tuple[int, ...]:
        """Edge indices incident to vertex ``i``."""
        return self._incident[i]


def build_graph(cls: ProjectedClass) -> OneInclusionGraph:
    index = {h.mask: i for i, h in enumerate(cls.hypotheses)}
    edges = []
    for i, h in enumerate(cls.hypotheses):
        for c in range(cls.domain_size):
            j = index.get(h.mask ^ (1 << c))
            if j is not None and j > i:
                edges.append((i, j, c + 1))
    edges.sort()
    lookup = {(i, j): e for e, (i, j, _) in enumerate(edges)}
    incident: list[list[int]] = [[] for _ in cls.hypotheses]
    for e, (i, j, _) in enumerate(edges):
        incident[i].append(e)
        incident[j].append(e)
    return OneInclusionGraph(cls, tuple(edges), lookup, tuple(tuple(x) for x in incident))


@dataclass(frozen=True)
class Orientation:
    """A head vertex (by index) for every edge of ``graph``.

    ``lower_bound`` is a certified lower bound on the max out-degree of any
    orientation satisfying the same constraints; for the unconstrained
    orienter it equals the optimum.
    """

    graph: OneInclusionGraph
    heads: tuple[int, ...]
    lower_bound: int = 0

    def __post_init__(self):
        if len(self.heads) != len(self.graph.edges):
            raise InvariantViolation("orientation is not total")
        for (i, j, _), h in zip(self.graph.edges, self.heads):
            if h != i and h != j:
                raise InvariantViolation(f"head {h} is not an endpoint of edge ({i}, {j})")

    def head_of(self, u: BitVector, v: BitVector) -> BitVector:
        return self.graph.vertices[self.heads[self.graph.edge_between(u, v)]]

    def out_degrees(self) -> list[int]:
        out = [0] * len(self.graph.vertices)
        for (i, j, _), h in zip(self.graph.edges, self.heads):
            out[j if h == i else i] += 1
        return out

    def listing(self) -> list[str]:
        verts = self.graph.vertices
        return [
            f"edge({verts[i]},{verts[j]},{c}) -> {verts[h]}"
            for (i, j, c), h in zip(self.graph.edges, self.heads)
        ]


def out_degree(o: Orientation, v: BitVector) -> int:
    i = o.graph.vertex_index(v)
    return sum(1 for e in o.graph.incident(i) if o.heads[e] != i)


def max_out_degree(o: Orientation) -> int:
    return max(o.out_degrees(), default=0)


def orient_min_max_outdegree(
    g: OneInclusionGraph,
    seed: int | None = None,
    fixed: Mapping[int, int] | None = None,
    vc_dim: int | None = None,
) -> Orientation:
    """Orientation minimizing the maximum out-degree.

    Each edge is charged to its tail; a vertex may carry at most ``t``
    edges.  Edges are inserted one at a time along shortest augmenting
    paths (the max-flow of source -> edge -> endpoint -> sink with vertex
    capacity ``t``).  When an edge cannot be inserted the flow at ``t`` is
    maximal and short of ``|E|``, which certifies that ``t`` is infeasible,
    and ``t`` is raised by one.

    ``fixed`` maps edge index to a prescribed head; those edges count toward
    their tail's load and are never moved.  ``seed`` permutes the insertion
    order of the free edges; ``None`` keeps canonical order.  When
    ``vc_dim`` is given the optimum is checked against it.
    """
    fixed = dict(fixed or {})
    edges = g.edges
    n_vertices = len(g.vertices)
    tail = [-1] * len(edges)
    load = [0] * n_vertices
    carried: list[set[int]] = [set() for _ in range(n_vertices)]
    for e, h in fixed.items():
        i, j, _ = edges[e]
        if h not in (i, j):
            raise InputError(f"fixed head {h} is not an endpoint of edge {e}")
        t_ = j if h == i else i
        tail[e] = t_
        load[t_] += 1
    t = max(load, default=0)

    free = [e for e in range(len(edges)) if e not in fixed]
    if seed is not None:
        free.sort(key=lambda e: keyed_mix(seed, TAG_PERMUTE, e))

    def other(e: int, v: int) -> int:
        i, j, _ = edges[e]
        return j if v == i else i

    def augment(e: int) -> bool:
        i, j, _ = edges[e]
        parent: dict[int, tuple[int, int]] = {i: (-1, e), j: (-1, e)}
        queue = deque((i, j))
        while queue:
            u = queue.popleft()
            if load[u] < t:
                load[u] += 1
                cur = u
                while True:
                    prev, f = parent[cur]
                    if prev >= 0:
                        carried[prev].discard(f)
                    tail[f] = cur
                    carried[cur].add(f)
                    if prev < 0:
                        return True
                    cur = prev
            for f in sorted(carried[u]):
                w = other(f, u)
                if w not in parent:
                    parent[w] = (u, f)
                    queue.append(w)
        return False

    for e in free:
        while not augment(e):
            t += 1

    heads = tuple(other(e, tail[e]) for e in range(len(edges)))
    result = Orientation(g, heads, lower_bound=t)
    achieved = max_out_degree(result)
    if achieved != t and free:
        raise InvariantViolation(f"orienter reached max out-degree {achieved}, certified {t}")
    if vc_dim is not None and not fixed and achieved > vc_dim:
        raise InvariantViolation(f"max out-degree {achieved} exceeds VC dimension {vc_dim}")
    return result


def closure_orientation(g: OneInclusionGraph, center: BitVector, seed: int | None = None) -> Orientation:
    """Point every edge at ``center`` when it touches it; orient the rest with minimum max out-degree."""
    c = g.vertex_index(center)
    fixed = {e: c for e in g.incident(c)}
    return orient_min_max_outdegree(g, seed=seed, fixed=fixed)


class OrientationRule:
    """Maps a domain subset to an orientation of the one-inclusion graph of ``host`` on it.

    Subclasses implement :meth:`_orient`.  Results are memoized; since rules
    are pure the cache never changes an answer.
    """

    name = "rule"

    def __init__(self, host: ProjectedClass, cache_size: int = 4096):
        self.host = host
        self._cached = lru_cache(maxsize=cache_size)(self._orient)

    def orient(self, subset: BitVector) -> Orientation:
        if subset.length != self.host.domain_size:
            raise InputError(f"subset length {subset.length} != domain size {self.host.domain_size}")
        return self._cached(subset)

    def _orient(self, subset: BitVector) -> Orientation:
        raise NotImplementedError

    def graph(self, subset: BitVector) -> OneInclusionGraph:
        return build_graph(project(self.host, subset))

    def mistakes(self, train_set: BitVector) -> frozenset[int]:
        """Points outside ``train_set`` predicted 1 under the zero target.

        Generic version runs the prediction rule point by point; subclasses
        may override with a direct computation valid for bounded-ones hosts.
        """
        h = realize_hypothesis(self, train_set, self.host)
        return frozenset(h.positions())


class FlowRule(OrientationRule):
    name = "flow"

    def _orient(self, subset):
        return orient_min_max_outdegree(self.graph(subset))


class ClosureRule(OrientationRule):
    """Closure orientation around the zero hypothesis."""

    name = "closure"

    def __init__(self, host, seed: int | None = None, cache_size: int = 4096):
        super().__init__(host, cache_size)
        self.seed = seed

    def _orient(self, subset):
        g = self.graph(subset)
        return closure_orientation(g, BitVector.zeros(g.cls.domain_size), seed=self.seed)

    def mistakes(self, train_set):
        if BitVector.zeros(self.host.domain_size) in self.host and _is_downward_closed(self.host):
            # every zero-incident edge points at zero, and for a downward-closed
            # host the disputed edge at an unseen point is always zero-incident
            return frozenset()
        return super().mistakes(train_set)


def _is_downward_closed(cls: ProjectedClass) -> bool:
    masks = set(cls.masks())
    return all((h & ~(1 << c)) in masks for h in masks for c in range(cls.domain_size) if h >> c & 1)


def predict(
    rule: OrientationRule,
    train_set: BitVector,
    cls: ProjectedClass,
    x: int,
    labels: BitVector | None = None,
    diagnostics: MutableMapping[str, int] | None = None,
) -> int:
    """One-inclusion prediction at domain point ``x``.

    ``labels`` is the target function on the whole domain (only its values
    on ``train_set`` are read); it defaults to the zero function.  When the
    consistent hypotheses disagree on ``x`` but do not form a single edge
    of the graph on ``train_set + x`` the prediction is 0 and
    ``diagnostics["degenerate"]`` is incremented.
    """
    m = cls.domain_size
    if train_set.length != m:
        raise InputError(f"training set length {train_set.length} != domain size {m}")
    if not 1 <= x <= m:
        raise InputError(f"point {x} outside 1..{m}")
    labels = labels if labels is not None else BitVector.zeros(m)
    s = train_set.mask
    target = labels.mask & s
    consistent = [h for h in cls.masks() if h & s == target]
    if not consistent:
        raise RealizabilityError(f"no hypothesis is consistent with the labels on {train_set}")
    bit = 1 << (x - 1)
    values = {h & bit for h in consistent}
    if len(values) == 1:
        return 1 if values.pop() else 0

    sub = BitVector(m, s | bit)
    positions = sub.positions()
    restricted = {BitVector(m, h).restrict(positions) for h in consistent}
    if len(restricted) != 2:
        if diagnostics is not None:
            diagnostics["degenerate"] = diagnostics.get("degenerate", 0) + 1
        return 0
    u, v = sorted(restricted)
    head = rule.orient(sub).head_of(u, v)
    return head[positions.index(x) + 1]


def realize_hypothesis(
    rule: OrientationRule,
    train_set: BitVector,
    cls: ProjectedClass,
    domain_size: int | None = None,
    labels: BitVector | None = None,
    diagnostics: MutableMapping[str, int] | None = None,
) -> BitVector:
    m = domain_size or cls.domain_size
    if m != cls.domain_size:
        raise InputError(f"domain size {m} != class domain size {cls.domain_size}")
    bits = [predict(rule, train_set, cls, x, labels, diagnostics) for x in range(1, m + 1)]
    return BitVector.from_bits(bits)


def exact_error(h: BitVector, target: BitVector) -> Fraction:
    """Disagreement rate under the uniform distribution on the domain."""
    if h.length != target.length:
        raise InputError(f"length mismatch: {h.length} vs {target.length}")
    return Fraction((h.mask ^ target.mask).bit_count(), h.length)
