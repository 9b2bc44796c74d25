"""The coordinated adversarial orientation rule and its random-flip baseline.

For a training-set size ``k`` the construction takes the ``L = 4*ceil(delta*n)``
most populated VT residue classes of the weight-``k`` layer as the set
``V_1`` of training sets to sabotage.  Every ``(k+1)``-set ``v`` looks at
the members of ``V_1`` it covers, ``M(v)``, and keeps up to ``d`` of them,
``N(v)``.  In the one-inclusion graph on ``v`` the edge from the zero
hypothesis to the indicator of ``v \\ s`` is then pointed away from zero for
each kept ``s``, and towards zero otherwise.  A training set in ``V_1`` that
is kept by many of its extensions mislabels every such extension point.

The random choice of ``N(v)`` is replaced by keyed hashing, so the rule is a
pure function of ``(seed, v)``; seeds are accepted by rejection against the
cardinality guarantees the random process is meant to deliver.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .concept_class import BitVector, ProjectedClass, project
from .errors import CapacityError, ConfigError, ConstructionError, InputError
from .mixing import (
    TAG_FLIP,
    TAG_SELECT,
    keyed_mix,
    keyed_mix_np,
    position_hash_np,
    set_hash,
)
from .oig import (
    Orientation,
    OrientationRule,
    build_graph,
    closure_orientation,
    orient_min_max_outdegree,
)
from .vt_code import count_by_residue, predecessors, residue

HEAVY_FRACTION = Fraction(3, 4)
EXHAUSTIVE_LIMIT = 2_000_000


def as_fraction(x) -> Fraction:
    """Exact value of a user-supplied number; floats go through their shortest repr (0.1 -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class AdversarialParams:
    n: int
    d: int
    delta: Fraction
    seed: int = 0

    def __init__(self, n: int, d: int, delta, seed: int = 0):
        delta = as_fraction(delta)
        if n < 1:
            raise ConfigError(f"n must be >= 1, got {n}")
        if d < 1:
            raise ConfigError(f"d must be >= 1, got {d}")
        if not 0 < delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {delta}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "seed", int(seed))
        if self.L > self.m + 1 or delta * n < d:
            warnings.warn(
                f"n={n}, d={d}, delta={delta} is outside the regime delta in (c1 d/n, c2) "
                "where the lower bound is guaranteed; the construction is still well defined",
                stacklevel=2,
            )

    @property
    def m(self) -> int:
        return 2 * self.n

    @property
    def L(self) -> int:
        return 4 * math.ceil(self.delta * self.n)

    @property
    def heavy_threshold(self) -> Fraction:
        """Minimum ``|N(s)|`` for a training set to count as heavy: ``d / (8 delta)``."""
        return Fraction(self.d) / (8 * self.delta)

    @property
    def error_threshold(self) -> Fraction:
        """Error guaranteed for heavy training sets: ``d / (16 delta n)``."""
        return Fraction(self.d) / (16 * self.delta * self.n)

    def with_seed(self, seed: int) -> AdversarialParams:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return AdversarialParams(self.n, self.d, self.delta, seed)


@dataclass(frozen=True)
class BipartiteView:
    """The bipartite graph between ``V_1`` (weight ``k``) and ``V_2`` (weight ``k+1``), kept implicit."""

    params: AdversarialParams
    k: int
    seed: int
    top: frozenset[int]
    in_top: np.ndarray = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.params.m

    def in_v1(self, s: BitVector) -> bool:
        return s.ones_count() == self.k and residue(s) in self.top


def bipartite_view(params: AdversarialParams, k: int, seed: int | None = None) -> BipartiteView:
    """View for training-set size ``k``; the selection seed defaults to ``params.seed``."""
    return _view(params, k, params.seed if seed is None else int(seed))


@lru_cache(maxsize=1024)
def _view(params: AdversarialParams, k: int, seed: int) -> BipartiteView:
    m = params.m
    if not 0 <= k < m:
        raise InputError(f"training-set size k={k} outside 0..{m - 1}")
    profile = count_by_residue(m, k)
    top = frozenset(profile.order[: min(params.L, m + 1)])
    mask = np.zeros(m + 1, dtype=bool)
    mask[list(top)] = True
    mask.setflags(write=False)
    return BipartiteView(params, k, seed, top, mask)


def _check_extension(v: BitVector, view: BipartiteView):
    if v.length != view.m:
        raise InputError(f"vector length {v.length} != domain size {view.m}")
    if v.ones_count() != view.k + 1:
        raise InputError(f"{v} has {v.ones_count()} ones, expected {view.k + 1}")


def m_set(v: BitVector, view: BipartiteView) -> list[BitVector]:
    """Members of ``V_1`` covered by ``v``, in canonical order."""
    _check_extension(v, view)
    mod = view.m + 1
    r = residue(v)
    return [s for p, s in predecessors(v) if (r - p) % mod in view.top]


def selection_key(seed: int, k: int, v: BitVector, dropped: int, v_hash: int | None = None) -> int:
    if v_hash is None:
        v_hash = set_hash(v.positions())
    return keyed_mix(seed, TAG_SELECT, k, v_hash, dropped)


def select_neighbors(v: BitVector, view: BipartiteView) -> set[BitVector]:
    """``N(v)``: the ``min(d, |M(v)|)`` members of ``M(v)`` with the smallest keys.

    Each candidate is keyed by the position it drops from ``v``; ties on
    the key go to the smaller position.
    """
    candidates = []
    v_hash = set_hash(v.positions())
    for s in m_set(v, view):
        dropped = (v.mask ^ s.mask).bit_length()
        candidates.append((selection_key(view.seed, view.k, v, dropped, v_hash), dropped, s))
    candidates.sort(key=lambda c: (c[0], c[1]))
    return {s for _, _, s in candidates[: view.params.d]}


def _reorient_center(base: Orientation, outward: set[int]) -> Orientation:
    """Point zero-incident edges at the petals listed in ``outward`` (projected coordinates), else at zero."""
    g = base.graph
    zero = g.cls.index(BitVector.zeros(g.cls.domain_size))
    if zero < 0:
        raise ConstructionError("the zero hypothesis is not in the projection")
    heads = list(base.heads)
    seen = set()
    for e in g.incident(zero):
        i, j, coord = g.edges[e]
        petal = j if i == zero else i
        if coord in outward:
            heads[e] = petal
            seen.add(coord)
        else:
            heads[e] = zero
    missing = outward - seen
    if missing:
        raise ConstructionError(f"no edge from zero to the indicator of coordinate(s) {sorted(missing)}")
    return Orientation(g, tuple(heads))


def orient_extension(s_prime: BitVector, cls: ProjectedClass, view: BipartiteView) -> Orientation:
    """Low out-degree baseline on ``cls`` projected to ``s_prime``, then the zero hypothesis re-pointed."""
    _check_extension(s_prime, view)
    g = build_graph(project(cls, s_prime))
    base = orient_min_max_outdegree(g)
    coords = {p: c for c, p in enumerate(s_prime.positions(), start=1)}
    outward = {coords[(s_prime.mask ^ s.mask).bit_length()] for s in select_neighbors(s_prime, view)}
    return _reorient_center(base, outward)


def extension_neighborhood(s: BitVector, view: BipartiteView) -> frozenset[int]:
    """Points ``x`` outside ``s`` such that ``s`` is kept by ``s + x``. Empty unless ``s`` is in ``V_1``."""
    if s.length != view.m:
        raise InputError(f"vector length {s.length} != domain size {view.m}")
    if not view.in_v1(s):
        return frozenset()
    out = set()
    for x in range(1, view.m + 1):
        bit = 1 << (x - 1)
        if s.mask & bit:
            continue
        if s in select_neighbors(BitVector(view.m, s.mask | bit), view):
            out.add(x)
    return frozenset(out)


def is_heavy(size: int, params: AdversarialParams) -> bool:
    return size >= params.heavy_threshold


def is_in_w1(s: BitVector, view: BipartiteView) -> bool:
    k = s.ones_count()
    if not 1 <= k <= view.params.n:
        raise InputError(f"training set has {k} points, expected 1..{view.params.n}")
    if k != view.k:
        raise InputError(f"training set has {k} points but the view is for k={view.k}")
    return view.in_v1(s) and is_heavy(len(extension_neighborhood(s, view)), view.params)


class _FastPaths:
    """Vectorized neighbor counting over all extensions of one training set at once."""

    def __init__(self, m: int):
        self.m = m
        self.all_points = np.arange(1, m + 1, dtype=np.int64)
        self.pos_hash = position_hash_np(np.arange(m + 1))

    def split(self, positions: np.ndarray):
        outside = np.ones(self.m + 1, dtype=bool)
        outside[0] = False
        outside[positions] = False
        return np.flatnonzero(outside).astype(np.int64)

    def set_hash(self, positions: np.ndarray) -> np.uint64:
        return _wrap_sum(self.pos_hash[positions])

    def extension_neighborhood(self, positions: np.ndarray, view: BipartiteView) -> np.ndarray:
        k = len(positions)
        mod = self.m + 1
        r_s = int(positions.sum()) % mod
        if k != view.k or not view.in_top[r_s]:
            return np.empty(0, dtype=np.int64)
        xs = self.split(positions)
        hv = self.set_hash(positions) + self.pos_hash[xs]
        seed = view.seed
        key_self = keyed_mix_np(seed, TAG_SELECT, k, hv, xs)
        if k == 0:
            return xs.copy()
        res_other = (r_s + xs[:, None] - positions[None, :]) % mod
        cand = view.in_top[res_other]
        key_other = keyed_mix_np(seed, TAG_SELECT, k, hv[:, None], positions[None, :])
        ks = key_self[:, None]
        beats = cand & ((key_other < ks) | ((key_other == ks) & (positions[None, :] < xs[:, None])))
        return xs[beats.sum(axis=1) < view.params.d]

    def neighborhood_sizes(self, batch: np.ndarray, view: BipartiteView) -> np.ndarray:
        """``|N(s)|`` for each row of ``batch`` (sorted positions of weight-``view.k`` sets)."""
        rows, k = batch.shape
        if k != view.k:
            raise InputError(f"batch rows have {k} points, view is for k={view.k}")
        mod = self.m + 1
        step = max(1, 4_000_000 // max(1, (self.m - k) * max(k, 1)))
        out = np.zeros(rows, dtype=np.int64)
        for lo in range(0, rows, step):
            pos = batch[lo : lo + step]
            free = np.ones((len(pos), mod), dtype=bool)
            free[:, 0] = False
            free[np.arange(len(pos))[:, None], pos] = False
            xs = np.nonzero(free)[1].reshape(len(pos), self.m - k)
            r_s = pos.sum(axis=1) % mod
            hv = np.add.reduce(self.pos_hash[pos], axis=1, dtype=np.uint64)[:, None] + self.pos_hash[xs]
            ks = keyed_mix_np(view.seed, TAG_SELECT, k, hv, xs)[:, :, None]
            res_other = (r_s[:, None, None] + xs[:, :, None] - pos[:, None, :]) % mod
            key_other = keyed_mix_np(view.seed, TAG_SELECT, k, hv[:, :, None], pos[:, None, :])
            beats = view.in_top[res_other] & (
                (key_other < ks) | ((key_other == ks) & (pos[:, None, :] < xs[:, :, None]))
            )
            sizes = (beats.sum(axis=2) < view.params.d).sum(axis=1)
            out[lo : lo + step] = np.where(view.in_top[r_s], sizes, 0)
        return out

    def flipped_at_self(self, positions: np.ndarray, seed: int) -> np.ndarray:
        xs = self.split(positions)
        hv = self.set_hash(positions) + self.pos_hash[xs]
        key_self = keyed_mix_np(seed, TAG_FLIP, hv, xs)
        if len(positions) == 0:
            return xs.copy()
        key_other = keyed_mix_np(seed, TAG_FLIP, hv[:, None], positions[None, :])
        ks = key_self[:, None]
        loses = (key_other < ks) | ((key_other == ks) & (positions[None, :] < xs[:, None]))
        return xs[~loses.any(axis=1)]


def _wrap_sum(values: np.ndarray) -> np.uint64:
    # uint64 addition wraps, matching the additive set hash mod 2**64
    return np.add.reduce(values, dtype=np.uint64) if len(values) else np.uint64(0)


@lru_cache(maxsize=64)
def _fast_paths(m: int) -> _FastPaths:
    return _FastPaths(m)


def _positions_array(s: BitVector) -> np.ndarray:
    return np.fromiter(s.positions(), dtype=np.int64)


def extension_neighborhood_fast(s: BitVector, view: BipartiteView) -> frozenset[int]:
    """Same set as :func:`extension_neighborhood`, computed for all extensions in one pass."""
    if s.length != view.m:
        raise InputError(f"vector length {s.length} != domain size {view.m}")
    if s.ones_count() != view.k:
        return frozenset()
    return frozenset(int(x) for x in _fast_paths(view.m).extension_neighborhood(_positions_array(s), view))


class AdversarialRule(OrientationRule):
    """Orientation rule built from the bipartite views for every ``k`` in ``1..n``.

    Subsets whose size is not ``k + 1`` for such a ``k`` get the closure
    orientation.  ``seeds`` optionally gives the selection seed per ``k``
    (as accepted by :func:`accept_seeds`); missing sizes use ``params.seed``.
    """

    name = "adversarial"

    def __init__(
        self,
        host: ProjectedClass,
        params: AdversarialParams,
        seeds: Mapping[int, int] | None = None,
        cache_size: int = 4096,
    ):
        if host.domain_size != params.m:
            raise ConfigError(f"host domain size {host.domain_size} != 2n = {params.m}")
        super().__init__(host, cache_size)
        self.params = params
        self.seeds = dict(seeds or {})

    def view(self, k: int) -> BipartiteView:
        return bipartite_view(self.params, k, self.seeds.get(k, self.params.seed))

    def _orient(self, subset):
        k = subset.ones_count() - 1
        if 1 <= k <= self.params.n:
            return orient_extension(subset, self.host, self.view(k))
        g = build_graph(project(self.host, subset))
        return closure_orientation(g, BitVector.zeros(g.cls.domain_size))

    def neighborhood(self, train_set: BitVector) -> frozenset[int]:
        k = train_set.ones_count()
        if not 1 <= k <= self.params.n:
            return frozenset()
        return extension_neighborhood_fast(train_set, self.view(k))

    def mistakes(self, train_set):
        """Error set under the zero target for bounded-ones hosts: exactly ``N(train_set)``."""
        return self.neighborhood(train_set)

    def neighborhood_positions(self, positions: np.ndarray) -> np.ndarray:
        """Array form of :meth:`neighborhood` for sorted 1-based positions."""
        k = len(positions)
        if not 1 <= k <= self.params.n:
            return np.empty(0, dtype=np.int64)
        return _fast_paths(self.params.m).extension_neighborhood(positions, self.view(k))

    def in_w1(self, train_set: BitVector) -> bool:
        k = train_set.ones_count()
        if not 1 <= k <= self.params.n:
            return False
        return self.view(k).in_v1(train_set) and is_heavy(len(self.neighborhood(train_set)), self.params)


def flip_point(subset: BitVector, seed: int) -> int:
    """The point whose zero-incident edge the random-flip rule points outward."""
    h = set_hash(subset.positions())
    return min(subset.positions(), key=lambda p: (keyed_mix(seed, TAG_FLIP, h, p), p))


class RandomFlipRule(OrientationRule):
    """Uncoordinated baseline: on every subset exactly one zero-incident edge points away from zero."""

    name = "random_flip"

    def __init__(self, host: ProjectedClass, seed: int = 0, cache_size: int = 4096):
        super().__init__(host, cache_size)
        self.seed = int(seed)

    def _orient(self, subset):
        g = build_graph(project(self.host, subset))
        base = orient_min_max_outdegree(g)
        coord = subset.positions().index(flip_point(subset, self.seed)) + 1
        return _reorient_center(base, {coord})

    def mistakes(self, train_set):
        pts = _positions_array(train_set)
        return frozenset(int(x) for x in _fast_paths(self.host.domain_size).flipped_at_self(pts, self.seed))

    def mistakes_positions(self, positions: np.ndarray) -> np.ndarray:
        return _fast_paths(self.host.domain_size).flipped_at_self(positions, self.seed)


def random_flip_rule(seed: int, host: ProjectedClass) -> RandomFlipRule:
    return RandomFlipRule(host, seed)


@dataclass(frozen=True)
class MatchingReport:
    """Outcome of checking one bipartite view against the two cardinality guarantees."""

    k: int
    mode: str
    out_degree_ok: bool
    heavy_fraction: float
    heavy: int
    v1_checked: int
    v1_size: int

    @property
    def accepted(self) -> bool:
        return self.out_degree_ok and self.heavy * HEAVY_FRACTION.denominator >= (
            HEAVY_FRACTION.numerator * self.v1_checked
        )


def verify_matching_lemma(
    view: BipartiteView,
    mode: str = "exhaustive",
    samples: int = 2000,
    sample_seed: int | None = None,
) -> MatchingReport:
    """Check ``|N(v)| <= d`` on ``V_2`` and measure the fraction of heavy members of ``V_1``.

    ``exhaustive`` enumerates both layers; ``sampled`` draws ``samples``
    members of ``V_1`` uniformly and spot-checks up to 100 members of ``V_2``.
    """
    params = view.params
    m, k, d = params.m, view.k, params.d
    v1_size = sum(count_by_residue(m, k).counts[a] for a in view.top)
    if mode == "exhaustive":
        if math.comb(m, k + 1) + math.comb(m, k) > EXHAUSTIVE_LIMIT:
            raise CapacityError(f"exhaustive check at m={m}, k={k} enumerates too many sets")
        counts: dict[int, int] = {}
        ok = True
        for combo in itertools.combinations(range(1, m + 1), k + 1):
            v = BitVector.from_positions(m, combo)
            chosen = select_neighbors(v, view)
            ok &= len(chosen) <= d
            for s in chosen:
                counts[s.mask] = counts.get(s.mask, 0) + 1
        heavy = sum(1 for c in counts.values() if is_heavy(c, params))
        if is_heavy(0, params):
            heavy += v1_size - len(counts)
        return MatchingReport(k, mode, ok, heavy / v1_size, heavy, v1_size, v1_size)
    if mode != "sampled":
        raise InputError(f"unknown mode {mode!r}")
    rng = np.random.default_rng([view.seed if sample_seed is None else sample_seed, k, 0x5A])
    fast = _fast_paths(m)

    def uniform_subsets(size: int, count: int) -> np.ndarray:
        # first `size` columns of a random permutation of 1..m, one row per subset
        return np.sort(rng.random((count, m)).argsort(axis=1)[:, :size] + 1, axis=1)

    heavy = 0
    drawn = 0
    attempts = 0
    while drawn < samples:
        batch = uniform_subsets(k, 2 * samples)
        attempts += len(batch)
        if attempts > 1000 * samples:
            raise CapacityError("could not sample V_1 by rejection")
        members = batch[view.in_top[batch.sum(axis=1) % (m + 1)]][: samples - drawn]
        drawn += len(members)
        # sizes are integers, so comparing with the ceiling is exact
        heavy += int(np.count_nonzero(fast.neighborhood_sizes(members, view) >= math.ceil(params.heavy_threshold)))
    ok = True
    for pos in uniform_subsets(k + 1, min(samples, 100)):
        ok &= len(select_neighbors(BitVector.from_positions(m, pos.tolist()), view)) <= d
    return MatchingReport(k, mode, ok, heavy / drawn, heavy, drawn, v1_size)


@dataclass
class SeedSearch:
    """Rejection history for one view size ``k``."""

    k: int
    accepted_seed: int | None
    attempts: int
    reports: dict[int, MatchingReport]

    @property
    def accepted_report(self) -> MatchingReport | None:
        return None if self.accepted_seed is None else self.reports[self.accepted_seed]


def find_accepted_seed(
    params: AdversarialParams,
    k: int,
    max_attempts: int = 64,
    mode: str = "exhaustive",
    samples: int = 2000,
) -> SeedSearch:
    """Try seeds ``params.seed, params.seed + 1, ...`` until the view for ``k`` is accepted."""
    reports = {}
    for attempt in range(max_attempts):
        seed = params.seed + attempt
        report = verify_matching_lemma(bipartite_view(params, k, seed), mode, samples)
        reports[seed] = report
        if report.accepted:
            return SeedSearch(k, seed, attempt + 1, reports)
    return SeedSearch(k, None, max_attempts, reports)


def accept_seeds(
    params: AdversarialParams,
    ks=None,
    max_attempts: int = 64,
    mode: str = "exhaustive",
    samples: int = 2000,
) -> dict[int, SeedSearch]:
    """Run :func:`find_accepted_seed` for every ``k`` in ``ks`` (default ``1..n``)."""
    ks = range(1, params.n + 1) if ks is None else ks
    return {k: find_accepted_seed(params, k, max_attempts, mode, samples) for k in ks}
