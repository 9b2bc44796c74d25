"""Varshamov-Tenengolts codes, residue-class counting and the coverage relation.

``VT_a(m)`` is the set of length-``m`` binary vectors whose weighted sum
``sum(i * v(i))`` is congruent to ``a`` modulo ``m + 1``.  The residue
classes partition ``{0,1}^m``.  Intersecting them with the layer of
vectors having exactly ``k`` ones gives the sets ``T_a`` whose sizes drive
the adversarial construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .concept_class import BitVector
from .errors import InputError, InvariantViolation


@dataclass(frozen=True)
class VtParams:
    m: int
    a: int

    def __post_init__(self):
        if self.m < 1:
            raise InputError("VT code length must be >= 1")
        if not 0 <= self.a <= self.m:
            raise InputError(f"residue a={self.a} outside 0..{self.m}")

    @property
    def modulus(self) -> int:
        return self.m + 1


def residue(v: BitVector) -> int:
    return sum(v.positions()) % (v.length + 1)


def is_member(v: BitVector, p: VtParams) -> bool:
    if v.length != p.m:
        raise InputError(f"vector length {v.length} != code length {p.m}")
    return residue(v) == p.a


@dataclass(frozen=True)
class ResidueProfile:
    """``counts[a] = |VT_a(m) ∩ S_k|``; ``order`` lists residues by descending count, ties by residue."""

    m: int
    k: int
    counts: tuple[int, ...]
    order: tuple[int, ...]

    @property
    def total(self) -> int:
        return math.comb(self.m, self.k)


@lru_cache(maxsize=1024)
def count_by_residue(m: int, k: int) -> ResidueProfile:
    """Exact residue counts of the weight-``k`` layer, by dynamic programming over positions."""
    if m < 1 or not 0 <= k <= m:
        raise InputError(f"need 0 <= k <= m and m >= 1, got m={m}, k={k}")
    counts = _residue_table(m)[k]
    if sum(counts) != math.comb(m, k):
        raise InvariantViolation(f"residue counts for m={m}, k={k} do not sum to C(m,k)")
    order = tuple(sorted(range(m + 1), key=lambda a: (-counts[a], a)))
    return ResidueProfile(m, k, counts, order)


@lru_cache(maxsize=8)
def _residue_table(m: int) -> tuple[tuple[int, ...], ...]:
    mod = m + 1
    # table[j][r]: vectors on positions 1..i with j ones and weighted sum r (mod m+1)
    table = [[0] * mod for _ in range(m + 1)]
    table[0][0] = 1
    for i in range(1, m + 1):
        shift = i % mod
        for j in range(i, 0, -1):
            prev = table[j - 1]
            table[j] = [a + b for a, b in zip(table[j], prev[-shift:] + prev[:-shift])]
    return tuple(tuple(row) for row in table)


def covers(s_prime: BitVector, s: BitVector) -> bool:
    """``s_prime`` is ``s`` with exactly one 1 flipped to 0."""
    if s_prime.length != s.length:
        raise InputError(f"length mismatch: {s_prime.length} vs {s.length}")
    diff = s_prime.mask ^ s.mask
    return diff != 0 and diff & (diff - 1) == 0 and diff & s.mask != 0


def predecessors(s: BitVector) -> Iterator[tuple[int, BitVector]]:
    """``(dropped position, vector)`` for every vector covered by ``s``, in canonical order."""
    # dropping an earlier 1 gives a lexicographically smaller string
    for p in s.positions():
        yield p, BitVector(s.length, s.mask & ~(1 << (p - 1)))


def covered_by_residue(s: BitVector) -> dict[int, list[BitVector]]:
    """Group the vectors covered by ``s`` by residue."""
    mod = s.length + 1
    r = residue(s)
    groups: dict[int, list[BitVector]] = {}
    for p, v in predecessors(s):
        groups.setdefault((r - p) % mod, []).append(v)
    return groups


def covered_codewords(s: BitVector, p: VtParams) -> set[BitVector]:
    """Codewords of ``VT_a(m)`` covered by ``s``. Never more than one."""
    if s.length != p.m:
        raise InputError(f"vector length {s.length} != code length {p.m}")
    found = covered_by_residue(s).get(p.a, [])
    if len(found) > 1:
        raise InvariantViolation(f"{s} covers {len(found)} codewords of VT_{p.a}({p.m})")
    return set(found)


def top_residues(profile: ResidueProfile, L: int) -> frozenset[int]:
    if not 1 <= L <= profile.m + 1:
        raise InputError(f"L={L} outside 1..{profile.m + 1}")
    return frozenset(profile.order[:L])


def prefix_mass(profile: ResidueProfile, ell: int) -> int:
    """``sum_{i <= ell} |T_(i)|``."""
    if not 0 <= ell <= profile.m:
        raise InputError(f"ell={ell} outside 0..{profile.m}")
    return sum(profile.counts[a] for a in profile.order[: ell + 1])


def check_prefix_mass(profile: ResidueProfile, ell: int) -> bool:
    """``sum_{i <= ell} |T_(i)| >= (ell + 1) / (3n) * C(m, k)`` with ``n = m / 2``, exactly."""
    if profile.m % 2:
        raise InputError(f"prefix-mass check needs even m, got {profile.m}")
    n = profile.m // 2
    return 3 * n * prefix_mass(profile, ell) >= (ell + 1) * profile.total


def brute_force_counts(m: int, k: int) -> tuple[int, ...]:
    """Residue counts by enumerating all ``C(m, k)`` vectors. Oracle for :func:`count_by_residue`."""
    from itertools import combinations

    counts = [0] * (m + 1)
    for combo in combinations(range(1, m + 1), k):
        counts[sum(combo) % (m + 1)] += 1
    return tuple(counts)


def check_unique_neighborhoods(m: int) -> dict:
    """Exhaustively confirm that no vector of length ``m`` covers two codewords of one VT code.

    Also checks that the residue counts of every layer partition ``C(m, k)``
    and agree with enumeration.
    """
    if not 1 <= m <= 20:
        raise InputError(f"exhaustive check limited to 1 <= m <= 20, got {m}")
    mod = m + 1
    max_covered = 0
    weighted = [0] * (1 << m)
    # weighted sums for all masks, built incrementally from the lowest set bit
    for mask in range(1, 1 << m):
        low = mask & -mask
        weighted[mask] = weighted[mask ^ low] + low.bit_length()
    for mask in range(1 << m):
        r = weighted[mask]
        seen = set()
        rest = mask
        while rest:
            low = rest & -rest
            rest ^= low
            a = (r - low.bit_length()) % mod
            if a in seen:
                max_covered = 2
                break
            seen.add(a)
        else:
            max_covered = max(max_covered, 1 if seen else 0)
        if max_covered > 1:
            break
    layers_ok = all(
        sum(count_by_residue(m, k).counts) == math.comb(m, k)
        and count_by_residue(m, k).counts == brute_force_counts(m, k)
        for k in range(m + 1)
    )
    return {
        "m": m,
        "vectors": 1 << m,
        "max_covered": max_covered,
        "partition_ok": layers_ok,
        "ok": max_covered <= 1 and layers_ok,
    }
