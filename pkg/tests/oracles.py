"""Brute-force reference implementations, deliberately naive and independent of the package."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def vectors(m: int):
    return ["".join(bits) for bits in itertools.product("01", repeat=m)]


def vc_dim(hyps: list[str]) -> int:
    m = len(hyps[0])
    best = 0
    for size in range(1, m + 1):
        for pts in itertools.combinations(range(m), size):
            if len({tuple(h[p] for p in pts) for h in hyps}) == 2**size:
                best = size
    return best


def edges(hyps: list[str]) -> list[tuple[str, str]]:
    return [
        (u, v)
        for u, v in itertools.combinations(sorted(hyps), 2)
        if sum(a != b for a, b in zip(u, v)) == 1
    ]


def min_max_outdegree(hyps: list[str]) -> int:
    """t* by trying every orientation. Only for tiny graphs."""
    es = edges(hyps)
    if not es:
        return 0
    best = len(es)
    for heads in itertools.product((0, 1), repeat=len(es)):
        out = dict.fromkeys(hyps, 0)
        for (u, v), h in zip(es, heads):
            out[u if h else v] += 1  # h=1 means head is v, so u is the tail
        best = min(best, max(out.values()))
    return best


def residue_counts(m: int, k: int) -> list[int]:
    counts = [0] * (m + 1)
    for v in vectors(m):
        if v.count("1") == k:
            counts[sum(i + 1 for i, b in enumerate(v) if b == "1") % (m + 1)] += 1
    return counts


def set_size_law(n: int) -> dict[int, Fraction]:
    """Law of the number of distinct points among n uniform draws from 2n, by enumerating sequences."""
    m = 2 * n
    law: dict[int, int] = {}
    for seq in itertools.product(range(m), repeat=n):
        k = len(set(seq))
        law[k] = law.get(k, 0) + 1
    return {k: Fraction(c, m**n) for k, c in law.items()}


def set_size_law_closed(n: int) -> dict[int, Fraction]:
    """Same law via Stirling numbers of the second kind, a different route from inclusion-exclusion."""
    m = 2 * n

    @__import__("functools").lru_cache(None)
    def stirling(a: int, b: int) -> int:
        if a == b:
            return 1
        if b == 0 or b > a:
            return 0
        return b * stirling(a - 1, b) + stirling(a - 1, b - 1)

    return {
        k: Fraction(math.comb(m, k) * math.factorial(k) * stirling(n, k), m**n)
        for k in range(1, n + 1)
    }
