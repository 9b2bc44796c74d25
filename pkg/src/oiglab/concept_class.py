"""Finite hypothesis classes over an indexed domain.

Domain points are numbered from 1.  A :class:`BitVector` of length ``m``
is simultaneously a hypothesis (its value on point ``i`` is bit ``i``), a
subset of the domain (the points where it is 1) and a VT codeword.  Bit 1
is the leftmost character of the string form, so ``"1000"`` is the
indicator of point 1.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import InputError, ParseError

# Soft limits for exhaustive routines.
MAX_DOMAIN = 24
MAX_HYPOTHESES = 1 << 20


@dataclass(frozen=True, eq=True)
class BitVector:
    """Fixed-length 0/1 vector stored as an integer mask (bit ``i-1`` = position ``i``)."""

    length: int
    mask: int

    def __post_init__(self):
        if self.length < 1:
            raise InputError(f"BitVector length must be >= 1, got {self.length}")
        if self.mask < 0 or self.mask >> self.length:
            raise InputError(f"mask {self.mask:#x} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, bits: str) -> BitVector:
        bits = bits.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise InputError(f"not a bit string: {bits!r}")
        mask = 0
        for i, ch in enumerate(bits):
            if ch == "1":
                mask |= 1 << i
        return cls(len(bits), mask)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> BitVector:
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise InputError(f"bit {i + 1} is {b!r}, expected 0 or 1")
            if b:
                mask |= 1 << i
        return cls(len(bits), mask)

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> BitVector:
        mask = 0
        for p in map(int, positions):
            if not 1 <= p <= length:
                raise InputError(f"position {p} outside 1..{length}")
            mask |= 1 << (p - 1)
        return cls(length, mask)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def indicator(cls, length: int, position: int) -> BitVector:
        return cls.from_positions(length, (position,))

    def __getitem__(self, position: int) -> int:
        """Value at ``position`` (1-based)."""
        if not 1 <= position <= self.length:
            raise InputError(f"position {position} outside 1..{self.length}")
        return (self.mask >> (position - 1)) & 1

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.mask >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return self.string

    def __repr__(self) -> str:
        return f"BitVector('{self.string}')"

    @cached_property
    def string(self) -> str:
        return "".join("1" if (self.mask >> i) & 1 else "0" for i in range(self.length))

    def __lt__(self, other: BitVector) -> bool:
        # canonical order: by length, then lexicographic on the string form
        return (self.length, self.string) < (other.length, other.string)

    def __le__(self, other: BitVector) -> bool:
        return self == other or self < other

    def ones_count(self) -> int:
        return self.mask.bit_count()

    def positions(self) -> tuple[int, ...]:
        """The 1-based positions holding a 1, ascending."""
        out = []
        m = self.mask
        while m:
            low = m & -m
            out.append(low.bit_length())
            m ^= low
        return tuple(out)

    def with_bit(self, position: int, value: int) -> BitVector:
        bit = 1 << (position - 1)
        if not 1 <= position <= self.length:
            raise InputError(f"position {position} outside 1..{self.length}")
        return BitVector(self.length, (self.mask | bit) if value else (self.mask & ~bit))

    def restrict(self, positions: Sequence[int]) -> BitVector:
        """Values at the given positions, in the order given."""
        mask = 0
        for j, p in enumerate(positions):
            if (self.mask >> (p - 1)) & 1:
                mask |= 1 << j
        return BitVector(len(positions), mask)


def hamming_distance(f: BitVector, g: BitVector) -> int:
    if f.length != g.length:
        raise InputError(f"length mismatch: {f.length} vs {g.length}")
    return (f.mask ^ g.mask).bit_count()


@dataclass(frozen=True)
class ProjectedClass:
    """A non-empty finite set of distinct hypotheses on ``domain_size`` points.

    Hypotheses are kept in canonical (lexicographic) order.
    """

    domain_size: int
    hypotheses: tuple[BitVector, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __init__(self, domain_size: int, hypotheses: Iterable[BitVector]):
        hyps = tuple(sorted(hypotheses))
        if domain_size < 1:
            raise InputError("domain_size must be >= 1")
        if not hyps:
            raise InputError("a class needs at least one hypothesis")
        for h in hyps:
            if h.length != domain_size:
                raise InputError(f"hypothesis {h} has length {h.length}, expected {domain_size}")
        index = {h.mask: i for i, h in enumerate(hyps)}
        if len(index) != len(hyps):
            raise InputError("duplicate hypotheses")
        object.__setattr__(self, "domain_size", domain_size)
        object.__setattr__(self, "hypotheses", hyps)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self) -> Iterator[BitVector]:
        return iter(self.hypotheses)

    def __contains__(self, v: BitVector) -> bool:
        return v.length == self.domain_size and v.mask in self._index

    def index(self, v: BitVector) -> int:
        try:
            return self._index[v.mask] if v.length == self.domain_size else -1
        except KeyError:
            return -1

    def masks(self) -> list[int]:
        return [h.mask for h in self.hypotheses]


def project(cls: ProjectedClass, subset: BitVector) -> ProjectedClass:
    """Restrict every hypothesis to the points of ``subset``; duplicates collapse."""
    if subset.length != cls.domain_size:
        raise InputError(f"subset length {subset.length} != domain size {cls.domain_size}")
    positions = subset.positions()
    if not positions:
        raise InputError("cannot project onto the empty subset")
    restricted = {h.restrict(positions).mask for h in cls.hypotheses}
    k = len(positions)
    return ProjectedClass(k, (BitVector(k, r) for r in restricted))


def _projection_count(masks: list[int], positions: Sequence[int]) -> int:
    bits = [1 << (p - 1) for p in positions]
    seen = set()
    for h in masks:
        key = 0
        for j, b in enumerate(bits):
            if h & b:
                key |= 1 << j
        seen.add(key)
    return len(seen)


def shatters(cls: ProjectedClass, positions: Sequence[int]) -> bool:
    return _projection_count(cls.masks(), positions) == 1 << len(positions)


def vc_dimension(cls: ProjectedClass) -> int:
    """Exact VC dimension by exhaustive search.

    Shattered sets are closed under taking subsets, so the search stops at
    the first size with no shattered set.  Sizes beyond ``log2 |class|``
    are never tried.
    """
    if cls.domain_size > MAX_DOMAIN or len(cls) > MAX_HYPOTHESES:
        raise InputError(
            f"class too large for exhaustive VC search (m={cls.domain_size}, |F|={len(cls)})"
        )
    masks = cls.masks()
    limit = min(cls.domain_size, int(math.floor(math.log2(len(masks)))))
    best = 0
    for size in range(1, limit + 1):
        if any(
            _projection_count(masks, combo) == 1 << size
            for combo in itertools.combinations(range(1, cls.domain_size + 1), size)
        ):
            best = size
        else:
            break
    return best


def build_indicator_class(m: int) -> ProjectedClass:
    """The zero function plus the indicator of every single point."""
    if m < 1:
        raise InputError("m must be >= 1")
    return ProjectedClass(m, [BitVector(m, 0)] + [BitVector(m, 1 << i) for i in range(m)])


def build_bounded_ones_class(m: int, d: int) -> ProjectedClass:
    """All vectors of length ``m`` with at most ``d`` ones."""
    if m < 1:
        raise InputError("m must be >= 1")
    if not 1 <= d <= m:
        raise InputError(f"need 1 <= d <= m, got d={d}, m={m}")
    size = sum(math.comb(m, i) for i in range(d + 1))
    if size > MAX_HYPOTHESES:
        raise InputError(f"bounded-ones class with m={m}, d={d} has {size} hypotheses")
    hyps = []
    for j in range(d + 1):
        for combo in itertools.combinations(range(m), j):
            mask = 0
            for i in combo:
                mask |= 1 << i
            hyps.append(BitVector(m, mask))
    return ProjectedClass(m, hyps)


@dataclass(frozen=True)
class StarSystem:
    """Center ``f_0`` (all zeros) with petals ``f_1..f_m``, petal ``i`` the indicator of point ``i``."""

    domain_size: int
    center: BitVector
    petals: tuple[BitVector, ...]

    @classmethod
    def canonical(cls, m: int) -> StarSystem:
        return cls(m, BitVector.zeros(m), tuple(BitVector.indicator(m, i) for i in range(1, m + 1)))


def is_star_system(cls: ProjectedClass, candidate: StarSystem) -> bool:
    """Whether every witness lies in ``cls`` and petal ``i`` differs from the center exactly on point ``i``."""
    m = candidate.domain_size
    if cls.domain_size != m or candidate.center.length != m or len(candidate.petals) != m:
        raise InputError("star system and class disagree on domain size")
    if candidate.center not in cls:
        return False
    for i, petal in enumerate(candidate.petals, start=1):
        if petal.length != m or petal not in cls:
            return False
        if petal.mask ^ candidate.center.mask != 1 << (i - 1):
            return False
    return True


def parse_class(text: str) -> ProjectedClass:
    """Parse the plain-text class format (see :func:`load_class_file`)."""
    header = None
    rows: list[BitVector] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise ParseError(f"expected header 'm h', got {line!r}", lineno)
            m, h = int(parts[0]), int(parts[1])
            if m < 1 or h < 1:
                raise ParseError("m and h must be positive", lineno)
            header = (m, h)
            continue
        m, h = header
        if len(line) != m or set(line) - {"0", "1"}:
            raise ParseError(f"expected {m} characters from {{0,1}}, got {line!r}", lineno)
        v = BitVector.from_str(line)
        if v.mask in seen:
            raise ParseError(f"duplicate hypothesis {line} (first on line {seen[v.mask]})", lineno)
        seen[v.mask] = lineno
        rows.append(v)
        if len(rows) > h:
            raise ParseError(f"more than the declared {h} hypotheses", lineno)
    if header is None:
        raise ParseError("missing header line 'm h'")
    if len(rows) != header[1]:
        raise ParseError(f"declared {header[1]} hypotheses, found {len(rows)}")
    return ProjectedClass(header[0], rows)


def load_class_file(path: str | os.PathLike) -> ProjectedClass:
    """Read a class file.

    The first non-comment line is ``m h``; then ``h`` lines of exactly
    ``m`` characters from ``{0,1}``.  Lines starting with ``#`` are
    comments.  Character ``i`` is the hypothesis value on point ``i``.
    """
    with open(path, encoding="utf-8") as fh:
        return parse_class(fh.read())


def format_class(cls: ProjectedClass) -> str:
    lines = [f"{cls.domain_size} {len(cls)}"]
    lines.extend(h.string for h in cls.hypotheses)
    return "\n".join(lines) + "\n"
