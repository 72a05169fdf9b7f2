"""Multi-indices on the integer lattice and the orbit structure of the dot action.

A multi-index is a finitely supported map ``site -> count``.  It doubles as a
particle configuration: ``count`` particles sit on ``site``.  Its coding is the
nondecreasing vector of occupied sites, repeated by multiplicity.

Shift convention: the index-level shift ``shift(I, n)`` moves a particle at
site ``k`` to ``k - n``.  This is forced by ``(tau f)(x) = f(tau x)`` with
``(tau x)_k = x_{k+1}``, which gives ``tau H_{delta_k} = H_{delta_{k+1}}``
and therefore ``tau^{-1}`` on indices maps ``k -> k + 1``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Mapping

LatticePoint = tuple[int, ...]


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Immutable multi-index stored as sorted ``(site, count)`` pairs, counts >= 1."""

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        sites = [s for s, _ in self.items]
        if sites != sorted(set(sites)):
            raise ValueError(f"sites must be strictly increasing: {self.items}")
        if any(c < 1 for _, c in self.items):
            raise ValueError(f"counts must be positive: {self.items}")

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "MultiIndex":
        for site, c in counts.items():
            if c < 0:
                raise ValueError(f"negative count {c} at site {site}")
        return cls(tuple(sorted((int(s), int(c)) for s, c in counts.items() if c)))

    @classmethod
    def from_sites(cls, sites: Iterable[int]) -> "MultiIndex":
        """Build from a list of occupied sites with repetition (any order)."""
        return cls.from_counts(Counter(int(s) for s in sites))

    @classmethod
    def delta(cls, site: int, count: int = 1) -> "MultiIndex":
        return cls.from_counts({site: count})

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Parse ``"site:count,site:count"``; ``""`` or ``"0"`` is the zero multi-index."""
        text = text.strip()
        if text in ("", "0", "()"):
            return cls()
        counts: Counter = Counter()
        for part in text.split(","):
            site, sep, count = part.partition(":")
            if not sep:
                raise ValueError(f"malformed multi-index term {part!r}")
            counts[int(site)] += int(count)
        return cls.from_counts(counts)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        return ",".join(f"{s}:{c}" for s, c in self.items)

    def __repr__(self) -> str:
        return f"MultiIndex({str(self)!r})"

    def counts(self) -> dict[int, int]:
        return dict(self.items)

    def __getitem__(self, site: int) -> int:
        for s, c in self.items:
            if s == site:
                return c
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.items)

    @property
    def degree(self) -> int:
        return sum(c for _, c in self.items)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        counts = Counter(self.counts())
        counts.update(other.counts())
        return MultiIndex.from_counts(counts)

    def remove(self, site: int) -> "MultiIndex | None":
        """``I - delta_site``, or ``None`` when that would create a negative entry."""
        counts = self.counts()
        if counts.get(site, 0) == 0:
            return None
        counts[site] -= 1
        return MultiIndex.from_counts(counts)


ZERO = MultiIndex()


def degree(index: MultiIndex) -> int:
    return index.degree


def encode(index: MultiIndex) -> LatticePoint:
    """Nondecreasing vector of occupied sites with multiplicity."""
    return tuple(s for s, c in index.items for _ in range(c))


def decode(z: Iterable[int]) -> MultiIndex:
    return MultiIndex.from_sites(z)


def shift(index: MultiIndex, n: int) -> MultiIndex:
    """Index-level ``tau^n``: every particle at ``k`` moves to ``k - n``."""
    return MultiIndex(tuple((s - n, c) for s, c in index.items))


def dot_action(n: int, index: MultiIndex) -> MultiIndex | None:
    """``n . I = tau^n (I - delta_n + delta_0)``; ``None`` if an entry goes negative."""
    if n == 0:
        return index
    removed = index.remove(n)
    if removed is None:
        return None
    return shift(removed + MultiIndex.delta(0), n)


def orbit(index: MultiIndex) -> frozenset[MultiIndex]:
    """The orbit shadow: all ``n . I`` with positive entries.

    Only ``n`` in the support of ``I`` or ``n = 0`` can keep entries
    nonnegative, so the orbit is ``{n . I : n in s(I) | {0}}``.
    """
    return frozenset(dot_action(n, index) for n in {0, *index.support})


def representative(index: MultiIndex) -> MultiIndex:
    """The unique orbit member supported on the nonnegative integers."""
    if not index.items or index.items[0][0] >= 0:
        return index
    rep = dot_action(index.items[0][0], index)
    assert rep is not None and rep.items[0][0] >= 0
    return rep


def cone_point(index: MultiIndex) -> LatticePoint:
    return encode(representative(index))


def is_cone_point(z: Iterable[int]) -> bool:
    z = tuple(z)
    return all(v >= 0 for v in z) and all(a <= b for a, b in zip(z, z[1:]))


def enumerate_orbits(N: int, bound: int) -> list[LatticePoint]:
    """All cone points of length ``N`` with entries in ``[0, bound]``, lexicographic."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return list(combinations_with_replacement(range(bound + 1), N))


def multi_indices(N: int, lo: int, hi: int) -> list[MultiIndex]:
    """All degree-``N`` multi-indices with every site in ``[lo, hi]``."""
    return [decode(z) for z in combinations_with_replacement(range(lo, hi + 1), N)]


def parse_point(text: str) -> LatticePoint:
    return tuple(int(t) for t in text.split())


def format_point(z: Iterable[int]) -> str:
    return " ".join(str(v) for v in z)
