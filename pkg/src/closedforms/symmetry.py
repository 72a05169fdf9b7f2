"""The lattice group S~_N, its frequency-side twin, canonical forms and regions P_i.

S~_N is generated by the coordinate swaps ``sigma_{i,j}`` and
``gamma_1(z) = (-z_1, z_2 - z_1, ..., z_N - z_1)``.  Appending a phantom
coordinate ``z_0 = 0``, every element permutes ``(z_0, ..., z_N)`` and then
translates so that slot 0 is zero again, so the group has ``(N+1)!`` elements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .multiindex import LatticePoint, enumerate_orbits, format_point

Generator = tuple  # ("sigma", i, j) with 1-based i, j, or ("gamma", 1)

GAMMA = ("gamma", 1)


def sigma(i: int, j: int) -> Generator:
    return ("sigma", i, j)


def _apply_generator(gen: Generator, z: LatticePoint) -> LatticePoint:
    if gen[0] == "sigma":
        i, j = gen[1] - 1, gen[2] - 1
        if not (0 <= i < len(z) and 0 <= j < len(z)):
            raise ValueError(f"{gen} does not act on dimension {len(z)}")
        w = list(z)
        w[i], w[j] = w[j], w[i]
        return tuple(w)
    if gen[0] == "gamma":
        if not z:
            raise ValueError("gamma_1 needs N >= 1")
        z1 = z[0]
        return (-z1,) + tuple(v - z1 for v in z[1:])
    raise ValueError(f"unknown generator {gen!r}")


@dataclass(frozen=True)
class GroupElement:
    """A word over the generators, read as a composition: ``word[0]`` is applied last.

    Every generator is an involution, so the inverse is the reversed word.
    """

    word: tuple = ()

    @property
    def kind(self) -> str:
        return "gamma" if any(g[0] == "gamma" for g in self.word) else "permutation"

    def __call__(self, z: Sequence[int]) -> LatticePoint:
        return apply(self, z)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.word + other.word)

    def __pow__(self, k: int) -> "GroupElement":
        return GroupElement(self.word * k)

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(reversed(self.word)))


IDENTITY = GroupElement()


def gamma_i(i: int) -> GroupElement:
    """``gamma_i = sigma_{1,i} gamma_1 sigma_{1,i}``: coordinate ``i`` plays the role of coordinate 1.

    The image has ``-z_i`` in slot ``i`` and ``z_j - z_i`` elsewhere.  Writing
    ``gamma_1 sigma_{1,i}`` instead would land in the coset ``gamma_1 S_N``.
    """
    if i == 1:
        return GroupElement((GAMMA,))
    return GroupElement((sigma(1, i), GAMMA, sigma(1, i)))


def apply(g: GroupElement, z: Sequence[int]) -> LatticePoint:
    z = tuple(z)
    for gen in reversed(g.word):
        z = _apply_generator(gen, z)
    return z


def generators(N: int, tilde: bool = True) -> list[GroupElement]:
    gens = [GroupElement((sigma(i, i + 1),)) for i in range(1, N)]
    if tilde and N >= 1:
        gens.append(GroupElement((GAMMA,)))
    return gens


def _generic_point(N: int) -> LatticePoint:
    # distinct powers of two: all pairwise differences of (0, z) are distinct
    return tuple(2 ** k for k in range(N))


def group_elements(N: int, tilde: bool = True) -> list[GroupElement]:
    """All distinct elements of S~_N (or S_N), found by breadth-first word search."""
    probe = _generic_point(N)
    seen = {probe: IDENTITY}
    frontier = [IDENTITY]
    gens = generators(N, tilde)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s * g
                img = apply(h, probe)
                if img not in seen:
                    seen[img] = h
                    nxt.append(h)
        frontier = nxt
    return list(seen.values())


def canonicalize(z: Sequence[int]) -> LatticePoint:
    """The unique cone point in the S~_N-orbit of ``z``."""
    w = tuple(sorted(z))
    if w and w[0] < 0:
        w = tuple(sorted(_apply_generator(GAMMA, w)))
    return w


def canonical_max(z: np.ndarray) -> np.ndarray:
    """Largest coordinate of the canonical form, vectorized over the last axis.

    Equals ``max(0, z) - min(0, z)``: the spread of the multiset ``{0, z_1..z_N}``.
    """
    z = np.asarray(z)
    return np.maximum(z.max(axis=-1), 0) - np.minimum(z.min(axis=-1), 0)


def orbit_points(z: Sequence[int], N: int | None = None) -> set[LatticePoint]:
    elems = group_elements(len(z) if N is None else N)
    return {apply(g, z) for g in elems}


@dataclass(frozen=True)
class InvarianceReport:
    ok: bool
    witness: LatticePoint | None = None
    generator: GroupElement | None = None
    defect: float = 0.0


def is_invariant(c: Mapping[LatticePoint, float] | Callable[[LatticePoint], float],
                 region: Iterable[LatticePoint], group: str = "S~",
                 tol: float = 0.0) -> InvarianceReport:
    """Check ``c o gamma = c`` on ``region`` for every generator of ``group``.

    ``group`` is ``"S"`` (permutations) or ``"S~"``.  A mapping ``c`` reads
    missing points as zero.  Raises ``ValueError`` if the region is not closed
    under the group.
    """
    points = set(region)
    if not points:
        return InvarianceReport(True)
    N = len(next(iter(points)))
    gens = generators(N, tilde=(group != "S"))
    value = c if callable(c) else (lambda z: c.get(z, 0.0))
    worst = InvarianceReport(True)
    for z in sorted(points):
        for g in gens:
            gz = apply(g, z)
            if gz not in points:
                raise ValueError(f"region not closed under {group}: {z} -> {gz}")
            d = abs(value(gz) - value(z))
            if d > tol and d > worst.defect:
                worst = InvarianceReport(False, z, g, d)
    return worst


@dataclass(frozen=True)
class Region:
    """A bounded lattice region: an explicit point set plus its membership predicate."""

    N: int
    points: frozenset
    predicate: Callable[[LatticePoint], bool] = field(compare=False)
    kind: str = "P"
    index: int = 0

    def __contains__(self, z) -> bool:
        return self.predicate(tuple(z))

    def __iter__(self):
        return iter(sorted(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def dump(self) -> str:
        lines = [f"N={self.N} kind={self.kind} i={self.index}"]
        lines += [format_point(z) for z in sorted(self.points)]
        return "\n".join(lines) + "\n"


def region_P(i: int, N: int) -> Region:
    """Union of the S~_N-images of ``{0 <= z_1 <= ... <= z_N <= i-1}``."""
    if i < 1 or N < 1:
        raise ValueError("region_P needs i >= 1 and N >= 1")
    elems = group_elements(N)
    pts = {apply(g, z) for z in enumerate_orbits(N, i - 1) for g in elems}

    def member(z: LatticePoint) -> bool:
        return len(z) == N and canonicalize(z)[-1] <= i - 1

    return Region(N, frozenset(pts), member, "P", i)


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    braid_ok: bool
    commute_ok: bool
    order: int
    coset_maps: int
    failures: tuple = ()


def verify_group_relations(N: int, points: Iterable[LatticePoint] | None = None) -> RelationReport:
    """Check ``(gamma_1 sigma_{1,2})^3 = id`` and ``gamma_1 sigma_{i,i+1} = sigma_{i+1,i} gamma_1``.

    The commutation family is checked for ``2 <= i <= N-1``; for ``i = 1``
    the two sides differ (``gamma_1`` moves coordinate 1).  Also counts the
    distinct maps in ``S_N u gamma_1 S_N u ... u gamma_N S_N`` on a generic point.
    """
    if points is None:
        radius = 3 if N <= 3 else 1
        points = list(product(range(-radius, radius + 1), repeat=N))
    points = list(points)
    failures = []
    g = GroupElement((GAMMA,))
    braid_ok = True
    if N >= 2:
        w = (g * GroupElement((sigma(1, 2),))) ** 3
        for z in points:
            if apply(w, z) != tuple(z):
                braid_ok = False
                failures.append(("braid", z))
                break
    commute_ok = True
    for i in range(2, N):
        s = GroupElement((sigma(i, i + 1),))
        t = GroupElement((sigma(i + 1, i),))
        for z in points:
            if apply(g * s, z) != apply(t * g, z):
                commute_ok = False
                failures.append((f"commute i={i}", z))
                break
    probe = _generic_point(N)
    perms = group_elements(N, tilde=False)
    cosets = [IDENTITY] + [gamma_i(k) for k in range(1, N + 1)]
    coset_maps = len({apply(c * p, probe) for c in cosets for p in perms})
    order = len(group_elements(N))
    expected = math.factorial(N + 1)
    ok = braid_ok and commute_ok and coset_maps == expected and order == expected
    return RelationReport(ok, braid_ok, commute_ok, order, coset_maps, tuple(failures))


# -- frequency side -------------------------------------------------------

def mod2pi(t):
    """Remainder of ``t`` in ``[-pi, pi)``."""
    return (np.asarray(t) + np.pi) % (2 * np.pi) - np.pi


def circular_distance(a, b):
    return np.abs(mod2pi(np.asarray(a) - np.asarray(b)))


def g_map(alpha: Sequence[float]) -> tuple[float, ...]:
    a = tuple(float(v) for v in alpha)
    return (float(mod2pi(-sum(a))),) + a[1:]


def s_map(i: int, alpha: Sequence[float]) -> tuple[float, ...]:
    a = list(alpha)
    a[i - 1], a[i] = a[i], a[i - 1]
    return tuple(a)


def freq_orbit(alpha: Sequence[float], tol: float = 1e-12) -> list[tuple[float, ...]]:
    """Orbit of ``alpha`` under the swaps ``s_{i,i+1}`` and ``g``, by generator closure."""
    start = tuple(float(mod2pi(v)) for v in alpha)
    N = len(start)
    found = [start]
    frontier = [start]

    def known(b):
        return any(np.all(circular_distance(b, f) <= tol) for f in found)

    while frontier:
        nxt = []
        for a in frontier:
            images = [g_map(a)] + [s_map(i, a) for i in range(1, N)]
            for b in images:
                if not known(b):
                    found.append(b)
                    nxt.append(b)
        frontier = nxt
    return found
