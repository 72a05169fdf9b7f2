"""Exact functions generated by finitely supported functions on the orbit space.

Two independent routes produce the same coefficients:

* symbolically, ``sum_o c(o) D_0[sum_n tau^n H_{R(o) + delta_0}]``, each term
  being an exact function built from the local function ``H_{R(o)+delta_0}``;
* on the lattice, ``xi(z_I) = (T c~)(z_I)`` where ``c~ = c o canonicalize`` is
  the S~_N-invariant lift of ``c``.

On the lattice side ``c~(z_I - k e) = c(o(tau^k I))``, i.e. the orbit of the
index shifted by ``+k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .field import CoefficientField, VectorField, coefficient_sum, exact_from_local
from .hermite import HermiteExpansion, _parse_number
from .multiindex import LatticePoint, MultiIndex, decode, format_point, is_cone_point
from .symmetry import canonicalize, orbit_points
from .transport import LatticeFunction, apply_T


@dataclass(frozen=True)
class OrbitFunction:
    """A finitely supported ``c`` on the degree-``N`` orbits, keyed by cone points."""

    degree: int
    values: Mapping[LatticePoint, object]

    def __post_init__(self):
        clean = {}
        for z, v in self.values.items():
            z = tuple(int(t) for t in z)
            if len(z) != self.degree or not is_cone_point(z):
                raise ValueError(f"{z} is not a cone point of dimension {self.degree}")
            if v != 0:
                clean[z] = v
        object.__setattr__(self, "values", dict(sorted(clean.items())))

    def __call__(self, z: Iterable[int]):
        return self.values.get(canonicalize(tuple(z)), 0)

    def dump(self) -> str:
        lines = [f"degree {self.degree}"]
        lines += [f"{format_point(z)} {v}".strip() for z, v in self.values.items()]
        return "\n".join(lines) + "\n"


def parse_orbit_function(text: str) -> OrbitFunction:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("degree"):
        raise ValueError("orbit function file must start with 'degree N'")
    N = int(lines[0].split()[1])
    values = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != N + 1:
            raise ValueError(f"expected {N} coordinates and a value: {ln!r}")
        values[tuple(int(t) for t in parts[:N])] = _parse_number(parts[-1])
    return OrbitFunction(N, values)


def lift(c: OrbitFunction, region: Iterable[LatticePoint]) -> dict[LatticePoint, object]:
    """``c~(z) = c(canonicalize(z))`` on the points of ``region`` (zeros dropped)."""
    out = {}
    for z in region:
        v = c(z)
        if v != 0:
            out[tuple(z)] = v
    return out


def lift_support(c: OrbitFunction) -> dict[LatticePoint, object]:
    """The lift on its full (finite) support: the S~_N-orbits of the cone points."""
    out = {}
    for z, v in c.values.items():
        for w in orbit_points(z):
            out[w] = v
    return out


def gen_exact(vf: VectorField, c: OrbitFunction, window: int | None = None) -> CoefficientField:
    """Coefficients ``xi(z) = sum_k a_k c~(z - k e)`` of a degree-``N`` exact function.

    ``window=None`` sizes the window to the support.  An explicit window
    smaller than the support raises ``ValueError`` instead of truncating.
    Values are computed in exact arithmetic when ``a_k`` and ``c`` are exact.
    """
    N = c.degree
    if N == 0:
        raise ValueError("degree 0 has no lattice; use gen_exact_degree0")
    lifted = lift_support(c)
    values: dict[LatticePoint, object] = {}
    for z, v in lifted.items():
        for k, a in vf.coeffs:
            w = tuple(t + k for t in z)
            if list(w) == sorted(w):
                values[w] = values.get(w, 0) + a * v
    values = {z: v for z, v in values.items() if v != 0}
    needed = max((abs(t) for z in values for t in z), default=0)
    if window is None:
        window = needed
    elif needed > window:
        raise ValueError(f"generated support reaches {needed}, beyond window {window}")
    return CoefficientField(N, window, values)


def gen_exact_lattice(vf: VectorField, c: OrbitFunction) -> LatticeFunction:
    """``T c~`` as a float lattice function (all of ``Z^N``, not just sorted points)."""
    lifted = lift_support(c)
    if not lifted:
        return LatticeFunction.zeros(c.degree)
    return apply_T(vf, LatticeFunction.from_dict({z: float(v) for z, v in lifted.items()}))


def gen_exact_symbolic(vf: VectorField, c: OrbitFunction) -> HermiteExpansion:
    """``sum_o c(o) D_0[sum_n tau^n H_{R(o) + delta_0}]`` as an exact expansion."""
    total = HermiteExpansion()
    for z, v in c.values.items():
        local = HermiteExpansion.basis(decode(z) + MultiIndex.delta(0))
        total = total + exact_from_local(vf, local) * v
    return total


def gen_exact_degree0(vf: VectorField):
    """The constant produced from the local function ``x_0``: ``sum_k a_k``."""
    return coefficient_sum(vf)
