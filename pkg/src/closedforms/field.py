"""Constant-coefficient vector fields, exact functions from local functions, closedness.

A vector field ``D_0 = sum_k a_k d_k`` is stored through its finitely many
nonzero ``a_k``; ``D_n = sum_k a_k d_{k+n}`` is its translate.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping

from .hermite import HermiteExpansion, _parse_number
from .multiindex import LatticePoint, MultiIndex, decode, encode, format_point, shift


@dataclass(frozen=True)
class VectorField:
    coeffs: tuple[tuple[int, object], ...]
    name: str = dc_field(default="", compare=False)

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("vector field needs at least one nonzero coefficient")
        if any(a == 0 for _, a in self.coeffs):
            raise ValueError("zero coefficients must be omitted")

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], name: str = "") -> "VectorField":
        return cls(tuple(sorted((int(k), a) for k, a in coeffs.items() if a != 0)), name)

    def as_dict(self) -> dict[int, object]:
        return dict(self.coeffs)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.coeffs)

    @property
    def reach(self) -> int:
        return max(abs(k) for k in self.support)

    @property
    def coefficient_sum(self):
        return sum(a for _, a in self.coeffs)

    def __str__(self) -> str:
        return self.name or " + ".join(f"{a}*d_{k}" for k, a in self.coeffs)


BUILTIN_FIELDS = {
    "d0": VectorField.from_dict({0: 1}, "d0"),
    "Y0": VectorField.from_dict({1: 1, 0: -1}, "Y0"),
    "X0": VectorField.from_dict({1: 1, 0: -2, -1: 1}, "X0"),
    "d3-d0": VectorField.from_dict({3: 1, 0: -1}, "d3-d0"),
}


def coefficient_sum(vf: VectorField):
    return vf.coefficient_sum


def parse_vector_field(text: str, name: str = "") -> VectorField:
    """Lines ``k a_k``; ``#`` starts a comment."""
    coeffs: dict[int, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'k a_k'")
        k = int(parts[0])
        coeffs[k] = coeffs.get(k, 0) + _parse_number(parts[1])
    return VectorField.from_dict(coeffs, name)


def format_vector_field(vf: VectorField) -> str:
    return "".join(f"{k} {a}\n" for k, a in vf.coeffs)


def apply_D(vf: VectorField, n: int, exp: HermiteExpansion) -> HermiteExpansion:
    """``D_n exp = sum_I coeff_I sum_k a_k H_{I - delta_{k+n}}``."""
    terms = []
    for index, coeff in exp.items():
        for k, a in vf.coeffs:
            lowered = index.remove(k + n)
            if lowered is not None:
                terms.append((lowered, coeff * a))
    return HermiteExpansion(terms)


def exact_from_local(vf: VectorField, g: HermiteExpansion) -> HermiteExpansion:
    """``sum_k D_0(tau^k g)``, summed over the finitely many ``k`` that survive."""
    # tau^k moves site s to s + k; D_0 only sees sites in the field's support
    shifts = sorted({a_site - s for s in g.sites for a_site in vf.support})
    total = HermiteExpansion()
    for k in shifts:
        total = total + apply_D(vf, 0, g.translate(k))
    return total


@dataclass
class ClosednessReport:
    ok: bool
    violations: list
    checked: int
    verified_window: int | None = None
    n_range: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_closed_symbolic(vf: VectorField, exp: HermiteExpansion, range_: int | None = None) -> ClosednessReport:
    """Check ``D_n(tau^m exp) == D_m(tau^n exp)`` for all ``|m|, |n| <= range_``.

    Equality is exact expansion equality, so exact coefficients give an exact
    verdict.  The relation is symmetric in ``(n, m)``, so only ``n < m`` is
    scanned; violations are reported as ``(n, m, difference)``.  With
    ``range_=None`` the range is chosen so that all pairs outside it vanish
    identically.
    """
    if range_ is None:
        sites = exp.sites or (0,)
        range_ = max(abs(s) for s in sites) * 2 + vf.reach * 2 + 1
    violations = []
    checked = 0
    shifted = {m: exp.translate(m) for m in range(-range_, range_ + 1)}
    for n in range(-range_, range_ + 1):
        for m in range(n + 1, range_ + 1):
            checked += 1
            diff = apply_D(vf, n, shifted[m]) - apply_D(vf, m, shifted[n])
            if len(diff):
                violations.append((n, m, diff))
    return ClosednessReport(not violations, violations, checked, range_)


@dataclass(frozen=True)
class CoefficientField:
    """Degree-``N`` Fourier coefficients ``xi(z)`` keyed by sorted lattice points in ``[-W, W]``."""

    degree: int
    window: int
    values: Mapping[LatticePoint, object]

    def __post_init__(self):
        clean = {}
        for z, v in self.values.items():
            z = tuple(sorted(int(t) for t in z))
            if len(z) != self.degree:
                raise ValueError(f"point {z} does not have length {self.degree}")
            if any(abs(t) > self.window for t in z):
                raise ValueError(f"point {z} escapes window {self.window}")
            if v != 0:
                clean[z] = clean.get(z, 0) + v
        object.__setattr__(self, "values", dict(sorted(clean.items())))

    def __getitem__(self, z) -> object:
        return self.values.get(tuple(sorted(z)), 0)

    def at(self, index: MultiIndex):
        return self.values.get(encode(index), 0)

    def in_window(self, index: MultiIndex) -> bool:
        return all(abs(s) <= self.window for s in index.support)

    def __len__(self) -> int:
        return len(self.values)

    def padded(self, window: int) -> "CoefficientField":
        return CoefficientField(self.degree, max(window, self.window), self.values)

    def dump(self) -> str:
        lines = [f"degree {self.degree} window {self.window}"]
        lines += [f"{format_point(z)} {v}".strip() for z, v in self.values.items()]
        return "\n".join(lines) + "\n"


def parse_coefficient_field(text: str) -> CoefficientField:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty coefficient file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "degree" or head[2] != "window":
        raise ValueError("header must read 'degree N window W'")
    N, W = int(head[1]), int(head[3])
    values = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != N + 1:
            raise ValueError(f"expected {N} coordinates and a value: {ln!r}")
        values[tuple(int(t) for t in parts[:N])] = _parse_number(parts[-1])
    return CoefficientField(N, W, values)


def expansion_to_coeffs(exp: HermiteExpansion, N: int, window: int) -> CoefficientField:
    """Degree-``N`` coefficients of ``exp`` as a lattice field on ``[-window, window]``."""
    values = {}
    for index, v in exp.items():
        if index.degree != N:
            continue
        if any(abs(s) > window for s in index.support):
            raise ValueError(f"{index} escapes window {window}")
        values[encode(index)] = v
    return CoefficientField(N, window, values)


def coeffs_to_expansion(cf: CoefficientField) -> HermiteExpansion:
    return HermiteExpansion({decode(z): v for z, v in cf.values.items()})


def is_closed_coeffs(vf: VectorField, cf: CoefficientField, tol: float = 1e-9,
                     assume_zero_outside: bool = False) -> ClosednessReport:
    """Check ``sum_k a_k xi(I + delta_{n+k}) == sum_k a_k xi(tau^n(I + delta_k))``.

    ``I`` runs over degree ``N-1`` multi-indices.  Only relations whose every
    referenced multi-index lies in the window are checked, since values outside
    are unknown.  With ``assume_zero_outside`` the field is first padded so
    that every relation touching its support is checked in full.

    Violations are ``(n, I, lhs - rhs)``.
    """
    if assume_zero_outside:
        W0 = cf.window
        cf = cf.padded(3 * W0 + 3 * vf.reach)
    W = cf.window
    N = cf.degree
    if N < 1:
        return ClosednessReport(True, [], 0, W, None)
    span = 2 * W + vf.reach
    violations = []
    checked = 0
    n_lo, n_hi = None, None
    exact = all(isinstance(v, (int, Fraction)) for v in cf.values.values()) and \
        all(isinstance(a, (int, Fraction)) for _, a in vf.coeffs)
    for base in combinations_with_replacement(range(-W, W + 1), N - 1):
        I = decode(base)
        for n in range(-span, span + 1):
            refs_l = [(a, I + MultiIndex.delta(n + k)) for k, a in vf.coeffs]
            refs_r = [(a, shift(I + MultiIndex.delta(k), n)) for k, a in vf.coeffs]
            if not all(cf.in_window(J) for _, J in refs_l + refs_r):
                continue
            checked += 1
            n_lo = n if n_lo is None else min(n_lo, n)
            n_hi = n if n_hi is None else max(n_hi, n)
            diff = sum(a * cf.at(J) for a, J in refs_l) - sum(a * cf.at(J) for a, J in refs_r)
            if (diff != 0) if exact else (abs(diff) > tol):
                violations.append((n, I, diff))
    rng = None if n_lo is None else (n_lo, n_hi)
    return ClosednessReport(not violations, violations, checked, W, rng)
