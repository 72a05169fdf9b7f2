"""The diagonal convolution ``(T c)(z) = sum_k a_k c(z - k e)`` and its spectral inversion.

Lattice functions are dense boxes (lower corner + ndarray).  The Fourier
convention is ``F c(alpha) = sum_z c(z) exp(i z . alpha)``, under which
``F(T c)(alpha) = p(exp(i (alpha_1 + ... + alpha_N))) F c(alpha)`` with
``p(x) = sum_k a_k x^k``.  ``numpy.fft.fftn`` evaluates ``F`` at
``alpha = -theta_j`` where ``theta_j = 2 pi j / M``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import CoefficientField, VectorField
from .multiindex import LatticePoint, format_point
from .symmetry import canonical_max, circular_distance, freq_orbit, g_map, mod2pi

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """An input violates an operation's precondition."""


@dataclass(frozen=True)
class LatticeFunction:
    """Finitely supported ``c: Z^N -> R`` stored on the box ``offset + [0, shape)``."""

    offset: tuple[int, ...]
    array: np.ndarray = dc_field(compare=False)

    @property
    def N(self) -> int:
        return len(self.offset)

    @classmethod
    def zeros(cls, N: int) -> "LatticeFunction":
        return cls((0,) * N, np.zeros((1,) * N))

    @classmethod
    def from_dict(cls, values: Mapping[LatticePoint, float], N: int | None = None) -> "LatticeFunction":
        pts = [tuple(z) for z in values]
        if not pts:
            if N is None:
                raise ValueError("dimension needed for an empty lattice function")
            return cls.zeros(N)
        N = len(pts[0])
        lo = np.min(pts, axis=0)
        hi = np.max(pts, axis=0)
        arr = np.zeros(tuple(hi - lo + 1))
        for z, v in values.items():
            arr[tuple(np.subtract(z, lo))] = v
        return cls(tuple(int(t) for t in lo), arr)

    @classmethod
    def delta(cls, z: Sequence[int]) -> "LatticeFunction":
        return cls.from_dict({tuple(z): 1.0})

    def to_dict(self, tol: float = 0.0) -> dict[LatticePoint, float]:
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.array) > tol)):
            out[tuple(int(i + o) for i, o in zip(idx, self.offset))] = float(self.array[idx])
        return out

    def __getitem__(self, z: Sequence[int]) -> float:
        idx = tuple(int(a - o) for a, o in zip(z, self.offset))
        if all(0 <= i < s for i, s in zip(idx, self.array.shape)):
            return float(self.array[idx])
        return 0.0

    def upper(self) -> tuple[int, ...]:
        return tuple(o + s - 1 for o, s in zip(self.offset, self.array.shape))

    def embed(self, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
        """Values on the box ``[lo, hi]`` (inclusive); zero where undefined."""
        out = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)))
        src, dst = [], []
        for o, s, l, h in zip(self.offset, self.array.shape, lo, hi):
            a, b = max(o, l), min(o + s - 1, h)
            if a > b:
                return out
            src.append(slice(a - o, b - o + 1))
            dst.append(slice(a - l, b - l + 1))
        out[tuple(dst)] = self.array[tuple(src)]
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.array ** 2)))

    def __sub__(self, other: "LatticeFunction") -> "LatticeFunction":
        lo, hi = _hull(self, other)
        return LatticeFunction(lo, self.embed(lo, hi) - other.embed(lo, hi))

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        lo, hi = _hull(self, other)
        return LatticeFunction(lo, self.embed(lo, hi) + other.embed(lo, hi))

    def mask(self, keep: np.ndarray) -> "LatticeFunction":
        return LatticeFunction(self.offset, np.where(keep, self.array, 0.0))

    def coordinates(self) -> np.ndarray:
        """Array of shape ``array.shape + (N,)`` holding each cell's lattice point."""
        axes = [np.arange(s) + o for o, s in zip(self.offset, self.array.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def dump(self, tol: float = 0.0) -> str:
        lines = [f"N={self.N}"]
        lines += [f"{format_point(z)} {v!r}" for z, v in sorted(self.to_dict(tol).items())]
        return "\n".join(lines) + "\n"


def _hull(*fs: LatticeFunction) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lo = tuple(min(t) for t in zip(*(f.offset for f in fs)))
    hi = tuple(max(t) for t in zip(*(f.upper() for f in fs)))
    return lo, hi


def parse_lattice_function(text: str) -> LatticeFunction:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("N="):
        raise ValueError("lattice function file must start with 'N=<dim>'")
    N = int(lines[0][2:])
    values = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != N + 1:
            raise ValueError(f"expected {N} coordinates and a value: {ln!r}")
        values[tuple(int(t) for t in parts[:N])] = float(parts[-1])
    return LatticeFunction.from_dict(values, N)


def inner(c: LatticeFunction, d: LatticeFunction) -> float:
    lo, hi = _hull(c, d)
    return float(np.sum(c.embed(lo, hi) * d.embed(lo, hi)))


def symmetrize(cf: CoefficientField) -> LatticeFunction:
    """The S_N-invariant lattice function ``z -> xi(sorted z)``."""
    values = {}
    for z, v in cf.values.items():
        for w in set(permutations(z)):
            values[w] = float(v)
    return LatticeFunction.from_dict(values, cf.degree)


def _diagonal_shift(c: LatticeFunction, vf: VectorField, sign: int) -> LatticeFunction:
    ks = [sign * k for k in vf.support]
    lo = tuple(o + min(ks) for o in c.offset)
    hi = tuple(u + max(ks) for u in c.upper())
    out = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)))
    for (k, a), sk in zip(vf.coeffs, ks):
        # value c(z) lands on z + sk*e
        sl = tuple(slice(o + sk - l, o + sk - l + s) for o, s, l in zip(c.offset, c.array.shape, lo))
        out[sl] += float(a) * c.array
    return LatticeFunction(lo, out)


def apply_T(vf: VectorField, c: LatticeFunction) -> LatticeFunction:
    """``(T c)(z) = sum_k a_k c(z - k e)``, exactly, on the grown box."""
    return _diagonal_shift(c, vf, +1)


def adjoint_T(vf: VectorField, c: LatticeFunction) -> LatticeFunction:
    """``(T* c)(z) = sum_k a_k c(z + k e)``."""
    return _diagonal_shift(c, vf, -1)


def apply_T_circular(vf: VectorField, arr: np.ndarray) -> np.ndarray:
    """``T`` on the periodic ``M^N`` torus (array index = lattice point mod M)."""
    out = np.zeros_like(arr)
    axes = tuple(range(arr.ndim))
    for k, a in vf.coeffs:
        out = out + float(a) * np.roll(arr, (k,) * arr.ndim, axis=axes)
    return out


# -- symbol ---------------------------------------------------------------

def symbol_values(vf: VectorField, phase) -> np.ndarray:
    """``p(exp(i phase))`` for an array of phases."""
    phase = np.asarray(phase, dtype=float)
    out = np.zeros(phase.shape, dtype=complex)
    for k, a in vf.coeffs:
        out += float(a) * np.exp(1j * k * phase)
    return out


def _polish(coeffs: np.ndarray, z0: complex, order: int, iters: int = 50) -> complex:
    """Newton on the ``order``-th derivative, where an ``order+1``-fold root is simple."""
    q = np.poly1d(coeffs)
    for _ in range(order):
        q = q.deriv()
    dq = q.deriv()
    z = complex(z0)
    for _ in range(iters):
        d = dq(z)
        if d == 0:
            break
        step = q(z) / d
        z -= step
        if abs(step) < 1e-16 * max(1.0, abs(z)):
            break
    return z


@dataclass(frozen=True)
class Symbol:
    """``p(x) = sum_k a_k x^k`` with its unit-circle root phases (sorted, in ``[-pi, pi)``)."""

    field: VectorField
    roots: tuple[tuple[float, int], ...]

    @property
    def phases(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.roots)

    def __call__(self, phase):
        return symbol_values(self.field, phase)


def _is_multiple_root(coeffs: np.ndarray, root: complex, m: int, rtol: float) -> bool:
    """Whether ``p, p', ..., p^(m-1)`` all vanish at ``root`` relative to the coefficient scale."""
    q = np.poly1d(coeffs)
    scale = np.sum(np.abs(coeffs)) * max(1.0, abs(root)) ** len(coeffs)
    for j in range(m):
        if abs(q(root)) > rtol * scale * math.factorial(len(coeffs)) / math.factorial(max(len(coeffs) - j, 1)):
            return False
        q = q.deriv()
    return True


def unit_circle_roots(vf: VectorField, tol: float = 1e-9, cluster_tol: float = 1e-2) -> list[tuple[float, int]]:
    """Unit-circle roots of ``p`` as ``(phase, multiplicity)`` sorted by phase.

    ``x^{-min k} p(x)`` is a polynomial whose roots come from the companion
    matrix.  Eigenvalue solvers split an ``m``-fold root into a cluster of
    radius ``~eps^{1/m}``, so nearby eigenvalues are grouped (within
    ``cluster_tol``), each cluster centre is polished by Newton iteration on
    the ``(m-1)``-th derivative, and the merge is kept only if the first
    ``m-1`` derivatives vanish there; otherwise the cluster is treated as
    simple roots.  Finally ``||x| - 1| <= tol`` selects the unit-circle roots.
    """
    if all(float(a) == 0 for _, a in vf.coeffs):
        raise PreconditionError("all-zero vector field has no symbol")
    lo, hi = min(vf.support), max(vf.support)
    coeffs = np.zeros(hi - lo + 1)
    for k, a in vf.coeffs:
        coeffs[hi - k] = float(a)  # descending powers of x^(k - lo)
    if len(coeffs) == 1:
        return []
    eig = np.roots(coeffs)
    clusters: list[list[complex]] = []
    for z in sorted(eig, key=lambda w: (np.angle(w), abs(w))):
        for cl in clusters:
            if abs(z - np.mean(cl)) <= cluster_tol:
                cl.append(z)
                break
        else:
            clusters.append([z])
    candidates = []
    for cl in clusters:
        m = len(cl)
        root = _polish(coeffs, complex(np.mean(cl)), m - 1)
        if m == 1 or _is_multiple_root(coeffs, root, m, 1e-10):
            candidates.append((root, m))
        else:
            candidates += [(_polish(coeffs, z, 0), 1) for z in cl]
    found = [(float(mod2pi(np.angle(r))), m) for r, m in candidates if abs(abs(r) - 1.0) <= tol]
    return sorted(found)


def symbol(vf: VectorField, tol: float = 1e-9) -> Symbol:
    return Symbol(vf, tuple(unit_circle_roots(vf, tol)))


# -- masks ----------------------------------------------------------------

def mask_membership(alpha: Sequence[float], roots: Iterable[float], n: int) -> bool:
    """Whether ``alpha`` lies in ``A_n``: every image under the frequency group
    keeps ``mod2pi(sum)`` more than ``1/n`` (on the circle) from every root phase."""
    roots = list(roots)
    if not roots:
        return True
    for beta in freq_orbit(alpha):
        s = float(mod2pi(sum(beta)))
        if any(circular_distance(s, r) <= 1.0 / n for r in roots):
            return False
    return True


def mask_grid(alpha_axes: Sequence[np.ndarray], roots: Iterable[float], n: int) -> np.ndarray:
    """Vectorized ``A_n`` on a product grid.

    Over the frequency group, ``mod2pi(sum of gamma(alpha))`` takes exactly the
    values ``{sum(alpha), -alpha_1, ..., -alpha_N}``.
    """
    grids = np.meshgrid(*alpha_axes, indexing="ij")
    keep = np.ones(grids[0].shape, dtype=bool)
    candidates = [sum(grids)] + [-g for g in grids]
    for r in roots:
        for s in candidates:
            keep &= circular_distance(s, r) > 1.0 / n
    return keep


def grid_frequencies(M: int) -> np.ndarray:
    """Frequencies ``alpha = mod2pi(-2 pi j / M)`` matching ``fftn`` output order."""
    return mod2pi(-2 * np.pi * np.arange(M) / M)


# -- solves ---------------------------------------------------------------

@dataclass
class SolveResult:
    c: LatticeFunction
    diagnostics: dict
    torus: np.ndarray = dc_field(repr=False)


def _to_torus(c: LatticeFunction, M: int) -> np.ndarray:
    arr = np.zeros((M,) * c.N)
    coords = c.coordinates().reshape(-1, c.N) % M
    np.add.at(arr, tuple(coords.T), c.array.reshape(-1))
    return arr


def _from_torus(arr: np.ndarray) -> LatticeFunction:
    M = arr.shape[0]
    return LatticeFunction((-(M // 2),) * arr.ndim, np.fft.fftshift(arr))


def _gamma_torus(arr: np.ndarray) -> np.ndarray:
    """``c o gamma_1`` on the torus."""
    M = arr.shape[0]
    idx = np.indices(arr.shape)
    z1 = idx[0]
    img = [(-z1) % M] + [(idx[j] - z1) % M for j in range(1, arr.ndim)]
    return arr[tuple(img)]


def invariance_defect(arr: np.ndarray) -> float:
    """Max of ``|c o g - c|`` over the generators of S~_N, on the torus."""
    worst = float(np.max(np.abs(_gamma_torus(arr) - arr)))
    for i in range(arr.ndim - 1):
        worst = max(worst, float(np.max(np.abs(np.swapaxes(arr, i, i + 1) - arr))))
    return worst


def _as_lattice(xi) -> LatticeFunction:
    return symmetrize(xi) if isinstance(xi, CoefficientField) else xi


def solve_masked(vf: VectorField, xi, n_mask: int, M: int, roots: Sequence[float] | None = None,
                 division_guard: float = 1e-12) -> SolveResult:
    """Solve ``F(T c) = 1_{A_n} F xi`` on the ``M^N`` torus.

    ``xi`` is a CoefficientField (expanded S_N-invariantly) or a LatticeFunction.
    Diagnostics: ``mask_fraction`` (share of nodes removed), ``spectral_residual``
    (removed energy ``sum |F xi|^2 / M^N``), ``invariance_defect`` of ``c``,
    ``residual_l2`` (``||T c - xi||`` by spatial circular convolution on the
    torus) and ``lattice_residual_l2`` (the same with ``c`` unwrapped to
    ``[-M/2, M/2)^N`` and ``T`` applied on ``Z^N``).
    """
    if M < 8:
        raise PreconditionError("grid size M must be at least 8")
    xl = _as_lattice(xi)
    N = xl.N
    support = xl.to_dict()
    if support:
        pts = np.array(list(support))
        diam = int(np.max(np.abs(pts))) * 2 + 1
        if diam > M // 4:
            raise PreconditionError(f"xi support diameter {diam} exceeds M/4 = {M // 4}; increase --grid")
    if roots is None:
        roots = [r for r, _ in unit_circle_roots(vf)]
    x_torus = _to_torus(xl, M)
    X = np.fft.fftn(x_torus)
    alpha = grid_frequencies(M)
    keep = mask_grid([alpha] * N, roots, n_mask)
    total = sum(np.meshgrid(*([alpha] * N), indexing="ij"))
    P = symbol_values(vf, total)
    bad = keep & (np.abs(P) < division_guard)
    if np.any(bad):
        raise PreconditionError(
            f"symbol vanishes at {int(bad.sum())} unmasked nodes; increase --mask or change --grid")
    C = np.zeros_like(X)
    C[keep] = X[keep] / P[keep]
    c_complex = np.fft.ifftn(C)
    real_norm = float(np.linalg.norm(c_complex.real))
    imag_norm = float(np.linalg.norm(c_complex.imag))
    if imag_norm > 1e-8 * real_norm + 1e-14:
        raise PreconditionError(
            f"inverse transform not real (|imag|={imag_norm:.3e}); xi is not conjugate-symmetric")
    c_torus = c_complex.real
    c = _from_torus(c_torus)
    torus_res = apply_T_circular(vf, c_torus) - x_torus
    lattice_res = apply_T(vf, c) - xl
    diagnostics = {
        "mask_fraction": float(1.0 - keep.mean()),
        "spectral_residual": float(np.sum(np.abs(X[~keep]) ** 2) / M ** N),
        "invariance_defect": invariance_defect(c_torus),
        "residual_l2": float(np.linalg.norm(torus_res)),
        "lattice_residual_l2": lattice_res.norm(),
    }
    log.debug("solve_masked n=%d M=%d %s", n_mask, M, diagnostics)
    return SolveResult(c, diagnostics, c_torus)


def truncate_to_P(c: LatticeFunction, i: int) -> LatticeFunction:
    """``c * 1_{P_i}``, clipped to the bounding box of ``P_i``."""
    box_lo, box_hi = (-(i - 1),) * c.N, (i - 1,) * c.N
    arr = c.embed(box_lo, box_hi)
    trimmed = LatticeFunction(box_lo, arr)
    return trimmed.mask(canonical_max(trimmed.coordinates()) <= i - 1)


@dataclass
class Stage:
    n_mask: int
    M: int
    i_trunc: int
    c: LatticeFunction
    residual: float
    diagnostics: dict


def approximate_exact_sequence(vf: VectorField, xi, schedule: Sequence[tuple[int, int, int]]) -> list[Stage]:
    """For each ``(n_mask, M, i)``: masked solve, truncate to ``P_i``, and measure
    ``||T c_i - xi||`` by exact convolution on ``Z^N``."""
    if not schedule:
        raise PreconditionError("schedule must be nonempty")
    xl = _as_lattice(xi)
    stages = []
    for n_mask, M, i in schedule:
        if i > M // 2:
            raise PreconditionError(f"truncation index {i} does not fit in grid {M}")
        res = solve_masked(vf, xl, n_mask, M)
        ci = truncate_to_P(res.c, i)
        residual = (apply_T(vf, ci) - xl).norm()
        stages.append(Stage(n_mask, M, i, ci, residual, res.diagnostics))
    return stages


def dft_diagonalization_check(vf: VectorField, c: LatticeFunction | np.ndarray, M: int) -> float:
    """``max |F(T_circ c) - p(exp(i sum alpha)) F c|`` over the ``M^N`` grid."""
    arr = c if isinstance(c, np.ndarray) else _to_torus(c, M)
    N = arr.ndim
    alpha = grid_frequencies(M)
    P = symbol_values(vf, sum(np.meshgrid(*([alpha] * N), indexing="ij")))
    lhs = np.fft.fftn(apply_T_circular(vf, arr))
    return float(np.max(np.abs(lhs - P * np.fft.fftn(arr))))


# -- closedness in lattice and Fourier form --------------------------------

def lattice_closedness_defect(vf: VectorField, xi: CoefficientField, z: Sequence[int],
                              printed_sign: bool = False) -> float:
    """``sum_k a_k xi(z + k e_1) - sum_k a_k xi(z - z_1 e + (k - z_1) e_1)``.

    This is the coefficient relation rewritten on ``Z^N`` with ``z = (n, z_I)``.
    ``printed_sign=True`` uses first coordinate ``-(z_1 + k)`` in place of
    ``k - z_1``; the two agree when ``a_k = a_{-k}``.
    """
    z = tuple(z)
    z1 = z[0]
    lhs = sum(a * xi[(z1 + k,) + z[1:]] for k, a in vf.coeffs)
    rhs = 0
    for k, a in vf.coeffs:
        first = -(z1 + k) if printed_sign else k - z1
        rhs += a * xi[(first,) + tuple(t - z1 for t in z[1:])]
    return lhs - rhs


def fourier_transform_at(c: LatticeFunction, alpha: Sequence[float]) -> complex:
    """Direct sum ``sum_z c(z) exp(i z . alpha)``."""
    coords = c.coordinates()
    phase = np.tensordot(coords, np.asarray(alpha, dtype=float), axes=([-1], [0]))
    return complex(np.sum(c.array * np.exp(1j * phase)))


def fourier_closedness_defect(vf: VectorField, xi: CoefficientField, alpha: Sequence[float]) -> float:
    """``|p(e^{-i alpha_1}) F xi(alpha) - p(e^{i sum alpha}) F xi(g alpha)|``."""
    xl = symmetrize(xi)
    lhs = symbol_values(vf, -alpha[0]) * fourier_transform_at(xl, alpha)
    rhs = symbol_values(vf, sum(alpha)) * fourier_transform_at(xl, g_map(alpha))
    return float(abs(lhs - rhs))
