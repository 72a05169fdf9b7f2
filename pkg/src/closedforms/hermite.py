"""Hermite polynomials normalized by ``1/i!`` and finite multidimensional expansions.

``H_i = He_i / i!`` where ``He_i`` are the probabilists' Hermite polynomials,
so ``H_i' = H_{i-1}``, ``(x - d/dx) H_i = (i+1) H_{i+1}`` and
``E[H_i^2] = 1/i!`` under the standard Gaussian.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np
from numpy.polynomial import hermite_e

from .multiindex import MultiIndex, ZERO, shift


def hermite_eval(i: int, x):
    """``H_i(x)`` by the recurrence ``H_{i+1} = (x H_i - H_{i-1}) / (i+1)``."""
    if i < 0:
        raise ValueError("Hermite index must be nonnegative")
    prev = np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    if i == 0:
        return prev
    cur = x
    for k in range(1, i):
        prev, cur = cur, (x * cur - prev) / (k + 1)
    return cur


@lru_cache(maxsize=None)
def hermite_coeffs(i: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of ``H_i``, lowest degree first."""
    if i == 0:
        return (Fraction(1),)
    prev: list[Fraction] = [Fraction(1)]
    cur: list[Fraction] = [Fraction(0), Fraction(1)]
    for k in range(1, i):
        nxt = [Fraction(0)] + cur  # x * H_k
        for j, c in enumerate(prev):
            nxt[j] -= c
        prev, cur = cur, [c / (k + 1) for c in nxt]
    return tuple(cur)


class HermiteExpansion(Mapping):
    """Finite linear combination ``sum_I coeff_I H_I`` with no stored zeros.

    Coefficients may be floats or exact ``Fraction``/``int`` values; arithmetic
    preserves whichever kind is used.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[MultiIndex, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, object] = {}
        for index, coeff in items:
            acc[index] = acc.get(index, 0) + coeff
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}

    @classmethod
    def basis(cls, index: MultiIndex | str, coeff=1) -> "HermiteExpansion":
        if isinstance(index, str):
            index = MultiIndex.parse(index)
        return cls({index: coeff})

    @classmethod
    def constant(cls, value=1) -> "HermiteExpansion":
        return cls({ZERO: value})

    @classmethod
    def linear(cls, coeffs: Mapping[int, object]) -> "HermiteExpansion":
        """``sum_n b_n x_n`` (note ``x_n = H_{delta_n}``)."""
        return cls({MultiIndex.delta(n): b for n, b in coeffs.items()})

    def __getitem__(self, index: MultiIndex):
        return self._terms.get(index, 0)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, HermiteExpansion):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "HermiteExpansion(0)"
        body = " + ".join(f"{v}*H[{k}]" for k, v in self._terms.items())
        return f"HermiteExpansion({body})"

    def __add__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        return HermiteExpansion(list(self.items()) + list(other.items()))

    def __neg__(self) -> "HermiteExpansion":
        return HermiteExpansion({k: -v for k, v in self.items()})

    def __sub__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        return self + (-other)

    def __mul__(self, scalar) -> "HermiteExpansion":
        return HermiteExpansion({k: v * scalar for k, v in self.items()})

    __rmul__ = __mul__

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(sorted({s for index in self for s in index.support}))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({index.degree for index in self}))

    def translate(self, m: int) -> "HermiteExpansion":
        """Function-level ``tau^m``: ``H_I -> H_{tau^{-m} I}``, i.e. ``x_k -> x_{k+m}``."""
        return HermiteExpansion({shift(k, -m): v for k, v in self.items()})

    def partial(self, site: int) -> "HermiteExpansion":
        """``d/dx_site``, using ``d_n H_I = H_{I - delta_n}``."""
        out = {}
        for index, v in self.items():
            lowered = index.remove(site)
            if lowered is not None:
                out[lowered] = out.get(lowered, 0) + v
        return HermiteExpansion(out)


def evaluate(exp: HermiteExpansion, x: Mapping[int, float] | Callable[[int], float]) -> float:
    """``sum_I coeff_I prod_n H_{i_n}(x_n)``; ``x`` must cover every occupied site."""
    value_at = x if callable(x) else x.__getitem__
    total = 0.0
    for index, coeff in exp.items():
        term = float(coeff)
        for site, count in index.items:
            try:
                xs = value_at(site)
            except KeyError:
                raise KeyError(f"no value supplied for site {site}") from None
            term *= hermite_eval(count, xs)
        total += term
    return total


def norm_sq(exp: HermiteExpansion):
    """Exact squared Gaussian norm ``sum coeff_I^2 prod 1/i_n!``."""
    total = 0
    for index, coeff in exp.items():
        total += coeff * coeff * Fraction(1, math.prod(math.factorial(c) for _, c in index.items))
    return total


@lru_cache(maxsize=None)
def _gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = hermite_e.hermegauss(n)
    return nodes, weights / math.sqrt(2 * math.pi)


def inner_product(a: HermiteExpansion, b: HermiteExpansion) -> float:
    """Gaussian inner product by Gauss-Hermite quadrature, site by site.

    Sites factorize under the product measure, so each pair of terms costs one
    one-dimensional quadrature per site; the rule uses ``max degree + 2`` nodes
    and is exact for the polynomial integrands.
    """
    sites = sorted(set(a.sites) | set(b.sites))
    top = max([c for e in (a, b) for index in e for _, c in index.items] or [0])
    nodes, weights = _gauss_nodes(top + 2)
    table = {(i, j): float(np.dot(weights, hermite_eval(i, nodes) * hermite_eval(j, nodes)))
             for i, j in product(range(top + 1), repeat=2)}
    total = 0.0
    for (I, ca), (J, cb) in product(a.items(), b.items()):
        term = float(ca) * float(cb)
        for s in sites:
            term *= table[I[s], J[s]]
            if term == 0.0:
                break
        total += term
    return total


def project(exp: HermiteExpansion, N: int) -> HermiteExpansion:
    """Component in the degree-``N`` subspace."""
    return HermiteExpansion({k: v for k, v in exp.items() if k.degree == N})


def parse_expansion(text: str) -> HermiteExpansion:
    """Read ``multiindex<TAB>coefficient`` lines; ``#`` starts a comment."""
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.rsplit(None, 1)
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'multiindex<TAB>coefficient'")
        terms.append((MultiIndex.parse(parts[0]), _parse_number(parts[1])))
    return HermiteExpansion(terms)


def format_expansion(exp: HermiteExpansion) -> str:
    return "".join(f"{k}\t{v}\n" for k, v in exp.items())


def _parse_number(text: str):
    text = text.strip()
    try:
        return Fraction(text) if "/" in text or text.lstrip("-").isdigit() else float(text)
    except ValueError:
        raise ValueError(f"bad coefficient {text!r}") from None
