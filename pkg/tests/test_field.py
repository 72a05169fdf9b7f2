import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from closedforms.field import (
    BUILTIN_FIELDS, CoefficientField, VectorField, apply_D, coefficient_sum, coeffs_to_expansion, exact_from_local,
    expansion_to_coeffs, format_vector_field, is_closed_coeffs, is_closed_symbolic, parse_coefficient_field,
    parse_vector_field,
)
from closedforms.hermite import HermiteExpansion
from closedforms.multiindex import MultiIndex

from test_hermite import to_sympy, xs

D = MultiIndex.delta
Y0, X0, d0, d3 = (BUILTIN_FIELDS[k] for k in ("Y0", "X0", "d0", "d3-d0"))
lin = HermiteExpansion.linear
const = HermiteExpansion.constant


def test_coefficient_sum():
    assert coefficient_sum(Y0) == 0
    assert coefficient_sum(X0) == 0
    assert coefficient_sum(d0) == 1
    assert coefficient_sum(d3) == 0


def test_apply_D_examples():
    assert apply_D(Y0, 0, lin({1: 1})) == const(1)
    assert apply_D(X0, 0, lin({0: 1})) == const(-2)
    for vf in BUILTIN_FIELDS.values():
        assert len(apply_D(vf, 3, const(7))) == 0


def sym_D(vf, n, expr):
    return sp.expand(sum(int(a) * sp.diff(expr, xs(k + n)) for k, a in vf.coeffs))


@pytest.mark.parametrize("name", list(BUILTIN_FIELDS))
def test_apply_D_matches_sympy(name):
    vf = BUILTIN_FIELDS[name]
    e = HermiteExpansion({D(0, 2) + D(1): 1, D(-1) + D(3): -2, D(2): 3})
    for n in (-1, 0, 2):
        assert to_sympy(apply_D(vf, n, e)) == sym_D(vf, n, to_sympy(e))


def test_exact_from_local_examples():
    assert exact_from_local(Y0, HermiteExpansion.basis(D(0, 2))) == lin({1: 1, 0: -1})
    assert len(exact_from_local(Y0, HermiteExpansion.basis(D(0)))) == 0
    assert exact_from_local(d0, HermiteExpansion.basis(D(0))) == const(1)


@pytest.mark.parametrize("name", ["Y0", "X0", "d3-d0"])
def test_exact_from_local_brute_force(name):
    # oracle: sum D_0(tau^k g) over a wide k range via sympy
    vf = BUILTIN_FIELDS[name]
    g = HermiteExpansion({D(0, 2): 1, D(0) + D(2): Fraction(1, 3)})
    total = 0
    for k in range(-15, 16):
        total += sym_D(vf, 0, to_sympy(g.translate(k)))
    assert to_sympy(exact_from_local(vf, g)) == sp.expand(total)


def test_symbolic_closedness_examples():
    rep = is_closed_symbolic(Y0, lin({0: 1}), 3)
    assert not rep.ok
    assert (0, 1) in [(n, m) for n, m, _ in rep.violations]
    assert is_closed_symbolic(X0, lin({0: 1}), 3).ok
    assert is_closed_symbolic(X0, lin({2: 1, -2: 1}), 4).ok
    assert is_closed_symbolic(X0, const(1), 3).ok


def test_coeffs_closedness_examples():
    x0 = CoefficientField(1, 5, {(0,): 1})
    assert is_closed_coeffs(X0, x0).ok
    rep = is_closed_coeffs(Y0, x0)
    assert not rep.ok
    assert {n for n, _, _ in rep.violations} == {-1, 1}
    assert is_closed_coeffs(Y0, CoefficientField(1, 5, {(0,): -1, (1,): 1})).ok
    assert is_closed_coeffs(X0, CoefficientField(1, 5, {(2,): 1, (-2,): 1})).ok


def test_degree1_closedness_is_autocorrelation_symmetry():
    # degree 1: the relation reads sum_k a_k xi(n+k) = sum_k a_k xi(k-n); oracle by direct sums
    r = random.Random(3)
    for _ in range(30):
        vf = r.choice([Y0, X0, d3])
        vals = {(z,): r.randint(-2, 2) for z in range(-2, 3)}
        cf = CoefficientField(1, 2, vals)
        xi = lambda z: vals.get((z,), 0)
        brute = all(sum(a * xi(n + k) for k, a in vf.coeffs) == sum(a * xi(k - n) for k, a in vf.coeffs)
                    for n in range(-12, 13))
        assert is_closed_coeffs(vf, cf, assume_zero_outside=True).ok == brute


def _random_expansion(r, N, sites=range(-2, 3), terms=3):
    e = {}
    for _ in range(r.randint(1, terms)):
        e[MultiIndex.from_sites(r.choice(sites) for _ in range(N))] = r.randint(-3, 3)
    return HermiteExpansion(e)


@pytest.mark.parametrize("N", [1, 2])
def test_symbolic_and_coefficient_checks_agree(N):
    r = random.Random(11 + N)
    agree_closed = 0
    for _ in range(60):
        vf = r.choice([Y0, X0, d3])
        e = _random_expansion(r, N)
        if r.random() < 0.4:
            # exact functions give closed cases too
            e = exact_from_local(vf, _random_expansion(r, N + 1, range(0, 2), 2))
        if not e:
            continue
        sym = is_closed_symbolic(vf, e).ok
        W = max(abs(s) for s in e.sites)
        lat = is_closed_coeffs(vf, expansion_to_coeffs(e, N, W), assume_zero_outside=True).ok
        assert sym == lat
        agree_closed += sym
    assert agree_closed > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(-4, 4), st.integers(-4, 4))
def test_closedness_linearity(s, t, p, q):
    x_exact = lin({s: 1, -s: 1, 0: -2})
    x_closed = lin({t: 1, -t: 1})
    assert is_closed_symbolic(X0, x_exact * p + x_closed * q).ok
    assert is_closed_symbolic(Y0, lin({1: 1, 0: -1}) * p).ok
    # adding a non-closed piece breaks closedness
    assert not is_closed_symbolic(Y0, lin({1: p, 0: -p}) + lin({0: 1})).ok


def test_closedness_not_translation_invariant():
    # degree 1 compares sum a_k xi(k+d) with sum a_k xi(k-d), so translates of closed functions need not be closed
    assert is_closed_symbolic(Y0, lin({1: 1, 0: -1})).ok
    assert not is_closed_symbolic(Y0, lin({2: 1, 1: -1})).ok


def test_degree0_always_closed():
    for vf in BUILTIN_FIELDS.values():
        assert is_closed_symbolic(vf, const(Fraction(5, 2))).ok


def test_expansion_to_coeffs_examples():
    assert expansion_to_coeffs(lin({0: 1}), 1, 2).values == {(0,): 1}
    assert expansion_to_coeffs(lin({1: 1, 0: -2, -1: 1}), 1, 2).values == {(-1,): 1, (0,): -2, (1,): 1}
    assert len(expansion_to_coeffs(const(1), 1, 3)) == 0
    with pytest.raises(ValueError):
        expansion_to_coeffs(lin({5: 1}), 1, 2)
    e = HermiteExpansion({D(0) + D(2): 3, D(1, 2): -1})
    assert coeffs_to_expansion(expansion_to_coeffs(e, 2, 2)) == e


def test_coefficient_field_io():
    cf = CoefficientField(2, 3, {(1, 0): Fraction(1, 2), (2, 3): -4})
    assert cf[(0, 1)] == Fraction(1, 2)
    assert parse_coefficient_field(cf.dump()) == cf
    with pytest.raises(ValueError):
        CoefficientField(1, 2, {(3,): 1})
    with pytest.raises(ValueError):
        parse_coefficient_field("degree 1\n0 1\n")


def test_vector_field_io():
    vf = parse_vector_field("# comment\n1 1\n0 -2\n-1 1\n")
    assert vf == X0
    assert parse_vector_field(format_vector_field(d3)) == d3
    with pytest.raises(ValueError):
        VectorField.from_dict({0: 0})
