import pytest
from hypothesis import given, strategies as st

from closedforms.multiindex import (
    ZERO, MultiIndex, cone_point, decode, degree, dot_action, encode, enumerate_orbits, format_point,
    is_cone_point, multi_indices, orbit, parse_point, representative, shift,
)

D = MultiIndex.delta
sites = st.lists(st.integers(-8, 8), max_size=5)


def test_degree_examples():
    assert degree(ZERO) == 0
    assert degree(D(3)) == 1
    assert degree(D(1) + D(3, 2)) == 3


def test_encode_decode_examples():
    assert encode(D(1) + D(3, 2)) == (1, 3, 3)
    assert encode(D(0, 2)) == (0, 0)
    assert encode(D(-2) + D(5)) == (-2, 5)
    assert decode((1, 3, 3)) == D(1) + D(3, 2)
    assert decode((3, 1, 3)) == D(1) + D(3, 2)
    assert decode(()) == ZERO


@given(sites)
def test_encode_decode_roundtrip(s):
    I = MultiIndex.from_sites(s)
    assert encode(I) == tuple(sorted(s))
    assert decode(encode(I)) == I


def test_parse_and_str():
    I = MultiIndex.parse("-1:1,3:2")
    assert I == D(-1) + D(3, 2)
    assert MultiIndex.parse(str(I)) == I
    assert MultiIndex.parse("") == ZERO and MultiIndex.parse("0") == ZERO
    assert str(ZERO) == "0"
    with pytest.raises(ValueError):
        MultiIndex.parse("1:-1")
    assert parse_point(format_point((1, -2, 3))) == (1, -2, 3)


def test_remove():
    assert (D(1) + D(2)).remove(2) == D(1)
    assert D(1).remove(2) is None


def test_shift_examples():
    assert shift(D(0), 1) == D(-1)
    I = D(1) + D(3, 2)
    assert shift(I, 0) == I


@given(sites, st.integers(-10, 10), st.integers(-10, 10))
def test_shift_group_law(s, n, m):
    I = MultiIndex.from_sites(s)
    assert shift(shift(I, n), -n) == I
    assert shift(shift(I, n), m) == shift(I, n + m)


def test_dot_action_examples():
    I = D(1) + D(3, 2)
    assert dot_action(0, I) == I
    assert dot_action(1, D(1)) == D(-1)
    assert dot_action(2, D(1)) is None


def test_orbit_examples():
    assert orbit(D(1)) == {D(1), D(-1)}
    assert orbit(ZERO) == {ZERO}
    assert orbit(D(0, 2)) == {D(0, 2)}


def test_orbit_brute_force():
    # oracle: every n in a wide range, keeping defined results
    for I in [D(1), D(0) + D(2), D(-1) + D(2, 2), D(-3) + D(0) + D(4)]:
        brute = {dot_action(n, I) for n in range(-30, 31)} - {None}
        assert orbit(I) == brute


def test_representative_and_cone_point():
    assert representative(D(-1)) == D(1)
    assert representative(D(1) + D(3, 2)) == D(1) + D(3, 2)
    assert representative(ZERO) == ZERO
    assert cone_point(D(-1)) == (1,)
    assert cone_point(D(1) + D(3, 2)) == (1, 3, 3)
    assert cone_point(ZERO) == ()


@given(st.lists(st.integers(-8, 8), min_size=1, max_size=4))
def test_orbit_invariants(s):
    I = MultiIndex.from_sites(s)
    z = cone_point(I)
    assert is_cone_point(z)
    members = orbit(I)
    assert I in members
    assert {cone_point(J) for J in members} == {z}
    assert all(orbit(J) == members for J in members)
    nonneg = [J for J in members if min(J.support) >= 0]
    assert nonneg == [representative(I)]


def test_orbits_partition_multi_indices():
    # freeness: each multi-index lies in exactly one orbit of a cone point
    for N in (1, 2, 3):
        box = multi_indices(N, -3, 3)
        seen = {}
        for I in box:
            seen.setdefault(cone_point(I), set()).add(I)
        for z, members in seen.items():
            assert members <= orbit(decode(z))


def test_enumerate_orbits_examples():
    assert enumerate_orbits(0, 5) == [()]
    assert enumerate_orbits(1, 3) == [(0,), (1,), (2,), (3,)]
    assert enumerate_orbits(2, 1) == [(0, 0), (0, 1), (1, 1)]


def test_multi_indices_counts():
    from math import comb
    assert len(multi_indices(2, -2, 2)) == comb(5 + 1, 2)
    assert len(set(multi_indices(3, 0, 3))) == comb(4 + 2, 3)
