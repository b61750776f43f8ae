import pytest

from sl2btree.field import field
from sl2btree.literals import parse_series
from sl2btree.polys import (
    all_t_polys,
    divmod_t,
    from_t_coeffs,
    gcd_t,
    is_irreducible_t,
    is_t_poly,
    mod_t,
    monic_t,
    t_coeffs,
    t_degree,
    t_polys_with_degree,
    xgcd_t,
)
from sl2btree.series import LaurentSeries


F2 = field(2)
F3 = field(3)


def test_is_t_poly():
    assert is_t_poly(parse_series(F2, "t^2+1"))
    assert is_t_poly(LaurentSeries.zero(F2))
    assert not is_t_poly(parse_series(F2, "p+1"))
    assert not is_t_poly(LaurentSeries.inexact(F2, {0: 1}, 3))


def test_degree_and_coefficients():
    a = parse_series(F2, "t^3+t")
    assert t_degree(a) == 3
    assert t_coeffs(a) == [F2.element(c) for c in (0, 1, 0, 1)]
    assert t_degree(LaurentSeries.one(F2)) == 0
    assert t_degree(LaurentSeries.zero(F2)) == -1
    assert from_t_coeffs(F2, [0, 1, 0, 1]) == a


def test_divmod():
    a = parse_series(F2, "t^3+t+1")
    b = parse_series(F2, "t^2+1")
    q, r = divmod_t(a, b)
    assert q * b + r == a
    assert t_degree(r) < t_degree(b)
    assert q == parse_series(F2, "t")
    assert r == parse_series(F2, "1")


def test_divmod_over_odd_characteristic():
    a = parse_series(F3, "2*t^4+t^2+1")
    b = parse_series(F3, "t^2+2")
    q, r = divmod_t(a, b)
    assert q * b + r == a
    assert t_degree(r) < 2


def test_gcd_and_bezout():
    g = gcd_t(parse_series(F2, "t^2+t"), parse_series(F2, "t^3+t^2"))
    assert g == parse_series(F2, "t^2+t")
    a = parse_series(F2, "t^2+t+1")
    b = parse_series(F2, "t")
    g, u, v = xgcd_t(a, b)
    assert g == LaurentSeries.one(F2)
    assert u * a + v * b == g


def test_monic_normalization():
    a = parse_series(F3, "2*t^2+t")
    m = monic_t(a)
    assert m == parse_series(F3, "t^2+2*t")
    assert t_coeffs(m)[-1] == F3.element(1)


def test_mod_t():
    a = parse_series(F2, "t^3+1")
    f = parse_series(F2, "t^2+t+1")
    r = mod_t(a, f)
    assert t_degree(r) < 2
    q, expected = divmod_t(a, f)
    assert r == expected


def test_poly_enumeration_counts():
    assert len(list(all_t_polys(F2, 2))) == 8
    assert len(list(all_t_polys(F3, 1))) == 9
    assert len(list(all_t_polys(F2, -1))) == 1  # just zero
    assert len(list(t_polys_with_degree(F2, 2))) == 4
    assert len(list(t_polys_with_degree(F3, 2))) == 18
    for p in t_polys_with_degree(F2, 3):
        assert t_degree(p) == 3


def test_irreducibility():
    assert is_irreducible_t(parse_series(F2, "t^2+t+1"))
    assert not is_irreducible_t(parse_series(F2, "t^2+1"))
    assert is_irreducible_t(parse_series(F3, "t^2+1"))
    assert not is_irreducible_t(parse_series(F3, "t^2+2"))
    assert is_irreducible_t(parse_series(F2, "t"))
    assert is_irreducible_t(parse_series(F2, "t^3+t+1"))
