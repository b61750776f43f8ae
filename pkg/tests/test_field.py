import pytest

from sl2btree.errors import InvalidInputError
from sl2btree.field import Field, field


def test_prime_field_arithmetic():
    F = field(3)
    one, two = F.element(1), F.element(2)
    assert one + two == F.element(0)
    assert two * two == one
    assert -one == two
    assert two - one == one
    assert two.inverse() == two
    assert one.inverse() == one


def test_element_coercion():
    F = field(5)
    assert F.element(7) == F.element(2)
    assert F.element(-1) == F.element(4)
    a = F.element(3)
    assert F.element(a) is a


def test_element_from_other_field_rejected():
    with pytest.raises(InvalidInputError):
        field(2).element(field(3).element(1))


def test_bool_and_units():
    F = field(3)
    assert not F.element(0)
    assert F.element(1)
    assert list(F.units()) == [F.element(1), F.element(2)]
    assert len(list(F.elements())) == 3


def test_extension_field_arithmetic():
    F = field(4)
    x = F.gen
    assert F.modulus == (1, 1, 1)
    assert x * x == x + F.element(1)
    assert x * x * x == F.element(1)
    assert x.inverse() == x + F.element(1)
    assert x * x.inverse() == F.element(1)
    assert len(list(F.elements())) == 4
    assert len(list(F.units())) == 3


def test_extension_field_coefficient_tuples():
    F = field(9)
    a = F.element((1, 2))
    b = F.element((2, 1))
    assert a + b == F.element(0)  # coefficients add mod 3
    with pytest.raises(InvalidInputError):
        F.element((1, 1, 1))


def test_sqrt_squares_back():
    for q in (2, 3, 4):
        F = field(q)
        for a in F.elements():
            square = a * a
            r = square.sqrt()
            assert r * r == square


def test_sqrt_of_a_nonresidue():
    F3 = field(3)
    with pytest.raises(InvalidInputError):
        F3.element(2).sqrt()


def test_field_constructor_guards():
    with pytest.raises(InvalidInputError):
        field(6)
    with pytest.raises(InvalidInputError):
        field(1)
    with pytest.raises(InvalidInputError):
        Field(2, 2, (1, 0, 1))  # x^2 + 1 = (x+1)^2 over F_2


def test_field_caching():
    assert field(2) is field(2)
    assert field(4) is field(4)
    assert field(2) is not field(3)


def test_hash_consistency():
    F = field(4)
    seen = {a: str(a) for a in F.elements()}
    assert len(seen) == 4
    assert F.element((1, 1)) in seen
