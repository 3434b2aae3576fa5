from fractions import Fraction

import pytest

from valdyn import QN, QuadraticInteger, spectral_radius_2x2
from valdyn.errors import FieldMismatchError


def test_rational_embedding():
    x = QN.of(Fraction(3, 2))
    assert x.is_rational
    assert x.as_rational() == Fraction(3, 2)
    assert QN.of(2) + QN.of(3) == QN.of(5)


def test_sqrt_arithmetic():
    r = QN.sqrt_of(5)
    assert r * r == QN.of(5)
    phi = (QN.of(1) + r) / 2
    # golden ratio satisfies x^2 = x + 1
    assert phi * phi == phi + 1


def test_squarefree_normalization():
    # sqrt(8) = 2*sqrt(2), so both live in the same field
    assert QN.sqrt_of(8) == 2 * QN.sqrt_of(2)
    assert QN.sqrt_of(8) / QN.sqrt_of(2) == QN.of(2)


def test_exact_comparison():
    # 5 < 1 + sqrt(22) < 6, decided without floats
    x = QN.of(1) + QN.sqrt_of(22)
    assert QN.of(5) < x
    assert x < QN.of(6)
    assert not x < x
    assert x <= x


def test_comparison_near_tie():
    # sqrt(2) + sqrt(2) vs 2*sqrt(2): equal; 17/12 vs sqrt(2): strictly above
    assert QN.sqrt_of(2) + QN.sqrt_of(2) == 2 * QN.sqrt_of(2)
    assert QN.of(Fraction(17, 12)) > QN.sqrt_of(2)
    assert QN.of(Fraction(7, 5)) < QN.sqrt_of(2)


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        QN.sqrt_of(2) + QN.sqrt_of(3)


def test_floor():
    assert QN.sqrt_of(22).floor() == 4
    assert (QN.of(1) + QN.sqrt_of(22)).floor() == 5
    assert (-QN.sqrt_of(2)).floor() == -2
    assert QN.of(Fraction(-3, 2)).floor() == -2


def test_division():
    x = QN.of(7) / (QN.of(2) + QN.sqrt_of(2))
    assert x * (QN.of(2) + QN.sqrt_of(2)) == QN.of(7)
    with pytest.raises(ZeroDivisionError):
        QN.of(1) / QN.of(0)


def test_conjugate_and_power():
    x = QN.of(1) + QN.sqrt_of(22)
    assert x * x.conjugate() == QN.of(1 - 22)
    assert x ** 2 == QN.of(23) + 2 * QN.sqrt_of(22)


def test_quadratic_integer_str():
    qi = QuadraticInteger.from_value(QN.of(1) + QN.sqrt_of(22))
    assert qi.degree == 2
    assert str(qi) == "1 + sqrt(22) (minpoly: X^2 - 2X - 21)"


def test_quadratic_integer_rational():
    qi = QuadraticInteger.from_value(QN.of(3))
    assert qi.degree == 1
    assert qi.value == QN.of(3)


def test_spectral_radius():
    qi = spectral_radius_2x2(2, 3, 7, 0)
    assert qi.value == QN.of(1) + QN.sqrt_of(22)
    assert spectral_radius_2x2(1, 1, 1, 0).value == (QN.of(1) + QN.sqrt_of(5)) / 2
    assert spectral_radius_2x2(2, 0, 0, 3).value == QN.of(3)


def test_spectral_radius_is_largest_root():
    # eigenvalues of [[2,1],[1,3]] are (5 +- sqrt(5))/2
    qi = spectral_radius_2x2(2, 1, 1, 3)
    assert qi.value == (QN.of(5) + QN.sqrt_of(5)) / 2


def test_json_round_trip():
    x = (QN.of(3) - 2 * QN.sqrt_of(7)) / 5
    assert QN.from_json(x.to_json()) == x
