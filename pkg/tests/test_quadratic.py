import math
from fractions import Fraction

from treeaug.quadratic import (
    CROSS_RATIO_CUTOFF,
    GUARANTEE_FACTOR,
    STAR_SCALE,
    Sqrt5,
    star_branch_factor,
)


def test_arithmetic_against_floats():
    a = Sqrt5(Fraction(1, 3), Fraction(-2, 7))
    b = Sqrt5(Fraction(5, 2), Fraction(1, 4))
    for x, y in ((a, b), (b, a)):
        assert math.isclose(float(x + y), float(x) + float(y))
        assert math.isclose(float(x - y), float(x) - float(y))
        assert math.isclose(float(x * y), float(x) * float(y))
        assert math.isclose(float(x / y), float(x) / float(y))


def test_exact_sign():
    assert Sqrt5(0, 0).sign() == 0
    assert Sqrt5(-9, 4).sign() == -1      # 4*sqrt5 = 8.944... < 9
    assert Sqrt5(9, -4).sign() == 1
    assert Sqrt5(-2, 1) > 0               # sqrt5 > 2
    assert Sqrt5(-3, 1) < 0               # sqrt5 < 3
    assert Sqrt5(5, -2) > 0               # 2*sqrt5 < 5
    assert Sqrt5(Fraction(9, 4), -1) > 0  # sqrt5 < 2.25


def test_inverse_roundtrip():
    x = Sqrt5(Fraction(3), Fraction(1))
    assert x * x.inverse() == Sqrt5(1)
    assert (Sqrt5(1) / x) * x == Sqrt5(1)


def test_constants_numeric():
    assert abs(float(GUARANTEE_FACTOR) - 1.96418) < 5e-6
    assert abs(float(CROSS_RATIO_CUTOFF) - 0.96418) < 5e-6
    assert abs(float(STAR_SCALE) - (3 + math.sqrt(5))) < 1e-12


def test_boundary_equalities():
    # at the branch cutoff both branch bounds coincide with the guarantee
    assert star_branch_factor(CROSS_RATIO_CUTOFF) == GUARANTEE_FACTOR
    assert Sqrt5(1) + CROSS_RATIO_CUTOFF == GUARANTEE_FACTOR


def test_min_branch_below_guarantee_on_grid():
    for k in range(0, 101):
        t = Fraction(k, 100)
        star = star_branch_factor(t)
        exact = Sqrt5(1) + Sqrt5(t)
        best = star if star <= exact else exact
        assert best <= GUARANTEE_FACTOR
