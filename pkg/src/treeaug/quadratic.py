"""Exact arithmetic over Q(sqrt 5).

The pipeline's tuning constants live in this field, so comparisons against
them (branch selection, certified per-pair bounds) must be decided exactly
rather than in floating point.  A number is stored as a + b*sqrt(5) with
rational a, b; sign tests square out the radical.
"""

from __future__ import annotations

import math
from fractions import Fraction


class Sqrt5(object):
    """a + b*sqrt(5) with exact rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, Sqrt5):
            return x
        return Sqrt5(Fraction(x), 0)

    def __add__(self, other):
        o = self._coerce(other)
        return Sqrt5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Sqrt5(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Sqrt5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        # (a + b*sqrt5)^-1 = (a - b*sqrt5) / (a^2 - 5 b^2)
        norm = self.a * self.a - 5 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("zero or degenerate Sqrt5 element")
        return Sqrt5(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    # -- exact ordering ---------------------------------------------------

    def sign(self):
        """Exact sign of a + b*sqrt(5), in {-1, 0, 1}."""
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 5 b^2
        if a > 0:  # b < 0: positive iff a^2 > 5 b^2
            return 1 if a * a > 5 * b * b else (0 if a * a == 5 * b * b else -1)
        # a < 0 < b: positive iff 5 b^2 > a^2
        return 1 if 5 * b * b > a * a else (0 if 5 * b * b == a * a else -1)

    def __eq__(self, other):
        o = self._coerce(other)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(5.0)

    def __repr__(self):
        return f"Sqrt5({self.a!r}, {self.b!r})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt5)"


#: Scale applied to in-link mass in the near-star rounding branch: 3 + sqrt(5).
STAR_SCALE = Sqrt5(3, 1)

#: Cross-mass fraction above which the near-star branch is used,
#: 1 - 2(5 - 2*sqrt5)/(25 + 2*sqrt5), approximately 0.96418.
CROSS_RATIO_CUTOFF = Sqrt5(1) - Sqrt5(2) * Sqrt5(5, -2) / Sqrt5(25, 2)

#: Certified per-pair approximation factor 8(23 + 3*sqrt5)/121,
#: approximately 1.96418.
GUARANTEE_FACTOR = Sqrt5(Fraction(8 * 23, 121), Fraction(8 * 3, 121))


def star_branch_factor(cross_fraction):
    """Certified cost factor of the near-star branch at a given cross-mass
    fraction t: 2*s*(1-t) + (4*s / (3*(s-1))) * t for s = STAR_SCALE."""
    t = Sqrt5._coerce(cross_fraction)
    s = STAR_SCALE
    return Sqrt5(2) * s * (Sqrt5(1) - t) + (Sqrt5(4) * s / (Sqrt5(3) * (s - Sqrt5(1)))) * t
