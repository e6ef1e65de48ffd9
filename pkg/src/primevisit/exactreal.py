"""Exact arithmetic in quadratic fields, plus rational interval helpers.

Return-time and orbit certificates need comparisons like ||n*alpha|| < eps
to be decided exactly.  Numbers of the form a + b*sqrt(d) (a, b rational,
d squarefree) support this: sign, floor and fractional part are all exact
integer computations.  Decimal inputs are handled as rational intervals.
"""

from fractions import Fraction
from math import isqrt

from .errors import UsageError, PrecisionExhausted


def squarefree_split(d: int) -> tuple[int, int]:
    """d = s^2 * d0 with d0 squarefree; returns (s, d0)."""
    if d <= 0:
        raise UsageError(f"need d > 0, got {d}")
    s, d0, p = 1, d, 2
    while p * p <= d0:
        while d0 % (p * p) == 0:
            d0 //= p * p
            s *= p
        p += 1
    return s, d0


class QuadExt:
    """Immutable a + b*sqrt(d), a and b rational, d squarefree (0 when b=0)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=0):
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            d = 0
        else:
            if d < 2:
                raise UsageError(f"need d >= 2 for irrational part, got {d}")
            s, d0 = squarefree_split(d)
            if d0 == 1:  # d was a perfect square: fold into the rational part
                a += b * s
                b = Fraction(0)
                d = 0
            else:
                b *= s
                d = d0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QuadExt is immutable")

    # --- constructors -------------------------------------------------

    @classmethod
    def golden(cls) -> "QuadExt":
        """(sqrt(5) - 1) / 2, the fractional part of the golden ratio."""
        return cls(Fraction(-1, 2), Fraction(1, 2), 5)

    @classmethod
    def sqrt2_minus_1(cls) -> "QuadExt":
        return cls(-1, 1, 2)

    # --- predicates ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _check_compatible(self, other: "QuadExt"):
        if self.b != 0 and other.b != 0 and self.d != other.d:
            raise UsageError(f"mixed radicands {self.d} and {other.d}")

    # --- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a + other, self.b, self.d)
        self._check_compatible(other)
        return QuadExt(self.a + other.a, self.b + other.b, self.d or other.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a - other, self.b, self.d)
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.d)
        self._check_compatible(other)
        d = self.d or other.d
        return QuadExt(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    # --- order ----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # mixed signs: compare a^2 with b^2 d (never equal, d squarefree >= 2)
        if a > 0:  # b < 0
            return 1 if a * a > b * b * d else -1
        return 1 if b * b * d > a * a else -1

    def _cmp(self, other) -> int:
        if isinstance(other, (int, Fraction)):
            other = QuadExt(other)
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadExt(other)
        elif not isinstance(other, QuadExt):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    # --- floor / fractional part ----------------------------------------

    def __float__(self) -> float:
        if self.b == 0:
            return float(self.a)
        # correct to a few ulps; exact code paths never rely on this
        return float(self.a) + float(self.b) * self.d**0.5

    def floor(self) -> int:
        if self.b == 0:
            return self.a.numerator // self.a.denominator
        n = int(float(self))
        # fix up float error exactly: want n <= x < n + 1
        while self._cmp(n) < 0:
            n -= 1
        while self._cmp(n + 1) >= 0:
            n += 1
        return n

    def frac(self) -> "QuadExt":
        """x - floor(x), in [0, 1)."""
        return self - self.floor()

    def dist_to_nearest_int(self) -> "QuadExt":
        """||x||, the distance to the nearest integer."""
        f = self.frac()
        g = QuadExt(1) - f
        return f if f._cmp(Fraction(1, 2)) <= 0 else g

    def __repr__(self):
        if self.b == 0:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a} + {self.b}*sqrt({self.d}))"


# --- rational intervals ---------------------------------------------------
# Minimal certified enclosures [lo, hi]; just what continued-fraction
# expansion of decimal inputs needs.


class RatInterval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise UsageError("empty interval")
        self.lo, self.hi = lo, hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __mul__(self, n: int):
        if n >= 0:
            return RatInterval(self.lo * n, self.hi * n)
        return RatInterval(self.hi * n, self.lo * n)

    __rmul__ = __mul__

    def __sub__(self, x):
        x = Fraction(x)
        return RatInterval(self.lo - x, self.hi - x)

    def certain_floor(self) -> int:
        """floor if the whole interval agrees on it."""
        flo = self.lo.numerator // self.lo.denominator
        fhi = self.hi.numerator // self.hi.denominator
        if flo != fhi:
            raise PrecisionExhausted(
                f"interval [{float(self.lo):.17g}, {float(self.hi):.17g}] "
                f"straddles an integer"
            )
        return flo

    def recip(self) -> "RatInterval":
        """1/x for an interval not containing 0."""
        if self.lo <= 0 <= self.hi:
            raise PrecisionExhausted("interval contains 0, cannot invert")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def dist_to_nearest_int(self) -> "RatInterval":
        """Enclosure of ||x||; requires the interval to sit inside one period."""
        n = self.certain_floor()
        lo, hi = self.lo - n, self.hi - n  # both in [0, 1)
        half = Fraction(1, 2)
        if hi <= half:
            return RatInterval(lo, hi)
        if lo >= half:
            return RatInterval(1 - hi, 1 - lo)
        return RatInterval(min(lo, 1 - hi), half)

    def compare_lt(self, x) -> bool:
        """Certified self < x; raises when the interval straddles x."""
        x = Fraction(x)
        if self.hi < x:
            return True
        if self.lo >= x:
            return False
        raise PrecisionExhausted(f"interval straddles comparison point {float(x)}")

    def __repr__(self):
        return f"RatInterval({self.lo}, {self.hi})"


def sqrt_interval(d: int, scale_bits: int = 128) -> RatInterval:
    """Certified enclosure of sqrt(d) with ~scale_bits bits of precision."""
    s = isqrt(d << (2 * scale_bits))
    lo = Fraction(s, 1 << scale_bits)
    hi = Fraction(s + 1, 1 << scale_bits)
    return RatInterval(lo, hi)
