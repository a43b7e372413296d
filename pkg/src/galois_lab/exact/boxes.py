"""Exact enclosures of complex numbers.

`Box` is the public, serializable rectangle with rational corners.
`Ball` is the working type: a complex disk whose center has dyadic
coordinates ``(re + i*im) / 2**prec`` and whose radius ``rad / 2**prec`` is
a rigorous upper bound. Every operation rounds outward, so an enclosure
produced here always contains the exact value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from galois_lab.errors import ParseError
from galois_lab.exact.poly import QPoly, format_rational, parse_rational


@dataclass(frozen=True)
class Box:
    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    def __post_init__(self):
        if self.re_lo > self.re_hi or self.im_lo > self.im_hi:
            raise ValueError("box endpoints out of order")

    def contains(self, re, im=0) -> bool:
        return self.re_lo <= re <= self.re_hi and self.im_lo <= im <= self.im_hi

    def intersects(self, other: "Box") -> bool:
        return not (
            self.re_hi < other.re_lo
            or other.re_hi < self.re_lo
            or self.im_hi < other.im_lo
            or other.im_hi < self.im_lo
        )

    def contains_box(self, other: "Box") -> bool:
        return (
            self.re_lo <= other.re_lo
            and other.re_hi <= self.re_hi
            and self.im_lo <= other.im_lo
            and other.im_hi <= self.im_hi
        )

    @property
    def width(self) -> Fraction:
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    @property
    def midpoint(self) -> tuple:
        return ((self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2)

    def mirrored(self) -> "Box":
        return Box(self.re_lo, self.re_hi, -self.im_hi, -self.im_lo)

    def as_list(self) -> list:
        return [self.re_lo, self.re_hi, self.im_lo, self.im_hi]

    def to_text(self) -> str:
        return "[" + ", ".join(format_rational(c) for c in self.as_list()) + "]"

    @classmethod
    def from_list(cls, values) -> "Box":
        vals = [v if isinstance(v, Fraction) else parse_rational(str(v)) for v in values]
        if len(vals) != 4:
            raise ParseError("a box needs exactly four rationals")
        try:
            return cls(*vals)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    @classmethod
    def from_text(cls, text: str) -> "Box":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ParseError(f"box must be a bracketed list: {text!r}")
        return cls.from_list([t for t in body[1:-1].split(",")])


def _floor_shift(v: int, s: int) -> int:
    return v >> s if s >= 0 else v << -s


def _ceil_shift(v: int, s: int) -> int:
    return -((-v) >> s) if s >= 0 else v << -s


def _abs_upper(re: int, im: int) -> int:
    return isqrt(re * re + im * im) + 1


class Ball:
    __slots__ = ("re", "im", "rad", "prec")

    def __init__(self, re: int, im: int, rad: int, prec: int):
        self.re = re
        self.im = im
        self.rad = rad
        self.prec = prec

    @classmethod
    def exact_int(cls, n: int, prec: int) -> "Ball":
        return cls(n << prec, 0, 0, prec)

    @classmethod
    def from_fraction(cls, q, prec: int, im=0) -> "Ball":
        q = Fraction(q)
        im = Fraction(im)
        num = q.numerator << prec
        re_c, re_exact = num // q.denominator, num % q.denominator == 0
        inum = im.numerator << prec
        im_c, im_exact = inum // im.denominator, inum % im.denominator == 0
        rad = (0 if re_exact else 1) + (0 if im_exact else 1)
        return cls(re_c, im_c, rad, prec)

    @classmethod
    def from_box(cls, box: Box, prec: int) -> "Ball":
        """Smallest dyadic ball (at this precision) containing the box."""
        mre, mim = box.midpoint
        hw = max(box.re_hi - box.re_lo, box.im_hi - box.im_lo) / 2
        c = cls.from_fraction(mre, prec, mim)
        # L1 bound on half-diagonal; coarse but rigorous
        extra = hw * 2
        r = -((-extra.numerator << prec) // extra.denominator)
        return cls(c.re, c.im, c.rad + r + 1, prec)

    def to_box(self) -> Box:
        d = 1 << self.prec
        return Box(
            Fraction(self.re - self.rad, d),
            Fraction(self.re + self.rad, d),
            Fraction(self.im - self.rad, d),
            Fraction(self.im + self.rad, d),
        )

    def at(self, prec: int) -> "Ball":
        """Re-express at another scale, rounding outward."""
        s = self.prec - prec
        if s == 0:
            return self
        if s < 0:
            return Ball(self.re << -s, self.im << -s, self.rad << -s, prec)
        return Ball(self.re >> s, self.im >> s, _ceil_shift(self.rad, s) + 2, prec)

    def _align(self, other: "Ball"):
        if self.prec == other.prec:
            return self, other
        p = max(self.prec, other.prec)
        return self.at(p), other.at(p)

    def __add__(self, other: "Ball") -> "Ball":
        a, b = self._align(other)
        return Ball(a.re + b.re, a.im + b.im, a.rad + b.rad, a.prec)

    def __sub__(self, other: "Ball") -> "Ball":
        a, b = self._align(other)
        return Ball(a.re - b.re, a.im - b.im, a.rad + b.rad, a.prec)

    def __neg__(self) -> "Ball":
        return Ball(-self.re, -self.im, self.rad, self.prec)

    def __mul__(self, other: "Ball") -> "Ball":
        self, other = self._align(other)
        p = self.prec
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        err = (
            _abs_upper(self.re, self.im) * other.rad
            + _abs_upper(other.re, other.im) * self.rad
            + self.rad * other.rad
        )
        return Ball(re >> p, im >> p, _ceil_shift(err, p) + 2, p)

    def add_int(self, n: int) -> "Ball":
        return Ball(self.re + (n << self.prec), self.im, self.rad, self.prec)

    def mul_int(self, n: int) -> "Ball":
        return Ball(self.re * n, self.im * n, self.rad * abs(n), self.prec)

    def div_int(self, n: int) -> "Ball":
        if n < 0:
            return (-self).div_int(-n)
        return Ball(self.re // n, self.im // n, -((-self.rad) // n) + 2, self.prec)

    def inverse(self) -> "Ball":
        """Enclosure of 1/z; requires the ball to exclude 0."""
        p = self.prec
        norm = self.re * self.re + self.im * self.im
        low = isqrt(norm)
        if low <= self.rad:
            raise ZeroDivisionError("ball may contain zero")
        re = (self.re << 2 * p) // norm
        im = (-self.im << 2 * p) // norm
        num = self.rad << 2 * p
        den = low * (low - self.rad)
        return Ball(re, im, -(-num // den) + 2, p)

    def conj(self) -> "Ball":
        return Ball(self.re, -self.im, self.rad, self.prec)

    def real_part(self) -> "Ball":
        return Ball(self.re, 0, self.rad, self.prec)

    def contains_zero(self) -> bool:
        # disk test: |c| <= rad
        return self.re * self.re + self.im * self.im <= self.rad * self.rad

    def abs_upper(self) -> Fraction:
        return Fraction(_abs_upper(self.re, self.im) + self.rad, 1 << self.prec)

    def midpoint(self) -> complex:
        d = 1 << self.prec
        return complex(self.re / d, self.im / d)

    def __repr__(self):
        return f"Ball({self.midpoint()} +/- 2^{self.rad.bit_length() - self.prec})"


def poly_int_form(p: QPoly) -> tuple:
    """(integer coefficient list, positive common denominator) with p = H / den."""
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in p.coeffs], den


def eval_int_poly(coeffs: list, z: Ball) -> Ball:
    """Horner evaluation of an integer polynomial (lowest degree first)."""
    if not coeffs:
        return Ball(0, 0, 0, z.prec)
    acc = Ball.exact_int(coeffs[-1], z.prec)
    for c in reversed(coeffs[:-1]):
        acc = (acc * z).add_int(c)
    return acc


def eval_poly(p: QPoly, z: Ball) -> Ball:
    coeffs, den = poly_int_form(p)
    v = eval_int_poly(coeffs, z)
    return v if den == 1 else v.div_int(den)
