"""Algebraic numbers with exact arithmetic, and a fixed enumeration of them.

An `AlgebraicNumber` is stored as its monic minimal polynomial over Q together
with the canonical position of the intended root (roots ordered by real part,
then imaginary part). Because both parts are canonical, equality is a
structural comparison and hashing is cheap. The isolating box is derived from
the polynomial's certified root system and can be refined without limit.

The enumeration ``qbar_element`` / ``qbar_index`` walks blocks ``N = 1, 2, ...``.
Block N holds the monic irreducible polynomials with ``degree + height == N``,
where the height of a polynomial is the largest height ``max(|num|, den)`` of
its non-leading coefficients. Within a block polynomials are sorted by degree,
then height, then coefficient values compared lowest degree first; each
polynomial contributes its roots in canonical order.
"""

from __future__ import annotations

import bisect
import cmath
import itertools
import re
import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd

import flint

from galois_lab.errors import DomainError, ParseError
from galois_lab.exact.boxes import Ball, Box
from galois_lab.exact.poly import (
    QPoly,
    composed_product,
    composed_sum,
    factor_q,
    format_rational,
    height,
    is_irreducible,
    parse_rational,
)
from galois_lab.exact.roots import identify_root, root_system


class AlgebraicNumber:
    __slots__ = ("_minpoly", "_pos", "_hash")

    def __init__(self, minpoly: QPoly, position: int):
        # trusted constructor: minpoly monic irreducible, 0 <= position < degree
        self._minpoly = minpoly
        self._pos = position
        self._hash = None

    # -- constructors --------------------------------------------------
    @classmethod
    def rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls(QPoly([-q, 1]), 0)

    @classmethod
    def root(cls, minpoly: QPoly, position: int) -> "AlgebraicNumber":
        """The root at canonical `position` of an irreducible polynomial."""
        if minpoly.degree < 1 or not is_irreducible(minpoly):
            raise DomainError(f"{minpoly} is not irreducible over Q")
        m = minpoly.monic()
        if not 0 <= position < m.degree:
            raise DomainError("root position out of range")
        return cls(m, position)

    @classmethod
    def from_box(cls, minpoly: QPoly, box: Box) -> "AlgebraicNumber":
        if minpoly.degree < 1 or not is_irreducible(minpoly):
            raise DomainError(f"{minpoly} is not irreducible over Q")
        m = minpoly.monic()
        if m.degree == 1:
            if not box.contains(-m.coeffs[0], 0):
                raise DomainError("box contains no root of the polynomial")
            return cls(m, 0)
        return cls(m, root_system(m).position_of_box(box))

    # -- data ------------------------------------------------------------
    @property
    def minpoly(self) -> QPoly:
        return self._minpoly

    @property
    def position(self) -> int:
        return self._pos

    @property
    def degree(self) -> int:
        return self._minpoly.degree

    @property
    def box(self) -> Box:
        if self.degree == 1:
            q = self.as_rational()
            return Box(q, q, Fraction(0), Fraction(0))
        return root_system(self._minpoly).box(self._pos)

    def refined_box(self, bits: int) -> Box:
        if self.degree == 1:
            return self.box
        return root_system(self._minpoly).box(self._pos, bits)

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_rational(self) -> Fraction:
        if self.degree != 1:
            raise DomainError("not a rational number")
        return -self._minpoly.coeffs[0]

    def is_zero(self) -> bool:
        return self.degree == 1 and self._minpoly.coeffs[0] == 0

    def is_real(self) -> bool:
        return self.degree == 1 or root_system(self._minpoly).is_real(self._pos)

    def conjugate(self) -> "AlgebraicNumber":
        """Complex conjugate."""
        if self.degree == 1:
            return self
        return AlgebraicNumber(self._minpoly, root_system(self._minpoly).conjugate_position(self._pos))

    def rational_conjugates(self) -> list:
        """All roots of the minimal polynomial, in canonical order."""
        return [AlgebraicNumber(self._minpoly, k) for k in range(self.degree)]

    def ball(self, bits: int) -> Ball:
        """Certified enclosure of radius at most 2**-bits."""
        if self.degree == 1:
            return Ball.from_fraction(self.as_rational(), bits + 1)
        return root_system(self._minpoly).ball(self._pos, bits)

    def approx(self) -> complex:
        return self.ball(60).midpoint()

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        return qbar_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return qbar_add(self, qbar_neg(_coerce(other)))

    def __rsub__(self, other):
        return qbar_add(_coerce(other), qbar_neg(self))

    def __mul__(self, other):
        return qbar_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return qbar_mul(self, qbar_inv(_coerce(other)))

    def __rtruediv__(self, other):
        return qbar_mul(_coerce(other), qbar_inv(self))

    def __neg__(self):
        return qbar_neg(self)

    def __pow__(self, k: int):
        if k < 0:
            return qbar_inv(self) ** (-k)
        out = AlgebraicNumber.rational(1)
        base = self
        while k:
            if k & 1:
                out = qbar_mul(out, base)
            k >>= 1
            if k:
                base = qbar_mul(base, base)
        return out

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicNumber.rational(other)
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self._pos == other._pos and self._minpoly == other._minpoly

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._minpoly, self._pos))
        return self._hash

    def __repr__(self):
        if self.degree == 1:
            return f"AlgebraicNumber({format_rational(self.as_rational())})"
        return f"AlgebraicNumber(root {self._pos} of {self._minpoly} ~ {self.approx():.6g})"

    def to_dict(self) -> dict:
        return {"minpoly": self._minpoly.to_text(), "box": self.box.to_text()}

    @classmethod
    def from_dict(cls, d) -> "AlgebraicNumber":
        try:
            return cls.from_box(QPoly.from_text(d["minpoly"]), Box.from_text(d["box"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"not an algebraic number record: {d!r}") from exc


def _coerce(x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return AlgebraicNumber.rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an algebraic number")


def equals(a: AlgebraicNumber, b: AlgebraicNumber) -> bool:
    return a == b


# -- operations ---------------------------------------------------------------
def _pick(candidates: list, enclosure) -> AlgebraicNumber:
    polys = list(candidates)
    if len(polys) == 1 and polys[0].degree == 1:
        return AlgebraicNumber(polys[0], 0)
    s, pos = identify_root(polys, enclosure)
    return AlgebraicNumber(polys[s], pos)


def _shift(a: AlgebraicNumber, q: Fraction) -> AlgebraicNumber:
    m = a.minpoly.compose(QPoly([-q, 1]))
    # translation preserves the lexicographic order of roots
    return AlgebraicNumber(m, a.position)


def _scale(a: AlgebraicNumber, q: Fraction) -> AlgebraicNumber:
    m = a.minpoly.scale_variable(1 / q).monic()
    if q > 0:
        return AlgebraicNumber(m, a.position)
    return AlgebraicNumber(m, a.degree - 1 - a.position)


def qbar_add(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational() and b.is_rational():
        return AlgebraicNumber.rational(a.as_rational() + b.as_rational())
    if b.is_rational():
        return _shift(a, b.as_rational())
    if a.is_rational():
        return _shift(b, a.as_rational())
    facs = [f for f, _ in factor_q(composed_sum(a.minpoly, b.minpoly))]
    return _pick(facs, lambda bits: a.ball(bits + 2) + b.ball(bits + 2))


def _mag_bits(x: AlgebraicNumber) -> int:
    return int(x.ball(4).abs_upper()).bit_length() + 1


def qbar_mul(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational() and b.is_rational():
        return AlgebraicNumber.rational(a.as_rational() * b.as_rational())
    if a.is_rational():
        a, b = b, a
    if b.is_rational():
        q = b.as_rational()
        return AlgebraicNumber.rational(0) if q == 0 else _scale(a, q)
    facs = [f for f, _ in factor_q(composed_product(a.minpoly, b.minpoly))]
    extra = max(_mag_bits(a), _mag_bits(b)) + 2
    return _pick(facs, lambda bits: a.ball(bits + extra) * b.ball(bits + extra))


def qbar_neg(a: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational():
        return AlgebraicNumber.rational(-a.as_rational())
    # negation reverses the (real, imaginary) lexicographic order
    return AlgebraicNumber(a.minpoly.reflect().monic(), a.degree - 1 - a.position)


def qbar_inv(a: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_zero():
        raise DomainError("zero has no inverse")
    if a.is_rational():
        return AlgebraicNumber.rational(1 / a.as_rational())
    m = a.minpoly.reverse().monic()

    def enc(bits):
        k = bits
        while True:
            z = a.ball(2 * k + 8)
            try:
                return z.inverse()
            except ZeroDivisionError:
                k *= 2

    return _pick([m], enc)


def sqrt(n) -> AlgebraicNumber:
    """Principal square root of a rational: nonnegative, or i*sqrt(|n|) for n < 0."""
    n = Fraction(n)
    if n == 0:
        return AlgebraicNumber.rational(0)
    m = QPoly([-n, 0, 1])
    facs = factor_q(m)
    if len(facs) == 2:
        # only n > 0 splits; the factor x - r with r > 0 sorts first
        return AlgebraicNumber.rational(-facs[0][0].coeffs[0])
    # roots are +-r on the real axis or +-ri on the imaginary axis; position 1
    # is the positive one, or the one in the upper half plane
    return AlgebraicNumber(m, 1)


def root_of_unity(n: int, k: int = 1) -> AlgebraicNumber:
    """exp(2*pi*i*k/n)."""
    if n < 1:
        raise DomainError("order must be positive")
    g = gcd(k % n, n)
    order = n // g
    phi = QPoly(flint.fmpz_poly.cyclotomic(order))
    target = cmath.exp(2j * cmath.pi * (k % n) / n)
    if phi.degree == 1:
        return AlgebraicNumber(phi.monic(), 0)
    rs = root_system(phi)
    # distinct primitive roots are at least 2*sin(pi/order) apart, far above float noise
    best = min(range(phi.degree), key=lambda j: abs(rs.ball(j, 60).midpoint() - target))
    return AlgebraicNumber(phi, best)


# -- enumeration --------------------------------------------------------------
@lru_cache(maxsize=None)
def _rationals_up_to(h: int) -> tuple:
    """All rationals of height <= h, sorted."""
    vals = {Fraction(0)}
    for q in range(1, h + 1):
        for p in range(1, h + 1):
            f = Fraction(p, q)
            if height(f) <= h:
                vals.add(f)
                vals.add(-f)
    return tuple(sorted(vals))


def _poly_height(coeffs) -> int:
    return max((height(c) for c in coeffs), default=0)


_GROUP_LOCK = threading.Lock()
_GROUPS: dict = {}


def _group(d: int, h: int):
    """Sorted irreducible monic polynomials of degree d and height exactly h,
    as (list of lowest-first non-leading coefficient tuples, cumulative root counts)."""
    key = (d, h)
    got = _GROUPS.get(key)
    if got is not None:
        return got
    vals = _rationals_up_to(h)
    polys = []
    if d == 1:
        polys = [(c,) for c in vals if height(c) == h]
    else:
        fvals = [flint.fmpq(c.numerator, c.denominator) for c in vals]
        tall = [height(c) == h for c in vals]
        one = flint.fmpq(1)
        for idx in itertools.product(range(len(vals)), repeat=d):
            if vals[idx[0]] == 0 or not any(tall[k] for k in idx):
                continue
            _, facs = flint.fmpq_poly([fvals[k] for k in idx] + [one]).factor()
            if len(facs) == 1 and facs[0][1] == 1:
                polys.append(tuple(vals[k] for k in idx))
    cum = [0]
    for _ in polys:
        cum.append(cum[-1] + d)
    result = (polys, cum)
    with _GROUP_LOCK:
        _GROUPS.setdefault(key, result)
    return _GROUPS[key]


def _block_size(N: int) -> int:
    return sum(_group(d, N - d)[1][-1] for d in range(1, N + 1))


@lru_cache(maxsize=None)
def _block_start(N: int) -> int:
    if N <= 1:
        return 0
    return _block_start(N - 1) + _block_size(N - 1)


def qbar_key(a: AlgebraicNumber) -> tuple:
    """Sort key realizing the enumeration order without computing indices."""
    coeffs = a.minpoly.coeffs[:-1]
    d = a.degree
    h = _poly_height(coeffs)
    return (d + h, d, h, coeffs, a.position)


def qbar_index(a: AlgebraicNumber) -> int:
    """Position of `a` in the fixed enumeration.

    Costs grow quickly with degree + height, since every earlier block is
    enumerated; small elements (block up to about 8) are cheap.
    """
    N, d, h, coeffs, pos = qbar_key(a)
    idx = _block_start(N)
    for dd in range(1, d):
        idx += _group(dd, N - dd)[1][-1]
    polys, cum = _group(d, h)
    j = bisect.bisect_left(polys, coeffs)
    if j >= len(polys) or polys[j] != coeffs:
        raise DomainError("element not found in enumeration")
    return idx + cum[j] + pos


def qbar_element(n: int) -> AlgebraicNumber:
    if n < 0:
        raise DomainError("indices are natural numbers")
    N = 1
    while _block_start(N + 1) <= n:
        N += 1
    rem = n - _block_start(N)
    for d in range(1, N + 1):
        polys, cum = _group(d, N - d)
        if rem < cum[-1]:
            j = bisect.bisect_right(cum, rem) - 1
            m = QPoly(list(polys[j]) + [1])
            return AlgebraicNumber(m, rem - cum[j])
        rem -= cum[-1]
    raise AssertionError("enumeration block accounting is inconsistent")


def qbar_prefix(count: int) -> list:
    return [qbar_element(k) for k in range(count)]


def parse_number(text: str) -> AlgebraicNumber:
    """Rational literals and ``sqrt(q)``; richer expressions live in the CLI."""
    t = text.strip().replace(" ", "")
    if t.startswith("sqrt(") and t.endswith(")"):
        return sqrt(parse_rational(t[5:-1]))
    if t.startswith("{"):
        return AlgebraicNumber.from_dict(parse_record_text(t))
    return AlgebraicNumber.rational(parse_rational(t))


_RECORD_FIELD = re.compile(r'"?(minpoly|box)"?\s*[=:]\s*"?(\[[^\]]*\])"?')


def parse_record_text(text: str) -> dict:
    """``{"minpoly": "[..]", "box": "[..]"}`` as JSON, or the terse ``{minpoly=[..], box=[..]}``."""
    import json

    t = text.strip()
    try:
        d = json.loads(t)
        if isinstance(d, dict):
            return d
    except json.JSONDecodeError:
        pass
    found = dict(_RECORD_FIELD.findall(t))
    if set(found) != {"minpoly", "box"}:
        raise ParseError(f"not an algebraic number record: {text!r}")
    return found
