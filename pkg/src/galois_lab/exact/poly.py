"""Univariate polynomials over Q.

`QPoly` is an immutable value type. Coefficients are exposed as
`fractions.Fraction` (lowest degree first); the arithmetic itself runs on
FLINT's ``fmpq_poly`` so that resultants and factorization stay fast at the
degrees the number-field layer produces (up to a few hundred).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from functools import lru_cache
from typing import Iterable, Sequence

import flint

from galois_lab.errors import DomainError, ParseError

Rational = Fraction


def to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, str):
        c = parse_rational(c)
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def from_fmpq(c) -> Fraction:
    if isinstance(c, flint.fmpz):
        return Fraction(int(c))
    return Fraction(int(c.p), int(c.q))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def height(q: Fraction) -> int:
    """max(|numerator|, denominator); 0 for zero."""
    q = Fraction(q)
    if q == 0:
        return 0
    return max(abs(q.numerator), q.denominator)


class QPoly:
    """A polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("_p", "_coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, flint.fmpq_poly):
            p = coeffs
        elif isinstance(coeffs, flint.fmpz_poly):
            p = flint.fmpq_poly(coeffs)
        elif isinstance(coeffs, QPoly):
            p = coeffs._p
        else:
            p = flint.fmpq_poly([to_fmpq(c) for c in coeffs])
        self._p = p
        self._coeffs = None
        self._hash = None

    # construction helpers
    @classmethod
    def x(cls) -> "QPoly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "QPoly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Sequence) -> "QPoly":
        p = flint.fmpq_poly([1])
        for r in roots:
            p = p * flint.fmpq_poly([-to_fmpq(r), 1])
        return cls(p)

    @property
    def flint(self) -> flint.fmpq_poly:
        """The underlying FLINT polynomial. Treat as read-only."""
        return self._p

    @property
    def coeffs(self) -> tuple:
        if self._coeffs is None:
            self._coeffs = tuple(from_fmpq(c) for c in self._p.coeffs())
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._p.degree()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    @property
    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return not self.is_zero() and self.leading_coefficient == 1

    def monic(self) -> "QPoly":
        if self.is_zero():
            raise DomainError("the zero polynomial has no monic associate")
        return QPoly(self._p / to_fmpq(self.leading_coefficient))

    def primitive_integer(self) -> flint.fmpz_poly:
        """Integer polynomial with content 1 and positive leading coefficient,
        having the same roots."""
        if self.is_zero():
            raise DomainError("zero polynomial")
        z = self._p.numer()
        c = z.content()
        z = flint.fmpz_poly([a // c for a in z.coeffs()])
        if z.leading_coefficient() < 0:
            z = -z
        return z

    # arithmetic
    def _wrap(self, other):
        if isinstance(other, QPoly):
            return other._p
        return flint.fmpq_poly([to_fmpq(other)])

    def __add__(self, other):
        return QPoly(self._p + self._wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return QPoly(self._p - self._wrap(other))

    def __rsub__(self, other):
        return QPoly(self._wrap(other) - self._p)

    def __neg__(self):
        return QPoly(-self._p)

    def __mul__(self, other):
        return QPoly(self._p * self._wrap(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return QPoly(self._p ** k)

    def __divmod__(self, other):
        d = self._wrap(other)
        if d.is_zero():
            raise DomainError("division by the zero polynomial")
        q, r = divmod(self._p, d)
        return QPoly(q), QPoly(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, value):
        if isinstance(value, QPoly):
            return QPoly(self._p(value._p))
        return from_fmpq(self._p(to_fmpq(value)))

    def derivative(self) -> "QPoly":
        return QPoly(self._p.derivative())

    def compose(self, other: "QPoly") -> "QPoly":
        return QPoly(self._p(other._p))

    def scale_variable(self, c) -> "QPoly":
        """p(c*x)."""
        return QPoly(self._p(flint.fmpq_poly([0, to_fmpq(c)])))

    def reflect(self) -> "QPoly":
        """p(-x)."""
        return self.scale_variable(-1)

    def reverse(self) -> "QPoly":
        """x^deg * p(1/x)."""
        return QPoly(list(reversed(self.coeffs)))

    def divides(self, other: "QPoly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self._p == other._p
        if isinstance(other, (int, Fraction)):
            return self._p == flint.fmpq_poly([to_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"QPoly({self.to_text()})"

    def __str__(self):
        return self.pretty()

    # serialization
    def to_text(self) -> str:
        return "[" + ", ".join(format_rational(c) for c in self.coeffs) + "]"

    @classmethod
    def from_text(cls, text: str) -> "QPoly":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ParseError(f"polynomial must be a bracketed coefficient list: {text!r}")
        inner = body[1:-1].strip()
        if not inner:
            return cls([])
        return cls([parse_rational(tok) for tok in inner.split(",")])

    def pretty(self, var: str = "x") -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = format_rational(a)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if a == 1 else f"{format_rational(a)}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _nonzero(*polys: QPoly):
    for p in polys:
        if p.is_zero():
            raise DomainError("zero polynomial not allowed here")


def poly_gcd(a: QPoly, b: QPoly) -> QPoly:
    """Monic greatest common divisor."""
    if a.is_zero() and b.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    g = QPoly(a.flint.gcd(b.flint))
    return g.monic()


def squarefree_part(p: QPoly) -> QPoly:
    _nonzero(p)
    if p.degree <= 0:
        return QPoly([1])
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def is_squarefree(p: QPoly) -> bool:
    _nonzero(p)
    if p.degree <= 0:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def resultant(a: QPoly, b: QPoly) -> Fraction:
    _nonzero(a, b)
    return from_fmpq(a.flint.resultant(b.flint))


def discriminant(p: QPoly) -> Fraction:
    _nonzero(p)
    return from_fmpq(p.flint.discriminant())


def _factor_key(item):
    f, e = item
    return (f.degree, f.coeffs, e)


@lru_cache(maxsize=4096)
def _factor_cached(p: QPoly):
    _, facs = p.flint.factor()
    out = []
    for f, e in facs:
        out.append((QPoly(f).monic(), int(e)))
    out.sort(key=_factor_key)
    return tuple(out)


def factor_q(p: QPoly) -> list:
    """Complete factorization over Q into monic irreducibles with multiplicities.

    The product of ``f**e`` over the result, times the leading coefficient of
    `p`, equals `p`.
    """
    if p.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    if p.degree == 0:
        return []
    return list(_factor_cached(p))


def is_irreducible(p: QPoly) -> bool:
    if p.degree < 1:
        return False
    facs = factor_q(p)
    return len(facs) == 1 and facs[0][1] == 1


def integer_lift(p: QPoly) -> tuple:
    """(c, q) with q = c**deg * p(x / c) monic integral, for monic p.

    If ``p(alpha) = 0`` then ``c * alpha`` is a root of `q`, an algebraic integer.
    """
    if not p.is_monic():
        raise DomainError("integer_lift expects a monic polynomial")
    n = p.degree
    c = 1
    for a in p.coeffs:
        c = c * a.denominator // gcd(c, a.denominator)
    coeffs = [a * c ** (n - k) for k, a in enumerate(p.coeffs)]
    return c, QPoly(coeffs)


_XY = flint.fmpq_mpoly_ctx.get(("x", "y"))


def _bivariate(p: QPoly, terms) -> flint.fmpq_mpoly:
    """Sum of c_k * terms(k) built in Q[x, y]."""
    acc = _XY.from_dict({})
    for k, c in enumerate(p.coeffs):
        if c:
            acc = acc + terms(k) * to_fmpq(c)
    return acc


def _to_univariate(m: flint.fmpq_mpoly) -> QPoly:
    d = {}
    for exps, c in m.to_dict().items():
        d[exps[0]] = c
    if not d:
        return QPoly([])
    return QPoly([d.get(k, 0) for k in range(max(d) + 1)])


def _y_poly(p: QPoly) -> flint.fmpq_mpoly:
    return _XY.from_dict({(0, k): to_fmpq(c) for k, c in enumerate(p.coeffs) if c})


def _power_sums(f: QPoly, count: int) -> list:
    """Power sums p_0..p_count of the roots of f, by Newton's identities."""
    c = f.monic().flint.coeffs()
    n = len(c) - 1
    a = [c[n - j] for j in range(n + 1)]  # x^n + a_1 x^(n-1) + ... + a_n
    p = [flint.fmpq(n)] + [flint.fmpq(0)] * count
    for k in range(1, count + 1):
        acc = -k * a[k] if k <= n else flint.fmpq(0)
        for j in range(1, min(k - 1, n) + 1):
            acc -= a[j] * p[k - j]
        p[k] = acc
    return p


def _from_power_sums(p: list) -> QPoly:
    """The monic polynomial of degree len(p) - 1 whose roots have power sums p."""
    N = len(p) - 1
    a = [flint.fmpq(1)] + [flint.fmpq(0)] * N
    for k in range(1, N + 1):
        acc = flint.fmpq(0)
        for j in range(1, k + 1):
            acc += a[k - j] * p[j]
        a[k] = -acc / k
    return QPoly(flint.fmpq_poly(a[::-1]))


def composed_sum(f: QPoly, g: QPoly) -> QPoly:
    """Monic polynomial whose roots are all sums alpha + beta (with multiplicity).

    Power sums of the sums come from an exponential-generating-function
    product: sum_k P_k t^k/k! = (sum_m p_m t^m/m!) (sum_m q_m t^m/m!).
    """
    _nonzero(f, g)
    if f.degree < 1 or g.degree < 1:
        raise DomainError("composed_sum needs nonconstant polynomials")
    N = f.degree * g.degree
    fact = [flint.fmpq(1)]
    for k in range(1, N + 1):
        fact.append(fact[-1] * k)
    pf, pg = _power_sums(f, N), _power_sums(g, N)
    A = flint.fmpq_poly([pf[k] / fact[k] for k in range(N + 1)])
    B = flint.fmpq_poly([pg[k] / fact[k] for k in range(N + 1)])
    C = A.mul_low(B, N + 1)
    return _from_power_sums([C[k] * fact[k] for k in range(N + 1)])


def composed_product(f: QPoly, g: QPoly) -> QPoly:
    """Monic polynomial whose roots are all products alpha * beta (with multiplicity)."""
    _nonzero(f, g)
    if f.degree < 1 or g.degree < 1:
        raise DomainError("composed_product needs nonconstant polynomials")
    N = f.degree * g.degree
    pf, pg = _power_sums(f, N), _power_sums(g, N)
    return _from_power_sums([u * v for u, v in zip(pf, pg)])


def composed_sum_resultant(f: QPoly, g: QPoly) -> QPoly:
    """``Res_y(f(x - y), g(y))``, monic; a second route to `composed_sum`."""
    _nonzero(f, g)
    x, y = _XY.gens()
    fxy = _bivariate(f, lambda k: (x - y) ** k)
    return _to_univariate(fxy.resultant(_y_poly(g), "y")).monic()


def composed_product_resultant(f: QPoly, g: QPoly) -> QPoly:
    """``Res_y(y^n f(x/y), g(y))``, monic, for g(0) != 0; a second route to `composed_product`."""
    _nonzero(f, g)
    if g.coeffs[0] == 0:
        raise DomainError("needs g(0) != 0")
    x, y = _XY.gens()
    n = f.degree
    fxy = _bivariate(f, lambda k: x ** k * y ** (n - k))
    return _to_univariate(fxy.resultant(_y_poly(g), "y")).monic()


def bivariate_norm(m: QPoly, coeffs: Sequence, shift=0) -> QPoly:
    """``Res_y(m(y), sum_k coeffs[k](y) * (x - shift*y)**k)`` as a polynomial in x.

    With ``coeffs = [-h, 1]`` and no shift this is the characteristic
    polynomial of ``h(gamma)`` for a root gamma of m (up to sign).
    """
    _nonzero(m)
    x, y = _XY.gens()
    lin = x - y * to_fmpq(shift) if shift else x
    acc = _XY.from_dict({})
    power = _XY.from_dict({(0, 0): 1})
    for c in coeffs:
        cp = c if isinstance(c, QPoly) else QPoly(c)
        if not cp.is_zero():
            acc = acc + _y_poly(cp) * power
        power = power * lin
    return _to_univariate(_y_poly(m).resultant(acc, "y"))
