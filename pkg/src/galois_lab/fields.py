"""Number fields inside the fixed algebraic closure.

A `NumberField` is always kept in primitive-element form ``Q(gamma)``;
elements are residues modulo the minimal polynomial ``m`` of gamma, exposed as
power-basis coordinates. Each field carries a table of algebraic numbers whose
coordinates are already known (the generator, the pieces it was built from,
everything inherited from the smaller field). That table is fixed when the
field is built and makes membership of those elements free.

Polynomials over a field are `FieldPoly` values. Factorization over K is done
by the norm method: shift until the norm ``Res_y(m(y), P(x - s*y, y))`` is
squarefree, factor the norm over Q, and pull every factor back with a gcd
over K.

Membership of beta in K has two independent deciding routes. The
interpolation route solves, for each admissible assignment of beta's
conjugates to gamma's conjugates, the Vandermonde system of the power-basis
coordinates with rigorous ball arithmetic, and recognises the rational
solution through a denominator bound. The factoring route reads beta off the
linear factors of its minimal polynomial over K. A third, one-sided route
looks for an integer relation with LLL and is used first in large fields;
everything ends in an exact check.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import factorial

import flint

from galois_lab.errors import DomainError, ParseError
from galois_lab.exact.boxes import Ball, eval_int_poly, poly_int_form
from galois_lab.exact.poly import (
    QPoly,
    bivariate_norm,
    discriminant,
    factor_q,
    integer_lift,
    is_squarefree,
)
from galois_lab.exact.roots import root_system
from galois_lab.qbar import AlgebraicNumber, qbar_key

_ONE = flint.fmpq_poly([1])
_ZERO = flint.fmpq_poly([])

# interpolation route is used while the number of balanced conjugate
# assignments stays below this
ASSIGNMENT_CAP = 2000


# -- residue arithmetic (raw fmpq_poly, reduced mod a monic m) ------------------
def _inv(a, m):
    g, s, _ = a.xgcd(m)
    if g.degree() != 0:
        raise DomainError("element is not invertible")
    return (s / g.coeffs()[0]) % m


def _trim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def _kmul(a, b, m):
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim([c % m for c in out])


def _kadd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else _ZERO) + (b[i] if i < len(b) else _ZERO) for i in range(n)])


def _kscale(a, c, m):
    return _trim([(x * c) % m for x in a])


def _kmonic(a, m):
    if not a:
        return a
    if a[-1] == _ONE:
        return a
    return _kscale(a, _inv(a[-1], m), m)


def _kdivmod(a, b, m):
    """Division by a monic b."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], _trim(a)
    q = [_ZERO] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c.is_zero():
            continue
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] = (a[k - db + j] - c * b[j]) % m
    return _trim(q), _trim(a[:db])


def _kgcd(a, b, m):
    a, b = _trim(a), _trim(b)
    while b:
        b = _kmonic(b, m)
        a, b = b, _kdivmod(a, b, m)[1]
    return _kmonic(a, m)


def _kderiv(a):
    return _trim([a[k] * k for k in range(1, len(a))])


def _kcompose_linear(g: QPoly, shift_res, m):
    """g(x + c) as a polynomial over K, with c the residue `shift_res`."""
    out = []
    lin = _trim([shift_res % m, _ONE])
    for coef in reversed(g.coeffs):
        out = _kadd(_kmul(out, lin, m), [flint.fmpq_poly([flint.fmpq(coef.numerator, coef.denominator)])])
    return out


# -- fields and elements ------------------------------------------------------
# Memo tables are shared by every presentation with the same generator: they
# only hold values that depend on the field itself.
_SHARED: dict = {}
_REGISTRY_LOCK = threading.Lock()


class NumberField:
    """``Q(generator)`` with power basis ``1, gamma, ..., gamma**(n-1)``."""

    __slots__ = ("_gen", "_m", "_known", "_memo", "_lock", "__weakref__")

    def __init__(self, generator: AlgebraicNumber, known: dict | None = None):
        if generator.is_rational():
            generator = AlgebraicNumber.rational(1)
        self._gen = generator
        self._m = generator.minpoly
        base = {generator: (0, 1) if self.degree > 1 else (1,)}
        if known:
            base.update(known)
        for k, v in base.items():
            base[k] = tuple(Fraction(c) for c in v) + (Fraction(0),) * (self.degree - len(v))
        self._known = base
        with _REGISTRY_LOCK:
            self._memo, self._lock = _SHARED.setdefault(generator, ({}, threading.RLock()))

    @classmethod
    def rationals(cls) -> "NumberField":
        return _Q

    @classmethod
    def generated_by(cls, *elements: AlgebraicNumber) -> "NumberField":
        K = _Q
        for e in elements:
            K = tower_extend(K, e)
        return K

    @property
    def generator(self) -> AlgebraicNumber:
        return self._gen

    @property
    def minpoly(self) -> QPoly:
        return self._m

    @property
    def degree(self) -> int:
        return self._m.degree

    def is_rationals(self) -> bool:
        return self.degree == 1

    def known_elements(self) -> dict:
        """Algebraic numbers with recorded coordinates (read-only view)."""
        return dict(self._known)

    def element(self, coords) -> "FieldElement":
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise DomainError("too many coordinates for this field")
        return FieldElement(self, QPoly(coords))

    def from_poly(self, h: QPoly) -> "FieldElement":
        return FieldElement(self, h % self._m)

    def rational(self, q) -> "FieldElement":
        return FieldElement(self, QPoly([Fraction(q)]))

    def one(self) -> "FieldElement":
        return self.rational(1)

    def zero(self) -> "FieldElement":
        return self.rational(0)

    def gen(self) -> "FieldElement":
        return self.from_poly(QPoly.x()) if self.degree > 1 else self.rational(1)

    def contains(self, beta: AlgebraicNumber) -> bool:
        return membership(beta, self) is not None

    def conjugate_generators(self) -> list:
        return self._gen.rational_conjugates()

    def same_field(self, other: "NumberField") -> bool:
        """Set equality inside the algebraic closure."""
        return self.degree == other.degree and other.contains(self._gen)

    def __eq__(self, other):
        if not isinstance(other, NumberField):
            return NotImplemented
        return self._gen == other._gen

    def __hash__(self):
        return hash(("field", self._gen))

    def __repr__(self):
        if self.is_rationals():
            return "NumberField(Q)"
        return f"NumberField(degree {self.degree}, generator root {self._gen.position} of {self._m})"

    def to_dict(self) -> dict:
        return self._gen.to_dict()

    @classmethod
    def from_dict(cls, d) -> "NumberField":
        return cls(AlgebraicNumber.from_dict(d))

    # memo helpers (values computed here are pure functions of the field)
    def _memo_get(self, key, compute):
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        val = compute()
        with self._lock:
            return self._memo.setdefault(key, val)

    def _record(self, beta: AlgebraicNumber, coords):
        with self._lock:
            self._memo.setdefault(("member", beta), coords)


_Q = NumberField(AlgebraicNumber.rational(1))


class FieldElement:
    """An element of a number field, held as a residue modulo the generator's minpoly."""

    __slots__ = ("owner", "_h")

    def __init__(self, owner: NumberField, h: QPoly):
        self.owner = owner
        self._h = h

    @property
    def poly(self) -> QPoly:
        return self._h

    @property
    def coordinates(self) -> tuple:
        c = list(self._h.coeffs)
        return tuple(c) + (Fraction(0),) * (self.owner.degree - len(c))

    def is_rational(self) -> bool:
        return self._h.degree <= 0

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise DomainError("element is not rational")
        return self._h.coeffs[0] if self._h.degree == 0 else Fraction(0)

    def _other(self, o) -> QPoly:
        if isinstance(o, FieldElement):
            if o.owner != self.owner:
                raise DomainError("elements of different fields")
            return o._h
        return QPoly([Fraction(o)])

    def __add__(self, o):
        return FieldElement(self.owner, self._h + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElement(self.owner, self._h - self._other(o))

    def __rsub__(self, o):
        return FieldElement(self.owner, self._other(o) - self._h)

    def __neg__(self):
        return FieldElement(self.owner, -self._h)

    def __mul__(self, o):
        return FieldElement(self.owner, (self._h * self._other(o)) % self.owner.minpoly)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self._h.is_zero():
            raise DomainError("zero has no inverse")
        return FieldElement(self.owner, QPoly(_inv(self._h.flint, self.owner.minpoly.flint)))

    def __truediv__(self, o):
        other = o if isinstance(o, FieldElement) else self.owner.rational(o)
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.owner.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.owner == o.owner and self._h == o._h
        if isinstance(o, (int, Fraction)):
            return self._h == QPoly([Fraction(o)])
        return NotImplemented

    def __hash__(self):
        return hash((self.owner, self._h))

    def __repr__(self):
        return f"FieldElement({self._h.pretty('g')})"

    def ball(self, bits: int) -> Ball:
        return evaluate_at(self._h, self.owner.generator, bits)

    def value(self) -> AlgebraicNumber:
        """The algebraic number this element denotes."""
        return element_value(self.owner.generator, self._h)

    def charpoly(self) -> QPoly:
        return bivariate_norm(self.owner.minpoly, [-self._h, QPoly([1])]).monic()

    def minpoly(self) -> QPoly:
        return self.value().minpoly


def evaluate_at(h: QPoly, x: AlgebraicNumber, bits: int) -> Ball:
    """Enclosure of h(x) with radius roughly 2**-bits."""
    if h.degree <= 0:
        return Ball.from_fraction(h.coeffs[0] if h.degree == 0 else 0, bits + 1)
    coeffs, den = poly_int_form(h)
    mag = int(x.ball(4).abs_upper()) + 1
    extra = h.degree * mag.bit_length() + max(abs(c) for c in coeffs).bit_length() + 8
    v = eval_int_poly(coeffs, x.ball(bits + extra))
    return v if den == 1 else v.div_int(den)


def element_value(gamma: AlgebraicNumber, h: QPoly) -> AlgebraicNumber:
    if h.degree <= 0:
        return AlgebraicNumber.rational(h.coeffs[0] if h.degree == 0 else 0)
    cp = bivariate_norm(gamma.minpoly, [-h, QPoly([1])])
    facs = [f for f, _ in factor_q(cp)]
    from galois_lab.exact.roots import identify_root

    if len(facs) == 1 and facs[0].degree == 1:
        return AlgebraicNumber(facs[0], 0)
    s, pos = identify_root(facs, lambda bits: evaluate_at(h, gamma, bits))
    return AlgebraicNumber(facs[s], pos)


def identify_value(h: QPoly, gamma: AlgebraicNumber, target_poly: QPoly) -> int:
    """Canonical root position of h(gamma) among the roots of `target_poly`,
    given that h(gamma) is known to be one of them."""
    if target_poly.degree == 1:
        return 0
    return root_system(target_poly).locate_position(lambda bits: evaluate_at(h, gamma, bits))


# -- polynomials over a field -------------------------------------------------
class FieldPoly:
    """Polynomial with coefficients in a number field, lowest degree first."""

    __slots__ = ("field", "_c")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        out = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.owner != field:
                    raise DomainError("coefficient from a different field")
                out.append(c.poly.flint)
            elif isinstance(c, QPoly):
                out.append((c % field.minpoly).flint)
            else:
                q = Fraction(c)
                out.append(flint.fmpq_poly([flint.fmpq(q.numerator, q.denominator)]))
        self._c = _trim(out)

    @classmethod
    def _raw(cls, field, raw):
        p = cls.__new__(cls)
        p.field = field
        p._c = _trim(raw)
        return p

    @classmethod
    def from_qpoly(cls, field: NumberField, p: QPoly) -> "FieldPoly":
        return cls(field, p.coeffs)

    @property
    def coefficients(self) -> list:
        return [FieldElement(self.field, QPoly(c)) for c in self._c]

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def __mul__(self, other: "FieldPoly") -> "FieldPoly":
        return FieldPoly._raw(self.field, _kmul(self._c, other._c, self.field.minpoly.flint))

    def __add__(self, other: "FieldPoly") -> "FieldPoly":
        return FieldPoly._raw(self.field, _kadd(self._c, other._c))

    def __pow__(self, k: int) -> "FieldPoly":
        out = FieldPoly(self.field, [1])
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: FieldElement) -> "FieldPoly":
        return FieldPoly._raw(self.field, _kscale(self._c, c.poly.flint, self.field.minpoly.flint))

    @property
    def leading_coefficient(self) -> FieldElement:
        return FieldElement(self.field, QPoly(self._c[-1]))

    def monic(self) -> "FieldPoly":
        return FieldPoly._raw(self.field, _kmonic(self._c, self.field.minpoly.flint))

    def __eq__(self, other):
        if not isinstance(other, FieldPoly):
            return NotImplemented
        return self.field == other.field and self._c == other._c

    def __hash__(self):
        return hash((self.field, tuple(QPoly(c) for c in self._c)))

    def ball_eval(self, x: AlgebraicNumber, bits: int) -> Ball:
        """Enclosure of this polynomial evaluated at x."""
        g = self.field.generator
        xb = x.ball(bits + 8 * (self.degree + 1))
        acc = Ball(0, 0, 0, xb.prec)
        for c in reversed(self._c):
            acc = acc * xb + evaluate_at(QPoly(c), g, bits + 8 * (self.degree + 1))
        return acc

    def rational_poly(self) -> QPoly | None:
        if all(c.degree() <= 0 for c in self._c):
            return QPoly([c.coeffs()[0] if c.degree() == 0 else 0 for c in self._c])
        return None

    def __repr__(self):
        return "FieldPoly[" + ", ".join(QPoly(c).pretty("g") for c in self._c) + "]"

    def to_list(self) -> list:
        return [list(FieldElement(self.field, QPoly(c)).coordinates) for c in self._c]


def _norm(P: FieldPoly, s: int) -> QPoly:
    return bivariate_norm(P.field.minpoly, [QPoly(c) for c in P._c], s)


def _squarefree_decomposition(P: FieldPoly) -> list:
    """Yun's algorithm over K: [(squarefree monic factor, multiplicity)]."""
    m = P.field.minpoly.flint
    a = _kmonic(P._c, m)
    out = []
    da = _kderiv(a)
    c = _kgcd(a, da, m)
    w = _kdivmod(a, c, m)[0]
    y = _kdivmod(da, c, m)[0]
    k = 1
    while len(w) > 1:
        z = _kadd(y, _kscale(_kderiv(w), -_ONE, m))
        g = _kgcd(w, z, m)
        if len(g) > 1:
            out.append((g, k))
        w = _kdivmod(w, g, m)[0]
        y = _kdivmod(z, g, m)[0]
        k += 1
    return out


def _factor_squarefree(P, field) -> list:
    """Irreducible monic factors of a monic squarefree polynomial over K."""
    m = field.minpoly.flint
    if len(P) <= 2:
        return [P]
    if field.degree == 1:
        q = QPoly([c.coeffs()[0] if c.degree() == 0 else 0 for c in P])
        return [[flint.fmpq_poly([c]) for c in f.flint.coeffs()] for f, _ in factor_q(q)]
    fp = FieldPoly._raw(field, P)
    for s in _shifts():
        N = _norm(fp, s)
        if is_squarefree(N):
            break
    factors = []
    shift_res = flint.fmpq_poly([0, s])  # s * gamma
    for g, _ in factor_q(N):
        gk = _kcompose_linear(g, shift_res, m)
        f = _kgcd(P, gk, m)
        if len(f) > 1:
            factors.append(f)
    return factors


def _shifts():
    s = 0
    while True:
        yield s
        s = -s if s > 0 else -s + 1


def factor_over(p, K: NumberField) -> list:
    """Factor a polynomial over K into monic irreducibles with multiplicities.

    `p` may be a FieldPoly, a QPoly, or a list of FieldElements/rationals.
    The leading coefficient of p times the product of ``f**e`` equals p.
    """
    P = _as_fieldpoly(p, K)
    if P.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    if P.degree == 0:
        return []
    out = []
    for sq, mult in _squarefree_decomposition(P):
        for f in _factor_squarefree(sq, K):
            out.append((FieldPoly._raw(K, f), mult))
    out.sort(key=lambda fe: (fe[0].degree, repr(fe[0]), fe[1]))
    return out


def _as_fieldpoly(p, K) -> FieldPoly:
    if isinstance(p, FieldPoly):
        if p.field != K:
            raise DomainError("polynomial lives over a different field")
        return p
    if isinstance(p, QPoly):
        return FieldPoly.from_qpoly(K, p)
    return FieldPoly(K, p)


def is_irreducible_over(p, K: NumberField) -> bool:
    facs = factor_over(p, K)
    return len(facs) == 1 and facs[0][1] == 1


# -- membership -----------------------------------------------------------------
def _balanced_assignments(n: int, r: int, first: int):
    """Assignments (j_1 = first, j_2, ..., j_n) hitting every index n/r times, lexicographic."""
    share = n // r
    counts = [share] * r
    counts[first] -= 1
    cur = [first]

    def rec():
        if len(cur) == n:
            yield tuple(cur)
            return
        for j in range(r):
            if counts[j]:
                counts[j] -= 1
                cur.append(j)
                yield from rec()
                cur.pop()
                counts[j] += 1

    yield from rec()


def _assignment_count(n: int, r: int) -> int:
    share = n // r
    # multinomial with one slot already placed
    return factorial(n - 1) // (factorial(share) ** (r - 1) * factorial(share - 1))


def _lagrange_rows(alphas: list) -> list:
    """Rows k: coefficients (lowest first) of the Lagrange basis polynomial L_k."""
    n = len(alphas)
    p = alphas[0].prec
    one = Ball.exact_int(1, p)
    rows = []
    for k in range(n):
        num = [one]
        den = one
        for l in range(n):
            if l == k:
                continue
            # num *= (x - alpha_l)
            nxt = [Ball(0, 0, 0, p)] * (len(num) + 1)
            for i, c in enumerate(num):
                nxt[i + 1] = nxt[i + 1] + c
                nxt[i] = nxt[i] - c * alphas[l]
            num = nxt
            den = den * (alphas[k] - alphas[l])
        inv = den.inverse()
        rows.append([c * inv for c in num])
    return rows


def _integer_status(b: Ball):
    """('reject', None) if b holds no real integer, ('accept', k) if b isolates integer k,
    ('unknown', None) otherwise."""
    one = 1 << b.prec
    if abs(b.im) > b.rad:
        return "reject", None
    near = (b.re + one // 2) >> b.prec
    dist = abs(b.re - (near << b.prec))
    if dist > b.rad:
        return "reject", None
    if 4 * b.rad < one:
        return "accept", near
    return "unknown", None


def _denominator_bound(gamma: AlgebraicNumber, beta: AlgebraicNumber) -> int:
    _, q = integer_lift(gamma.minpoly)
    e, _ = integer_lift(beta.minpoly)
    d = discriminant(q) if q.degree > 1 else Fraction(1)
    return e * abs(int(d))


def _exact_check(h: QPoly, K: NumberField, beta: AlgebraicNumber) -> bool:
    if not (beta.minpoly.compose(h) % K.minpoly).is_zero():
        return False
    return identify_value(h, K.generator, beta.minpoly) == beta.position


def membership_vandermonde(beta: AlgebraicNumber, K: NumberField):
    """Interpolation route; returns coordinates or None."""
    n, r = K.degree, beta.degree
    if n % r:
        return None
    if n == 1:
        return (beta.as_rational(),) if r == 1 else None
    if r == 1:
        return (beta.as_rational(),) + (Fraction(0),) * (n - 1)
    gamma = K.generator
    alphas = [gamma] + [a for a in gamma.rational_conjugates() if a != gamma]
    betas = beta.rational_conjugates()
    D = _denominator_bound(gamma, beta)
    base = 64 + D.bit_length() + 4 * n
    rows_at = {}
    for assignment in _balanced_assignments(n, r, beta.position):
        prec = base
        while True:
            if prec not in rows_at:
                rows_at[prec] = (
                    _lagrange_rows([a.ball(prec) for a in alphas]),
                    [b.ball(prec) for b in betas],
                )
            rows, balls = rows_at[prec]
            bb = [balls[j] for j in assignment]
            status = []
            for i in range(n):
                acc = Ball(0, 0, 0, rows[0][0].prec)
                for k in range(n):
                    acc = acc + rows[k][i] * bb[k]
                status.append(_integer_status(acc.mul_int(D)))
            if any(s == "reject" for s, _ in status):
                break
            if all(s == "accept" for s, _ in status):
                h = QPoly([Fraction(v, D) for _, v in status])
                if _exact_check(h, K, beta):
                    return tuple(h.coeffs) + (Fraction(0),) * (n - len(h.coeffs))
                break
            prec *= 2
    return None


def membership_lattice(beta: AlgebraicNumber, K: NumberField, max_bits: int = 1 << 14):
    """Integer-relation route: coordinates if found and verified, else None.

    The integer relations among 1, gamma, ..., gamma^(n-1), beta form a lattice
    of rank at most one, so a short vector of the reduced basis at enough
    precision is the relation when beta lies in K. Candidates are checked
    exactly; None is not a proof of non-membership.
    """
    n = K.degree
    if n % beta.degree:
        return None
    if n == 1 or beta.degree == 1:
        return membership_vandermonde(beta, K)
    gamma = K.generator
    bits = 64 * n
    while bits <= max_bits:
        g = gamma.ball(bits + 4 * n)
        b = beta.ball(bits + 4 * n)
        powers = [Ball.exact_int(1, g.prec)]
        for _ in range(n - 1):
            powers.append(powers[-1] * g)
        vals = [v.at(bits) for v in powers + [b.at(g.prec)]]
        rows = []
        for i, v in enumerate(vals):
            rows.append([int(i == j) for j in range(n + 1)] + [v.re, v.im])
        red = flint.fmpz_mat(rows).lll()
        for r in range(min(3, n + 1)):
            rel = [int(red[r, j]) for j in range(n + 1)]
            if rel[n] == 0:
                continue
            h = QPoly([Fraction(-c, rel[n]) for c in rel[:n]])
            if _exact_check(h, K, beta):
                return tuple(h.coeffs) + (Fraction(0),) * (n - len(h.coeffs))
        bits *= 2
    return None


def roots_in_field(f: QPoly, K: NumberField) -> dict:
    """All roots of an irreducible f that lie in K, mapped to their coordinates."""
    f = f.monic()

    def compute():
        found = {}
        if K.degree % f.degree:
            return found
        if f.degree == 1:
            found[AlgebraicNumber(f, 0)] = FieldElement(K, QPoly([-f.coeffs[0]])).coordinates
            return found
        P = [flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator)]) for c in f.coeffs]
        for fac in _factor_squarefree(P, K):
            if len(fac) == 2:
                root = QPoly(-fac[0])
                pos = identify_value(root, K.generator, f)
                found[AlgebraicNumber(f, pos)] = FieldElement(K, root).coordinates
        return found

    return K._memo_get(("roots", f), compute)


def membership_factor(beta: AlgebraicNumber, K: NumberField):
    """Factoring route; returns coordinates or None."""
    return roots_in_field(beta.minpoly, K).get(beta)


def membership(beta: AlgebraicNumber, K: NumberField, method: str = "auto"):
    """Power-basis coordinates of beta as a FieldElement of K, or None."""
    if beta in K._known and method == "auto":
        return FieldElement(K, QPoly(list(K._known[beta])))
    if K.degree % beta.degree:
        return None
    if beta.is_rational():
        return K.rational(beta.as_rational())
    cached = K._memo.get(("member", beta), False)
    if cached is not False and method == "auto":
        return None if cached is None else FieldElement(K, QPoly(list(cached)))
    if method == "vandermonde" or (
        method == "auto" and _assignment_count(K.degree, beta.degree) <= ASSIGNMENT_CAP
    ):
        coords = membership_vandermonde(beta, K)
    elif method == "lattice":
        coords = membership_lattice(beta, K)
    elif method == "auto":
        coords = membership_lattice(beta, K, max_bits=256 * K.degree)
        if coords is None:
            coords = membership_factor(beta, K)
    elif method == "factor":
        coords = membership_factor(beta, K)
    else:
        raise DomainError(f"unknown membership method {method!r}")
    K._record(beta, coords)
    return None if coords is None else FieldElement(K, QPoly(list(coords)))


# -- conjugates, extensions, closures ------------------------------------------
def _factor_through(x: AlgebraicNumber, K: NumberField) -> FieldPoly:
    """The irreducible factor over K of x's minimal polynomial that vanishes at x."""

    def compute():
        facs = [f for f, _ in factor_over(x.minpoly, K)]
        if len(facs) == 1:
            return facs[0]
        bits = 16
        alive = facs
        while len(alive) > 1:
            alive = [f for f in alive if f.ball_eval(x, bits).contains_zero()]
            bits *= 2
        if not alive:
            raise RuntimeError("no factor vanishes at the element")
        return alive[0]

    return K._memo_get(("through", x), compute)


def relative_minpoly(x: AlgebraicNumber, K: NumberField) -> FieldPoly:
    return _factor_through(x, K)


def relative_degree(x: AlgebraicNumber, K: NumberField) -> int:
    """[K(x) : K]."""
    if membership(x, K) is not None:
        return 1
    return _factor_through(x, K).degree


def conjugates_over(x: AlgebraicNumber, K: NumberField) -> set:
    return set(conjugate_list(x, K))


def conjugate_list(x: AlgebraicNumber, K: NumberField) -> list:
    """Conjugates of x over K in canonical qbar order."""
    if membership(x, K) is not None:
        return [x]
    f = _factor_through(x, K)
    cands = x.rational_conjugates()
    if f.degree == len(cands):
        return sorted(cands, key=qbar_key)
    bits = 16
    alive = cands
    while len(alive) > f.degree:
        alive = [c for c in alive if f.ball_eval(c, bits).contains_zero()]
        bits *= 2
    return sorted(alive, key=qbar_key)


def _express_over(theta: AlgebraicNumber, F_minpoly: QPoly, gamma: AlgebraicNumber, beta: AlgebraicNumber, k: int):
    """Residue h with beta = h(theta), where theta = gamma + k*beta generates Q(gamma, beta)."""
    m = F_minpoly.flint
    th = flint.fmpq_poly([0, 1])
    A = [flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator)]) for c in beta.minpoly.coeffs]
    lin = _trim([th, flint.fmpq_poly([-k])])  # theta - k X
    B = []
    for c in reversed(gamma.minpoly.coeffs):
        B = _kadd(_kmul(B, lin, m), [flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator)])])
        if len(B) >= len(A):
            B = _kdivmod(B, A, m)[1]
    g = _kgcd(A, B, m)
    if len(g) != 2:
        raise RuntimeError("generator does not separate the two elements")
    return QPoly(-g[0])


def primitive_element(K: NumberField, beta: AlgebraicNumber) -> NumberField:
    """A single-generator presentation of K(beta)."""
    if membership(beta, K) is not None:
        return K
    if K.is_rationals():
        return NumberField(beta)
    d = relative_degree(beta, K)
    target = K.degree * d
    gamma = K.generator
    k = 1
    while True:
        theta = gamma + beta * k
        if theta.degree == target:
            break
        k += 1
    m = theta.minpoly
    hb = _express_over(theta, m, gamma, beta, k)
    hg = (QPoly.x() - hb * k) % m
    known = {beta: hb.coeffs, gamma: hg.coeffs}
    for a, coords in K._known.items():
        if a not in known:
            known[a] = (QPoly(list(coords)).compose(hg) % m).coeffs
    return NumberField(theta, known)


def tower_extend(K: NumberField, alpha: AlgebraicNumber) -> NumberField:
    return primitive_element(K, alpha)


def automorphism_polys(K: NumberField):
    """For Galois K: list h_k with h_k(gamma) the k-th conjugate of gamma. None otherwise.

    Only a few h_k come from a membership test; the rest are found by closing
    under composition, s_i(s_j(gamma)) = h_j(h_i(gamma)).
    """

    def compute():
        m = K.minpoly
        n = K.degree
        conj = K.generator.rational_conjugates()
        if n == 1:
            return [QPoly([1])]
        found = {K.generator.position: QPoly.x()}
        gens = []
        while len(found) < n:
            k = next(i for i in range(n) if i not in found)
            h = membership(conj[k], K)
            if h is None:
                return None
            gens.append(k)
            found[k] = h.poly
            queue = list(found)
            while queue:
                i = queue.pop()
                for j in gens:
                    pos = identify_value(found[j], conj[i], m)
                    if pos not in found:
                        found[pos] = found[j].compose(found[i]) % m
                        queue.append(pos)
        return [found[k] for k in range(n)]

    return K._memo_get(("automorphisms",), compute)


def is_galois(K: NumberField) -> bool:
    if K.degree <= 2:
        return True
    return automorphism_polys(K) is not None


def galois_closure(K: NumberField) -> NumberField:
    if is_galois(K):
        return K
    F = K
    for rho in K.generator.rational_conjugates():
        if membership(rho, F) is None:
            F = tower_extend(F, rho)
    return F


def closure_adjoining(L: NumberField, x: AlgebraicNumber) -> NumberField:
    """Galois closure of L(x) for L Galois over Q: adjoin x and its conjugates."""
    F = L
    for rho in sorted(x.rational_conjugates(), key=qbar_key):
        if membership(rho, F) is None:
            F = tower_extend(F, rho)
    return F


def compositum(K: NumberField, L: NumberField) -> NumberField:
    if L.degree > K.degree:
        K, L = L, K
    F = tower_extend(K, L.generator)
    return F


def parse_field(text: str) -> NumberField:
    """``Q``, ``Q(sqrt(n))``, ``Q(a, b, ...)`` or a ``{minpoly, box}`` record."""
    from galois_lab.expressions import parse_algebraic as parse_number

    t = text.strip().replace(" ", "")
    if t in ("Q", "QQ"):
        return _Q
    if t.startswith("{"):
        from galois_lab.qbar import parse_record_text

        return NumberField.from_dict(parse_record_text(t))
    if t.startswith("Q(") and t.endswith(")"):
        inner = t[2:-1]
        parts, depth, cur = [], 0, ""
        for ch in inner:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur += ch
        parts.append(cur)
        return NumberField.generated_by(*[parse_number(p) for p in parts if p])
    raise ParseError(f"cannot parse field {text!r}")
