"""Certified complex root isolation for squarefree rational polynomials.

Approximations come from FLINT's root finder and are polished by Newton
steps in fixed-point integer arithmetic. They are never trusted: every level
of boxes is certified with Smith's theorem (the disks ``|z - z_i| <= n |w_i|``,
``w_i`` the Weierstrass correction, contain all roots, and each isolated disk
contains exactly one), computed with exact integers. The proposals are made
conjugation-symmetric, so real roots come out with boxes symmetric about the
real axis and conjugate pairs with mirrored boxes; both facts are then exact.

Roots are reported in the canonical order: lexicographic by (real part,
imaginary part).
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from math import isqrt

import flint

from galois_lab.errors import DomainError
from galois_lab.exact.boxes import Ball, Box, eval_int_poly
from galois_lab.exact.poly import QPoly, composed_sum, is_squarefree, squarefree_part

_FLINT_LOCK = threading.Lock()

# below this precision an overlap of real intervals is settled by refining;
# above it the exact real-part equality test runs
_TIE_BITS = 200


class _Level:
    __slots__ = ("prec", "centers", "radii")

    def __init__(self, prec, centers, radii):
        self.prec = prec
        self.centers = centers
        self.radii = radii

    @property
    def max_rad_bits(self):
        """log2 of the largest radius, in absolute terms."""
        r = max(self.radii)
        return r.bit_length() - self.prec

    def ball(self, k):
        a, b = self.centers[k]
        return Ball(a, b, self.radii[k], self.prec)

    def box_overlaps(self, k, ball: Ball) -> bool:
        ball = ball.at(self.prec) if ball.prec != self.prec else ball
        a, b = self.centers[k]
        R = self.radii[k]
        return not (
            a + R < ball.re - ball.rad
            or ball.re + ball.rad < a - R
            or b + R < ball.im - ball.rad
            or ball.im + ball.rad < b - R
        )


def _to_scale(arb_value, P):
    m, e = arb_value.mid().man_exp()
    m, e = int(m), int(e)
    s = e + P
    return m << s if s >= 0 else m >> -s


def _proposals(zpoly, P):
    with _FLINT_LOCK:
        old = flint.ctx.prec
        flint.ctx.prec = max(53, P)
        try:
            found = zpoly.complex_roots()
        finally:
            flint.ctx.prec = old
    reals, uppers = [], []
    for c, mult in found:
        if mult != 1:
            raise DomainError("polynomial is not squarefree")
        im = c.imag
        if im.is_exact() and im.mid() == 0:
            reals.append((_to_scale(c.real, P), 0))
        else:
            b = _to_scale(im, P)
            if b > 0:
                uppers.append((_to_scale(c.real, P), b))
    return reals, uppers


def _horner_fixed(coeffs, a, b, P):
    re, im = coeffs[-1] << P, 0
    for c in reversed(coeffs[:-1]):
        re, im = (re * a - im * b) >> P, (re * b + im * a) >> P
        re += c << P
    return re, im


def _newton(coeffs, dcoeffs, a, b, P, iters):
    for _ in range(iters):
        pr, pi = _horner_fixed(coeffs, a, b, P)
        dr, di = _horner_fixed(dcoeffs, a, b, P)
        den = dr * dr + di * di
        if den == 0:
            break
        da = ((pr * dr + pi * di) << P) // den
        db = ((pi * dr - pr * di) << P) // den if b != 0 else 0
        a -= da
        b -= db
        if abs(da) <= 1 and abs(db) <= 1:
            break
    return a, b


def _certify(coeffs, centers, P):
    """Smith radii (scale 2**-P) for the given centers, or None if the boxes
    they induce are not pairwise disjoint."""
    n = len(centers)
    lc = abs(coeffs[-1])
    shift = 2 * P * (n - 1)
    radii = []
    for i, (a, b) in enumerate(centers):
        v = eval_int_poly(coeffs, Ball(a, b, 0, P))
        M = isqrt(v.re * v.re + v.im * v.im) + 1 + v.rad
        prod = 1
        for j, (c, d) in enumerate(centers):
            if j != i:
                dd = (a - c) ** 2 + (b - d) ** 2
                if dd == 0:
                    return None
                prod *= dd
        num = n * n * M * M << shift
        den = lc * lc * prod
        radii.append(isqrt(-(-num // den)) + 2)
    order = sorted(range(n), key=lambda k: centers[k][0] - radii[k])
    # sweep over real intervals; only overlapping ones need the imaginary test
    for pos, i in enumerate(order):
        ai, bi = centers[i]
        Ri = radii[i]
        for j in order[pos + 1:]:
            aj, bj = centers[j]
            Rj = radii[j]
            if aj - Rj > ai + Ri:
                break
            if abs(bi - bj) <= Ri + Rj:
                return None
    return radii


class RootSystem:
    """All complex roots of one squarefree polynomial, refinable on demand.

    Internally roots carry stable *labels* (their position in the first
    certified level); `order` maps canonical positions to labels.
    """

    def __init__(self, poly: QPoly):
        if poly.is_zero() or poly.degree < 1:
            raise DomainError("need a polynomial of positive degree")
        if not is_squarefree(poly):
            raise DomainError("root isolation needs a squarefree polynomial")
        self.poly = poly.monic()
        z = self.poly.primitive_integer()
        self._coeffs = [int(c) for c in z.coeffs()]
        self._dcoeffs = [k * c for k, c in enumerate(self._coeffs)][1:]
        self.degree = len(self._coeffs) - 1
        self._lock = threading.RLock()
        self._levels = [self._initial_level()]
        base = self._levels[0]
        self._real = [b == 0 for (_, b) in base.centers]
        index = {c: k for k, c in enumerate(base.centers)}
        self._conj = [index[(a, -b)] for (a, b) in base.centers]
        self._order = None
        self._position = None
        self._tie_cache = {}
        self._sums = None

    # -- certification -------------------------------------------------
    def _initial_level(self):
        n = self.degree
        P = 64 + 2 * n.bit_length()
        fetch = 53
        while True:
            reals, uppers = _proposals(flint.fmpz_poly(self._coeffs), fetch)
            if len(reals) + 2 * len(uppers) == n:
                pts = [(a << (P - fetch) if P >= fetch else a >> (fetch - P), 0) for a, _ in reals]
                ups = [
                    (a << (P - fetch) if P >= fetch else a >> (fetch - P), b << (P - fetch) if P >= fetch else b >> (fetch - P))
                    for a, b in uppers
                ]
                for attempt in range(4):
                    iters = 8 + 2 * P.bit_length()
                    pts = [_newton(self._coeffs, self._dcoeffs, a, 0, P, iters) for a, _ in pts]
                    ups = [_newton(self._coeffs, self._dcoeffs, a, b, P, iters) for a, b in ups]
                    if all(b > 0 for _, b in ups):
                        centers = pts + [c for a, b in ups for c in ((a, b), (a, -b))]
                        radii = _certify(self._coeffs, centers, P)
                        if radii is not None:
                            order = sorted(range(n), key=lambda k: centers[k])
                            return _Level(P, [centers[k] for k in order], [radii[k] for k in order])
                    pts = [(a << P, b) for a, b in pts]
                    ups = [(a << P, b << P) for a, b in ups]
                    P *= 2
            fetch *= 2
            P = max(P, 2 * fetch)
            if fetch > 1 << 16:
                raise RuntimeError("root isolation failed to converge")

    def _refine_to(self, bits):
        """Ensure a level whose radii are all at most 2**-bits exists."""
        with self._lock:
            last = self._levels[-1]
            if last.max_rad_bits <= -bits:
                return last
            P = max(2 * last.prec, bits + 8 + 2 * self.degree.bit_length())
            centers = last.centers
            while True:
                s = P - last.prec
                start = [(a << s, b << s) for a, b in centers]
                iters = 8 + 2 * P.bit_length()
                new = []
                for k, (a, b) in enumerate(start):
                    if self._real[k]:
                        new.append(_newton(self._coeffs, self._dcoeffs, a, 0, P, iters))
                    else:
                        new.append(None)
                for k, (a, b) in enumerate(start):
                    if new[k] is None and b > 0:
                        ca, cb = _newton(self._coeffs, self._dcoeffs, a, b, P, iters)
                        new[k] = (ca, cb)
                        new[self._conj[k]] = (ca, -cb)
                radii = _certify(self._coeffs, new, P) if all(c is not None for c in new) else None
                if radii is not None and self._nested(last, new, radii, P):
                    lv = _Level(P, new, radii)
                    self._levels.append(lv)
                    if lv.max_rad_bits <= -bits:
                        return lv
                    last = lv
                    centers = new
                    P = max(2 * P, bits + 8)
                else:
                    P *= 2

    @staticmethod
    def _nested(old, centers, radii, P):
        s = P - old.prec
        for (a, b), R, (oa, ob), oR in zip(centers, radii, old.centers, old.radii):
            oa, ob, oR = oa << s, ob << s, oR << s
            if not (oa - oR < a - R and a + R < oa + oR and ob - oR < b - R and b + R < ob + oR):
                return False
        return True

    def level(self, bits: int) -> _Level:
        for lv in self._levels:
            if lv.max_rad_bits <= -bits:
                return lv
        return self._refine_to(bits)

    # -- canonical order -------------------------------------------------
    @property
    def order(self) -> list:
        if self._order is None:
            with self._lock:
                if self._order is None:
                    labels = sorted(range(self.degree), key=cmp_to_key(self._compare))
                    self._position = {lab: pos for pos, lab in enumerate(labels)}
                    self._order = labels
        return self._order

    def position(self, label: int) -> int:
        self.order
        return self._position[label]

    def _compare(self, i, j):
        if i == j:
            return 0
        bits = 32
        tie = None
        while True:
            lv = self.level(bits)
            (ai, bi), (aj, bj) = lv.centers[i], lv.centers[j]
            Ri, Rj = lv.radii[i], lv.radii[j]
            if tie is None:
                if ai + Ri < aj - Rj:
                    return -1
                if aj + Rj < ai - Ri:
                    return 1
                if self._conj[i] == j:
                    return -1 if bi < bj else 1
                if bits >= _TIE_BITS:
                    tie = self._real_parts_equal(i, j)
                    if not tie:
                        tie = False
                        # unequal real parts: keep refining until they separate
                        bits *= 2
                        continue
            if tie:
                if bi + Ri < bj - Rj:
                    return -1
                if bj + Rj < bi - Ri:
                    return 1
            bits *= 2
            if bits > 1 << 20:
                raise RuntimeError("could not order roots")

    def _real_parts_equal(self, i, j) -> bool:
        key = (min(i, j), max(i, j))
        if key in self._tie_cache:
            return self._tie_cache[key]
        if self._sums is None:
            # roots of this polynomial include every 2*Re(rho)
            self._sums = root_system(squarefree_part(composed_sum(self.poly, self.poly)))
        sums = self._sums

        def twice_real(k):
            ck = self._conj[k]

            def enc(bits):
                lv = self.level(bits + 2)
                return lv.ball(k) + lv.ball(ck)

            return enc

        li = sums.locate(twice_real(i))
        lj = sums.locate(twice_real(j))
        self._tie_cache[key] = li == lj
        return li == lj

    # -- queries -----------------------------------------------------------
    def ball(self, position: int, bits: int) -> Ball:
        """Certified isolating ball of the canonical root `position`, radius <= 2**-bits."""
        return self.level(bits).ball(self.order[position])

    def box(self, position: int, bits: int | None = None) -> Box:
        lv = self._levels[0] if bits is None else self.level(bits)
        lab = self.order[position]
        a, b = lv.centers[lab]
        R = lv.radii[lab]
        d = 1 << lv.prec
        return Box(Fraction(a - R, d), Fraction(a + R, d), Fraction(b - R, d), Fraction(b + R, d))

    def boxes(self, bits: int | None = None) -> list:
        return [self.box(k, bits) for k in range(self.degree)]

    def is_real(self, position: int) -> bool:
        return self._real[self.order[position]]

    def conjugate_position(self, position: int) -> int:
        return self.position(self._conj[self.order[position]])

    def locate(self, enclosure, max_bits: int = 1 << 16) -> int:
        """Label of the root contained in `enclosure(bits)`.

        The caller guarantees the enclosed value is a root of this polynomial.
        """
        bits = 16
        while bits <= max_bits:
            ball = enclosure(bits)
            lv = self.level(bits)
            hits = [k for k in range(self.degree) if lv.box_overlaps(k, ball)]
            if len(hits) == 1:
                return hits[0]
            if not hits:
                raise DomainError("enclosed value is not a root of this polynomial")
            bits *= 2
        raise RuntimeError("root location did not converge")

    def locate_position(self, enclosure) -> int:
        return self.position(self.locate(enclosure))

    def position_of_box(self, box: Box) -> int:
        """Canonical position of the single root inside an isolating `box`."""
        bits = 16
        while True:
            lv = self.level(bits)
            hits = []
            for k in range(self.degree):
                a, b = lv.centers[k]
                R = lv.radii[k]
                d = 1 << lv.prec
                kb = Box(Fraction(a - R, d), Fraction(a + R, d), Fraction(b - R, d), Fraction(b + R, d))
                if self.is_real(self.position(k)):
                    # imaginary part is exactly 0, so only the real interval matters
                    if box.im_lo <= 0 <= box.im_hi and kb.re_lo <= box.re_hi and box.re_lo <= kb.re_hi:
                        hits.append((k, box.re_lo <= kb.re_lo and kb.re_hi <= box.re_hi))
                elif kb.intersects(box):
                    hits.append((k, box.contains_box(kb)))
            inside = [k for k, c in hits if c]
            if len(hits) == 1 and inside:
                return self.position(hits[0][0])
            if not hits:
                raise DomainError("box contains no root of the polynomial")
            if len(inside) > 1:
                raise DomainError("box contains more than one root")
            bits *= 2
            if bits > 1 << 16:
                raise DomainError("box does not isolate a root")


@lru_cache(maxsize=8192)
def root_system(poly: QPoly) -> RootSystem:
    return RootSystem(poly)


def isolate_roots(p: QPoly) -> list:
    """Disjoint isolating boxes, one per complex root, in canonical order."""
    if p.is_zero():
        raise DomainError("the zero polynomial has no isolated roots")
    if p.degree < 1:
        return []
    if not is_squarefree(p):
        raise DomainError("isolate_roots needs a squarefree polynomial; take squarefree_part first")
    return root_system(p.monic()).boxes()


def refine_box(p: QPoly, box: Box, bits: int) -> Box:
    """A sub-box of width at most 2**-bits isolating the same root as `box`."""
    rs = root_system(p.monic())
    return rs.box(rs.position_of_box(box), bits)


def root_approximation(p: QPoly, position: int, bits: int = 53) -> complex:
    b = root_system(p.monic()).ball(position, bits)
    return complex(b.re / (1 << b.prec), b.im / (1 << b.prec))


def identify_root(polys, enclosure) -> tuple:
    """Which of several root-disjoint polynomials has the enclosed value as a root.

    Returns ``(index into polys, canonical root position)``.
    """
    systems = [root_system(p.monic()) for p in polys]
    bits = 16
    while bits <= 1 << 16:
        ball = enclosure(bits)
        hits = []
        for s, rs in enumerate(systems):
            lv = rs.level(bits)
            hits.extend((s, k) for k in range(rs.degree) if lv.box_overlaps(k, ball))
        if len(hits) == 1:
            s, k = hits[0]
            return s, systems[s].position(k)
        if not hits:
            raise DomainError("enclosed value is a root of none of the candidates")
        bits *= 2
    raise RuntimeError("root identification did not converge")


def select_zeros(enclosures, count: int) -> list:
    """Indices of the `count` values (given by enclosure functions) that are zero.

    The caller guarantees exactly `count` of the values vanish; nonzero ones
    are excluded once their enclosure stops containing 0.
    """
    alive = list(range(len(enclosures)))
    bits = 16
    while len(alive) > count:
        alive = [k for k in alive if enclosures[k](bits).contains_zero()]
        if len(alive) < count:
            raise DomainError("fewer zeros than promised")
        bits *= 2
        if bits > 1 << 16:
            raise RuntimeError("zero selection did not converge")
    return alive
