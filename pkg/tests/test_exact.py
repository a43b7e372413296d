from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from galois_lab.errors import DomainError
from galois_lab.exact import (
    Box,
    QPoly,
    composed_product,
    composed_sum,
    discriminant,
    factor_q,
    format_rational,
    is_irreducible,
    isolate_roots,
    parse_rational,
    poly_gcd,
    refine_box,
    resultant,
    root_system,
    squarefree_part,
)

P = QPoly


def coeffs(p):
    return list(p.coeffs)


small_int = st.integers(-6, 6)
small_q = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


def poly_st(max_deg, elem=small_int, nonzero=True):
    def build(cs):
        return P(cs)

    s = st.lists(elem, min_size=1, max_size=max_deg + 1).map(build)
    return s.filter(lambda p: not p.is_zero()) if nonzero else s


# -- rationals and text ------------------------------------------------------------------
@given(small_q)
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_rational_normal_form():
    assert format_rational(Fraction(4, -6)) == "-2/3"
    assert format_rational(Fraction(0, 5)) == "0"


@given(poly_st(6, small_q, nonzero=False))
def test_poly_text_round_trip(p):
    assert P.from_text(p.to_text()) == p


def test_poly_text_format():
    assert P([Fraction(1, 2), 0, -3]).to_text() == "[1/2, 0, -3]"


# -- gcd -------------------------------------------------------------------------------------
@pytest.mark.parametrize(
    "a, b, g",
    [([-1, 0, 1], [-1, 1], [-1, 1]), ([1, 0, 1], [-1, 0, 1], [1]), ([1, 0, -10, 0, 1], [-2, 0, 1], [1])],
)
def test_gcd_examples(a, b, g):
    assert poly_gcd(P(a), P(b)) == P(g)


def test_gcd_coprime_via_oracles():
    a, b = [1, 0, -10, 0, 1], [-2, 0, 1]
    assert oracles.euclid_gcd(a, b) == [1]
    for r in (2 ** 0.5, -(2 ** 0.5)):
        assert abs(oracles.peval(a, r)) > 1


def test_gcd_both_zero():
    with pytest.raises(DomainError):
        poly_gcd(P([]), P([]))


@given(poly_st(3), poly_st(3), poly_st(3))
def test_gcd_divides_and_is_greatest(c, u, v):
    a, b = c * u, c * v
    g = poly_gcd(a, b)
    assert g.is_monic()
    assert oracles.pdivmod(coeffs(a), coeffs(g))[1] == []
    assert oracles.pdivmod(coeffs(b), coeffs(g))[1] == []
    assert oracles.pdivmod(coeffs(g), coeffs(c))[1] == []
    assert coeffs(g) == oracles.euclid_gcd(coeffs(a), coeffs(b))


# -- factorization ------------------------------------------------------------------------------
def test_factor_examples():
    assert factor_q(P([-1, 0, 0, 0, 1])) == [(P([-1, 1]), 1), (P([1, 1]), 1), (P([1, 0, 1]), 1)]
    assert factor_q(P([-2, 0, 1])) == [(P([-2, 0, 1]), 1)]
    assert factor_q(P([1, 0, -10, 0, 1])) == [(P([1, 0, -10, 0, 1]), 1)]


def test_quartic_irreducible_by_mignotte_search():
    assert oracles.mignotte_quadratic_factor([1, 0, -10, 0, 1]) is None
    assert not oracles.rational_roots([1, 0, -10, 0, 1])
    # sanity of the oracle itself
    assert oracles.mignotte_quadratic_factor([-1, 0, 0, 0, 1]) is not None


def test_factor_zero():
    with pytest.raises(DomainError):
        factor_q(P([]))


@given(poly_st(8))
def test_factor_recombines(p):
    facs = factor_q(p)
    acc = [p.leading_coefficient]
    for f, e in facs:
        assert f.is_monic()
        for _ in range(e):
            acc = oracles.pmul(acc, coeffs(f))
    assert acc == coeffs(p)
    assert sorted((f.degree, e) for f, e in facs) == (oracles.sympy_factor_degrees(coeffs(p)) if p.degree else [])


@given(poly_st(5))
def test_irreducible_matches_sympy(p):
    if p.degree >= 1:
        assert is_irreducible(p) == oracles.sympy_irreducible(coeffs(p))


@given(poly_st(6))
def test_squarefree_part(p):
    s = squarefree_part(p)
    assert all(e == 1 for _, e in factor_q(s))
    assert {f for f, _ in factor_q(s)} == {f for f, _ in factor_q(p)}


# -- resultant ----------------------------------------------------------------------------------
@pytest.mark.parametrize(
    "a, b, r", [([-2, 1], [-3, 1], -1), ([-2, 0, 1], [-3, 0, 1], 1), ([-2, 0, 1], [-2, 0, 1], 0)]
)
def test_resultant_examples(a, b, r):
    assert resultant(P(a), P(b)) == r


def test_resultant_product_over_roots():
    # prod over roots of x^2-2 of (alpha^2 - 3) = (2-3)^2
    assert oracles.sylvester_resultant([-2, 0, 1], [-3, 0, 1]) == (2 - 3) ** 2


def test_resultant_zero_input():
    with pytest.raises(DomainError):
        resultant(P([]), P([1, 1]))


@given(poly_st(6, small_q), poly_st(6, small_q))
def test_resultant_is_sylvester_determinant(a, b):
    assert resultant(a, b) == oracles.sylvester_resultant(coeffs(a), coeffs(b))


@given(poly_st(5), poly_st(5))
def test_resultant_vanishes_iff_common_factor(a, b):
    if a.degree >= 1 and b.degree >= 1:
        assert (resultant(a, b) == 0) == (poly_gcd(a, b).degree > 0)


def test_discriminant_quadratic():
    b, c = 3, -7
    assert discriminant(P([c, b, 1])) == b * b - 4 * c


# -- composed polynomials --------------------------------------------------------------------
def test_composed_sum_of_square_roots():
    # (x^2 - 5)^2 - 24 expanded
    assert composed_sum(P([-2, 0, 1]), P([-3, 0, 1])) == P([1, 0, -10, 0, 1])


def test_composed_product_of_square_roots():
    assert composed_product(P([-2, 0, 1]), P([-3, 0, 1])) == P([-6, 0, 1]) ** 2


@given(poly_st(4, small_q), poly_st(4, small_q))
def test_composed_polys_match_resultant_route(f, g):
    from galois_lab.exact.poly import composed_product_resultant, composed_sum_resultant

    if f.degree < 1 or g.degree < 1:
        return
    assert composed_sum(f, g) == composed_sum_resultant(f, g)
    if g.coeffs[0] != 0:
        assert composed_product(f, g) == composed_product_resultant(f, g)


@given(poly_st(3), poly_st(3))
def test_composed_sum_roots_numerically(f, g):
    if f.degree < 1 or g.degree < 1:
        return
    h = composed_sum(f, g)
    assert h.degree == f.degree * g.degree
    rs = oracles.durand_kerner(coeffs(f))
    ss = oracles.durand_kerner(coeffs(g))
    scale = max(1.0, *(abs(complex(c)) for c in h.coeffs))
    for r in rs:
        for s in ss:
            val = oracles.peval([complex(c) for c in h.coeffs], r + s)
            assert abs(val) < 1e-5 * scale * (1 + abs(r + s)) ** h.degree


# -- root isolation ------------------------------------------------------------------------------
def test_isolate_sqrt2_sign_checks():
    p = [-2, 0, 1]
    neg, pos = isolate_roots(P(p))
    for b, expect in ((neg, -1.41421356), (pos, 1.41421356)):
        assert b.im_lo <= 0 <= b.im_hi
        assert oracles.peval(p, b.re_lo) * oracles.peval(p, b.re_hi) < 0
        assert float(b.re_lo) <= expect + 1e-8 and expect - 1e-8 <= float(b.re_hi)


def test_isolate_i_symmetric():
    lo, hi = isolate_roots(P([1, 0, 1]))
    assert lo == hi.mirrored()
    assert lo.contains(0, -1) and hi.contains(0, 1)


def test_isolate_degree_five():
    assert len(isolate_roots(P([-1, -1, 0, 0, 0, 1]))) == 5


def test_isolate_needs_squarefree():
    with pytest.raises(DomainError):
        isolate_roots(P([1, -2, 1]))


def _disjoint(boxes):
    return all(not a.intersects(b) for i, a in enumerate(boxes) for b in boxes[i + 1:])


@given(poly_st(6))
def test_isolation_properties(p):
    p = squarefree_part(p) if p.degree >= 1 else p
    if p.degree < 1:
        return
    boxes = isolate_roots(p)
    assert len(boxes) == p.degree
    assert _disjoint(boxes)
    approx = oracles.durand_kerner(coeffs(p))
    # every numeric root lies close to exactly one box
    for z in approx:
        near = [b for b in boxes if _dist(b, z) < 1e-6]
        assert len(near) == 1
    # canonical order: lexicographic on (re, im) midpoints
    mids = [complex(float(b.re_lo + b.re_hi) / 2, float(b.im_lo + b.im_hi) / 2) for b in boxes]
    assert oracles.canonical_rank(mids, 1e-7) == mids


def _dist(b: Box, z: complex) -> float:
    dx = max(float(b.re_lo) - z.real, 0, z.real - float(b.re_hi))
    dy = max(float(b.im_lo) - z.imag, 0, z.imag - float(b.im_hi))
    return (dx * dx + dy * dy) ** 0.5


@given(poly_st(5), st.integers(2, 6))
def test_refinement_keeps_one_root(p, k):
    p = squarefree_part(p) if p.degree >= 1 else p
    if p.degree < 1:
        return
    boxes = isolate_roots(p)
    bits = 10 * k
    fine = [refine_box(p, b, bits) for b in boxes]
    for b, f in zip(boxes, fine):
        assert b.contains_box(f) or b.intersects(f)
        assert f.width <= Fraction(1, 2 ** bits)
    assert _disjoint(fine)
    # the refined boxes still name the same roots
    rs = root_system(p.monic())
    assert [rs.position_of_box(f) for f in fine] == list(range(p.degree))


def test_equal_real_parts_are_ordered_exactly():
    # x^4 + 1 has roots at (+-1 +-i)/sqrt(2): pairs share real parts
    boxes = isolate_roots(P([1, 0, 0, 0, 1]))
    assert [b.im_hi < 0 for b in boxes] == [True, False, True, False]
    assert boxes[0].re_hi < 0 < boxes[2].re_lo
