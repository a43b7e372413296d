from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from galois_lab.errors import DomainError, ParseError
from galois_lab.fields import NumberField, compositum, parse_field
from galois_lab.haar import (
    EMPTY,
    FULL,
    Complement,
    E,
    Intersection,
    Union,
    clopen_from_dict,
    common_overfield,
    coset_count_union,
    marked_positions,
    measure,
    parse_clopen,
    tower_measures,
    union_formula,
)
from galois_lab.profinite import Embedding, automorphisms, embeddings
from galois_lab.qbar import sqrt
from galois_lab.towers import TowerDescriptor, parse_tower

F = parse_field

CATALOG_FIELDS = ["Q", "Q(sqrt(2))", "Q(sqrt(3))", "Q(sqrt(6))", "Q(I)", "Q(sqrt(2), sqrt(3))", "Q(root(2, 3))"]
TAUS = [tau for t in CATALOG_FIELDS for tau in embeddings(F(t))]


def brute_measure(s, K=None):
    """Fraction of Gal(K/Q) lying in s, each leaf decided by applying the group
    element to the leaf's generator."""
    leaves = list(dict.fromkeys(s.leaves()))
    K = K or common_overfield(leaves)
    G = automorphisms(K)
    inside = 0
    for g in G.elements:
        marks = {tau: g.apply(tau.source.generator) == tau.image for tau in leaves}
        inside += s.evaluate(marks)
    return Fraction(inside, G.order)


# -- examples -------------------------------------------------------------------------------
def test_identity_on_quadratic():
    assert measure(E(Embedding.identity(F("Q(sqrt(2))")))) == Fraction(1, 2)


def test_constants():
    assert measure(FULL) == 1 and measure(EMPTY) == 0


def test_union_three_quarters():
    s = E(Embedding(F("Q(sqrt(2))"), -sqrt(2))) | E(Embedding.identity(F("Q(sqrt(3))")))
    assert measure(s) == Fraction(3, 4)
    assert brute_measure(s) == Fraction(3, 4)


def test_non_galois_cube_root():
    K = F("Q(root(2, 3))")
    assert measure(E(Embedding.identity(K))) == Fraction(1, 3)
    for tau in embeddings(K):
        assert brute_measure(E(tau)) == Fraction(1, 3)


def test_parse_and_measure():
    assert measure(parse_clopen("E(Q(sqrt(2)):-sqrt(2)) | E(Q(sqrt(3)):id)")) == Fraction(3, 4)
    assert measure(parse_clopen("~E(Q(root(2, 3)):#0)")) == Fraction(2, 3)
    assert measure(parse_clopen("FULL & ~EMPTY")) == 1
    with pytest.raises(ParseError):
        parse_clopen("E(Q(sqrt(2)):id")
    with pytest.raises(DomainError):
        parse_clopen("E(Q(sqrt(2)):sqrt(3))")


def test_clopen_round_trip():
    s = parse_clopen("E(Q(sqrt(2)):-sqrt(2)) & ~(E(Q(I):id) | EMPTY)")
    assert clopen_from_dict(s.to_dict()) == s


def test_overfield_must_be_galois():
    with pytest.raises(DomainError):
        measure(FULL, overfield=F("Q(root(2, 3))"))


# -- towers ------------------------------------------------------------------------------------
def test_tower_measures_examples():
    assert tower_measures(parse_tower("prime-sqrt"), 3) == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert tower_measures(TowerDescriptor.explicit("t", [sqrt(2), sqrt(3), sqrt(5)]), 3) == [
        Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)
    ]
    assert tower_measures(TowerDescriptor.trivial(), 4) == [1, 1, 1, 1]
    with pytest.raises(DomainError):
        tower_measures(TowerDescriptor.trivial(), 0)


def test_growing_tower_strictly_decreases():
    ms = tower_measures(parse_tower("pow2-roots-of-unity"), 3)
    assert ms == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert all(b < a for a, b in zip(ms, ms[1:]))


def test_repeated_generator_keeps_measure():
    ms = tower_measures(TowerDescriptor.explicit("t", [sqrt(2), sqrt(8), sqrt(3)]), 3)
    assert ms == [Fraction(1, 2), Fraction(1, 2), Fraction(1, 4)]


# -- properties -----------------------------------------------------------------------------------
def clopen_sets(max_leaves=3):
    leaf = st.sampled_from(TAUS).map(E)
    const = st.sampled_from([EMPTY, FULL])
    return st.recursive(
        st.one_of(leaf, leaf, leaf, const),
        lambda kids: st.one_of(
            st.builds(Union, kids, kids), st.builds(Intersection, kids, kids), st.builds(Complement, kids)
        ),
        max_leaves=max_leaves,
    )


@given(clopen_sets())
def test_measure_matches_brute_force(s):
    m = measure(s)
    assert 0 <= m <= 1
    assert m == brute_measure(s)


@given(clopen_sets(), clopen_sets())
def test_finite_additivity(a, b):
    disjoint_b = b - a
    assert measure(a | disjoint_b) == measure(a) + measure(disjoint_b)


@given(clopen_sets())
def test_complement(a):
    assert measure(a) + measure(~a) == 1


@given(clopen_sets(), clopen_sets())
def test_monotone(a, b):
    assert measure(a & b) <= measure(a) <= measure(a | b)
    # pointwise check of the inclusion in the common overfield
    K = common_overfield(list(dict.fromkeys((a | b).leaves())))
    assert marked_positions(a & b, K) <= marked_positions(a, K) <= marked_positions(a | b, K)


@given(clopen_sets(), st.sampled_from(["Q(sqrt(5))", "Q(sqrt(-1))", "Q(sqrt(7))", "Q(zeta(5))"]))
def test_lifting_invariance(a, extra):
    K = common_overfield(list(dict.fromkeys(a.leaves())))
    E2 = F(extra)
    assume(K.degree * E2.degree <= 24 and not K.contains(E2.generator))
    bigger = compositum(K, E2)
    assert bigger.degree > K.degree
    assert measure(a, overfield=bigger) == measure(a)


@given(st.sampled_from(TAUS), st.sampled_from(TAUS))
def test_union_of_two_basic_opens(t1, t2):
    direct = measure(E(t1) | E(t2))
    assert union_formula(t1, t2) == direct
    assert coset_count_union(t1, t2) == direct


def test_common_overfield_is_galois_and_contains_sources():
    K = common_overfield([Embedding.identity(F("Q(root(2, 3))")), Embedding.identity(F("Q(sqrt(2))"))])
    assert K.degree == 12
    assert all(K.contains(r) for r in K.generator.rational_conjugates())
    assert NumberField.rationals().degree == 1
