"""Acceptance criteria 1-10.

Each test runs under its time limit and prints a single ``criterion N: PASS``
or ``criterion N: FAIL`` line, whatever the outcome.
"""

import itertools
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

import field_oracles
from galois_lab.expressions import parse_algebraic
from galois_lab.fields import FieldPoly, NumberField, compositum, factor_over, membership, parse_field
from galois_lab.haar import (
    EMPTY,
    FULL,
    Complement,
    E,
    Intersection,
    Union,
    common_overfield,
    coset_count_union,
    marked_positions,
    measure,
    tower_measures,
    union_formula,
)
from galois_lab.profinite import (
    Embedding,
    automorphisms,
    certify_witness,
    embeddings,
    extensions,
    intersection_witness,
    path_restrictions_consistent,
    tree_build,
)
from galois_lab.qbar import AlgebraicNumber, qbar_element, qbar_index, qbar_inv, sqrt
from galois_lab.randomness import MuTest, build_random_automorphism, member_at_depth, mu_test_validate, verify_construction
from galois_lab.towers import TowerDescriptor, parse_tower

from test_randomness import independent_check

F = parse_field
Q = NumberField.rationals()


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, limit):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, limit {limit} s)")

    return run


# -- 1 ----------------------------------------------------------------------------------------------
def test_criterion_01_identity_measures(criterion):
    expected = {
        "Q(sqrt(2))": Fraction(1, 2),
        "Q(sqrt(3))": Fraction(1, 2),
        "Q(sqrt(2), sqrt(3))": Fraction(1, 4),
        "Q(root(2, 3))": Fraction(1, 3),
        "Q(zeta(5))": Fraction(1, 4),
    }
    with criterion(1, 10):
        for text, value in expected.items():
            K = F(text)
            m = measure(E(Embedding.identity(K)))
            assert m == value == Fraction(1, K.degree), text


# -- 2 ----------------------------------------------------------------------------------------------
CATALOG = ["Q", "Q(sqrt(2))", "Q(sqrt(3))", "Q(sqrt(6))", "Q(I)", "Q(sqrt(2), sqrt(3))", "Q(root(2, 3))"]
TAUS = [tau for t in CATALOG for tau in embeddings(F(t))]


def test_criterion_02_union_formula(criterion):
    with criterion(2, 60):
        pairs = list(itertools.combinations_with_replacement(TAUS, 2))
        assert len(pairs) >= 50
        for t1, t2 in pairs:
            direct = measure(E(t1) | E(t2))
            assert union_formula(t1, t2) == direct
            assert coset_count_union(t1, t2) == direct


# -- 3 ----------------------------------------------------------------------------------------------
# leaves of one set pair share a family, keeping the Galois overfield of degree <= 16
LEAF_FAMILIES = [
    ["Q", "Q(sqrt(2))", "Q(sqrt(3))", "Q(sqrt(6))", "Q(sqrt(2), sqrt(3))"],
    ["Q(I)", "Q(sqrt(2))", "Q(sqrt(5))", "Q(zeta(5))", "Q(sqrt(-2))"],
    ["Q(root(2, 3))", "Q(sqrt(-3))", "Q(sqrt(2))"],
    ["Q(I)", "Q(sqrt(3))", "Q(zeta(8))", "Q(sqrt(2), sqrt(3))"],
]
LEAVES = [[tau for t in fam for tau in embeddings(F(t))] for fam in LEAF_FAMILIES]
LIFTS = [F(t) for t in ("Q(sqrt(5))", "Q(sqrt(7))", "Q(sqrt(11))", "Q(sqrt(13))")]


def random_clopen(rng, leaves, budget):
    r = rng.random()
    if budget <= 1 or r < 0.3:
        if rng.random() < 0.1:
            return rng.choice([EMPTY, FULL])
        return E(rng.choice(leaves))
    if r < 0.45:
        return Complement(random_clopen(rng, leaves, budget - 1))
    left = rng.randint(1, budget - 1)
    kind = Union if r < 0.75 else Intersection
    return kind(random_clopen(rng, leaves, left), random_clopen(rng, leaves, budget - left))


def _overfield(s):
    return common_overfield(list(dict.fromkeys(s.leaves())))


def test_criterion_03_measure_axioms(criterion):
    rng = random.Random(2024)
    with criterion(3, 120):
        checked = 0
        for _ in range(100):
            leaves = rng.choice(LEAVES)
            for a, b in itertools.permutations([random_clopen(rng, leaves, rng.randint(1, 4)) for _ in range(2)]):
                ma = measure(a)
                assert 0 <= ma <= 1
                assert ma + measure(~a) == 1
                disjoint = b - a
                assert measure(a | disjoint) == ma + measure(disjoint)
                assert measure(a & b) <= ma <= measure(a | b)
                K = _overfield(a | b)
                assert marked_positions(a & b, K) <= marked_positions(a, K) <= marked_positions(a | b, K)
                Ka = _overfield(a)
                extra = next(L for L in LIFTS if not Ka.contains(L.generator))
                bigger = compositum(Ka, extra)
                assert bigger.degree == 2 * Ka.degree
                assert measure(a, overfield=bigger) == ma
                checked += 1
        assert checked >= 200


# -- 4 ----------------------------------------------------------------------------------------------
BASES = ["Q", "Q(sqrt(2))", "Q(sqrt(-3))", "Q(root(2, 3))", "Q(sqrt(2), sqrt(3))", "Q(zeta(5))", "Q(I)"]
COEFFS = ["0", "1", "-1", "2", "-3", "1/2", "sqrt(2)", "sqrt(-3)", "root(2, 3)", "I", "zeta(5)", "sqrt(3)"]


def test_criterion_04_factor_round_trip(criterion):
    rng = random.Random(7)
    fields = [F(t) for t in BASES]
    pools = {K: [membership(c, K) for c in map(parse_algebraic, COEFFS)] for K in fields}
    pools = {K: [h for h in hs if h is not None] for K, hs in pools.items()}
    with criterion(4, 300):
        checked = 0
        for _ in range(100):
            K = rng.choice(fields)
            deg = rng.randint(1, 6)
            P = FieldPoly(K, [rng.choice(pools[K]) for _ in range(deg)] + [K.rational(1)])
            facs = factor_over(P, K)
            prod = FieldPoly(K, [1])
            for f, e in facs:
                prod = prod * f ** e
            assert prod == P
            for f, _ in facs:
                if 2 <= f.degree <= 3:
                    assert not field_oracles.has_root_in_field(f, K)
                    checked += 1
        assert checked > 0


# -- 5 ----------------------------------------------------------------------------------------------
GALOIS = [
    "Q", "Q(sqrt(2))", "Q(I)", "Q(sqrt(-3))", "Q(sqrt(2), sqrt(3))", "Q(zeta(5))", "Q(zeta(8))",
    "Q(zeta(7))", "Q(root(2, 3), sqrt(-3))", "Q(sqrt(2), sqrt(3), sqrt(5))", "Q(zeta(15))", "Q(zeta(16))",
    "Q(root(2, 4), I)",
]


def test_criterion_05_group_axioms(criterion):
    with criterion(5, 60):
        for text in GALOIS:
            K = F(text)
            assert K.degree <= 8
            G = automorphisms(K)
            assert G.order == K.degree, text
            assert G.verify(), text


# -- 6 ----------------------------------------------------------------------------------------------
def test_criterion_06_default_tree(criterion):
    with criterion(6, 120):
        T = tree_build(Q, 4)
        assert T.level_sizes() == [K.degree for K in T.tower]
        assert all(T.children(3, k) for k in range(len(T.levels[3])))
        for level in range(5):
            for p in T.paths(level):
                assert path_restrictions_consistent(p)
        # extensions of each depth-3 node into the top field match its children
        for k, node in enumerate(T.levels[3]):
            ext = {e.image for e in extensions(node.embedding, T.tower[4])}
            assert ext == {T.levels[4][c].embedding.image for c in T.children(3, k)}


# -- 7 ----------------------------------------------------------------------------------------------
def test_criterion_07_random_construction(criterion):
    primes = parse_tower("prime-sqrt")
    with criterion(7, 60):
        p = build_random_automorphism([primes], 5, policy="least")
        assert len(p.log) == 5
        assert independent_check(p, [primes]) == {0}
        assert verify_construction(p, [primes]) == {"moved": True, "fixed": True, "consistent": True}
        depth = max(r.tower_position for r in p.log if r.moved) + 1
        assert not member_at_depth(p, primes, depth)


# -- 8 ----------------------------------------------------------------------------------------------
def test_criterion_08_mu_test(criterion):
    with criterion(8, 30):
        test = MuTest.prime_sqrt_family(6)
        for i in range(6):
            m = tower_measures(test.component(i), i + 1)[-1]
            assert m == Fraction(1, 2 ** (i + 1)) < Fraction(1, 2**i)
            assert mu_test_validate(test, i, i + 1)


# -- 9 ----------------------------------------------------------------------------------------------
def test_criterion_09_qbar(criterion):
    rng = random.Random(9)
    with criterion(9, 120):
        elements = [qbar_element(n) for n in range(200)]
        assert [qbar_index(a) for a in elements] == list(range(200))
        assert len(set(elements)) == 200
        pool = [a for a in elements if a.degree <= 4]
        one = AlgebraicNumber.rational(1)
        for _ in range(100):
            a, b, c = (rng.choice(pool) for _ in range(3))
            assert a + b == b + a and a * b == b * a
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a - a).is_zero()
            if not a.is_zero():
                assert a * qbar_inv(a) == one


# -- 10 ---------------------------------------------------------------------------------------------
def test_criterion_10_intersection_witness(criterion):
    t2 = TowerDescriptor.explicit("r2", [sqrt(2)])
    t3 = TowerDescriptor.explicit("r3", [sqrt(3)])
    with criterion(10, 60):
        w = intersection_witness(t2, t3, 3, search=parse_tower("prime-sqrt"))
        assert w is not None
        assert w.moved == (sqrt(5), -sqrt(5))
        assert w.top.source.degree == 8
        assert certify_witness(w, t2, t3, 3)
