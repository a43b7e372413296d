"""Finite-depth views of absolute Galois groups.

Embeddings of number fields are the basic currency: an `Embedding` of
``K = Q(gamma)`` is fixed by the image of gamma, which must be a root of the
same minimal polynomial. Automorphism trees stack the embeddings of a tower
of fields; a chain of nodes in which every node restricts to its parent is a
finite piece of an automorphism of the algebraic closure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from galois_lab.errors import DomainError
from galois_lab.exact.poly import QPoly
from galois_lab.fields import (
    NumberField,
    automorphism_polys,
    compositum,
    conjugate_list,
    identify_value,
    is_galois,
    membership,
    tower_extend,
)
from galois_lab.qbar import AlgebraicNumber, qbar_element, qbar_key
from galois_lab.towers import TowerDescriptor


@dataclass(frozen=True)
class Embedding:
    source: NumberField
    image: AlgebraicNumber

    def __post_init__(self):
        if self.image.minpoly != self.source.minpoly:
            raise DomainError("image must be a root of the generator's minimal polynomial")

    @classmethod
    def identity(cls, K: NumberField) -> "Embedding":
        return cls(K, K.generator)

    def is_identity(self) -> bool:
        return self.image == self.source.generator

    def apply(self, beta: AlgebraicNumber) -> AlgebraicNumber:
        """tau(beta) for beta in the source field."""
        if beta.is_rational():
            return beta
        h = membership(beta, self.source)
        if h is None:
            raise DomainError("element is not in the embedding's source field")
        return AlgebraicNumber(beta.minpoly, identify_value(h.poly, self.image, beta.minpoly))

    def apply_poly(self, h: QPoly, target: QPoly) -> AlgebraicNumber:
        """tau(h(gamma)), given the minimal polynomial `target` of h(gamma)."""
        target = target.monic()
        return AlgebraicNumber(target, identify_value(h, self.image, target))

    def restrict(self, sub: NumberField) -> "Embedding":
        return Embedding(sub, self.apply(sub.generator))

    def moves(self, beta: AlgebraicNumber) -> bool:
        return self.apply(beta) != beta

    def to_dict(self) -> dict:
        return {"field": self.source.to_dict(), "image": self.image.to_dict()}

    def __repr__(self):
        return f"Embedding(deg {self.source.degree}: {self.source.generator!r} -> {self.image!r})"


def embeddings(K: NumberField) -> list:
    """All embeddings of K into the algebraic closure, by image in canonical order."""
    return [Embedding(K, r) for r in K.generator.rational_conjugates()]


# -- finite Galois groups -----------------------------------------------------------
@dataclass
class FiniteGaloisGroup:
    field: NumberField
    elements: list
    table: list

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity_index(self) -> int:
        for i, e in enumerate(self.elements):
            if e.is_identity():
                return i
        raise AssertionError("group without identity")

    def compose(self, i: int, j: int) -> int:
        """Index of elements[i] composed after elements[j]."""
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        e = self.identity_index
        for j in range(self.order):
            if self.table[i][j] == e:
                return j
        raise AssertionError("element without inverse")

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[i][j] == self.table[j][i] for i in range(n) for j in range(n))

    def verify(self) -> bool:
        """Identity, closure, associativity on all triples, inverses."""
        n = self.order
        try:
            e = self.identity_index
        except AssertionError:
            return False
        rng = range(n)
        if any(not 0 <= self.table[i][j] < n for i in rng for j in rng):
            return False
        if any(self.table[e][i] != i or self.table[i][e] != i for i in rng):
            return False
        t = self.table
        if any(t[t[a][b]][c] != t[a][t[b][c]] for a in rng for b in rng for c in rng):
            return False
        return all(any(t[i][j] == e and t[j][i] == e for j in rng) for i in rng)


def automorphisms(K: NumberField) -> FiniteGaloisGroup:
    if not is_galois(K):
        raise DomainError("field is not Galois over Q; take its Galois closure first")
    m = K.minpoly
    n = K.degree
    if n == 1:
        return FiniteGaloisGroup(K, [Embedding.identity(K)], [[0]])
    images = K.generator.rational_conjugates()
    coords = automorphism_polys(K)
    # (s_i . s_j)(gamma) = s_i(h_j(gamma)) = h_j(s_i(gamma))
    table = [[identify_value(coords[j], images[i], m) for j in range(n)] for i in range(n)]
    return FiniteGaloisGroup(K, [Embedding(K, r) for r in images], table)


def extensions(tau: Embedding, L: NumberField) -> list:
    """All embeddings of L restricting to tau on tau.source."""
    S = tau.source
    if S.is_rationals():
        return embeddings(L)
    h = membership(S.generator, L)
    if h is None:
        raise DomainError("the embedding's source is not a subfield of L")
    out = [
        Embedding(L, rho)
        for rho in L.generator.rational_conjugates()
        if identify_value(h.poly, rho, S.minpoly) == tau.image.position
    ]
    if len(out) * S.degree != L.degree:
        raise AssertionError("extension count disagrees with the field degree")
    return out


# -- towers and trees -----------------------------------------------------------------
TowerRule = Callable[[NumberField, NumberField, int], NumberField]


class LeastOutsideRule:
    """Default tower step: adjoin every conjugate over the base of the least
    enumerated algebraic number not yet in the current field."""

    def __init__(self):
        self._cursor = 0
        self.adjoined = []

    def __call__(self, base: NumberField, current: NumberField, step: int) -> NumberField:
        n = self._cursor
        while True:
            x = qbar_element(n)
            n += 1
            if membership(x, current) is None:
                break
        self._cursor = n
        F = current
        for c in conjugate_list(x, base):
            F = tower_extend(F, c)
        self.adjoined.append(x)
        return F


class DescriptorRule:
    """Tower step from a descriptor: adjoin x_step and its conjugates over the base."""

    def __init__(self, tower: TowerDescriptor):
        self.tower = tower
        self.adjoined = []

    def __call__(self, base, current, step):
        x = self.tower.generator(step)
        if x is None:
            self.adjoined.append(None)
            return current
        F = current
        for c in conjugate_list(x, base):
            F = tower_extend(F, c)
        self.adjoined.append(x)
        return F


@dataclass
class TreeNode:
    embedding: Embedding
    parent: int | None


@dataclass
class AutomorphismTree:
    base: NumberField
    tower: list  # tower[i] is the level-i field; tower[0] is the base
    levels: list  # levels[i] is a list of TreeNode
    adjoined: list = field(default_factory=list)  # element introduced at each step

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level_sizes(self) -> list:
        return [len(lv) for lv in self.levels]

    def children(self, level: int, index: int) -> list:
        return [k for k, nd in enumerate(self.levels[level + 1]) if nd.parent == index]

    def path_to(self, level: int, index: int) -> "PathPrefix":
        chain = []
        k = index
        for lv in range(level, -1, -1):
            node = self.levels[lv][k]
            chain.append(node.embedding)
            k = node.parent
        chain.reverse()
        return PathPrefix(self.base, chain, tree=self)

    def paths(self, level: int) -> list:
        return [self.path_to(level, k) for k in range(len(self.levels[level]))]

    def to_records(self) -> list:
        return [
            [
                {"field": nd.embedding.source.to_dict(), "image": nd.embedding.image.to_dict(), "parent": nd.parent}
                for nd in lv
            ]
            for lv in self.levels
        ]


def tree_build(K: NumberField, depth: int, tower_rule=None) -> AutomorphismTree:
    """Automorphism tree over K with `depth` levels above the root.

    `tower_rule` is a callable ``(base, current, step) -> next field``, a
    `TowerDescriptor`, or an explicit list of fields; None picks the default
    rule (`LeastOutsideRule`).
    """
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    if tower_rule is None:
        tower_rule = LeastOutsideRule()
    elif isinstance(tower_rule, TowerDescriptor):
        tower_rule = DescriptorRule(tower_rule)
    elif isinstance(tower_rule, (list, tuple)):
        fields = list(tower_rule)

        def tower_rule(base, current, step, _f=fields):
            F = _f[step]
            if membership(current.generator, F) is None:
                raise DomainError("explicit tower is not increasing")
            return F

    tower = [K]
    levels = [[TreeNode(Embedding.identity(K), None)]]
    for step in range(depth):
        F = tower_rule(K, tower[-1], step)
        prev = levels[-1]
        level = []
        for pi, node in enumerate(prev):
            for e in extensions(node.embedding, F):
                level.append(TreeNode(e, pi))
        tower.append(F)
        levels.append(level)
    adjoined = list(getattr(tower_rule, "adjoined", []))
    return AutomorphismTree(K, tower, levels, adjoined)


@dataclass
class PathPrefix:
    """A chain of embeddings, one per tower level, starting at the base."""

    base: NumberField
    nodes: list
    tree: AutomorphismTree | None = None
    moved: tuple | None = None  # (element, image) certifying nontriviality, if recorded

    @property
    def depth(self) -> int:
        return len(self.nodes) - 1

    @property
    def top(self) -> Embedding:
        return self.nodes[-1]

    def to_records(self) -> list:
        return [e.to_dict() for e in self.nodes]


def path_restrictions_consistent(p: PathPrefix) -> bool:
    """Every node restricts to its predecessor, and the first to the identity on the base."""
    if not p.nodes:
        return True
    try:
        first = p.nodes[0]
        if first.restrict(p.base).image != p.base.generator:
            return False
        for lower, upper in zip(p.nodes, p.nodes[1:]):
            if upper.restrict(lower.source).image != lower.image:
                return False
    except DomainError:
        return False
    return True


# -- orbits and graphs ---------------------------------------------------------------------
def orbit_of_tuple(K: NumberField, elements) -> set:
    """Images of the tuple under all automorphisms fixing K."""
    elements = list(elements)
    F = K
    for a in elements:
        F = tower_extend(F, a)
    coords = []
    for a in elements:
        h = membership(a, F)
        coords.append((h.poly, a.minpoly))
    out = set()
    for theta in conjugate_list(F.generator, K):
        out.add(tuple(AlgebraicNumber(mp, identify_value(h, theta, mp)) for h, mp in coords))
    return out


def graph_truncation(K: NumberField, depth: int) -> set:
    """Pairs (alpha, s(alpha)) for the first `depth` enumerated alpha and s fixing K."""
    out = set()
    for n in range(depth):
        a = qbar_element(n)
        for b in conjugate_list(a, K):
            out.add((a, b))
    return out


def strong_graph_truncation(K: NumberField, depth: int) -> set:
    """Rows (alpha, beta_1, ..., beta_r): all images of alpha, in canonical order."""
    return {(a, *conjugate_list(a, K)) for a in (qbar_element(n) for n in range(depth))}


def fixed_elements(rows) -> list:
    """Elements whose strong-graph row says they are fixed."""
    return sorted((r[0] for r in rows if len(r) == 2 and r[0] == r[1]), key=qbar_key)


# -- intersections ------------------------------------------------------------------------------
def intersection_witness(t1: TowerDescriptor, t2: TowerDescriptor, depth: int, search=None):
    """A nontrivial chain of embeddings fixing both towers' fields, or None.

    Both towers are taken to stage `depth`; C is the compositum of those two
    fields. A tree over C is grown `depth` levels with the `search` rule
    (default: `LeastOutsideRule`) and searched breadth first for the shallowest
    node moving an element adjoined at its level. None only means no witness
    was found within this depth.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    C = compositum(t1.stage_field(depth), t2.stage_field(depth))
    rule = DescriptorRule(search) if isinstance(search, TowerDescriptor) else (search or LeastOutsideRule())
    tree = tree_build(C, depth, rule)
    queue = deque((lv, k) for lv in range(1, tree.depth + 1) for k in range(len(tree.levels[lv])))
    while queue:
        lv, k = queue.popleft()
        emb = tree.levels[lv][k].embedding
        x = tree.adjoined[lv - 1] if lv - 1 < len(tree.adjoined) else None
        candidates = [x] if x is not None else []
        candidates.append(emb.source.generator)
        for c in candidates:
            img = emb.apply(c)
            if img != c:
                p = tree.path_to(lv, k)
                p.moved = (c, img)
                return p
    return None


def certify_witness(p: PathPrefix, t1: TowerDescriptor, t2: TowerDescriptor, depth: int) -> bool:
    """Independent check: consistent chain, fixes both towers' generators, moves its recorded element."""
    if p is None or p.moved is None or not path_restrictions_consistent(p):
        return False
    top = p.top
    try:
        for t in (t1, t2):
            for g in t.generators_up_to(depth):
                if top.apply(g) != g:
                    return False
        x, img = p.moved
        return top.apply(x) == img and img != x
    except DomainError:
        return False
