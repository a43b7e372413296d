"""Exact Haar measure on the Boolean algebra generated by the sets E(tau).

E(tau) is the set of automorphisms of the algebraic closure that extend the
embedding tau. A finite Boolean combination of such sets is decided one
Galois field K at a time: any K that is Galois over Q and contains every leaf
source splits the group into [K:Q] cosets of equal measure, and each coset lies
entirely inside or outside the set. The measure is the fraction of cosets
inside.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from galois_lab.errors import DomainError, ParseError
from galois_lab.exact.poly import QPoly
from galois_lab.fields import (
    NumberField,
    compositum,
    galois_closure,
    identify_value,
    is_galois,
    membership,
)
from galois_lab.profinite import Embedding, automorphisms, extensions


class ClopenSet:
    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        return Intersection(self, other)

    def __invert__(self):
        return Complement(self)

    def __sub__(self, other):
        return Intersection(self, Complement(other))

    def leaves(self) -> list:
        out = []
        self._collect(out)
        return out

    def _collect(self, out):
        pass


@dataclass(frozen=True, eq=True)
class _Constant(ClopenSet):
    full: bool

    def evaluate(self, marks) -> bool:
        return self.full

    def to_dict(self):
        return "full" if self.full else "empty"


EMPTY = _Constant(False)
FULL = _Constant(True)


@dataclass(frozen=True)
class BasicOpen(ClopenSet):
    tau: Embedding

    def _collect(self, out):
        out.append(self.tau)

    def evaluate(self, marks) -> bool:
        return marks[self.tau]

    def to_dict(self):
        return {"field": self.tau.source.to_dict(), "image": self.tau.image.to_dict()}


Leaf = BasicOpen


@dataclass(frozen=True)
class Union(ClopenSet):
    left: ClopenSet
    right: ClopenSet

    def _collect(self, out):
        self.left._collect(out)
        self.right._collect(out)

    def evaluate(self, marks) -> bool:
        return self.left.evaluate(marks) or self.right.evaluate(marks)

    def to_dict(self):
        return {"or": [self.left.to_dict(), self.right.to_dict()]}


@dataclass(frozen=True)
class Intersection(ClopenSet):
    left: ClopenSet
    right: ClopenSet

    def _collect(self, out):
        self.left._collect(out)
        self.right._collect(out)

    def evaluate(self, marks) -> bool:
        return self.left.evaluate(marks) and self.right.evaluate(marks)

    def to_dict(self):
        return {"and": [self.left.to_dict(), self.right.to_dict()]}


@dataclass(frozen=True)
class Complement(ClopenSet):
    inner: ClopenSet

    def _collect(self, out):
        self.inner._collect(out)

    def evaluate(self, marks) -> bool:
        return not self.inner.evaluate(marks)

    def to_dict(self):
        return {"not": self.inner.to_dict()}


def E(tau: Embedding) -> BasicOpen:
    return BasicOpen(tau)


def clopen_from_dict(d) -> ClopenSet:
    if d == "full":
        return FULL
    if d == "empty":
        return EMPTY
    if not isinstance(d, dict) or len(d) not in (1, 2):
        raise ParseError(f"not a clopen-set record: {d!r}")
    if "or" in d or "and" in d:
        op = "or" if "or" in d else "and"
        parts = [clopen_from_dict(x) for x in d[op]]
        if not parts:
            return EMPTY if op == "or" else FULL
        acc = parts[0]
        for p in parts[1:]:
            acc = Union(acc, p) if op == "or" else Intersection(acc, p)
        return acc
    if "not" in d:
        return Complement(clopen_from_dict(d["not"]))
    if "field" in d and "image" in d:
        from galois_lab.qbar import AlgebraicNumber

        return BasicOpen(Embedding(NumberField.from_dict(d["field"]), AlgebraicNumber.from_dict(d["image"])))
    raise ParseError(f"not a clopen-set record: {d!r}")


# -- measure ---------------------------------------------------------------------------
def common_overfield(taus) -> NumberField:
    """Compositum of the Galois closures of the sources, left to right."""
    K = NumberField.rationals()
    for tau in taus:
        S = tau.source
        if membership(S.generator, K) is None:
            K = compositum(K, galois_closure(S))
    return K


def _marks_for(tau: Embedding, K: NumberField) -> frozenset:
    """Positions of the roots rho of K's generator polynomial whose automorphism extends tau."""
    S = tau.source
    n = K.degree
    if S.is_rationals():
        return frozenset(range(n))
    h = membership(S.generator, K)
    if h is None:
        raise DomainError("overfield does not contain a leaf's source field")
    target = tau.image.position
    return frozenset(
        k for k, rho in enumerate(K.generator.rational_conjugates())
        if identify_value(h.poly, rho, S.minpoly) == target
    )


def marked_positions(s: ClopenSet, K: NumberField) -> frozenset:
    """Cosets of Gal(Qbar/K) (indexed by root position) contained in s."""
    taus = list(dict.fromkeys(s.leaves()))
    marks = {tau: _marks_for(tau, K) for tau in taus}
    return frozenset(
        k for k in range(K.degree) if s.evaluate({tau: (k in marks[tau]) for tau in taus})
    )


def measure(s: ClopenSet, overfield: NumberField | None = None) -> Fraction:
    """Exact Haar measure of a clopen set."""
    taus = list(dict.fromkeys(s.leaves()))
    K = overfield if overfield is not None else common_overfield(taus)
    if overfield is not None and not is_galois(K):
        raise DomainError("the overfield must be Galois over Q")
    return Fraction(len(marked_positions(s, K)), K.degree)


def union_formula(tau1: Embedding, tau2: Embedding, overfield: NumberField | None = None) -> Fraction:
    """(r + m - l) / d from extension counts to a common Galois overfield of degree d."""
    K = overfield or common_overfield([tau1, tau2])
    ext1 = {e.image for e in extensions(tau1, K)}
    ext2 = {e.image for e in extensions(tau2, K)}
    r, m, l = len(ext1), len(ext2), len(ext1 & ext2)
    return Fraction(r + m - l, K.degree)


def coset_count_union(tau1: Embedding, tau2: Embedding, overfield: NumberField | None = None) -> Fraction:
    """Measure of E(tau1) | E(tau2) by counting group elements in two cosets.

    Each E(tau) meets Gal(K/Q) in a coset g0 * H, H the stabilizer of the
    source generator; everything here is exact composition of coordinates.
    """
    K = overfield or common_overfield([tau1, tau2])
    G = automorphisms(K)
    m = K.minpoly
    coords = [QPoly(list(membership(e.image, K).coordinates)) for e in G.elements]

    def coset(tau):
        S = tau.source
        if S.is_rationals():
            return set(range(G.order))
        hs = membership(S.generator, K).poly
        him = membership(tau.image, K).poly
        acts = [hs.compose(c) % m for c in coords]  # g(gamma_S) for each g
        H = [i for i, a in enumerate(acts) if a == hs]
        g0 = next(i for i, a in enumerate(acts) if a == him)
        return {G.table[g0][h] for h in H}

    return Fraction(len(coset(tau1) | coset(tau2)), G.order)


def tower_measures(t, depth: int) -> list:
    """mu(Gal(Qbar/K_j)) = 1/[K_j:Q] for the first `depth` stages of a tower."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    return [Fraction(1, t.stage_field(j).degree) for j in range(1, depth + 1)]


def parse_clopen(text: str) -> ClopenSet:
    """Expressions like ``E(Q(sqrt(2)):-sqrt(2)) | ~E(Q(sqrt(3)):id)``.

    ``E(FIELD:IMAGE)`` is a basic open; IMAGE is ``id``, an expression,
    or ``#k`` for the k-th root (canonical order) of the generator's minpoly.
    Operators: ``|`` union, ``&`` intersection, ``~`` complement, and the
    words ``FULL`` and ``EMPTY``. A JSON record is also accepted.
    """
    import json

    t = text.strip()
    if t.startswith("{") or t.startswith('"'):
        try:
            return clopen_from_dict(json.loads(t))
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    return _ClopenParser(t).parse()


class _ClopenParser:
    def __init__(self, text):
        self.s = text
        self.i = 0

    def parse(self):
        v = self.union()
        self.ws()
        if self.i != len(self.s):
            raise ParseError(f"unexpected input at {self.s[self.i:]!r}")
        return v

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, tok):
        self.ws()
        return self.s.startswith(tok, self.i)

    def union(self):
        v = self.inter()
        while self.peek("|"):
            self.i += 1
            v = Union(v, self.inter())
        return v

    def inter(self):
        v = self.unary()
        while self.peek("&"):
            self.i += 1
            v = Intersection(v, self.unary())
        return v

    def unary(self):
        if self.peek("~"):
            self.i += 1
            return Complement(self.unary())
        if self.peek("("):
            self.i += 1
            v = self.union()
            if not self.peek(")"):
                raise ParseError("missing ')'")
            self.i += 1
            return v
        for word, const in (("FULL", FULL), ("EMPTY", EMPTY)):
            if self.peek(word):
                self.i += len(word)
                return const
        if self.peek("E("):
            self.i += 2
            start, depth = self.i, 1
            while self.i < len(self.s) and depth:
                depth += {"(": 1, ")": -1}.get(self.s[self.i], 0)
                self.i += 1
            if depth:
                raise ParseError("unbalanced parentheses in E(...)")
            return BasicOpen(_parse_embedding(self.s[start:self.i - 1]))
        raise ParseError(f"unexpected input at {self.s[self.i:]!r}")


def _parse_embedding(body: str) -> Embedding:
    from galois_lab.expressions import parse_algebraic

    if ":" not in body:
        raise ParseError("basic open needs FIELD:IMAGE")
    ftext, itext = body.rsplit(":", 1)
    from galois_lab.fields import parse_field

    K = parse_field(ftext)
    itext = itext.strip()
    if itext == "id":
        return Embedding.identity(K)
    if itext.startswith("#"):
        return Embedding(K, K.generator.rational_conjugates()[int(itext[1:])])
    img = parse_algebraic(itext)
    if img.minpoly != K.minpoly:
        # image given as the image of a field element: accept the image of the
        # generator only
        raise DomainError("image must be a conjugate of the field's generator")
    return Embedding(K, img)
