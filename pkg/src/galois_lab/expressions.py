"""Parsing of algebraic-number and polynomial expressions.

Input is parsed with Python's `ast` module and evaluated by a small walker,
never by `eval`. The accepted language: integer and decimal-free rational
literals, ``+ - * /``, powers with integer exponents (``^`` or ``**``), and

* ``sqrt(q)``: principal square root;
* ``root(q, n)``: the real positive n-th root of a positive rational;
* ``I`` or ``i``: the imaginary unit;
* ``zeta(n)`` / ``zeta(n, k)``: exp(2*pi*i*k/n);
* ``rootof([c0, c1, ...], k)``: the k-th root, in canonical order, of an
  irreducible polynomial.

Polynomials additionally use the variable ``x``.
"""

from __future__ import annotations

import ast
from fractions import Fraction

from galois_lab.errors import DomainError, ParseError
from galois_lab.exact.poly import QPoly, factor_q
from galois_lab.qbar import AlgebraicNumber, parse_record_text, qbar_inv, root_of_unity, sqrt


def _nth_root(q: Fraction, n: int) -> AlgebraicNumber:
    if q <= 0 or n < 1:
        raise DomainError("root(q, n) needs q > 0 and n >= 1")
    p = QPoly([-q] + [0] * (n - 1) + [1])
    # the real positive root is a root of exactly one irreducible factor
    for f, _ in factor_q(p):
        a = _positive_real_root(f)
        if a is not None:
            return a
    raise AssertionError("unreachable")


def _positive_real_root(f: QPoly):
    from galois_lab.exact.roots import root_system

    if f.degree == 1:
        r = -f.coeffs[0]
        return AlgebraicNumber.rational(r) if r > 0 else None
    rs = root_system(f)
    reals = [k for k in range(f.degree) if rs.is_real(k)]
    for k in reals:
        if rs.box(k).re_lo > 0:
            return AlgebraicNumber(f, k)
    return None


def _literal(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_literal(node.operand)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        return _literal(node.left) / _literal(node.right)
    raise ParseError("expected a rational literal")


def _int_literal(node) -> int:
    v = _literal(node)
    if v.denominator != 1:
        raise ParseError("expected an integer")
    return int(v)


class _Evaluator:
    """Walks the tree with a pluggable number type."""

    def __init__(self, allow_x: bool):
        self.allow_x = allow_x

    def run(self, text: str):
        src = text.strip().replace("^", "**")
        if not src:
            raise ParseError("empty expression")
        try:
            tree = ast.parse(src, mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"cannot parse {text!r}") from exc
        return self.visit(tree.body)

    def visit(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"unsupported literal {node.value!r}")
            return self.const(Fraction(node.value))
        if isinstance(node, ast.Name):
            if node.id in ("I", "i"):
                return self.const_alg(sqrt(-1))
            if node.id == "x" and self.allow_x:
                return self.var()
            raise ParseError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return self.neg(v)
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                k = _int_literal(node.right)
                return self.pow(self.visit(node.left), k)
            a, b = self.visit(node.left), self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return self.add(a, b)
            if isinstance(node.op, ast.Sub):
                return self.add(a, self.neg(b))
            if isinstance(node.op, ast.Mult):
                return self.mul(a, b)
            if isinstance(node.op, ast.Div):
                return self.div(a, b)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            return self.call(node.func.id, node.args)
        raise ParseError(f"unsupported syntax: {ast.dump(node)[:60]}")

    def call(self, name, args):
        if name == "sqrt" and len(args) == 1:
            return self.const_alg(sqrt(_literal(args[0])))
        if name == "root" and len(args) == 2:
            return self.const_alg(_nth_root(_literal(args[0]), _int_literal(args[1])))
        if name == "zeta" and len(args) in (1, 2):
            k = _int_literal(args[1]) if len(args) == 2 else 1
            return self.const_alg(root_of_unity(_int_literal(args[0]), k))
        if name == "rootof" and len(args) == 2 and isinstance(args[0], ast.List):
            p = QPoly([_literal(c) for c in args[0].elts])
            return self.const_alg(AlgebraicNumber.root(p, _int_literal(args[1])))
        raise ParseError(f"unknown function {name}/{len(args)}")


class _AlgebraicEvaluator(_Evaluator):
    def __init__(self):
        super().__init__(allow_x=False)

    def const(self, q):
        return AlgebraicNumber.rational(q)

    def const_alg(self, a):
        return a

    def neg(self, a):
        return -a

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if b.is_zero():
            raise DomainError("division by zero")
        return a * qbar_inv(b)

    def pow(self, a, k):
        if k < 0 and a.is_zero():
            raise DomainError("division by zero")
        return a ** k


class _PolyEvaluator(_Evaluator):
    """Polynomials with algebraic coefficients, as {degree: AlgebraicNumber}."""

    def __init__(self):
        super().__init__(allow_x=True)

    def const(self, q):
        return {0: AlgebraicNumber.rational(q)} if q else {}

    def const_alg(self, a):
        return {} if a.is_zero() else {0: a}

    def var(self):
        return {1: AlgebraicNumber.rational(1)}

    def _clean(self, p):
        return {k: v for k, v in p.items() if not v.is_zero()}

    def neg(self, a):
        return {k: -v for k, v in a.items()}

    def add(self, a, b):
        out = dict(a)
        for k, v in b.items():
            out[k] = out[k] + v if k in out else v
        return self._clean(out)

    def mul(self, a, b):
        out = {}
        for i, u in a.items():
            for j, v in b.items():
                t = u * v
                out[i + j] = out[i + j] + t if i + j in out else t
        return self._clean(out)

    def div(self, a, b):
        if set(b) != {0}:
            raise ParseError("can only divide a polynomial by a constant")
        inv = qbar_inv(b[0])
        return {k: v * inv for k, v in a.items()}

    def pow(self, a, k):
        if k < 0:
            raise ParseError("negative power of a polynomial")
        out = self.const(Fraction(1))
        for _ in range(k):
            out = self.mul(out, a)
        return out


def parse_algebraic(text: str) -> AlgebraicNumber:
    t = text.strip()
    if t.startswith("{"):
        return AlgebraicNumber.from_dict(parse_record_text(t))
    return _AlgebraicEvaluator().run(t)


def parse_poly_algebraic(text: str) -> dict:
    """{degree: AlgebraicNumber} for a polynomial in x."""
    t = text.strip()
    if t.startswith("["):
        p = QPoly.from_text(t)
        return {k: AlgebraicNumber.rational(c) for k, c in enumerate(p.coeffs) if c}
    return _PolyEvaluator().run(t)


def parse_qpoly(text: str) -> QPoly:
    terms = parse_poly_algebraic(text)
    if not all(v.is_rational() for v in terms.values()):
        raise DomainError("polynomial has irrational coefficients; use --over")
    n = max(terms, default=-1)
    return QPoly([terms[k].as_rational() if k in terms else 0 for k in range(n + 1)])


def parse_field_poly(text: str, K):
    """Polynomial over a number field K; every coefficient must lie in K."""
    from galois_lab.fields import FieldPoly, membership

    terms = parse_poly_algebraic(text)
    n = max(terms, default=-1)
    coeffs = []
    for k in range(n + 1):
        if k not in terms:
            coeffs.append(0)
            continue
        h = membership(terms[k], K)
        if h is None:
            raise DomainError(f"coefficient of x^{k} is not in the field")
        coeffs.append(h)
    return FieldPoly(K, coeffs)
