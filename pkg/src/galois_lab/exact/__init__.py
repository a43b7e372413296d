"""Exact arithmetic core: rational polynomials, enclosures, certified roots."""

from galois_lab.exact.boxes import Ball, Box
from galois_lab.exact.poly import (
    QPoly,
    Rational,
    composed_product,
    composed_sum,
    discriminant,
    factor_q,
    format_rational,
    height,
    is_irreducible,
    is_squarefree,
    parse_rational,
    poly_gcd,
    resultant,
    squarefree_part,
)
from galois_lab.exact.roots import (
    RootSystem,
    identify_root,
    isolate_roots,
    refine_box,
    root_system,
)

__all__ = [
    "Ball", "Box", "QPoly", "Rational", "RootSystem", "composed_product",
    "composed_sum", "discriminant", "factor_q", "format_rational", "height",
    "identify_root", "is_irreducible", "is_squarefree", "isolate_roots",
    "parse_rational", "poly_gcd", "refine_box", "resultant", "root_system",
    "squarefree_part",
]
