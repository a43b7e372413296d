"""Exact computation with algebraic numbers, number fields and Galois towers."""
