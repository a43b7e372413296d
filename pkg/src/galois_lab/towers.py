"""Finitely described towers of subfields of the algebraic closure."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import sympy

from galois_lab.errors import ParseError
from galois_lab.fields import NumberField, tower_extend
from galois_lab.qbar import AlgebraicNumber, root_of_unity, sqrt

RULES = ("explicit", "prime-sqrt", "pow2-roots-of-unity")

_CACHE_LOCK = threading.Lock()
_STAGE_CACHE: dict = {}


@dataclass(frozen=True)
class TowerDescriptor:
    """Generators x_0, x_1, ... of a field, given by a rule.

    ``prime-sqrt`` takes ``offset`` (index of the first prime, 0 for 2),
    ``stride`` and an optional ``count``; ``pow2-roots-of-unity`` yields
    exp(2*pi*i / 2**(k+2)) for k = 0, 1, ..., optionally limited by ``count``;
    ``explicit`` lists the generators.
    """

    name: str
    rule: str
    parameters: tuple = ()
    generators: tuple = field(default=(), compare=True)

    def __post_init__(self):
        if self.rule not in RULES:
            raise ParseError(f"unknown tower rule {self.rule!r}")
        if isinstance(self.parameters, dict):
            object.__setattr__(self, "parameters", tuple(sorted(self.parameters.items())))

    # constructors
    @classmethod
    def explicit(cls, name: str, generators) -> "TowerDescriptor":
        return cls(name, "explicit", (("count", len(generators)),), tuple(generators))

    @classmethod
    def prime_sqrt(cls, name: str = "prime-sqrt", offset: int = 0, stride: int = 1, count=None):
        params = {"offset": offset, "stride": stride}
        if count is not None:
            params["count"] = count
        return cls(name, "prime-sqrt", params)

    @classmethod
    def pow2_roots_of_unity(cls, name: str = "pow2-roots-of-unity", count=None):
        return cls(name, "pow2-roots-of-unity", {} if count is None else {"count": count})

    @classmethod
    def trivial(cls, name: str = "Q") -> "TowerDescriptor":
        return cls.explicit(name, [])

    # generator access
    @property
    def params(self) -> dict:
        return dict(self.parameters)

    @property
    def length(self):
        """Number of generators, or None for an infinite rule."""
        if self.rule == "explicit":
            return len(self.generators)
        return self.params.get("count")

    def is_finite(self) -> bool:
        return self.length is not None

    def generator(self, i: int):
        """x_i, or None past the end of a finite tower."""
        n = self.length
        if i < 0 or (n is not None and i >= n):
            return None
        if self.rule == "explicit":
            return self.generators[i]
        p = self.params
        if self.rule == "prime-sqrt":
            return sqrt(int(sympy.prime(p.get("offset", 0) + i * p.get("stride", 1) + 1)))
        return root_of_unity(2 ** (i + 2), 1)

    def generators_up_to(self, depth: int) -> list:
        out = []
        for i in range(depth):
            g = self.generator(i)
            if g is None:
                break
            out.append(g)
        return out

    def stage_field(self, j: int) -> NumberField:
        """Q(x_0, ..., x_{j-1}); cached per descriptor."""
        key = (self, j)
        with _CACHE_LOCK:
            if key in _STAGE_CACHE:
                return _STAGE_CACHE[key]
        if j <= 0:
            F = NumberField.rationals()
        else:
            F = self.stage_field(j - 1)
            g = self.generator(j - 1)
            if g is not None:
                F = tower_extend(F, g)
        with _CACHE_LOCK:
            return _STAGE_CACHE.setdefault(key, F)

    def stage_degrees(self, depth: int) -> list:
        return [self.stage_field(j).degree for j in range(1, depth + 1)]

    # serialization
    def to_dict(self) -> dict:
        params = dict(self.parameters)
        if self.rule == "explicit":
            params = {"generators": [g.to_dict() for g in self.generators]}
        return {"name": self.name, "rule": self.rule, "parameters": params}

    @classmethod
    def from_dict(cls, d) -> "TowerDescriptor":
        try:
            name, rule, params = d["name"], d["rule"], dict(d.get("parameters", {}))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"not a tower record: {d!r}") from exc
        if rule == "explicit":
            gens = [AlgebraicNumber.from_dict(g) for g in params.get("generators", [])]
            return cls.explicit(name, gens)
        if rule == "prime-sqrt":
            return cls.prime_sqrt(name, int(params.get("offset", 0)), int(params.get("stride", 1)), params.get("count"))
        if rule == "pow2-roots-of-unity":
            return cls.pow2_roots_of_unity(name, params.get("count"))
        raise ParseError(f"unknown tower rule {rule!r}")


def parse_tower(text: str) -> TowerDescriptor:
    """``prime-sqrt``, ``prime-sqrt:offset:stride[:count]``, ``pow2-roots-of-unity[:count]``,
    ``Q``, ``Q(a, b, ...)`` (explicit) or a JSON tower record."""
    import json

    from galois_lab.expressions import parse_algebraic as parse_number

    t = text.strip()
    if t.startswith("{"):
        try:
            return TowerDescriptor.from_dict(json.loads(t))
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    head, *rest = t.split(":")
    try:
        nums = [int(v) for v in rest]
    except ValueError:
        raise ParseError(f"bad tower parameters in {text!r}") from None
    if head == "prime-sqrt":
        offset, stride, count = (nums + [0, 1, None][len(nums):])[:3]
        return TowerDescriptor.prime_sqrt(t, offset, stride, count)
    if head == "pow2-roots-of-unity":
        return TowerDescriptor.pow2_roots_of_unity(t, nums[0] if nums else None)
    if t == "Q":
        return TowerDescriptor.trivial()
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
        return TowerDescriptor.explicit(t, [parse_number(p) for p in parts if p.strip()])
    raise ParseError(f"unknown tower {text!r}")
