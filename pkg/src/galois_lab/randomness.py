"""Measure tests on Galois groups and a finite-stage random-automorphism builder.

`build_random_automorphism` grows a Galois field L and an automorphism of it
in stages. Odd stages take the next tower to avoid, pick one of its
generators outside L, and choose an extension that moves it, so the final
automorphism is outside the absolute Galois group of that tower's field. Even
stages pick an element whose minimal polynomial stays irreducible over L and
keep it fixed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from galois_lab.errors import DomainError, StageFailure
from galois_lab.fields import (
    NumberField,
    closure_adjoining,
    conjugates_over,
    membership,
    relative_degree,
)
from galois_lab.haar import tower_measures
from galois_lab.profinite import Embedding, PathPrefix, extensions, path_restrictions_consistent
from galois_lab.qbar import AlgebraicNumber, qbar_element, qbar_key
from galois_lab.towers import TowerDescriptor


# -- measure tests -------------------------------------------------------------------
@dataclass
class MuTest:
    components: list

    def component(self, i: int) -> TowerDescriptor:
        return self.components[i]

    @classmethod
    def prime_sqrt_family(cls, count: int) -> "MuTest":
        """Component i: square roots of the first i+1 primes."""
        return cls([TowerDescriptor.prime_sqrt(f"S{i}", 0, 1, i + 1) for i in range(count)])


def mu_test_validate(test: MuTest, i: int, depth: int) -> bool:
    """Whether the stage-`depth` group of component i has measure below 2**-i."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    mu = tower_measures(test.component(i), depth)[-1]
    return mu < Fraction(1, 2 ** i)


# -- partial automorphisms -------------------------------------------------------------
@dataclass
class StageRecord:
    stage: int
    element: AlgebraicNumber
    moved: bool
    avoid_index: int | None
    image: AlgebraicNumber
    degree: int
    tower_position: int | None = None  # index of the element in its avoid tower

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "element": self.element.to_dict(),
            "moved": self.moved,
            "avoid": self.avoid_index,
            "image": self.image.to_dict(),
            "degree": self.degree,
            "position": self.tower_position,
        }


@dataclass
class PartialAutomorphism:
    domain: NumberField
    action: Embedding
    log: list = field(default_factory=list)
    history: list = field(default_factory=list)  # action after each stage

    def apply(self, x: AlgebraicNumber) -> AlgebraicNumber:
        return self.action.apply(x)

    def as_path(self) -> PathPrefix:
        Q = NumberField.rationals()
        return PathPrefix(Q, [Embedding.identity(Q)] + list(self.history))


def member_at_depth(p: PartialAutomorphism, t: TowerDescriptor, depth: int) -> bool:
    """No generator of t up to `depth` that lies in p's domain is moved."""
    for g in t.generators_up_to(depth):
        if membership(g, p.domain) is not None and p.apply(g) != g:
            return False
    return True


@dataclass
class NonRandomnessWitness:
    catalog_index: int
    entry: TowerDescriptor
    depth: int
    containments: list  # (generator, smallest field stage containing it)


def non_randomness_witness(field_tower: TowerDescriptor, catalog, depth: int, field_depth: int | None = None):
    """First catalog tower whose generators up to `depth` all lie in the field's tower.

    Membership is tested in the stages of `field_tower` up to `field_depth`
    (default 2 * depth). None means no entry is contained within depth.
    """
    limit = 2 * depth if field_depth is None else field_depth
    if field_tower.is_finite():
        limit = min(limit, field_tower.length)
    if not catalog:
        return None
    if depth == 0:
        return NonRandomnessWitness(0, catalog[0], 0, [])
    top = field_tower.stage_field(limit)

    def least_stage(g):
        # membership is monotone along the tower: test the top, then search down
        if membership(g, top) is None:
            return None
        lo, hi = min(1, limit), limit
        while lo < hi:
            mid = (lo + hi) // 2
            if membership(g, field_tower.stage_field(mid)) is not None:
                hi = mid
            else:
                lo = mid + 1
        return lo

    for idx, entry in enumerate(catalog):
        found = []
        for g in entry.generators_up_to(depth):
            where = least_stage(g)
            if where is None:
                break
            found.append((g, where))
        else:
            if found:
                return NonRandomnessWitness(idx, entry, depth, found)
    return None


# -- the staged construction -------------------------------------------------------------------
class _Policy:
    def __init__(self, policy, seed):
        if policy not in ("least", "random"):
            raise DomainError(f"unknown choice policy {policy!r}")
        self.random = policy == "random"
        self.rng = random.Random(seed)

    def pick(self, options: list, key):
        options = sorted(options, key=key)
        if not options:
            return None
        if self.random:
            return self.rng.choice(options[: min(3, len(options))])
        return options[0]


def _image_key(x):
    return lambda e: (qbar_key(e.apply(x)), qbar_key(e.image))


def build_random_automorphism(avoid, stages: int, policy: str = "least", seed=None) -> PartialAutomorphism:
    """Run stages 1..`stages` of the construction.

    Odd stage 2n+1 works against ``avoid[n % len(avoid)]``: every tower is
    handled once before any is revisited, and a revisit moves a fresh
    generator. With an empty avoid list odd stages run like even ones (fix a
    new element); this is the degenerate mode. A finite avoid tower whose
    generators all lie in the current field raises StageFailure.
    """
    if stages < 1:
        raise DomainError("need at least one stage")
    choose = _Policy(policy, seed)
    L = NumberField.rationals()
    sigma = Embedding.identity(L)
    out = PartialAutomorphism(L, sigma)
    cursor = 0
    for s in range(1, stages + 1):
        if s % 2 == 1 and avoid:
            target = (s // 2) % len(avoid)
            T = avoid[target]
            outside = []
            i = 0
            while len(outside) < (3 if choose.random else 1):
                g = T.generator(i)
                if g is None:
                    break
                if membership(g, L) is None:
                    outside.append((i, g))
                i += 1
            if not outside:
                raise StageFailure(s, f"avoid tower {T.name!r} is exhausted inside the current field")
            where, x = choose.pick(outside, lambda a: a[0])
            L2 = closure_adjoining(L, x)
            options = [e for e in extensions(sigma, L2) if e.apply(x) != x]
            if not options:
                raise StageFailure(s, "no extension moves the chosen element")
            sigma = choose.pick(options, _image_key(x))
            rec = StageRecord(s, x, True, target, sigma.apply(x), L2.degree, where)
        else:
            while True:
                x = qbar_element(cursor)
                cursor += 1
                if membership(x, L) is None and relative_degree(x, L) == x.degree:
                    break
            L2 = closure_adjoining(L, x)
            options = [e for e in extensions(sigma, L2) if e.apply(x) == x]
            if not options:
                raise StageFailure(s, "no extension fixes the chosen element")
            sigma = choose.pick(options, lambda e: qbar_key(e.image))
            rec = StageRecord(s, x, False, None, x, L2.degree)
        L = L2
        out.log.append(rec)
        out.history.append(sigma)
    out.domain = L
    out.action = sigma
    return out


def verify_construction(p: PartialAutomorphism, avoid) -> dict:
    """Independent re-check of the construction's three guarantees."""
    a = True
    b = True
    handled = set()
    for rec in p.log:
        img = p.apply(rec.element)
        if rec.moved:
            conj = conjugates_over(rec.element, NumberField.rationals())
            tower = avoid[rec.avoid_index]
            in_tower = rec.tower_position is not None and tower.generator(rec.tower_position) == rec.element
            a = a and img != rec.element and img in conj and in_tower
            handled.add(rec.avoid_index)
        else:
            b = b and img == rec.element
    if avoid:
        odd = (len(p.log) + 1) // 2
        a = a and handled == set(range(min(len(avoid), odd)))
    c = path_restrictions_consistent(p.as_path())
    return {"moved": a, "fixed": b, "consistent": c}
