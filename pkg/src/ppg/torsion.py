"""Multi-prime torsion groups as direct sums of their primary components.

A torsion group splits as the direct sum over primes p of its p-primary
parts, each a pure subgroup; p-torsion tuples therefore have the same pp-type
in the full group as in the p-component, which is how the triple wrapper
below computes them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityError, MismatchedGroup
from .groups import Element, GroupSpec, elem_add, elem_neg, elem_smul, order_exp, vp
from .heights import in_p_alpha
from .ordinals import Ordinal


@dataclass(frozen=True)
class TorsionGroupSpec:
    components: tuple  # of GroupSpec, ascending prime

    @staticmethod
    def make(components) -> "TorsionGroupSpec":
        comps = sorted(components, key=lambda c: c.p)
        primes = [c.p for c in comps]
        if len(set(primes)) != len(primes):
            raise ValueError("one component per prime")
        return TorsionGroupSpec(tuple(comps))

    @property
    def primes(self):
        return tuple(c.p for c in self.components)

    def component(self, p: int) -> GroupSpec:
        for comp in self.components:
            if comp.p == p:
                return comp
        raise KeyError(f"no component at prime {p}")

    def __repr__(self):
        from .dsl import print_group

        return f"TorsionGroupSpec[{print_group(self)}]"


@dataclass(frozen=True)
class TorsionElement:
    spec: TorsionGroupSpec
    parts: tuple  # of (p, Element), nonzero parts only, ascending prime

    @staticmethod
    def make(spec: TorsionGroupSpec, parts: dict) -> "TorsionElement":
        items = []
        for p, x in sorted(parts.items()):
            if x.group != spec.component(p):
                raise MismatchedGroup("part lives in the wrong component")
            if not x.is_zero:
                items.append((p, x))
        return TorsionElement(spec, tuple(items))

    def part(self, p: int) -> Element:
        for q, x in self.parts:
            if q == p:
                return x
        return Element.zero(self.spec.component(p))

    @property
    def is_zero(self) -> bool:
        return not self.parts

    def is_p_torsion(self, p: int) -> bool:
        return all(q == p for q, _ in self.parts)

    def __add__(self, other: "TorsionElement") -> "TorsionElement":
        if self.spec != other.spec:
            raise MismatchedGroup("elements live in different torsion groups")
        parts = {p: x for p, x in self.parts}
        for p, x in other.parts:
            parts[p] = elem_add(parts[p], x) if p in parts else x
        return TorsionElement.make(self.spec, parts)

    def __neg__(self) -> "TorsionElement":
        return TorsionElement.make(self.spec, {p: elem_neg(x) for p, x in self.parts})

    def __rmul__(self, z: int) -> "TorsionElement":
        return TorsionElement.make(self.spec, {p: elem_smul(z, x) for p, x in self.parts})

    def order(self) -> int:
        out = 1
        for p, x in self.parts:
            out *= p ** order_exp(x)
        return out


def torsion_divides(spec: TorsionGroupSpec, s: int, x: TorsionElement) -> bool:
    """Whether s | x in the torsion group; s = 0 means x = 0.

    Divisibility decomposes over the primary components, where only the
    p-part of s matters.
    """
    if s == 0:
        return x.is_zero
    for p, part in x.parts:
        k = vp(s, p) if s % p == 0 else 0
        if k and not in_p_alpha(spec.component(p), part, Ordinal.finite(k)):
            return False
    return True


def torsion_pp_type(spec: TorsionGroupSpec, p: int, elems):
    """Triple of a p-torsion tuple, computed in the p-primary component."""
    from .pptypes import pp_type_triple

    comp = spec.component(p)
    parts = []
    for x in elems:
        if not x.is_p_torsion(p):
            raise ArityError("tuple entry is not p-torsion")
        parts.append(x.part(p))
    return pp_type_triple(comp, parts)
