"""Atoms, group specs, elements in normal form, and exact element arithmetic.

A group spec denotes a countable abelian p-group assembled from three atom
families: Z(p^k) (cyclic), Z(p^inf) (Pruefer, stored as exact fractions), and
H(w+n) (generalized Pruefer, generated by a_0, a_1, ... with p^n*a_0 = 0 and
p^m*a_m = a_0 for m >= 1). Elements are finite-support coordinate maps with a
unique normal form per coordinate, so equality is syntactic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .config import scope_cap
from .errors import MismatchedGroup, SearchSpaceTooLarge


class _Aleph0:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "aleph0"


ALEPH0 = _Aleph0()


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True, slots=True)
class Cyclic:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("cyclic exponent must be >= 1")

    def sort_key(self):
        return (0, self.k)

    def __repr__(self):
        return f"Cyclic({self.k})"


@dataclass(frozen=True, slots=True)
class GenPruefer:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("generalized Pruefer length parameter must be >= 1")

    def sort_key(self):
        return (1, self.n)

    def __repr__(self):
        return f"GenPruefer({self.n})"


@dataclass(frozen=True, slots=True)
class Pruefer:
    def sort_key(self):
        return (2, 0)

    def __repr__(self):
        return "Pruefer()"


Atom = Cyclic | GenPruefer | Pruefer


# ---------------------------------------------------------------------------
# group specs


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, slots=True)
class GroupSpec:
    """A direct sum of atoms with multiplicities, in canonical order."""

    p: int
    summands: tuple  # of (Atom, multiplicity) with multiplicity int >= 1 or ALEPH0

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @staticmethod
    def make(p: int, summands) -> "GroupSpec":
        merged: dict = {}
        for atom, mult in summands:
            if mult is not ALEPH0 and (not isinstance(mult, int) or mult < 1):
                raise ValueError("multiplicity must be a positive integer or ALEPH0")
            if atom in merged:
                cur = merged[atom]
                merged[atom] = ALEPH0 if (cur is ALEPH0 or mult is ALEPH0) else cur + mult
            else:
                merged[atom] = mult
        ordered = tuple(sorted(merged.items(), key=lambda am: am[0].sort_key()))
        return GroupSpec(p, ordered)

    # -- shape queries ------------------------------------------------------

    def atom(self, i: int) -> Atom:
        return self.summands[i][0]

    def multiplicity(self, i: int):
        return self.summands[i][1]

    def check_coord(self, i: int, j: int):
        if not (0 <= i < len(self.summands)):
            raise ValueError(f"no summand {i}")
        mult = self.summands[i][1]
        if mult is not ALEPH0 and not (0 <= j < mult):
            raise ValueError(f"copy index {j} exceeds multiplicity {mult}")

    @property
    def is_finite(self) -> bool:
        return all(
            isinstance(atom, Cyclic) and mult is not ALEPH0 for atom, mult in self.summands
        )

    def order(self):
        """Group order for finite specs, None otherwise."""
        if not self.is_finite:
            return None
        e = sum(atom.k * mult for atom, mult in self.summands)
        return self.p**e

    def exponent(self):
        """Least e with p^e * M = 0, or None when unbounded."""
        e = 0
        for atom, _ in self.summands:
            if not isinstance(atom, Cyclic):
                return None
            e = max(e, atom.k)
        return e

    def has_atom(self, cls) -> bool:
        return any(isinstance(atom, cls) for atom, _ in self.summands)

    def direct_sum(self, other: "GroupSpec") -> "GroupSpec":
        if self.p != other.p:
            raise MismatchedGroup("cannot sum specs over different primes")
        return GroupSpec.make(self.p, self.summands + other.summands)

    def copies(self):
        """Iterate concrete (i, j) coordinates; only valid for finite multiplicities."""
        for i, (_, mult) in enumerate(self.summands):
            if mult is ALEPH0:
                raise SearchSpaceTooLarge("cannot iterate copies of an aleph0 summand")
            for j in range(mult):
                yield (i, j)

    def __repr__(self):
        from .dsl import print_group

        return f"GroupSpec[{print_group(self)}]"


def universal_group_spec(p: int, n_max: int) -> GroupSpec:
    """Z(p)^(w) + ... + Z(p^n_max)^(w) + Z(p^inf)^(w): the target of pure embeddings."""
    summands = [(Cyclic(k), ALEPH0) for k in range(1, n_max + 1)]
    summands.append((Pruefer(), ALEPH0))
    return GroupSpec.make(p, summands)


# ---------------------------------------------------------------------------
# per-atom normal forms
#
# Cyclic(k):      int c, 0 <= c < p^k
# Pruefer:        (a, k) = class of a/p^k; zero is (0, 0), else 0 < a < p^k, p !| a
# GenPruefer(n):  (c0, tail) with 0 <= c0 < p^n, tail a sorted tuple of (m, c_m),
#                 0 < c_m < p^m; reduction carries p^m * a_m = a_0 overflow into c0


def _pruefer_canon(num: int, depth: int, p: int):
    mod = p**depth
    num %= mod
    if num == 0:
        return (0, 0)
    while num % p == 0:
        num //= p
        depth -= 1
    return (num, depth)


def _pruefer_add(x, y, p):
    a1, k1 = x
    a2, k2 = y
    k = max(k1, k2)
    num = a1 * p ** (k - k1) + a2 * p ** (k - k2)
    return _pruefer_canon(num, k, p)


def _pruefer_smul(z, x, p):
    a, k = x
    return _pruefer_canon(z * a, k, p)


def _gp_canon(n, c0, tail_items, p):
    tail = []
    carry = 0
    for m, c in sorted(tail_items):
        q, r = divmod(c, p**m)
        carry += q
        if r:
            tail.append((m, r))
    c0 = (c0 + carry) % p**n
    return (c0, tuple(tail))


def _gp_add(n, x, y, p):
    c0 = x[0] + y[0]
    merged: dict = dict(x[1])
    for m, c in y[1]:
        merged[m] = merged.get(m, 0) + c
    return _gp_canon(n, c0, merged.items(), p)


def _gp_smul(n, z, x, p):
    return _gp_canon(n, z * x[0], [(m, z * c) for m, c in x[1]], p)


def _atom_add(atom, x, y, p):
    if isinstance(atom, Cyclic):
        return (x + y) % p**atom.k
    if isinstance(atom, Pruefer):
        return _pruefer_add(x, y, p)
    return _gp_add(atom.n, x, y, p)


def _atom_smul(atom, z, x, p):
    if isinstance(atom, Cyclic):
        return (z * x) % p**atom.k
    if isinstance(atom, Pruefer):
        return _pruefer_smul(z, x, p)
    return _gp_smul(atom.n, z, x, p)


def _atom_is_zero(atom, x):
    if isinstance(atom, Cyclic):
        return x == 0
    if isinstance(atom, Pruefer):
        return x == (0, 0)
    return x[0] == 0 and not x[1]


def _atom_order_exp(atom, x, p):
    if isinstance(atom, Cyclic):
        return 0 if x == 0 else atom.k - vp(x, p)
    if isinstance(atom, Pruefer):
        return x[1]
    e = 0
    while not _atom_is_zero(atom, x):
        x = _gp_smul(atom.n, p, x, p)
        e += 1
    return e


def _atom_value_key(atom, x):
    if isinstance(atom, Cyclic):
        return (x,)
    if isinstance(atom, Pruefer):
        return (x[1], x[0])
    return (x[0],) + tuple(v for mc in x[1] for v in mc)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True, slots=True)
class Element:
    group: GroupSpec
    coords: tuple  # sorted ((i, j), value) pairs, zero values omitted

    @staticmethod
    def zero(group: GroupSpec) -> "Element":
        return Element(group, ())

    @staticmethod
    def from_coords(group: GroupSpec, coords: dict) -> "Element":
        items = []
        for (i, j), value in coords.items():
            group.check_coord(i, j)
            atom = group.atom(i)
            value = _normalize_value(atom, value, group.p)
            if not _atom_is_zero(atom, value):
                items.append(((i, j), value))
        return Element(group, tuple(sorted(items)))

    @property
    def is_zero(self) -> bool:
        return not self.coords

    def support(self):
        return [pos for pos, _ in self.coords]

    def coord(self, i: int, j: int):
        for pos, value in self.coords:
            if pos == (i, j):
                return value
        atom = self.group.atom(i)
        if isinstance(atom, Cyclic):
            return 0
        if isinstance(atom, Pruefer):
            return (0, 0)
        return (0, ())

    def sort_key(self):
        parts = []
        for (i, j), value in self.coords:
            parts.append((i, j) + _atom_value_key(self.group.atom(i), value))
        return tuple(parts)

    def __add__(self, other: "Element") -> "Element":
        return elem_add(self, other)

    def __neg__(self) -> "Element":
        return elem_neg(self)

    def __sub__(self, other: "Element") -> "Element":
        return elem_add(self, elem_neg(other))

    def __rmul__(self, z: int) -> "Element":
        return elem_smul(z, self)

    def __repr__(self):
        from .dsl import print_element

        return f"<{print_element(self)}>"


def _normalize_value(atom, value, p):
    if isinstance(atom, Cyclic):
        return value % p**atom.k
    if isinstance(atom, Pruefer):
        a, k = value
        return _pruefer_canon(a, k, p)
    c0, tail = value
    items = tail.items() if isinstance(tail, dict) else tail
    for m, _ in items:
        if m < 1:
            raise ValueError("generalized Pruefer tail indices start at 1")
    return _gp_canon(atom.n, c0, items, p)


def elem_add(x: Element, y: Element) -> Element:
    if x.group != y.group:
        raise MismatchedGroup("elements live in different groups")
    p = x.group.p
    merged = dict(x.coords)
    for pos, value in y.coords:
        atom = x.group.atom(pos[0])
        if pos in merged:
            merged[pos] = _atom_add(atom, merged[pos], value, p)
        else:
            merged[pos] = value
    items = [
        (pos, value)
        for pos, value in merged.items()
        if not _atom_is_zero(x.group.atom(pos[0]), value)
    ]
    return Element(x.group, tuple(sorted(items)))


def elem_neg(x: Element) -> Element:
    return elem_smul(-1, x)


def elem_smul(z: int, x: Element) -> Element:
    p = x.group.p
    items = []
    for pos, value in x.coords:
        atom = x.group.atom(pos[0])
        value = _atom_smul(atom, z, value, p)
        if not _atom_is_zero(atom, value):
            items.append((pos, value))
    return Element(x.group, tuple(items))


def order_exp(x: Element) -> int:
    """Least e with p^e * x = 0."""
    p = x.group.p
    e = 0
    for pos, value in x.coords:
        e = max(e, _atom_order_exp(x.group.atom(pos[0]), value, p))
    return e


# -- convenient element constructors ---------------------------------------


def cyclic_gen(group: GroupSpec, i: int, j: int = 0) -> Element:
    """The residue-1 generator of a cyclic summand copy."""
    if not isinstance(group.atom(i), Cyclic):
        raise ValueError("summand is not cyclic")
    return Element.from_coords(group, {(i, j): 1})


def pruefer_elem(group: GroupSpec, i: int, j: int, num: int, depth: int) -> Element:
    """The class of num / p^depth in a Pruefer summand copy."""
    if not isinstance(group.atom(i), Pruefer):
        raise ValueError("summand is not Pruefer")
    return Element.from_coords(group, {(i, j): (num, depth)})


def b_gen(group: GroupSpec, i: int, j: int, n: int) -> Element:
    """b_n, the class of 1 / p^(n+1), in a Pruefer summand copy."""
    return pruefer_elem(group, i, j, 1, n + 1)


def gp_elem(group: GroupSpec, i: int, j: int, c0: int = 0, tail=()) -> Element:
    if not isinstance(group.atom(i), GenPruefer):
        raise ValueError("summand is not generalized Pruefer")
    tail_items = tail.items() if isinstance(tail, dict) else tail
    return Element.from_coords(group, {(i, j): (c0, tuple(tail_items))})


def gp_a(group: GroupSpec, i: int, j: int, m: int) -> Element:
    """The generator a_m (m >= 1) or a_0 (m = 0) of a generalized Pruefer copy."""
    if m == 0:
        return gp_elem(group, i, j, c0=1)
    return gp_elem(group, i, j, tail=((m, 1),))


# ---------------------------------------------------------------------------
# element enumeration


def _atom_values(atom, p, exp_bound=None):
    """All normal-form values of one atom copy, optionally of exponent <= bound."""
    if isinstance(atom, Cyclic):
        if exp_bound is None or exp_bound >= atom.k:
            return list(range(p**atom.k))
        # subgroup of exponent <= exp_bound: multiples of p^(k - exp_bound)
        step = p ** (atom.k - exp_bound)
        return [c for c in range(0, p**atom.k, step)]
    if isinstance(atom, Pruefer):
        if exp_bound is None:
            raise SearchSpaceTooLarge("cannot enumerate a Pruefer summand unboundedly")
        return [(0, 0)] + [
            (a, k) for k in range(1, exp_bound + 1) for a in range(1, p**k) if a % p
        ]
    raise SearchSpaceTooLarge("cannot enumerate a generalized Pruefer summand")


def elements_of(group: GroupSpec, exp_bound=None):
    """All elements of a finite spec (or of bounded exponent, Pruefer allowed).

    Raises SearchSpaceTooLarge when the count would exceed the configured cap
    or a summand is not enumerable.
    """
    positions = list(group.copies())
    value_lists = [_atom_values(group.atom(i), group.p, exp_bound) for i, _ in positions]
    total = 1
    for values in value_lists:
        total *= len(values)
        if total > scope_cap():
            raise SearchSpaceTooLarge(f"element enumeration would exceed {scope_cap()}")
    out = []
    for combo in itertools.product(*value_lists):
        coords = {}
        for pos, value in zip(positions, combo):
            atom = group.atom(pos[0])
            if not _atom_is_zero(atom, value):
                coords[pos] = value
        out.append(Element(group, tuple(sorted(coords.items()))))
    return out


# ---------------------------------------------------------------------------
# finite subgroups


@dataclass(frozen=True)
class FiniteSubgroup:
    ambient: GroupSpec
    generators: tuple  # of Element
    elements: frozenset  # of Element

    def __len__(self):
        return len(self.elements)

    def sorted_elements(self):
        return sorted(self.elements, key=Element.sort_key)

    def __contains__(self, x: Element):
        return x in self.elements

    def __repr__(self):
        return f"FiniteSubgroup(order={len(self.elements)})"


def subgroup_generated(group: GroupSpec, gens) -> FiniteSubgroup:
    """Enumerated closure of a finite generating set under + and -."""
    gens = tuple(gens)
    for g in gens:
        if g.group != group:
            raise MismatchedGroup("generator outside the ambient group")
    elements = {Element.zero(group)}
    frontier = [Element.zero(group)]
    step = [g for g in gens] + [elem_neg(g) for g in gens]
    while frontier:
        x = frontier.pop()
        for g in step:
            y = elem_add(x, g)
            if y not in elements:
                if len(elements) >= scope_cap():
                    raise SearchSpaceTooLarge("subgroup closure exceeds the cap")
                elements.add(y)
                frontier.append(y)
    size = len(elements)
    p = group.p
    while size % p == 0:
        size //= p
    if size != 1:
        raise AssertionError("subgroup order is not a power of p")
    return FiniteSubgroup(group, gens, frozenset(elements))
