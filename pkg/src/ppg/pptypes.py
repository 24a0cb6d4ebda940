"""Canonical encoding of complete p-torsion pp-types as a triple (m, omega, eta).

For a tuple of elements killed by p^m, every simplified formula reduces mod
p^m, so its pp-type is captured by: the relation subgroup omega of (Z/p^m)^n,
and the descending chain eta(k) of divisibility subgroups, which is stationary
from K = 1 + (largest finite height among the p^(mn) combinations) onwards,
with stable value {r : r.a in p^w M}. Triple equality therefore decides
pp-type equality, and a discrepancy yields a one-atom separating witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .config import scope_cap
from .errors import ArityError, SearchSpaceTooLarge
from .formulas import DivAtom, combination
from .groups import Element, GroupSpec, elem_add, elem_smul, elements_of, order_exp
from .heights import height
from .ordinals import OMEGA, Ordinal


@dataclass(frozen=True)
class TypeTriple:
    p: int
    n: int
    m: int
    omega: frozenset  # of coefficient vectors in (Z/p^m)^n
    eta: tuple  # eta[k] for k = 0..K, frozensets; eta[K] is the stable tail

    @property
    def K(self) -> int:
        return len(self.eta) - 1

    def _reduce(self, coeffs) -> tuple:
        if len(coeffs) != self.n:
            raise ArityError("coefficient vector has the wrong arity")
        mod = self.p**self.m
        return tuple(c % mod for c in coeffs)

    def member_zero(self, coeffs) -> bool:
        return self._reduce(coeffs) in self.omega

    def member_div(self, k: int, coeffs) -> bool:
        return self._reduce(coeffs) in self.eta[min(k, self.K)]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "arity": self.n,
            "m": self.m,
            "omega": sorted(list(v) for v in self.omega),
            "eta": [sorted(list(v) for v in s) for s in self.eta],
            "stabilization": self.K,
        }


def triple_member(t: TypeTriple, atom: DivAtom) -> bool:
    """Whether the simplified atom belongs to the complete type encoded by t."""
    if atom.is_equality:
        return t.member_zero(atom.coeffs)
    return t.member_div(atom.modulus, atom.coeffs)


def pp_type_triple(M: GroupSpec, elems) -> TypeTriple:
    """The (m, omega, eta) encoding of the pp-type of a tuple in M."""
    elems = tuple(elems)
    if not elems:
        raise ArityError("tuple must be nonempty")
    for x in elems:
        if x.group != M:
            raise ArityError("tuple entry outside the given group")
    p = M.p
    n = len(elems)
    m = max(order_exp(x) for x in elems)
    if m == 0:
        zero_vec = (0,) * n
        triv = frozenset({zero_vec})
        return TypeTriple(p, n, 0, triv, (triv,))

    mod = p**m
    if mod**n > scope_cap():
        raise SearchSpaceTooLarge("type triple combination space exceeds the cap")
    multiples = []
    for x in elems:
        row = [Element.zero(M)]
        for _ in range(1, mod):
            row.append(elem_add(row[-1], x))
        multiples.append(row)

    omega = set()
    finite_or_beyond: dict = {}
    max_finite = -1
    for vec in itertools.product(range(mod), repeat=n):
        comb = multiples[0][vec[0]]
        for i in range(1, n):
            comb = elem_add(comb, multiples[i][vec[i]])
        if comb.is_zero:
            omega.add(vec)
            finite_or_beyond[vec] = None  # belongs to every eta(k)
            continue
        h = height(M, comb)
        finite_or_beyond[vec] = h
        if h.is_finite and h.j > max_finite:
            max_finite = h.j

    K = max_finite + 1
    eta = []
    for k in range(K):
        bound = Ordinal.finite(k)
        eta.append(
            frozenset(
                vec for vec, h in finite_or_beyond.items() if h is None or h >= bound
            )
        )
    eta.append(
        frozenset(vec for vec, h in finite_or_beyond.items() if h is None or h >= OMEGA)
    )
    return TypeTriple(p, n, m, frozenset(omega), tuple(eta))


@dataclass(frozen=True)
class MapVerdict:
    """Outcome of a partial-pure-map check; a failing witness is a single
    simplified atom holding on exactly one side."""

    pure: bool
    witness: DivAtom | None = None
    witness_side: str | None = None  # "source" or "target"

    def __bool__(self):
        return self.pure


def _lift(vec) -> tuple:
    return tuple(int(c) for c in vec)


def _separating_witness(tb: TypeTriple, tc: TypeTriple):
    """An atom in exactly one of two distinct triples of equal arity."""
    n = tb.n
    if tb.m != tc.m:
        small, side = (tb, "source") if tb.m < tc.m else (tc, "target")
        # p^(smaller m) annihilates every entry on one side only
        for i in range(n):
            coeffs = tuple(
                small.p**small.m if l == i else 0 for l in range(n)
            )
            atom = DivAtom(None, coeffs)
            if triple_member(tb, atom) != triple_member(tc, atom):
                side = "source" if triple_member(tb, atom) else "target"
                return atom, side
        raise AssertionError("m differs but no annihilator atom separates")
    for vec in sorted(tb.omega ^ tc.omega):
        atom = DivAtom(None, _lift(vec))
        side = "source" if vec in tb.omega else "target"
        return atom, side
    for k in range(max(tb.K, tc.K) + 1):
        sb = tb.eta[min(k, tb.K)]
        sc = tc.eta[min(k, tc.K)]
        for vec in sorted(sb ^ sc):
            atom = DivAtom(k, _lift(vec))
            side = "source" if vec in sb else "target"
            return atom, side
    raise AssertionError("triples differ but no atom separates them")


def triples_equal(tb: TypeTriple, tc: TypeTriple) -> bool:
    if (tb.p, tb.n, tb.m, tb.omega) != (tc.p, tc.n, tc.m, tc.omega):
        return False
    for k in range(max(tb.K, tc.K) + 1):
        if tb.eta[min(k, tb.K)] != tc.eta[min(k, tc.K)]:
            return False
    return True


def is_partial_pure_mono(M: GroupSpec, b_tuple, N: GroupSpec, c_tuple) -> MapVerdict:
    """Whether b_i -> c_i is a partial pure monomorphism (triple equality)."""
    b_tuple, c_tuple = tuple(b_tuple), tuple(c_tuple)
    if len(b_tuple) != len(c_tuple):
        raise ArityError("assignment sides have different lengths")
    tb = pp_type_triple(M, b_tuple)
    tc = pp_type_triple(N, c_tuple)
    if triples_equal(tb, tc):
        return MapVerdict(True)
    atom, side = _separating_witness(tb, tc)
    return MapVerdict(False, witness=atom, witness_side=side)


def triple_implies(tb: TypeTriple, tc: TypeTriple) -> bool:
    """Whether every formula of the type of tb belongs to the type of tc.

    This is the partial-homomorphism condition for an assignment whose sides
    realize tb and tc.
    """
    if tb.p != tc.p or tb.n != tc.n:
        return False
    p, n = tb.p, tb.n
    mod = p ** max(tb.m, tc.m)
    for vec in itertools.product(range(mod), repeat=n):
        if tb.member_zero(vec) and not tc.member_zero(vec):
            return False
        for k in range(max(tb.K, tc.K) + 1):
            if tb.member_div(k, vec) and not tc.member_div(k, vec):
                return False
    return True


def enumerate_types(p: int, n: int, m_bound: int, ambient: GroupSpec) -> set:
    """All distinct triples of n-tuples of exponent <= m_bound in the ambient."""
    if ambient.p != p:
        raise ArityError("ambient prime does not match")
    elems = elements_of(ambient, exp_bound=m_bound)
    if len(elems) ** n > scope_cap():
        raise SearchSpaceTooLarge("tuple space exceeds the cap")
    found: set = set()
    for tup in itertools.product(elems, repeat=n):
        found.add(pp_type_triple(ambient, tup))
    return found


def vector_span(gens, mod: int, n: int) -> set:
    """Subgroup of (Z/mod)^n generated by the given vectors."""
    span = {(0,) * n}
    for g in gens:
        extended = set()
        for base in span:
            cur = base
            for _ in range(mod):
                extended.add(cur)
                cur = tuple((a + b) % mod for a, b in zip(cur, g))
        span = extended
    return span


def vector_subgroup_generators(vectors, p: int, m: int, n: int) -> list:
    """A small generating list for a subgroup of (Z/p^m)^n, for display."""
    mod = p**m
    span = {(0,) * n}
    gens: list = []
    for vec in sorted(vectors):
        if vec in span:
            continue
        gens.append(vec)
        span = vector_span(gens, mod, n)
    return gens
