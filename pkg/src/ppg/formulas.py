"""Positive primitive formulas: quantified linear systems and their reduction
to conjunctions of p-power divisibility conditions.

The quantified form is E w1..wl: /\_j (sum_i A[j][i] v_i + sum_k B[j][k] w_k = 0).
Reduction runs the integer normal form on B: with U*B*V diagonal, row j of the
transformed system reads d_j | (U*A v)_j, a zero diagonal entry (or a row with
no witness column) degenerating to an equality. Unit factors of the moduli are
dropped when moving to a fixed prime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityError
from .groups import Element, GroupSpec, elem_add, elem_smul, vp
from .heights import in_p_alpha
from .ordinals import Ordinal
from .snf import mat_mul, smith_normal_form


@dataclass(frozen=True, slots=True)
class DivAtom:
    """p^modulus | sum(coeffs . v), or the equality sum(coeffs . v) = 0 when
    modulus is None (the s = 0 case)."""

    modulus: int | None
    coeffs: tuple

    @property
    def is_equality(self) -> bool:
        return self.modulus is None

    def arity(self) -> int:
        return len(self.coeffs)

    def __repr__(self):
        lhs = "0 =" if self.is_equality else f"p^{self.modulus} |"
        return f"DivAtom[{lhs} {list(self.coeffs)}]"


@dataclass(frozen=True, slots=True)
class Simplified:
    conjuncts: tuple  # of DivAtom

    def arity(self) -> int:
        return self.conjuncts[0].arity() if self.conjuncts else 0


@dataclass(frozen=True, slots=True)
class Quantified:
    a: tuple  # rows over free variables
    b: tuple  # rows over bound variables, same row count

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("A and B must have the same number of rows")

    def arity(self) -> int:
        return len(self.a[0]) if self.a else 0


PpFormula = Simplified | Quantified


def atom_from_int_modulus(s: int, coeffs, p: int) -> DivAtom:
    """s | sum(coeffs . v) with an integer modulus, normalized to the prime p."""
    coeffs = tuple(coeffs)
    if s == 0:
        return DivAtom(None, coeffs)
    return DivAtom(vp(s, p), coeffs)


def pp_simplify(phi: Quantified, p: int) -> Simplified:
    """Equivalent divisibility-conjunction form of a quantified formula."""
    rows = len(phi.a)
    n = phi.arity()
    if rows == 0:
        return Simplified(())
    a = [list(row) for row in phi.a]
    bmat = [list(row) for row in phi.b]
    l = len(bmat[0])
    if l == 0:
        ua = a
        moduli = [0] * rows
    else:
        d, u, _ = smith_normal_form(bmat)
        ua = mat_mul(u, a)
        moduli = []
        for i in range(rows):
            moduli.append(d[i][i] if i < l else 0)
    conjuncts = []
    for i in range(rows):
        coeffs = tuple(ua[i])
        atom = atom_from_int_modulus(moduli[i], coeffs, p)
        if not atom.is_equality and atom.modulus == 0:
            continue  # p^0 divides everything
        if not any(coeffs):
            continue  # 0 = 0 or s | 0
        if atom not in conjuncts:
            conjuncts.append(atom)
    return Simplified(tuple(conjuncts))


def combination(coeffs, elems) -> Element:
    acc = Element.zero(elems[0].group)
    for c, x in zip(coeffs, elems):
        if c:
            acc = elem_add(acc, elem_smul(c, x))
    return acc


def eval_atom(M: GroupSpec, atom: DivAtom, elems) -> bool:
    comb = combination(atom.coeffs, elems)
    if atom.is_equality:
        return comb.is_zero
    return in_p_alpha(M, comb, Ordinal.finite(atom.modulus))


def pp_eval(M: GroupSpec, phi: PpFormula, elems) -> bool:
    """Truth of phi at the given tuple of elements of M."""
    elems = tuple(elems)
    for x in elems:
        if x.group != M:
            raise ArityError("tuple entry outside the given group")
    if isinstance(phi, Quantified):
        phi = pp_simplify(phi, M.p)
    if phi.conjuncts and phi.arity() != len(elems):
        raise ArityError(f"formula arity {phi.arity()} != tuple length {len(elems)}")
    return all(eval_atom(M, atom, elems) for atom in phi.conjuncts)
