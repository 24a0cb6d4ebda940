"""Brute-force reference implementations over finite (or windowed) groups.

Everything here decides questions by exhaustive enumeration: divisibility by
witness search, quantified formulas by witness tuples, summands by subgroup
pairs, automorphisms by generator images. These are the ground truth the fast
paths are tested against; they never consult the height machinery.
"""

from __future__ import annotations

import functools
import itertools

from .config import scope_cap
from .errors import ScopeTooLarge
from .fintab import FiniteIndexedGroup
from .formulas import Quantified, combination
from .groups import (
    Cyclic,
    Element,
    FiniteSubgroup,
    GenPruefer,
    GroupSpec,
    Pruefer,
    elem_smul,
    order_exp,
    subgroup_generated,
)
from .heights import truncate, truncation_image
from .ordinals import INFINITY, Ordinal
from .groups import vp


# ---------------------------------------------------------------------------
# divisibility and quantified evaluation


@functools.lru_cache(maxsize=None)
def _cyclic_image(p: int, j: int, k: int) -> frozenset:
    """{p^k * w : w in Z(p^j)} by enumeration."""
    mod = p**j
    return frozenset((p**k * w) % mod for w in range(mod))


def oracle_divides(M: GroupSpec, k: int, x: Element) -> bool:
    """Whether x is in p^k M, decided coordinatewise by witness enumeration.

    Divisibility in a direct sum holds iff it holds in every coordinate; each
    cyclic coordinate is searched exhaustively, and a Pruefer coordinate of
    depth d always has a witness at depth d + k.
    """
    if k == 0:
        return True
    p = M.p
    for (i, _), value in x.coords:
        atom = M.atom(i)
        if isinstance(atom, Cyclic):
            if value not in _cyclic_image(p, atom.k, k):
                return False
        elif isinstance(atom, Pruefer):
            continue
        else:
            raise ScopeTooLarge("oracle divisibility requires cyclic/Pruefer atoms")
    return True


def _cyclic_factors(M: GroupSpec) -> list:
    out = []
    for i, (atom, _) in enumerate(M.summands):
        if not isinstance(atom, Cyclic):
            raise ScopeTooLarge("oracle evaluation requires a finite group")
        for j in range(M.multiplicity(i)):
            out.append(((i, j), atom.k))
    return out


@functools.lru_cache(maxsize=None)
def _factor_solution_set(a_rows, b_rows, p: int, k: int) -> frozenset:
    """{a in Z(p^k)^n : E w in Z(p^k)^l with all rows = 0}, by enumeration."""
    mod = p**k
    n = len(a_rows[0]) if a_rows else 0
    l = len(b_rows[0]) if b_rows else 0
    good = set()
    for a_vec in itertools.product(range(mod), repeat=n):
        partial = [
            sum(c * v for c, v in zip(row, a_vec)) % mod for row in a_rows
        ]
        for w_vec in itertools.product(range(mod), repeat=l):
            if all(
                (pa + sum(c * v for c, v in zip(brow, w_vec))) % mod == 0
                for pa, brow in zip(partial, b_rows)
            ):
                good.add(a_vec)
                break
    return frozenset(good)


def oracle_pp_eval(M: GroupSpec, phi: Quantified, elems) -> bool:
    """Truth of a quantified formula by exhaustive witness search.

    A linear system over a direct sum decouples into one system per cyclic
    factor, each solved by enumerating witness tuples in that factor.
    """
    elems = tuple(elems)
    factors = _cyclic_factors(M)
    if M.order() and M.order() > scope_cap():
        raise ScopeTooLarge("group too large for the evaluation oracle")
    for pos, k in factors:
        a_vec = tuple(x.coord(*pos) for x in elems)
        good = _factor_solution_set(phi.a, phi.b, M.p, k)
        if a_vec not in good:
            return False
    return True


def oracle_pp_type(M: GroupSpec, elems, depth: int) -> dict:
    """Battery of all one-modulus formulas on a tuple, decided by the oracle.

    Keys: ("zero", vec) for relations, ("div", k, vec) for p^k-divisibility,
    with vec over [0, p^m)^n and k <= depth.
    """
    elems = tuple(elems)
    p = M.p
    m = max(order_exp(x) for x in elems)
    mod = p**m if m else 1
    n = len(elems)
    if mod**n * (depth + 1) > scope_cap():
        raise ScopeTooLarge("battery too large")
    results = {}
    for vec in itertools.product(range(mod), repeat=n):
        comb = combination(vec, elems)
        results[("zero", vec)] = comb.is_zero
        for k in range(depth + 1):
            if comb.is_zero:
                results[("div", k, vec)] = True
            else:
                results[("div", k, vec)] = oracle_divides(M, k, comb)
    return results


def battery_key(results: dict) -> tuple:
    return tuple(sorted(results.items()))


# ---------------------------------------------------------------------------
# summands and automorphisms


def oracle_summands(D: GroupSpec, B: FiniteSubgroup) -> list:
    """All direct-sum decompositions (S, T) of D with B <= S, as index sets."""
    table = FiniteIndexedGroup(D)
    b_idx = frozenset(table.index[x] for x in B.elements)
    subgroups = table.all_subgroups()
    total = table.size
    out = []
    for S in subgroups:
        if not (b_idx <= S):
            continue
        for T in subgroups:
            if len(S) * len(T) == total and len(S & T) == 1:
                out.append((S, T))
    return out


def minimal_summand_order(D: GroupSpec, B: FiniteSubgroup) -> int:
    pairs = oracle_summands(D, B)
    if not pairs:
        raise AssertionError("no summand contains B (B <= D always qualifies D itself)")
    return min(len(S) for S, _ in pairs)


def oracle_automorphisms(D: GroupSpec):
    """All automorphisms of a finite spec, as index permutation tuples.

    Generator images are enumerated with order filters and a partial-span
    prune; each complete assignment is kept iff it is a bijection.
    """
    table = FiniteIndexedGroup(D)
    if table.size > 2**5 * 4:
        raise ScopeTooLarge("automorphism enumeration beyond small groups")
    gens = [table.index[g] for g in _canonical_generators(D)]
    gen_orders = [table.order_exp(g) for g in gens]

    def hom_from_images(images):
        # total map by composing coordinates of each element over gens
        value = [None] * table.size
        value[0] = 0
        frontier = [0]
        assign = list(zip(gens, images))
        while frontier:
            i = frontier.pop()
            for g, im in assign:
                j = table.add(i, g)
                v = table.add(value[i], im)
                if value[j] is None:
                    value[j] = v
                    frontier.append(j)
                elif value[j] != v:
                    return None
        return value

    def dfs(pos, images):
        if pos == len(gens):
            value = hom_from_images(images)
            if value is not None and len(set(value)) == table.size:
                yield tuple(value)
            return
        # an automorphism maps <g_1..g_pos> onto a subgroup of equal order
        need = len(table.closure(set(gens[: pos + 1])))
        for cand in range(table.size):
            if table.order_exp(cand) > gen_orders[pos]:
                continue
            if len(table.closure(set(images) | {cand})) != need:
                continue
            yield from dfs(pos + 1, images + [cand])

    yield from dfs(0, [])


def _canonical_generators(D: GroupSpec) -> list:
    out = []
    for i, (atom, mult) in enumerate(D.summands):
        if not isinstance(atom, Cyclic):
            raise ScopeTooLarge("generators of non-cyclic atoms are not enumerable")
        for j in range(mult):
            out.append(Element.from_coords(D, {(i, j): 1}))
    return out


def is_automorphism_table(D: GroupSpec, mapping: dict) -> bool:
    """Validate a full element map dict as an automorphism of a finite spec."""
    table = FiniteIndexedGroup(D)
    if set(mapping.keys()) != set(table.elements):
        return False
    images = set(mapping.values())
    if len(images) != table.size or images != set(table.elements):
        return False
    for x in table.elements:
        for y in table.elements:
            if mapping[x + y] != mapping[x] + mapping[y]:
                return False
    return True


# ---------------------------------------------------------------------------
# truncation heights


def oracle_truncation_height(atom: GenPruefer, value, n_range, p: int):
    """Heights of a generalized Pruefer normal form in each truncation H^(N).

    Heights inside the finite truncation are read off its invariant-factor
    coordinates; this is the ground truth behind the closed forms used for
    heights at and beyond w.
    """
    out = []
    for N in n_range:
        img = truncation_image(atom, value, N, p)
        if img.is_zero:
            out.append(INFINITY)
        else:
            out.append(Ordinal.finite(min(vp(v, p) for _, v in img.coords)))
    return out
