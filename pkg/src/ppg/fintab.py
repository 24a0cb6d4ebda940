"""Indexed model of a finite group spec: elements as integer indices.

The hull search, complement construction, and the exhaustive oracles all work
over the same index tables, which keeps exact subgroup manipulation (closures,
purity tests, summand searches) fast enough for desk-scale exhaustion.
"""

from __future__ import annotations

import heapq

from .config import scope_cap
from .errors import ScopeTooLarge, SearchSpaceTooLarge
from .groups import Cyclic, Element, GroupSpec, elem_add, elem_neg, elem_smul, elements_of, order_exp


class FiniteIndexedGroup:
    """Finite spec with elements indexed 0..|G|-1 (0 is the zero element)."""

    def __init__(self, spec: GroupSpec):
        if not spec.is_finite:
            raise SearchSpaceTooLarge("indexed tables require a finite spec")
        self.spec = spec
        self.p = spec.p
        elems = sorted(elements_of(spec), key=Element.sort_key)
        self.elements = elems
        self.index = {x: i for i, x in enumerate(elems)}
        self.size = len(elems)
        self._add_rows: dict = {}
        self._neg: list | None = None
        self._order: list | None = None
        self._pk_whole: dict = {}
        self._pk_map: dict = {}

    # -- element table access ------------------------------------------------

    def add(self, i: int, j: int) -> int:
        row = self._add_rows.get(i)
        if row is None:
            xi = self.elements[i]
            row = [self.index[elem_add(xi, y)] for y in self.elements]
            self._add_rows[i] = row
        return row[j]

    def neg(self, i: int) -> int:
        if self._neg is None:
            self._neg = [self.index[elem_neg(x)] for x in self.elements]
        return self._neg[i]

    def smul(self, z: int, i: int) -> int:
        return self.index[elem_smul(z, self.elements[i])]

    def order_exp(self, i: int) -> int:
        if self._order is None:
            self._order = [order_exp(x) for x in self.elements]
        return self._order[i]

    def exponent(self) -> int:
        return self.spec.exponent() or 0

    # -- subgroup machinery ----------------------------------------------------

    def closure(self, indices) -> frozenset:
        elems = {0}
        frontier = list(set(indices) | {0})
        gens = list(set(indices))
        step = gens + [self.neg(g) for g in gens]
        while frontier:
            i = frontier.pop()
            if i not in elems:
                elems.add(i)
            for g in step:
                j = self.add(i, g)
                if j not in elems:
                    elems.add(j)
                    frontier.append(j)
        return frozenset(elems)

    def _pk_table(self, k: int) -> list:
        table = self._pk_map.get(k)
        if table is None:
            z = self.p**k
            table = [self.smul(z, i) for i in range(self.size)]
            self._pk_map[k] = table
        return table

    def p_power_image(self, S, k: int) -> frozenset:
        table = self._pk_table(k)
        return frozenset(table[i] for i in S)

    def p_power_whole(self, k: int) -> frozenset:
        cached = self._pk_whole.get(k)
        if cached is None:
            cached = frozenset(self._pk_table(k))
            self._pk_whole[k] = cached
        return cached

    def whole(self) -> frozenset:
        return frozenset(range(self.size))

    def is_pure(self, S: frozenset) -> bool:
        return self.purity_violation(S) is None

    def purity_violation(self, S: frozenset):
        """Least k and canonical x in (S & p^k G) - p^k S, or None if pure."""
        for k in range(1, self.exponent() + 1):
            diff = (S & self.p_power_whole(k)) - self.p_power_image(S, k)
            if diff:
                return k, min(diff)
        return None

    def minimal_pure_over(self, base) -> frozenset:
        """Smallest-order pure subgroup containing the given indices.

        Search by repairing purity violations: if x in S & p^k G has no p^k
        root inside S, some root must be adjoined, and every minimal pure
        extension of S contains one, so branching over all roots is complete.
        States pop in order of subgroup size, so the first pure state found
        has minimal order.
        """
        start = self.closure(base)
        heap = [(len(start), tuple(sorted(start)), start)]
        seen = {start}
        popped = 0
        while heap:
            _, _, S = heapq.heappop(heap)
            popped += 1
            if popped > 20_000:
                raise ScopeTooLarge("pure-subgroup search exceeded the state cap")
            violation = self.purity_violation(S)
            if violation is None:
                return S
            k, x = violation
            z = self.p**k
            for y in range(self.size):
                if self.smul(z, y) == x:
                    bigger = self.closure(S | {y})
                    if bigger not in seen:
                        seen.add(bigger)
                        heapq.heappush(heap, (len(bigger), tuple(sorted(bigger)), bigger))
        raise AssertionError("no pure subgroup found (the whole group is pure)")

    def complement_of(self, S: frozenset, within: frozenset | None = None) -> frozenset:
        """A subgroup T with S + T = ambient and S & T = 0.

        Candidates are tried in descending element order (maximal-order
        adjunction first), with backtracking; a complement exists whenever S
        is pure in the ambient.
        """
        ambient = self.whole() if within is None else within
        target = len(ambient) // len(S)
        order = sorted(ambient, key=lambda i: (-self.order_exp(i), i))

        def extend(T: frozenset, remaining) -> frozenset | None:
            if len(T) == target:
                return T
            for pos, x in enumerate(remaining):
                if x in T:
                    continue
                bigger = self.closure(T | {x})
                if len(bigger & S) == 1 and bigger <= ambient:
                    result = extend(bigger, remaining[pos + 1 :])
                    if result is not None:
                        return result
            return None

        result = extend(frozenset({0}), order)
        if result is None:
            raise AssertionError("no complement found; subgroup is not a summand")
        return result

    def subgroup_basis(self, S: frozenset) -> list:
        """Indices t_1, t_2, ... with S the direct sum of the <t_i>."""
        basis = []
        current = S
        while len(current) > 1:
            t = max(current, key=lambda i: (self.order_exp(i), -i))
            # canonical pick among elements of maximal order
            candidates = [i for i in current if self.order_exp(i) == self.order_exp(t)]
            t = min(candidates)
            cyc = self.closure({t})
            basis.append(t)
            current = self.complement_of(cyc, within=current)
        return basis

    def cyclic_orders(self, basis) -> list:
        return [self.order_exp(t) for t in basis]

    def spec_of(self, S: frozenset):
        """(spec, iso) where iso maps indices of S to elements of the spec."""
        basis = self.subgroup_basis(S)
        ks = self.cyclic_orders(basis)
        spec = GroupSpec.make(self.p, [(Cyclic(k), 1) for k in ks])
        # canonical spec sorts ascending and merges; recover a coordinate per slot
        used: dict = {}
        slot_coords = [None] * len(ks)
        for idx in sorted(range(len(ks)), key=lambda idx: ks[idx]):
            k = ks[idx]
            i = next(si for si, (atom, _) in enumerate(spec.summands) if atom == Cyclic(k))
            j = used.get(i, 0)
            used[i] = j + 1
            slot_coords[idx] = (i, j)

        iso = {0: {}}
        for pos, t in enumerate(basis):
            order = self.p ** self.order_exp(t)
            new_iso = {}
            for idx, coords in iso.items():
                cur = idx
                for c in range(order):
                    new_coords = dict(coords)
                    if c:
                        new_coords[slot_coords[pos]] = c
                    new_iso[cur] = new_coords
                    cur = self.add(cur, t)
            iso = new_iso
        if len(iso) != len(S):
            raise AssertionError("basis does not span the subgroup")
        return spec, {
            idx: Element.from_coords(spec, coords) for idx, coords in iso.items()
        }

    # -- exhaustive enumeration ------------------------------------------------

    def all_subgroups(self) -> list:
        """Every subgroup, by breadth-first closure extension."""
        if self.size > 2**10:
            raise ScopeTooLarge("subgroup enumeration beyond 2^10 elements")
        found = {frozenset({0})}
        frontier = [frozenset({0})]
        while frontier:
            S = frontier.pop()
            for x in range(1, self.size):
                if x in S:
                    continue
                bigger = self.closure(S | {x})
                if bigger not in found:
                    if len(found) >= scope_cap():
                        raise ScopeTooLarge("subgroup count exceeds the cap")
                    found.add(bigger)
                    frontier.append(bigger)
        return sorted(found, key=lambda s: (len(s), tuple(sorted(s))))
