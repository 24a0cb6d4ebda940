"""Exact automorphisms of direct sums of cyclic and Pruefer atoms.

A map is stored as: images of the canonical generators of finitely many
touched cyclic copies (arbitrary elements, so cyclic generators may acquire
divisible coordinates), plus a rational matrix with p-coprime denominators
acting on finitely many touched Pruefer copies, identity elsewhere. There are
no maps from divisible to bounded parts, so this triangular shape is closed
under composition and inversion, and rational arithmetic keeps inverses exact
at every depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ScopeTooLarge
from .fintab import FiniteIndexedGroup
from .groups import (
    Cyclic,
    Element,
    GroupSpec,
    Pruefer,
    elem_add,
    elem_smul,
)


def frac_times_pruefer(q: Fraction, value, p: int):
    """q * (a / p^k) inside Z(p^inf); q's denominator must be coprime to p."""
    a, k = value
    if a == 0 or q == 0:
        return (0, 0)
    den = q.denominator
    if den % p == 0:
        raise ValueError("denominator must be coprime to p")
    mod = p**k
    num = (q.numerator * a * pow(den, -1, mod)) % mod
    from .groups import _pruefer_canon

    return _pruefer_canon(num, k, p)


def mat_fraction_inverse(mat):
    """Exact inverse of a square matrix over the rationals (Gauss-Jordan)."""
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]


def frac_matmul(x, y):
    n, inner, m = len(x), len(y), len(y[0]) if y else 0
    return [
        [sum((Fraction(x[i][k]) * Fraction(y[k][j]) for k in range(inner)), Fraction(0)) for j in range(m)]
        for i in range(n)
    ]


@dataclass(frozen=True)
class AutoMap:
    """Automorphism (or endomorphism) of a catalog group, identity outside
    the touched copies."""

    group: GroupSpec
    fin_images: tuple  # sorted ((i, j), Element) for touched cyclic copies
    div_copies: tuple  # touched Pruefer copies, matrix coordinate order
    theta: tuple  # rational matrix rows, len(div_copies) square

    @staticmethod
    def identity(group: GroupSpec) -> "AutoMap":
        return AutoMap(group, (), (), ())

    @staticmethod
    def build(group, fin_images: dict, div_copies, theta) -> "AutoMap":
        rows = tuple(tuple(Fraction(v) for v in row) for row in theta)
        for row in rows:
            for v in row:
                if v.denominator % group.p == 0:
                    raise ValueError("theta denominators must be coprime to p")
        return AutoMap(
            group,
            tuple(sorted(fin_images.items())),
            tuple(div_copies),
            rows,
        )

    @property
    def touched(self):
        return tuple(pos for pos, _ in self.fin_images) + self.div_copies

    def _fin_map(self) -> dict:
        return dict(self.fin_images)

    def apply(self, x: Element) -> Element:
        group = self.group
        p = group.p
        fin = self._fin_map()
        div_index = {pos: t for t, pos in enumerate(self.div_copies)}
        out = Element.zero(group)
        for pos, value in x.coords:
            atom = group.atom(pos[0])
            if isinstance(atom, Cyclic):
                if pos in fin:
                    out = elem_add(out, elem_smul(value, fin[pos]))
                else:
                    out = elem_add(out, Element.from_coords(group, {pos: value}))
            elif isinstance(atom, Pruefer):
                if pos in div_index:
                    t = div_index[pos]
                    for s, target in enumerate(self.div_copies):
                        q = self.theta[s][t]
                        if q:
                            piece = frac_times_pruefer(q, value, p)
                            out = elem_add(
                                out, Element.from_coords(group, {target: piece})
                            )
                else:
                    out = elem_add(out, Element.from_coords(group, {pos: value}))
            else:
                raise ScopeTooLarge("maps on generalized Pruefer atoms are not built")
        return out

    def compose(self, other: "AutoMap") -> "AutoMap":
        """self after other."""
        if self.group != other.group:
            raise ValueError("maps on different groups")
        group = self.group
        cyc = sorted({pos for pos, _ in self.fin_images} | {pos for pos, _ in other.fin_images})
        div = sorted(set(self.div_copies) | set(other.div_copies))

        def embed_theta(m: "AutoMap"):
            idx = {pos: t for t, pos in enumerate(m.div_copies)}
            out = []
            for s, pos_s in enumerate(div):
                row = []
                for t, pos_t in enumerate(div):
                    if pos_s in idx and pos_t in idx:
                        row.append(m.theta[idx[pos_s]][idx[pos_t]])
                    else:
                        row.append(Fraction(int(pos_s == pos_t)))
                out.append(row)
            return out

        theta = frac_matmul(embed_theta(self), embed_theta(other))
        fin = {}
        for pos in cyc:
            gen = Element.from_coords(group, {pos: 1})
            fin[pos] = self.apply(other.apply(gen))
        return AutoMap.build(group, fin, div, theta)

    def _touched_fin_spec(self):
        group = self.group
        positions = [pos for pos, _ in self.fin_images]
        summands = [(group.atom(i), 1) for i, _ in positions]
        spec = GroupSpec.make(group.p, summands)
        used: dict = {}
        coord = {}
        order = sorted(range(len(positions)), key=lambda t: summands[t][0].sort_key())
        for slot in order:
            atom = summands[slot][0]
            i = next(si for si, (a, _) in enumerate(spec.summands) if a == atom)
            j = used.get(i, 0)
            used[i] = j + 1
            coord[positions[slot]] = (i, j)
        return spec, coord

    def inverse(self) -> "AutoMap":
        group = self.group
        p = group.p
        theta_inv = (
            mat_fraction_inverse([list(row) for row in self.theta])
            if self.div_copies
            else []
        )
        for row in theta_inv:
            for v in row:
                if v.denominator % p == 0:
                    raise ValueError("map is not invertible over the p-local ring")
        if not self.fin_images:
            return AutoMap.build(group, {}, self.div_copies, theta_inv)

        spec, coord = self._touched_fin_spec()
        back = {v: k for k, v in coord.items()}
        table = FiniteIndexedGroup(spec)
        fin = self._fin_map()

        def to_local(x: Element) -> Element:
            return Element.from_coords(
                spec, {coord[pos]: val for pos, val in x.coords if pos in coord}
            )

        def to_group(x: Element) -> Element:
            return Element.from_coords(
                group, {back[pos]: val for pos, val in x.coords}
            )

        # finite-part action as an index permutation of the touched subsum
        value = [None] * table.size
        value[0] = 0
        frontier = [0]
        gen_pairs = []
        for pos, img in fin.items():
            local_gen = table.index[to_local(Element.from_coords(group, {pos: 1}))]
            local_img = table.index[to_local(img)]
            gen_pairs.append((local_gen, local_img))
        while frontier:
            i = frontier.pop()
            for g, im in gen_pairs:
                j = table.add(i, g)
                v = table.add(value[i], im)
                if value[j] is None:
                    value[j] = v
                    frontier.append(j)
                elif value[j] != v:
                    raise ValueError("inconsistent finite part")
        if len(set(value)) != table.size:
            raise ValueError("finite part is not bijective")
        inv_index = {v: i for i, v in enumerate(value)}

        div_index = {pos: t for t, pos in enumerate(self.div_copies)}
        fin_inv = {}
        for pos in fin:
            local_gen = table.index[to_local(Element.from_coords(group, {pos: 1}))]
            x = to_group(table.elements[inv_index[local_gen]])
            z = self.apply(x)
            corrections = Element.zero(group)
            for zpos, zval in z.coords:
                if zpos in div_index:
                    t = div_index[zpos]
                    for s, target in enumerate(self.div_copies):
                        q = -theta_inv[s][t]
                        if q:
                            piece = frac_times_pruefer(q, zval, p)
                            corrections = elem_add(
                                corrections,
                                Element.from_coords(group, {target: piece}),
                            )
            fin_inv[pos] = elem_add(x, corrections)
        return AutoMap.build(group, fin_inv, self.div_copies, theta_inv)

    def is_identity_on_touched(self) -> bool:
        group = self.group
        for pos, img in self.fin_images:
            if img != Element.from_coords(group, {pos: 1}):
                return False
        for s in range(len(self.div_copies)):
            for t in range(len(self.div_copies)):
                if self.theta[s][t] != Fraction(int(s == t)):
                    return False
        return True
