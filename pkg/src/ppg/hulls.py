"""Stabilization indices, linkage, minimal summands, pure-injective hulls of
finite parameter subgroups, and the pure embedding into the universal group.

The hull of (M, B) is computed constructively: embed M into the universal
group (identity on cyclic and Pruefer copies; the generalized Pruefer atom
maps by a_0 -> order-p^n divisible element, a_m -> e_m + (divisible element
with p^m-th multiple the image of a_0)), then extract the minimal direct
summand of the touched finite subsum containing the image of B. Minimality
splits cleanly: the divisible rank needed is the rank of B meet the divisible
part, and after an integer change of coordinates aligning that intersection
the reduced part reduces to a smallest-pure-subgroup search in a finite group.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .config import scope_cap
from .errors import EmbeddingUnavailable, ScopeTooLarge
from .fintab import FiniteIndexedGroup
from .groups import (
    ALEPH0,
    Cyclic,
    Element,
    FiniteSubgroup,
    GenPruefer,
    GroupSpec,
    Pruefer,
    _pruefer_add,
    _pruefer_smul,
    elem_add,
    elem_smul,
    order_exp,
    subgroup_generated,
    vp,
)
from .heights import height, in_p_alpha
from .ordinals import Ordinal
from .pptypes import TypeTriple, pp_type_triple, triples_equal
from .snf import smith_normal_form


# ---------------------------------------------------------------------------
# stabilization chain


def stabilization_index(M: GroupSpec, B: FiniteSubgroup) -> int:
    """Least s with B & p^t M = B & p^s M for all t >= s.

    The chain B & p^t M descends to B & p^w M, so s is one past the largest
    finite height occurring in B.
    """
    max_finite = -1
    for b in B.elements:
        if b.is_zero:
            continue
        h = height(M, b)
        if h.is_finite and h.j > max_finite:
            max_finite = h.j
    return max_finite + 1


def stabilization_chain(M: GroupSpec, B: FiniteSubgroup, upto: int) -> list:
    """Sizes of B & p^t M for t = 0..upto (evidence for certificates)."""
    sizes = []
    for t in range(upto + 1):
        bound = Ordinal.finite(t)
        sizes.append(sum(1 for b in B.elements if in_p_alpha(M, b, bound)))
    return sizes


# ---------------------------------------------------------------------------
# linkage


@dataclass(frozen=True)
class LinkFormula:
    """phi(u) = (z*u = b) when modulus is None, else p^modulus | z*u - b.

    Satisfies D |= phi(a) and D |= not phi(0) for the element it links.
    """

    z: int
    b: Element
    modulus: int | None

    def holds_at(self, D: GroupSpec, u: Element) -> bool:
        lhs = elem_smul(self.z, u) - self.b
        if self.modulus is None:
            return lhs.is_zero
        return in_p_alpha(D, lhs, Ordinal.finite(self.modulus))

    def to_json(self) -> dict:
        from .dsl import print_element

        mod = "eq" if self.modulus is None else self.modulus
        return {"z": self.z, "b": print_element(self.b), "modulus": mod}


def check_linked(D: GroupSpec, B: FiniteSubgroup, a: Element) -> LinkFormula | None:
    """First linking formula for a against B, in canonical search order.

    Equality forms z*u = b are tried first (z ascending, b canonical), then
    divisibility forms p^k | z*u - b. Searching k up to one past the largest
    finite height in B is complete: a link at any k also links at h(b) + 1.
    """
    oe = order_exp(a)
    if oe == 0:
        return None
    p = D.p
    nonzero = [b for b in B.elements if not b.is_zero]
    nonzero.sort(key=Element.sort_key)
    multiples = {}
    za = Element.zero(D)
    for z in range(1, p**oe):
        za = za + a
        multiples[z] = za
        for b in nonzero:
            if za == b:
                return LinkFormula(z, b, None)
    finite_heights = [
        height(D, b).j for b in nonzero if height(D, b).is_finite
    ]
    if not finite_heights:
        return None
    for k in range(1, max(finite_heights) + 2):
        bound = Ordinal.finite(k)
        shallow = [b for b in nonzero if not in_p_alpha(D, b, bound)]
        if not shallow:
            continue
        for z in range(1, p**oe):
            za = multiples[z]
            for b in shallow:
                if in_p_alpha(D, za - b, bound):
                    return LinkFormula(z, b, k)
    return None


# ---------------------------------------------------------------------------
# the universal embedding


@dataclass(frozen=True)
class UniversalEmbedding:
    """Generator-rule map from a catalog spec into the universal group.

    Target coordinates are addressed by tags until materialized:
      ("cyc", i, j):    fresh Z(p^k) copy receiving cyclic copy (i, j)
      ("div", i, j):    fresh Pruefer copy for a Pruefer or generalized
                        Pruefer copy (i, j)
      ("lev", i, j, m): fresh Z(p^m) copy receiving the m-th generator of
                        generalized Pruefer copy (i, j)
    """

    source: GroupSpec

    def tag_atom(self, tag):
        kind = tag[0]
        if kind == "cyc":
            return self.source.atom(tag[1])
        if kind == "div":
            return Pruefer()
        return Cyclic(tag[3])

    def apply_tags(self, x: Element) -> dict:
        """Image of x as a map tag -> atom value."""
        p = self.source.p
        out: dict = {}
        for (i, j), value in x.coords:
            atom = self.source.atom(i)
            if isinstance(atom, Cyclic):
                out[("cyc", i, j)] = value
            elif isinstance(atom, Pruefer):
                out[("div", i, j)] = value
            elif isinstance(atom, GenPruefer):
                n = atom.n
                c0, tail = value
                frac = _pruefer_smul(c0, (1, n), p)
                for m, c in tail:
                    frac = _pruefer_add(frac, _pruefer_smul(c, (1, n + m), p), p)
                    out[("lev", i, j, m)] = c
                if frac != (0, 0):
                    out[("div", i, j)] = frac
            else:
                raise EmbeddingUnavailable(f"no template for atom {atom!r}")
        return {tag: val for tag, val in out.items()}

    def materialize(self, tag_images: list, extra_tags=()) -> tuple:
        """Concrete finite subsum spec holding the given images.

        Returns (spec, elements, tag_coords).
        """
        tags = set(extra_tags)
        for img in tag_images:
            tags.update(img.keys())
        by_atom: dict = {}
        for tag in sorted(tags):
            by_atom.setdefault(self.tag_atom(tag), []).append(tag)
        spec = GroupSpec.make(
            self.source.p, [(atom, len(ts)) for atom, ts in by_atom.items()]
        )
        tag_coords = {}
        for atom, ts in by_atom.items():
            i = next(si for si, (a, _) in enumerate(spec.summands) if a == atom)
            for j, tag in enumerate(ts):
                tag_coords[tag] = (i, j)
        elems = []
        for img in tag_images:
            coords = {tag_coords[tag]: val for tag, val in img.items()}
            elems.append(Element.from_coords(spec, coords))
        return spec, elems, tag_coords

    def apply_into(self, xs, extra_tags=()):
        """Materialized images of a list of source elements."""
        return self.materialize([self.apply_tags(x) for x in xs], extra_tags)

    def rules_json(self) -> list:
        """Human-readable per-atom rules, one entry per source summand."""
        p = self.source.p
        out = []
        for i, (atom, mult) in enumerate(self.source.summands):
            entry = {"summand": i, "multiplicity": "aleph0" if mult is ALEPH0 else mult}
            if isinstance(atom, Cyclic):
                entry["rule"] = f"identity onto a fresh Z({p}^{atom.k}) copy"
            elif isinstance(atom, Pruefer):
                entry["rule"] = f"identity onto a fresh Z({p}^inf) copy"
            else:
                n = atom.n
                entry["rule"] = (
                    f"a0 -> 1/{p**n} in a fresh Z({p}^inf) copy; "
                    f"a[m] -> e_m + 1/{p}^({n}+m) in the same copy, "
                    f"e_m the generator of a fresh Z({p}^m) copy"
                )
            out.append(entry)
        return out


def universal_embed(M: GroupSpec) -> UniversalEmbedding:
    """Pure monomorphism template from a catalog spec into the universal group."""
    for atom, _ in M.summands:
        if not isinstance(atom, (Cyclic, Pruefer, GenPruefer)):
            raise EmbeddingUnavailable(f"no template for atom {atom!r}")
    return UniversalEmbedding(M)


# ---------------------------------------------------------------------------
# purity certification


@dataclass(frozen=True)
class PurityScope:
    truncation_index: int = 4
    depth: int = 8
    max_exhaustive: int = 20000
    samples: int = 0
    seed: int = 0


@dataclass(frozen=True)
class PurityCertificate:
    pure: bool
    checked_count: int
    depth: int
    scope_description: str
    relation_bound: int
    witness_text: str | None = None
    witness_depth: int | None = None

    def to_json(self) -> dict:
        return {
            "pure": self.pure,
            "checked_count": self.checked_count,
            "depth": self.depth,
            "scope": self.scope_description,
            "relation_bound": self.relation_bound,
            "witness": self.witness_text,
            "witness_depth": self.witness_depth,
        }


def _windowed_values(atom, p, window):
    if isinstance(atom, Cyclic):
        return [c for c in range(p**atom.k)]
    if isinstance(atom, Pruefer):
        return [(0, 0)] + [
            (a, k) for k in range(1, window + 1) for a in range(1, p**k) if a % p
        ]
    vals = []
    tails = []
    for support in itertools.product(
        *[range(p**m) for m in range(1, window + 1)]
    ):
        tails.append(tuple((m + 1, c) for m, c in enumerate(support) if c))
    for c0 in range(p**atom.n):
        for tail in tails:
            vals.append((c0, tail))
    return vals


def _scope_elements(M: GroupSpec, scope: PurityScope):
    """Exhaustive windowed test set plus optional random samples."""
    positions = []
    for i, (_, mult) in enumerate(M.summands):
        copies = 1 if mult is ALEPH0 else min(mult, 2)
        positions.extend((i, j) for j in range(copies))
    window = scope.truncation_index
    while window >= 1:
        value_lists = [_windowed_values(M.atom(i), M.p, window) for i, _ in positions]
        total = 1
        for vals in value_lists:
            total *= len(vals)
        if total <= scope.max_exhaustive:
            break
        window -= 1
    else:
        raise ScopeTooLarge("purity scope does not fit the exhaustive budget")
    elems = []
    for combo in itertools.product(*value_lists):
        coords = {}
        for pos, val in zip(positions, combo):
            coords[pos] = val
        elems.append(Element.from_coords(M, coords))
    if scope.samples:
        rng = random.Random(scope.seed)
        deep = scope.truncation_index + 2
        for _ in range(scope.samples):
            coords = {}
            for pos in positions:
                atom = M.atom(pos[0])
                vals = _windowed_values(atom, M.p, deep)
                coords[pos] = rng.choice(vals)
            elems.append(Element.from_coords(M, coords))
    return elems


def _capped_height(spec, x, depth):
    if x.is_zero:
        return depth + 1
    h = height(spec, x)
    if h.is_finite and h.j <= depth:
        return h.j
    return depth + 1


def check_relations(f: UniversalEmbedding, bound: int) -> bool:
    """Relation images vanish: p^n a_0 and p^m a_m - a_0 map to zero, m <= bound."""
    M = f.source
    from .groups import gp_a

    for i, (atom, _) in enumerate(M.summands):
        if not isinstance(atom, GenPruefer):
            continue
        a0 = gp_a(M, i, 0, 0)
        gens = [a0] + [gp_a(M, i, 0, m) for m in range(1, bound + 1)]
        spec, imgs, _ = f.apply_into(gens)
        if not elem_smul(M.p**atom.n, imgs[0]).is_zero:
            return False
        for m in range(1, bound + 1):
            if elem_smul(M.p**m, imgs[m]) != imgs[0]:
                return False
    return True


def is_pure_embedding(f: UniversalEmbedding, scope: PurityScope | None = None):
    """Certify injectivity and elementwise divisibility preservation.

    Exhausts a windowed test set (full truncations of generalized Pruefer
    copies, bounded-depth Pruefer fractions), checks x in p^k M iff
    f(x) in p^k N for k up to the scope depth, and emits a certificate.
    """
    from .dsl import print_element
    from .pptypes import MapVerdict

    scope = scope or PurityScope()
    M = f.source
    rel_bound = scope.truncation_index + 2
    if not check_relations(f, rel_bound):
        cert = PurityCertificate(
            False, 0, scope.depth, "relation check", rel_bound, "relation image", None
        )
        return MapVerdict(False), cert
    elems = _scope_elements(M, scope)
    target, images, _ = f.apply_into(elems)
    desc = (
        f"exhaustive window {scope.truncation_index} over doubled copies"
        f" + {scope.samples} samples"
    )
    for x, img in zip(elems, images):
        if img.is_zero and not x.is_zero:
            cert = PurityCertificate(
                False, len(elems), scope.depth, desc, rel_bound, print_element(x), None
            )
            return MapVerdict(False), cert
        hs = _capped_height(M, x, scope.depth)
        ht = _capped_height(target, img, scope.depth)
        if hs != ht:
            k = min(hs, ht) + 1
            cert = PurityCertificate(
                False, len(elems), scope.depth, desc, rel_bound, print_element(x), k
            )
            return MapVerdict(False), cert
    cert = PurityCertificate(True, len(elems), scope.depth, desc, rel_bound)
    return MapVerdict(True), cert


def reduced_part_violation(f: UniversalEmbedding) -> Element | None:
    """A reduced-part source generator whose image is divisible, if any."""
    from .groups import gp_a

    M = f.source
    for i, (atom, _) in enumerate(M.summands):
        if isinstance(atom, GenPruefer):
            a0 = gp_a(M, i, 0, 0)
            tags = f.apply_tags(a0)
            if tags and all(tag[0] == "div" for tag in tags):
                return a0
        elif isinstance(atom, Cyclic):
            e = Element.from_coords(M, {(i, 0): 1})
            tags = f.apply_tags(e)
            if tags and all(tag[0] == "div" for tag in tags):
                return e
    return None


# ---------------------------------------------------------------------------
# minimal summands and hulls


@dataclass(frozen=True)
class HullEvidence:
    triple_source: TypeTriple | None
    triple_image: TypeTriple | None
    triples_equal: bool
    divisible_rank: int
    minimality: dict
    linkage: tuple  # of (summand description, LinkFormula or None)
    stabilization_bound: int | None = None
    bound_respected: bool | None = None

    def all_linked(self) -> bool:
        return all(link is not None for _, link in self.linkage)


@dataclass(frozen=True)
class HullResult:
    hull: GroupSpec
    embed: tuple  # images of B's generators in the hull spec
    evidence: HullEvidence


def _pruefer_positions(D: GroupSpec):
    return [
        (i, j)
        for i, (atom, mult) in enumerate(D.summands)
        if isinstance(atom, Pruefer)
        for j in range(mult if mult is not ALEPH0 else 0)
    ]


def _apply_unimodular(U, fracs, p):
    """New Pruefer coordinate vector y = U x for fractions x."""
    r = len(fracs)
    out = []
    for row in range(r):
        acc = (0, 0)
        for col in range(r):
            c = U[row][col]
            if c:
                acc = _pruefer_add(acc, _pruefer_smul(c, fracs[col], p), p)
        out.append(acc)
    return out


def _alignment_matrix(c_vectors, r, K, p):
    """Unimodular U mapping the listed numerator vectors into leading coords."""
    if not c_vectors:
        return [[1 if i == j else 0 for j in range(r)] for i in range(r)], 0
    mod = p**K
    cols = [list(v) for v in c_vectors]
    aug = [[cols[t][i] for t in range(len(cols))] + [mod if l == i else 0 for l in range(r)] for i in range(r)]
    d, u, _ = smith_normal_form(aug)
    rank = 0
    for i in range(r):
        if i < min(len(d), len(d[0])) and d[i][i] and vp(d[i][i], p) < K:
            rank += 1
    return u, rank


def _linkage_evidence(E: GroupSpec, image_subgroup: FiniteSubgroup):
    """Per-summand linking formulas against the embedded parameter subgroup."""
    out = []
    max_depth = 1
    for b in image_subgroup.elements:
        for (i, _), value in b.coords:
            if isinstance(E.atom(i), Pruefer):
                max_depth = max(max_depth, value[1])
    for i, (atom, mult) in enumerate(E.summands):
        for j in range(mult):
            if isinstance(atom, Cyclic):
                gen = Element.from_coords(E, {(i, j): 1})
                link = check_linked(E, image_subgroup, gen)
                out.append((f"Z({E.p}^{atom.k})#{j}", link))
            else:
                link = None
                for depth in range(1, max_depth + 2):
                    gen = Element.from_coords(E, {(i, j): (1, depth)})
                    link = check_linked(E, image_subgroup, gen)
                    if link is not None:
                        break
                out.append((f"Z({E.p}^inf)#{j}", link))
    return tuple(out)


def minimal_summand(D: GroupSpec, B: FiniteSubgroup) -> HullResult:
    """Minimal direct summand of D containing B, as an abstract spec with
    embedded generator images and evidence.

    Pruefer copies that the parameter subgroup genuinely needs (the rank of
    B meet the divisible part) are carried through whole after an integer
    coordinate alignment; the rest of B's divisible coordinates absorb into
    the complement, reducing minimization to a smallest-pure-subgroup search
    in the finite reduced part.
    """
    p = D.p
    for atom, mult in D.summands:
        if isinstance(atom, GenPruefer) or mult is ALEPH0:
            raise ScopeTooLarge("minimal summand requires finite multiplicities of cyclic/Pruefer atoms")
    gens = list(B.generators)
    if all(g.is_zero for g in gens):
        empty = GroupSpec.make(p, [])
        evidence = HullEvidence(
            None, None, True, 0, {"note": "trivial parameter subgroup"}, ()
        )
        return HullResult(empty, tuple(Element.zero(empty) for _ in gens), evidence)

    ppos = _pruefer_positions(D)
    r = len(ppos)

    # divisible intersection of B and its rank
    div_members = [
        b
        for b in B.elements
        if all(isinstance(D.atom(i), Pruefer) for (i, _), _ in b.coords)
    ]
    socle_count = sum(
        1 for b in div_members if elem_smul(p, b).is_zero
    )
    d_rank = 0
    while p**d_rank < socle_count:
        d_rank += 1

    # alignment of B & P into the first d_rank Pruefer coordinates
    K = 1
    for b in B.elements:
        for (i, _), value in b.coords:
            if isinstance(D.atom(i), Pruefer):
                K = max(K, value[1])
    c_vectors = []
    for c in div_members:
        if c.is_zero:
            continue
        vec = tuple(
            (lambda a_k: a_k[0] * p ** (K - a_k[1]))(c.coord(i, j)) for (i, j) in ppos
        )
        c_vectors.append(vec)
    U, aligned_rank = _alignment_matrix(c_vectors, r, K, p)
    if r and aligned_rank != d_rank:
        raise AssertionError("alignment rank disagrees with the socle count")

    # transformed coordinates: finite parts and aligned divisible parts
    def transform(b: Element):
        fin = {
            pos: val
            for pos, val in b.coords
            if isinstance(D.atom(pos[0]), Cyclic)
        }
        fracs = [b.coord(i, j) for (i, j) in ppos]
        new = _apply_unimodular(U, fracs, p) if r else []
        return fin, new[:d_rank]

    fin_parts = {}
    for b in B.elements:
        fin, _ = transform(b)
        fin_parts[b] = fin

    touched = sorted({pos for fin in fin_parts.values() for pos in fin})
    fin_summands: list = []
    coord_map = {}
    for pos in touched:
        atom = D.atom(pos[0])
        coord_map[pos] = len(fin_summands)
        fin_summands.append((atom, 1))
    F = GroupSpec.make(p, fin_summands) if fin_summands else GroupSpec.make(p, [])
    # canonical ordering of F can permute summands; rebuild the coordinate map
    remap = {}
    used: dict = {}
    order = sorted(range(len(fin_summands)), key=lambda t: fin_summands[t][0].sort_key())
    for slot in order:
        atom = fin_summands[slot][0]
        i = next(si for si, (a, _) in enumerate(F.summands) if a == atom)
        j = used.get(i, 0)
        used[i] = j + 1
        remap[slot] = (i, j)

    def fin_element(fin: dict) -> Element:
        return Element.from_coords(
            F, {remap[coord_map[pos]]: val for pos, val in fin.items()}
        )

    table = FiniteIndexedGroup(F)
    base_indices = {table.index[fin_element(fin_parts[b])] for b in B.elements}
    S_fin = table.minimal_pure_over(base_indices)
    T_fin = table.complement_of(S_fin)
    S_spec, iso = table.spec_of(S_fin)

    hull_summands = list(S_spec.summands)
    if d_rank:
        hull_summands.append((Pruefer(), d_rank))
    E = GroupSpec.make(p, hull_summands)
    # coordinates of S_spec inside E (same cyclic atoms, same copy order)
    div_i = next(
        (i for i, (atom, _) in enumerate(E.summands) if isinstance(atom, Pruefer)),
        None,
    )

    def lift(sx: Element, div_fracs) -> Element:
        coords = {}
        for (i, j), val in sx.coords:
            atom = S_spec.atom(i)
            ei = next(
                si for si, (a, _) in enumerate(E.summands) if a == atom
            )
            coords[(ei, j)] = val
        for t, frac in enumerate(div_fracs):
            if frac != (0, 0):
                coords[(div_i, t)] = frac
        return Element.from_coords(E, coords)

    embed = []
    for g in gens:
        fin, div_head = transform(g)
        sx = iso[table.index[fin_element(fin)]]
        embed.append(lift(sx, div_head))
    embed = tuple(embed)

    image_subgroup = subgroup_generated(E, embed)
    if len(image_subgroup) != len(B):
        raise AssertionError("embedded image has the wrong order")

    t_src = pp_type_triple(D, tuple(gens))
    t_img = pp_type_triple(E, embed)
    minimality = {
        "divisible_rank": d_rank,
        "reduced_order": len(S_fin),
        "search": "violation-repair search, states popped by subgroup order",
        "complement_order": len(T_fin),
    }
    evidence = HullEvidence(
        triple_source=t_src,
        triple_image=t_img,
        triples_equal=triples_equal(t_src, t_img),
        divisible_rank=d_rank,
        minimality=minimality,
        linkage=_linkage_evidence(E, image_subgroup),
    )
    return HullResult(E, embed, evidence)


def hull(M: GroupSpec, B: FiniteSubgroup) -> HullResult:
    """Pure-injective hull of (M, B): spec, embedding of B's generators,
    and machine-checkable evidence (triple equality, minimality, linkage,
    and the stabilization-index bound on cyclic summands)."""
    gens = list(B.generators)
    emb = universal_embed(M)
    if all(g.is_zero for g in gens):
        empty = GroupSpec.make(M.p, [])
        evidence = HullEvidence(
            None, None, True, 0, {"note": "trivial parameter subgroup"}, (),
            stabilization_bound=stabilization_index(M, B), bound_respected=True,
        )
        return HullResult(empty, tuple(Element.zero(empty) for _ in gens), evidence)
    D0, images, _ = emb.apply_into(gens)
    B0 = subgroup_generated(D0, images)
    result = minimal_summand(D0, B0)
    s = stabilization_index(M, B)
    respected = all(
        atom.k <= s
        for atom, _ in result.hull.summands
        if isinstance(atom, Cyclic)
    )
    t_src = pp_type_triple(M, tuple(gens))
    t_img = result.evidence.triple_image
    evidence = HullEvidence(
        triple_source=t_src,
        triple_image=t_img,
        triples_equal=t_img is not None and triples_equal(t_src, t_img),
        divisible_rank=result.evidence.divisible_rank,
        minimality=result.evidence.minimality,
        linkage=result.evidence.linkage,
        stabilization_bound=s,
        bound_respected=respected,
    )
    return HullResult(result.hull, result.embed, evidence)
