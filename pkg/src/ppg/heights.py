"""Transfinite heights, truncation towers, Ulm sequences and Ulm invariants.

Heights take values in the ordinals below w*2 plus the symbol infinity (used
for 0 and for fully divisible elements). On direct sums the height of an
element is the minimum of its coordinate heights; cyclic and Pruefer
coordinates have closed forms, while the finite heights inside a generalized
Pruefer atom are computed from finite truncations H^(N) with a stabilization
guard rather than trusted from a formula.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import StabilizationFailure, ZeroElement
from .groups import (
    ALEPH0,
    Cyclic,
    Element,
    GenPruefer,
    GroupSpec,
    Pruefer,
    elem_add,
    elem_smul,
    vp,
)
from .ordinals import INFINITY, Ordinal
from .snf import diagonal, smith_normal_form

_STABLE_RUN = 3
_MAX_TRUNCATION_STEPS = 64


# ---------------------------------------------------------------------------
# truncations H^(N) of a generalized Pruefer atom


@functools.lru_cache(maxsize=None)
def truncate(atom: GenPruefer, N: int, p: int):
    """Finite approximation H^(N) = <a_0..a_N | p^n a_0, p^m a_m - a_0>.

    Returns (spec, images) where spec is the invariant-factor decomposition
    obtained from the integer normal form of the relation matrix and images
    lists the elements representing a_0, ..., a_N in it. Successive
    truncations include into each other by a_i -> a_i.
    """
    if N < 1:
        raise ValueError("truncation index must be >= 1")
    n = atom.n
    g = N + 1
    rel = [[0] * g for _ in range(g)]
    rel[0][0] = p**n
    for m in range(1, g):
        rel[m][0] = -1
        rel[m][m] = p**m
    d, _, v = smith_normal_form(rel)
    factors = diagonal(d)
    # quotient Z^g / rowspan(rel) = (+) Z/d_i  via  x -> x*V mod d
    kept = [(idx, vp(val, p)) for idx, val in enumerate(factors) if val > 1]
    kept.sort(key=lambda t: t[1])
    spec = GroupSpec.make(p, [(Cyclic(k), 1) for _, k in kept])
    # canonical spec merges equal exponents; map factor slots to (i, j) coords
    slots = []
    used: dict = {}
    for _, k in kept:
        i = next(
            idx for idx, (catom, _) in enumerate(spec.summands) if catom == Cyclic(k)
        )
        j = used.get(i, 0)
        used[i] = j + 1
        slots.append((i, j))
    images = []
    for gen in range(g):
        coords = {}
        for slot, (idx, k) in zip(slots, kept):
            val = v[gen][idx] % p**k
            if val:
                coords[slot] = val
        images.append(Element.from_coords(spec, coords))
    return spec, images


def truncation_image(atom: GenPruefer, value, N: int, p: int) -> Element:
    """Image of a generalized Pruefer normal form inside H^(N)."""
    spec, images = truncate(atom, N, p)
    c0, tail = value
    acc = elem_smul(c0, images[0])
    for m, c in tail:
        if m > N:
            raise ValueError("support exceeds the truncation index")
        acc = elem_add(acc, elem_smul(c, images[m]))
    return acc


def _finite_spec_height(x: Element) -> Ordinal:
    """Height inside a finite direct sum of cyclics (closed form)."""
    if x.is_zero:
        return INFINITY
    p = x.group.p
    return Ordinal.finite(min(vp(value, p) for _, value in x.coords))


def _gp_finite_height(atom: GenPruefer, value, p: int) -> int:
    """Stabilized truncation height of an element outside <a_0>."""
    c0, tail = value
    max_support = max(m for m, _ in tail)
    N = max_support + atom.n + 2
    window: list[int] = []
    for _ in range(_MAX_TRUNCATION_STEPS):
        h = _finite_spec_height(truncation_image(atom, value, N, p))
        if not h.is_finite:
            raise StabilizationFailure("truncation height must be finite off <a_0>")
        window.append(h.j)
        if len(window) >= _STABLE_RUN:
            tail_vals = window[-_STABLE_RUN:]
            first_N = N - (_STABLE_RUN - 1)
            if len(set(tail_vals)) == 1 and tail_vals[0] <= first_N - atom.n - 2:
                return tail_vals[0]
        N += 1
    raise StabilizationFailure("generalized Pruefer height did not stabilize")


def _atom_height(atom, value, p: int) -> Ordinal:
    if isinstance(atom, Cyclic):
        return Ordinal.finite(vp(value, p))
    if isinstance(atom, Pruefer):
        return INFINITY
    c0, tail = value
    if not tail:
        # inside <a_0> = p^w H, the height is w + (valuation of c0)
        return Ordinal.omega_plus(vp(c0, p))
    return Ordinal.finite(_gp_finite_height(atom, value, p))


@functools.lru_cache(maxsize=200_000)
def _height_cached(x: Element) -> Ordinal:
    p = x.group.p
    return min(_atom_height(x.group.atom(i), value, p) for (i, _), value in x.coords)


def height(M: GroupSpec, x: Element) -> Ordinal:
    """h_M(x): minimum of coordinate heights, infinity for 0."""
    if x.group != M:
        raise ValueError("element does not belong to the given group")
    if x.is_zero:
        return INFINITY
    return _height_cached(x)


def in_p_alpha(M: GroupSpec, x: Element, alpha: Ordinal) -> bool:
    """Whether x lies in p^alpha M."""
    if x.is_zero:
        return True
    return height(M, x) >= alpha


def p_alpha_spec(M: GroupSpec, alpha: Ordinal) -> GroupSpec:
    """Spec of p^alpha M, per-atom closed forms."""
    summands = []
    if alpha.is_finite:
        j = alpha.j
        for atom, mult in M.summands:
            if isinstance(atom, Cyclic):
                if atom.k > j:
                    summands.append((Cyclic(atom.k - j), mult))
            else:
                summands.append((atom, mult))
    elif alpha.is_omega_plus:
        j = alpha.j
        for atom, mult in M.summands:
            if isinstance(atom, Pruefer):
                summands.append((atom, mult))
            elif isinstance(atom, GenPruefer):
                # p^w H(w+n) = <a_0> = Z(p^n)
                if atom.n > j:
                    summands.append((Cyclic(atom.n - j), mult))
    else:
        raise ValueError("alpha must be Finite(j) or OmegaPlus(j)")
    return GroupSpec.make(M.p, summands)


# ---------------------------------------------------------------------------
# Ulm sequences and invariants


def ulm_sequence(M: GroupSpec, x: Element) -> tuple:
    """(h(x), h(px), h(p^2 x), ...) up to and including the first infinity.

    Index 0 is the height of x itself.
    """
    if x.is_zero:
        raise ZeroElement("the Ulm sequence of 0 is not defined")
    seq = []
    y = x
    while True:
        h = height(M, y)
        seq.append(h)
        if h.is_infinity:
            return tuple(seq)
        y = elem_smul(M.p, y)


def _aleph_add(a, b):
    if a is ALEPH0 or b is ALEPH0:
        return ALEPH0
    return a + b


@dataclass(frozen=True)
class UlmData:
    """Ulm invariants of a spec-denoted group.

    finite_specific holds the cyclic-atom contributions; finite_uniform is
    added at every finite index (each generalized Pruefer atom contributes 1
    to all of them); omega_invariants maps j to the invariant at w+j.
    """

    finite_specific: tuple  # sorted (j, count) pairs
    finite_uniform: object  # int or ALEPH0
    omega_invariants: tuple  # sorted (j, count) pairs
    divisible_rank: object  # int or ALEPH0

    def finite(self, j: int):
        base = dict(self.finite_specific).get(j, 0)
        return _aleph_add(base, self.finite_uniform)

    def omega(self, j: int):
        return dict(self.omega_invariants).get(j, 0)

    def finite_table(self, j_max: int) -> dict:
        return {j: self.finite(j) for j in range(j_max + 1)}


def gp_finite_ulm_invariant(atom: GenPruefer, j: int, p: int) -> int:
    """The j-th finite Ulm invariant of H(w+n), from truncation stabilization."""
    N = j + 2
    window: list[int] = []
    for _ in range(_MAX_TRUNCATION_STEPS):
        spec, _ = truncate(atom, N, p)
        count = sum(mult for catom, mult in spec.summands if catom == Cyclic(j + 1))
        window.append(count)
        if len(window) >= _STABLE_RUN and len(set(window[-_STABLE_RUN:])) == 1:
            return window[-1]
        N += 1
    raise StabilizationFailure("Ulm invariant did not stabilize across truncations")


def ulm_invariants(M: GroupSpec, check_depth: int | None = None) -> UlmData:
    """Ulm data of a spec, additive over summands.

    With check_depth set, the uniform generalized-Pruefer contribution is
    re-derived from truncations for every j <= check_depth and must agree.
    """
    finite_specific: dict = {}
    omega: dict = {}
    uniform = 0
    div_rank = 0
    for atom, mult in M.summands:
        if isinstance(atom, Cyclic):
            j = atom.k - 1
            finite_specific[j] = _aleph_add(finite_specific.get(j, 0), mult)
        elif isinstance(atom, Pruefer):
            div_rank = _aleph_add(div_rank, mult)
        else:
            uniform = _aleph_add(uniform, mult)
            j = atom.n - 1
            omega[j] = _aleph_add(omega.get(j, 0), mult)
            if check_depth is not None:
                for jj in range(check_depth + 1):
                    if gp_finite_ulm_invariant(atom, jj, M.p) != 1:
                        raise StabilizationFailure(
                            f"unexpected truncation invariant at index {jj}"
                        )
    return UlmData(
        finite_specific=tuple(sorted(finite_specific.items())),
        finite_uniform=uniform,
        omega_invariants=tuple(sorted(omega.items())),
        divisible_rank=div_rank,
    )


def socle_dim(M: GroupSpec):
    """Dimension of M[p] over the p-element field (ALEPH0 when infinite)."""
    total = 0
    for atom, mult in M.summands:
        if isinstance(atom, GenPruefer):
            return ALEPH0
        total = _aleph_add(total, mult)
    return total
