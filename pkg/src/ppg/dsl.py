"""Text forms of groups, elements, formulas, and their parsers.

Grammar (whitespace-insensitive):

    group    := term ('+' term)*
    term     := atom ('^' mult)?
    atom     := 'Z(' p ')' | 'Z(' p '^' k ')' | 'Z(' p '^inf)' | 'H(' p ',w+' n ')'
    mult     := int | 'aleph0'

    formula  := 'E' wvar+ ':' eq ('&' eq)*        quantified
              | catom ('&' catom)*                 conjunction
    catom    := modulus '|' lincomb | eq
    eq       := lincomb '=' lincomb
    modulus  := int ('^' int)?

    tuple    := '[' element (',' element)* ']'
    element  := '0' | scalar | '(' scalar (',' scalar)* ')' | '{' i '.' j ':' scalar (',' ...)* '}'
    scalar   := int | int '/' int | 'gp(' 'a' m ':' int (',' ...)* ')'

Printing is canonical and parse(print(v)) == v for every value the package
produces.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ArityError, MixedPrimeError, ParseError
from .formulas import DivAtom, Quantified, Simplified, atom_from_int_modulus
from .groups import ALEPH0, Cyclic, Element, GenPruefer, GroupSpec, Pruefer, vp


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise ParseError(f"expected {literal!r}", self.pos)
        self.pos += len(literal)

    def try_eat(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def integer(self) -> int:
        self.skip_ws()
        match = re.match(r"-?\d+", self.text[self.pos :])
        if not match:
            raise ParseError("expected an integer", self.pos)
        self.pos += match.end()
        return int(match.group())

    def word(self) -> str:
        self.skip_ws()
        match = re.match(r"[A-Za-z][A-Za-z0-9]*", self.text[self.pos :])
        if not match:
            raise ParseError("expected a name", self.pos)
        self.pos += match.end()
        return match.group()

    def done(self):
        self.skip_ws()
        if self.pos < len(self.text):
            raise ParseError(f"unexpected trailing input {self.text[self.pos:]!r}", self.pos)


# ---------------------------------------------------------------------------
# groups


def _parse_atom(sc: _Scanner):
    sc.skip_ws()
    start = sc.pos
    if sc.try_eat("Z("):
        p = sc.integer()
        if sc.try_eat("^"):
            if sc.try_eat("inf"):
                sc.eat(")")
                return p, Pruefer()
            k = sc.integer()
            sc.eat(")")
            if k < 1:
                raise ParseError("cyclic exponent must be >= 1", start)
            return p, Cyclic(k)
        sc.eat(")")
        return p, Cyclic(1)
    if sc.try_eat("H("):
        p = sc.integer()
        sc.eat(",")
        sc.eat("w+")
        n = sc.integer()
        sc.eat(")")
        if n < 1:
            raise ParseError("length parameter must be >= 1", start)
        return p, GenPruefer(n)
    raise ParseError("expected an atom Z(..) or H(..)", sc.pos)


def _parse_mult(sc: _Scanner):
    if not sc.try_eat("^"):
        return 1
    if sc.try_eat("aleph0"):
        return ALEPH0
    start = sc.pos
    mult = sc.integer()
    if mult < 1:
        raise ParseError("multiplicity must be >= 1", start)
    return mult


def parse_group(text: str):
    """Parse a group expression; multi-prime input yields a TorsionGroupSpec."""
    sc = _Scanner(text)
    terms = []
    while True:
        p, atom = _parse_atom(sc)
        mult = _parse_mult(sc)
        terms.append((p, atom, mult))
        if not sc.try_eat("+"):
            break
    sc.done()
    primes = sorted({p for p, _, _ in terms})
    if len(primes) == 1:
        return GroupSpec.make(primes[0], [(atom, mult) for _, atom, mult in terms])
    from .torsion import TorsionGroupSpec

    components = []
    for p in primes:
        components.append(
            GroupSpec.make(p, [(atom, mult) for q, atom, mult in terms if q == p])
        )
    return TorsionGroupSpec.make(components)


def require_p_group(spec) -> GroupSpec:
    if isinstance(spec, GroupSpec):
        return spec
    raise MixedPrimeError("a single-prime group is required here")


def _print_atom(p: int, atom) -> str:
    if isinstance(atom, Cyclic):
        return f"Z({p})" if atom.k == 1 else f"Z({p}^{atom.k})"
    if isinstance(atom, Pruefer):
        return f"Z({p}^inf)"
    return f"H({p},w+{atom.n})"


def print_group(spec) -> str:
    from .torsion import TorsionGroupSpec

    if isinstance(spec, TorsionGroupSpec):
        return " + ".join(print_group(c) for c in spec.components)
    if not spec.summands:
        return "0"
    parts = []
    for atom, mult in spec.summands:
        base = _print_atom(spec.p, atom)
        if mult is ALEPH0:
            parts.append(f"{base}^aleph0")
        elif mult == 1:
            parts.append(base)
        else:
            parts.append(f"{base}^{mult}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# elements


def _parse_scalar(sc: _Scanner):
    sc.skip_ws()
    if sc.try_eat("gp("):
        c0 = 0
        tail = {}
        while True:
            sc.eat("a")
            m = sc.integer()
            sc.eat(":")
            value = sc.integer()
            if m == 0:
                c0 = value
            else:
                tail[m] = value
            if not sc.try_eat(","):
                break
        sc.eat(")")
        return ("gp", c0, tuple(sorted(tail.items())))
    num = sc.integer()
    if sc.try_eat("/"):
        den = sc.integer()
        return ("frac", num, den)
    return ("int", num)


def _scalar_to_value(scalar, atom, p: int, pos: int):
    kind = scalar[0]
    if isinstance(atom, Cyclic):
        if kind != "int":
            raise ParseError("cyclic coordinate must be an integer", pos)
        return scalar[1]
    if isinstance(atom, Pruefer):
        if kind == "int":
            if scalar[1] != 0:
                raise ParseError("Pruefer coordinate must be 0 or a fraction", pos)
            return (0, 0)
        if kind != "frac":
            raise ParseError("Pruefer coordinate must be a fraction a/p^k", pos)
        _, num, den = scalar
        if num == 0:
            return (0, 0)
        if den <= 0:
            raise ParseError("denominator must be positive", pos)
        k = vp(den, p)
        if p**k != den:
            raise ParseError(f"denominator must be a power of {p}", pos)
        return (num, k)
    if kind != "gp":
        raise ParseError("generalized Pruefer coordinate must be gp(...)", pos)
    return (scalar[1], scalar[2])


def parse_element(text: str, group: GroupSpec) -> Element:
    sc = _Scanner(text)
    elem = _parse_element(sc, group)
    sc.done()
    return elem


def _parse_element(sc: _Scanner, group: GroupSpec) -> Element:
    sc.skip_ws()
    start = sc.pos
    if sc.peek() == "{":
        sc.eat("{")
        coords = {}
        if not sc.try_eat("}"):
            while True:
                i = sc.integer()
                sc.eat(".")
                j = sc.integer()
                sc.eat(":")
                pos = sc.pos
                scalar = _parse_scalar(sc)
                coords[(i, j)] = _scalar_to_value(scalar, group.atom(i), group.p, pos)
                if not sc.try_eat(","):
                    break
            sc.eat("}")
        return Element.from_coords(group, coords)
    if sc.peek() == "(":
        sc.eat("(")
        scalars = [( sc.pos, _parse_scalar(sc))]
        while sc.try_eat(","):
            scalars.append((sc.pos, _parse_scalar(sc)))
        sc.eat(")")
    else:
        scalars = [(sc.pos, _parse_scalar(sc))]
    positions = list(group.copies())
    if len(scalars) != len(positions):
        if len(scalars) == 1 and scalars[0][1] == ("int", 0):
            return Element.zero(group)
        raise ParseError(
            f"expected {len(positions)} coordinates, got {len(scalars)}", start
        )
    coords = {}
    for (pos, scalar), (i, j) in zip(scalars, positions):
        coords[(i, j)] = _scalar_to_value(scalar, group.atom(i), group.p, pos)
    return Element.from_coords(group, coords)


def parse_tuple(text: str, group: GroupSpec) -> tuple:
    sc = _Scanner(text)
    sc.eat("[")
    elems = [_parse_element(sc, group)]
    while sc.try_eat(","):
        elems.append(_parse_element(sc, group))
    sc.eat("]")
    sc.done()
    return tuple(elems)


def _print_scalar(atom, value, p: int) -> str:
    if isinstance(atom, Cyclic):
        return str(value)
    if isinstance(atom, Pruefer):
        a, k = value
        return "0" if a == 0 else f"{a}/{p**k}"
    c0, tail = value
    items = []
    if c0 or not tail:
        items.append(f"a0:{c0}")
    items.extend(f"a{m}:{c}" for m, c in tail)
    return "gp(" + ",".join(items) + ")"


def print_element(x: Element) -> str:
    group = x.group
    dense_ok = all(mult is not ALEPH0 for _, mult in group.summands)
    if dense_ok:
        positions = list(group.copies())
        if len(positions) <= 12:
            scalars = [
                _print_scalar(group.atom(i), x.coord(i, j), group.p)
                for i, j in positions
            ]
            if len(scalars) == 1:
                return scalars[0]
            return "(" + ",".join(scalars) + ")"
    if x.is_zero:
        return "{}"
    parts = [
        f"{i}.{j}:{_print_scalar(group.atom(i), value, group.p)}"
        for (i, j), value in x.coords
    ]
    return "{" + ",".join(parts) + "}"


def print_tuple(elems) -> str:
    return "[" + ",".join(print_element(x) for x in elems) + "]"


# ---------------------------------------------------------------------------
# formulas


_VAR_RE = re.compile(r"([xw])(\d+)")


def _parse_lincomb(sc: _Scanner):
    """Returns dict var -> coeff where var is ('x', i) or ('w', i)."""
    coeffs: dict = {}
    sign = 1
    first = True
    while True:
        sc.skip_ws()
        if sc.try_eat("-"):
            sign = -sign
        elif sc.try_eat("+"):
            pass
        elif not first:
            break
        sc.skip_ws()
        start = sc.pos
        match = re.match(r"(\d+)?\s*([xw])(\d*)|(\d+)", sc.text[sc.pos :])
        if not match:
            raise ParseError("expected a term like '3 x1' or 'w2'", start)
        sc.pos += match.end()
        if match.group(4) is not None:
            if int(match.group(4)) != 0:
                raise ParseError("bare constants other than 0 are not allowed", start)
        else:
            coeff = int(match.group(1)) if match.group(1) else 1
            index = int(match.group(3)) if match.group(3) else 1
            var = (match.group(2), index)
            coeffs[var] = coeffs.get(var, 0) + sign * coeff
        sign = 1
        first = False
        sc.skip_ws()
        nxt = sc.peek()
        if nxt not in "+-":
            break
    return coeffs


def _lincomb_sub(lhs: dict, rhs: dict) -> dict:
    out = dict(lhs)
    for var, c in rhs.items():
        out[var] = out.get(var, 0) - c
    return {var: c for var, c in out.items() if c}


def parse_formula(text: str, p: int | None = None):
    """Parse a formula; simplified conjunctions need p to normalize moduli.

    Returns a Quantified formula or, if p is given, a Simplified one;
    without p a simplified conjunction is returned with exact integer moduli
    as a Quantified formula with no bound variables where possible.
    """
    sc = _Scanner(text)
    sc.skip_ws()
    if re.match(r"E\b|E\s*w", sc.text[sc.pos :]):
        sc.eat("E")
        wvars = []
        while True:
            sc.skip_ws()
            match = re.match(r"w(\d*)", sc.text[sc.pos :])
            if not match:
                break
            sc.pos += match.end()
            wvars.append(int(match.group(1)) if match.group(1) else 1)
        if not wvars:
            raise ParseError("expected bound variables after E", sc.pos)
        sc.eat(":")
        rows = []
        while True:
            lhs = _parse_lincomb(sc)
            sc.eat("=")
            rhs = _parse_lincomb(sc)
            rows.append(_lincomb_sub(lhs, rhs))
            if not sc.try_eat("&"):
                break
        sc.done()
        n = max((i for row in rows for kind, i in row if kind == "x"), default=0)
        a = tuple(
            tuple(row.get(("x", i + 1), 0) for i in range(n)) for row in rows
        )
        b = tuple(
            tuple(row.get(("w", i), 0) for i in wvars) for row in rows
        )
        return Quantified(a, b)

    atoms_raw = []
    while True:
        save = sc.pos
        modulus = None
        try:
            mod_base = sc.integer()
            if sc.try_eat("^"):
                mod_exp = sc.integer()
                mod_value = mod_base**mod_exp
            else:
                mod_value = mod_base
            sc.eat("|")
            modulus = mod_value
        except ParseError:
            sc.pos = save
        if modulus is not None:
            lc = _parse_lincomb(sc)
            atoms_raw.append((modulus, lc))
        else:
            lhs = _parse_lincomb(sc)
            sc.eat("=")
            rhs = _parse_lincomb(sc)
            atoms_raw.append((0, _lincomb_sub(lhs, rhs)))
        if not sc.try_eat("&"):
            break
    sc.done()
    n = max((i for _, lc in atoms_raw for kind, i in lc if kind == "x"), default=0)
    for _, lc in atoms_raw:
        if any(kind == "w" for kind, _ in lc):
            raise ParseError("bound variables outside a quantified formula", 0)
    if p is None:
        # exact integer moduli, represented as a quantified system: s | t means E w: s w = t
        rows_a, rows_b, wcount = [], [], 0
        for modulus, lc in atoms_raw:
            rows_a.append(tuple(lc.get(("x", i + 1), 0) for i in range(n)))
            if modulus == 0:
                rows_b.append(None)
            else:
                rows_b.append((wcount, modulus))
                wcount += 1
        b = tuple(
            tuple(
                -entry[1] if entry is not None and col == entry[0] else 0
                for col in range(wcount)
            )
            for entry in rows_b
        )
        return Quantified(tuple(rows_a), b)
    conjuncts = []
    for modulus, lc in atoms_raw:
        coeffs = tuple(lc.get(("x", i + 1), 0) for i in range(n))
        conjuncts.append(atom_from_int_modulus(modulus, coeffs, p))
    return Simplified(tuple(conjuncts))


def _print_terms(terms) -> str:
    """terms: list of (coeff, varname); joined with explicit +/- signs."""
    parts: list = []
    for c, var in terms:
        if not c:
            continue
        mag = abs(c)
        body = var if mag == 1 else f"{mag} {var}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


def _print_lincomb(coeffs, prefix: str = "x") -> str:
    return _print_terms([(c, f"{prefix}{i + 1}") for i, c in enumerate(coeffs)])


def print_formula(phi, p: int | None = None) -> str:
    if isinstance(phi, Quantified):
        wcount = len(phi.b[0]) if phi.b else 0
        wvars = " ".join(f"w{i + 1}" for i in range(wcount))
        eqs = []
        for arow, brow in zip(phi.a, phi.b):
            terms = [(c, f"x{i + 1}") for i, c in enumerate(arow)]
            terms += [(c, f"w{i + 1}") for i, c in enumerate(brow)]
            eqs.append(f"{_print_terms(terms)} = 0")
        return f"E {wvars}: " + " & ".join(eqs)
    parts = []
    for atom in phi.conjuncts:
        lhs = _print_lincomb(atom.coeffs, "x")
        if atom.is_equality:
            parts.append(f"0 = {lhs}")
        else:
            base = p if p is not None else "p"
            parts.append(f"{base}^{atom.modulus} | {lhs}")
    return " & ".join(parts) if parts else "0 = 0"
