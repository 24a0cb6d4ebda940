"""Ordinal values used for heights: 0, 1, 2, ..., w, w+1, ..., and infinity.

Only ordinals below w*2 occur as heights of nonzero elements in the groups
this package models; fully divisible elements and 0 get the symbol infinity.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

_FINITE = 0
_OMEGA_PLUS = 1
_INFINITY = 2


@functools.total_ordering
@dataclass(frozen=True, slots=True)
class Ordinal:
    kind: int
    j: int

    @staticmethod
    def finite(j: int) -> "Ordinal":
        if j < 0:
            raise ValueError("finite ordinal index must be >= 0")
        return Ordinal(_FINITE, j)

    @staticmethod
    def omega_plus(j: int) -> "Ordinal":
        if j < 0:
            raise ValueError("omega offset must be >= 0")
        return Ordinal(_OMEGA_PLUS, j)

    @property
    def is_finite(self) -> bool:
        return self.kind == _FINITE

    @property
    def is_omega_plus(self) -> bool:
        return self.kind == _OMEGA_PLUS

    @property
    def is_infinity(self) -> bool:
        return self.kind == _INFINITY

    def succ(self) -> "Ordinal":
        if self.kind == _INFINITY:
            return self
        return Ordinal(self.kind, self.j + 1)

    def __lt__(self, other: "Ordinal") -> bool:
        return (self.kind, self.j) < (other.kind, other.j)

    def __repr__(self) -> str:
        if self.kind == _FINITE:
            return str(self.j)
        if self.kind == _OMEGA_PLUS:
            return f"w+{self.j}" if self.j else "w"
        return "inf"


INFINITY = Ordinal(_INFINITY, 0)
OMEGA = Ordinal.omega_plus(0)


def parse_ordinal(text: str) -> Ordinal:
    """Inverse of repr: "3", "w", "w+2", "inf"."""
    text = text.strip()
    if text == "inf":
        return INFINITY
    if text == "w":
        return OMEGA
    if text.startswith("w+"):
        return Ordinal.omega_plus(int(text[2:]))
    return Ordinal.finite(int(text))
