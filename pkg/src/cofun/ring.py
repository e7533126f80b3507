"""Coefficient rings for exact computation: the integers and their finite quotients.

Every scalar in this package is a plain Python int.  A RingSpec fixes the
interpretation: over Z the value is the integer itself, over Z/n it is the
canonical residue in [0, n).  All routines that need division, gcds or unit
normalization go through the RingSpec so that the rest of the code base never
branches on the ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid.

    Returns:
        (g, x, y) with x*a + y*b == g == gcd(a, b) and g >= 0.
    """
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def modinv(a: int, n: int) -> int:
    """Inverse of a modulo n.  Requires gcd(a, n) == 1."""
    g, x, _ = xgcd(a, n)
    if g != 1:
        raise ValueError(f"{a} is not invertible modulo {n}")
    return x % n


@dataclass(frozen=True)
class RingSpec:
    """Z (modulus None) or Z/n with n >= 2."""

    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.modulus is not None and self.modulus < 2:
            raise ValueError("modulus must be at least 2")

    @property
    def is_integers(self) -> bool:
        return self.modulus is None

    def normalize(self, x: int) -> int:
        return x if self.modulus is None else x % self.modulus

    def is_unit(self, x: int) -> bool:
        if self.modulus is None:
            return x in (1, -1)
        return gcd(x, self.modulus) == 1

    def invert_unit(self, x: int) -> int:
        if self.modulus is None:
            if x not in (1, -1):
                raise ValueError(f"{x} is not a unit in Z")
            return x
        return modinv(x % self.modulus, self.modulus)

    def associate(self, d: int) -> tuple[int, int]:
        """Canonical associate of d with the unit producing it.

        Returns (u, c) with u a unit, u*d == c in the ring, and c the canonical
        representative of the ideal (d): |d| over Z, gcd(d, n) over Z/n
        (with 0 staying 0).  Over Z/n the unit exists because every element is
        associate to gcd(d, n); it is found among the residues congruent to
        the inverse of d/gcd modulo n/gcd.
        """
        n = self.modulus
        if n is None:
            return (1, d) if d >= 0 else (-1, -d)
        d = d % n
        if d == 0:
            return 1, 0
        g = gcd(d, n)
        d1, n1 = d // g, n // g
        u0 = modinv(d1, n1)
        u = u0
        while gcd(u, n) != 1:
            u += n1
        return u % n, g

    def ideal_generator(self, values) -> int:
        """Canonical generator of the ideal spanned by the given scalars."""
        n = self.modulus
        g = 0
        for v in values:
            g = gcd(g, v)
        if n is None:
            return abs(g)
        return gcd(g, n) % n if g else 0

    def divides(self, a: int, b: int) -> bool:
        """Whether b lies in the ideal (a)."""
        n = self.modulus
        if n is None:
            return b % a == 0 if a else b == 0
        a = gcd(a % n, n)
        if a == 0:
            return b % n == 0
        return (b % n) % a == 0

    def annihilator(self, d: int) -> int:
        """Canonical generator of {x : x*d == 0}."""
        n = self.modulus
        if n is None:
            return 1 if d == 0 else 0
        d = gcd(d % n, n)
        return n // d % n

    def solve_scalar(self, d: int, c: int) -> int | None:
        """Smallest-effort y with d*y == c, or None.  Requires d != 0 over Z."""
        n = self.modulus
        if n is None:
            if d == 0:
                return 0 if c == 0 else None
            return c // d if c % d == 0 else None
        d, c = d % n, c % n
        if d == 0:
            return 0 if c == 0 else None
        g = gcd(d, n)
        if c % g:
            return None
        return (c // g) * modinv(d // g, n // g) % (n // g)

    def __str__(self) -> str:
        return "Z" if self.modulus is None else f"Z/{self.modulus}"


ZZ = RingSpec(None)


def Zmod(n: int) -> RingSpec:
    return RingSpec(n)
