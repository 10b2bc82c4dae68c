"""Exact scalar arithmetic: rationals, modular inverses, cyclotomic field elements.

Rationals are ``fractions.Fraction`` (arbitrary-precision, always reduced,
positive denominator), re-exported as :data:`Rational`.  Elements of the
m-th cyclotomic field Q(zeta_m) are represented as polynomials in zeta_m
reduced modulo the m-th cyclotomic polynomial Phi_m, so that the quotient
is a field and every nonzero element is invertible.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import gcd
from typing import Sequence

Rational = Fraction


class ZeroInverse(ZeroDivisionError):
    """Inversion of the zero element of a cyclotomic field."""


class NotRational(ValueError):
    """A cyclotomic element expected to be rational has nonzero higher terms."""


class NotInvertible(ValueError):
    """Modular inverse requested for a residue not coprime to the modulus."""


def format_rational(q: Fraction | int) -> str:
    """Serialize a rational as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into an exact rational."""
    return Fraction(text.strip())


def mod_inverse(b: int, m: int) -> int:
    """The unique x in [0, m-1] with b*x = 1 (mod m).

    Raises :class:`NotInvertible` when gcd(b, m) != 1.
    """
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if gcd(b, m) != 1:
        raise NotInvertible(f"{b} is not invertible mod {m}")
    return pow(b, -1, m)


def euler_phi(n: int) -> int:
    """Euler totient, by trial-division factorization."""
    if n < 1:
        raise ValueError(f"totient argument must be positive, got {n}")
    result = n
    remaining = n
    p = 2
    while p * p <= remaining:
        if remaining % p == 0:
            while remaining % p == 0:
                remaining //= p
            result -= result // p
        p += 1
    if remaining > 1:
        result -= result // remaining
    return result


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


# ---------------------------------------------------------------------------
# Dense integer polynomials (constant term first), used only for Phi_m.
# ---------------------------------------------------------------------------

def _zpoly_divexact(num: Sequence[int], den: Sequence[int]) -> tuple[int, ...]:
    """Exact division of integer polynomials; den must be monic."""
    num = list(num)
    dn = len(den) - 1
    assert den[-1] == 1
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        quot[i - dn] = c
        for j, dj in enumerate(den):
            num[i - dn + j] -= c * dj
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return tuple(quot)


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m (constant term first), by recursive exact division.

    Phi_m = (x^m - 1) / prod(Phi_d for proper divisors d of m).
    """
    if m < 1:
        raise ValueError(f"cyclotomic index must be positive, got {m}")
    poly: tuple[int, ...] = tuple([-1] + [0] * (m - 1) + [1])
    for d in divisors(m)[:-1]:
        poly = _zpoly_divexact(poly, cyclotomic_polynomial(d))
    return poly


# ---------------------------------------------------------------------------
# Dense rational polynomials (constant term first), internal helpers.
# ---------------------------------------------------------------------------

_F0 = Fraction(0)
_F1 = Fraction(1)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pscale(a: list[Fraction], c: Fraction) -> list[Fraction]:
    if c == 0:
        return []
    return [ai * c for ai in a]

def _pmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj != 0:
                out[i + j] += ai * bj
    return _trim(out)


def _pdivmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    if dn < 0:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [_F0] * max(len(num) - dn, 0)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        c /= lead
        quot[i - dn] = c
        for j, dj in enumerate(den):
            num[i - dn + j] -= c * dj
    return _trim(quot), _trim(num[:dn])


def _pxgcd(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction], list[Fraction]]:
    """Extended Euclid: returns (g, u, v) with u*a + v*b = g."""
    r0, r1 = list(a), list(b)
    s0, s1 = [_F1], []
    t0, t1 = [], [_F1]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pscale(_pmul(q, s1), Fraction(-1)))
        t0, t1 = t1, _padd(t0, _pscale(_pmul(q, t1), Fraction(-1)))
    return r0, s0, t0


@functools.lru_cache(maxsize=None)
def _phi_fractions(m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in cyclotomic_polynomial(m))


class CyclotomicElement:
    """An element of Q(zeta_m), stored as phi(m) rational coordinates.

    The coordinates are the coefficients of the representing polynomial in
    zeta_m, reduced mod Phi_m.  Equality is structural; arithmetic never
    leaves the reduced representation.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[Fraction | int]):
        deg = len(cyclotomic_polynomial(order)) - 1
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > deg:
            coeffs = self._reduce(order, coeffs)
        coeffs.extend([_F0] * (deg - len(coeffs)))
        self.order = order
        self.coeffs = tuple(coeffs)

    @staticmethod
    def _reduce(order: int, coeffs: list[Fraction]) -> list[Fraction]:
        _, rem = _pdivmod(coeffs, list(_phi_fractions(order)))
        return rem

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order: int = 1) -> "CyclotomicElement":
        return cls(order, [])

    @classmethod
    def one(cls, order: int = 1) -> "CyclotomicElement":
        return cls(order, [1])

    @classmethod
    def from_rational(cls, value: Fraction | int, order: int = 1) -> "CyclotomicElement":
        return cls(order, [Fraction(value)])

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "CyclotomicElement":
        """zeta_m^power as a reduced element of Q(zeta_m)."""
        power %= order
        return cls(order, [_F0] * power + [_F1])

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclotomicElement):
            if isinstance(other, (int, Fraction)):
                other = CyclotomicElement.from_rational(other, self.order)
            else:
                return NotImplemented
        if self.order != other.order:
            a, b = lift_pair(self, other)
            return a.coeffs == b.coeffs
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        terms = [f"{c}*z{self.order}^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "Cyc(0)" if not terms else "Cyc(" + " + ".join(terms) + ")"

    def lift(self, order: int) -> "CyclotomicElement":
        """Embed into Q(zeta_M) for a multiple M of the current order."""
        if order == self.order:
            return self
        if order % self.order != 0:
            raise ValueError(f"cannot lift order {self.order} into order {order}")
        step = order // self.order
        out = [_F0] * (self.order * step)
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return CyclotomicElement(order, out)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "CyclotomicElement | None":
        if isinstance(other, CyclotomicElement):
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement.from_rational(other, self.order)
        return None

    def __add__(self, other) -> "CyclotomicElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = lift_pair(self, other)
        return CyclotomicElement(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(self.order, [-c for c in self.coeffs])

    def __sub__(self, other) -> "CyclotomicElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "CyclotomicElement":
        return -(self - other)

    def __mul__(self, other) -> "CyclotomicElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = lift_pair(self, other)
        prod = _pmul(list(a.coeffs), list(b.coeffs))
        return CyclotomicElement(a.order, prod)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CyclotomicElement":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * cyc_invert(other)

    def __rtruediv__(self, other) -> "CyclotomicElement":
        return self._coerce(other) * cyc_invert(self)


def lift_pair(a: CyclotomicElement, b: CyclotomicElement) -> tuple[CyclotomicElement, CyclotomicElement]:
    """Lift two elements into the compositum Q(zeta_lcm)."""
    if a.order == b.order:
        return a, b
    m = a.order * b.order // gcd(a.order, b.order)
    return a.lift(m), b.lift(m)


def cyc_invert(e: CyclotomicElement) -> CyclotomicElement:
    """Inverse in Q(zeta_m), via extended Euclid against Phi_m.

    Raises :class:`ZeroInverse` on the zero element.
    """
    if e.is_zero():
        raise ZeroInverse("zero has no inverse in Q(zeta_m)")
    phi = list(_phi_fractions(e.order))
    g, u, _ = _pxgcd(list(e.coeffs), phi)
    # g is a nonzero constant: Phi_m is irreducible and e is nonzero mod Phi_m.
    if len(g) != 1:
        raise ArithmeticError("gcd with the cyclotomic polynomial is not constant")
    inv = _pscale(u, 1 / g[0])
    return CyclotomicElement(e.order, inv)


def rational_part(e: CyclotomicElement) -> Fraction:
    """The constant coordinate, certified: errors unless all higher ones vanish.

    Raises :class:`NotRational` when the element is not in Q.
    """
    if any(c != 0 for c in e.coeffs[1:]):
        raise NotRational(f"element has nonzero non-constant coordinates: {e!r}")
    return e.coeffs[0] if e.coeffs else _F0
