"""Dimension formulas: pseudoholomorphic moduli index and Seiberg-Witten character sums.

The index of a parametrized moduli space at a map from an orbifold sphere
with k <= 3 orbifold points is

    d~ = c1(TX).f_*[Sigma] + 2 - sum_i (m_{i,1} + m_{i,2}) / m_i,

an integer; the parametrized space has dimension 2 d~ and the reduced one
2 d~ - (6 - 2k).

The Seiberg-Witten moduli dimension for a line bundle E on a 4-orbifold
with isolated cyclic singular points is

    d(E) = c1(E)^2 - c1(E).c1(K) + sum_i I_i,
    I_i  = (1/m) sum_{x=1}^{m-1} 2 (z^{c x} - 1) / ((1 - z^{-a x})(1 - z^{-b x})),

with z = zeta_m, (a, b) the tangent weights and c the fiber weight at the
point.  The sum is evaluated exactly; when the fiber weight aligns with a
tangent weight the closed form (m - 1 - 2*delta)/m is computed as well and
the two must agree.

The direct sum is accumulated in the group ring Z[x]/(x^m - 1) packed into
arbitrary-precision integers (one slot per coordinate, sized so that the
4 m^4 coordinate bound leaves guard bits), then reduced mod Phi_m and
certified rational.  Inverses of (1 - z^j) use the exact identity
1/(1 - w) = -(1/n) sum_k k w^k for a primitive n-th root w.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from orbicalc.exactmath import (
    CyclotomicElement,
    cyclotomic_polynomial,
    mod_inverse,
    rational_part,
)
from orbicalc.orbifold import GeneralOrbifoldSurface, WeightedProjectivePlane


class NonIntegralIndex(ArithmeticError):
    """The index formula produced a non-integer: the weight data is inconsistent."""


class UnsupportedGroup(ValueError):
    """Only cyclic isotropy groups are supported by the character sums."""


# ---------------------------------------------------------------------------
# Index formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexInput:
    """Data of the index formula: the Chern pairing and the orbifold points
    (m_i, m_{i,1}, m_{i,2}) of the domain sphere, k <= 3 of them."""

    chern_pairing: Fraction
    orbifold_points: tuple[tuple[int, int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "chern_pairing", Fraction(self.chern_pairing))
        object.__setattr__(
            self, "orbifold_points", tuple(tuple(p) for p in self.orbifold_points)
        )
        if len(self.orbifold_points) > 3:
            raise ValueError("the domain sphere carries at most 3 orbifold points")
        for m, m1, m2 in self.orbifold_points:
            if not (0 < m1 < m and 0 < m2 < m):
                raise ValueError(f"weights ({m1},{m2}) must lie strictly between 0 and {m}")

    @property
    def k(self) -> int:
        return len(self.orbifold_points)


@dataclass(frozen=True)
class IndexDimensions:
    d_tilde: int
    dim_parametrized: int
    dim_moduli: int


def index_dimension(inp: IndexInput) -> IndexDimensions:
    """Evaluate the index formula; raises :class:`NonIntegralIndex` if the
    result is fractional (inconsistent weight data)."""
    d = inp.chern_pairing + 2
    for m, m1, m2 in inp.orbifold_points:
        d -= Fraction(m1 + m2, m)
    if d.denominator != 1:
        raise NonIntegralIndex(f"index d~ = {d} is not an integer")
    d_tilde = int(d)
    return IndexDimensions(
        d_tilde=d_tilde,
        dim_parametrized=2 * d_tilde,
        dim_moduli=2 * d_tilde - (6 - 2 * inp.k),
    )


def example111_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Fixed-point weight pairs (m1, m2) allowed for an invariant (-2)-sphere
    through two Z_n fixed points: 0 < m1, m2 < n with m1 + m2 + 2 = n.

    The alternative m1 + m2 + 2 = 2n forces m1 = m2 = n - 1 and a negative
    moduli dimension, so it never survives.
    """
    if n < 2:
        raise ValueError("the cyclic group order must be at least 2")
    return tuple(
        (m1, n - 2 - m1) for m1 in range(1, n - 1) if 0 < n - 2 - m1 < n
    )


# ---------------------------------------------------------------------------
# Character sums
# ---------------------------------------------------------------------------


def delta_solve(m: int, b: int, c: int) -> int:
    """The unique delta in [0, m-1] with c - b*delta = 0 (mod m)."""
    if m == 1:
        return 0
    return (c % m) * mod_inverse(b, m) % m


def _slot_bits(m: int) -> int:
    # accumulated coordinates are bounded by 4 m^4; keep two guard bits
    return max(32, (4 * m ** 4).bit_length() + 3)


@functools.lru_cache(maxsize=None)
def _inverse_table(m: int) -> tuple[tuple[int, ...], int, int]:
    """Packed integer vectors w_j with 1/(1 - zeta_m^j) = w_j / m, j = 1..m-1.

    For w = zeta_m^j of multiplicative order n:  1/(1-w) = -(1/n) sum_k k w^k,
    so w_j places -(m/n)*k at coordinate j*k mod m.
    """
    bits = _slot_bits(m)
    mask_mod = (1 << (bits * m)) - 1
    table = [0]
    for j in range(1, m):
        n = m // gcd(j, m)
        scale = m // n
        packed = 0
        for k in range(1, n):
            packed -= (scale * k) << (bits * ((j * k) % m))
        table.append(packed % mask_mod)
    return tuple(table), mask_mod, bits


def _fold(value: int, total_bits: int, mask_mod: int) -> int:
    """value mod (2^total_bits - 1) for nonnegative value, by digit folding."""
    while value > mask_mod:
        value = (value & mask_mod) + (value >> total_bits)
    return 0 if value == mask_mod else value


def _decode_packed(value: int, m: int, mask_mod: int, bits: int) -> list[int]:
    """Recover the (balanced) coordinate vector from a packed accumulator."""
    half = 1 << (bits - 2)
    ones = mask_mod // ((1 << bits) - 1)
    shifted = _fold(value + half * ones, bits * m, mask_mod)
    slot_mask = (1 << bits) - 1
    return [((shifted >> (bits * i)) & slot_mask) - half for i in range(m)]


def _reduce_mod_cyclotomic(coeffs: list[int], m: int) -> list[int]:
    """Remainder of an integer coefficient vector modulo the monic Phi_m."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    work = list(coeffs)
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c == 0:
            continue
        for k, pk in enumerate(phi):
            work[i - deg + k] -= c * pk
    return work[:deg]


def _validate_sum_inputs(m: int, a: int, b: int, c: int) -> tuple[int, int, int]:
    if m < 1:
        raise ValueError("group order must be positive")
    a %= m
    b %= m
    c %= m
    if m > 1 and (gcd(a, m) != 1 or gcd(b, m) != 1):
        raise ValueError(
            f"tangent weights ({a},{b}) must be coprime to {m} at an isolated singularity"
        )
    return a, b, c


def character_sum_direct(m: int, a: int, b: int, c: int) -> Fraction:
    """Exact value of (1/m) sum_{x=1}^{m-1} 2(z^{cx}-1)/((1-z^{-ax})(1-z^{-bx})).

    Accumulates in the group ring, reduces mod Phi_m, and certifies the
    result rational via :func:`orbicalc.exactmath.rational_part`.
    """
    a, b, c = _validate_sum_inputs(m, a, b, c)
    if m == 1 or c == 0:
        return Fraction(0)
    table, mask_mod, bits = _inverse_table(m)
    total_bits = bits * m
    acc = 0
    for x in range(1, m):
        packed = _fold(table[(-a * x) % m] * table[(-b * x) % m], total_bits, mask_mod)
        rotated = _fold(packed << (bits * ((c * x) % m)), total_bits, mask_mod)
        acc = _fold(acc + rotated + (mask_mod - packed), total_bits, mask_mod)
    acc = _fold(2 * acc, total_bits, mask_mod)
    coeffs = _decode_packed(acc, m, mask_mod, bits)
    reduced = _reduce_mod_cyclotomic(coeffs, m)
    scale = Fraction(1, m ** 3)
    element = CyclotomicElement(m, [ci * scale for ci in reduced])
    return rational_part(element)


def character_sum_reference(m: int, a: int, b: int, c: int) -> Fraction:
    """Slow reference evaluation, term by term in Q(zeta_m) with field inverses.

    Independent of the packed accumulation used by
    :func:`character_sum_direct`; intended for cross-checks at small m.
    """
    a, b, c = _validate_sum_inputs(m, a, b, c)
    if m == 1:
        return Fraction(0)
    one = CyclotomicElement.one(m)
    total = CyclotomicElement.zero(m)
    for x in range(1, m):
        numerator = 2 * (CyclotomicElement.zeta(m, c * x) - one)
        denominator = (one - CyclotomicElement.zeta(m, -a * x)) * (
            one - CyclotomicElement.zeta(m, -b * x)
        )
        total = total + numerator / denominator
    return rational_part(total * Fraction(1, m))


@dataclass(frozen=True)
class IContribution:
    """The per-point correction I with the closed-form bookkeeping used."""

    value: Fraction
    aligned: bool
    delta: Optional[int] = None
    closed_form: Optional[Fraction] = None


def I_contribution_detail(m: int, tangent: tuple[int, int], c: int) -> IContribution:
    """I for a cyclic point of order m, tangent weights (a, b), fiber weight c.

    When c is congruent to a tangent weight, the closed form
    (m - 1 - 2*delta)/m with delta = delta_solve(m, other weight, c) is also
    computed and must agree with the direct sum.
    """
    a, b, c = _validate_sum_inputs(m, tangent[0], tangent[1], c)
    value = character_sum_direct(m, a, b, c)
    if m > 1 and c != 0:
        other = b if c == a else (a if c == b else None)
        if other is not None:
            delta = delta_solve(m, other, c)
            closed = Fraction(m - 1 - 2 * delta, m)
            if closed != value:
                raise AssertionError(
                    f"closed form {closed} disagrees with the direct sum {value} "
                    f"at (m,a,b,c)=({m},{a},{b},{c})"
                )
            return IContribution(value=value, aligned=True, delta=delta, closed_form=closed)
    return IContribution(value=value, aligned=False)


def I_contribution(m: int, tangent: tuple[int, int], c: int) -> Fraction:
    """The per-point Seiberg-Witten correction I (see I_contribution_detail)."""
    return I_contribution_detail(m, tangent, c).value


# ---------------------------------------------------------------------------
# Seiberg-Witten dimension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SWPoint:
    """Character-sum data at one singular point."""

    label: str
    group_order: int
    tangent_weights: tuple[int, int]
    fiber_weight: int
    group_kind: str = "cyclic"


@dataclass(frozen=True)
class SWInput:
    """Pairings c1(E)^2 and c1(E).c1(K) plus the per-point fiber data."""

    points: tuple[SWPoint, ...]
    c1_squared: Fraction
    c1_dot_canonical: Fraction


@dataclass(frozen=True)
class SWPointResult:
    point: SWPoint
    contribution: IContribution


@dataclass(frozen=True)
class SWResult:
    dimension: Fraction
    c1_squared: Fraction
    c1_dot_canonical: Fraction
    points: tuple[SWPointResult, ...]
    warnings: tuple[str, ...]


def sw_input_for_plane(space: WeightedProjectivePlane, degree: int) -> SWInput:
    """SW data of the degree-e bundle on P(d1,d2,d3): c1(E)^2 = e^2/(d1 d2 d3),
    c1(E).c1(K) = -e (d1+d2+d3)/(d1 d2 d3), fiber weight e mod d_i at p_i."""
    product = space.weight_product
    points = tuple(
        SWPoint(
            label=p.label,
            group_order=p.group_order,
            tangent_weights=p.tangent_weights,
            fiber_weight=degree % p.group_order,
        )
        for p in space.singular_points
    )
    return SWInput(
        points=points,
        c1_squared=Fraction(degree * degree, product),
        c1_dot_canonical=Fraction(-degree * space.weight_sum, product),
    )


def sw_input_for_general(
    space: GeneralOrbifoldSurface,
    fiber_weights: Sequence[int],
    c1_squared: Fraction,
    c1_dot_canonical: Fraction,
) -> SWInput:
    if len(fiber_weights) != len(space.points):
        raise ValueError("one fiber weight per singular point required")
    points = tuple(
        SWPoint(
            label=p.label,
            group_order=p.group_order,
            tangent_weights=p.tangent_weights,
            fiber_weight=w % p.group_order,
        )
        for p, w in zip(space.points, fiber_weights)
    )
    return SWInput(points, Fraction(c1_squared), Fraction(c1_dot_canonical))


def sw_dimension(inp: SWInput) -> SWResult:
    """d(E) = c1(E)^2 - c1(E).c1(K) + sum_i I_i, exactly.

    Non-cyclic isotropy is rejected.  A dimension that is not an even
    integer is reported through ``warnings`` rather than raised: the
    formula outputs a number for any input, the caller models whether it
    is a dimension.
    """
    results = []
    total = inp.c1_squared - inp.c1_dot_canonical
    for point in inp.points:
        if point.group_kind != "cyclic":
            raise UnsupportedGroup(
                f"{point.label}: isotropy group kind {point.group_kind!r} not supported"
            )
        detail = I_contribution_detail(
            point.group_order, point.tangent_weights, point.fiber_weight
        )
        results.append(SWPointResult(point, detail))
        total += detail.value
    warnings = []
    if total.denominator != 1:
        warnings.append(f"dimension {total} is not an integer")
    elif total % 2 != 0:
        warnings.append(f"dimension {total} is not even")
    return SWResult(
        dimension=total,
        c1_squared=inp.c1_squared,
        c1_dot_canonical=inp.c1_dot_canonical,
        points=tuple(results),
        warnings=tuple(warnings),
    )
