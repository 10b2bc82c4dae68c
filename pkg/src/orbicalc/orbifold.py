"""Data model for closed oriented 4-orbifolds with isolated cyclic singular points.

Only the numeric singularity data is stored (isotropy orders and tangent
weights): every formula in this package consumes nothing else.  Weighted
projective planes P(d1,d2,d3) derive their three singular points from the
weights; a general record is provided for arbitrary collections of cyclic
singular points with a user-supplied intersection-pairing scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional


class InvalidOrbifold(ValueError):
    """Construction data violates a structural invariant."""


@dataclass(frozen=True)
class CyclicSingularPoint:
    """An isolated singular point with cyclic isotropy Z_m.

    ``tangent_weights`` are the two weights (a, b) of the isotropy
    representation on the tangent space, as residues mod m.  The action is
    effective, so gcd(a, b, m) = 1.
    """

    label: str
    group_order: int
    tangent_weights: tuple[int, int]

    def __post_init__(self):
        m = self.group_order
        if m < 1:
            raise InvalidOrbifold(f"{self.label}: group order must be positive")
        a, b = self.tangent_weights
        if not (0 <= a < m and 0 <= b < m):
            raise InvalidOrbifold(f"{self.label}: weights must be residues mod {m}")
        if gcd(gcd(a, b), m) != 1:
            raise InvalidOrbifold(
                f"{self.label}: action not effective, gcd({a},{b},{m}) != 1"
            )


@dataclass(frozen=True)
class WeightedProjectivePlane:
    """P(d1,d2,d3) with pairwise coprime weights 1 < d1 < d2 < d3.

    Singular points: p_i = coordinate point with isotropy Z_{d_i}; the
    tangent weights at p_i are the other two weights reduced mod d_i.
    """

    weights: tuple[int, int, int]

    def __post_init__(self):
        d1, d2, d3 = self.weights
        if not (1 < d1 < d2 < d3):
            raise InvalidOrbifold(f"weights must satisfy 1 < d1 < d2 < d3, got {self.weights}")
        for i in range(3):
            for j in range(i + 1, 3):
                if gcd(self.weights[i], self.weights[j]) != 1:
                    raise InvalidOrbifold(
                        f"weights must be pairwise coprime, got {self.weights}"
                    )

    @property
    def singular_points(self) -> tuple[CyclicSingularPoint, CyclicSingularPoint, CyclicSingularPoint]:
        pts = []
        for i in range(3):
            d = self.weights[i]
            others = [self.weights[j] for j in range(3) if j != i]
            pts.append(
                CyclicSingularPoint(
                    label=f"p{i + 1}",
                    group_order=d,
                    tangent_weights=(others[0] % d, others[1] % d),
                )
            )
        return tuple(pts)

    def point(self, label: str) -> CyclicSingularPoint:
        for p in self.singular_points:
            if p.label == label:
                return p
        raise KeyError(f"no singular point {label!r} on P{self.weights}")

    @property
    def weight_product(self) -> int:
        d1, d2, d3 = self.weights
        return d1 * d2 * d3

    @property
    def weight_sum(self) -> int:
        return sum(self.weights)


@dataclass(frozen=True)
class GeneralOrbifoldSurface:
    """A 4-orbifold given by its cyclic singular points and a pairing scale.

    The intersection pairing on the rank-one part of H^2 is user-supplied
    through ``pairing_scale`` (the self-pairing of the degree-1 generator);
    None means no pairing data, which restricts use to per-point sums.
    """

    points: tuple[CyclicSingularPoint, ...]
    pairing_scale: Optional[Fraction] = None

    def point(self, label: str) -> CyclicSingularPoint:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(f"no singular point {label!r}")


@dataclass(frozen=True)
class OrbifoldLineBundle:
    """An orbifold line bundle of integer degree e over a weighted projective plane."""

    ambient: WeightedProjectivePlane
    degree: int

    def fiber_weight(self, index: int) -> int:
        """Isotropy weight of the fiber at p_index (1-based): e mod d_index."""
        if index not in (1, 2, 3):
            raise ValueError(f"point index must be 1, 2 or 3, got {index}")
        return self.degree % self.ambient.weights[index - 1]


@dataclass(frozen=True)
class OrbifoldRiemannSurface:
    """A closed orbifold Riemann surface: genus, regular multiplicity, point orders.

    Orbifold points have orders m_i, each a proper multiple of the regular
    multiplicity m_sigma (the isotropy order at generic points).
    """

    underlying_genus: int
    regular_multiplicity: int = 1
    orbifold_point_orders: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.underlying_genus < 0:
            raise InvalidOrbifold("genus must be nonnegative")
        m = self.regular_multiplicity
        if m < 1:
            raise InvalidOrbifold("regular multiplicity must be positive")
        for mi in self.orbifold_point_orders:
            if mi <= m or mi % m != 0:
                raise InvalidOrbifold(
                    f"orbifold point order {mi} must be a proper multiple of {m}"
                )


def orbifold_genus(surface: OrbifoldRiemannSurface) -> Fraction:
    """g_Sigma = g/m_Sigma + sum_i (1/(2 m_Sigma) - 1/(2 m_i))."""
    m = surface.regular_multiplicity
    g = Fraction(surface.underlying_genus, m)
    for mi in surface.orbifold_point_orders:
        g += Fraction(1, 2 * m) - Fraction(1, 2 * mi)
    return g


def euler_pairing(surface: OrbifoldRiemannSurface) -> Fraction:
    """c1(T Sigma) . [Sigma] = 2/m_Sigma - 2 g_Sigma."""
    return Fraction(2, surface.regular_multiplicity) - 2 * orbifold_genus(surface)


def canonical_degree(space: WeightedProjectivePlane) -> int:
    """Degree of the canonical bundle of P(d1,d2,d3): -(d1+d2+d3)."""
    return -space.weight_sum


def fiber_weight(bundle: OrbifoldLineBundle, index: int) -> int:
    """Isotropy weight of the fiber of the bundle at p_index."""
    return bundle.fiber_weight(index)
