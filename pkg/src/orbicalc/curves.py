"""Global curve invariants: pairings, virtual genus, adjunction and intersection ledgers.

A curve presentation bundles a curve class on a weighted projective plane
with its domain orbifold Riemann surface and the marked local data (branch
sets and stabilizers) at every contributing point.  The adjunction check
compares the virtual genus against the orbifold genus plus the per-point
contributions

    k_z        = (sum_a d_a  +  sum_{a,b} C_a . C_b) / (2 |G_z|)
    k_[z,z']   = (sum_{a,a'} C_a . C'_a') / |G_[z,z']|

computed from the exact germ oracle (the double sum in k_z runs over all
ordered pairs, a = b included).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from orbicalc.germs import (
    BranchGerm,
    local_intersection,
    orbit_branches,
    self_intersection,
)
from orbicalc.orbifold import (
    CyclicSingularPoint,
    OrbifoldRiemannSurface,
    WeightedProjectivePlane,
    orbifold_genus,
)


class InexactSelfIntersection(ArithmeticError):
    """A contribution relies on a non-monomial self-intersection: only a
    lower bound is available."""

    def __init__(self, message: str, lower_bound: Fraction):
        super().__init__(message)
        self.lower_bound = lower_bound


class InvalidPresentation(ValueError):
    """Presentation data violates a structural invariant."""


@dataclass(frozen=True)
class CurveClass:
    """A curve class on a weighted projective plane: degree and multiplicity.

    On spaces with only isolated singularities every curve has multiplicity 1.
    """

    ambient: WeightedProjectivePlane
    degree: Fraction
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "degree", Fraction(self.degree))
        if self.multiplicity < 1:
            raise InvalidPresentation("multiplicity must be >= 1")
        if self.multiplicity != 1:
            raise InvalidPresentation(
                "weighted projective planes have only isolated singularities, "
                "so curve multiplicity must be 1"
            )


def pairing(class_degree: Fraction, curve: CurveClass) -> Fraction:
    """Pairing of a degree-a class with a curve: a*r / (d1 d2 d3 * m_C)."""
    return (
        Fraction(class_degree)
        * curve.degree
        / (curve.ambient.weight_product * curve.multiplicity)
    )


def intersection_number(c1: CurveClass, c2: CurveClass) -> Fraction:
    """C . C' = pairing of PD(C) (degree r1/m1) with C'."""
    if c1.ambient != c2.ambient:
        raise InvalidPresentation("curves live on different ambient spaces")
    return pairing(c1.degree / c1.multiplicity, c2)


def chern_pairing(curve: CurveClass) -> Fraction:
    """c1(TX) . C; the tangent bundle has degree d1 + d2 + d3."""
    return pairing(curve.ambient.weight_sum, curve)


def virtual_genus(curve: CurveClass) -> Fraction:
    """g(C) = (C.C - c1(TX).C)/2 + 1/m_C."""
    self_int = intersection_number(curve, curve)
    return (self_int - chern_pairing(curve)) / 2 + Fraction(1, curve.multiplicity)


@dataclass(frozen=True)
class MarkedPointData:
    """Local data of a presentation at one domain point z.

    ``branches`` is the set Lambda(C)_z of local representatives at the
    ambient point; ``stabilizer_order`` is |Im rho_z|, which equals the
    isotropy order of z in the domain.  At a smooth ambient point
    (ambient_point None) the isotropy group is trivial.
    """

    label: str
    branches: tuple[BranchGerm, ...]
    ambient_point: Optional[CyclicSingularPoint] = None
    stabilizer_order: int = 1

    def __post_init__(self):
        if not self.branches:
            raise InvalidPresentation(f"{self.label}: needs at least one branch")
        if len(self.branches) * self.stabilizer_order != self.ambient_order:
            raise InvalidPresentation(
                f"{self.label}: {len(self.branches)} branches x stabilizer "
                f"{self.stabilizer_order} != |G_p| = {self.ambient_order}"
            )

    @property
    def ambient_order(self) -> int:
        return self.ambient_point.group_order if self.ambient_point else 1

    @property
    def domain_order(self) -> int:
        # the local representative is an embedding off 0, so Im rho_z is a
        # faithful image of the domain isotropy group
        return self.stabilizer_order

    @property
    def ambient_label(self) -> str:
        return self.ambient_point.label if self.ambient_point else "smooth"

    @classmethod
    def from_orbit(
        cls,
        label: str,
        germ: BranchGerm,
        ambient_point: Optional[CyclicSingularPoint] = None,
    ) -> "MarkedPointData":
        """Build the branch set Lambda(C)_z as the isotropy orbit of one germ."""
        if ambient_point is None:
            return cls(label=label, branches=(germ,))
        orbit = orbit_branches(
            germ, ambient_point.group_order, ambient_point.tangent_weights
        )
        return cls(
            label=label,
            branches=orbit.branches,
            ambient_point=ambient_point,
            stabilizer_order=orbit.stabilizer_order,
        )


@dataclass(frozen=True)
class CurvePresentation:
    """A parametrized curve: class, domain surface, and marked local data.

    The marked points must cover every point over a singular ambient point
    and every multi-branch point; the ledger cannot certify that an unmarked
    point contributes zero (user contract).
    """

    curve: CurveClass
    domain: OrbifoldRiemannSurface
    marked_points: tuple[MarkedPointData, ...] = field(default_factory=tuple)
    identified_pairs: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self):
        labels = [m.label for m in self.marked_points]
        if len(set(labels)) != len(labels):
            raise InvalidPresentation("marked point labels must be distinct")
        marked_orders = sorted(m.domain_order for m in self.marked_points if m.domain_order > 1)
        surface_orders = sorted(self.domain.orbifold_point_orders)
        if marked_orders != surface_orders:
            raise InvalidPresentation(
                f"orbifold point orders of the domain {surface_orders} do not match "
                f"the marked-point isotropy orders {marked_orders}"
            )
        for za, zb in self.identified_pairs:
            a, b = self.point(za), self.point(zb)
            if za == zb:
                raise InvalidPresentation("identified pair must consist of distinct points")
            if a.ambient_label != b.ambient_label:
                raise InvalidPresentation(
                    f"identified pair [{za},{zb}] maps to different ambient points"
                )

    def point(self, label: str) -> MarkedPointData:
        for m in self.marked_points:
            if m.label == label:
                return m
        raise InvalidPresentation(f"no marked point labelled {label!r}")


# ---------------------------------------------------------------------------
# Contributions
# ---------------------------------------------------------------------------


def _k_z_parts(data: MarkedPointData) -> tuple[Fraction, bool]:
    """(value, exact) for the one-point contribution k_z."""
    branches = data.branches
    selfs = []
    exact = True
    for g in branches:
        v, ex = self_intersection(g)
        selfs.append(v)
        exact = exact and ex
    total = 2 * sum(selfs)
    for i in range(len(branches)):
        for j in range(len(branches)):
            if i != j:
                total += local_intersection(branches[i], branches[j])
    return total / Fraction(2 * data.ambient_order), exact


def k_z(data: MarkedPointData) -> Fraction:
    """Adjunction contribution of a single domain point.

    Raises :class:`InexactSelfIntersection` (carrying the lower bound) when
    a branch is non-monomial so only a bound is available.
    """
    value, exact = _k_z_parts(data)
    if not exact:
        raise InexactSelfIntersection(
            f"{data.label}: non-monomial branch, k_z >= {value} is a bound only",
            lower_bound=value,
        )
    return value


def _cross_sum(
    first: MarkedPointData, second: MarkedPointData, group_order: int
) -> Fraction:
    total = 0
    for ga in first.branches:
        for gb in second.branches:
            total += local_intersection(ga, gb)
    return Fraction(total, group_order)


def k_pair(z_data: MarkedPointData, z_prime_data: MarkedPointData) -> Fraction:
    """Contribution k_[z,z'] of an identified pair on one curve."""
    if z_data.ambient_label != z_prime_data.ambient_label:
        raise InvalidPresentation("paired points must map to the same ambient point")
    return _cross_sum(z_data, z_prime_data, z_data.ambient_order)


def k_int(z_data: MarkedPointData, z_prime_data: MarkedPointData) -> Fraction:
    """Contribution k_(z,z') of a common point of two distinct curves."""
    if z_data.ambient_label != z_prime_data.ambient_label:
        raise InvalidPresentation("intersection points must map to the same ambient point")
    return _cross_sum(z_data, z_prime_data, z_data.ambient_order)


@dataclass(frozen=True)
class ContributionEntry:
    kind: str  # "point" or "pair"
    label: str
    ambient: str
    value: Fraction
    exact: bool


@dataclass(frozen=True)
class AdjunctionReport:
    lhs: Fraction
    g_sigma: Fraction
    contributions: tuple[ContributionEntry, ...]
    rhs: Fraction
    equal: bool
    bound_only: bool
    suborbifold: bool

    @property
    def verdict(self) -> str:
        if self.bound_only:
            return "bound-consistent" if self.lhs >= self.rhs else "mismatch"
        return "equal" if self.equal else "mismatch"


def adjunction_check(presentation: CurvePresentation) -> AdjunctionReport:
    """Evaluate both sides of the adjunction formula for a presentation.

    When every contribution is exact the report certifies equality; when a
    self-intersection is only bounded below, the report is labelled
    bound-only and certifies the inequality instead.
    """
    lhs = virtual_genus(presentation.curve)
    g_sigma = orbifold_genus(presentation.domain)
    entries: list[ContributionEntry] = []
    for data in presentation.marked_points:
        value, exact = _k_z_parts(data)
        entries.append(
            ContributionEntry("point", data.label, data.ambient_label, value, exact)
        )
    for za, zb in presentation.identified_pairs:
        value = k_pair(presentation.point(za), presentation.point(zb))
        entries.append(
            ContributionEntry("pair", f"[{za},{zb}]", presentation.point(za).ambient_label, value, True)
        )
    rhs = g_sigma + sum(e.value for e in entries)
    bound_only = any(not e.exact for e in entries)
    equal = (not bound_only) and lhs == rhs
    suborbifold = (not bound_only) and all(e.value == 0 for e in entries)
    return AdjunctionReport(
        lhs=lhs,
        g_sigma=g_sigma,
        contributions=tuple(entries),
        rhs=rhs,
        equal=equal,
        bound_only=bound_only,
        suborbifold=suborbifold,
    )


def is_suborbifold(presentation: CurvePresentation) -> bool:
    """True iff every adjunction contribution vanishes: the curve is embedded
    with one embedded invariant local representative at each singular point."""
    return adjunction_check(presentation).suborbifold


@dataclass(frozen=True)
class IntersectionEntry:
    pair: tuple[str, str]
    ambient: str
    value: Fraction


@dataclass(frozen=True)
class IntersectionReport:
    expected: Fraction
    entries: tuple[IntersectionEntry, ...]
    total: Fraction
    equal: bool


def intersection_check(
    first: CurvePresentation,
    second: CurvePresentation,
    meetings: Sequence[tuple[str, str]],
) -> IntersectionReport:
    """Verify the intersection formula: sum of k_(z,z') against C . C'."""
    expected = intersection_number(first.curve, second.curve)
    entries = []
    for za, zb in meetings:
        a, b = first.point(za), second.point(zb)
        entries.append(IntersectionEntry((za, zb), a.ambient_label, k_int(a, b)))
    total = sum((e.value for e in entries), Fraction(0))
    return IntersectionReport(
        expected=expected,
        entries=tuple(entries),
        total=total,
        equal=total == expected,
    )


# ---------------------------------------------------------------------------
# Standard presentations on P(d1,d2,d3)
# ---------------------------------------------------------------------------


def axis_presentation(space: WeightedProjectivePlane) -> CurvePresentation:
    """The coordinate curve {z1 = 0}: degree d1, through p2 and p3.

    At p_i (local coordinates the other two z's, z1 first) the curve is the
    invariant coordinate axis (0, t).
    """
    d1, _, _ = space.weights
    axis = BranchGerm.from_rational_terms((), ((1, 1),))
    marked = tuple(
        MarkedPointData.from_orbit(f"z{i}", axis, space.point(f"p{i}")) for i in (2, 3)
    )
    curve = CurveClass(space, Fraction(d1))
    domain = OrbifoldRiemannSurface(0, 1, (space.weights[1], space.weights[2]))
    return CurvePresentation(curve, domain, marked)


def lambda_presentation(
    space: WeightedProjectivePlane, coefficient: Fraction | int = 1
) -> CurvePresentation:
    """A member C_lambda of the degree d2*d3 pencil through p1.

    In local coordinates (z2, z3) at p1 the curve has the single branch
    (t^{d2}, c t^{d3}); the pencil parameter lambda corresponds to c^{d2}.
    """
    _, d2, d3 = space.weights
    if Fraction(coefficient) == 0:
        raise InvalidPresentation("pencil member must have ab != 0, need c != 0")
    germ = BranchGerm.monomial(d2, d3, 1, Fraction(coefficient))
    marked = (MarkedPointData.from_orbit("z1", germ, space.point("p1")),)
    curve = CurveClass(space, Fraction(d2 * d3))
    domain = OrbifoldRiemannSurface(0, 1, (space.weights[0],))
    return CurvePresentation(curve, domain, marked)
