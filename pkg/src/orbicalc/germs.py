"""Local models of curves: parametrized branch germs and their exact local numbers.

A branch germ is a pair of polynomials (P(t), Q(t)) with cyclotomic
coefficients and P(0) = Q(0) = 0, modelling one branch of a holomorphic
curve through the origin of C^2.  Local intersection numbers are computed
algebraically: the implicit equation of one branch is eliminated by a
resultant in the parameter, and the vanishing order of its pullback along
the other branch is the tangency-weighted intersection count.  For
polynomial (integrable) germs this agrees with the perturbation count.

Self-intersection numbers (double points of an immersed perturbation) are
computed exactly only for monomial branches, as the gap count of the
numerical semigroup of the two exponents; other branches get a certified
lower bound.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, inf
from typing import Optional, Sequence, Union

from orbicalc.exactmath import CyclotomicElement

Orders = Union[int, float]  # a leading order, or math.inf for a zero component

TRUNCATION_ENV = "ORBICALC_TRUNCATION"


class CommonBranch(ArithmeticError):
    """Two germs share a branch: their local intersection number is undefined."""


class NotCoprime(ValueError):
    """Monomial exponents share a factor: the branch is not embedded off 0."""


class InvalidGerm(ValueError):
    """Germ data violates a structural invariant (see BranchGerm)."""


Term = tuple[int, CyclotomicElement]


def _normalize_terms(terms: Sequence[tuple[int, CyclotomicElement]], side: str) -> tuple[Term, ...]:
    by_exp: dict[int, CyclotomicElement] = {}
    for exp, coeff in terms:
        if exp < 1:
            raise InvalidGerm(f"{side}-component exponent {exp} must be >= 1 (germ maps 0 to 0)")
        by_exp[exp] = by_exp.get(exp, CyclotomicElement.zero(coeff.order)) + coeff
    return tuple(sorted((e, c) for e, c in by_exp.items() if not c.is_zero()))


def _field_order(*term_lists: tuple[Term, ...]) -> int:
    order = 1
    for terms in term_lists:
        for _, c in terms:
            order = order * c.order // gcd(order, c.order)
    return order


def _as_dense(terms: tuple[Term, ...], order: int) -> list[CyclotomicElement]:
    """Dense coefficient list in t (constant term first) over Q(zeta_order)."""
    if not terms:
        return []
    out = [CyclotomicElement.zero(order)] * (terms[-1][0] + 1)
    for e, c in terms:
        out[e] = c.lift(order)
    return out


def _tpoly_gcd(a: list[CyclotomicElement], b: list[CyclotomicElement]) -> list[CyclotomicElement]:
    """Monic gcd of dense polynomials over a cyclotomic field."""
    def trim(p):
        while p and p[-1].is_zero():
            p.pop()
        return p

    def divmod_(num, den):
        num = list(num)
        dn = len(den) - 1
        lead = den[-1]
        for i in range(len(num) - 1, dn - 1, -1):
            c = num[i]
            if c.is_zero():
                continue
            c = c / lead
            for j, dj in enumerate(den):
                num[i - dn + j] = num[i - dn + j] - c * dj
        return trim(num[:dn])

    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, divmod_(a, b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


@dataclass(frozen=True)
class BranchGerm:
    """A parametrized branch t -> (P(t), Q(t)), P(0) = Q(0) = 0.

    Validity checks at construction:

    * not both components zero;
    * the gcd of all exponents appearing in P and Q is 1 (otherwise the
      parametrization factors through t -> t^g and is not injective off 0);
    * gcd(P, Q) as polynomials is a monomial (otherwise the parametrization
      returns to the origin at some t != 0 and the germ is not a local model).
    """

    x_terms: tuple[Term, ...]
    y_terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_terms", _normalize_terms(self.x_terms, "x"))
        object.__setattr__(self, "y_terms", _normalize_terms(self.y_terms, "y"))
        if not self.x_terms and not self.y_terms:
            raise InvalidGerm("germ has both components identically zero")
        support = [e for e, _ in self.x_terms] + [e for e, _ in self.y_terms]
        if reduce(gcd, support) != 1:
            raise InvalidGerm(
                f"exponent support {sorted(support)} has gcd > 1: parametrization "
                "is multiply covered off 0"
            )
        order = self.field_order
        px = _as_dense(self.x_terms, order)
        qy = _as_dense(self.y_terms, order)
        if px and qy:
            g = _tpoly_gcd(px, qy)
            if sum(1 for c in g if not c.is_zero()) > 1:
                raise InvalidGerm(
                    "components share a non-monomial factor: parametrization "
                    "returns to the origin at a nonzero parameter"
                )
        else:
            comp = px or qy
            if sum(1 for c in comp if not c.is_zero()) > 1:
                raise InvalidGerm(
                    "axis germ revisits the origin at a nonzero parameter"
                )

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rational_terms(
        cls,
        x_terms: Sequence[tuple[int, Fraction | int]],
        y_terms: Sequence[tuple[int, Fraction | int]],
    ) -> "BranchGerm":
        conv = lambda ts: tuple((e, CyclotomicElement.from_rational(c)) for e, c in ts)
        return cls(conv(x_terms), conv(y_terms))

    @classmethod
    def monomial(cls, l1: int, l2: int, x_coeff=1, y_coeff=1) -> "BranchGerm":
        """The branch (x_coeff * t^l1, y_coeff * t^l2)."""
        def as_cyc(c):
            return c if isinstance(c, CyclotomicElement) else CyclotomicElement.from_rational(c)
        return cls(((l1, as_cyc(x_coeff)),), ((l2, as_cyc(y_coeff)),))

    # -- structure -----------------------------------------------------------

    @property
    def field_order(self) -> int:
        return _field_order(self.x_terms, self.y_terms)

    @property
    def leading_orders(self) -> tuple[Orders, Orders]:
        l1 = self.x_terms[0][0] if self.x_terms else inf
        l2 = self.y_terms[0][0] if self.y_terms else inf
        return (l1, l2)

    @property
    def max_exponent(self) -> int:
        return max(e for e, _ in self.x_terms + self.y_terms)

    def is_monomial(self) -> bool:
        """Both components a single term (neither identically zero)."""
        return len(self.x_terms) == 1 and len(self.y_terms) == 1

    def scaled(self, x_scale: CyclotomicElement, y_scale: CyclotomicElement) -> "BranchGerm":
        """Image of the germ under (x, y) -> (x_scale * x, y_scale * y)."""
        return BranchGerm(
            tuple((e, x_scale * c) for e, c in self.x_terms),
            tuple((e, y_scale * c) for e, c in self.y_terms),
        )


def truncation_degree(*germs: BranchGerm) -> int:
    """Working-degree cap: 4 * (max exponent in inputs) + 4, or the
    ORBICALC_TRUNCATION environment override if set."""
    override = os.environ.get(TRUNCATION_ENV)
    if override is not None:
        return int(override)
    return 4 * max(g.max_exponent for g in germs) + 4


# ---------------------------------------------------------------------------
# Sparse univariate polynomials over a cyclotomic field (the variable is the
# deformation parameter s of the composed branch).
# ---------------------------------------------------------------------------

SPoly = dict  # {exponent: CyclotomicElement}, zero coefficients never stored


def _sp_mul(p: SPoly, q: SPoly) -> SPoly:
    out: SPoly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            acc = out.get(e)
            prod = c1 * c2
            acc = prod if acc is None else acc + prod
            if acc.is_zero():
                out.pop(e, None)
            else:
                out[e] = acc
    return out


def _sp_sub(p: SPoly, q: SPoly) -> SPoly:
    out = dict(p)
    for e, c in q.items():
        acc = out.get(e)
        acc = -c if acc is None else acc - c
        if acc.is_zero():
            out.pop(e, None)
        else:
            out[e] = acc
    return out


def _sp_divexact(num: SPoly, den: SPoly) -> SPoly:
    """Exact division in K[s]; raises if the division leaves a remainder."""
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    num = dict(num)
    dlead = max(den)
    dcoeff = den[dlead]
    quot: SPoly = {}
    while num:
        nlead = max(num)
        if nlead < dlead:
            raise ArithmeticError("inexact sparse polynomial division")
        c = num[nlead] / dcoeff
        qe = nlead - dlead
        quot[qe] = c
        for e, dc in den.items():
            ee = e + qe
            acc = num.get(ee)
            prod = c * dc
            acc = -prod if acc is None else acc - prod
            if acc.is_zero():
                num.pop(ee, None)
            else:
                num[ee] = acc
    return quot


def _bareiss_determinant(matrix: list[list[SPoly]]) -> SPoly:
    """Fraction-free determinant over K[s], up to sign (rows may be swapped).

    Returns {} for a singular matrix.
    """
    n = len(matrix)
    if n == 0:
        return {0: CyclotomicElement.one()}
    m = [row[:] for row in matrix]
    prev: Optional[SPoly] = None
    for k in range(n - 1):
        pivot_row = next((r for r in range(k, n) if m[r][k]), None)
        if pivot_row is None:
            return {}
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                val = _sp_sub(_sp_mul(m[k][k], m[i][j]), _sp_mul(m[i][k], m[k][j]))
                if prev is not None and val:
                    val = _sp_divexact(val, prev)
                m[i][j] = val
            m[i][k] = {}
        prev = m[k][k]
    return m[n - 1][n - 1]


def _sylvester_resultant(a: list[SPoly], b: list[SPoly]) -> SPoly:
    """Resultant in t of two polynomials with K[s] coefficients, up to sign.

    ``a`` and ``b`` are dense t-coefficient lists (constant first) with
    nonzero leading coefficients.
    """
    n, m = len(a) - 1, len(b) - 1
    if n == 0 and m == 0:
        return {0: CyclotomicElement.one()}
    if n == 0:
        return reduce(_sp_mul, [a[0]] * m)
    if m == 0:
        return reduce(_sp_mul, [b[0]] * n)
    size = n + m
    rows: list[list[SPoly]] = []
    for r in range(m):
        row = [dict() for _ in range(size)]
        for k in range(n + 1):
            row[r + k] = a[n - k]
        rows.append(row)
    for r in range(n):
        row = [dict() for _ in range(size)]
        for k in range(m + 1):
            row[r + k] = b[m - k]
        rows.append(row)
    return _bareiss_determinant(rows)


def _elimination_polynomial(g1: BranchGerm, g2: BranchGerm) -> SPoly:
    """Res_t(P1(s) - P2(t), Q1(s) - Q2(t)): the implicit equation of g2's
    image pulled back along g1, as an exact polynomial in s (up to sign).

    The leading t-coefficients are the (constant) leading coefficients of
    P2, Q2, so the resultant commutes with substituting g1 for (x, y) in
    the implicit equation Res_t(x - P2, y - Q2) of g2.
    """
    order = g1.field_order * g2.field_order // gcd(g1.field_order, g2.field_order)

    def tcoeffs(own: tuple[Term, ...], other: tuple[Term, ...]) -> list[SPoly]:
        # coefficients in t of (own component of g1)(s) - (component of g2)(t)
        const: SPoly = {e: c.lift(order) for e, c in own}
        coeffs = [const]
        if other:
            deg = other[-1][0]
            coeffs.extend({} for _ in range(deg))
            for e, c in other:
                coeffs[e] = {0: -c.lift(order)}
        return coeffs

    a = tcoeffs(g1.x_terms, g2.x_terms)
    b = tcoeffs(g1.y_terms, g2.y_terms)
    return _sylvester_resultant(a, b)


def local_intersection(g1: BranchGerm, g2: BranchGerm) -> int:
    """Local intersection number of two distinct branch germs at the origin.

    Computed as the vanishing order at 0 of the implicit equation of g2
    evaluated along g1.  Symmetric in the two germs; always >= 1.  Raises
    :class:`CommonBranch` when the germs share a branch (the elimination
    polynomial vanishes identically, an exact test here).
    """
    res = _elimination_polynomial(g1, g2)
    if not res:
        raise CommonBranch("germs share a branch (resultant vanishes identically)")
    order = min(res)
    if order < 1:
        raise AssertionError("both germs pass through the origin, order must be >= 1")
    return order


def semigroup_gap_count(l1: int, l2: int) -> int:
    """Number of gaps of the numerical semigroup <l1, l2>, by brute force
    up to the Frobenius bound l1*l2 - l1 - l2."""
    if l1 < 1 or l2 < 1:
        raise ValueError("generators must be positive")
    if gcd(l1, l2) != 1:
        raise NotCoprime(f"gcd({l1},{l2}) != 1: branch not embedded off 0")
    bound = l1 * l2 - l1 - l2
    if bound < 0:
        return 0
    reachable = [False] * (bound + 1)
    reachable[0] = True
    for v in range(1, bound + 1):
        if (v >= l1 and reachable[v - l1]) or (v >= l2 and reachable[v - l2]):
            reachable[v] = True
    return sum(1 for v in range(1, bound + 1) if not reachable[v])


def self_intersection_monomial(l1: int, l2: int) -> int:
    """Local self-intersection number of the monomial branch (a t^l1, t^l2),
    gcd(l1, l2) = 1: the delta invariant, counted as semigroup gaps."""
    return semigroup_gap_count(l1, l2)


def self_intersection(germ: BranchGerm) -> tuple[Fraction, bool]:
    """(value, exact) for the local self-intersection number of a branch.

    Exact for embedded branches (a leading order is 1) and for monomial
    branches; otherwise returns the certified lower bound of the
    (l1-1)(l2-1)/2 estimate with exact=False.
    """
    l1, l2 = germ.leading_orders
    if min(l1, l2) == 1:
        return Fraction(0), True
    if germ.is_monomial():
        return Fraction(self_intersection_monomial(int(l1), int(l2))), True
    if l1 is inf or l2 is inf:
        # a zero component forces the other leading order to be 1 at
        # construction, so this cannot be reached
        raise AssertionError("axis germ with leading order > 1 slipped validation")
    return Fraction((int(l1) - 1) * (int(l2) - 1), 2), False


def leading_order_bounds(
    orders: tuple[Orders, Orders],
    orders2: Optional[tuple[Orders, Orders]] = None,
) -> Fraction | float:
    """Lower bounds for local numbers in terms of leading orders.

    One-germ form: self-intersection >= (l1-1)(l2-1)/2 (finite orders).
    Two-germ form: intersection >= min(l1*l2', l2*l1'), with an infinite
    order (zero component) absorbing in products.
    """
    if orders2 is None:
        l1, l2 = orders
        if l1 is inf or l2 is inf:
            raise ValueError("self-intersection bound needs finite leading orders")
        return Fraction((int(l1) - 1) * (int(l2) - 1), 2)
    l1, l2 = orders
    m1, m2 = orders2
    c1 = l1 * m2
    c2 = l2 * m1
    bound = min(c1, c2)
    return bound if bound is inf else Fraction(int(bound))


@dataclass(frozen=True)
class BranchOrbit:
    """The set Lambda(C)_z of local representatives: distinct images of a germ
    under the isotropy action, with the stabilizer order |Im rho_z|."""

    branches: tuple[BranchGerm, ...]
    stabilizer_order: int


def orbit_branches(germ: BranchGerm, m: int, weights: tuple[int, int]) -> BranchOrbit:
    """Distinct images of the germ under (x,y) -> (zeta_m^{ak} x, zeta_m^{bk} y).

    Two images are identified when one is a reparametrization t -> c*t of
    the other with c a root of unity; since the transformed coefficients
    differ from the originals by fixed m-th roots of unity, any such c has
    order dividing m * j0 (j0 the smallest exponent in the support), and
    the identification test is pure modular arithmetic on exponents.
    """
    a, b = weights
    if m < 1:
        raise ValueError("group order must be positive")
    a %= m
    b %= m
    if gcd(gcd(a, b), m) != 1:
        raise ValueError(f"weights ({a},{b}) mod {m} do not define an effective action")

    sx = [e for e, _ in germ.x_terms]
    sy = [e for e, _ in germ.y_terms]
    j0 = min(sx + sy)
    big = m * j0

    def equivalent_to_identity(k: int) -> bool:
        # exists c = zeta_big^i with c^j = zeta_m^{ak} on the x-support and
        # c^j = zeta_m^{bk} on the y-support
        ta = (j0 * a * k) % big
        tb = (j0 * b * k) % big
        for i in range(big):
            if all((i * j - ta) % big == 0 for j in sx) and all(
                (i * j - tb) % big == 0 for j in sy
            ):
                return True
        return False

    stabilizer = [k for k in range(m) if equivalent_to_identity(k)]
    if m % len(stabilizer) != 0:
        raise AssertionError("stabilizer is not a subgroup")

    seen: set[int] = set()
    reps: list[int] = []
    for k in range(m):
        if k in seen:
            continue
        reps.append(k)
        for s in stabilizer:
            seen.add((k + s) % m)

    branches = tuple(
        germ.scaled(CyclotomicElement.zeta(m, (a * k) % m), CyclotomicElement.zeta(m, (b * k) % m))
        if k else germ
        for k in reps
    )
    return BranchOrbit(branches, stabilizer_order=len(stabilizer))
