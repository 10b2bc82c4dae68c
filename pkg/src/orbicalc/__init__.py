"""orbicalc: exact invariants of 4-orbifolds with isolated cyclic singular points.

Everything is computed in exact arithmetic (arbitrary-precision rationals and
cyclotomic field elements); no floating point enters any result.
"""

__version__ = "0.1.0"

from orbicalc.exactmath import (
    Rational,
    CyclotomicElement,
    cyclotomic_polynomial,
    mod_inverse,
)
from orbicalc.orbifold import (
    CyclicSingularPoint,
    WeightedProjectivePlane,
    OrbifoldLineBundle,
    OrbifoldRiemannSurface,
)

__all__ = [
    "Rational",
    "CyclotomicElement",
    "cyclotomic_polynomial",
    "mod_inverse",
    "CyclicSingularPoint",
    "WeightedProjectivePlane",
    "OrbifoldLineBundle",
    "OrbifoldRiemannSurface",
]
