"""Parsing and serialization of the JSON/TOML interchange formats.

All rational values travel as strings "p/q" (or "p" when the denominator
is 1); germ coefficients additionally accept symbolic root-of-unity tokens
"zeta(m)^k", optionally scaled: "3/2*zeta(5)^2", "-zeta(3)".  Unknown keys
are rejected everywhere.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Mapping, Sequence

from orbicalc.curves import (
    CurveClass,
    CurvePresentation,
    MarkedPointData,
    lambda_presentation,
    axis_presentation,
)
from orbicalc.exactmath import CyclotomicElement, format_rational, parse_rational
from orbicalc.germs import BranchGerm, truncation_degree
from orbicalc.orbifold import (
    CyclicSingularPoint,
    GeneralOrbifoldSurface,
    OrbifoldRiemannSurface,
    WeightedProjectivePlane,
)


class ValidationError(ValueError):
    """Malformed input; carries a pointer to the offending field."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


def _require_keys(obj: Mapping[str, Any], allowed: set[str], required: set[str], ptr: str):
    if not isinstance(obj, Mapping):
        raise ValidationError(ptr, f"expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(ptr, f"unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ValidationError(ptr, f"missing fields {sorted(missing)}")


def _as_int(value: Any, ptr: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(ptr, f"expected an integer, got {value!r}")
    return value


def _as_rational(value: Any, ptr: str) -> Fraction:
    if isinstance(value, bool):
        raise ValidationError(ptr, f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(ptr, f"bad rational {value!r}: {exc}") from None
    raise ValidationError(ptr, f"expected a rational string, got {value!r} (floats are rejected)")


_COEFF_RE = re.compile(
    r"^\s*(?P<sign>-)?\s*(?:(?P<scale>\d+(?:/\d+)?)\s*\*\s*)?"
    r"zeta\((?P<order>\d+)\)(?:\^(?P<power>-?\d+))?\s*$"
)


def _parse_coefficient_token(token: str, ptr: str) -> CyclotomicElement:
    match = _COEFF_RE.match(token)
    if match:
        order = int(match.group("order"))
        if order < 1:
            raise ValidationError(ptr, "zeta order must be positive")
        power = int(match.group("power") or 1)
        scale = Fraction(match.group("scale") or 1)
        if match.group("sign"):
            scale = -scale
        return CyclotomicElement.zeta(order, power) * scale
    try:
        return CyclotomicElement.from_rational(parse_rational(token))
    except (ValueError, ZeroDivisionError):
        raise ValidationError(
            ptr, f"bad coefficient {token!r} (want 'p/q' or 'c*zeta(m)^k')"
        ) from None


def parse_coefficient(value: Any, ptr: str) -> CyclotomicElement:
    """A germ coefficient: rational, or a sum of (scaled) zeta(m)^k tokens."""
    if isinstance(value, int) and not isinstance(value, bool):
        return CyclotomicElement.from_rational(Fraction(value))
    if isinstance(value, str):
        tokens = [t.strip() for t in value.split("+")]
        if not all(tokens):
            raise ValidationError(ptr, f"bad coefficient {value!r}")
        total = _parse_coefficient_token(tokens[0], ptr)
        for token in tokens[1:]:
            total = total + _parse_coefficient_token(token, ptr)
        return total
    raise ValidationError(ptr, f"bad coefficient {value!r}")


def parse_germ(obj: Any, ptr: str = "germ") -> BranchGerm:
    """{"x": [[exponent, coefficient], ...], "y": [...]} (either list may be empty)."""
    _require_keys(obj, {"x", "y"}, {"x", "y"}, ptr)

    def side(name: str) -> tuple:
        terms = obj[name]
        if not isinstance(terms, Sequence) or isinstance(terms, (str, bytes)):
            raise ValidationError(f"{ptr}.{name}", "expected a list of [exponent, coefficient]")
        out = []
        for i, term in enumerate(terms):
            if not isinstance(term, Sequence) or len(term) != 2:
                raise ValidationError(f"{ptr}.{name}[{i}]", "expected [exponent, coefficient]")
            exp = _as_int(term[0], f"{ptr}.{name}[{i}].exponent")
            coeff = parse_coefficient(term[1], f"{ptr}.{name}[{i}].coefficient")
            out.append((exp, coeff))
        return tuple(out)

    try:
        germ = BranchGerm(side("x"), side("y"))
    except ValueError as exc:
        raise ValidationError(ptr, str(exc)) from None
    cap = truncation_degree(germ)
    if germ.max_exponent > cap:
        raise ValidationError(
            ptr, f"exponent {germ.max_exponent} exceeds the truncation cap {cap}"
        )
    return germ


def germ_to_json(germ: BranchGerm) -> dict:
    def token(q: Fraction, order: int, power: int) -> str:
        scale = format_rational(abs(q))
        sign = "-" if q < 0 else ""
        return f"{sign}{scale}*zeta({order})^{power}"

    def side(terms):
        out = []
        for exp, coeff in terms:
            if all(c == 0 for c in coeff.coeffs[1:]):
                out.append([exp, format_rational(coeff.coeffs[0])])
            else:
                parts = [
                    token(c, coeff.order, i)
                    for i, c in enumerate(coeff.coeffs)
                    if c != 0
                ]
                out.append([exp, " + ".join(parts)])
        return out

    return {"x": side(germ.x_terms), "y": side(germ.y_terms)}


def parse_wps(obj: Any, ptr: str = "space.wps") -> WeightedProjectivePlane:
    if (
        not isinstance(obj, Sequence)
        or isinstance(obj, (str, bytes))
        or len(obj) != 3
    ):
        raise ValidationError(ptr, "expected three weights [d1, d2, d3]")
    weights = tuple(_as_int(w, f"{ptr}[{i}]") for i, w in enumerate(obj))
    try:
        return WeightedProjectivePlane(weights)
    except ValueError as exc:
        raise ValidationError(ptr, str(exc)) from None


def parse_space(obj: Any, ptr: str = "space"):
    """{"wps": [d1,d2,d3]} or {"points": [...], "pairing_scale": "1/30"}."""
    _require_keys(obj, {"wps", "points", "pairing_scale"}, set(), ptr)
    if "wps" in obj:
        if "points" in obj or "pairing_scale" in obj:
            raise ValidationError(ptr, "give either wps or a general point list, not both")
        return parse_wps(obj["wps"], f"{ptr}.wps")
    if "points" not in obj:
        raise ValidationError(ptr, "need wps or points")
    points = []
    for i, p in enumerate(obj["points"]):
        pptr = f"{ptr}.points[{i}]"
        _require_keys(p, {"label", "order", "weights", "group"}, {"order", "weights"}, pptr)
        weights = p["weights"]
        if not isinstance(weights, Sequence) or len(weights) != 2:
            raise ValidationError(f"{pptr}.weights", "expected two tangent weights")
        group = p.get("group", "cyclic")
        if group != "cyclic":
            # surfaced as a computation error downstream; reject structurally here
            raise ValidationError(f"{pptr}.group", f"unsupported isotropy group kind {group!r}")
        order = _as_int(p["order"], f"{pptr}.order")
        try:
            points.append(
                CyclicSingularPoint(
                    label=p.get("label", f"q{i + 1}"),
                    group_order=order,
                    tangent_weights=(
                        _as_int(weights[0], f"{pptr}.weights[0]") % order,
                        _as_int(weights[1], f"{pptr}.weights[1]") % order,
                    ),
                )
            )
        except ValueError as exc:
            raise ValidationError(pptr, str(exc)) from None
    scale = obj.get("pairing_scale")
    return GeneralOrbifoldSurface(
        points=tuple(points),
        pairing_scale=_as_rational(scale, f"{ptr}.pairing_scale") if scale is not None else None,
    )


def parse_surface(obj: Any, ptr: str = "domain") -> OrbifoldRiemannSurface:
    _require_keys(
        obj,
        {"genus", "regular_multiplicity", "point_orders"},
        {"genus"},
        ptr,
    )
    try:
        return OrbifoldRiemannSurface(
            underlying_genus=_as_int(obj["genus"], f"{ptr}.genus"),
            regular_multiplicity=_as_int(obj.get("regular_multiplicity", 1), f"{ptr}.regular_multiplicity"),
            orbifold_point_orders=tuple(
                _as_int(v, f"{ptr}.point_orders[{i}]")
                for i, v in enumerate(obj.get("point_orders", ()))
            ),
        )
    except ValueError as exc:
        raise ValidationError(ptr, str(exc)) from None


def parse_presentation(
    obj: Any, space: WeightedProjectivePlane, ptr: str = "presentation"
) -> CurvePresentation:
    """Full presentation document; see README for the schema."""
    _require_keys(
        obj,
        {"curve", "domain", "marked_points", "identified_pairs"},
        {"curve", "domain"},
        ptr,
    )
    curve_obj = obj["curve"]
    _require_keys(curve_obj, {"degree", "multiplicity"}, {"degree"}, f"{ptr}.curve")
    try:
        curve = CurveClass(
            space,
            _as_rational(curve_obj["degree"], f"{ptr}.curve.degree"),
            _as_int(curve_obj.get("multiplicity", 1), f"{ptr}.curve.multiplicity"),
        )
    except ValueError as exc:
        raise ValidationError(f"{ptr}.curve", str(exc)) from None
    domain = parse_surface(obj["domain"], f"{ptr}.domain")
    marked = []
    for i, mp in enumerate(obj.get("marked_points", ())):
        mptr = f"{ptr}.marked_points[{i}]"
        _require_keys(
            mp,
            {"label", "ambient", "branches", "stabilizer_order", "domain_order", "germ", "expand_orbit"},
            {"label", "ambient"},
            mptr,
        )
        label = mp["label"]
        ambient_name = mp["ambient"]
        if ambient_name == "smooth":
            point = None
        else:
            try:
                point = space.point(ambient_name)
            except KeyError as exc:
                raise ValidationError(f"{mptr}.ambient", str(exc)) from None
        try:
            if mp.get("expand_orbit"):
                if "germ" not in mp or "branches" in mp:
                    raise ValidationError(
                        mptr, "expand_orbit takes a single germ and no branch list"
                    )
                data = MarkedPointData.from_orbit(
                    label, parse_germ(mp["germ"], f"{mptr}.germ"), point
                )
            else:
                branches = tuple(
                    parse_germ(g, f"{mptr}.branches[{j}]")
                    for j, g in enumerate(mp.get("branches", ()))
                )
                data = MarkedPointData(
                    label=label,
                    branches=branches,
                    ambient_point=point,
                    stabilizer_order=_as_int(
                        mp.get("stabilizer_order", 1), f"{mptr}.stabilizer_order"
                    ),
                )
        except ValidationError:
            raise
        except ValueError as exc:
            raise ValidationError(mptr, str(exc)) from None
        if "domain_order" in mp:
            declared = _as_int(mp["domain_order"], f"{mptr}.domain_order")
            if declared != data.domain_order:
                raise ValidationError(
                    f"{mptr}.domain_order",
                    f"declared {declared}, but the local representative is an "
                    f"embedding off 0, forcing |Im rho_z| = {data.domain_order}",
                )
        marked.append(data)
    pairs = []
    for i, pair in enumerate(obj.get("identified_pairs", ())):
        pptr = f"{ptr}.identified_pairs[{i}]"
        if not isinstance(pair, Sequence) or len(pair) != 2:
            raise ValidationError(pptr, "expected a pair of marked point labels")
        pairs.append((pair[0], pair[1]))
    try:
        return CurvePresentation(curve, domain, tuple(marked), tuple(pairs))
    except ValueError as exc:
        raise ValidationError(ptr, str(exc)) from None


def parse_named_presentation(
    obj: Any, space: WeightedProjectivePlane, ptr: str = "presentation"
) -> CurvePresentation:
    """Either a full presentation document or a named builder:
    {"example": "axis"} | {"example": "lambda", "coefficient": "2"}."""
    if isinstance(obj, Mapping) and "example" in obj:
        _require_keys(obj, {"example", "coefficient"}, {"example"}, ptr)
        name = obj["example"]
        if name == "axis":
            if "coefficient" in obj:
                raise ValidationError(f"{ptr}.coefficient", "axis presentation takes none")
            return axis_presentation(space)
        if name == "lambda":
            coeff = _as_rational(obj.get("coefficient", 1), f"{ptr}.coefficient")
            try:
                return lambda_presentation(space, coeff)
            except ValueError as exc:
                raise ValidationError(ptr, str(exc)) from None
        raise ValidationError(f"{ptr}.example", f"unknown example {name!r}")
    return parse_presentation(obj, space, ptr)


def load_document(path: str) -> Any:
    """Load a JSON (.json) or TOML (.toml) document."""
    if path.endswith(".toml"):
        try:
            import tomllib  # py>=3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            try:
                return tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ValidationError(path, str(exc)) from None
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(path, f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
