"""orbicalc command line: exact orbifold invariants as JSON reports.

Every report is deterministic (no timestamps, fixed key order) and every
numeric field is an exact rational string or an integer; exit status is 0
on success, 2 on validation errors and 3 on computation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Mapping, Optional

from orbicalc import deduce, moduli
from orbicalc.curves import (
    CurveClass,
    InexactSelfIntersection,
    InvalidPresentation,
    adjunction_check,
    intersection_check,
    pairing as curve_pairing,
    virtual_genus,
)
from orbicalc.exactmath import (
    NotInvertible,
    NotRational,
    ZeroInverse,
    format_rational,
)
from orbicalc.germs import (
    CommonBranch,
    InvalidGerm,
    NotCoprime,
    leading_order_bounds,
    local_intersection,
    self_intersection,
    self_intersection_monomial,
)
from orbicalc.orbifold import GeneralOrbifoldSurface, InvalidOrbifold, WeightedProjectivePlane
from orbicalc import schemas
from orbicalc.schemas import ValidationError

_VALIDATION_ERRORS = (
    ValidationError,
    InvalidOrbifold,
    InvalidGerm,
    InvalidPresentation,
)
_COMPUTATION_ERRORS = (
    CommonBranch,
    NotCoprime,
    NotRational,
    NotInvertible,
    ZeroInverse,
    InexactSelfIntersection,
    moduli.NonIntegralIndex,
    moduli.UnsupportedGroup,
    deduce.IncompleteDerivation,
)

_CITATIONS = {
    "pairing": ["PD-2.1"],
    "virtual-genus": ["VG-2.2"],
    "adjunction-check": ["ADJ-2.3", "LEM-2.6.1", "SUB-2.5.1"],
    "intersection-check": ["INT-2.4", "LEM-2.6.2"],
    "local-int": ["LOC-2.2.1"],
    "self-int": ["LOC-2.2.2", "LEM-2.6.1"],
    "index-dim": ["IND-1.10"],
    "sw-dim": ["SW-3.3", "DELTA-3.4"],
    "delta": ["DELTA-3.4"],
    "analyze": ["REQ-3.2.1", "INT-DEG-3.5.2", "INT-2.4", "ADJ-2.3", "UNIQ-3.5"],
    "example111": ["FIX-1.11"],
}


def _rat(value) -> str:
    return format_rational(Fraction(value))


def _space_json(space) -> dict:
    if isinstance(space, WeightedProjectivePlane):
        return {"wps": list(space.weights)}
    return {
        "points": [
            {"label": p.label, "order": p.group_order, "weights": list(p.tangent_weights)}
            for p in space.points
        ],
        "pairing_scale": _rat(space.pairing_scale) if space.pairing_scale is not None else None,
    }


# ---------------------------------------------------------------------------
# Handlers: payload -> result dict
# ---------------------------------------------------------------------------


def _need_wps(space, command: str) -> WeightedProjectivePlane:
    if not isinstance(space, WeightedProjectivePlane):
        raise ValidationError("space", f"{command} requires a weighted projective plane")
    return space


def _payload_keys(payload: Mapping, allowed: set, required: set):
    schemas._require_keys(payload, allowed, required, "payload")


def _handle_pairing(space, payload) -> dict:
    space = _need_wps(space, "pairing")
    _payload_keys(payload, {"class_degree", "curve_degree", "curve_multiplicity"},
                  {"class_degree", "curve_degree"})
    curve = CurveClass(
        space,
        schemas._as_rational(payload["curve_degree"], "payload.curve_degree"),
        schemas._as_int(payload.get("curve_multiplicity", 1), "payload.curve_multiplicity"),
    )
    a = schemas._as_rational(payload["class_degree"], "payload.class_degree")
    return {"pairing": _rat(curve_pairing(a, curve))}


def _handle_virtual_genus(space, payload) -> dict:
    space = _need_wps(space, "virtual-genus")
    _payload_keys(payload, {"degree", "multiplicity"}, {"degree"})
    curve = CurveClass(
        space,
        schemas._as_rational(payload["degree"], "payload.degree"),
        schemas._as_int(payload.get("multiplicity", 1), "payload.multiplicity"),
    )
    return {"virtual_genus": _rat(virtual_genus(curve))}


def _adjunction_json(report) -> dict:
    return {
        "lhs": _rat(report.lhs),
        "g_sigma": _rat(report.g_sigma),
        "contributions": [
            {
                "kind": e.kind,
                "label": e.label,
                "ambient": e.ambient,
                "value": _rat(e.value),
                "exact": e.exact,
            }
            for e in report.contributions
        ],
        "rhs": _rat(report.rhs),
        "equal": report.equal,
        "bound_only": report.bound_only,
        "suborbifold": report.suborbifold,
        "verdict": report.verdict,
    }


def _handle_adjunction(space, payload) -> dict:
    space = _need_wps(space, "adjunction-check")
    _payload_keys(payload, {"presentation"}, {"presentation"})
    presentation = schemas.parse_named_presentation(payload["presentation"], space)
    return _adjunction_json(adjunction_check(presentation))


def _handle_intersection(space, payload) -> dict:
    space = _need_wps(space, "intersection-check")
    _payload_keys(payload, {"first", "second", "meetings"}, {"first", "second", "meetings"})
    first = schemas.parse_named_presentation(payload["first"], space, "payload.first")
    second = schemas.parse_named_presentation(payload["second"], space, "payload.second")
    meetings = []
    for i, pair in enumerate(payload["meetings"]):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValidationError(f"payload.meetings[{i}]", "expected [label, label]")
        meetings.append((pair[0], pair[1]))
    report = intersection_check(first, second, meetings)
    return {
        "expected": _rat(report.expected),
        "points": [
            {"pair": list(e.pair), "ambient": e.ambient, "k": _rat(e.value)}
            for e in report.entries
        ],
        "total": _rat(report.total),
        "equal": report.equal,
    }


def _handle_local_int(space, payload) -> dict:
    _payload_keys(payload, {"germ1", "germ2"}, {"germ1", "germ2"})
    g1 = schemas.parse_germ(payload["germ1"], "payload.germ1")
    g2 = schemas.parse_germ(payload["germ2"], "payload.germ2")
    value = local_intersection(g1, g2)
    bound = leading_order_bounds(g1.leading_orders, g2.leading_orders)
    return {
        "intersection": value,
        "lower_bound": _rat(bound) if bound != float("inf") else "inf",
    }


def _handle_self_int(space, payload) -> dict:
    _payload_keys(payload, {"l1", "l2", "germ"}, set())
    if "germ" in payload:
        if "l1" in payload or "l2" in payload:
            raise ValidationError("payload", "give a germ or a pair of orders, not both")
        germ = schemas.parse_germ(payload["germ"], "payload.germ")
        value, exact = self_intersection(germ)
        method = "exact" if exact else "lower-bound"
        return {"value": _rat(value), "exact": exact, "method": method}
    if "l1" not in payload or "l2" not in payload:
        raise ValidationError("payload", "need l1 and l2 (or a germ)")
    l1 = schemas._as_int(payload["l1"], "payload.l1")
    l2 = schemas._as_int(payload["l2"], "payload.l2")
    value = self_intersection_monomial(l1, l2)
    return {"value": _rat(value), "exact": True, "method": "gap-count"}


def _handle_index_dim(space, payload) -> dict:
    _payload_keys(payload, {"chern_pairing", "points"}, {"chern_pairing"})
    points = []
    for i, entry in enumerate(payload.get("points", ())):
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ValidationError(f"payload.points[{i}]", "expected [m, m1, m2]")
        points.append(tuple(schemas._as_int(v, f"payload.points[{i}][{j}]")
                            for j, v in enumerate(entry)))
    try:
        inp = moduli.IndexInput(
            schemas._as_rational(payload["chern_pairing"], "payload.chern_pairing"),
            tuple(points),
        )
    except ValueError as exc:
        raise ValidationError("payload.points", str(exc)) from None
    dims = moduli.index_dimension(inp)
    return {
        "d_tilde": dims.d_tilde,
        "dim_parametrized": dims.dim_parametrized,
        "dim_moduli": dims.dim_moduli,
    }


def _sw_json(result) -> dict:
    return {
        "d": _rat(result.dimension),
        "I": [_rat(p.contribution.value) for p in result.points],
        "c1_squared": _rat(result.c1_squared),
        "c1_dot_canonical": _rat(result.c1_dot_canonical),
        "points": [
            {
                "point": p.point.label,
                "order": p.point.group_order,
                "tangent": list(p.point.tangent_weights),
                "fiber": p.point.fiber_weight,
                "I": _rat(p.contribution.value),
                "delta": p.contribution.delta,
                "closed_form": _rat(p.contribution.closed_form)
                if p.contribution.closed_form is not None
                else None,
            }
            for p in result.points
        ],
        "warnings": list(result.warnings),
    }


def _handle_sw_dim(space, payload) -> dict:
    if isinstance(space, WeightedProjectivePlane):
        _payload_keys(payload, {"degree"}, {"degree"})
        inp = moduli.sw_input_for_plane(
            space, schemas._as_int(payload["degree"], "payload.degree")
        )
    elif isinstance(space, GeneralOrbifoldSurface):
        _payload_keys(
            payload,
            {"fiber_weights", "c1_squared", "c1_dot_canonical"},
            {"fiber_weights", "c1_squared", "c1_dot_canonical"},
        )
        weights = [
            schemas._as_int(w, f"payload.fiber_weights[{i}]")
            for i, w in enumerate(payload["fiber_weights"])
        ]
        try:
            inp = moduli.sw_input_for_general(
                space,
                weights,
                schemas._as_rational(payload["c1_squared"], "payload.c1_squared"),
                schemas._as_rational(payload["c1_dot_canonical"], "payload.c1_dot_canonical"),
            )
        except ValueError as exc:
            raise ValidationError("payload", str(exc)) from None
    else:
        raise ValidationError("space", "sw-dim needs an orbifold description")
    return _sw_json(moduli.sw_dimension(inp))


def _handle_delta(space, payload) -> dict:
    _payload_keys(payload, {"modulus", "weight", "fiber"}, {"modulus", "weight", "fiber"})
    m = schemas._as_int(payload["modulus"], "payload.modulus")
    if m < 1:
        raise ValidationError("payload.modulus", "must be positive")
    return {
        "delta": moduli.delta_solve(
            m,
            schemas._as_int(payload["weight"], "payload.weight"),
            schemas._as_int(payload["fiber"], "payload.fiber"),
        )
    }


def _handle_example111(space, payload) -> dict:
    _payload_keys(payload, {"n"}, {"n"})
    n = schemas._as_int(payload["n"], "payload.n")
    if n < 2:
        raise ValidationError("payload.n", "must be at least 2")
    return {"n": n, "pairs": [list(p) for p in moduli.example111_pairs(n)]}


def _handle_analyze(space, payload) -> dict:
    space = _need_wps(space, "analyze")
    _payload_keys(payload, {"enumerate_limit", "scan_q_max", "scan_p_max"}, set())
    report = deduce.analyze_canonical_pair(
        space,
        enumerate_limit=schemas._as_int(payload.get("enumerate_limit", 12), "payload.enumerate_limit"),
        scan_q_max=schemas._as_int(payload.get("scan_q_max", 12), "payload.scan_q_max"),
        scan_p_max=schemas._as_int(payload.get("scan_p_max", 60), "payload.scan_p_max"),
    )
    return {
        "trace": [
            {"rule": t.rule, "statement": t.statement, "numbers": dict(t.numbers)}
            for t in report.trace
        ],
        "survivor": {
            "degree": report.survivor.degree,
            "count": report.survivor.count,
            "coverage": list(report.survivor.coverage),
            "excluded": list(report.survivor.excluded),
        },
    }


def _notes(command: str, result: Mapping[str, Any]) -> list[str]:
    """Human-readable derivation lines for --trace output."""
    if command == "sw-dim":
        lines = [
            f"I at {p['point']} (order {p['order']}, fiber {p['fiber']}) = {p['I']}"
            + (f", delta = {p['delta']}" if p["delta"] is not None else "")
            for p in result["points"]
        ]
        return lines + [f"d(E) = {result['d']}"]
    if command == "adjunction-check":
        lines = [
            f"{e['kind']} {e['label']} over {e['ambient']}: "
            f"{e['value']}{'' if e['exact'] else ' (lower bound)'}"
            for e in result["contributions"]
        ]
        return lines + [
            f"virtual genus {result['lhs']} vs {result['g_sigma']} + contributions "
            f"= {result['rhs']}: {result['verdict']}"
        ]
    if command == "intersection-check":
        lines = [
            f"k at ({e['pair'][0]},{e['pair'][1]}) over {e['ambient']} = {e['k']}"
            for e in result["points"]
        ]
        return lines + [f"total {result['total']} vs pairing {result['expected']}"]
    if command == "local-int":
        return [
            f"intersection {result['intersection']}, "
            f"leading-order floor {result['lower_bound']}"
        ]
    if command == "analyze":
        return [f"{t['rule']}: {t['statement']}" for t in result["trace"]]
    return []


_HANDLERS = {
    "pairing": _handle_pairing,
    "virtual-genus": _handle_virtual_genus,
    "adjunction-check": _handle_adjunction,
    "intersection-check": _handle_intersection,
    "local-int": _handle_local_int,
    "self-int": _handle_self_int,
    "index-dim": _handle_index_dim,
    "sw-dim": _handle_sw_dim,
    "delta": _handle_delta,
    "example111": _handle_example111,
    "analyze": _handle_analyze,
}

_SPACELESS = {"local-int", "self-int", "index-dim", "delta", "example111"}


def run_request(request: Mapping[str, Any], trace: bool = False) -> tuple[dict, int]:
    """Validate and dispatch one request; returns (report, exit_status)."""
    try:
        schemas._require_keys(request, {"command", "space", "payload"}, {"command"}, "request")
        command = request["command"]
        if command not in _HANDLERS:
            raise ValidationError("request.command", f"unknown command {command!r}")
        space = None
        if "space" in request and request["space"] is not None:
            space = schemas.parse_space(request["space"])
        elif command not in _SPACELESS:
            raise ValidationError("request.space", f"{command} requires a space")
        payload = request.get("payload") or {}
        if not isinstance(payload, Mapping):
            raise ValidationError("request.payload", "expected an object")
        result = _HANDLERS[command](space, payload)
    except _COMPUTATION_ERRORS as exc:
        # checked before ValueError: several computation errors subclass it
        return (
            {
                "command": request.get("command"),
                "error": {"kind": "computation", "type": type(exc).__name__, "message": str(exc)},
            },
            3,
        )
    except (_VALIDATION_ERRORS + (ValueError,)) as exc:
        report = {
            "command": request.get("command"),
            "error": {"kind": "validation", "type": type(exc).__name__, "message": str(exc)},
        }
        if isinstance(exc, ValidationError):
            report["error"]["pointer"] = exc.pointer
        return report, 2
    report = {"command": command}
    if space is not None:
        report["space"] = _space_json(space)
    report["result"] = result
    report["citations"] = _CITATIONS[command]
    if trace:
        report["notes"] = _notes(command, result)
    return report, 0


def run_batch(document: Any, trace: bool = False) -> tuple[list, int]:
    """Run a list of requests; aggregate exit status is the max of the parts."""
    if isinstance(document, Mapping):
        schemas._require_keys(document, {"requests"}, {"requests"}, "batch")
        entries = document["requests"]
    else:
        entries = document
    if not isinstance(entries, list):
        raise ValidationError("batch", "expected a list of requests")
    reports = []
    status = 0
    for i, entry in enumerate(entries):
        if not isinstance(entry, Mapping):
            report, code = (
                {"error": {"kind": "validation", "type": "ValidationError",
                           "message": f"batch[{i}]: expected a request object"}},
                2,
            )
        else:
            report, code = run_request(entry, trace=trace)
        reports.append({"index": i, "status": code, "report": report})
        status = max(status, code)
    return reports, status


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _germ_arg(text: str, pointer: str) -> Any:
    if text.startswith("@"):
        return schemas.load_document(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(pointer, f"bad germ JSON: {exc.msg}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbicalc",
        description="Exact invariants of 4-orbifolds with isolated cyclic singularities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, wps: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="JSON output (the default)")
        p.add_argument("--trace", action="store_true", help="include rule citations")
        if wps:
            p.add_argument("--wps", nargs=3, type=int, metavar=("D1", "D2", "D3"),
                           help="weighted projective plane P(d1,d2,d3)")
        return p

    p = add("pairing", "pairing of a class degree with a curve class", wps=True)
    p.add_argument("--degree", required=True, help="degree of the pairing class")
    p.add_argument("--curve-degree", required=True, help="degree of the curve")
    p.add_argument("--curve-multiplicity", type=int, default=1)

    p = add("virtual-genus", "virtual genus of a curve class", wps=True)
    p.add_argument("--degree", required=True)
    p.add_argument("--multiplicity", type=int, default=1)

    p = add("adjunction-check", "evaluate both sides of the adjunction identity", wps=True)
    p.add_argument("--file", help="presentation document (JSON/TOML)")
    p.add_argument("--example", choices=["axis", "lambda"], help="built-in presentation")
    p.add_argument("--coefficient", default=None, help="pencil coefficient for --example lambda")

    p = add("intersection-check", "verify the intersection ledger of two curves", wps=True)
    p.add_argument("--file", help="document with first/second presentations and meetings")
    p.add_argument("--example", choices=["lambda-pair"], help="built-in curve pair")
    p.add_argument("--coefficients", nargs=2, default=None, metavar=("C1", "C2"),
                   help="pencil coefficients for --example lambda-pair")

    p = add("local-int", "local intersection number of two branch germs")
    p.add_argument("--germ1", required=True, help='germ JSON, e.g. \'{"x":[[1,"1"]],"y":[]}\' or @file')
    p.add_argument("--germ2", required=True)

    p = add("self-int", "local self-intersection number of a branch")
    p.add_argument("--l1", type=int, help="first monomial exponent")
    p.add_argument("--l2", type=int, help="second monomial exponent")
    p.add_argument("--germ", help="germ JSON or @file")

    p = add("index-dim", "moduli dimensions from the index formula")
    p.add_argument("--chern", required=True, help="c1(TX).f_*[Sigma] as a rational")
    p.add_argument("--point", action="append", default=[], metavar="M,M1,M2",
                   help="orbifold point data, repeatable (at most 3)")

    p = add("sw-dim", "Seiberg-Witten moduli dimension", wps=True)
    p.add_argument("--degree", type=int, help="bundle degree (weighted projective plane)")
    p.add_argument("--file", help="general orbifold input document")

    p = add("delta", "solve c - b*delta = 0 (mod m) for delta")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--fiber", type=int, required=True)

    p = add("analyze", "derive the canonical degree-d1 curve", wps=True)
    p.add_argument("--enumerate-limit", type=int, default=12)
    p.add_argument("--scan-q-max", type=int, default=12)
    p.add_argument("--scan-p-max", type=int, default=60)

    p = add("example111", "allowed fixed-point weight pairs for an invariant (-2)-sphere")
    p.add_argument("--n", type=int, required=True, help="cyclic group order")

    p = add("batch", "run a file of requests")
    p.add_argument("file", help="JSON/TOML document with a list of requests")

    return parser


def _request_from_args(args: argparse.Namespace) -> dict:
    request: dict[str, Any] = {"command": args.command}
    if getattr(args, "wps", None):
        request["space"] = {"wps": list(args.wps)}

    cmd = args.command
    if cmd == "pairing":
        request["payload"] = {
            "class_degree": args.degree,
            "curve_degree": args.curve_degree,
            "curve_multiplicity": args.curve_multiplicity,
        }
    elif cmd == "virtual-genus":
        request["payload"] = {"degree": args.degree, "multiplicity": args.multiplicity}
    elif cmd == "adjunction-check":
        if (args.file is None) == (args.example is None):
            raise ValidationError("payload", "give exactly one of --file or --example")
        if args.file:
            request["payload"] = {"presentation": schemas.load_document(args.file)}
        else:
            doc: dict[str, Any] = {"example": args.example}
            if args.coefficient is not None:
                doc["coefficient"] = args.coefficient
            request["payload"] = {"presentation": doc}
    elif cmd == "intersection-check":
        if (args.file is None) == (args.example is None):
            raise ValidationError("payload", "give exactly one of --file or --example")
        if args.file:
            request["payload"] = schemas.load_document(args.file)
        else:
            c1, c2 = args.coefficients or ("1", "2")
            request["payload"] = {
                "first": {"example": "lambda", "coefficient": c1},
                "second": {"example": "lambda", "coefficient": c2},
                "meetings": [["z1", "z1"]],
            }
    elif cmd == "local-int":
        request["payload"] = {
            "germ1": _germ_arg(args.germ1, "payload.germ1"),
            "germ2": _germ_arg(args.germ2, "payload.germ2"),
        }
    elif cmd == "self-int":
        payload = {}
        if args.germ is not None:
            payload["germ"] = _germ_arg(args.germ, "payload.germ")
        if args.l1 is not None:
            payload["l1"] = args.l1
        if args.l2 is not None:
            payload["l2"] = args.l2
        request["payload"] = payload
    elif cmd == "index-dim":
        points = []
        for i, text in enumerate(args.point):
            parts = text.split(",")
            if len(parts) != 3:
                raise ValidationError(f"payload.points[{i}]", "expected M,M1,M2")
            try:
                points.append([int(v) for v in parts])
            except ValueError:
                raise ValidationError(f"payload.points[{i}]", "expected integers") from None
        request["payload"] = {"chern_pairing": args.chern, "points": points}
    elif cmd == "sw-dim":
        if args.file:
            doc = schemas.load_document(args.file)
            schemas._require_keys(
                doc, {"space", "degree", "fiber_weights", "c1_squared", "c1_dot_canonical"},
                {"space"}, "sw-dim input",
            )
            request["space"] = doc["space"]
            request["payload"] = {k: v for k, v in doc.items() if k != "space"}
        else:
            if args.degree is None:
                raise ValidationError("payload.degree", "need --degree (or --file)")
            request["payload"] = {"degree": args.degree}
    elif cmd == "delta":
        request["payload"] = {
            "modulus": args.modulus, "weight": args.weight, "fiber": args.fiber,
        }
    elif cmd == "analyze":
        request["payload"] = {
            "enumerate_limit": args.enumerate_limit,
            "scan_q_max": args.scan_q_max,
            "scan_p_max": args.scan_p_max,
        }
    elif cmd == "example111":
        request["payload"] = {"n": args.n}
    return request


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "batch":
        try:
            document = schemas.load_document(args.file)
            reports, status = run_batch(document, trace=args.trace)
        except OSError as exc:
            print(json.dumps({"error": {"kind": "validation", "message": str(exc)}}, indent=2))
            return 2
        except ValidationError as exc:
            print(json.dumps(
                {"error": {"kind": "validation", "message": str(exc), "pointer": exc.pointer}},
                indent=2,
            ))
            return 2
        print(json.dumps(reports, indent=2))
        return status

    try:
        request = _request_from_args(args)
    except ValidationError as exc:
        print(json.dumps(
            {"command": args.command,
             "error": {"kind": "validation", "type": "ValidationError",
                       "message": str(exc), "pointer": exc.pointer}},
            indent=2,
        ))
        return 2
    except OSError as exc:
        print(json.dumps({"command": args.command,
                          "error": {"kind": "validation", "message": str(exc)}}, indent=2))
        return 2

    report, status = run_request(request, trace=args.trace)
    print(json.dumps(report, indent=2))
    return status


if __name__ == "__main__":
    sys.exit(main())
