"""The mechanized deduction pipeline for the canonical degree-d1 curve."""

from fractions import Fraction

import pytest

from orbicalc.deduce import (
    DecompositionHypothesis,
    analyze_canonical_pair,
    coverage_budget,
    degree_integrality_scan,
    enumerate_decompositions,
    intersection_bound_filter,
    required_points,
    triple_point_test,
    uniqueness_test,
)
from orbicalc.orbifold import WeightedProjectivePlane

X235 = WeightedProjectivePlane((2, 3, 5))


def test_required_points():
    assert required_points(X235, 2) == ("p2", "p3")
    assert required_points(X235, 3) == ("p1", "p3")
    assert required_points(X235, 30) == ()


def test_degree_integrality_scan():
    report = degree_integrality_scan(X235, 20, 200)
    assert report.excluded == report.candidates
    assert report.counterexamples == ()
    # spot check: r = 15/2 against s = 10 leaves 225/4 - 75, not an integer
    assert (15 * 15 - 10 * 15 * 2) % 4 != 0


def test_integer_degrees_pass_trivially():
    # integers are simply not in the scanned candidate set
    s = X235.weight_sum
    r = 3
    assert (Fraction(r) ** 2 - s * r).denominator == 1


def test_enumerate_decompositions():
    assert enumerate_decompositions(2) == (
        ((1, 1), (1, 1)),
        ((1, 2),),
        ((2, 1),),
    )
    for decomp in enumerate_decompositions(6):
        assert sum(n * r for n, r in decomp) == 6


def test_decomposition_validation():
    with pytest.raises(ValueError):
        DecompositionHypothesis(4, ((1, 3),))
    with pytest.raises(ValueError):
        DecompositionHypothesis(2, ((1, 0), (1, 2)))


def test_intersection_bound_filter_pins_degrees():
    hyp1 = DecompositionHypothesis(2, ((1, 2),))
    hyp2 = DecompositionHypothesis(3, ((1, 3),))
    verdict = intersection_bound_filter(X235, hyp1, hyp2)
    assert verdict.applicable
    assert verdict.pinned == (2, 3)
    assert [(p.degrees, p.satisfied) for p in verdict.pairs] == [((2, 3), True)]


def test_intersection_bound_filter_rejects_small_degrees():
    hyp1 = DecompositionHypothesis(2, ((1, 1), (1, 1)))
    hyp2 = DecompositionHypothesis(3, ((1, 3),))
    verdict = intersection_bound_filter(X235, hyp1, hyp2)
    assert verdict.pinned is None
    assert all(not p.satisfied for p in verdict.pairs)
    assert all(p.product == 3 and p.bound == 6 for p in verdict.pairs)


def test_intersection_bound_filter_same_bundle_flagged():
    hyp = DecompositionHypothesis(2, ((1, 2),))
    verdict = intersection_bound_filter(X235, hyp, DecompositionHypothesis(2, ((1, 2),)))
    assert not verdict.applicable


def test_triple_point_instances():
    cases = {
        (2, 3, 5): Fraction(11, 15),
        (2, 3, 7): Fraction(5, 7),
        (3, 4, 5): Fraction(3, 5),
    }
    for weights, expected in cases.items():
        report = triple_point_test(WeightedProjectivePlane(weights))
        assert report.quantity == expected
        assert report.infeasible
        assert report.strict_upper > report.quantity


def test_triple_point_display_identity():
    # I computed from the virtual genus equals the degree-1 display
    for weights in [(2, 3, 5), (2, 5, 7), (3, 4, 7), (4, 5, 7)]:
        d1, d2, d3 = weights
        report = triple_point_test(WeightedProjectivePlane(weights))
        assert report.quantity == Fraction(1, d1) + Fraction(
            (d2 + d3 - 1) * (d1 - 1), d1 * d2 * d3
        )


def test_uniqueness_instances():
    for weights in [(2, 3, 5), (2, 3, 7), (3, 4, 5)]:
        report = uniqueness_test(WeightedProjectivePlane(weights))
        assert report.unique
    r = uniqueness_test(X235)
    assert (r.self_pairing, r.meeting_floor) == (Fraction(2, 15), Fraction(1, 5))


def test_coverage_budget_excludes_p1():
    budget = coverage_budget(X235)
    assert budget["slack"] == 0
    assert budget["p1_minimal_extra"] > 0
    assert budget["p1_excluded"]


def test_analyze_standard_triples():
    for weights in [(2, 3, 5), (2, 3, 7), (3, 4, 5)]:
        report = analyze_canonical_pair(WeightedProjectivePlane(weights))
        assert report.survivor.degree == weights[0]
        assert report.survivor.count == 1
        assert report.survivor.coverage == ("p2", "p3")
        assert report.survivor.excluded == ("p1",)
        rules = [t.rule for t in report.trace]
        for required in ("REQ-3.2.1", "TRIPLE-3.5", "INT-2.4-BOUND", "ADJ-2.3-BUDGET", "UNIQ-3.5"):
            assert required in rules


def test_analyze_deterministic():
    a = analyze_canonical_pair(X235)
    b = analyze_canonical_pair(X235)
    assert a == b


def test_analyze_large_d1_skips_enumeration():
    space = WeightedProjectivePlane((13, 14, 15))
    report = analyze_canonical_pair(space)
    assert report.survivor.degree == 13
    enum_entries = [t for t in report.trace if t.rule == "ENUM-DECOMP"]
    assert len(enum_entries) == 1
    assert "not listed" in enum_entries[0].statement
