"""The verification harness: single trials, trial loops, and suites."""

import math
import random

import numpy as np
import pytest

from liesuper.integrate import IntegratorConfig, integrate
from liesuper.superpose import eval_bernoulli_rule, eval_hierarchy_rule, eval_linear_rule
from liesuper.verify import (
    SuiteValidationError,
    build_rule_setup,
    check_prolongation_identity,
    default_suite,
    oscillator_wronskian_drift,
    riccati_cross_ratio_drift,
    run_rule_verification,
    run_suite,
    suite_passed,
    validate_suite,
    verify_rule,
)
from liesuper.parsing import parse_timefn

CFG = IntegratorConfig(rtol=1e-10)


class TestVerifyRuleExamples:
    def test_linear_exact_case(self):
        # x1(t) = t from x1(0) = 0, x2(t) = 1, k = 3: both sides are t + 3
        setup = build_rule_setup("linear", {"a": "0", "b": "1"})
        record = verify_rule(setup, [[0.0], [1.0]], [3.0], (0.0, 1.0), CFG)
        assert record.ok
        assert record.max_error <= 1e-12

    def test_riccati_from_oscillator_solutions(self):
        # companion solutions (cos, -sin) and (sin, cos); with k = 1 the
        # formula is (cos t - sin t)/(cos t + sin t), a Riccati solution
        setup = build_rule_setup("hierarchy", {"order": 2, "b": ["1", "0"]})
        record = verify_rule(setup, [[1.0, 0.0], [0.0, 1.0]], [1.0], (0.0, 0.7), CFG)
        assert record.ok
        assert record.max_error <= 1e-6
        assert record.extras["round_trip_error"] <= 1e-12

    def test_riccati_closed_form(self):
        from liesuper.hierarchy import generate_member, member_first_order_system

        rhs = member_first_order_system(
            generate_member(2), [parse_timefn("1"), parse_timefn("0")]
        )
        traj = integrate(rhs, [1.0], (0.0, 0.7), CFG)
        expected = np.tan(np.pi / 4 - traj.times)
        assert np.max(np.abs(traj.states[:, 0] - expected)) <= 1e-9

    def test_bernoulli_closed_form_case(self):
        # x1 = 1/(1-t), x2 = 1, k = 1: the formula gives 1/(2-t)
        setup = build_rule_setup("bernoulli", {"a": "0", "b": "1", "n": 2})
        record = verify_rule(setup, [[1.0], [1.0]], [1.0], (0.0, 0.9), CFG)
        assert record.ok
        assert record.max_error <= 1e-7

    def test_singular_component_is_reported(self):
        # x' = x^2 from x(0) = 2 blows up at t = 0.5, inside the span
        setup = build_rule_setup("bernoulli", {"a": "0", "b": "1", "n": 2})
        record = verify_rule(setup, [[2.0], [1.0]], [0.0], (0.0, 0.9), CFG)
        assert record.status.startswith("singular")

    def test_constant_count_checked(self):
        setup = build_rule_setup("linear", {"a": "0", "b": "1"})
        with pytest.raises(ValueError):
            verify_rule(setup, [[0.0], [1.0]], [3.0, 4.0], (0.0, 1.0), CFG)

    def test_component_dims_checked(self):
        setup = build_rule_setup("hierarchy", {"order": 2, "b": ["1", "0"]})
        with pytest.raises(ValueError):
            verify_rule(setup, [[1.0], [0.0]], [1.0], (0.0, 1.0), CFG)


class TestProlongationIdentity:
    def test_holds_for_many_seeds(self):
        for seed in (0, 1, 2):
            assert check_prolongation_identity(seed, 50)

    def test_equal_fields_give_zero_bracket(self):
        from liesuper.vectorfield import PolyVectorField, diagonal_prolong, lie_bracket
        from liesuper.verify import random_field

        x = random_field(random.Random(4), 2)
        assert lie_bracket(x, x) == PolyVectorField.zero(2)
        assert diagonal_prolong(lie_bracket(x, x), 2) == PolyVectorField.zero(4)

    def test_trials_positive(self):
        with pytest.raises(ValueError):
            check_prolongation_identity(0, 0)


class TestRunRuleVerification:
    def test_hierarchy_reports_dimensions(self):
        report = run_rule_verification(
            "hierarchy",
            {"order": 2, "b": ["1", "0"]},
            trials=5,
            seed=21,
            tspan=(0.0, 0.7),
            cfg=CFG,
        )
        assert report.max_formula_error <= 1e-6
        assert report.closure_dimension == 3
        assert report.component_closure_dimension == 4
        assert report.dimension_bound == 4
        assert report.lie_condition

    def test_constant_dependence(self):
        # distinct constants give visibly distinct formula trajectories
        for rule_id, params, ics in (
            ("linear", {"a": "0", "b": "1"}, [[0.5], [1.0]]),
            ("bernoulli", {"a": "0", "b": "1", "n": 2}, [[0.5], [1.0]]),
            ("hierarchy", {"order": 2, "b": ["1", "0"]}, [[1.0, 0.0], [0.0, 1.0]]),
        ):
            setup = build_rule_setup(rule_id, params)
            outputs = []
            for k in (0.25, 0.75):
                record = verify_rule(setup, ics, [k], (0.0, 0.5), CFG)
                assert record.ok
                outputs.append(setup.phi([np.array(ic) for ic in ics], [k]))
            assert max(abs(a - b) for a, b in zip(*outputs)) > 1e-6


class TestDriftHelpers:
    def test_cross_ratio_drift_small(self):
        drift = riccati_cross_ratio_drift(
            parse_timefn("1"), parse_timefn("0"), [0.0, 1.0, -0.5, 2.0], (0.0, 1.0), CFG
        )
        assert drift <= 1e-7

    def test_wronskian_drift_small(self):
        drift = oscillator_wronskian_drift(
            parse_timefn("1 + 0.1*t"), [[1.0, 0.0], [0.0, 1.0]], (0.0, 1.0), CFG
        )
        assert drift <= 1e-8


class TestSuite:
    def test_empty_suite(self):
        assert run_suite({"items": []}) == []

    def test_default_suite_passes(self):
        reports = run_suite(default_suite())
        assert suite_passed(reports)
        assert len(reports) == len(default_suite()["items"])

    def test_report_items_echo_input_keys(self):
        doc = default_suite()
        reports = run_suite(doc)
        for item, rep in zip(doc["items"], reports):
            for key, value in item.items():
                assert rep[key] == value
            assert "measured" in rep and "pass" in rep

    def test_validation_errors_name_paths(self):
        doc = {
            "items": [
                {"kind": "closure", "generators": {"dim": 2, "fields": [["x0"]]}},
                {"kind": "rule", "rule": "nope"},
            ]
        }
        errors = validate_suite(doc)
        assert any("items[0].generators.fields[0]" in e for e in errors)
        assert any("items[1].rule" in e for e in errors)
        with pytest.raises(SuiteValidationError):
            run_suite(doc)

    def test_zero_tolerance_fails(self):
        doc = {
            "items": [
                {
                    "kind": "drift",
                    "invariant": "oscillator-wronskian",
                    "omega": "1",
                    "initial": [[1.0, 0.0], [0.0, 1.0]],
                    "tspan": [0.0, 1.0],
                    "tolerance": 0.0,
                }
            ]
        }
        reports = run_suite(doc)
        assert not suite_passed(reports)

    def test_cap_exceeded_expectation(self):
        doc = {
            "items": [
                {
                    "kind": "closure",
                    "generators": {"dim": 1, "fields": [["1"], ["x0^3"]]},
                    "cap": 10,
                    "expect": "cap-exceeded",
                }
            ]
        }
        reports = run_suite(doc)
        assert suite_passed(reports)
        assert reports[0]["measured"]["cap_exceeded_at"] == 11

    def test_closure_presets(self):
        doc = {
            "items": [
                {"kind": "closure", "generators": {"preset": "sl2"}, "expect_dim": 3},
                {"kind": "closure", "generators": {"preset": "oscillator"}, "expect_dim": 3},
                {"kind": "closure", "generators": {"preset": "member", "order": 3}, "expect_dim": 8},
                {"kind": "closure", "generators": {"preset": "gl", "order": 3}, "expect_dim": 9},
                {
                    "kind": "closure",
                    "generators": {"preset": "linear-generators", "order": 3},
                    "expect_dim": 9,
                    "expect_center": 1,
                },
            ]
        }
        reports = run_suite(doc)
        assert suite_passed(reports)

    def test_pinney_method_validation(self):
        doc = {
            "items": [
                {
                    "kind": "rule",
                    "rule": "pinney",
                    "omega": "1",
                    "c": 1.0,
                    "method": "rkf45",
                    "trials": 2,
                    "tspan": [0.0, 1.0],
                    "tolerance": 1e-6,
                }
            ]
        }
        errors = validate_suite(doc)
        assert any("method" in e for e in errors)
