import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner import (
    BoundaryPoint,
    CorollaryField,
    DomainError,
    InfeasibleError,
    MeasureSchedule,
    RealAtomicMeasure,
    ScheduleSegment,
    ValidationError,
    angular_derivative,
    berkson_porta_p,
    build_three_brfp_map,
    circle_measure,
    field_eval,
    field_from_dict,
    field_to_dict,
    null_quotient,
    pseudo_hyperbolic_distance,
    three_brfp_map_eval,
)
from loewner.grids import disk_grid_256
from conftest import (
    corollary_delta,
    example_three_atoms,
    parabolic_field,
    radial_field,
    two_segment_field,
)

PI = math.pi
TARGETS = (BoundaryPoint(PI / 2), BoundaryPoint(3 * PI / 2), BoundaryPoint(0.0))


def atom_map(mass=1.0):
    measure = RealAtomicMeasure(((0.0, mass),), (-1.0, 1.0), inside=True)
    return build_three_brfp_map(-1.0, 1.0, measure, TARGETS)


class TestFieldEval:
    def test_radial(self):
        assert field_eval(radial_field(), 0.3 + 0j) == pytest.approx(-0.3)

    def test_parabolic(self):
        fld = parabolic_field()
        for z in (0j, 0.4 - 0.2j):
            assert field_eval(fld, z) == pytest.approx((1 - z) ** 2)

    def test_corollary_single_atom_closed_form(self):
        fld = corollary_delta(PI)
        assert field_eval(fld, 0j, 0.0) == pytest.approx(0.5)
        for z in (0.3 + 0.1j, -0.6j, 0.8 + 0j):
            assert field_eval(fld, z, 0.5) == pytest.approx(0.5 * (1 - z * z))

    def test_corollary_vanishes_at_both_ends(self):
        fld = corollary_delta(PI / 2)
        for r in (0.9, 0.99, 0.999):
            assert abs(field_eval(fld, r + 0j, 0.5)) < 3 * (1 - r)
            assert abs(field_eval(fld, -r + 0j, 0.5)) < 3 * (1 - r)

    def test_reciprocal_zero_set(self):
        fld = example_three_atoms()
        radii = [0.9, 0.99, 0.999, 0.9999]
        for sigma, _ in fld.data:
            mags = [abs(field_eval(fld, r * sigma.value)) for r in radii]
            assert all(b < a for a, b in zip(mags, mags[1:]))
            assert mags[-1] < 1e-3

    def test_corollary_zero_at_prescribed_point(self):
        fld = corollary_delta(PI / 2)
        radii = [0.9, 0.99, 0.999, 0.9999]
        mags = [abs(field_eval(fld, -r + 0j, 0.5)) for r in radii]
        assert all(b < a for a, b in zip(mags, mags[1:]))

    def test_schedule_domain_error_propagates(self):
        fld = corollary_delta(PI, t_end=1.0)
        with pytest.raises(DomainError):
            field_eval(fld, 0j, 2.0)

    def test_two_segment_switches(self):
        fld = two_segment_field()
        assert field_eval(fld, 0j, 0.5) == pytest.approx(0.5)
        assert field_eval(fld, 0j, 1.0) == pytest.approx(0.25 * (1 - 1j))


class TestGeneratorAdmissibility:
    @pytest.mark.parametrize(
        "fld",
        [radial_field(), parabolic_field(), example_three_atoms(),
         corollary_delta(PI), corollary_delta(PI / 2), two_segment_field()],
        ids=["radial", "parabolic", "three-atoms", "cor-pi", "cor-i", "two-seg"],
    )
    def test_herglotz_factor_has_nonnegative_real_part(self, fld):
        p = berkson_porta_p(fld, disk_grid_256(), 0.0)
        assert float(np.min(np.asarray(p).real)) >= 0.0


class TestNullQuotient:
    def test_corollary_at_minus_one_is_one(self):
        for fld in (corollary_delta(PI), corollary_delta(PI / 2), two_segment_field()):
            nq = null_quotient(fld, BoundaryPoint(PI), 0.5)
            assert not nq.diverged
            assert nq.value.real == pytest.approx(1.0, abs=1e-8)
            assert abs(nq.value.imag) < 1e-8

    def test_delta_minus_one_at_plus_one(self):
        nq = null_quotient(corollary_delta(PI), BoundaryPoint(0.0), 0.5)
        assert not nq.diverged
        assert nq.value.real == pytest.approx(-1.0, abs=1e-8)

    def test_radial_field_diverges_at_one(self):
        nq = null_quotient(radial_field(), BoundaryPoint(0.0))
        assert nq.diverged

    def test_reciprocal_dilation_rate(self):
        fld = example_three_atoms()
        for sigma, alpha in fld.data:
            nq = null_quotient(fld, sigma)
            assert not nq.diverged
            assert nq.value.real == pytest.approx(1.0 / (2.0 * alpha), rel=1e-7)

    def test_radii_validation(self):
        with pytest.raises(DomainError):
            null_quotient(radial_field(), BoundaryPoint(0.0), radii=[0.9, 0.5])


class TestThreeBrfpBuild:
    def test_hand_solved_system(self):
        m = atom_map(1.0)
        assert m.rep.alpha == pytest.approx(0.0, abs=1e-14)
        assert m.rep.beta == pytest.approx(2.0)
        assert m.tau_dilation == pytest.approx(0.5)
        assert m.sigma1_dilation == pytest.approx(3.0)
        assert m.sigma2_dilation == pytest.approx(3.0)

    def test_empty_measure_is_identity(self):
        m = build_three_brfp_map(
            -1.0, 1.0, RealAtomicMeasure((), (-1.0, 1.0)), TARGETS
        )
        assert m.rep.beta == pytest.approx(1.0)
        assert m.tau_dilation == pytest.approx(1.0)
        for z in (0j, 0.3 - 0.4j, 0.9j):
            assert three_brfp_map_eval(m, z) == pytest.approx(z, abs=1e-13)

    def test_interior_support_beta_formula(self):
        atoms = ((-0.5, 0.3), (0.2, 1.1), (0.7, 0.05))
        measure = RealAtomicMeasure(atoms, (-1.0, 1.0), inside=True)
        m = build_three_brfp_map(-1.0, 1.0, measure, TARGETS)
        expected = 1.0 + sum(
            w * (1 + t * t) / ((1.0 - t) * (t + 1.0)) for t, w in atoms
        )
        assert m.rep.beta == pytest.approx(expected)
        assert m.rep.beta >= 1.0
        assert m.tau_dilation <= 1.0

    def test_outside_support_small_mass_builds(self):
        measure = RealAtomicMeasure(((2.0, 0.3),), (-1.0, 1.0), inside=False)
        m = build_three_brfp_map(-1.0, 1.0, measure, TARGETS)
        assert 0.0 < m.rep.beta <= 1.0
        assert m.tau_dilation >= 1.0

    def test_outside_support_excess_mass_infeasible(self):
        measure = RealAtomicMeasure(((2.0, 1.0),), (-1.0, 1.0), inside=False)
        with pytest.raises(InfeasibleError):
            build_three_brfp_map(-1.0, 1.0, measure, TARGETS)

    def test_singular_window(self):
        with pytest.raises(DomainError):
            build_three_brfp_map(1.0, 1.0, RealAtomicMeasure((), (-1.0, 1.0)), TARGETS)

    def test_window_mismatch(self):
        with pytest.raises(ValidationError):
            build_three_brfp_map(-2.0, 2.0, RealAtomicMeasure((), (-1.0, 1.0)), TARGETS)

    def test_transform_fixes_xis(self):
        m = atom_map(0.7)
        from loewner import nevanlinna_eval

        for xi in (-1.0, 1.0):
            assert nevanlinna_eval(m.rep, complex(xi)) == pytest.approx(xi, abs=1e-12)

    @given(st.floats(min_value=0.01, max_value=20.0))
    @settings(max_examples=40, deadline=None)
    def test_tau_dilation_below_one_for_interior_support(self, mass):
        m = atom_map(mass)
        assert m.tau_dilation == pytest.approx(1.0 / (1.0 + mass), rel=1e-12)
        assert m.tau_dilation < 1.0


class TestThreeBrfpEval:
    def test_radial_limit_at_tau(self):
        m = atom_map(1.0)
        tau = m.tau.value
        gaps = [abs(three_brfp_map_eval(m, r * tau) - tau) for r in (0.9, 0.99, 0.999)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_fixes_all_three_targets_radially(self):
        m = atom_map(2.0)
        for p in (m.sigma1, m.sigma2, m.tau):
            z = 0.9999 * p.value
            assert abs(three_brfp_map_eval(m, z) - p.value) < 1e-3

    def test_maps_into_disk(self):
        m = atom_map(1.0)
        zs = disk_grid_256()
        ws = three_brfp_map_eval(m, zs)
        assert float(np.max(np.abs(ws))) < 1.0

    def test_strict_schwarz_pick(self):
        m = atom_map(1.0)
        before = pseudo_hyperbolic_distance(0.2 + 0j, -0.2 + 0j)
        after = pseudo_hyperbolic_distance(
            three_brfp_map_eval(m, 0.2 + 0j), three_brfp_map_eval(m, -0.2 + 0j)
        )
        assert after < before

    def test_measured_dilations_match_analytic(self):
        m = atom_map(1.0)
        at_tau = angular_derivative(m, m.tau, m.tau)
        at_s1 = angular_derivative(m, m.sigma1, m.sigma1)
        assert at_tau.value == pytest.approx(0.5, rel=1e-4)
        assert at_s1.value == pytest.approx(3.0, rel=1e-4)

    def test_dilation_products_meet_two_point_bound(self):
        m = atom_map(1.0)
        dils = (m.tau_dilation, m.sigma1_dilation, m.sigma2_dilation)
        assert dils[0] * dils[1] == pytest.approx(1.5)
        for i in range(3):
            for j in range(i + 1, 3):
                assert dils[i] * dils[j] >= 1.0


class TestFieldJson:
    @pytest.mark.parametrize(
        "fld",
        [radial_field(), parabolic_field(), example_three_atoms(),
         corollary_delta(PI), two_segment_field()],
        ids=["radial", "parabolic", "three-atoms", "cor-pi", "two-seg"],
    )
    def test_round_trip(self, fld):
        again = field_from_dict(json.loads(json.dumps(field_to_dict(fld))))
        assert again == fld

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            field_from_dict({"kind": "nope"})

    def test_foreign_payload_rejected(self):
        d = field_to_dict(corollary_delta(PI))
        d["data"] = []
        with pytest.raises(ValidationError):
            field_from_dict(d)

    def test_validation_bypass(self):
        bad = {
            "kind": "corollary",
            "schedule": {"segments": [{"t0": 0.0, "t1": 1.0, "measure": {
                "atoms": [{"angle": PI, "weight": 1.5}], "excluded_angle": 0.0}}]},
        }
        with pytest.raises(ValidationError):
            field_from_dict(bad)
        fld = field_from_dict(bad, validate=False)
        assert field_eval(fld, 0j, 0.5) == pytest.approx(0.75)


class TestFieldValidation:
    def test_reciprocal_needs_positive_alpha(self):
        with pytest.raises(ValidationError):
            field_from_dict(
                {"kind": "reciprocal", "tau": {"re": 0.0, "im": 0.0},
                 "data": [{"angle": 0.0, "alpha": -1.0}]}
            )

    def test_tau_must_avoid_prescribed_points(self):
        with pytest.raises(ValidationError):
            field_from_dict(
                {"kind": "reciprocal", "tau": {"angle": 0.0},
                 "data": [{"angle": 0.0, "alpha": 1.0}]}
            )

    def test_corollary_needs_probability_segments(self):
        nu = circle_measure([(PI, 0.5)], excluded_angle=0.0)
        with pytest.raises(ValidationError):
            CorollaryField(MeasureSchedule((ScheduleSegment(0.0, 1.0, nu),)))

    def test_corollary_needs_excluded_origin(self):
        nu = circle_measure([(PI, 1.0)])
        with pytest.raises(ValidationError):
            CorollaryField(MeasureSchedule((ScheduleSegment(0.0, 1.0, nu),)))
