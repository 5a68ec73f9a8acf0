"""Requirement engine: dispersion bounds, bandwidths, and footnotes."""

from __future__ import annotations

import math

import pytest

from timelens import (
    DesignConfiguration,
    DesignError,
    DesignRequest,
    pump_bandwidth,
    requirements,
    solve_field_lens,
)

LN2 = math.log(2.0)


def _field_lens_report(t_i=5.0, dnu=1.0, m=20.0):
    return requirements(
        DesignRequest(t_i, dnu, m, DesignConfiguration.FIELD_LENS)
    )


class TestFieldLensBounds:
    def test_magnifier_example_values(self):
        report = _field_lens_report()
        assert report.entry("D1").dispersion_bound_ps2 == pytest.approx(5.25, rel=1e-12)
        assert report.entry("Df").dispersion_bound_ps2 == pytest.approx(5.0, rel=1e-12)
        assert report.entry("D2").dispersion_bound_ps2 == pytest.approx(105.0, rel=1e-12)
        assert report.entry("Dr").dispersion_bound_ps2 == pytest.approx(100.0, rel=1e-12)

    def test_magnifier_example_bandwidths(self):
        report = _field_lens_report()
        assert report.entry("D1").bandwidth_rad_per_ps == pytest.approx(4 * LN2 / 5)
        for name in ("Df", "D2", "Dr"):
            assert report.entry(name).bandwidth_rad_per_ps == pytest.approx(1.0)

    def test_hard_bounds_have_no_multiplier(self):
        report = _field_lens_report()
        for entry in report.entries:
            assert entry.bound_kind == ">="
            assert entry.recommended_ps2 == entry.dispersion_bound_ps2

    def test_unit_magnification_bounds(self):
        report = _field_lens_report(m=1.0)
        assert report.entry("D1").dispersion_bound_ps2 == pytest.approx(10.0)
        assert report.entry("D2").dispersion_bound_ps2 == pytest.approx(10.0)
        assert report.entry("Dr").dispersion_bound_ps2 == pytest.approx(5.0)
        assert report.entry("Df").dispersion_bound_ps2 == pytest.approx(5.0)

    def test_bounds_at_equality_close_with_the_solver(self):
        t_i, dnu, m = 5.0, 1.0, 20.0
        report = _field_lens_report(t_i, dnu, m)
        d1, d2, dr = solve_field_lens(-m, t_i / dnu)
        assert abs(d1) == pytest.approx(report.entry("D1").dispersion_bound_ps2, rel=1e-12)
        assert abs(d2) == pytest.approx(report.entry("D2").dispersion_bound_ps2, rel=1e-12)
        assert abs(dr) == pytest.approx(report.entry("Dr").dispersion_bound_ps2, rel=1e-12)

    def test_small_dispersion_regime_flagged(self):
        report = _field_lens_report()  # D1 bound 5.25 vs t_i^2/10 = 2.5
        assert any("|D1| << t_i^2" in note for note in report.footnotes)
        narrowband = _field_lens_report(t_i=5.0, dnu=50.0, m=20.0)
        assert not any("|D1| << t_i^2" in note for note in narrowband.footnotes)


class TestTelescopeBounds:
    def test_magnifier_example_values(self):
        report = requirements(
            DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.TELESCOPE)
        )
        expected = {"D1": 5.0, "Df1": 5.0, "D2": 105.0, "Df2": 100.0, "D3": 100.0}
        for name, bound in expected.items():
            assert report.entry(name).dispersion_bound_ps2 == pytest.approx(
                bound, rel=1e-12
            ), name

    def test_relay_bandwidth_discrepancy_footnoted(self):
        report = requirements(
            DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.TELESCOPE)
        )
        assert any("D2 bandwidth" in note for note in report.footnotes)


class TestFarFieldBounds:
    def test_magnifier_example_values(self):
        report = requirements(
            DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.FAR_FIELD)
        )
        t2 = 25.0
        assert report.entry("D1").dispersion_bound_ps2 == pytest.approx(
            math.pi * 21.0 * t2 / 8.0, rel=1e-12
        )
        assert report.entry("Df").dispersion_bound_ps2 == pytest.approx(
            math.pi * 20.0 * t2 / 8.0, rel=1e-12
        )
        d2 = report.entry("D2").dispersion_bound_ps2
        assert d2 == pytest.approx(math.pi * 400.0 * t2 / 8.0, rel=1e-12)
        assert round(d2, 2) == 3926.99
        assert round(d2, -2) == 3900.0

    def test_multiplier_applied_to_recommendations(self):
        report = requirements(
            DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.FAR_FIELD),
            far_field_multiplier=10.0,
        )
        for entry in report.entries:
            assert entry.bound_kind == ">>"
            assert entry.recommended_ps2 == pytest.approx(
                10.0 * entry.dispersion_bound_ps2, rel=1e-12
            )
        assert report.far_field_multiplier == 10.0

    def test_far_field_penalty_dwarfs_corrected_bound(self):
        far = requirements(DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.FAR_FIELD))
        corrected = _field_lens_report()
        assert (
            far.entry("D2").dispersion_bound_ps2
            > 10.0 * corrected.entry("D2").dispersion_bound_ps2
        )

    def test_multiplier_below_one_rejected(self):
        with pytest.raises(DesignError):
            requirements(
                DesignRequest(5.0, 1.0, 20.0, DesignConfiguration.FAR_FIELD),
                far_field_multiplier=0.5,
            )


class TestMonotonicity:
    @pytest.mark.parametrize(
        "config",
        [
            DesignConfiguration.FIELD_LENS,
            DesignConfiguration.TELESCOPE,
            DesignConfiguration.FAR_FIELD,
        ],
    )
    def test_bounds_monotone_in_inputs(self, config):
        def report(t_i, dnu, m):
            return requirements(DesignRequest(t_i, dnu, m, config))

        def bounds(rep):
            return {e.element: e.dispersion_bound_ps2 for e in rep.entries}

        base = bounds(report(5.0, 1.0, 20.0))
        wider = bounds(report(10.0, 1.0, 20.0))
        assert all(wider[k] >= base[k] for k in base)
        more_bw = bounds(report(5.0, 2.0, 20.0))
        assert all(more_bw[k] <= base[k] for k in base)
        # In M every bound is nondecreasing except the field-lens input
        # element, whose (M+1)/M prefactor decays toward its asymptote.
        stronger = bounds(report(5.0, 1.0, 40.0))
        for name in base:
            if config is DesignConfiguration.FIELD_LENS and name == "D1":
                assert stronger[name] <= base[name]
            else:
                assert stronger[name] >= base[name], name


class TestCompressionAndValidation:
    def test_compression_request_footnoted(self):
        report = _field_lens_report(m=0.5)
        assert any("compress" in note for note in report.footnotes)

    @pytest.mark.parametrize("kwargs", [
        {"input_fwhm": 0.0},
        {"input_fwhm": -5.0},
        {"bandwidth": 0.0},
        {"magnification": 0.0},
        {"magnification": -20.0},
    ])
    def test_nonpositive_requests_rejected(self, kwargs):
        base = {"input_fwhm": 5.0, "bandwidth": 1.0, "magnification": 20.0}
        base.update(kwargs)
        with pytest.raises(DesignError):
            DesignRequest(configuration=DesignConfiguration.FIELD_LENS, **base)


class TestPumpBandwidth:
    def test_example_values(self):
        assert pump_bandwidth(5.0, 5.0) == pytest.approx(1.0, rel=1e-12)
        assert pump_bandwidth(5.0, 1000.0) == pytest.approx(0.005, rel=1e-12)

    def test_inverse_proportionality(self):
        assert pump_bandwidth(5.0, 2.5) == pytest.approx(
            2.0 * pump_bandwidth(5.0, 5.0), rel=1e-12
        )

    def test_zero_focal_gdd_rejected(self):
        with pytest.raises(DesignError):
            pump_bandwidth(5.0, 0.0)
