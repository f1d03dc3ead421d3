"""Sample containers, windows, presets, and the bicubic interpolant."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqgeo.flow import (
    DECAY_FLOOR,
    GAUSSIAN_SUPPORT,
    PRESET_NAMES,
    DecayViolationError,
    ScalarField2D,
    axis_coords,
    catmull_rom_weights,
    interp_bicubic,
    preset_theta0,
    probe_bump,
    radial_window,
    smoothstep5,
)
from sqgeo.flow.fields import GAUSSIAN_AMP, PAIR_AMP, field_header, grid_size


def test_axis_coords_endpoints_and_spacing():
    ax = axis_coords(4.0, 4.0 / 32)
    assert ax[0] == -4.0 and ax[-1] == 4.0
    assert len(ax) == 65
    assert np.allclose(np.diff(ax), 4.0 / 32)


def test_grid_size_rejects_incommensurate_h():
    with pytest.raises(ValueError):
        grid_size(4.0, 0.3)


class TestWindows:
    def test_smoothstep_endpoints(self):
        assert smoothstep5(np.array([-1.0, 0.0, 1.0, 2.0])).tolist() == [
            0.0, 0.0, 1.0, 1.0]

    def test_smoothstep_midpoint(self):
        # quintic smoothstep is symmetric about (1/2, 1/2)
        assert smoothstep5(np.array([0.5]))[0] == pytest.approx(0.5, abs=1e-15)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_smoothstep_monotone(self, a, b):
        lo, hi = sorted((a, b))
        va, vb = smoothstep5(np.array([lo, hi]))
        assert va <= vb

    def test_radial_window_plateau_and_tail(self):
        r = np.array([0.0, 1.9, 2.0, 2.75, 3.5])
        w = radial_window(r, 2.0, 2.75)
        assert w[0] == 1.0 and w[1] == 1.0 and w[2] == 1.0
        assert w[3] == 0.0 and w[4] == 0.0

    def test_radial_window_smooth_at_outer_edge(self):
        # C^2 cutoff: second difference stays bounded through r_zero
        r = np.linspace(2.70, 2.80, 2001)
        w = radial_window(r, 2.0, 2.75)
        d2 = np.diff(w, 2)
        assert np.max(np.abs(d2)) < 1e-6


class TestScalarField:
    def test_zeros_shape(self):
        f = ScalarField2D.zeros(4.0, 4.0 / 16)
        assert f.samples.shape == (33, 33)
        assert f.n == 33

    def test_samples_are_read_only(self):
        f = ScalarField2D.zeros(4.0, 0.5)
        with pytest.raises(ValueError):
            f.samples[0, 0] = 1.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ScalarField2D(4.0, 0.5, np.zeros((5, 5)))

    def test_from_function_orientation(self):
        # axis 0 is y, axis 1 is x
        f = ScalarField2D.from_function(lambda x, y: x + 10.0 * y, 2.0, 0.5)
        assert f.samples[0, -1] == pytest.approx(2.0 - 20.0)   # (x=2, y=-2)
        assert f.samples[-1, 0] == pytest.approx(-2.0 + 20.0)  # (x=-2, y=2)

    def test_margin_decay_enforced(self):
        g = ScalarField2D.from_function(
            lambda x, y: np.exp(-(x * x + y * y)), 4.0, 0.25)
        # unwindowed gaussian is ~2e-6 at the margin band: above the floor
        assert g.margin_max() > DECAY_FLOOR
        assert not g.decay_ok()
        with pytest.raises(DecayViolationError):
            g.require_decay()

    def test_arithmetic_and_scaling(self):
        a = preset_theta0("gaussian", h=0.5)
        b = preset_theta0("gaussian-pair", h=0.5)
        s = a + b
        np.testing.assert_allclose(s.samples, a.samples + b.samples)
        np.testing.assert_allclose((2.0 * a).samples, 2.0 * a.samples)
        np.testing.assert_allclose((a - a).samples, 0.0)

    def test_support_radius_merge_takes_max(self):
        a = ScalarField2D.zeros(4.0, 0.5)
        small = ScalarField2D(4.0, 0.5, a.samples, support_radius=1.0)
        big = ScalarField2D(4.0, 0.5, a.samples, support_radius=2.0)
        assert (small + big).support_radius == 2.0
        assert (small + a).support_radius is None  # unknown support wins

    def test_incompatible_grids_rejected(self):
        a = ScalarField2D.zeros(4.0, 0.5)
        b = ScalarField2D.zeros(4.0, 0.25)
        with pytest.raises(ValueError):
            a + b


class TestPresets:
    def test_names(self):
        assert set(PRESET_NAMES) == {"zero", "gaussian", "gaussian-pair"}
        with pytest.raises(ValueError):
            preset_theta0("vortex")

    def test_zero_preset(self):
        z = preset_theta0("zero", h=0.5)
        assert not z.samples.any()

    def test_gaussian_peak_and_symmetry(self):
        g = preset_theta0("gaussian", h=0.25)
        c = g.n // 2
        assert g.samples[c, c] == pytest.approx(GAUSSIAN_AMP)
        # radial: invariant under both reflections and the diagonal flip
        np.testing.assert_array_equal(g.samples, g.samples[::-1, :])
        np.testing.assert_array_equal(g.samples, g.samples[:, ::-1])
        np.testing.assert_allclose(g.samples, g.samples.T, atol=1e-17)

    def test_gaussian_support_and_decay(self):
        g = preset_theta0("gaussian", h=0.25)
        assert g.support_radius == GAUSSIAN_SUPPORT
        assert g.decay_ok()
        x = np.hypot(*np.meshgrid(axis_coords(4.0, 0.25), axis_coords(4.0, 0.25)))
        assert np.all(g.samples[x >= GAUSSIAN_SUPPORT] == 0.0)

    def test_pair_antisymmetry(self):
        p = preset_theta0("gaussian-pair", h=0.25)
        # opposite-sign bumps at (-c, 0), (+c, 0): odd under x -> -x
        np.testing.assert_allclose(p.samples, -p.samples[:, ::-1], atol=1e-17)
        # peak sits at a bump center, reduced by the opposite bump's tail
        # (separation 1.5 => overlap factor exp(-2 * 1.5^2))
        assert np.max(p.samples) == pytest.approx(
            PAIR_AMP * (1.0 - math.exp(-4.5)), rel=1e-3)
        assert abs(np.sum(p.samples)) < 1e-13  # zero mean by symmetry

    def test_probe_bump_inside_support(self):
        b = probe_bump((0.5, 0.25), h=0.25)
        assert b.support_radius == GAUSSIAN_SUPPORT
        assert b.decay_ok()
        with pytest.raises(ValueError):
            probe_bump((2.0, 2.0))  # bump would stick out of the source disc


class TestInterpolation:
    def test_weights_partition_of_unity(self):
        for f in (0.0, 0.25, 0.5, 0.9):
            assert sum(catmull_rom_weights(f)) == pytest.approx(1.0, abs=1e-15)

    def test_weights_at_nodes(self):
        assert catmull_rom_weights(0.0) == pytest.approx((0.0, 1.0, 0.0, 0.0))

    def test_exact_at_grid_nodes(self):
        g = preset_theta0("gaussian", h=0.5)
        ax = axis_coords(4.0, 0.5)
        vals = interp_bicubic(g.samples, ax[5:10], np.full(5, ax[7]), 4.0, 0.5)
        np.testing.assert_allclose(vals, g.samples[7, 5:10], atol=1e-15)

    def test_reproduces_quadratics(self):
        # the Keys a = -1/2 kernel is third-order: exact on degree <= 2
        f = ScalarField2D.from_function(
            lambda x, y: 0.3 * x**2 - x * y + 0.1 * y**2, 2.0, 0.125)
        rng = np.random.default_rng(7)
        px = rng.uniform(-1.5, 1.5, 200)
        py = rng.uniform(-1.5, 1.5, 200)
        got = interp_bicubic(f.samples, px, py, 2.0, 0.125)
        want = 0.3 * px**2 - px * py + 0.1 * py**2
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_third_order_on_smooth_data(self):
        errs = []
        for h in (0.25, 0.125, 0.0625):
            f = ScalarField2D.from_function(
                lambda x, y: np.sin(1.3 * x) * np.cos(0.7 * y), 2.0, h)
            rng = np.random.default_rng(11)
            px = rng.uniform(-1.0, 1.0, 400)
            py = rng.uniform(-1.0, 1.0, 400)
            got = interp_bicubic(f.samples, px, py, 2.0, h)
            errs.append(np.max(np.abs(got - np.sin(1.3 * px) * np.cos(0.7 * py))))
        order = np.polyfit(np.log([0.25, 0.125, 0.0625]), np.log(errs), 1)[0]
        assert order > 2.7

    @settings(max_examples=25)
    @given(st.floats(-1.8, 1.8), st.floats(-1.8, 1.8))
    def test_matches_sample_at(self, x, y):
        g = preset_theta0("gaussian", L=2.0, h=0.125)
        assert g.sample_at(x, y) == pytest.approx(
            float(interp_bicubic(g.samples, np.array([x]), np.array([y]),
                                 2.0, 0.125)[0]), abs=1e-15)


def test_field_header_round_trip():
    g = preset_theta0("gaussian", h=0.5)
    doc = json.loads(field_header(g, "scalar", config={"dt": 0.03125}))
    assert doc["kind"] == "scalar"
    assert doc["nx"] == doc["ny"] == g.n
    assert doc["L"] == 4.0 and doc["h"] == 0.5
    assert doc["gamma"] == 0.5
    assert doc["config"]["dt"] == 0.03125
