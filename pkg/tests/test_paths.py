"""Sampled-path container behaviour shared by both geometries."""

import numpy as np
import pytest

import oracles as orc
from conftest import random_preshape, random_sigma_shape, random_tangent
from shape_transport import (
    DimensionMismatchError,
    GeodesicPath,
    TransportResult,
    exp_map,
    geodesic_kendall,
    path_from_dict,
)
from shape_transport.zr_space import inner_raw, vertical_tangent_raw


def _zr_path(seed=0, invariant=False, n=17):
    base = random_sigma_shape(seed)
    v = random_tangent(base, seed + 1, horizontal=invariant)
    return exp_map(base, v, 0.3, steps=n - 1, invariant=invariant)


class TestSampling:
    def test_endpoints_interpolated_exactly(self):
        p = _zr_path()
        assert np.abs(p.point_at(0.0) - p.points[0]).max() < 1e-12
        assert np.abs(p.point_at(p.T) - p.points[-1]).max() < 1e-12

    def test_point_at_vectorized(self):
        p = _zr_path()
        ts = np.linspace(0.0, p.T, 5)
        block = p.point_at(ts)
        assert block.shape == (5, p.points.shape[1])
        for i, t in enumerate(ts):
            assert np.abs(block[i] - p.point_at(t)).max() == 0.0

    def test_n_samples(self):
        p = _zr_path(n=9)
        assert p.n_samples == 9

    def test_mismatched_rows_rejected(self):
        with pytest.raises(DimensionMismatchError):
            GeodesicPath(space="zr_sigma", T=1.0, ts=np.linspace(0, 1, 4),
                         points=np.zeros((3, 201)), v0=np.zeros(201),
                         v_end=np.zeros(201))

    def test_bad_space_tag(self):
        with pytest.raises(ValueError):
            GeodesicPath(space="euclidean", T=1.0, ts=np.zeros(1),
                         points=np.zeros((1, 3)), v0=np.zeros(3),
                         v_end=np.zeros(3))

    def test_single_sample_constant(self):
        p = GeodesicPath(space="zr_sigma", T=0.0, ts=np.zeros(1),
                         points=np.ones((1, 201)), v0=np.zeros(201),
                         v_end=np.zeros(201))
        assert np.abs(p.point_at(0.7) - 1.0).max() == 0.0
        assert np.abs(p.velocity_at(0.7)).max() == 0.0


class TestVelocity:
    def test_velocity_in_tangent_space(self):
        p = _zr_path(seed=2)
        for t in (0.0, 0.11, 0.3):
            v = p.velocity_at(t)
            rows = orc.zr_constraint_rows(p.point_at(t))
            assert np.abs(rows @ v).max() < 1e-6

    def test_invariant_velocity_is_horizontal(self):
        p = _zr_path(seed=3, invariant=True)
        for t in (0.0, 0.15, 0.3):
            v = p.velocity_at(t)
            uhat = vertical_tangent_raw(p.point_at(t))
            assert abs(inner_raw(v, uhat)) < 1e-9

    def test_matches_v0(self):
        p = _zr_path(seed=4)
        assert np.abs(p.velocity_at(0.0) - p.v0).max() < 1e-4

    def test_kendall_velocity_tangent_to_sphere(self):
        x = random_preshape(5, k=5)
        y = random_preshape(6, k=5)
        p = geodesic_kendall(x, y)
        for t in (0.0, 0.4 * p.T, p.T):
            pt = p.point_at(t)
            v = p.velocity_at(t)
            assert abs(np.vdot(pt, v)) < 1e-8


class TestReversed:
    def test_samples_mirrored(self):
        p = _zr_path(seed=7)
        r = p.reversed()
        assert r.T == p.T
        assert np.abs(r.points[0] - p.points[-1]).max() == 0.0
        assert np.abs(r.points[-1] - p.points[0]).max() == 0.0
        assert np.abs(r.ts - (p.T - p.ts[::-1])).max() < 1e-15

    def test_velocities_negated(self):
        p = _zr_path(seed=8)
        r = p.reversed()
        assert np.abs(r.v0 + p.v_end).max() == 0.0
        assert np.abs(r.v_end + p.v0).max() == 0.0

    def test_base_moved_to_far_end(self):
        p = _zr_path(seed=9)
        r = p.reversed()
        assert np.abs(r.base.coeffs - p.points[-1]).max() == 0.0
        assert r.base.length == p.base.length

    def test_involution(self):
        p = _zr_path(seed=10)
        rr = p.reversed().reversed()
        assert np.abs(rr.points - p.points).max() == 0.0
        assert np.abs(rr.ts - p.ts).max() < 1e-15


class TestSerialization:
    def test_zr_roundtrip(self):
        p = _zr_path(seed=11)
        back = path_from_dict(p.to_dict())
        assert back.space == p.space
        assert back.T == p.T
        assert np.array_equal(back.ts, p.ts)
        assert np.array_equal(back.points, p.points)
        assert np.array_equal(back.v0, p.v0)
        assert back.base.length == p.base.length

    def test_kendall_roundtrip(self):
        x = random_preshape(12, k=4)
        y = random_preshape(13, k=4)
        p = geodesic_kendall(x, y)
        back = path_from_dict(p.to_dict())
        assert back.space == "kendall"
        assert np.array_equal(back.points, p.points)
        assert back.base.k == p.base.k and back.base.m == p.base.m

    def test_baseless_path_refuses(self):
        p = GeodesicPath(space="zr_sigma", T=1.0, ts=np.linspace(0, 1, 3),
                         points=np.zeros((3, 201)), v0=np.zeros(201),
                         v_end=np.zeros(201))
        with pytest.raises(ValueError):
            p.to_dict()


class TestTransportResult:
    def test_to_dict(self):
        r = TransportResult(w_end=np.arange(3.0), norm_drift=1e-9, steps=64)
        d = r.to_dict()
        assert d["w_end"] == [0.0, 1.0, 2.0]
        assert d["norm_drift"] == 1e-9
        assert d["steps"] == 64
