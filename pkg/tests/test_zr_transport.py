"""Parallel transport on the contour manifold and in its quotient."""

import numpy as np
import pytest

import oracles as orc
from conftest import random_sigma_shape, random_tangent
from shape_transport import (
    GeodesicPath,
    ZRShape,
    ZRTangent,
    exp_map,
    geodesic_between,
    geodesic_between_invariant,
    inner,
    transport_invariant,
    transport_sigma,
)
from shape_transport.zr_space import inner_raw, norm_raw, vertical_tangent_raw


def _path(seed, invariant=False, T=0.35):
    base = random_sigma_shape(seed)
    v = random_tangent(base, seed + 1000, horizontal=invariant)
    return exp_map(base, v, T, invariant=invariant)


def _transported_pair(seed, invariant):
    path = _path(seed, invariant)
    base = ZRShape(100, path.points[0])
    w = random_tangent(base, seed + 2000, horizontal=invariant)
    fn = transport_invariant if invariant else transport_sigma
    return path, w, fn(path, w)


class TestBasics:
    @pytest.mark.parametrize("invariant", [False, True])
    def test_norm_preserved(self, invariant):
        path, w, res = _transported_pair(40, invariant)
        assert norm_raw(res.w_end) == pytest.approx(norm_raw(w.coeffs), abs=1e-12)
        assert res.norm_drift < 1e-6

    @pytest.mark.parametrize("invariant", [False, True])
    def test_inner_products_preserved(self, invariant):
        path = _path(50, invariant)
        base = ZRShape(100, path.points[0])
        w1 = random_tangent(base, 51, horizontal=invariant)
        w2 = random_tangent(base, 52, horizontal=invariant)
        fn = transport_invariant if invariant else transport_sigma
        r1, r2 = fn(path, w1), fn(path, w2)
        assert inner_raw(r1.w_end, r2.w_end) == pytest.approx(
            inner(w1, w2), abs=1e-6)

    @pytest.mark.parametrize("invariant", [False, True])
    def test_round_trip(self, invariant):
        path, w, res = _transported_pair(60, invariant)
        fn = transport_invariant if invariant else transport_sigma
        back = fn(path.reversed(), res.w_end)
        assert norm_raw(back.w_end - w.coeffs) < 1e-6

    def test_linearity(self):
        path = _path(70)
        base = ZRShape(100, path.points[0])
        w1 = random_tangent(base, 71)
        w2 = random_tangent(base, 72)
        combo = 0.3 * w1.coeffs - 1.7 * w2.coeffs
        r1 = transport_sigma(path, w1)
        r2 = transport_sigma(path, w2)
        rc = transport_sigma(path, combo)
        assert norm_raw(rc.w_end - (0.3 * r1.w_end - 1.7 * r2.w_end)) < 1e-8

    def test_velocity_self_transport(self):
        path = _path(80)
        res = transport_sigma(path, path.v0)
        assert norm_raw(res.w_end - path.v_end) < 1e-6

    def test_trivial_path(self):
        base = random_sigma_shape(90)
        w = random_tangent(base, 91)
        path = GeodesicPath("zr_sigma", 0.0, np.zeros(1),
                            base.coeffs[None, :], np.zeros(201),
                            np.zeros(201), base=base)
        res = transport_sigma(path, w)
        assert np.array_equal(res.w_end, w.coeffs)
        assert res.steps == 0

    def test_result_lands_in_tangent_space(self):
        path, _, res = _transported_pair(95, False)
        rows = orc.zr_constraint_rows(path.points[-1])
        assert np.abs(rows @ res.w_end).max() < 1e-8

    def test_invariant_result_is_horizontal(self):
        path, _, res = _transported_pair(96, True)
        uhat = vertical_tangent_raw(path.points[-1])
        assert abs(inner_raw(res.w_end, uhat)) < 1e-9


class TestAgainstSteppingOracle:
    def test_submanifold(self):
        path, w, res = _transported_pair(100, False)
        ref = orc.transport_stepping_richardson(path, w.coeffs, 64)
        assert norm_raw(res.w_end - ref) < 1e-6

    def test_quotient(self):
        path, w, res = _transported_pair(101, True)
        ref = orc.transport_stepping_richardson(path, w.coeffs, 256,
                                                invariant=True)
        assert norm_raw(res.w_end - ref) < 1e-6

    def test_bvp_path_quotient(self):
        a, b = random_sigma_shape(102), random_sigma_shape(103)
        path = geodesic_between_invariant(a, b, n_samples=17)
        base = ZRShape(100, path.points[0])
        w = random_tangent(base, 104, horizontal=True)
        res = transport_invariant(path, w)
        ref = orc.transport_stepping_richardson(path, w.coeffs, 256,
                                                invariant=True)
        assert norm_raw(res.w_end - ref) < 1e-6


class TestFlatSubspace:
    def _sym_tangent(self, seed):
        rng = np.random.default_rng(seed)
        raw = np.zeros(201)
        n = np.arange(1, 101)
        keep = n % 2 == 0
        raw[1::2][keep] = rng.normal(size=keep.sum()) / n[keep] ** 1.5
        raw[2::2][keep] = rng.normal(size=keep.sum()) / n[keep] ** 1.5
        raw[0] = -raw[1::2].sum()
        return raw / norm_raw(raw)

    def test_transport_is_identity(self, rect_zr, hex_zr):
        path = geodesic_between(rect_zr, hex_zr, n_samples=17)
        w = self._sym_tangent(110)
        res = transport_sigma(path, w)
        assert norm_raw(res.w_end - w) < 1e-6

    def test_drift_vanishes(self, rect_zr, hex_zr):
        path = geodesic_between(rect_zr, hex_zr, n_samples=17)
        res = transport_sigma(path, self._sym_tangent(111))
        assert res.norm_drift < 1e-12


class TestConvergence:
    def test_step_halving_shrinks_oracle_gap(self):
        path, w, _ = _transported_pair(120, False)
        ref = orc.transport_stepping_richardson(path, w.coeffs, 256)
        coarse = transport_sigma(path, w, steps_per_unit=32)
        fine = transport_sigma(path, w, steps_per_unit=64)
        e_c = norm_raw(coarse.w_end - ref)
        e_f = norm_raw(fine.w_end - ref)
        assert e_f <= e_c + 1e-12


class TestValidation:
    def test_kendall_path_rejected(self):
        from conftest import random_preshape
        from shape_transport import geodesic_kendall
        kp = geodesic_kendall(random_preshape(1), random_preshape(2))
        with pytest.raises(ValueError):
            transport_sigma(kp, np.zeros(201))

    def test_nontangent_vector_rejected(self):
        path = _path(130)
        bad = np.zeros(201)
        bad[2] = 1.0
        with pytest.raises(ValueError):
            transport_sigma(path, bad)

    def test_vertical_vector_rejected_in_quotient(self):
        path = _path(131, invariant=True)
        u = vertical_tangent_raw(path.points[0])
        with pytest.raises(ValueError):
            transport_invariant(path, u)
