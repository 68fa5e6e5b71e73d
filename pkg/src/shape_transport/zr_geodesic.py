"""Geodesics on the closed-curve submanifold and its initial-point quotient.

exp_map integrates the geodesic equation with the constraint-consistent
acceleration; geodesic_between relaxes a sampled path to the discrete energy
minimum.  Quotient variants keep velocities orthogonal to the vertical
direction realized in the tangent space.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NumericalError, SingularShapeError
from .paths import GeodesicPath
from .zr_space import (
    DEFAULT_GRID,
    ZRShape,
    ZRTangent,
    _project_tangent_raw,
    _vec,
    align_initial_point,
    constraint_frame,
    coeffs_from_grid,
    eval_on_grid,
    g_vector,
    inner_raw,
    norm_raw,
    project_to_sigma,
    project_to_sigma_batch,
    s_grid,
    shift_initial_point,
    vertical_tangent_raw,
)

STEPS_PER_UNIT = 256
_ENERGY_RTOL = 1e-10
_MAX_SWEEPS = 500


# ---------------------------------------------------------------------------
# geodesic acceleration on the constraint manifold

def _accel(p: np.ndarray, v: np.ndarray, m: int, invariant: bool) -> np.ndarray:
    """Acceleration normal to the tangent space that keeps (p, v) on the
    constraint manifold; in invariant mode also the force that keeps v
    orthogonal to the realized vertical direction."""
    grid = eval_on_grid(p, m)
    a_grid = grid + s_grid(m)
    cg, sg = np.cos(a_grid), np.sin(a_grid)
    v_grid = eval_on_grid(v, m)

    n_harm = (p.shape[-1] - 1) // 2
    v1 = coeffs_from_grid(cg, n_harm)
    v2 = coeffs_from_grid(sg, n_harm)
    u1, u2 = constraint_frame(p, m)
    q1 = np.mean(sg * v_grid**2)
    q2 = -np.mean(cg * v_grid**2)
    mat = np.array([[inner_raw(v1, u1), inner_raw(v1, u2)],
                    [inner_raw(v2, u1), inner_raw(v2, u2)]])
    alpha, beta = np.linalg.solve(mat, [q1, q2])
    acc = alpha * u1 + beta * u2

    if invariant:
        uhat = vertical_tangent_raw(p, m)
        speed = norm_raw(v)
        eps = 1e-5 / max(float(speed), 1e-9)
        du = (vertical_tangent_raw(p + eps * v, m)
              - vertical_tangent_raw(p - eps * v, m)) / (2.0 * eps)
        acc = acc - (inner_raw(acc, uhat) + inner_raw(v, du)) * uhat
    return acc


def _project_velocity(p: np.ndarray, v: np.ndarray, m: int,
                      invariant: bool) -> np.ndarray:
    out = _project_tangent_raw(p, v, m)
    if invariant:
        uhat = vertical_tangent_raw(p, m)
        out = out - inner_raw(out, uhat) * uhat
    return out


def exp_map(theta: ZRShape, v: ZRTangent, T: float, steps: int | None = None,
            invariant: bool = False, m: int = DEFAULT_GRID) -> GeodesicPath:
    """Geodesic from theta with initial velocity v, integrated for time T.

    Classical 4th-order stepping of (position, velocity); after each step the
    position is re-projected onto the manifold, the velocity onto the tangent
    space (and in invariant mode onto the horizontal subspace), and the speed
    is restored.
    """
    vc = _vec(v)
    speed = float(norm_raw(vc))
    space = "zr_invariant" if invariant else "zr_sigma"
    if T < 0:
        raise ValueError("T must be nonnegative")
    if speed == 0.0 or T == 0.0:
        pts = np.repeat(theta.coeffs[None, :], 1, axis=0)
        return GeodesicPath(space, 0.0, np.zeros(1), pts,
                            np.zeros_like(vc), np.zeros_like(vc), base=theta)

    vp = _project_velocity(theta.coeffs, vc, m, invariant)
    if norm_raw(vp - vc) > 1e-6 * max(speed, 1.0):
        kind = "horizontal" if invariant else "tangent"
        raise ValueError(f"initial velocity is not {kind} at the base shape")
    vc = vp * (speed / float(norm_raw(vp)))

    if steps is None:
        steps = max(8, math.ceil(STEPS_PER_UNIT * T * max(speed, 1.0)))
    if steps < 8:
        raise ValueError("need at least 8 integration steps")

    h = T / steps
    p = theta.coeffs.copy()
    w = vc.copy()
    samples = np.empty((steps + 1, p.shape[0]))
    samples[0] = p
    for k in range(steps):
        k1p, k1v = w, _accel(p, w, m, invariant)
        k2p = w + 0.5 * h * k1v
        k2v = _accel(p + 0.5 * h * k1p, k2p, m, invariant)
        k3p = w + 0.5 * h * k2v
        k3v = _accel(p + 0.5 * h * k2p, k3p, m, invariant)
        k4p = w + h * k3v
        k4v = _accel(p + h * k3p, k4p, m, invariant)
        p = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        w = w + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        p = project_to_sigma_batch(p[None, :], m)[0]
        w = _project_velocity(p, w, m, invariant)
        w *= speed / float(norm_raw(w))
        samples[k + 1] = p

    return GeodesicPath(space, float(T), np.linspace(0.0, T, steps + 1),
                        samples, vc, w, base=theta)


# ---------------------------------------------------------------------------
# boundary value problem: discrete energy relaxation

def _path_energy(pts: np.ndarray) -> float:
    d = np.diff(pts, axis=0)
    return float(np.sum(inner_raw(d, d)))


def _relax(pts: np.ndarray, m: int, invariant: bool,
           max_sweeps: int, rtol: float) -> np.ndarray:
    """Sequential over-relaxation of interior samples toward neighbor midpoints,
    each update projected back onto the manifold (and, in invariant mode,
    constrained to horizontal directions)."""
    n_pts = len(pts)
    omega = min(2.0 / (1.0 + np.sin(np.pi / (n_pts - 1))), 1.95)
    energies = [_path_energy(pts)]
    for _ in range(max_sweeps):
        snapshot = pts.copy() if omega > 1.0 else None
        for i in range(1, n_pts - 1):
            target = 0.5 * (pts[i - 1] + pts[i + 1])
            delta = omega * (target - pts[i])
            if invariant:
                delta = _project_tangent_raw(pts[i], delta, m)
                uhat = vertical_tangent_raw(pts[i], m)
                delta = delta - inner_raw(delta, uhat) * uhat
            pts[i] = project_to_sigma_batch((pts[i] + delta)[None, :], m,
                                            iters=3)[0]
        e = _path_energy(pts)
        if e > energies[-1] and omega > 1.0:
            pts = snapshot
            omega = 1.0 + (omega - 1.0) / 2.0
            if omega < 1.001:
                omega = 1.0
            continue
        done = abs(energies[-1] - e) <= rtol * max(e, 1e-30)
        energies.append(e)
        if done:
            return pts
    raise NumericalError(
        f"path relaxation did not converge in {max_sweeps} sweeps", energies)


def _reparam_constant_speed(pts: np.ndarray, m: int):
    """Resample the polyline at uniform arc length; returns (points, T)."""
    d = np.diff(pts, axis=0)
    seg = np.sqrt(inner_raw(d, d))
    tau = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(tau[-1])
    spline = CubicSpline(tau, pts, axis=0)
    t_new = np.linspace(0.0, total, len(pts))
    out = spline(t_new)
    out[1:-1] = project_to_sigma_batch(out[1:-1], m)
    out[0], out[-1] = pts[0], pts[-1]
    return out, total


def _finish_path(pts: np.ndarray, m: int, invariant: bool,
                 base: ZRShape) -> GeodesicPath:
    pts, total = _reparam_constant_speed(pts, m)
    ts = np.linspace(0.0, total, len(pts))
    spline = CubicSpline(ts, pts, axis=0).derivative()
    v0 = _project_velocity(pts[0], spline(0.0), m, invariant)
    v0 /= float(norm_raw(v0))
    v_end = _project_velocity(pts[-1], spline(total), m, invariant)
    v_end /= float(norm_raw(v_end))
    space = "zr_invariant" if invariant else "zr_sigma"
    return GeodesicPath(space, total, ts, pts, v0, v_end, base=base)


def _constant_path(theta: ZRShape, invariant: bool) -> GeodesicPath:
    z = np.zeros_like(theta.coeffs)
    space = "zr_invariant" if invariant else "zr_sigma"
    return GeodesicPath(space, 0.0, np.zeros(1), theta.coeffs[None, :],
                        z, z, base=theta)


def geodesic_between(theta0: ZRShape, theta1: ZRShape, n_samples: int = 33,
                     max_sweeps: int = _MAX_SWEEPS, m: int = DEFAULT_GRID) -> GeodesicPath:
    """Constant-speed geodesic on the closed-curve manifold joining two shapes.

    Initialized from the projected linear interpolation, then relaxed until the
    relative energy decrease falls below 1e-10.
    """
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    if float(norm_raw(theta0.coeffs - theta1.coeffs)) <= 1e-10:
        return _constant_path(theta0, invariant=False)
    lam = np.linspace(0.0, 1.0, n_samples)[:, None]
    pts = (1.0 - lam) * theta0.coeffs + lam * theta1.coeffs
    pts = np.stack([project_to_sigma(row, m).coeffs for row in pts])
    pts[0], pts[-1] = theta0.coeffs, theta1.coeffs
    pts = _relax(pts, m, False, max_sweeps, _ENERGY_RTOL)
    return _finish_path(pts, m, False, theta0)


def geodesic_between_invariant(theta0: ZRShape, theta1: ZRShape,
                               n_samples: int = 33,
                               max_sweeps: int = _MAX_SWEEPS,
                               m: int = DEFAULT_GRID) -> GeodesicPath:
    """Geodesic in the initial-point quotient.

    The second endpoint is first reparameterized to the best-matching initial
    point; relaxation updates are then restricted to horizontal directions so
    the path stays a horizontal lift.
    """
    for s in (theta0, theta1):
        if float(norm_raw(s.coeffs)) < 1e-6:
            raise SingularShapeError(
                "quotient geodesics are undefined at the circle shape")
    s0, dist = align_initial_point(theta0, theta1)
    if dist <= 1e-8:
        return _constant_path(theta0, invariant=True)
    theta1a = shift_initial_point(theta1, s0)
    lam = np.linspace(0.0, 1.0, n_samples)[:, None]
    pts = (1.0 - lam) * theta0.coeffs + lam * theta1a.coeffs
    pts = np.stack([project_to_sigma(row, m).coeffs for row in pts])
    pts[0], pts[-1] = theta0.coeffs, theta1a.coeffs
    pts = _relax(pts, m, True, max_sweeps, _ENERGY_RTOL)
    return _finish_path(pts, m, True, theta0)


def fit_geodesic_to_series(shapes, times, n_samples: int = 33,
                           invariant: bool = False,
                           m: int = DEFAULT_GRID):
    """Geodesic through the first and last of a shape series, with per-shape
    residual distances to the matching points of the fitted path.

    Times are mapped affinely onto the path parameter.
    """
    shapes = list(shapes)
    times = np.asarray(times, dtype=float)
    if len(shapes) != len(times) or len(shapes) < 2:
        raise ValueError("need equally many shapes and times, at least two")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    if invariant:
        path = geodesic_between_invariant(shapes[0], shapes[-1], n_samples, m=m)
    else:
        path = geodesic_between(shapes[0], shapes[-1], n_samples, m=m)
    frac = (times - times[0]) / (times[-1] - times[0])
    residuals = np.empty(len(shapes))
    for i, (s, f) in enumerate(zip(shapes, frac)):
        pt = path.point_at(f * path.T)
        residuals[i] = float(norm_raw(s.coeffs - pt))
    return path, residuals
