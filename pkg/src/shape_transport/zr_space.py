"""Zahn-Roskies shape space: turning-function Fourier coefficients, the closed-curve
submanifold, its initial-point quotient and k-fold symmetric subspaces.

Coefficient layout throughout: (x_0, x_1, y_1, ..., x_N, y_N), length 2N+1.
The metric is <u,v> = u_0 v_0 + 0.5*sum(u_n v_n + u~_n v~_n), i.e. the L2 pairing
of the underlying functions divided by 2*pi.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatchError,
    NumericalError,
    SingularShapeError,
)

DEFAULT_N = 100
DEFAULT_GRID = 1024

_PROJ_TOL = 1e-10
_PROJ_MAXITER = 50


# ---------------------------------------------------------------------------
# basic containers

@dataclass(frozen=True)
class ZRShape:
    """A closed-contour shape as truncated Fourier coefficients of its turning function.

    length and base_angle carry the similarity data needed to reconstruct an
    actual contour; they do not enter the shape geometry.
    """

    N: int
    coeffs: np.ndarray
    length: float = 2.0 * np.pi
    base_angle: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (2 * self.N + 1,):
            raise DimensionMismatchError(
                f"expected {2 * self.N + 1} coefficients for N={self.N}, got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def with_coeffs(self, coeffs: np.ndarray) -> "ZRShape":
        return ZRShape(self.N, coeffs, self.length, self.base_angle)


@dataclass(frozen=True)
class ZRTangent:
    """Tangent vector at a base shape, same coefficient layout."""

    N: int
    coeffs: np.ndarray
    base: ZRShape | None = None
    horizontal: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (2 * self.N + 1,):
            raise DimensionMismatchError(
                f"expected {2 * self.N + 1} coefficients for N={self.N}, got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def _vec(v) -> np.ndarray:
    if isinstance(v, (ZRShape, ZRTangent)):
        return v.coeffs
    return np.asarray(v, dtype=float)


# ---------------------------------------------------------------------------
# metric

def inner_raw(a: np.ndarray, b: np.ndarray) -> float | np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] + 0.5 * np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def norm_raw(a) -> float | np.ndarray:
    a = _vec(a)
    return np.sqrt(inner_raw(a, a))


def inner(u: ZRTangent, v: ZRTangent) -> float:
    """Metric pairing of two tangents (same truncation order required)."""
    if u.N != v.N:
        raise DimensionMismatchError(f"tangent orders differ: {u.N} vs {v.N}")
    return float(inner_raw(u.coeffs, v.coeffs))


def zr_distance(a: ZRShape, b: ZRShape) -> float:
    if a.N != b.N:
        raise DimensionMismatchError(f"shape orders differ: {a.N} vs {b.N}")
    return float(norm_raw(a.coeffs - b.coeffs))


# ---------------------------------------------------------------------------
# grid evaluation (uniform s grid, FFT based, batched over leading axes)

@lru_cache(maxsize=8)
def s_grid(m: int = DEFAULT_GRID) -> np.ndarray:
    s = 2.0 * np.pi * np.arange(m) / m
    s.setflags(write=False)
    return s


def eval_on_grid(coeffs: np.ndarray, m: int = DEFAULT_GRID) -> np.ndarray:
    """Evaluate the truncated series on the uniform m-grid. Batched."""
    c = np.asarray(coeffs, dtype=float)
    n_harm = (c.shape[-1] - 1) // 2
    if m < 2 * n_harm + 2:
        raise DimensionMismatchError(f"grid {m} too small for {n_harm} harmonics")
    spec = np.zeros(c.shape[:-1] + (m // 2 + 1,), dtype=complex)
    spec[..., 0] = m * c[..., 0]
    spec[..., 1:n_harm + 1] = 0.5 * m * (c[..., 1::2] - 1j * c[..., 2::2])
    return np.fft.irfft(spec, n=m, axis=-1)


def coeffs_from_grid(values: np.ndarray, n_harm: int) -> np.ndarray:
    """Fourier-project grid samples onto harmonics 0..n_harm. Batched."""
    v = np.asarray(values, dtype=float)
    m = v.shape[-1]
    spec = np.fft.rfft(v, axis=-1) / m
    out = np.empty(v.shape[:-1] + (2 * n_harm + 1,))
    out[..., 0] = spec[..., 0].real
    out[..., 1::2] = 2.0 * spec[..., 1:n_harm + 1].real
    out[..., 2::2] = -2.0 * spec[..., 1:n_harm + 1].imag
    return out


# ---------------------------------------------------------------------------
# closure constraint

def closure_map(theta, m: int = DEFAULT_GRID) -> complex:
    """Integral of exp(i(theta(s)+s)) ds over one period (trapezoid on the m-grid)."""
    c = _vec(theta)
    grid = eval_on_grid(c, m)
    e = np.exp(1j * (grid + s_grid(m)))
    return complex(2.0 * np.pi * np.mean(e, axis=-1))


def _x_index_mask(n_harm: int) -> np.ndarray:
    mask = np.zeros(2 * n_harm + 1)
    mask[0] = 1.0
    mask[1::2] = 1.0
    return mask


def _constraint_residuals_and_jac(c: np.ndarray, m: int):
    """Residuals (Re Psi, Im Psi, x0 + sum x_n) and their Jacobian rows. Batched."""
    n_harm = (c.shape[-1] - 1) // 2
    grid = eval_on_grid(c, m)
    e = np.exp(1j * (grid + s_grid(m)))
    psi = 2.0 * np.pi * np.mean(e, axis=-1)

    spec = np.fft.fft(e, axis=-1) / m
    # mean(e*cos(ns)), mean(e*sin(ns)) for n = 0..n_harm
    idx = np.arange(1, n_harm + 1)
    m_cos = np.concatenate([spec[..., :1],
                            0.5 * (spec[..., idx] + spec[..., m - idx])], axis=-1)
    m_sin = (spec[..., m - idx] - spec[..., idx]) / 2j
    dpsi = np.empty(c.shape, dtype=complex)
    dpsi[..., 0] = m_cos[..., 0]
    dpsi[..., 1::2] = m_cos[..., 1:]
    dpsi[..., 2::2] = m_sin
    dpsi *= 2j * np.pi

    xsum = c[..., 0] + np.sum(c[..., 1::2], axis=-1)
    res = np.stack([psi.real, psi.imag, xsum], axis=-1)
    jac = np.stack([dpsi.real, dpsi.imag,
                    np.broadcast_to(_x_index_mask(n_harm), c.shape)], axis=-2)
    return res, jac


def _metric_inv_diag(n_harm: int) -> np.ndarray:
    d = np.full(2 * n_harm + 1, 2.0)
    d[0] = 1.0
    return d


def project_to_sigma(theta, m: int = DEFAULT_GRID) -> ZRShape:
    """Project a coefficient vector onto the closed-curve manifold.

    Gauss-Newton on the three constraint residuals with the minimal-metric-norm
    update; stops when every residual is below 1e-10.
    """
    if isinstance(theta, ZRShape):
        src, c = theta, theta.coeffs.copy()
    else:
        c = np.asarray(theta, dtype=float).copy()
        src = None
    n_harm = (c.shape[-1] - 1) // 2
    ginv = _metric_inv_diag(n_harm)

    history = []
    for _ in range(_PROJ_MAXITER):
        res, jac = _constraint_residuals_and_jac(c, m)
        history.append(float(np.max(np.abs(res))))
        if history[-1] <= _PROJ_TOL:
            break
        jg = jac * ginv  # J G^-1
        gram = jg @ jac.T
        try:
            lam = np.linalg.solve(gram, res)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular constraint system in projection",
                                 history) from exc
        step = -(jg.T @ lam)
        # damped: halve until the residual norm does not grow
        scale = 1.0
        base = np.linalg.norm(res)
        for _ in range(8):
            trial = c + scale * step
            r_new, _ = _constraint_residuals_and_jac(trial, m)
            if np.linalg.norm(r_new) <= base:
                break
            scale *= 0.5
        c = c + scale * step
    else:
        raise NumericalError(
            f"constraint projection did not reach {_PROJ_TOL:g} in "
            f"{_PROJ_MAXITER} iterations", history)

    if src is not None:
        return src.with_coeffs(c)
    return ZRShape(n_harm, c)


def project_to_sigma_batch(points: np.ndarray, m: int = DEFAULT_GRID,
                           iters: int = 2) -> np.ndarray:
    """Fixed-iteration undamped variant for batches already near the manifold."""
    c = np.asarray(points, dtype=float).copy()
    n_harm = (c.shape[-1] - 1) // 2
    ginv = _metric_inv_diag(n_harm)
    for _ in range(iters):
        res, jac = _constraint_residuals_and_jac(c, m)
        jg = jac * ginv
        gram = jg @ np.swapaxes(jac, -1, -2)
        lam = np.linalg.solve(gram, res[..., None])[..., 0]
        c -= np.einsum("...kd,...k->...d", jg, lam)
    return c


# ---------------------------------------------------------------------------
# frames

def g_vector(n_harm: int) -> np.ndarray:
    """Metric representer of the linear functional v -> v_0 + sum x_n."""
    g = np.zeros(2 * n_harm + 1)
    g[0] = 1.0
    g[1::2] = 2.0
    return g


def _raw_normal_grid(coeffs: np.ndarray, m: int):
    grid = eval_on_grid(coeffs, m)
    a = grid + s_grid(m)
    return np.cos(a), np.sin(a)


def normal_frame(theta: ZRShape, m: int = DEFAULT_GRID):
    """Orthonormal pair spanning the normal directions of the closure constraint.

    The two generating functions are cos(theta(s)+s) and sin(theta(s)+s),
    truncated to the working harmonics and Gram-Schmidt orthonormalized.
    Returns a pair of coefficient vectors.
    """
    cg, sg = _raw_normal_grid(theta.coeffs, m)
    v1 = coeffs_from_grid(cg, theta.N)
    v2 = coeffs_from_grid(sg, theta.N)
    n1 = norm_raw(v1)
    if n1 <= 1e-12:
        raise NumericalError("degenerate normal frame: first direction vanishes")
    w1 = v1 / n1
    v2p = v2 - inner_raw(v2, w1) * w1
    n2 = norm_raw(v2p)
    if n2 <= 1e-12:
        raise NumericalError("degenerate normal frame: directions are parallel")
    return w1, v2p / n2


def constraint_frame(points: np.ndarray, m: int = DEFAULT_GRID):
    """Orthonormal (u1, u2) spanning the closure-normal directions inside the
    x0-constraint plane.  Batched over leading axes.

    Together with the constant g direction this spans the full orthogonal
    complement of the tangent spaces, which is what the transport integrator
    needs: with g constant its exclusion term vanishes identically.
    """
    c = np.asarray(points, dtype=float)
    n_harm = (c.shape[-1] - 1) // 2
    g = g_vector(n_harm)
    gg = 2.0 * n_harm + 1.0
    cg, sg = _raw_normal_grid(c, m)
    v1 = coeffs_from_grid(cg, n_harm)
    v2 = coeffs_from_grid(sg, n_harm)
    v1 = v1 - (inner_raw(v1, np.broadcast_to(g, c.shape)) / gg)[..., None] * g
    v2 = v2 - (inner_raw(v2, np.broadcast_to(g, c.shape)) / gg)[..., None] * g
    n1 = norm_raw(v1)
    if np.any(n1 <= 1e-12):
        raise NumericalError("degenerate constraint frame")
    u1 = v1 / n1[..., None]
    v2 = v2 - inner_raw(v2, u1)[..., None] * u1
    n2 = norm_raw(v2)
    if np.any(n2 <= 1e-12):
        raise NumericalError("degenerate constraint frame")
    return u1, v2 / n2[..., None]


def _project_tangent_raw(points: np.ndarray, vecs: np.ndarray,
                         m: int = DEFAULT_GRID) -> np.ndarray:
    c = np.asarray(points, dtype=float)
    v = np.asarray(vecs, dtype=float)
    n_harm = (c.shape[-1] - 1) // 2
    g = g_vector(n_harm)
    ghat = g / np.sqrt(2.0 * n_harm + 1.0)
    u1, u2 = constraint_frame(c, m)
    out = v - inner_raw(v, np.broadcast_to(ghat, v.shape))[..., None] * ghat
    out = out - inner_raw(out, u1)[..., None] * u1
    out = out - inner_raw(out, u2)[..., None] * u2
    return out


def project_tangent(theta: ZRShape, v, m: int = DEFAULT_GRID) -> ZRTangent:
    """Orthogonal projection onto the tangent space at theta.

    The result is exactly orthogonal to both normal-frame directions and
    satisfies the x0 linear constraint; the map is idempotent.
    """
    out = _project_tangent_raw(theta.coeffs, _vec(v), m)
    return ZRTangent(theta.N, out, base=theta)


# ---------------------------------------------------------------------------
# quotient structure (initial-point shifts)

def _vertical_pattern(coeffs: np.ndarray) -> np.ndarray:
    """sqrt(2) * sum_n n (y_n d/dx_n - x_n d/dy_n), normalized by the Euclidean
    coefficient norm; no x0 component. Batched."""
    c = np.asarray(coeffs, dtype=float)
    n_harm = (c.shape[-1] - 1) // 2
    n = np.arange(1, n_harm + 1, dtype=float)
    d2 = np.sum(n**2 * (c[..., 1::2] ** 2 + c[..., 2::2] ** 2), axis=-1)
    if np.any(d2 <= 1e-18):
        raise SingularShapeError(
            "vertical direction undefined: shape is (numerically) the circle")
    out = np.zeros_like(c)
    out[..., 1::2] = n * c[..., 2::2]
    out[..., 2::2] = -n * c[..., 1::2]
    return np.sqrt(2.0) * out / np.sqrt(d2)[..., None]


def vertical_direction(theta: ZRShape) -> ZRTangent:
    """Unit vector along the initial-point reparameterization orbit."""
    return ZRTangent(theta.N, _vertical_pattern(theta.coeffs), base=theta)


def vertical_tangent_raw(points: np.ndarray, m: int = DEFAULT_GRID) -> np.ndarray:
    """The vertical direction realized inside the tangent space (projected and
    renormalized).  Batched; used by every quotient-space computation."""
    u = _vertical_pattern(points)
    ut = _project_tangent_raw(points, u, m)
    n = norm_raw(ut)
    if np.any(n <= 1e-6):
        raise SingularShapeError("vertical direction degenerates in the tangent space")
    return ut / np.asarray(n)[..., None]


def horizontal_project(theta: ZRShape, v, m: int = DEFAULT_GRID) -> ZRTangent:
    """Remove the vertical component (and any non-tangent part) of v."""
    w = _project_tangent_raw(theta.coeffs, _vec(v), m)
    uhat = vertical_tangent_raw(theta.coeffs, m)
    w = w - inner_raw(w, uhat) * uhat
    return ZRTangent(theta.N, w, base=theta, horizontal=True)


# ---------------------------------------------------------------------------
# initial-point action

def _rotated_coeffs(coeffs: np.ndarray, s0: float) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    n_harm = (c.shape[-1] - 1) // 2
    n = np.arange(1, n_harm + 1, dtype=float)
    cn, sn = np.cos(n * s0), np.sin(n * s0)
    out = c.copy()
    out[..., 1::2] = c[..., 1::2] * cn + c[..., 2::2] * sn
    out[..., 2::2] = c[..., 2::2] * cn - c[..., 1::2] * sn
    return out


def shift_initial_point(theta: ZRShape, s0: float) -> ZRShape:
    """Move the curve's initial point by s0: theta(.) -> theta(. + s0) - theta(s0).

    Harmonics phase-rotate; the constant is restored so the turning function
    still vanishes at 0.
    """
    out = _rotated_coeffs(theta.coeffs, s0)
    out[..., 0] = -np.sum(out[..., 1::2], axis=-1)
    return theta.with_coeffs(out)


def shift_tangent(v: ZRTangent, s0: float, base: ZRShape | None = None) -> ZRTangent:
    """Phase-rotate a tangent's harmonics by the initial-point shift (x0 untouched)."""
    out = _rotated_coeffs(v.coeffs, s0)
    return ZRTangent(v.N, out, base=base, horizontal=v.horizontal)


def align_initial_point(theta: ZRShape, eta: ZRShape,
                        grid: int = 1024) -> tuple[float, float]:
    """Find the initial-point shift of eta that best matches theta.

    Coarse search on a uniform shift grid, then golden-section refinement.
    Returns (s0, distance) with s0 in [0, 2*pi).
    """
    if theta.N != eta.N:
        raise DimensionMismatchError("truncation orders differ")
    for s in (theta, eta):
        if norm_raw(s.coeffs) < 1e-6:
            raise SingularShapeError("alignment undefined at the circle shape")

    tc, ec = theta.coeffs, eta.coeffs
    n_harm = theta.N
    n = np.arange(1, n_harm + 1, dtype=float)
    ze = ec[1::2] - 1j * ec[2::2]
    zt = tc[1::2] - 1j * tc[2::2]

    def dist2(s0arr):
        s0arr = np.atleast_1d(s0arr)
        rot = ze * np.exp(1j * np.outer(s0arr, n))
        x0 = -np.sum(rot.real, axis=-1)
        d = (x0 - tc[0]) ** 2 + 0.5 * np.sum(np.abs(rot - zt) ** 2, axis=-1)
        return d

    cand = 2.0 * np.pi * np.arange(grid) / grid
    vals = dist2(cand)
    k = int(np.argmin(vals))
    span = 2.0 * np.pi / grid
    a, b = cand[k] - span, cand[k] + span

    # golden section, unimodal on the bracketing interval
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = dist2(c1)[0], dist2(c2)[0]
    while b - a > 1e-12:
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = dist2(c1)[0]
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = dist2(c2)[0]
    s0 = float((a + b) / 2.0) % (2.0 * np.pi)
    return s0, float(np.sqrt(max(dist2(s0)[0], 0.0)))


# ---------------------------------------------------------------------------
# k-fold symmetry

def is_k_symmetric(theta: ZRShape, k: int, tol: float = 1e-9) -> bool:
    """True iff every harmonic not divisible by k is below tol in magnitude."""
    if k < 2:
        raise ValueError("k must be >= 2")
    c = theta.coeffs
    n = np.arange(1, theta.N + 1)
    off = n % k != 0
    mags = np.hypot(c[1::2], c[2::2])
    return bool(np.all(mags[off] <= tol))


def project_k_symmetric(theta: ZRShape, k: int) -> ZRShape:
    """Zero all harmonics not divisible by k, restore x0, re-project closure."""
    if k < 2:
        raise ValueError("k must be >= 2")
    c = theta.coeffs.copy()
    n = np.arange(1, theta.N + 1)
    off = n % k != 0
    c[1::2][off] = 0.0
    c[2::2][off] = 0.0
    c[0] = -np.sum(c[1::2])
    return project_to_sigma(theta.with_coeffs(c))


# ---------------------------------------------------------------------------
# serialization

def shape_to_dict(theta: ZRShape) -> dict:
    return {
        "N": theta.N,
        "x0": float(theta.coeffs[0]),
        "xy": [[float(x), float(y)] for x, y in
               zip(theta.coeffs[1::2], theta.coeffs[2::2])],
        "length": float(theta.length),
        "base_angle": float(theta.base_angle),
    }


def shape_from_dict(d: dict) -> ZRShape:
    n_harm = int(d["N"])
    xy = np.asarray(d["xy"], dtype=float)
    if xy.shape != (n_harm, 2):
        raise DimensionMismatchError(f"expected {n_harm} harmonic pairs")
    c = np.empty(2 * n_harm + 1)
    c[0] = float(d["x0"])
    c[1::2] = xy[:, 0]
    c[2::2] = xy[:, 1]
    return ZRShape(n_harm, c, float(d.get("length", 2.0 * np.pi)),
                   float(d.get("base_angle", 0.0)))


def shape_content_hash(theta: ZRShape) -> str:
    payload = json.dumps(shape_to_dict(theta), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def tangent_to_dict(v: ZRTangent) -> dict:
    d = {
        "N": v.N,
        "x0": float(v.coeffs[0]),
        "xy": [[float(x), float(y)] for x, y in zip(v.coeffs[1::2], v.coeffs[2::2])],
        "horizontal": bool(v.horizontal),
    }
    if v.base is not None:
        d["base"] = shape_content_hash(v.base)
    return d


def tangent_from_dict(d: dict, base: ZRShape | None = None) -> ZRTangent:
    n_harm = int(d["N"])
    xy = np.asarray(d["xy"], dtype=float)
    c = np.empty(2 * n_harm + 1)
    c[0] = float(d["x0"])
    c[1::2] = xy[:, 0]
    c[2::2] = xy[:, 1]
    if base is not None and d.get("base") is not None:
        if shape_content_hash(base) != d["base"]:
            raise DimensionMismatchError("tangent base hash does not match given shape")
    return ZRTangent(n_harm, c, base=base, horizontal=bool(d.get("horizontal", False)))
