"""Kendall shape spaces: pre-shape sphere, Procrustes alignment, horizontal
geodesics and parallel transport in the rotation quotient.

Configurations are k landmarks in R^m; Helmert reduction removes translation
and the Frobenius normalization removes scale, leaving a (k-1) x m matrix of
unit norm.  The rotation group acts on the coordinate side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    AlignmentAmbiguityError,
    DegenerateContourError,
    DimensionMismatchError,
    NumericalError,
)
from .paths import GeodesicPath, TransportResult

_RANK_TOL = 1e-10


@dataclass(frozen=True)
class PreShape:
    """Helmertized, unit-norm landmark configuration: a (k-1) x m matrix."""

    m: int
    mat: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.mat, dtype=float)
        if a.ndim != 2 or a.shape[1] != self.m:
            raise DimensionMismatchError(
                f"expected a (k-1) x {self.m} matrix, got shape {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)

    @property
    def k(self) -> int:
        return self.mat.shape[0] + 1

    @property
    def flat(self) -> np.ndarray:
        return self.mat.ravel()


def helmert_submatrix(k: int) -> np.ndarray:
    """The k x (k-1) sub-Helmert matrix: column j has j entries 1/sqrt(j(j+1))
    followed by -j/sqrt(j(j+1))."""
    if k < 2:
        raise DimensionMismatchError("need at least 2 landmarks")
    h = np.zeros((k, k - 1))
    for j in range(1, k):
        c = 1.0 / math.sqrt(j * (j + 1))
        h[:j, j - 1] = c
        h[j, j - 1] = -j * c
    return h


def helmertize(config: np.ndarray) -> PreShape:
    """Map a raw k x m landmark configuration to its pre-shape."""
    x = np.asarray(config, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DimensionMismatchError("configuration must be a k x m array, k >= 2")
    k, m = x.shape
    reduced = helmert_submatrix(k).T @ x
    scale = np.linalg.norm(reduced)
    if scale <= 1e-12 * max(1.0, np.abs(x).max()):
        raise DegenerateContourError("all landmarks coincide")
    return PreShape(m, reduced / scale)


def unhelmertize(p: PreShape) -> np.ndarray:
    """Centered k x m representative of a pre-shape."""
    return helmert_submatrix(p.k) @ p.mat


def inner_k(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.asarray(a) * np.asarray(b)))


def is_regular(p: PreShape) -> bool:
    """True when the configuration's rank exceeds m-2, so the rotation orbit has
    full dimension and the quotient is a manifold near it."""
    sv = np.linalg.svd(p.mat, compute_uv=False)
    return int(np.sum(sv > _RANK_TOL)) > p.m - 2


# ---------------------------------------------------------------------------
# alignment

def procrustes_align(x: PreShape, y: PreShape):
    """Rotate y to best match x; returns (rotation, aligned PreShape).

    Raises when the optimal rotation is not unique: vanishing cross-covariance,
    or a reflection optimum with tied trailing singular values.
    """
    if x.m != y.m or x.k != y.k:
        raise DimensionMismatchError("pre-shapes have different sizes")
    a = y.mat.T @ x.mat
    if np.linalg.norm(a) <= 1e-12:
        raise AlignmentAmbiguityError("cross-covariance vanishes, any rotation is optimal")
    u, sv, vt = np.linalg.svd(a)
    det_sign = np.linalg.det(u) * np.linalg.det(vt)
    d = np.ones(x.m)
    if det_sign < 0:
        if sv[-1] <= _RANK_TOL or (len(sv) > 1 and sv[-2] - sv[-1] <= _RANK_TOL):
            raise AlignmentAmbiguityError(
                "reflection optimum with tied trailing singular values")
        d[-1] = -1.0
    g = u @ np.diag(d) @ vt
    return g, PreShape(y.m, y.mat @ g)


# ---------------------------------------------------------------------------
# vertical structure

def _skew_generator(m: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((m, m))
    e[i, j] = 1.0
    e[j, i] = -1.0
    return e


def vertical_basis(mat: np.ndarray, order=None) -> list[np.ndarray]:
    """Orthonormal basis of the rotation-orbit directions at a pre-shape point,
    Gram-Schmidt over the generator images in lexicographic (i, j) order."""
    mat = np.asarray(mat, dtype=float)
    m = mat.shape[1]
    pairs = list(combinations(range(m), 2)) if order is None else list(order)
    basis = []
    for i, j in pairs:
        v = mat @ _skew_generator(m, i, j)
        for b in basis:
            v = v - inner_k(v, b) * b
        n = np.linalg.norm(v)
        if n <= _RANK_TOL:
            raise NumericalError(
                "degenerate rotation orbit: configuration is not regular")
        basis.append(v / n)
    return basis


def project_horizontal_flat(m: int, flat_p: np.ndarray, flat_v: np.ndarray) -> np.ndarray:
    """Tangent-and-horizontal projection in flattened coordinates."""
    p = np.asarray(flat_p, dtype=float).reshape(-1, m)
    v = np.asarray(flat_v, dtype=float).reshape(-1, m)
    w = v - inner_k(v, p) * p
    for b in vertical_basis(p):
        w = w - inner_k(w, b) * b
    return w.ravel()


def horizontal_project_k(x: PreShape, w: np.ndarray) -> np.ndarray:
    """Remove sphere-normal and vertical components of w at x."""
    return project_horizontal_flat(x.m, x.flat, np.asarray(w, dtype=float).ravel()
                                   ).reshape(x.mat.shape)


def is_horizontal(x: PreShape, w: np.ndarray, tol: float = 1e-10) -> bool:
    w = np.asarray(w, dtype=float)
    sym = x.mat.T @ w
    return (abs(inner_k(w, x.mat)) <= tol
            and float(np.abs(sym - sym.T).max()) <= tol)


# ---------------------------------------------------------------------------
# geodesics

def geodesic_kendall(x: PreShape, y: PreShape, n_samples: int = 33) -> GeodesicPath:
    """Horizontal great-circle geodesic from x to the aligned position of y."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    _, ya = procrustes_align(x, y)
    c = np.clip(inner_k(x.mat, ya.mat), -1.0, 1.0)
    big_t = float(np.arccos(c))
    if big_t <= 1e-12:
        z = np.zeros_like(x.flat)
        return GeodesicPath("kendall", 0.0, np.zeros(1), x.flat[None, :], z, z, base=x)
    v = (ya.mat - c * x.mat) / math.sin(big_t)
    v /= np.linalg.norm(v)
    ts = np.linspace(0.0, big_t, n_samples)
    pts = (np.cos(ts)[:, None] * x.flat[None, :]
           + np.sin(ts)[:, None] * v.ravel()[None, :])
    v_end = -math.sin(big_t) * x.flat + math.cos(big_t) * v.ravel()
    return GeodesicPath("kendall", big_t, ts, pts, v.ravel(), v_end, base=x)


def exp_kendall(x: PreShape, v: np.ndarray, big_t: float,
                n_samples: int = 33) -> GeodesicPath:
    """Great-circle geodesic with given initial (horizontal) velocity."""
    v = np.asarray(v, dtype=float).reshape(x.mat.shape)
    speed = np.linalg.norm(v)
    if speed == 0.0 or big_t == 0.0:
        z = np.zeros_like(x.flat)
        return GeodesicPath("kendall", 0.0, np.zeros(1), x.flat[None, :], z, z, base=x)
    vh = horizontal_project_k(x, v)
    if np.linalg.norm(vh - v) > 1e-6 * max(speed, 1.0):
        raise ValueError("initial velocity is not horizontal at the base pre-shape")
    vu = vh / np.linalg.norm(vh)
    ts = np.linspace(0.0, big_t, n_samples)
    ang = speed * ts
    pts = (np.cos(ang)[:, None] * x.flat[None, :]
           + np.sin(ang)[:, None] * vu.ravel()[None, :])
    v0 = speed * vu.ravel()
    v_end = speed * (-math.sin(ang[-1]) * x.flat + math.cos(ang[-1]) * vu.ravel())
    return GeodesicPath("kendall", float(big_t), ts, pts, v0, v_end, base=x)


# ---------------------------------------------------------------------------
# parallel transport

def transport_kendall(path: GeodesicPath, w0, steps_per_unit: int = 256,
                      generator_order=None) -> TransportResult:
    """Parallel transport in the shape space (rotation quotient of the sphere).

    Excluded directions along the path: the sphere normal (the point itself)
    and the orthonormalized rotation-orbit directions; each contributes the
    pairing of the vector with its time derivative.  The result does not
    depend on the Gram-Schmidt ordering of the orbit directions.
    """
    base = path.base
    if not isinstance(base, PreShape):
        raise ValueError("transport_kendall needs a landmark-space path")
    m = base.m
    w = np.asarray(w0, dtype=float).ravel().copy()
    if w.shape != (path.points.shape[1],):
        raise DimensionMismatchError("vector size does not match the path")
    w0_norm = float(np.linalg.norm(w))
    if path.n_samples < 2 or path.T == 0.0 or w0_norm == 0.0:
        return TransportResult(w, 0.0, 0)

    d = np.diff(path.points, axis=0)
    length = float(np.sum(np.sqrt(np.sum(d * d, axis=1))))
    n_steps = max(8, math.ceil(steps_per_unit * max(length, 1e-12)))
    h = path.T / n_steps
    eps = 1e-6

    nodes = np.linspace(0.0, path.T, n_steps + 1)
    times = np.empty(2 * n_steps + 1)
    times[0::2] = nodes
    times[1::2] = nodes[:-1] + h / 2.0

    p0 = path.point_at(times)
    pp = path.point_at(times + eps)
    pm = path.point_at(times - eps)

    def frames(flat_pts):
        rows = flat_pts.reshape(len(flat_pts), -1, m)
        out = [flat_pts / np.linalg.norm(flat_pts, axis=1, keepdims=True)]
        pairs = (list(combinations(range(m), 2)) if generator_order is None
                 else list(generator_order))
        basis = []
        for i, j in pairs:
            v = (rows @ _skew_generator(m, i, j)).reshape(len(flat_pts), -1)
            for b in basis:
                v = v - np.sum(v * b, axis=1, keepdims=True) * b
            n = np.linalg.norm(v, axis=1, keepdims=True)
            if np.any(n <= _RANK_TOL):
                raise NumericalError("degenerate rotation orbit along the path")
            basis.append(v / n)
        out.extend(basis)
        return out

    f0 = frames(p0)
    fp = frames(pp)
    fm = frames(pm)
    df = [(a - b) / (2.0 * eps) for a, b in zip(fp, fm)]

    def rhs(vec, j):
        out = np.zeros_like(vec)
        for fr, dfr in zip(f0, df):
            out -= np.dot(vec, dfr[j]) * fr[j]
        return out

    def project(vec, j):
        out = vec
        for fr in f0:
            out = out - np.dot(out, fr[j]) * fr[j]
        return out

    w_proj = project(w, 0)
    if np.linalg.norm(w_proj - w) > 1e-6 * max(w0_norm, 1.0):
        raise ValueError("initial vector is not horizontal at the path start")
    w = w_proj * (w0_norm / np.linalg.norm(w_proj))

    log_drift = 0.0
    residuals = np.empty(n_steps)
    for k in range(n_steps):
        j0, jm, j1 = 2 * k, 2 * k + 1, 2 * k + 2
        norm_before = float(np.linalg.norm(w))
        k1 = rhs(w, j0)
        k2 = rhs(w + 0.5 * h * k1, jm)
        k3 = rhs(w + 0.5 * h * k2, jm)
        k4 = rhs(w + h * k3, j1)
        w_new = w + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        w_proj = project(w_new, j1)
        residuals[k] = float(np.linalg.norm(w_proj - w_new))
        norm_after = float(np.linalg.norm(w_proj))
        if norm_after == 0.0:
            raise NumericalError("transported vector collapsed to zero",
                                 residuals[:k + 1].tolist())
        log_drift += math.log(norm_after / norm_before)
        w = w_proj * (norm_before / norm_after)

    drift = abs(math.expm1(log_drift)) * w0_norm
    if drift > 1e-4:
        raise NumericalError(
            f"transport norm drift {drift:.3e} exceeds 1e-4; refine the steps",
            residuals.tolist())
    return TransportResult(w, drift, n_steps, residuals)


def transport_kendall_m2(path: GeodesicPath, w0) -> TransportResult:
    """Closed-form planar-landmark transport along a unit-speed horizontal
    great circle."""
    base = path.base
    if not isinstance(base, PreShape) or base.m != 2:
        raise DimensionMismatchError("closed form requires a planar landmark path")
    if path.n_samples < 2 or path.T == 0.0:
        return TransportResult(np.asarray(w0, dtype=float).ravel().copy(), 0.0, 0)
    x = path.points[0].reshape(-1, 2)
    v = path.v0.reshape(-1, 2)
    speed = np.linalg.norm(v)
    v = v / speed
    e12 = _skew_generator(2, 0, 1)
    w = np.asarray(w0, dtype=float).reshape(-1, 2)
    a = inner_k(w, v)
    b = inner_k(w, v @ e12)
    t_end = path.T * speed
    gdot = -math.sin(t_end) * x + math.cos(t_end) * v
    w_end = (w - a * v - b * (v @ e12) + a * gdot + b * (gdot @ e12))
    return TransportResult(w_end.ravel(), 0.0, 0)


# ---------------------------------------------------------------------------
# serialization

def preshape_to_dict(p: PreShape) -> dict:
    return {"m": p.m, "k": p.k,
            "mat": [[float(v) for v in row] for row in p.mat]}


def preshape_from_dict(d: dict) -> PreShape:
    mat = np.asarray(d["mat"], dtype=float)
    p = PreShape(int(d["m"]), mat)
    if p.k != int(d["k"]):
        raise DimensionMismatchError("stored k does not match the matrix shape")
    return p
