"""Reference polygon contours used by the demos and tests, plus a
self-intersection check for reconstructed curves.

The three demo shapes are built with unit edges so their vertices sit at
uniform arc-length fractions, which makes the landmark correspondence with
the Kendall side immediate.
"""

from __future__ import annotations

import numpy as np

from .contour_io import Contour


def square_contour(side: float = 1.0) -> Contour:
    pts = side * np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    return Contour(pts, "square")


def rectangle_sixgon() -> Contour:
    """2:1 rectangle traversed as six unit edges, initial point at a corner."""
    pts = np.array([[0, 0], [1, 0], [2, 0], [2, 1], [1, 1], [0, 1]], dtype=float)
    return Contour(pts, "rectangle")


def rectangle_sixgon_shifted() -> Contour:
    """The same rectangle with the initial point advanced by one vertex."""
    pts = np.roll(rectangle_sixgon().points, -1, axis=0)
    return Contour(pts, "rectangle_shifted")


def hexagon_sixgon() -> Contour:
    """Regular hexagon with unit edges, first edge along +x."""
    angles = np.pi / 3.0 * np.arange(6)
    steps = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    pts = np.concatenate([[[0.0, 0.0]], np.cumsum(steps, axis=0)[:-1]])
    return Contour(pts, "hexagon")


def circle_contour(n_vertices: int = 256, radius: float = 1.0) -> Contour:
    t = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    return Contour(radius * np.stack([np.cos(t), np.sin(t)], axis=1), "circle")


def self_intersects(points: np.ndarray, rel_tol: float = 1e-9) -> bool:
    """True when any two non-adjacent edges of the closed polyline cross."""
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 4:
        return False
    q = np.roll(p, -1, axis=0)
    d = q - p
    span = float(np.ptp(p, axis=0).max()) or 1.0
    tol = rel_tol * span

    def cross(o, a, b):
        return ((a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1])
                - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0]))

    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
    upper = j > i

    p_i, q_i = p[:, None, :], q[:, None, :]
    p_j, q_j = p[None, :, :], q[None, :, :]
    d1 = cross(p_i, q_i, p_j)
    d2 = cross(p_i, q_i, q_j)
    d3 = cross(p_j, q_j, p_i)
    d4 = cross(p_j, q_j, q_i)
    crossing = ((d1 * d2 < -tol * tol) & (d3 * d4 < -tol * tol)
                & upper & ~adjacent)
    return bool(np.any(crossing))
