"""Geodesic path and transport result containers shared by both geometries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DimensionMismatchError

SPACE_TAGS = ("zr_sigma", "zr_invariant", "kendall")


@dataclass
class GeodesicPath:
    """Discretely sampled constant-speed geodesic.

    points holds one flattened coefficient row per sample time; base is the
    ZRShape or PreShape the path starts from and carries any metadata needed
    to interpret the rows.
    """

    space: str
    T: float
    ts: np.ndarray
    points: np.ndarray
    v0: np.ndarray
    v_end: np.ndarray
    base: Any = None

    def __post_init__(self):
        if self.space not in SPACE_TAGS:
            raise ValueError(f"unknown space tag {self.space!r}")
        self.ts = np.asarray(self.ts, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        self.v0 = np.asarray(self.v0, dtype=float)
        self.v_end = np.asarray(self.v_end, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.ts.shape[0]:
            raise DimensionMismatchError("sample times and points disagree")
        self._spline = None
        self._dspline = None

    @property
    def n_samples(self) -> int:
        return len(self.ts)

    def _ensure_spline(self):
        if self._spline is None:
            if len(self.ts) < 2:
                raise ValueError("constant path has no spline")
            self._spline = CubicSpline(self.ts, self.points, axis=0)
            self._dspline = self._spline.derivative()

    def point_at(self, t) -> np.ndarray:
        if len(self.ts) < 2:
            return np.array(self.points[0])
        self._ensure_spline()
        return self._spline(t)

    def velocity_at(self, t) -> np.ndarray:
        """Spline derivative, projected as appropriate for the space tag."""
        if len(self.ts) < 2:
            return np.zeros_like(self.points[0])
        self._ensure_spline()
        raw = self._dspline(t)
        p = self.point_at(t)
        if self.space == "kendall":
            from .kendall import project_horizontal_flat
            return project_horizontal_flat(self.base.m, p, raw)
        from .zr_space import _project_tangent_raw, inner_raw, vertical_tangent_raw
        out = _project_tangent_raw(p, raw)
        if self.space == "zr_invariant":
            uhat = vertical_tangent_raw(p)
            out = out - inner_raw(out, uhat) * uhat
        return out

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(
            space=self.space,
            T=self.T,
            ts=self.T - self.ts[::-1],
            points=self.points[::-1].copy(),
            v0=-self.v_end,
            v_end=-self.v0,
            base=self._end_base(),
        )

    def _end_base(self):
        if self.base is None:
            return None
        from .zr_space import ZRShape
        if isinstance(self.base, ZRShape):
            return self.base.with_coeffs(self.points[-1])
        from .kendall import PreShape
        return PreShape(self.base.m, self.points[-1].reshape(self.base.k - 1,
                                                             self.base.m))

    def to_dict(self) -> dict:
        if self.base is None:
            raise ValueError("cannot serialize a path without its base")
        from .zr_space import ZRShape, shape_to_dict
        if isinstance(self.base, ZRShape):
            base_d = shape_to_dict(self.base)
        else:
            from .kendall import preshape_to_dict
            base_d = preshape_to_dict(self.base)
        return {
            "space": self.space,
            "T": float(self.T),
            "base": base_d,
            "v0": [float(x) for x in self.v0],
            "v_end": [float(x) for x in self.v_end],
            "samples": [[float(t)] + [float(x) for x in row]
                        for t, row in zip(self.ts, self.points)],
        }


def path_from_dict(d: dict) -> GeodesicPath:
    base_d = d["base"]
    if "mat" in base_d:
        from .kendall import preshape_from_dict
        base = preshape_from_dict(base_d)
    else:
        from .zr_space import shape_from_dict
        base = shape_from_dict(base_d)
    rows = np.asarray(d["samples"], dtype=float)
    return GeodesicPath(
        space=d["space"],
        T=float(d["T"]),
        ts=rows[:, 0],
        points=rows[:, 1:],
        v0=np.asarray(d["v0"], dtype=float),
        v_end=np.asarray(d["v_end"], dtype=float),
        base=base,
    )


@dataclass
class TransportResult:
    """Outcome of parallel transport along a path.

    norm_drift is the integrator's accumulated norm error measured before the
    final rescaling; step_residuals records the size of the per-step
    re-projection corrections.
    """

    w_end: np.ndarray
    norm_drift: float
    steps: int
    step_residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def to_dict(self) -> dict:
        return {
            "w_end": [float(x) for x in np.asarray(self.w_end).ravel()],
            "norm_drift": float(self.norm_drift),
            "steps": int(self.steps),
        }
