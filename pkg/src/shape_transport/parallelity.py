"""Parallelity of deformations: transplant a growth velocity onto another base
shape by parallel transport and quantify directional agreement.

rho is the absolute cosine between coefficient vectors; mu calibrates it
against the distribution of the angle between two uniformly random directions
in n dimensions, so 0.5 is chance level and 1 is perfect alignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DimensionMismatchError
from .paths import GeodesicPath, TransportResult
from .zr_space import ZRShape

_HALF_PERIOD_CACHE: dict[int, float] = {}


def rho(v, w) -> float:
    """Absolute cosine of the angle between two coefficient vectors
    (plain Euclidean pairing of the flattened entries)."""
    a = np.asarray(v, dtype=float).ravel()
    b = np.asarray(w, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatchError("vectors have different lengths")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("rho is undefined for a zero vector")
    return float(min(abs(np.dot(a, b)) / (na * nb), 1.0))


def _sin_power(n: int, upper: float) -> float:
    val, _ = quad(lambda t: np.sin(t) ** (n - 2), 0.0, upper,
                  epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def mu(rho_value: float, n: int, variant: str = "arccos") -> float:
    """Fraction of random direction pairs in n dimensions that are less aligned
    than the observed rho.  variant selects the upper integration limit:
    the angle itself ("arccos") or its square root ("sqrt_arccos")."""
    if n < 3:
        raise ValueError("mu needs ambient dimension n >= 3")
    if not -1e-9 <= rho_value <= 1.0 + 1e-9:
        raise ValueError(f"rho must lie in [0, 1], got {rho_value}")
    r = float(np.clip(rho_value, 0.0, 1.0))
    angle = float(np.arccos(r))
    if variant == "sqrt_arccos":
        upper = float(np.sqrt(angle))
    elif variant == "arccos":
        upper = angle
    else:
        raise ValueError(f"unknown mu variant {variant!r}")
    if n not in _HALF_PERIOD_CACHE:
        _HALF_PERIOD_CACHE[n] = _sin_power(n, float(np.pi))
    return 1.0 - _sin_power(n, upper) / _HALF_PERIOD_CACHE[n]


# ---------------------------------------------------------------------------
# transplant workflow

@dataclass
class TransplantOutcome:
    """A growth deformation moved to another base shape."""

    connecting: GeodesicPath
    transported: np.ndarray
    transport: TransportResult


def transplant_growth(growth: GeodesicPath, target) -> TransplantOutcome:
    """Move growth.v0 to the target base along the connecting geodesic, using
    the transport matching the path's space tag."""
    if growth.space == "kendall":
        from .kendall import PreShape, geodesic_kendall, transport_kendall
        if not isinstance(target, PreShape):
            raise DimensionMismatchError("kendall growth needs a PreShape target")
        connecting = geodesic_kendall(growth.base, target, n_samples=129)
        result = (transport_kendall(connecting, growth.v0)
                  if connecting.n_samples > 1
                  else TransportResult(np.array(growth.v0), 0.0, 0))
        return TransplantOutcome(connecting, result.w_end, result)

    if not isinstance(target, ZRShape):
        raise DimensionMismatchError("contour-space growth needs a ZRShape target")
    from .zr_geodesic import geodesic_between, geodesic_between_invariant
    from .zr_transport import transport_invariant, transport_sigma
    if growth.space == "zr_invariant":
        connecting = geodesic_between_invariant(growth.base, target)
        transport = transport_invariant
    else:
        connecting = geodesic_between(growth.base, target)
        transport = transport_sigma
    result = (transport(connecting, growth.v0) if connecting.n_samples > 1
              else TransportResult(np.array(growth.v0), 0.0, 0))
    return TransplantOutcome(connecting, result.w_end, result)


def compare_growth(growth_a: GeodesicPath, growth_b: GeodesicPath,
                   n: int | None = None, mu_variant: str = "arccos",
                   pair=("a", "b")):
    """Transplant growth_a onto growth_b's base and compare directions.

    Returns (report dict, TransplantOutcome); n defaults to the coefficient
    count of the compared vectors.
    """
    if growth_a.space != growth_b.space:
        raise DimensionMismatchError("growth paths live in different spaces")
    outcome = transplant_growth(growth_a, growth_b.base)
    r = rho(outcome.transported, growth_b.v0)
    if n is None:
        n = int(np.asarray(growth_b.v0).size)
    report = {
        "pair": [str(pair[0]), str(pair[1])],
        "rho": r,
        "mu": mu(r, n, mu_variant),
        "n": n,
        "mu_variant": mu_variant,
    }
    return report, outcome
