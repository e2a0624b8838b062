"""Gaussian MAC with a cognitive relay: full, partial and finite-link cognition,
the orthogonal-channel polytope, and the maximum relay rate that leaves the
primary users' rates untouched.

Channel: Y = X1 + X2 + X3 + Z with unit-variance noise and average powers
P1, P2, P3 (linear scale).
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Literal

import numpy as np

from .numerics import (
    DEFAULT_BOUNDARY_POINTS,
    UNLIMITED,
    RegionBoundary,
    clamp_rate,
    empty_boundary,
    half_log2,
    maximize_on_interval,
    maximize_on_simplex,
    pentagon_heights,
    search_frontier,
    search_max,
)


@dataclass(frozen=True)
class CogScenario:
    P1: float
    P2: float
    P3: float

    def __post_init__(self):
        for name in ("P1", "P2", "P3"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class RelaySplit:
    """Fractions of relay power spent helping source 1 (a3p) and source 2 (a3pp)."""

    a3p: float
    a3pp: float

    def __post_init__(self):
        if not (0 <= self.a3p <= 1 and 0 <= self.a3pp <= 1 and self.a3p + self.a3pp <= 1 + 1e-12):
            raise ValueError(f"invalid relay split ({self.a3p}, {self.a3pp})")

    @property
    def private(self) -> float:
        return max(0.0, 1.0 - self.a3p - self.a3pp)


@dataclass(frozen=True)
class RateTriple:
    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        if min(self.r1, self.r2, self.r3) < 0:
            raise ValueError("rates must be non-negative")


@dataclass(frozen=True)
class FullCognitiveBounds:
    r3: float
    r1_r3: float
    r2_r3: float
    sum: float


@dataclass(frozen=True)
class PartialCognitiveBounds:
    r2: float
    r3: float
    r1_r3: float
    r2_r3: float
    sum: float


@dataclass(frozen=True)
class FiniteCapacityBounds:
    r1: float
    r2: float
    r3: float
    r1_r2: float
    r1_r3: float
    r2_r3: float
    sum: float


# --------------------------------------------------------------------------
# full cognition
# --------------------------------------------------------------------------

def _full_terms(s: CogScenario, a3p, a3pp):
    P1, P2, P3 = s.P1, s.P2, s.P3
    a3p = np.asarray(a3p, dtype=float)
    a3pp = np.asarray(a3pp, dtype=float)
    priv = np.maximum(1.0 - a3p - a3pp, 0.0)
    c1 = 2.0 * np.sqrt(a3p * P1 * P3)
    c2 = 2.0 * np.sqrt(a3pp * P2 * P3)
    r3 = half_log2(1.0 + priv * P3)
    r13 = half_log2(1.0 + P1 + (1.0 - a3pp) * P3 + c1)
    r23 = half_log2(1.0 + P2 + (1.0 - a3p) * P3 + c2)
    tot = half_log2(1.0 + P1 + P2 + P3 + c1 + c2)
    return r3, r13, r23, tot


def full_cognitive_bounds(s: CogScenario, split: RelaySplit) -> FullCognitiveBounds:
    """Right-hand sides of the full-cognition region for one relay split."""
    r3, r13, r23, tot = _full_terms(s, split.a3p, split.a3pp)
    return FullCognitiveBounds(float(r3), float(r13), float(r23), float(tot))


def _axis(r1max: float, points: int) -> np.ndarray:
    return np.linspace(0.0, max(r1max, 0.0), points)


def mac_pentagon(s: CogScenario) -> tuple[float, float, float]:
    """No-relay MAC bounds (R1, R2, R1+R2)."""
    return (
        float(half_log2(1 + s.P1)),
        float(half_log2(1 + s.P2)),
        float(half_log2(1 + s.P1 + s.P2)),
    )


def full_cognitive_boundary(
    s: CogScenario,
    r3: float = 0.0,
    grid_n: int = 257,
    points: int = DEFAULT_BOUNDARY_POINTS,
    axis_grid=None,
) -> RegionBoundary:
    """(R1, R2) frontier of the full-cognition region at a fixed relay rate.

    At ``r3 == 0`` only splits with a3p + a3pp = 1 are swept (they are optimal
    there); otherwise the full simplex is searched.
    """
    if r3 < 0:
        raise ValueError("r3 must be >= 0")
    meta = {"region": "full-cognition capacity", "P": (s.P1, s.P2, s.P3)}
    if r3 > float(half_log2(1 + s.P3)) + 1e-15:
        return empty_boundary(axis_grid if axis_grid is not None else [0.0], r3, "full", meta)

    def pent(params):
        a3p, a3pp = params[:, 0], params[:, 1]
        t3, t13, t23, tot = _full_terms(s, a3p, a3pp)
        # infeasible relay rate: push bounds below zero so the member drops out
        bad = t3 < r3
        a = np.where(bad, -np.inf, t13 - r3)
        return a, t23 - r3, tot - r3

    if r3 == 0:
        t = np.linspace(0.0, 1.0, grid_n)
        params = np.stack([t, 1.0 - t], axis=1)
        return _sweep_boundary(pent, params, r3, "full", meta, points, axis_grid)

    def feasible(p):
        return p[:, 0] + p[:, 1] <= 1.0 + 1e-12

    return _search_boundary(pent, 2, r3, "full", meta, points, axis_grid, feasible=feasible,
                            coarse_n=33)


def _sweep_boundary(pent, params, r3, label, meta, points, axis_grid) -> RegionBoundary:
    """Exhaustive union over an explicit parameter list."""
    a, b, s = pent(params)
    ext = np.minimum(a, s)
    ok = np.isfinite(ext) & (ext >= 0) & (b >= 0)
    if not ok.any():
        return empty_boundary(axis_grid if axis_grid is not None else [0.0], r3, label, meta)
    axis = np.asarray(axis_grid, dtype=float) if axis_grid is not None else _axis(ext[ok].max(), points)
    h = pentagon_heights(a, b, s, axis).max(axis=0)
    return RegionBoundary(axis, np.where(np.isfinite(h), h, np.nan), r3, label, meta)


def _search_boundary(pent, dim, r3, label, meta, points, axis_grid, feasible=None,
                     coarse_n=17, refine_rounds=3, extra=None) -> RegionBoundary:
    def r1_extent(p):
        a, b, s = pent(p)
        v = np.minimum(a, s)
        return np.where(b >= 0, v, -np.inf)

    p_ext, v_ext = search_max(r1_extent, dim, coarse_n=coarse_n, refine_rounds=refine_rounds,
                              feasible=feasible)
    if not np.isfinite(v_ext) or v_ext < 0:
        return empty_boundary(axis_grid if axis_grid is not None else [0.0], r3, label, meta)
    axis = np.asarray(axis_grid, dtype=float) if axis_grid is not None else _axis(v_ext, points)
    seeds = p_ext[None, :] if extra is None else np.vstack([p_ext[None, :], extra])
    h, _ = search_frontier(pent, dim, axis, coarse_n=coarse_n, refine_rounds=refine_rounds,
                           feasible=feasible, extra=seeds)
    return RegionBoundary(axis, np.where(np.isfinite(h), h, np.nan), r3, label, meta)


# --------------------------------------------------------------------------
# partial cognition (relay knows W1 only)
# --------------------------------------------------------------------------

def _partial_terms(s: CogScenario, rho):
    P1, P2, P3 = s.P1, s.P2, s.P3
    rho = np.asarray(rho, dtype=float)
    c = 2.0 * rho * math.sqrt(P1 * P3)
    r2 = half_log2(1.0 + P2) + 0.0 * rho
    r3 = half_log2(1.0 + (1.0 - rho**2) * P3)
    r13 = half_log2(1.0 + P1 + P3 + c)
    r23 = half_log2(1.0 + P2 + (1.0 - rho**2) * P3)
    tot = half_log2(1.0 + P1 + P2 + P3 + c)
    return r2, r3, r13, r23, tot


def partial_cognitive_bounds(s: CogScenario, rho: float) -> PartialCognitiveBounds:
    """Right-hand sides of the partial-cognition region; ``rho`` is the
    correlation coefficient between X1 and X3."""
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return PartialCognitiveBounds(*(float(v) for v in _partial_terms(s, rho)))


def partial_cognitive_boundary(
    s: CogScenario,
    r3: float = 0.0,
    grid_n: int = 1025,
    points: int = DEFAULT_BOUNDARY_POINTS,
    axis_grid=None,
) -> RegionBoundary:
    if r3 < 0:
        raise ValueError("r3 must be >= 0")
    meta = {"region": "partial-cognition capacity", "P": (s.P1, s.P2, s.P3)}

    def pent(rhos):
        t2, t3, t13, t23, tot = _partial_terms(s, rhos)
        a = np.where(t3 < r3, -np.inf, t13 - r3)
        return a, np.minimum(t2, t23 - r3), tot - r3

    # rho = 1 alone is optimal when the relay carries no private rate
    rhos = np.array([1.0]) if r3 == 0 else np.linspace(0.0, 1.0, grid_n)
    return _sweep_boundary(pent, rhos, r3, "partial", meta, points, axis_grid)


# --------------------------------------------------------------------------
# cognition through finite-capacity links, jointly Gaussian inputs
# --------------------------------------------------------------------------

def _finite_terms(s: CogScenario, c1, c2, a3p, a3pp, a1, a2):
    """Seven bounds with X_j = sqrt(a_j P_j) U_j + sqrt((1-a_j) P_j) S_j and
    X3 = sqrt(a3p P3) U1 + sqrt(a3pp P3) U2 + sqrt((1-a3p-a3pp) P3) S3."""
    P1, P2, P3 = s.P1, s.P2, s.P3
    a1, a2, a3p, a3pp = (np.asarray(v, dtype=float) for v in (a1, a2, a3p, a3pp))
    n1 = (1.0 - a1) * P1
    n2 = (1.0 - a2) * P2
    n3 = np.maximum(1.0 - a3p - a3pp, 0.0) * P3
    g1 = (np.sqrt(a1 * P1) + np.sqrt(a3p * P3)) ** 2
    g2 = (np.sqrt(a2 * P2) + np.sqrt(a3pp * P3)) ** 2

    r1 = half_log2(1 + n1) + c1
    r2 = half_log2(1 + n2) + c2
    r3 = half_log2(1 + n3)
    r12 = half_log2(1 + n1 + n2) + c1 + c2
    r13 = np.minimum(half_log2(1 + n1 + n3) + c1, half_log2(1 + n1 + n3 + g1))
    r23 = np.minimum(half_log2(1 + n2 + n3) + c2, half_log2(1 + n2 + n3 + g2))
    base = 1 + n1 + n2 + n3
    tot = np.minimum.reduce([
        half_log2(base) + c1 + c2,
        half_log2(base + g2) + c1,
        half_log2(base + g1) + c2,
        half_log2(base + g1 + g2),
    ])
    return r1, r2, r3, r12, r13, r23, tot


def finite_capacity_bounds(
    s: CogScenario,
    c1: float,
    c2: float,
    split: RelaySplit,
    a1: float,
    a2: float,
) -> FiniteCapacityBounds:
    """Seven bounds of the finite-link cognition region under jointly Gaussian
    inputs. ``c1``/``c2`` may be :data:`UNLIMITED`. This is an achievable
    (Gaussian-input) region, not a proven capacity region."""
    if c1 < 0 or c2 < 0:
        raise ValueError("link capacities must be >= 0")
    if not (0 <= a1 <= 1 and 0 <= a2 <= 1):
        raise ValueError("a1, a2 must lie in [0, 1]")
    vals = _finite_terms(s, c1, c2, split.a3p, split.a3pp, a1, a2)
    return FiniteCapacityBounds(*(float(v) for v in vals))


def finite_capacity_boundary(
    s: CogScenario,
    c1: float,
    c2: float,
    r3: float = 0.0,
    points: int = DEFAULT_BOUNDARY_POINTS,
    axis_grid=None,
    coarse_n: int = 11,
    refine_rounds: int = 3,
) -> RegionBoundary:
    """Frontier over (a1, a2, a3p, a3pp); labelled achievable-with-Gaussian-inputs."""
    if r3 < 0:
        raise ValueError("r3 must be >= 0")
    meta = {"region": "finite-link cognition, achievable with Gaussian inputs",
            "P": (s.P1, s.P2, s.P3), "C": (c1, c2)}

    def pent(p):
        a1, a2, a3p, a3pp = p[:, 0], p[:, 1], p[:, 2], p[:, 3]
        t1, t2, t3, t12, t13, t23, tot = _finite_terms(s, c1, c2, a3p, a3pp, a1, a2)
        a = np.where(t3 < r3, -np.inf, np.minimum(t1, t13 - r3))
        return a, np.minimum(t2, t23 - r3), np.minimum(t12, tot - r3)

    def feasible(p):
        return p[:, 2] + p[:, 3] <= 1.0 + 1e-12

    return _search_boundary(pent, 4, r3, "finite-links", meta, points, axis_grid,
                            feasible=feasible, coarse_n=coarse_n, refine_rounds=refine_rounds)


# --------------------------------------------------------------------------
# orthogonal channels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OrthogonalPolytope:
    """{R3 <= C3, R1+R2 <= C1+C2, R2+R3 <= C2+C3, R1+R2+R3 <= C1+C2+C3}, rates >= 0."""

    r3: float
    r1_r2: float
    r2_r3: float
    sum: float

    def contains(self, r1: float, r2: float, r3: float, tol: float = 0.0) -> bool:
        if min(r1, r2, r3) < -tol:
            return False
        return (
            r3 <= self.r3 + tol
            and r1 + r2 <= self.r1_r2 + tol
            and r2 + r3 <= self.r2_r3 + tol
            and r1 + r2 + r3 <= self.sum + tol
        )


def orthogonal_polytope(c1: float, c2: float, c3: float) -> OrthogonalPolytope:
    if min(c1, c2, c3) < 0:
        raise ValueError("capacities must be >= 0")
    return OrthogonalPolytope(c3, c1 + c2, c2 + c3, c1 + c2 + c3)


# --------------------------------------------------------------------------
# maximum unobtrusive relay rate
# --------------------------------------------------------------------------

class InfeasibleRates(ValueError):
    pass


def in_mac_region(s: CogScenario, r1: float, r2: float, tol: float = 1e-12) -> bool:
    b1, b2, b12 = mac_pentagon(s)
    return r1 >= 0 and r2 >= 0 and r1 <= b1 + tol and r2 <= b2 + tol and r1 + r2 <= b12 + tol


def max_unobtrusive_r3(
    s: CogScenario,
    r1: float,
    r2: float,
    mode: Literal["full", "partial"] = "full",
    grid_n: int = 64,
    refine_rounds: int = 4,
) -> float:
    """Largest relay rate R3 such that (r1, r2, R3) is still in the region.

    (r1, r2) must lie in the no-relay MAC region.
    """
    if not in_mac_region(s, r1, r2):
        raise InfeasibleRates(f"({r1}, {r2}) is outside the no-relay MAC region")

    if mode == "full":
        def slack(a3p, a3pp):
            t3, t13, t23, tot = _full_terms(s, a3p, a3pp)
            return np.minimum.reduce([t3, t13 - r1, t23 - r2, tot - r1 - r2])

        _, best = maximize_on_simplex(slack, grid_n, refine_rounds)
    elif mode == "partial":
        def slack1(rho):
            t2, t3, t13, t23, tot = _partial_terms(s, rho)
            v = np.minimum.reduce([t3, t13 - r1, t23 - r2, tot - r1 - r2])
            return np.where(r2 <= t2 + 1e-12, v, -np.inf)

        _, best = maximize_on_interval(slack1, grid_n * 4, refine_rounds)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(clamp_rate(best))


__all__ = [
    "CogScenario", "RelaySplit", "RateTriple", "UNLIMITED",
    "FullCognitiveBounds", "PartialCognitiveBounds", "FiniteCapacityBounds",
    "full_cognitive_bounds", "full_cognitive_boundary",
    "partial_cognitive_bounds", "partial_cognitive_boundary",
    "finite_capacity_bounds", "finite_capacity_boundary",
    "OrthogonalPolytope", "orthogonal_polytope",
    "InfeasibleRates", "in_mac_region", "mac_pentagon", "max_unobtrusive_r3",
]
