"""Shared numerical primitives: entropy, Gaussian capacity, dB conversion,
deterministic grid optimizers and Pareto-frontier extraction.

All rates are in bits per channel use (log base 2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Sequence

import numpy as np

# Stand-in for an infinite link capacity or an infinite relay SNR. Using a
# true infinity (not a large float) makes min-expressions collapse exactly.
UNLIMITED = math.inf

DEFAULT_GRID_N = 64
DEFAULT_REFINE_ROUNDS = 4
WINDOW_SHRINK = 4.0
DEFAULT_BOUNDARY_POINTS = 201


def binary_entropy(p):
    """Binary entropy Hb(p) in bits, with 0 log 0 = 0. Accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any((arr < 0) | (arr > 1)):
        raise ValueError(f"probability outside [0, 1]: {p!r}")
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(arr > 0, arr * np.log2(arr), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return float(h) if h.ndim == 0 else h


def awgn_capacity(snr):
    """0.5 * log2(1 + snr); snr must be non-negative (inf gives inf)."""
    arr = np.asarray(snr, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError(f"snr must be >= 0, got {snr!r}")
    c = 0.5 * np.log2(1.0 + arr)
    return float(c) if c.ndim == 0 else c


def half_log2(x):
    """0.5 * log2(x) without domain checks; non-positive arguments map to -inf.

    Used inside region formulas whose arguments can legitimately fall below 1
    (negative rates) or reach 0 before the final clamp.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(arr > 0, 0.5 * np.log2(np.where(arr > 0, arr, 1.0)), -np.inf)
    return float(out) if out.ndim == 0 else out


def db_to_linear(db):
    arr = np.asarray(db, dtype=float)
    out = 10.0 ** (arr / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


def clamp_rate(r):
    """Reporting-boundary clamp: negative rates become 0."""
    arr = np.maximum(np.asarray(r, dtype=float), 0.0)
    return float(arr) if arr.ndim == 0 else arr


# --------------------------------------------------------------------------
# deterministic grid optimizers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    grid_n: int = DEFAULT_GRID_N
    refine_rounds: int = DEFAULT_REFINE_ROUNDS
    shrink: float = WINDOW_SHRINK

    def __post_init__(self):
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if self.shrink <= 1:
            raise ValueError("shrink must be > 1")


def _evaluate(f, pts: np.ndarray, feasible) -> np.ndarray:
    vals = np.asarray(f(*pts.T), dtype=float)
    vals = np.broadcast_to(vals, (pts.shape[0],)).copy()
    if feasible is not None:
        vals[~feasible(pts)] = -np.inf
    vals[np.isnan(vals)] = -np.inf
    return vals


def maximize_on_box(
    f: Callable[..., np.ndarray],
    dim: int,
    grid_n: int = DEFAULT_GRID_N,
    refine_rounds: int = DEFAULT_REFINE_ROUNDS,
    feasible: Callable[[np.ndarray], np.ndarray] | None = None,
    shrink: float = WINDOW_SHRINK,
) -> tuple[np.ndarray, float]:
    """Maximize a vectorized ``f(x1, ..., x_dim)`` over ``[0, 1]**dim``.

    A uniform ``grid_n``-per-axis grid is searched first; every refinement
    round then re-grids a window around the incumbent whose width is the
    previous width divided by ``shrink``. The incumbent is always kept, so more
    rounds can never give a worse answer. Points rejected by ``feasible`` (or
    where ``f`` is NaN) are ignored.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    axis = np.linspace(0.0, 1.0, grid_n)
    pts = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    vals = _evaluate(f, pts, feasible)
    i = int(np.argmax(vals))
    best_x, best_v = pts[i].copy(), float(vals[i])

    width = 1.0
    for _ in range(refine_rounds):
        width /= shrink
        lo = np.clip(best_x - width / 2, 0.0, 1.0)
        hi = np.clip(best_x + width / 2, 0.0, 1.0)
        axes = [np.linspace(lo[d], hi[d], grid_n) for d in range(dim)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        vals = _evaluate(f, pts, feasible)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_x, best_v = pts[i].copy(), float(vals[i])
    return best_x, best_v


def _simplex_feasible(pts: np.ndarray) -> np.ndarray:
    return pts[:, 0] + pts[:, 1] <= 1.0 + 1e-12


def maximize_on_simplex(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid_n: int = DEFAULT_GRID_N,
    refine_rounds: int = DEFAULT_REFINE_ROUNDS,
) -> tuple[tuple[float, float], float]:
    """Maximize ``f(a, b)`` over a, b >= 0 with a + b <= 1.

    ``f`` must accept numpy arrays. Returns ``((a, b), max)``.
    """
    x, v = maximize_on_box(f, 2, grid_n, refine_rounds, feasible=_simplex_feasible)
    return (float(x[0]), float(x[1])), v


def maximize_on_square(f, grid_n: int = DEFAULT_GRID_N, refine_rounds: int = DEFAULT_REFINE_ROUNDS):
    x, v = maximize_on_box(f, 2, grid_n, refine_rounds)
    return (float(x[0]), float(x[1])), v


def maximize_on_interval(f, grid_n: int = 256, refine_rounds: int = DEFAULT_REFINE_ROUNDS):
    x, v = maximize_on_box(f, 1, grid_n, refine_rounds)
    return float(x[0]), v


# --------------------------------------------------------------------------
# region boundaries
# --------------------------------------------------------------------------

@dataclass
class RegionBoundary:
    """Sampled upper-right frontier of an (R1, R2) region at fixed R3.

    ``r2`` is NaN where the region has no point with that R1 (beyond its
    extent on the axis). ``empty`` flags a region with no points at all.
    """

    r1: np.ndarray
    r2: np.ndarray
    r3: float = 0.0
    label: str = ""
    meta: dict = field(default_factory=dict)
    empty: bool = False

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.r2)

    def rows(self) -> list[tuple[float, float]]:
        m = self.valid
        return list(zip(self.r1[m].tolist(), self.r2[m].tolist()))

    def value_at(self, r1) -> np.ndarray:
        """Frontier height at arbitrary R1 values (linear interpolation, NaN outside)."""
        m = self.valid
        if not m.any():
            return np.full(np.shape(r1), np.nan)
        x, y = self.r1[m], self.r2[m]
        out = np.interp(r1, x, y)
        return np.where((np.asarray(r1) > x[-1] + 1e-15) | (np.asarray(r1) < x[0] - 1e-15), np.nan, out)


def empty_boundary(axis_grid, r3: float = 0.0, label: str = "", meta: dict | None = None) -> RegionBoundary:
    axis = np.asarray(axis_grid, dtype=float)
    return RegionBoundary(axis, np.full(axis.shape, np.nan), r3, label, dict(meta or {}), empty=True)


def pareto_frontier(points: Sequence[tuple[float, float]], axis_grid) -> RegionBoundary:
    """Frontier of the downward closure of ``points`` sampled on ``axis_grid``.

    For each R1 in the grid the result is the largest R2 among points whose
    first coordinate is at least R1 (NaN if there is none).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("pareto_frontier needs at least one point")
    axis = np.asarray(axis_grid, dtype=float)
    order = np.argsort(-pts[:, 0], kind="stable")
    xs, ys = pts[order, 0], np.maximum.accumulate(pts[order, 1])
    # xs descending; running max of R2 over all points with x >= xs[j]
    idx = np.searchsorted(-xs, -axis, side="right") - 1
    r2 = np.where(idx >= 0, ys[np.clip(idx, 0, None)], np.nan)
    return RegionBoundary(axis, r2)


def pentagon_heights(a, b, s, x) -> np.ndarray:
    """Frontier heights of pentagons {R1<=a, R2<=b, R1+R2<=s} at R1 = x.

    ``a``, ``b``, ``s`` have shape (m,), ``x`` shape (k,); result is (m, k)
    with -inf where a pentagon has no point at that R1.
    """
    a = np.asarray(a, dtype=float)[:, None]
    b = np.asarray(b, dtype=float)[:, None]
    s = np.asarray(s, dtype=float)[:, None]
    x = np.asarray(x, dtype=float)[None, :]
    h = np.minimum(b, s - x)
    return np.where((x <= a) & (h >= 0), h, -np.inf)


def pentagon_boundary(a: float, b: float, s: float, axis_grid) -> RegionBoundary:
    h = pentagon_heights([a], [b], [s], axis_grid)[0]
    return RegionBoundary(np.asarray(axis_grid, dtype=float), np.where(np.isfinite(h), h, np.nan))


def dominates(upper: RegionBoundary, lower: RegionBoundary, tol: float = 1e-9) -> bool:
    """True if ``upper`` lies on or above ``lower`` wherever ``lower`` has a point.

    Both must share the same R1 grid.
    """
    if not np.array_equal(upper.r1, lower.r1):
        raise ValueError("boundaries sampled on different grids")
    m = lower.valid
    if not m.any():
        return True
    up = np.where(upper.valid, upper.r2, -np.inf)
    return bool(np.all(up[m] >= lower.r2[m] - tol))


def max_gap(a: RegionBoundary, b: RegionBoundary) -> float:
    """Largest amount by which ``a`` exceeds ``b`` on the shared grid (-inf if never comparable)."""
    if not np.array_equal(a.r1, b.r1):
        raise ValueError("boundaries sampled on different grids")
    av = np.where(a.valid, a.r2, -np.inf)
    bv = np.where(b.valid, b.r2, -np.inf)
    m = a.valid
    if not m.any():
        return -np.inf
    return float(np.max(av[m] - bv[m]))


# --------------------------------------------------------------------------
# frontier search over a union of pentagons
# --------------------------------------------------------------------------

PentagonFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


def _box_grid(dim: int, n: int) -> np.ndarray:
    axis = np.linspace(0.0, 1.0, n)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def search_frontier(
    pentagons: PentagonFn,
    dim: int,
    axis_grid,
    coarse_n: int = 17,
    refine_rounds: int = 3,
    refine_n: int = 7,
    feasible: Callable[[np.ndarray], np.ndarray] | None = None,
    extra: np.ndarray | None = None,
    chunk: int = 4096,
    moves: int = 32,
) -> tuple[np.ndarray, np.ndarray]:
    """Frontier of a union of pentagons indexed by parameters in ``[0,1]**dim``.

    ``pentagons(params)`` maps an (m, dim) array to the three bounds
    (R1, R2, R1+R2) of each member. The search evaluates a coarse grid, adds
    ``extra`` candidate parameters, then refines each axis point separately
    around its own incumbent (re-centring up to ``moves`` times per scale)
    with windows shrinking by 4x per round. Returns
    ``(heights, argmax_params)``; heights are -inf where nothing was found.
    Every reported height is attained by its returned parameter, so the
    result is an inner approximation of the true union.
    """
    x = np.asarray(axis_grid, dtype=float)
    cand = _box_grid(dim, coarse_n)
    if extra is not None and len(extra):
        cand = np.vstack([cand, np.asarray(extra, dtype=float).reshape(-1, dim)])
    if feasible is not None:
        cand = cand[feasible(cand)]

    best_h = np.full(x.shape, -np.inf)
    best_p = np.full((x.size, dim), np.nan)
    for start in range(0, cand.shape[0], chunk):
        c = cand[start:start + chunk]
        a, b, s = pentagons(c)
        h = pentagon_heights(a, b, s, x)
        j = np.argmax(h, axis=0)
        hv = h[j, np.arange(x.size)]
        better = hv > best_h
        best_h[better] = hv[better]
        best_p[better] = c[j[better]]

    width = 1.0 / (coarse_n - 1) * 2.0
    local = np.linspace(-0.5, 0.5, refine_n)
    offsets = np.stack(np.meshgrid(*([local] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    for _ in range(refine_rounds):
        # re-centre a few times at each scale so incumbents can drift
        active = np.isfinite(best_h)
        for _ in range(moves):
            active = _refine_step(pentagons, x, best_h, best_p, width, offsets, feasible, active)
            if not active.any():
                break
        _share_incumbents(pentagons, x, best_h, best_p)
        width /= WINDOW_SHRINK
    return best_h, best_p


def _refine_step(pentagons, x, best_h, best_p, width, offsets, feasible, active) -> np.ndarray:
    """One local re-grid around the incumbents of the ``active`` axis points
    (in place). Returns the mask of points that improved."""
    dim = best_p.shape[1]
    idx = np.flatnonzero(active & np.isfinite(best_h))
    improved = np.zeros(x.size, dtype=bool)
    if idx.size == 0:
        return improved
    c = np.clip(best_p[idx][:, None, :] + width * offsets[None, :, :], 0.0, 1.0)
    flat = c.reshape(-1, dim)
    ok = np.ones(flat.shape[0], dtype=bool) if feasible is None else feasible(flat)
    a, b, s = pentagons(flat)
    xr = np.repeat(x[idx], offsets.shape[0])
    h = np.minimum(b, s - xr)
    h = np.where((xr <= a) & (h >= 0) & ok, h, -np.inf).reshape(idx.size, -1)
    j = np.argmax(h, axis=1)
    hv = h[np.arange(idx.size), j]
    better = hv > best_h[idx]
    best_h[idx[better]] = hv[better]
    best_p[idx[better]] = c[better, j[better]]
    improved[idx[better]] = True
    return improved


def _share_incumbents(pentagons, x, best_h, best_p):
    """Evaluate every axis point's incumbent at every axis point (in place)."""
    found = np.isfinite(best_h)
    if not found.any():
        return
    cand = np.unique(best_p[found], axis=0)
    a, b, s = pentagons(cand)
    h = pentagon_heights(a, b, s, x)
    j = np.argmax(h, axis=0)
    hv = h[j, np.arange(x.size)]
    better = hv > best_h
    best_h[better] = hv[better]
    best_p[better] = cand[j[better]]


def search_max(
    f: Callable[[np.ndarray], np.ndarray],
    dim: int,
    coarse_n: int = 17,
    refine_rounds: int = 3,
    refine_n: int = 7,
    feasible: Callable[[np.ndarray], np.ndarray] | None = None,
    chunk: int = 65536,
) -> tuple[np.ndarray, float]:
    """Scalar maximization of ``f(params)`` with the same grid/refine pattern as
    :func:`search_frontier`."""
    cand = _box_grid(dim, coarse_n)
    if feasible is not None:
        cand = cand[feasible(cand)]
    best_v, best_p = -np.inf, np.full(dim, np.nan)
    for start in range(0, cand.shape[0], chunk):
        c = cand[start:start + chunk]
        v = np.asarray(f(c), dtype=float)
        v[np.isnan(v)] = -np.inf
        j = int(np.argmax(v))
        if v[j] > best_v:
            best_v, best_p = float(v[j]), c[j].copy()
    if not np.isfinite(best_v):
        return best_p, best_v
    width = 1.0 / (coarse_n - 1) * 2.0
    local = np.linspace(-0.5, 0.5, refine_n)
    offsets = np.stack(np.meshgrid(*([local] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    for _ in range(refine_rounds):
        c = np.clip(best_p + width * offsets, 0.0, 1.0)
        if feasible is not None:
            c = c[feasible(c)]
        v = np.asarray(f(c), dtype=float)
        v[np.isnan(v)] = -np.inf
        j = int(np.argmax(v))
        if v[j] > best_v:
            best_v, best_p = float(v[j]), c[j].copy()
        width /= WINDOW_SHRINK
    return best_p, best_v
