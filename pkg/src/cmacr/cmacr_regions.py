"""Gaussian compound MAC with a relay (no cross-reception), relay rate R3 = 0.

    Y1 = X1 + eta X3 + Z1,   Y2 = X2 + eta X3 + Z2,   Y3 = gamma (X1 + X2) + Z3

Decode-and-forward region and the matching outer bound, compress-and-forward
region, and the equal-rate comparison between the outer bound, DF, CF and a
nested-lattice scheme in which the relay decodes only the modulo sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
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
    maximize_on_square,
    pareto_frontier,
    search_frontier,
    search_max,
)


class SingularSplit(ValueError):
    """A DF parameter choice hits a zero denominator (alpha_j * alpha_3 = 1)."""


@dataclass(frozen=True)
class GaussianScenario:
    """Powers are linear; gamma2 / eta2 are the squared source-relay and
    relay-receiver gains. ``eta2 = UNLIMITED`` models a perfect relay pipe."""

    P1: float
    P2: float
    P3: float
    gamma2: float
    eta2: float

    def __post_init__(self):
        for name in ("P1", "P2", "P3", "gamma2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if math.isnan(self.eta2) or self.eta2 < 0:
            raise ValueError(f"eta2 must be >= 0, got {self.eta2}")

    @classmethod
    def symmetric(cls, P: float, gamma2: float, eta2: float) -> "GaussianScenario":
        return cls(P, P, P, gamma2, eta2)

    @property
    def is_symmetric(self) -> bool:
        return self.P1 == self.P2 == self.P3


@dataclass(frozen=True)
class DfSplit:
    a1: float
    a2: float
    a3p: float
    a3pp: float

    def __post_init__(self):
        vals = (self.a1, self.a2, self.a3p, self.a3pp)
        if not all(0 <= v <= 1 for v in vals) or self.a3p + self.a3pp > 1 + 1e-12:
            raise ValueError(f"invalid DF split {vals}")


@dataclass(frozen=True)
class RegionOptions:
    """Switches for the two formula readings that admit an alternative.

    ``nq_product_term``: keep the gamma^2 * a1P1 * a2P2 product in the CF
    quantization noise (as printed). ``sum_term_alpha2``: use a2 instead of
    a1 inside the third DF sum-rate term (as printed it is a1).
    """

    nq_product_term: bool = True
    sum_term_alpha2: bool = False


VERBATIM = RegionOptions()


@dataclass(frozen=True)
class DfBounds:
    r1: tuple[float, float]
    r2: tuple[float, float]
    r1_r2: tuple[float, float, float]

    @property
    def df(self) -> tuple[float, float, float]:
        return min(self.r1), min(self.r2), min(self.r1_r2)

    @property
    def outer(self) -> tuple[float, float, float]:
        return min(self.r1), min(self.r2), min(self.r1_r2[1:])


def _df_terms(s: GaussianScenario, a1, a2, a3p, a3pp, opts: RegionOptions = VERBATIM):
    """All seven terms, vectorized. Singular denominators yield NaN."""
    P1, P2, P3, g2, e2 = s.P1, s.P2, s.P3, s.gamma2, s.eta2
    a1, a2, a3p, a3pp = (np.asarray(v, dtype=float) for v in (a1, a2, a3p, a3pp))
    d1 = 1.0 - a2 * a3pp
    d2 = 1.0 - a1 * a3p
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = np.where(d1 > 0, 1.0 - a1 * a3p / np.where(d1 > 0, d1, 1.0), np.nan)
        f2 = np.where(d2 > 0, 1.0 - a2 * a3pp / np.where(d2 > 0, d2, 1.0), np.nan)
    eta = math.sqrt(e2)
    r1_relay = half_log2(1.0 + g2 * P1 * f1)
    r1_rx = half_log2(1.0 + P1 + e2 * P3 * (1.0 - a3pp))
    r2_relay = half_log2(1.0 + g2 * P2 * f2)
    r2_rx = half_log2(1.0 + P2 + e2 * P3 * (1.0 - a3p))
    coh = (np.sqrt(a1 * a3p * P1) + np.sqrt(a2 * a3pp * P2)) ** 2
    if P1 + P2 > 0:
        s_relay = half_log2(1.0 + g2 * (P1 + P2) * (1.0 - coh / (P1 + P2)))
    else:
        s_relay = half_log2(1.0 + 0.0 * coh)
    with np.errstate(invalid="ignore"):
        s_rx1 = half_log2(1.0 + P1 + e2 * P3 + 2.0 * eta * np.sqrt(a1 * a3p * P1 * P3))
        a_b = a2 if opts.sum_term_alpha2 else a1
        s_rx2 = half_log2(1.0 + P2 + e2 * P3 + 2.0 * eta * np.sqrt(a_b * a3pp * P2 * P3))
    return r1_relay, r1_rx, r2_relay, r2_rx, s_relay, s_rx1, s_rx2


def df_bounds(s: GaussianScenario, d: DfSplit, opts: RegionOptions = VERBATIM) -> DfBounds:
    """The three min-expressions of the DF region, each term kept separately.

    The first term of every min is the relay-decoding condition; the outer
    bound is obtained by dropping only the first sum-rate term.
    """
    if d.a2 * d.a3pp >= 1.0 or d.a1 * d.a3p >= 1.0:
        raise SingularSplit(f"zero denominator for split {d}")
    t = [float(v) for v in _df_terms(s, d.a1, d.a2, d.a3p, d.a3pp, opts)]
    return DfBounds((t[0], t[1]), (t[2], t[3]), (t[4], t[5], t[6]))


def _relay_feasible(p: np.ndarray) -> np.ndarray:
    return p[:, 2] + p[:, 3] <= 1.0 + 1e-12


def _df_pentagons(s: GaussianScenario, outer: bool, opts: RegionOptions):
    def pent(p):
        r1a, r1b, r2a, r2b, sa, sb, sc = _df_terms(s, p[:, 0], p[:, 1], p[:, 2], p[:, 3], opts)
        a = np.minimum(r1a, r1b)
        b = np.minimum(r2a, r2b)
        tot = np.minimum(sb, sc) if outer else np.minimum.reduce([sa, sb, sc])
        bad = np.isnan(a) | np.isnan(b)
        return np.where(bad, -np.inf, a), np.where(bad, -np.inf, b), np.where(bad, -np.inf, tot)
    return pent


@dataclass(frozen=True)
class SweepConfig:
    """Resolution of the 4-D parameter sweeps."""

    coarse_n: int = 17
    refine_rounds: int = 5
    refine_n: int = 5
    points: int = DEFAULT_BOUNDARY_POINTS


def _extent(pent, cfg: SweepConfig):
    def r1_extent(p):
        a, b, tot = pent(p)
        return np.where(b >= 0, np.minimum(a, tot), -np.inf)
    return search_max(r1_extent, 4, cfg.coarse_n, cfg.refine_rounds, cfg.refine_n,
                      feasible=_relay_feasible)


def _df_search(s, outer, axis_grid, cfg, opts, extra=None):
    pent = _df_pentagons(s, outer, opts)
    p_ext, v_ext = _extent(pent, cfg)
    if not np.isfinite(v_ext) or v_ext < 0:
        return None, None, None
    axis = np.linspace(0.0, v_ext, cfg.points) if axis_grid is None else np.asarray(axis_grid, float)
    seeds = p_ext[None, :] if extra is None else np.vstack([p_ext[None, :], extra])
    h, params = search_frontier(pent, 4, axis, cfg.coarse_n, cfg.refine_rounds, cfg.refine_n,
                                feasible=_relay_feasible, extra=seeds)
    return axis, h, params


def df_boundary(
    s: GaussianScenario,
    grid_n: int = 17,
    axis_grid=None,
    cfg: SweepConfig | None = None,
    opts: RegionOptions = VERBATIM,
) -> RegionBoundary:
    """Frontier of the DF region (union over a1, a2, a3p, a3pp)."""
    cfg = cfg or SweepConfig(coarse_n=grid_n)
    meta = {"region": "DF achievable", "scenario": _scen(s)}
    axis, h, params = _df_search(s, False, axis_grid, cfg, opts)
    if axis is None:
        return empty_boundary(axis_grid if axis_grid is not None else [0.0], 0.0, "df", meta)
    b = RegionBoundary(axis, np.where(np.isfinite(h), h, np.nan), 0.0, "df", meta)
    b.meta["argmax"] = params
    return b


def outer_boundary(
    s: GaussianScenario,
    grid_n: int = 17,
    axis_grid=None,
    cfg: SweepConfig | None = None,
    opts: RegionOptions = VERBATIM,
) -> RegionBoundary:
    """Frontier of the outer bound: the DF region without its relay sum-rate term.

    The DF maximizers are added to the candidate set, so on a shared grid the
    computed outer frontier is never below the computed DF frontier.
    """
    cfg = cfg or SweepConfig(coarse_n=grid_n)
    meta = {"region": "outer bound", "scenario": _scen(s)}
    extra = None
    if axis_grid is not None:
        _, _, dfp = _df_search(s, False, axis_grid, cfg, opts)
        if dfp is not None:
            extra = dfp[~np.isnan(dfp).any(axis=1)]
    axis, h, params = _df_search(s, True, axis_grid, cfg, opts, extra=extra)
    if axis is None:
        return empty_boundary(axis_grid if axis_grid is not None else [0.0], 0.0, "outer", meta)
    if axis_grid is None:
        # own grid: still seed with DF maximizers on that grid
        _, _, dfp = _df_search(s, False, axis, cfg, opts)
        if dfp is not None:
            extra = dfp[~np.isnan(dfp).any(axis=1)]
            _, h, params = _df_search(s, True, axis, cfg, opts, extra=extra)
    b = RegionBoundary(axis, np.where(np.isfinite(h), h, np.nan), 0.0, "outer", meta)
    b.meta["argmax"] = params
    return b


# --------------------------------------------------------------------------
# compress-and-forward
# --------------------------------------------------------------------------

def quantization_noise(s: GaussianScenario, a1, a2, opts: RegionOptions = VERBATIM):
    """Gaussian Wyner-Ziv quantization noise variance N_q."""
    q1 = np.asarray(a1, dtype=float) * s.P1
    q2 = np.asarray(a2, dtype=float) * s.P2
    prod = q1 * q2 if opts.nq_product_term else 0.0
    num = 1.0 + s.gamma2 * (prod + q1 + q2) + np.minimum(q1, q2)
    den = s.eta2 * s.P3
    if den == 0:
        raise ZeroDivisionError("N_q undefined: eta2 * P3 = 0")
    return num / den


def _cf_terms(s, a1, a2, opts):
    nq = quantization_noise(s, a1, a2, opts)
    r1 = half_log2(1.0 + s.gamma2 * np.asarray(a1, float) * s.P1 / (1.0 + nq))
    r2 = half_log2(1.0 + s.gamma2 * np.asarray(a2, float) * s.P2 / (1.0 + nq))
    return r1, r2


def cf_rates(s: GaussianScenario, a1: float, a2: float, opts: RegionOptions = VERBATIM) -> tuple[float, float]:
    """Corner (R1max, R2max) of the CF rectangle for power fractions a1, a2."""
    if not (0 <= a1 <= 1 and 0 <= a2 <= 1):
        raise ValueError("a1, a2 must lie in [0, 1]")
    r1, r2 = _cf_terms(s, a1, a2, opts)
    return float(clamp_rate(r1)), float(clamp_rate(r2))


def cf_boundary(
    s: GaussianScenario,
    grid_n: int = 201,
    axis_grid=None,
    points: int = DEFAULT_BOUNDARY_POINTS,
    opts: RegionOptions = VERBATIM,
) -> RegionBoundary:
    """Frontier of the union of CF rectangles over an (a1, a2) grid."""
    meta = {"region": "CF achievable", "scenario": _scen(s)}
    if s.eta2 * s.P3 == 0:
        axis = np.asarray(axis_grid, float) if axis_grid is not None else np.zeros(1)
        return RegionBoundary(axis, np.where(axis <= 0, 0.0, np.nan), 0.0, "cf", meta)
    g = np.linspace(0.0, 1.0, grid_n)
    a1, a2 = (m.ravel() for m in np.meshgrid(g, g, indexing="ij"))
    r1, r2 = _cf_terms(s, a1, a2, opts)
    pts = np.column_stack([clamp_rate(r1), clamp_rate(r2)])
    axis = np.linspace(0.0, pts[:, 0].max(), points) if axis_grid is None else axis_grid
    b = pareto_frontier(pts, axis)
    b.label, b.meta = "cf", meta
    return b


# --------------------------------------------------------------------------
# equal-rate comparison, P1 = P2 = P3 = P
# --------------------------------------------------------------------------

def _require_symmetric(s: GaussianScenario):
    if not s.is_symmetric:
        raise ValueError("equal-rate formulas need P1 = P2 = P3")


def _sym_terms(P, g2, e2, a, a3):
    a = np.asarray(a, float)
    a3 = np.asarray(a3, float)
    aa = a * a3
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(aa < 1, (1.0 - 2.0 * aa) / np.where(aa < 1, 1.0 - aa, 1.0), -np.inf)
        t1 = half_log2(1.0 + g2 * P * ratio)
    t2 = half_log2(1.0 + P + e2 * P * (1.0 - a3))
    t3 = 0.5 * half_log2(1.0 + P * (1.0 + e2 + 2.0 * math.sqrt(e2) * np.sqrt(aa)))
    t_df = 0.5 * half_log2(1.0 + 2.0 * g2 * P * (1.0 - 2.0 * aa))
    return t1, t2, t3, t_df


def symmetric_upper_bound_objective(s: GaussianScenario):
    _require_symmetric(s)
    P, g2, e2 = s.P1, s.gamma2, s.eta2

    def f(a, a3):
        t1, t2, t3, _ = _sym_terms(P, g2, e2, a, a3)
        return np.minimum.reduce([t1, t2, t3])
    return f


def symmetric_df_objective(s: GaussianScenario):
    _require_symmetric(s)
    P, g2, e2 = s.P1, s.gamma2, s.eta2

    def f(a, a3):
        t1, t2, t3, t4 = _sym_terms(P, g2, e2, a, a3)
        return np.minimum.reduce([t1, t2, t3, t4])
    return f


def symmetric_upper_bound(s: GaussianScenario, grid_n: int = 64, refine_rounds: int = 4) -> float:
    """Outer-bound equal rate: max over (a, a3) in [0,1]^2 of a three-term min."""
    _, v = maximize_on_square(symmetric_upper_bound_objective(s), grid_n, refine_rounds)
    return float(clamp_rate(v))


def symmetric_df_rate(s: GaussianScenario, grid_n: int = 64, refine_rounds: int = 4) -> float:
    """DF equal rate: the upper-bound min with the extra relay sum-rate term."""
    _, v = maximize_on_square(symmetric_df_objective(s), grid_n, refine_rounds)
    return float(clamp_rate(v))


def symmetric_cf_rate(s: GaussianScenario, grid_n: int = 256, refine_rounds: int = 4,
                      opts: RegionOptions = VERBATIM) -> float:
    _require_symmetric(s)
    if s.P1 == 0:
        return 0.0

    def f(a):
        r1, r2 = _cf_terms(s, a, a, opts)
        return np.minimum(r1, r2)

    _, v = maximize_on_interval(f, grid_n, refine_rounds)
    return float(clamp_rate(v))


def lattice_equal_rate(s: GaussianScenario) -> float:
    """Equal rate of the nested-lattice scheme (relay decodes the modulo sum)."""
    _require_symmetric(s)
    P, g2, e2 = s.P1, s.gamma2, s.eta2
    terms = (
        half_log2(0.5 + g2 * P),
        half_log2(1.0 + P * min(1.0, e2)),
        0.5 * half_log2(1.0 + P * (1.0 + e2)),
    )
    return float(clamp_rate(min(terms)))


Scheme = Literal["df", "cf", "lattice", "upper"]


def equal_rate(scheme: Scheme, s: GaussianScenario) -> float:
    if scheme == "df":
        return symmetric_df_rate(s)
    if scheme == "cf":
        return symmetric_cf_rate(s)
    if scheme == "lattice":
        return lattice_equal_rate(s)
    if scheme == "upper":
        return symmetric_upper_bound(s)
    raise ValueError(f"unknown scheme {scheme!r}")


def _scen(s: GaussianScenario) -> dict:
    return {"P1": s.P1, "P2": s.P2, "P3": s.P3, "gamma2": s.gamma2, "eta2": s.eta2}
