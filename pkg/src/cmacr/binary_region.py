"""Binary symmetric compound MAC with a relay, R3 = 0:

    Y1 = X1 ^ X3 ^ Z1,   Y2 = X2 ^ X3 ^ Z2,   Y3 = X1 ^ X2 ^ Z3,   Zi ~ Bern(eps_i)

Closed-form capacity region (achieved by linear codes with XOR relaying), the
smaller region reachable with decode-and-forward, and an exhaustive
mutual-information oracle over independent Bernoulli inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import binary_entropy

LN2 = np.log(2.0)


@dataclass(frozen=True)
class BinaryScenario:
    eps1: float
    eps2: float
    eps3: float

    def __post_init__(self):
        # crossover above 1/2 is a relabelled channel; rejected to keep Hb monotone
        for name in ("eps1", "eps2", "eps3"):
            v = getattr(self, name)
            if not 0 <= v <= 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5], got {v}")


@dataclass(frozen=True)
class BinaryConstraints:
    """R1 <= r1, R2 <= r2, R1 + R2 <= min(r1_r2)."""

    r1: float
    r2: float
    r1_r2: tuple[float, ...]

    @property
    def sum_bound(self) -> float:
        return min(self.r1_r2)


def binary_capacity_constraints(b: BinaryScenario) -> BinaryConstraints:
    c3 = 1.0 - binary_entropy(b.eps3)
    return BinaryConstraints(c3, c3, (1.0 - binary_entropy(b.eps1), 1.0 - binary_entropy(b.eps2)))


def binary_df_constraints(b: BinaryScenario) -> BinaryConstraints:
    """Capacity constraints plus R1 + R2 <= 1 - Hb(eps3): the relay must decode both messages."""
    cap = binary_capacity_constraints(b)
    return BinaryConstraints(cap.r1, cap.r2, cap.r1_r2 + (1.0 - binary_entropy(b.eps3),))


def contains(c: BinaryConstraints, r1: float, r2: float, tol: float = 0.0) -> bool:
    if r1 < 0 or r2 < 0:
        raise ValueError("rates must be non-negative")
    return r1 <= c.r1 + tol and r2 <= c.r2 + tol and r1 + r2 <= c.sum_bound + tol


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

def _entropy(p: np.ndarray, axes: tuple[int, ...], nvar: int = 3) -> np.ndarray:
    """Entropy (bits) of the marginal over variable ``axes`` of a batched pmf.

    ``p`` has ``nvar`` leading binary variable axes followed by the grid
    dimensions, so every reduction is a sum of whole grid-shaped blocks.
    """
    drop = tuple(i for i in range(nvar) if i not in axes)
    m = p.sum(axis=drop) if drop else p
    m = m.reshape((-1,) + p.shape[nvar:])
    lg = np.zeros_like(m)
    np.log(m, out=lg, where=m > 0)          # 0 log 0 = 0
    return -(m * lg).sum(axis=0) / LN2


def _cond_mi(p, a, b, c=(), cache: dict | None = None) -> np.ndarray:
    """I(A; B | C) from a batched joint pmf.

    ``cache`` memoizes marginal entropies of ``p`` across calls on the same pmf.
    """
    cache = {} if cache is None else cache

    def h(axes):
        key = tuple(sorted(axes))
        if key not in cache:
            cache[key] = _entropy(p, key)
        return cache[key]

    a, b, c = tuple(a), tuple(b), tuple(c)
    hc = h(c) if c else 0.0
    return h(a + c) + h(b + c) - h(a + b + c) - hc


def _joint_inputs_output(pu: np.ndarray, pv: np.ndarray, eps: float) -> np.ndarray:
    """Batched pmf p[u, v, y, i, j] with U ~ Bern(pu[i]), V ~ Bern(pv[j]) independent
    and Y = U ^ V ^ Z, Z ~ Bern(eps)."""
    bu = np.stack([1.0 - pu, pu])[:, None, None, :, None]
    bv = np.stack([1.0 - pv, pv])[None, :, None, None, :]
    u, v, y = np.ix_(range(2), range(2), range(2))
    chan = np.where(y == (u ^ v), 1.0 - eps, eps)[..., None, None]
    return bu * bv * chan


@dataclass
class OracleResult:
    """Maxima of the four mutual-information terms over the input grid.

    ``argmax`` maps each term to the maximizing (p_a, p_b) pair; among ties the
    point closest to (1/2, 1/2) is reported.
    """

    relay_r1: float        # max I(X1; Y3 | X2, X3)
    relay_r2: float        # max I(X2; Y3 | X1, X3)
    rx1_sum: float         # max I(X1, X3; Y1)
    rx2_sum: float         # max I(X2, X3; Y2)
    argmax: dict
    grid: np.ndarray


def _argmax_central(vals: np.ndarray, grid: np.ndarray, rtol: float = 1e-12):
    best = vals.max()
    i, j = np.nonzero(vals >= best - rtol)
    k = np.argmin((grid[i] - 0.5) ** 2 + (grid[j] - 0.5) ** 2)
    return float(best), (float(grid[i[k]]), float(grid[j[k]]))


def brute_force_channel_oracle(b: BinaryScenario, dist_grid_n: int = 101) -> OracleResult:
    """Maximize the single-letter terms of the binary outer bound over
    independent Bernoulli inputs on a ``dist_grid_n``-point grid per input.

    Each term only involves two of the three inputs, so each is searched over
    the corresponding 2-D grid (X3 does not reach Y3; X2 does not reach Y1).
    """
    if dist_grid_n < 2:
        raise ValueError("dist_grid_n must be >= 2")
    g = np.linspace(0.0, 1.0, dist_grid_n)

    # relay: variables (X1, X2, Y3); X3 is independent of Y3 given (X1, X2)
    pj = _joint_inputs_output(g, g, b.eps3)
    hs = {}
    relay1 = _cond_mi(pj, (0,), (2,), (1,), hs)
    relay2 = _cond_mi(pj, (1,), (2,), (0,), hs)
    # receiver 1: (X1, X3, Y1); receiver 2: (X2, X3, Y2)
    rx1 = _cond_mi(_joint_inputs_output(g, g, b.eps1), (0, 1), (2,))
    rx2 = _cond_mi(_joint_inputs_output(g, g, b.eps2), (0, 1), (2,))

    out, arg = {}, {}
    for name, vals in (("relay_r1", relay1), ("relay_r2", relay2), ("rx1_sum", rx1), ("rx2_sum", rx2)):
        out[name], arg[name] = _argmax_central(vals, g)
    return OracleResult(argmax=arg, grid=g, **out)


def oracle_constraints(res: OracleResult) -> BinaryConstraints:
    return BinaryConstraints(res.relay_r1, res.relay_r2, (res.rx1_sum, res.rx2_sum))
