"""GF(2) linear codes and a Monte Carlo simulator of block-Markov XOR relaying
over the binary cMACr

    Y1 = X1 ^ X3 ^ Z1,   Y2 = X2 ^ X3 ^ Z2,   Y3 = X1 ^ X2 ^ Z3.

Both sources share one generator G (source 2 zero-pads its shorter message), so
the relay observes a codeword of G plus noise and can decode the XOR
u3 = u1 ^ [0 u2] without resolving u1 and u2 separately. The relay forwards
u3 G3 in the next block; each receiver strips its own previously decoded
message from the relay signal and jointly decodes its new message together with
the other source's previous one.

Bits are uint8 arrays. Messages are indexed MSB-first, so "lexicographic" tie
breaking on bit strings is the same as smallest integer index.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .binary_region import BinaryScenario

DEFAULT_CAP = 16
JOINT_CAP_SLACK = 4
MAX_REDRAWS = 10_000

ROLES = ("codebook", "messages", "z1", "z2", "z3")


class CapExceeded(ValueError):
    """Exhaustive decoding would enumerate more candidates than allowed."""


# --------------------------------------------------------------------------
# codes
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary linear code with a k x n generator matrix.

    k = 0 is allowed and denotes the trivial code {0}; it is what the joint
    decoder sees when one component carries no message.
    """

    k: int
    n: int
    generator: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.generator, dtype=np.uint8)
        if self.n < 1 or not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n and n >= 1, got k={self.k}, n={self.n}")
        if g.shape != (self.k, self.n):
            raise ValueError(f"generator shape {g.shape} does not match ({self.k}, {self.n})")
        if np.any(g > 1):
            raise ValueError("generator entries must be 0/1")
        object.__setattr__(self, "generator", g)

    def rows(self, start: int, stop: int | None = None) -> "LinearCode":
        g = self.generator[start:stop]
        return LinearCode(g.shape[0], self.n, g)

    def stack(self, other: "LinearCode") -> "LinearCode":
        if other.n != self.n:
            raise ValueError("block lengths differ")
        return LinearCode(self.k + other.k, self.n, np.vstack([self.generator, other.generator]))

    def __eq__(self, other):
        return (isinstance(other, LinearCode) and self.k == other.k and self.n == other.n
                and np.array_equal(self.generator, other.generator))

    __hash__ = None


def gf2_rank(m: np.ndarray) -> int:
    """Rank over GF(2) by elimination on a copy."""
    a = np.array(m, dtype=np.uint8) & 1
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = np.nonzero(a[rank:, c])[0]
        if piv.size == 0:
            continue
        p = rank + piv[0]
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
        hit = np.nonzero(a[:, c])[0]
        hit = hit[hit != rank]
        a[hit] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _draw_generator(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=(k, n), dtype=np.uint8)


def random_code(k: int, n: int, seed, full_rank: bool = False) -> LinearCode:
    """Generator with i.i.d. uniform bits, deterministic in ``seed``.

    ``full_rank`` redraws until the rows are independent (conditioning of the
    same ensemble).
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(MAX_REDRAWS):
        g = _draw_generator(k, n, rng)
        if not full_rank or gf2_rank(g) == k:
            return LinearCode(k, n, g)
    raise RuntimeError("could not draw a full-rank generator")


def encode(code: LinearCode, msg) -> np.ndarray:
    m = np.asarray(msg, dtype=np.uint8)
    if m.shape != (code.k,):
        raise ValueError(f"message length {m.shape} does not match k={code.k}")
    if code.k == 0:
        return np.zeros(code.n, dtype=np.uint8)
    return ((m.astype(np.int64) @ code.generator) & 1).astype(np.uint8)


def bsc(word, eps: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= eps <= 0.5:
        raise ValueError(f"eps must lie in [0, 0.5], got {eps}")
    w = np.asarray(word, dtype=np.uint8)
    return w ^ (rng.random(w.shape) < eps).astype(np.uint8)


def pad(msg, k: int) -> np.ndarray:
    """Left zero-pad a message to k bits, i.e. [0 u]."""
    m = np.asarray(msg, dtype=np.uint8)
    if m.size > k:
        raise ValueError("message longer than target length")
    return np.concatenate([np.zeros(k - m.size, dtype=np.uint8), m])


def hamming(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a, dtype=np.uint8) ^ np.asarray(b, dtype=np.uint8)))


# --------------------------------------------------------------------------
# exhaustive decoding
# --------------------------------------------------------------------------

def index_to_bits(idx, k: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[..., None] >> shifts) & 1).astype(np.uint8)


def _codebook(code: LinearCode) -> np.ndarray:
    """Packed codewords of every message, in message-index order."""
    words = (index_to_bits(np.arange(2 ** code.k), code.k).astype(np.int64) @ code.generator) & 1
    return np.packbits(words.astype(np.uint8), axis=-1)


class Decoder:
    """Minimum-distance decoder over the direct sum of one or two codes.

    The candidate table is built once, so repeated decodes against fixed codes
    only cost one XOR/popcount pass. Ties go to the first candidate in
    (msgA, msgB) lexicographic order.
    """

    def __init__(self, code_a: LinearCode, code_b: LinearCode | None = None, cap: int = DEFAULT_CAP):
        if code_b is None:
            code_b = LinearCode(0, code_a.n, np.zeros((0, code_a.n), np.uint8))
            limit = cap
        else:
            limit = cap + JOINT_CAP_SLACK
        if code_a.n != code_b.n:
            raise ValueError("block lengths differ")
        if code_a.k + code_b.k > limit:
            raise CapExceeded(f"{code_a.k + code_b.k} message bits exceed decoding cap {limit}")
        self.ka, self.kb, self.n = code_a.k, code_b.k, code_a.n
        ca, cb = _codebook(code_a), _codebook(code_b)
        self.table = (ca[:, None, :] ^ cb[None, :, :]).reshape(-1, ca.shape[-1])

    def distances(self, received) -> np.ndarray:
        r = np.asarray(received, dtype=np.uint8)
        if r.shape != (self.n,):
            raise ValueError(f"received length {r.shape} does not match n={self.n}")
        return np.bitwise_count(self.table ^ np.packbits(r)).sum(axis=-1, dtype=np.int64)

    def decode_index(self, received) -> tuple[int, int]:
        j = int(np.argmin(self.distances(received)))
        return divmod(j, 2 ** self.kb)

    def decode(self, received) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.decode_index(received)
        return index_to_bits(a, self.ka), index_to_bits(b, self.kb)


def ml_decode(code: LinearCode, received, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Minimum Hamming distance decoding (ML on a BSC with eps < 1/2)."""
    if code.k > cap:
        raise CapExceeded(f"k={code.k} exceeds decoding cap {cap}")
    return Decoder(code, cap=cap).decode(received)[0]


def joint_ml_decode(code_a: LinearCode, code_b: LinearCode, received, cap: int = DEFAULT_CAP):
    """Joint minimum-distance decoding of (msgA, msgB) from msgA.GA ^ msgB.GB + noise."""
    return Decoder(code_a, code_b, cap=cap).decode(received)


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    scenario: BinaryScenario
    n: int
    k1: int
    k2: int
    num_blocks: int = 4
    trials: int = 1000
    master_seed: int = 0
    relay_decoder: str = "xor"
    cap: int = DEFAULT_CAP
    roles_swapped: bool = False

    def __post_init__(self):
        if self.relay_decoder not in ("xor", "joint"):
            raise ValueError(f"relay_decoder must be 'xor' or 'joint', got {self.relay_decoder!r}")
        if self.k2 < 1 or self.k1 < 1:
            raise ValueError("k1 and k2 must be >= 1")
        if self.k1 > self.cap:
            raise CapExceeded(f"k1={self.k1} exceeds decoding cap {self.cap}")
        if self.k1 + self.k2 > self.cap + JOINT_CAP_SLACK:
            raise CapExceeded(f"k1+k2={self.k1 + self.k2} exceeds joint decoding cap {self.cap + JOINT_CAP_SLACK}")
        if self.k2 > self.k1:
            raise ValueError("need k2 <= k1 (use oriented_config to swap roles)")
        # receivers decode k1 + k2 bits from n channel bits
        if self.k1 + self.k2 > self.n:
            raise ValueError(f"need k1 + k2 <= n, got {self.k1}+{self.k2} > {self.n}")
        if self.num_blocks < 2:
            raise ValueError("num_blocks must be >= 2")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @property
    def rates(self) -> tuple[float, float]:
        return self.k1 / self.n, self.k2 / self.n

    def echo(self) -> dict:
        d = asdict(self)
        d["scenario"] = asdict(self.scenario)
        return d


def oriented_config(scenario: BinaryScenario, n: int, k1: int, k2: int, **kw) -> SimConfig:
    """Build a SimConfig for any (k1, k2); if k2 > k1 the source/receiver roles
    are swapped internally and swapped back in the report."""
    if k2 <= k1:
        return SimConfig(scenario, n, k1, k2, **kw)
    s = BinaryScenario(scenario.eps2, scenario.eps1, scenario.eps3)
    return SimConfig(s, n, k2, k1, roles_swapped=True, **kw)


@dataclass
class SimReport:
    relay_error_rate: float
    rx1_error_rate: float
    rx2_error_rate: float
    end_to_end_error_rate: float
    trials: int
    blocks: int
    relay_decodes: int
    rx_decodes: int
    relay_errors: int
    rx1_errors: int
    rx2_errors: int
    trial_failures: int
    seed: int
    config: dict = field(default_factory=dict)

    CSV_FIELDS = ("relay_decoder", "n", "k1", "k2", "eps1", "eps2", "eps3", "blocks", "trials", "seed",
                  "relay_error_rate", "rx1_error_rate", "rx2_error_rate", "end_to_end_error_rate")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def csv_row(self) -> dict:
        c, s = self.config, self.config["scenario"]
        return {"relay_decoder": c["relay_decoder"], "n": c["n"], "k1": c["k1"], "k2": c["k2"],
                "eps1": s["eps1"], "eps2": s["eps2"], "eps3": s["eps3"], "blocks": self.blocks,
                "trials": self.trials, "seed": self.seed,
                "relay_error_rate": self.relay_error_rate, "rx1_error_rate": self.rx1_error_rate,
                "rx2_error_rate": self.rx2_error_rate, "end_to_end_error_rate": self.end_to_end_error_rate}

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in self.csv_row().items()})
        return buf.getvalue()


def trial_streams(master_seed: int, trial: int) -> dict[str, np.random.Generator]:
    """Independent per-role generators for one trial; any trial can be replayed alone."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return {role: np.random.default_rng(child) for role, child in zip(ROLES, ss.spawn(len(ROLES)))}


def _full_rank(*mats) -> bool:
    return all(gf2_rank(m) == m.shape[0] for m in mats)


def draw_codes(cfg: SimConfig, rng: np.random.Generator):
    """Source generators (G1, G2) and relay generator G3 for one trial.

    G1 and G3 are drawn first, identically in both relay modes. In xor mode
    G2 is the last k2 rows of G1 (zero padding); in joint mode G2 is an
    independent draw. Draws are conditioned on every generator a decoder uses
    being full rank, so noiseless channels decode exactly.
    """
    k1, k2, n = cfg.k1, cfg.k2, cfg.n
    for _ in range(MAX_REDRAWS):
        g1, g3 = _draw_generator(k1, n, rng), _draw_generator(k1, n, rng)
        g2 = g1[k1 - k2:]
        if _full_rank(g1, np.vstack([g1, g3[k1 - k2:]]), np.vstack([g2, g3])):
            break
    else:
        raise RuntimeError("could not draw full-rank relay codes")
    if cfg.relay_decoder == "joint":
        for _ in range(MAX_REDRAWS):
            g2 = _draw_generator(k2, n, rng)
            if _full_rank(np.vstack([g1, g2]), np.vstack([g2, g3])):
                break
        else:
            raise RuntimeError("could not draw full-rank source codes")
    return LinearCode(k1, n, g1), LinearCode(k2, n, g2), LinearCode(k1, n, g3)


def simulate_trial(cfg: SimConfig, trial: int) -> tuple[int, int, int, bool]:
    """One block-Markov transmission; returns (relay errors, rx1 errors, rx2 errors, failed).

    Sources send fresh messages in blocks 1..B-1 and are silent in block B,
    which only flushes the relay. Receivers decode their own message
    point-to-point in block 1 (relay sends the known all-zero word), a
    (new own, previous other) pair in blocks 2..B-1, and the other source's
    last message in block B.
    """
    k1, k2, B, sc = cfg.k1, cfg.k2, cfg.num_blocks, cfg.scenario
    st = trial_streams(cfg.master_seed, trial)
    c1, c2, c3 = draw_codes(cfg, st["codebook"])
    c3p = c3.rows(k1 - k2)                          # G3': rows that carry u2
    u1 = st["messages"].integers(0, 2, size=(B - 1, k1), dtype=np.uint8)
    u2 = st["messages"].integers(0, 2, size=(B - 1, k2), dtype=np.uint8)

    relay = Decoder(c1, cap=cfg.cap) if cfg.relay_decoder == "xor" else Decoder(c1, c2, cap=cfg.cap)
    rx1 = [Decoder(c1, cap=cfg.cap), Decoder(c1, c3p, cap=cfg.cap), Decoder(c3p, cap=cfg.cap)]
    rx2 = [Decoder(c2, cap=cfg.cap), Decoder(c2, c3, cap=cfg.cap), Decoder(c3, cap=cfg.cap)]

    n = cfg.n
    zero = np.zeros(n, np.uint8)
    x3 = zero                                        # relay word in the current block
    u1_hat = np.zeros_like(u1)                       # receiver 1 estimates
    u2_at1 = np.zeros_like(u2)
    u2_hat = np.zeros_like(u2)                       # receiver 2 estimates
    u1_at2 = np.zeros_like(u1)
    relay_err = e1 = e2 = 0

    for b in range(B):
        live = b < B - 1
        x1 = encode(c1, u1[b]) if live else zero
        x2 = encode(c2, u2[b]) if live else zero
        y1 = bsc(x1 ^ x3, sc.eps1, st["z1"])
        y2 = bsc(x2 ^ x3, sc.eps2, st["z2"])
        y3 = bsc(x1 ^ x2, sc.eps3, st["z3"])

        # receivers: cancel own previous message from the relay word, then decode
        if b == 0:
            u1_hat[0] = rx1[0].decode(y1)[0]
            u2_hat[0] = rx2[0].decode(y2)[0]
            e1 += int(np.any(u1_hat[0] != u1[0]))
            e2 += int(np.any(u2_hat[0] != u2[0]))
        else:
            r1 = y1 ^ encode(c3, u1_hat[b - 1])
            r2 = y2 ^ encode(c3, pad(u2_hat[b - 1], k1))
            if live:
                u1_hat[b], u2_at1[b - 1] = rx1[1].decode(r1)
                u2_hat[b], u1_at2[b - 1] = rx2[1].decode(r2)
                e1 += int(np.any(u1_hat[b] != u1[b]) or np.any(u2_at1[b - 1] != u2[b - 1]))
                e2 += int(np.any(u2_hat[b] != u2[b]) or np.any(u1_at2[b - 1] != u1[b - 1]))
            else:
                u2_at1[b - 1] = rx1[2].decode(r1)[0]
                u1_at2[b - 1] = rx2[2].decode(r2)[0]
                e1 += int(np.any(u2_at1[b - 1] != u2[b - 1]))
                e2 += int(np.any(u1_at2[b - 1] != u1[b - 1]))

        # relay: decode u3 = u1 ^ [0 u2] and forward it in the next block
        if live:
            u3 = u1[b] ^ pad(u2[b], k1)
            if cfg.relay_decoder == "xor":
                u3_hat = relay.decode(y3)[0]
            else:
                a, c = relay.decode(y3)
                u3_hat = a ^ pad(c, k1)
            relay_err += int(np.any(u3_hat != u3))
            x3 = encode(c3, u3_hat)

    failed = bool(np.any(u1_hat != u1) or np.any(u2_at1 != u2) or np.any(u2_hat != u2) or np.any(u1_at2 != u1))
    return relay_err, e1, e2, failed


def run_sim(cfg: SimConfig) -> SimReport:
    tot = np.zeros(4, dtype=np.int64)
    for t in range(cfg.trials):
        tot += simulate_trial(cfg, t)
    relay_err, e1, e2, fails = (int(v) for v in tot)
    if cfg.roles_swapped:
        e1, e2 = e2, e1
    relay_n = cfg.trials * (cfg.num_blocks - 1)
    rx_n = cfg.trials * cfg.num_blocks
    return SimReport(
        relay_error_rate=relay_err / relay_n,
        rx1_error_rate=e1 / rx_n,
        rx2_error_rate=e2 / rx_n,
        end_to_end_error_rate=fails / cfg.trials,
        trials=cfg.trials,
        blocks=cfg.num_blocks,
        relay_decodes=relay_n,
        rx_decodes=rx_n,
        relay_errors=relay_err,
        rx1_errors=e1,
        rx2_errors=e2,
        trial_failures=fails,
        seed=cfg.master_seed,
        config=cfg.echo(),
    )
