import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmacr.binary_region import BinaryScenario
from cmacr.gf2_sim import (
    CapExceeded,
    LinearCode,
    SimConfig,
    SimReport,
    bsc,
    draw_codes,
    encode,
    gf2_rank,
    hamming,
    index_to_bits,
    joint_ml_decode,
    ml_decode,
    oriented_config,
    pad,
    random_code,
    run_sim,
    simulate_trial,
    trial_streams,
)

NOISELESS = BinaryScenario(0, 0, 0)


def all_msgs(k):
    return [np.array(m, np.uint8) for m in itertools.product([0, 1], repeat=k)]


# ---- codes -----------------------------------------------------------------------

def test_random_code_shapes_and_determinism():
    c = random_code(1, 1, 7)
    assert c.generator.shape == (1, 1) and c.generator[0, 0] in (0, 1)
    assert random_code(1, 1, 7) == c
    assert random_code(8, 16, 3) == random_code(8, 16, 3)
    assert random_code(8, 16, 3) != random_code(8, 16, 4)
    for bad in ((0, 4), (5, 4)):
        with pytest.raises(ValueError):
            random_code(*bad, 1)


def test_row_space_size_by_enumeration():
    c = random_code(8, 16, 11)
    words = {tuple(encode(c, m)) for m in all_msgs(8)}
    assert len(words) <= 2 ** 8
    assert len(words) == 2 ** gf2_rank(c.generator)


def test_full_rank_option():
    for seed in range(20):
        c = random_code(6, 6, seed, full_rank=True)
        assert gf2_rank(c.generator) == 6


def test_gf2_rank_known():
    assert gf2_rank(np.eye(5, dtype=np.uint8)) == 5
    assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], np.uint8)) == 2
    assert gf2_rank(np.zeros((3, 4), np.uint8)) == 0


def test_linear_code_validation():
    with pytest.raises(ValueError):
        LinearCode(2, 3, np.zeros((3, 2), np.uint8))
    with pytest.raises(ValueError):
        LinearCode(2, 3, 2 * np.ones((2, 3), np.uint8))


def test_encode_examples():
    c = random_code(4, 9, 5)
    assert not encode(c, np.zeros(4, np.uint8)).any()
    ident = LinearCode(5, 5, np.eye(5, dtype=np.uint8))
    m = np.array([1, 0, 1, 1, 0], np.uint8)
    np.testing.assert_array_equal(encode(ident, m), m)
    with pytest.raises(ValueError):
        encode(c, np.zeros(3, np.uint8))


@pytest.mark.parametrize("k", range(1, 9))
def test_linearity_exhaustive(k):
    c = random_code(k, k + 5, 100 + k)
    msgs = all_msgs(k)
    words = {tuple(m): encode(c, m) for m in msgs}
    rng = np.random.default_rng(k)
    for i in rng.choice(len(msgs), size=min(len(msgs), 16), replace=False):
        a = msgs[i]
        for b in msgs:
            np.testing.assert_array_equal(words[tuple(a)] ^ words[tuple(b)], words[tuple(a ^ b)])


@given(st.integers(1, 8), st.integers(0, 8), st.integers(0, 2 ** 32))
def test_xor_closure(k1, k2, seed):
    k2 = min(k2, k1)
    rng = np.random.default_rng(seed)
    c = random_code(k1, k1 + 4, rng)
    u1 = rng.integers(0, 2, k1, dtype=np.uint8)
    u2 = rng.integers(0, 2, k2, dtype=np.uint8)
    np.testing.assert_array_equal(encode(c, u1) ^ encode(c, pad(u2, k1)), encode(c, u1 ^ pad(u2, k1)))
    # zero padding equals encoding with the last k2 rows
    np.testing.assert_array_equal(encode(c, pad(u2, k1)), encode(c.rows(k1 - k2), u2))


# ---- channel ----------------------------------------------------------------------

def test_bsc_examples():
    rng = np.random.default_rng(0)
    w = rng.integers(0, 2, 1000, dtype=np.uint8)
    np.testing.assert_array_equal(bsc(w, 0.0, rng), w)
    for e, tol in ((0.5, 0.02), (0.1, 0.01)):
        z = bsc(np.zeros(100_000, np.uint8), e, np.random.default_rng(1))
        assert abs(z.mean() - e) <= tol
    for bad in (-0.1, 0.6):
        with pytest.raises(ValueError):
            bsc(w, bad, rng)


# ---- decoders -------------------------------------------------------------------

def test_ml_decode_examples():
    c = random_code(6, 14, 2, full_rank=True)
    for m in all_msgs(6)[::7]:
        np.testing.assert_array_equal(ml_decode(c, encode(c, m)), m)
    rep = LinearCode(1, 3, np.ones((1, 3), np.uint8))
    assert ml_decode(rep, np.array([1, 1, 0], np.uint8)).tolist() == [1]
    assert ml_decode(rep, np.array([0, 1, 0], np.uint8)).tolist() == [0]


def test_ml_decode_tie_break_lexicographic():
    # two codewords equidistant from the received word: smallest message wins
    c = LinearCode(1, 2, np.array([[1, 1]], np.uint8))
    assert ml_decode(c, np.array([1, 0], np.uint8)).tolist() == [0]
    c = LinearCode(2, 2, np.array([[1, 0], [1, 0]], np.uint8))
    assert ml_decode(c, np.array([1, 0], np.uint8)).tolist() == [0, 1]


@pytest.mark.parametrize("k", [1, 3, 6, 10])
def test_ml_decode_is_minimum_distance(k):
    rng = np.random.default_rng(k)
    c = random_code(k, k + 6, rng)
    words = [encode(c, m) for m in all_msgs(k)]
    for _ in range(5):
        r = rng.integers(0, 2, c.n, dtype=np.uint8)
        d = hamming(r, encode(c, ml_decode(c, r)))
        assert all(d <= hamming(r, w) for w in words)


def test_ml_decode_cap():
    with pytest.raises(CapExceeded):
        ml_decode(random_code(17, 20, 0), np.zeros(20, np.uint8))
    ml_decode(random_code(4, 8, 0), np.zeros(8, np.uint8), cap=4)
    with pytest.raises(CapExceeded):
        ml_decode(random_code(5, 8, 0), np.zeros(8, np.uint8), cap=4)


def brute_joint(ca, cb, r):
    best = None
    for ia, a in enumerate(all_msgs(ca.k)):
        for ib, b in enumerate(all_msgs(cb.k)):
            d = hamming(r, encode(ca, a) ^ encode(cb, b))
            if best is None or d < best[0]:
                best = (d, a, b)
    return best[1], best[2]


def test_joint_decode_matches_brute_force():
    rng = np.random.default_rng(42)
    for _ in range(100):
        ca, cb = random_code(4, 16, rng), random_code(4, 16, rng)
        r = rng.integers(0, 2, 16, dtype=np.uint8)
        got = joint_ml_decode(ca, cb, r)
        want = brute_joint(ca, cb, r)
        np.testing.assert_array_equal(got[0], want[0])
        np.testing.assert_array_equal(got[1], want[1])


def test_joint_decode_noiseless_and_degenerate():
    rng = np.random.default_rng(3)
    ca = random_code(4, 12, rng, full_rank=True)
    while True:
        cb = random_code(3, 12, rng)
        if gf2_rank(np.vstack([ca.generator, cb.generator])) == 7:
            break
    a, b = rng.integers(0, 2, 4, dtype=np.uint8), rng.integers(0, 2, 3, dtype=np.uint8)
    ga, gb = joint_ml_decode(ca, cb, encode(ca, a) ^ encode(cb, b))
    np.testing.assert_array_equal(ga, a)
    np.testing.assert_array_equal(gb, b)
    empty = LinearCode(0, 12, np.zeros((0, 12), np.uint8))
    r = rng.integers(0, 2, 12, dtype=np.uint8)
    ga, gb = joint_ml_decode(ca, empty, r)
    np.testing.assert_array_equal(ga, ml_decode(ca, r))
    assert gb.size == 0


def test_joint_decode_cap():
    with pytest.raises(CapExceeded):
        joint_ml_decode(random_code(12, 30, 0), random_code(9, 30, 1), np.zeros(30, np.uint8))


# ---- simulation -----------------------------------------------------------------

def test_config_validation():
    ok = dict(scenario=NOISELESS, n=8, k1=2, k2=2)
    SimConfig(**ok)
    for bad in (dict(k1=0, k2=0), dict(k2=3), dict(n=3), dict(num_blocks=1), dict(trials=0),
                dict(relay_decoder="both"), dict(master_seed=-1), dict(master_seed=2 ** 64)):
        with pytest.raises(ValueError):
            SimConfig(**{**ok, **bad})
    with pytest.raises(CapExceeded):
        SimConfig(NOISELESS, 40, 20, 2)


def test_oriented_config_swaps_roles():
    b = BinaryScenario(0.01, 0.2, 0.05)
    cfg = oriented_config(b, 12, 2, 4, trials=30, master_seed=5)
    assert cfg.roles_swapped and (cfg.k1, cfg.k2) == (4, 2)
    assert (cfg.scenario.eps1, cfg.scenario.eps2) == (0.2, 0.01)
    rep = run_sim(cfg)
    direct = run_sim(SimConfig(cfg.scenario, 12, 4, 2, trials=30, master_seed=5))
    assert rep.rx1_error_rate == direct.rx2_error_rate
    assert rep.rx2_error_rate == direct.rx1_error_rate


def test_trial_streams_are_replayable():
    a = trial_streams(9, 3)["z1"].random(5)
    b = trial_streams(9, 3)["z1"].random(5)
    c = trial_streams(9, 4)["z1"].random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_codes_shared_between_modes():
    x = SimConfig(BinaryScenario(0.1, 0.1, 0.1), 16, 5, 3, relay_decoder="xor")
    j = SimConfig(BinaryScenario(0.1, 0.1, 0.1), 16, 5, 3, relay_decoder="joint")
    g1x, g2x, g3x = draw_codes(x, trial_streams(0, 0)["codebook"])
    g1j, g2j, g3j = draw_codes(j, trial_streams(0, 0)["codebook"])
    assert g1x == g1j and g3x == g3j
    assert g2x == g1x.rows(2)


@st.composite
def noiseless_configs(draw):
    n = draw(st.integers(2, 24))
    k1 = draw(st.integers(1, min(n - 1, 10)))
    k2 = draw(st.integers(1, min(k1, n - k1)))
    return SimConfig(NOISELESS, n, k1, k2, draw(st.integers(2, 6)), draw(st.integers(1, 5)),
                     draw(st.integers(0, 2 ** 64 - 1)), draw(st.sampled_from(["xor", "joint"])))


@given(noiseless_configs())
def test_noiseless_runs_are_exact(cfg):
    rep = run_sim(cfg)
    assert rep.relay_error_rate == rep.rx1_error_rate == rep.rx2_error_rate == 0
    assert rep.end_to_end_error_rate == 0


def test_smoke_report_shape():
    rep = run_sim(SimConfig(BinaryScenario(0.1, 0.1, 0.1), 8, 1, 1, trials=50, master_seed=1))
    for v in (rep.relay_error_rate, rep.rx1_error_rate, rep.rx2_error_rate, rep.end_to_end_error_rate):
        assert 0 <= v <= 1
    assert rep.relay_decodes == 50 * 3 and rep.rx_decodes == 50 * 4
    assert rep.end_to_end_error_rate >= max(rep.rx1_error_rate, rep.rx2_error_rate)


def test_determinism_and_serialization():
    cfg = SimConfig(BinaryScenario(0.05, 0.1, 0.15), 16, 4, 3, 3, 40, 77, "joint")
    a, b = run_sim(cfg), run_sim(cfg)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    doc = json.loads(a.to_json())
    for key in ("relay_error_rate", "rx1_error_rate", "rx2_error_rate", "end_to_end_error_rate",
                "trials", "blocks", "seed", "config"):
        assert key in doc
    lines = a.to_csv().splitlines()
    assert len(lines) == 2 and lines[0].split(",") == list(SimReport.CSV_FIELDS)


def test_trial_order_independent():
    cfg = SimConfig(BinaryScenario(0.05, 0.1, 0.15), 16, 4, 3, 3, 12, 5, "xor")
    fwd = np.sum([simulate_trial(cfg, t) for t in range(12)], axis=0)
    rev = np.sum([simulate_trial(cfg, t) for t in reversed(range(12))], axis=0)
    np.testing.assert_array_equal(fwd, rev)
    rep = run_sim(cfg)
    assert (rep.relay_errors, rep.rx1_errors, rep.rx2_errors, rep.trial_failures) == tuple(fwd)


def test_xor_beats_joint_relay_decoding_small():
    # reduced-trial version of the acceptance operating point
    kw = dict(scenario=BinaryScenario(0.05, 0.05, 0.2), n=24, k1=6, k2=6, num_blocks=4, trials=300, master_seed=8)
    x = run_sim(SimConfig(relay_decoder="xor", **kw))
    j = run_sim(SimConfig(relay_decoder="joint", **kw))
    assert 2 * x.relay_error_rate <= j.relay_error_rate
