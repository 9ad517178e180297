import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polar_po.bec_engine import path_bhattacharyya
from polar_po.bmsc_engine import (
    FiniteBmsc,
    check_bounds,
    parse_channel,
    rate_matched_channel_vector,
    synthetic_bhattacharyya,
    synthetic_channel,
    transform_down,
    transform_up,
)
from polar_po.path_algebra import all_paths
from polar_po.ratematch import RateMatchSpec


def capacity(W: FiniteBmsc) -> float:
    q = W.q
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where((q > 0) & (q < 1), -q * np.log2(q) - (1 - q) * np.log2(1 - q), 0.0)
    return float(np.sum(W.p * (1 - h)))


channels = st.one_of(
    st.floats(0.0, 0.5).map(FiniteBmsc.bsc),
    st.floats(0.0, 1.0).map(FiniteBmsc.bec),
    st.lists(st.tuples(st.floats(0.0, 0.5), st.floats(0.01, 1.0)), min_size=1, max_size=5).map(
        lambda a: FiniteBmsc(np.array([q for q, _ in a]), np.array([p for _, p in a]) / sum(p for _, p in a))),
)


def test_basic_parameters():
    assert FiniteBmsc.bec(0.3).bhattacharyya == pytest.approx(0.3, abs=1e-15)
    d = 0.11
    W = FiniteBmsc.bsc(d)
    assert W.bhattacharyya == pytest.approx(2 * math.sqrt(d * (1 - d)), rel=1e-14)
    assert W.error_probability == pytest.approx(d)
    assert FiniteBmsc.noise().bhattacharyya == 1.0
    assert FiniteBmsc.certain().bhattacharyya == 0.0
    assert FiniteBmsc.bsc(0.9).q[0] == pytest.approx(0.1)


@given(channels, channels)
def test_capacity_conservation(W1, W2):
    up, down = transform_up(W1, W2), transform_down(W1, W2)
    assert capacity(up) + capacity(down) == pytest.approx(capacity(W1) + capacity(W2), abs=1e-9)
    assert up.p.sum() == pytest.approx(1.0) and down.p.sum() == pytest.approx(1.0)


@given(channels)
def test_single_channel_transform_rules(W):
    z = W.bhattacharyya
    down = transform_down(W, W)
    up = transform_up(W, W)
    assert down.bhattacharyya == pytest.approx(z * z, abs=1e-12)
    assert up.bhattacharyya <= 2 * z - z * z + 1e-12
    # sqrt(1 - (1 - z^2)^2) written without cancellation; the BSC attains it
    assert up.bhattacharyya >= z * math.sqrt(2 - z * z) * (1 - 1e-12) - 1e-15


@pytest.mark.parametrize("spec", ["none", "punc:1/4", "short:1/2", "punc:3/4", "short:3/8"])
def test_erasure_channel_matches_bec_engine(spec):
    m = RateMatchSpec.parse(spec).m
    for n in range(max(m, 1), 4):
        for alpha in all_paths(n):
            for eps in (0.2, 0.5, 0.8):
                got = synthetic_bhattacharyya(FiniteBmsc.bec(eps), spec, alpha)
                assert got == pytest.approx(path_bhattacharyya(spec, alpha, eps), abs=1e-12)


def test_erasure_channel_stays_erasure():
    W = synthetic_channel(FiniteBmsc.bec(0.4), "punc:1/4", "0110")
    assert set(np.round(W.q, 12)) <= {0.0, 0.5}


def test_rate_matched_vector():
    W = FiniteBmsc.bsc(0.1)
    v = rate_matched_channel_vector(W, "punc:1/4", 8)
    assert [x.bhattacharyya for x in v[:2]] == [1.0, 1.0] and v[2] is W
    v = rate_matched_channel_vector(W, "short:1/4", 8)
    assert [x.bhattacharyya for x in v[-2:]] == [0.0, 0.0]


def test_awgn_quantization_is_degraded():
    for snr in (-1.0, 1.0, 3.0):
        true_z = math.exp(-(10 ** (snr / 10)))
        W = FiniteBmsc.awgn(snr, levels=256)
        assert W.bhattacharyya >= true_z - 1e-12
        assert W.bhattacharyya == pytest.approx(true_z, rel=0.05)
    coarse, fine = FiniteBmsc.awgn(1.0, 16), FiniteBmsc.awgn(1.0, 256)
    assert coarse.bhattacharyya >= fine.bhattacharyya


def test_merging_respects_tolerance():
    W = FiniteBmsc(np.array([0.1, 0.1 + 1e-16, 0.2]), np.array([0.25, 0.25, 0.5]))
    assert len(W) == 2


@pytest.mark.parametrize("delta", [0.05, 0.2, 0.45])
def test_bounds_sandwich(delta):
    W = FiniteBmsc.bsc(delta)
    for alpha in all_paths(3):
        r = check_bounds(W, "punc:1/4", alpha)
        assert r.passed, r
        r = check_bounds(W, "short:1/2", alpha[:2], gamma=alpha[2:])
        assert r.passed, r


def test_bec_upper_bound_tight():
    r = check_bounds(FiniteBmsc.bec(0.3), "punc:3/4", "0101")
    assert abs(r.upper_gap) <= 1e-12


def test_parse_channel():
    assert parse_channel("bec:0.5").bhattacharyya == pytest.approx(0.5)
    assert parse_channel("BSC:0.11").label == "bsc:0.11"
    assert parse_channel("awgn:2.2dB", levels=8).label.startswith("awgn:2.2")
    for bad in ("gauss:1", "bec:", "bec:x"):
        with pytest.raises(ValueError):
            parse_channel(bad)


def test_validation():
    with pytest.raises(ValueError):
        FiniteBmsc(np.array([0.1]), np.array([0.5]))
    with pytest.raises(ValueError):
        FiniteBmsc(np.array([0.7]), np.array([1.0]))
    with pytest.raises(ValueError):
        synthetic_channel(FiniteBmsc.bsc(0.1), "none", "00000")
    with pytest.raises(ValueError):
        synthetic_channel(FiniteBmsc.bsc(0.1), "punc:1/4", "0")
