import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polar_po.path_algebra import (
    ConvMapping,
    all_paths,
    build_convolution_mapping,
    butterfly_pairs,
    conv_layer,
    convolves,
    convolves_xor,
    parse_path,
    path_position,
    position_path,
)


def test_paths():
    assert parse_path("0110") == "0110"
    assert path_position("00") == 1 and path_position("11") == 4
    assert position_path(6, 4) == "0101"
    assert all_paths(2) == ["00", "01", "10", "11"]
    for bad in ("", "012", "ab"):
        with pytest.raises(ValueError):
            parse_path(bad)


@pytest.mark.parametrize("i, j, N, expected", [(1, 3, 4, True), (2, 3, 4, False), (5, 6, 16, True)])
def test_convolves_examples(i, j, N, expected):
    assert convolves(i, j, N) is expected


@pytest.mark.parametrize("args", [(3, 3, 4), (3, 2, 4), (1, 5, 4), (1, 2, 6), (0, 1, 4)])
def test_convolves_errors(args):
    with pytest.raises(ValueError):
        convolves(*args)


@pytest.mark.parametrize("i, j, N, layer", [(1, 3, 4, 1), (1, 2, 4, 2), (4, 8, 8, 1)])
def test_conv_layer_examples(i, j, N, layer):
    assert conv_layer(i, j, N) == layer


def test_conv_layer_rejects_non_pairs():
    with pytest.raises(ValueError):
        conv_layer(2, 3, 4)


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32, 64, 128, 256])
def test_recursion_matches_butterfly_trace(N):
    trace = butterfly_pairs(N)
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            assert convolves(i, j, N) == ((i, j) in trace)
            assert convolves_xor(i, j) == ((i, j) in trace)
            if (i, j) in trace:
                assert conv_layer(i, j, N) == trace[(i, j)]


def test_layer_antitone_in_offset():
    N = 64
    trace = butterfly_pairs(N)
    by_offset = {}
    for (i, j), layer in trace.items():
        by_offset.setdefault((i - 1) ^ (j - 1), set()).add(layer)
    offs = sorted(by_offset)
    assert all(len(by_offset[o]) == 1 for o in offs)
    layers = [by_offset[o].pop() for o in offs]
    assert layers == sorted(layers, reverse=True)


def test_mapping_examples():
    assert build_convolution_mapping(5).as_dict() == {1: 9, 2: 10, 3: 7, 4: 8, 5: 6}
    assert build_convolution_mapping(1).as_dict() == {1: 2}
    assert build_convolution_mapping(4).as_dict() == {1: 5, 2: 6, 3: 7, 4: 8}
    assert build_convolution_mapping(5).N == 16


def test_mapping_json_roundtrip():
    cm = build_convolution_mapping(11)
    text = cm.to_json()
    assert all(len(p) == 2 for p in json.loads(text))
    assert ConvMapping.from_json(text).as_dict() == cm.as_dict()


def test_invalid_mapping_detected():
    assert not ConvMapping(2, ((1, 4), (2, 3))).is_valid()


@given(st.integers(1, 600))
def test_mapping_valid(K):
    cm = build_convolution_mapping(K)
    d = cm.as_dict()
    assert sorted(d) == list(range(1, K + 1))
    assert sorted(d.values()) == list(range(K + 1, 2 * K + 1))
    assert all(convolves(x, y, cm.N) for x, y in d.items())
