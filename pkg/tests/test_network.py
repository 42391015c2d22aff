import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from qmfmc.arith import expand, factorize, is_prime, valuation
from qmfmc.network import (
    NetworkError,
    Traversal,
    build_network,
    diamond2,
    parallel5,
    parse_network,
    path_network,
    scale_network,
    serialize_network,
    to_dot,
)

from conftest import random_network

PARALLEL5_JSON = (
    '{"vertices":["s","v","t"],"source":"s","sink":"t","edges":'
    '[{"u":"s","v":"v","d":2},{"u":"s","v":"v","d":3},{"u":"v","v":"t","d":5}]}'
)


def test_parse_path():
    net = parse_network(
        '{"vertices":["s","v","t"],"source":"s","sink":"t",'
        '"edges":[{"u":"s","v":"v","d":2},{"u":"v","v":"t","d":3}]}'
    )
    assert len(net.vertices) == 3
    assert [e.capacity for e in net.edges] == [2, 3]
    assert net == path_network(2, 3)


def test_parse_parallel_edges_get_distinct_ids():
    net = parse_network(PARALLEL5_JSON)
    between = [e.id for e in net.edges if {e.u, e.v} == {"s", "v"}]
    assert between == [0, 1]
    assert net == parallel5()


@pytest.mark.parametrize(
    "text, message",
    [
        ('{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"s","d":2}]}', "self-loop"),
        ('{"vertices":["s","t"],"sink":"t","edges":[]}', "source"),
        ('{"vertices":["s","t"],"source":"s","source":"t","sink":"t","edges":[]}', "duplicate"),
        ('{"vertices":["s","t"],"source":"s","sink":"s","edges":[]}', "differ"),
        ('{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"t","d":0}]}', "< 1"),
        ('{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"x","d":2}]}', "unknown"),
        ('{"vertices":["s","t"], "source":', "invalid JSON"),
        ('{"vertices":["s","t"],"source":["s"],"sink":"t","edges":[]}', "single vertex"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(NetworkError, match=message):
        parse_network(text)


def test_capacity_one_is_accepted():
    net = build_network(["s", "t"], "s", "t", [("s", "t", 1)])
    assert net.edges[0].capacity == 1


def test_scale():
    b = path_network(2, 3)
    assert scale_network(b, 1) == b
    assert scale_network(b, 5) == path_network(10, 15)
    assert [e.capacity for e in scale_network(parallel5(), 5)] == [10, 15, 25]
    with pytest.raises(ValueError):
        scale_network(b, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 50), st.integers(1, 50))
def test_scale_composes(seed, a, b):
    net = random_network(random.Random(seed), connected=False)
    assert scale_network(scale_network(net, a), b) == scale_network(net, a * b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip(seed):
    net = random_network(random.Random(seed), connected=False)
    assert parse_network(serialize_network(net)) == net


def test_dot_mentions_every_edge():
    dot = to_dot(parallel5())
    assert dot.startswith("graph network {")
    assert dot.count(" -- ") == 3
    assert "d=5" in dot


def test_traversal_json():
    tr = Traversal(2, False)
    assert tr.to_json() == {"edge": 2, "dir": "bwd"}
    assert Traversal.from_json(tr.to_json()) == tr
    net = diamond2()
    assert (tr.tail(net), tr.head(net)) == ("t", "a")


def test_connected():
    net = build_network(["s", "v", "w", "t"], "s", "t", [("s", "v", 2), ("w", "t", 3)])
    assert not net.connected()
    assert parallel5().connected()


# --- factorization -----------------------------------------------------------


def naive_factor(m):
    out, d = {}, 2
    while m > 1:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    return out


def test_factorize_examples():
    assert factorize(1) == {}
    assert factorize(12) == {2: 2, 3: 1}
    expected = naive_factor(9699690)
    assert expected == {2: 1, 3: 1, 5: 1, 7: 1, 11: 1, 13: 1, 17: 1, 19: 1}
    assert factorize(9699690) == expected
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_big_smooth():
    m = 2**200 * 3**77 * 1_000_003
    assert factorize(m) == {2: 200, 3: 77, 1_000_003: 1}


def test_factorize_exhaustive_to_a_million():
    limit = 10**6
    spf = list(range(limit + 1))
    for i in range(2, int(limit**0.5) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    for m in range(1, limit + 1):
        f = factorize(m)
        assert expand(f) == m
        if m > 1:
            assert min(f) == spf[m]


def test_is_prime_and_valuation():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert valuation(12, 2) == 2
    assert valuation(__import__("fractions").Fraction(5, 8), 2) == -3
