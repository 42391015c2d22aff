import random

import pytest

from qmfmc.flow import flow_value, quantum_min_cut, verify_flow
from qmfmc.network import build_network, path_network, scale_network
from qmfmc.oracles import (
    OracleLimitError,
    best_integer_flow,
    brute_force_min_cut_cardinality,
    brute_force_qmc,
    brute_force_qmf,
    enumerate_cuts,
)

from conftest import random_flow, random_network


def test_enumerate_cut_count(d2):
    assert len(list(enumerate_cuts(d2))) == 4


def test_qmf_fixtures(b23, p5):
    assert brute_force_qmf(b23) == 2
    assert brute_force_qmf(p5, strict=True) == 4
    assert brute_force_qmf(scale_network(p5, 2), strict=True) == 10


def test_best_flow_is_valid(p5):
    value, f = best_integer_flow(p5, strict=True)
    rep = verify_flow(p5, f)
    assert rep.ok and flow_value(p5, f) == value


def test_cap_enforced():
    net = path_network(1000, 1000)
    with pytest.raises(OracleLimitError):
        brute_force_qmf(net, cap=100)


def test_cap_from_environment(monkeypatch, p5):
    monkeypatch.setenv("QMFMC_ORACLE_CAP", "5")
    with pytest.raises(OracleLimitError):
        brute_force_qmf(p5)


def naive_qmf(net, strict):
    """Plain product enumeration with no pruning, for tiny instances."""
    from itertools import product

    from qmfmc.flow import INTEGER, STRICT, MultiplicativeFlow

    choices = [[(a, b) for a in range(1, e.capacity + 1) for b in range(1, e.capacity // a + 1)]
               for e in net.edges]
    best = None
    for combo in product(*choices):
        f = MultiplicativeFlow(combo, STRICT if strict else INTEGER)
        if verify_flow(net, f).ok:
            v = flow_value(net, f)
            best = v if best is None else max(best, v)
    return best


def test_pruned_search_matches_naive():
    rng = random.Random(17)
    for _ in range(40):
        net = random_network(rng, max_vertices=4, max_edges=4, max_cap=6)
        for strict in (False, True):
            assert brute_force_qmf(net, strict) == naive_qmf(net, strict)


def test_ordering_random():
    rng = random.Random(2)
    for _ in range(40):
        net = random_network(rng, max_vertices=5, max_edges=6, max_cap=6)
        qs = brute_force_qmf(net, strict=True)
        q = brute_force_qmf(net)
        assert qs <= q <= quantum_min_cut(net)[0]
        assert brute_force_min_cut_cardinality(net) >= 1
