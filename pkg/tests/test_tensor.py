import random

import numpy as np
import pytest

from qmfmc.flow import quantum_min_cut
from qmfmc.network import build_network, scale_network
from qmfmc.tensor import (
    BudgetExceeded,
    contract,
    contract_random,
    estimate_qmf_tilde,
    rank_mod_p,
    zero_assignment,
)

from conftest import random_network


def test_rank_mod_p_small():
    assert rank_mod_p(np.array([[1, 2], [2, 4]]), 7) == 1
    assert rank_mod_p(np.array([[1, 2], [3, 4]]), 7) == 2
    # determinant -2 vanishes mod 2
    assert rank_mod_p(np.array([[1, 2], [3, 4]]), 2) == 1
    assert rank_mod_p(np.zeros((3, 5), dtype=np.int64), 5) == 0


def python_rank(rows, q):
    """Row reduction on plain Python ints."""
    rows = [[x % q for x in r] for r in rows]
    rank = 0
    for c in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], q - 2, q)
        rows[rank] = [x * inv % q for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                k = rows[i][c]
                rows[i] = [(x - k * y) % q for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@pytest.mark.parametrize("q", [2, 3, 1_000_003])
def test_rank_mod_p_against_python(q):
    rng = np.random.default_rng(q)
    for _ in range(40):
        r, c, k = rng.integers(1, 9, size=3)
        m = (rng.integers(0, q, size=(r, k)) @ rng.integers(0, q, size=(k, c)).astype(object)) % q
        m = np.array(m, dtype=np.int64)
        assert rank_mod_p(m, q) == python_rank(m.tolist(), q)


def test_zero_assignment_rank_zero(b23):
    assert contract(b23, zero_assignment(b23)).rank == 0


def test_b23_full_rank(b23):
    res = contract_random(b23, seed=0)
    assert res.rank == 2 and (res.source_dim, res.sink_dim) == (2, 3)
    assert res.matrix().shape == (2, 3)


def test_direct_edge_identity_factor():
    net = build_network(["s", "t"], "s", "t", [("s", "t", 4), ("s", "t", 3)])
    res = contract_random(net, seed=1)
    assert res.rank == 12
    assert (res.matrix() == np.eye(12, dtype=np.int64)).all()


def test_parallel5_bounded(p5):
    ranks = {contract_random(p5, seed).rank for seed in range(100)}
    assert max(ranks) <= 5
    assert estimate_qmf_tilde(p5, trials=20).rank == 5


def test_budget(p5):
    with pytest.raises(BudgetExceeded):
        contract_random(scale_network(p5, 100), seed=0, budget=1000)


def test_non_prime_field(b23):
    with pytest.raises(ValueError, match="not prime"):
        contract_random(b23, seed=0, q=12)


def test_deterministic(d2):
    a = contract_random(d2, seed=3)
    b = contract_random(d2, seed=3)
    assert a.rank == b.rank and (a.matrix() == b.matrix()).all()


def test_component_factorization_matches_full_contraction():
    # two internal vertices joined only through s and t give two factors
    net = build_network(["s", "a", "b", "t"], "s", "t",
                        [("s", "a", 2), ("a", "t", 3), ("s", "b", 3), ("b", "t", 2)])
    res = contract_random(net, seed=4)
    assert len(res.factors) == 2
    assert rank_mod_p(res.matrix(), res.q) == res.rank == 4


def test_random_bound():
    rng = random.Random(8)
    for _ in range(30):
        net = random_network(rng, max_vertices=5, max_edges=6, max_cap=4)
        est = estimate_qmf_tilde(net, trials=5, seed=rng.randrange(10**6))
        assert est.rank <= quantum_min_cut(net)[0]
