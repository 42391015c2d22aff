import random
from fractions import Fraction

import pytest

from qmfmc.flow import INTEGER, RATIONAL, MultiplicativeFlow
from qmfmc.network import build_network, diamond2, parallel5, path_network

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def b23():
    return path_network(2, 3)


@pytest.fixture
def p5():
    return parallel5()


@pytest.fixture
def d2():
    return diamond2()


def random_network(rng: random.Random, max_vertices=6, max_edges=9, max_cap=9,
                   min_cap=1, connected=True):
    """Random multigraph with source 's' and sink 't'; retried until s-t connected."""
    while True:
        k = rng.randint(2, max_vertices)
        names = ["s", "t"] + [f"v{i}" for i in range(k - 2)]
        m = rng.randint(1, max_edges)
        edges = []
        for _ in range(m):
            u, v = rng.sample(names, 2)
            edges.append((u, v, rng.randint(min_cap, max_cap)))
        net = build_network(names, "s", "t", edges)
        if not connected or net.connected():
            return net


def _random_walk(net, rng, start, stop_at, max_len=12):
    """Directed walk as a list of (edge id, forward) until it reaches a vertex in stop_at."""
    x, walk = start, []
    for _ in range(max_len):
        inc = net.incident[x]
        if not inc:
            return None
        e = rng.choice(inc)
        walk.append((e.id, e.u == x))
        x = e.other(x)
        if x in stop_at:
            return walk
    return None


def random_flow(net, rng: random.Random, kind=INTEGER, moves=6):
    """Random valid flow built from multiplicative updates along walks.

    Each walk runs terminal-to-terminal or around a cycle, so conservation at
    internal vertices holds by construction; moves that would break a
    capacity are dropped.
    """
    ratio = {e.id: Fraction(1) for e in net.edges}  # used for rational kind
    pairs = {e.id: [1, 1] for e in net.edges}
    terminals = {net.source, net.sink}
    for _ in range(moves):
        if rng.random() < 0.6:
            start = rng.choice(sorted(terminals))
            walk = _random_walk(net, rng, start, terminals)
        else:
            start = rng.choice(net.vertices)
            walk = _random_walk(net, rng, start, {start})
        if not walk:
            continue
        if kind == RATIONAL:
            factor = Fraction(rng.randint(1, 4), rng.randint(1, 4))
            trial = dict(ratio)
            for i, fwd in walk:
                trial[i] *= factor if fwd else 1 / factor
            if all(Fraction(1, net.edges[i].capacity) <= r <= net.edges[i].capacity
                   for i, r in trial.items()):
                ratio = trial
        else:
            factor = rng.choice([2, 2, 3, 5])
            trial = {i: list(p) for i, p in pairs.items()}
            for i, fwd in walk:
                trial[i][0 if fwd else 1] *= factor
            if all(a * b <= net.edges[i].capacity for i, (a, b) in trial.items()):
                pairs = trial
    if kind == RATIONAL:
        values = tuple((r, Fraction(1)) if r >= 1 else (Fraction(1), 1 / r)
                       for _, r in sorted(ratio.items()))
        return MultiplicativeFlow(values, RATIONAL)
    return MultiplicativeFlow(tuple(tuple(p) for _, p in sorted(pairs.items())), kind)


def random_cut_side(net, rng: random.Random):
    return {net.source} | {v for v in net.internal_vertices if rng.random() < 0.5}
