import pytest

from qmfmc.flow import FlowError, MultiplicativeFlow, STRICT, integer_flow, strictify
from qmfmc.network import Traversal, scale_network
from qmfmc.protocol import (
    Protocol,
    TeleportStep,
    decompose,
    extract_protocol,
    simulate_protocol,
)


def strict_pipeline(net):
    n, f = integer_flow(net)
    scaled = scale_network(net, n)
    g, _ = strictify(scaled, f)
    return scaled, g


def test_scaled_parallel5_two_steps(p5):
    net = scale_network(p5, 5)
    f = MultiplicativeFlow(((5, 1), (5, 1), (25, 1)), STRICT)
    prot = extract_protocol(net, f)
    assert [s.dimension for s in prot.steps] == [5, 5]
    assert [[tr.edge for tr in s.path] for s in prot.steps] == [[0, 2], [1, 2]]
    sim = simulate_protocol(net, prot, claimed=25)
    assert sim.ok and sim.usage == [5, 5, 25] and sim.dimension == 25


@pytest.mark.parametrize("name", ["b23", "p5", "d2"])
def test_pipeline_fixtures(name, request):
    net, f = strict_pipeline(request.getfixturevalue(name))
    prot, residual = decompose(net, f)
    assert all(a == 0 and b == 0 for alpha in residual.values() for a, b in alpha)
    from qmfmc.flow import quantum_min_cut

    qmc = quantum_min_cut(net)[0]
    sim = simulate_protocol(net, prot, claimed=qmc)
    assert sim.ok and sim.dimension == qmc


def test_rejects_non_strict_or_suboptimal(p5):
    with pytest.raises(FlowError, match="strict"):
        extract_protocol(p5, MultiplicativeFlow(((2, 1), (1, 2), (1, 1))))
    with pytest.raises(FlowError, match="quantum min-cut"):
        extract_protocol(p5, MultiplicativeFlow(((2, 1), (2, 1), (4, 1)), STRICT))


def test_simulator_catches_overuse(p5):
    path = (Traversal(0, True), Traversal(2, True))
    prot = Protocol((TeleportStep(2, path), TeleportStep(2, path)))
    sim = simulate_protocol(p5, prot)
    assert not sim.ok
    assert any("edge 0" in v for v in sim.violations)


def test_simulator_checks_paths_and_claims(p5):
    broken = Protocol((TeleportStep(3, (Traversal(2, True),)),))
    assert any("does not continue" in v for v in simulate_protocol(p5, broken).violations)
    short = Protocol((TeleportStep(2, (Traversal(0, True),)),))
    assert any("not the sink" in v for v in simulate_protocol(p5, short).violations)
    ok = Protocol((TeleportStep(5, (Traversal(1, True), Traversal(2, True))),))
    assert any("capacity" in v for v in simulate_protocol(p5, ok).violations)
    composite = Protocol((TeleportStep(4, (Traversal(0, True),)),))
    assert any("not prime" in v for v in simulate_protocol(p5, composite).violations)
    two = Protocol((TeleportStep(2, (Traversal(0, True), Traversal(2, True))),))
    rep = simulate_protocol(p5, two, claimed=5)
    assert rep.violations == ["transmitted dimension 2 != claimed 5"]


def test_order_does_not_matter(d2):
    net, f = strict_pipeline(d2)
    prot = extract_protocol(net, f)
    rev = Protocol(tuple(reversed(prot.steps)))
    assert simulate_protocol(net, prot).usage == simulate_protocol(net, rev).usage


def test_json_round_trip(p5):
    net, f = strict_pipeline(p5)
    prot = extract_protocol(net, f)
    assert Protocol.from_json(prot.to_json()) == prot
    data = prot.to_json()
    data["dimension"] += 1
    with pytest.raises(ValueError):
        Protocol.from_json(data)
