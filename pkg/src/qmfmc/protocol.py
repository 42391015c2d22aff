"""Teleportation protocols extracted from strict optimal flows.

A protocol is a sequence of prime-dimensional teleportations, each along a
source-to-sink path. Running it consumes, on every edge, the product of the
dimensions of the steps that cross that edge; this must stay within the
edge's capacity. Simulation here is dimension bookkeeping only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .arith import is_prime
from .flow import (
    FlowError,
    MultiplicativeFlow,
    exponent_flows,
    flow_value,
    is_strict,
    quantum_min_cut,
    verify_flow,
)
from .network import Network, Traversal


@dataclass(frozen=True)
class TeleportStep:
    dimension: int
    path: tuple[Traversal, ...]

    def to_json(self) -> dict:
        return {"p": self.dimension, "path": [tr.to_json() for tr in self.path]}


@dataclass(frozen=True)
class Protocol:
    steps: tuple[TeleportStep, ...] = ()

    @property
    def claimed_dimension(self) -> int:
        return prod(s.dimension for s in self.steps)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "dimension": self.claimed_dimension}

    @classmethod
    def from_json(cls, data: dict) -> "Protocol":
        steps = tuple(
            TeleportStep(int(s["p"]), tuple(Traversal.from_json(t) for t in s["path"]))
            for s in data["steps"]
        )
        prot = cls(steps)
        if "dimension" in data and int(data["dimension"]) != prot.claimed_dimension:
            raise ValueError(
                f"declared dimension {data['dimension']} != product of steps {prot.claimed_dimension}"
            )
        return prot


def _positive_out(net: Network, alpha, x: str):
    for e in net.incident[x]:
        forward = e.u == x
        if alpha[e.id][0 if forward else 1] > 0:
            yield Traversal(e.id, forward)


def _find_cycle(net: Network, alpha) -> list[Traversal] | None:
    """A directed cycle in the positive support, searched from the lowest vertex."""
    color = {v: 0 for v in net.vertices}  # 0 new, 1 on stack, 2 done
    for root in net.vertices:
        if color[root]:
            continue
        stack = [(root, _positive_out(net, alpha, root))]
        trail: list[Traversal] = []
        color[root] = 1
        while stack:
            x, it = stack[-1]
            tr = next(it, None)
            if tr is None:
                color[x] = 2
                stack.pop()
                if trail:
                    trail.pop()
                continue
            y = tr.head(net)
            if color[y] == 1:
                # cycle: from y's position on the stack back to x, plus tr
                start = next(i for i, (v, _) in enumerate(stack) if v == y)
                return trail[start:] + [tr]
            if color[y] == 0:
                color[y] = 1
                trail.append(tr)
                stack.append((y, _positive_out(net, alpha, y)))
    return None


def decompose(net: Network, f: MultiplicativeFlow) -> tuple[Protocol, dict[int, list[list[int]]]]:
    """Extract the protocol and return it with the residual exponents per prime.

    Per prime (ascending): cancel every cycle of positive exponent, then peel
    off source-to-sink paths one unit at a time, lowest edge id first. Each
    unit is one teleportation step of that prime's dimension.
    """
    report = verify_flow(net, f)
    if not report.ok:
        raise FlowError(f"flow is invalid: {report.violations[0].detail}")
    if not is_strict(net, f):
        raise FlowError("protocol extraction needs a strict flow")
    qmc, _ = quantum_min_cut(net)
    if flow_value(net, f) != qmc:
        raise FlowError(f"flow value {flow_value(net, f)} is not the quantum min-cut {qmc}")

    steps: list[TeleportStep] = []
    residual: dict[int, list[list[int]]] = {}
    for p, ef in exponent_flows(f).items():
        alpha = [list(x) for x in ef.exponents]
        while (cycle := _find_cycle(net, alpha)) is not None:
            k = min(alpha[c.edge][0 if c.forward else 1] for c in cycle)
            for c in cycle:
                alpha[c.edge][0 if c.forward else 1] -= k
        while (first := next(_positive_out(net, alpha, net.source), None)) is not None:
            path = [first]
            x = first.head(net)
            while x != net.sink:
                tr = next(_positive_out(net, alpha, x), None)
                if tr is None:
                    raise FlowError(f"prime {p}: path from source stalls at {x!r}")
                path.append(tr)
                x = tr.head(net)
            k = min(alpha[c.edge][0 if c.forward else 1] for c in path)
            for c in path:
                alpha[c.edge][0 if c.forward else 1] -= k
            steps.extend(TeleportStep(p, tuple(path)) for _ in range(k))
        residual[p] = alpha
    return Protocol(tuple(steps)), residual


def extract_protocol(net: Network, f: MultiplicativeFlow) -> Protocol:
    protocol, residual = decompose(net, f)
    leftover = [p for p, alpha in residual.items() if any(a or b for a, b in alpha)]
    if leftover:
        raise FlowError(f"nonzero residual exponent flow for primes {leftover}")
    return protocol


@dataclass
class SimulationReport:
    usage: list[int]
    dimension: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "usage": {str(i): u for i, u in enumerate(self.usage)},
            "dimension": self.dimension,
            "ok": self.ok,
            "violations": list(self.violations),
        }


def simulate_protocol(net: Network, prot: Protocol, claimed: int | None = None) -> SimulationReport:
    """Replay the steps, multiplying each traversed edge's usage by the step dimension.

    The order of steps does not affect the result. ``claimed`` defaults to
    the protocol's own dimension; pass the target (e.g. QMC) to check it.
    """
    usage = [1] * len(net.edges)
    dimension = 1
    bad: list[str] = []
    for k, step in enumerate(prot.steps):
        if not is_prime(step.dimension):
            bad.append(f"step {k}: dimension {step.dimension} is not prime")
        x = net.source
        for tr in step.path:
            if not 0 <= tr.edge < len(net.edges):
                bad.append(f"step {k}: unknown edge {tr.edge}")
                break
            if tr.tail(net) != x:
                bad.append(f"step {k}: edge {tr.edge} does not continue the path at {x!r}")
                break
            usage[tr.edge] *= step.dimension
            x = tr.head(net)
        else:
            if x != net.sink:
                bad.append(f"step {k}: path ends at {x!r}, not the sink")
        dimension *= step.dimension
    for e in net.edges:
        if usage[e.id] > e.capacity:
            bad.append(f"edge {e.id}: usage {usage[e.id]} > capacity {e.capacity}")
    target = prot.claimed_dimension if claimed is None else claimed
    if dimension != target:
        bad.append(f"transmitted dimension {dimension} != claimed {target}")
    return SimulationReport(usage, dimension, bad)
