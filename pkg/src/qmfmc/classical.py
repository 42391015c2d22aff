"""Classical additive max-flow / min-cut over an ordered value group.

Capacities live in the group ``Z x Q_{>0}`` ordered lexicographically: the
first coordinate counts edges, the second is a logarithm stored through its
exponential, so adding two log-capacities multiplies their rationals. This
keeps ``log d`` exact: a max-flow value ``(0, w)`` means ``exp(value) = w``.

Augmenting paths are found breadth-first (Edmonds-Karp), which terminates
after O(V·E) augmentations in any ordered abelian group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Hashable, Sequence

from .network import EdgeInstance, Network, Traversal


@total_ordering
@dataclass(frozen=True)
class GroupValue:
    count: int = 0
    logweight: Fraction = Fraction(1)

    def __post_init__(self):
        lw = Fraction(self.logweight)
        if lw <= 0:
            raise ValueError(f"logweight must be positive, got {lw}")
        object.__setattr__(self, "logweight", lw)

    def __add__(self, other: "GroupValue") -> "GroupValue":
        return GroupValue(self.count + other.count, self.logweight * other.logweight)

    def __sub__(self, other: "GroupValue") -> "GroupValue":
        return GroupValue(self.count - other.count, self.logweight / other.logweight)

    def __neg__(self) -> "GroupValue":
        return GroupValue(-self.count, 1 / self.logweight)

    def __lt__(self, other: "GroupValue") -> bool:
        return (self.count, self.logweight) < (other.count, other.logweight)

    def is_zero(self) -> bool:
        return self.count == 0 and self.logweight == 1

    def __repr__(self) -> str:
        return f"GroupValue({self.count}, {self.logweight})"


ZERO = GroupValue()


@dataclass(frozen=True)
class Arc:
    tail: Hashable
    head: Hashable
    capacity: GroupValue
    label: Hashable = None


@dataclass(frozen=True)
class DirectedCapacityGraph:
    vertices: tuple
    arcs: tuple[Arc, ...]
    source: Hashable
    sink: Hashable

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        known = set(self.vertices)
        if self.source not in known or self.sink not in known:
            raise ValueError("source and sink must be vertices")
        for a in self.arcs:
            if a.tail not in known or a.head not in known:
                raise ValueError(f"arc {a} references an unknown vertex")
            if a.capacity < ZERO:
                raise ValueError(f"negative capacity on arc {a}")


@dataclass(frozen=True)
class ClassicalFlow:
    flows: tuple[GroupValue, ...]
    value: GroupValue
    # residual-reachable vertices at termination (source side of the min cut)
    source_side: frozenset


@dataclass(frozen=True)
class DigraphCut:
    source_side: frozenset
    sink_side: frozenset
    arcs: tuple[int, ...]
    capacity: GroupValue


def _sum(values) -> GroupValue:
    out = ZERO
    for v in values:
        out = out + v
    return out


def max_flow(g: DirectedCapacityGraph) -> ClassicalFlow:
    """Edmonds-Karp with lowest-arc-id tie-breaking."""
    flows = [ZERO] * len(g.arcs)
    # adjacency: vertex -> [(arc index, is_forward_residual)], sorted by arc id
    adj: dict = {v: [] for v in g.vertices}
    for i, a in enumerate(g.arcs):
        adj[a.tail].append((i, True))
        adj[a.head].append((i, False))

    def residual(i: int, forward: bool) -> GroupValue:
        return g.arcs[i].capacity - flows[i] if forward else flows[i]

    while True:
        pred: dict = {g.source: None}
        queue = deque([g.source])
        while queue and g.sink not in pred:
            x = queue.popleft()
            for i, fwd in adj[x]:
                y = g.arcs[i].head if fwd else g.arcs[i].tail
                if y in pred or not (residual(i, fwd) > ZERO):
                    continue
                pred[y] = (i, fwd, x)
                queue.append(y)
        if g.sink not in pred:
            break
        path = []
        y = g.sink
        while pred[y] is not None:
            i, fwd, x = pred[y]
            path.append((i, fwd))
            y = x
        bottleneck = min(residual(i, fwd) for i, fwd in path)
        for i, fwd in path:
            flows[i] = flows[i] + bottleneck if fwd else flows[i] - bottleneck

    value = _sum(flows[i] for i, a in enumerate(g.arcs) if a.tail == g.source) - _sum(
        flows[i] for i, a in enumerate(g.arcs) if a.head == g.source
    )
    return ClassicalFlow(tuple(flows), value, frozenset(pred))


def min_cut(g: DirectedCapacityGraph, flow: ClassicalFlow | None = None) -> DigraphCut:
    """Residual-reachability cut; its capacity equals the max-flow value."""
    if flow is None:
        flow = max_flow(g)
    side = flow.source_side
    crossing = tuple(
        i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side
    )
    return DigraphCut(
        side,
        frozenset(g.vertices) - side,
        crossing,
        _sum(g.arcs[i].capacity for i in crossing),
    )


def integral_max_flow(g: DirectedCapacityGraph) -> tuple[list[int], int]:
    """Max flow for pure integer capacities; returns per-arc ints and the value."""
    for a in g.arcs:
        if a.capacity.logweight != 1:
            raise ValueError(f"non-integer capacity {a.capacity} on arc {a}")
    flow = max_flow(g)
    return [f.count for f in flow.flows], flow.value.count


# ---------------------------------------------------------------------------
# Network-level cuts and reductions


@dataclass(frozen=True)
class Cut:
    source_side: frozenset
    sink_side: frozenset
    cut_edges: tuple[int, ...]
    capacity_product: int

    @property
    def cardinality(self) -> int:
        return len(self.cut_edges)

    @classmethod
    def from_side(cls, net: Network, source_side) -> "Cut":
        side = frozenset(source_side)
        if net.source not in side or net.sink in side:
            raise ValueError("cut must put the source on one side and the sink on the other")
        if not side <= set(net.vertices):
            raise ValueError("cut side contains unknown vertices")
        crossing = tuple(e.id for e in net.edges if (e.u in side) != (e.v in side))
        product = 1
        for i in crossing:
            product *= net.edges[i].capacity
        return cls(side, frozenset(net.vertices) - side, crossing, product)

    def to_json(self) -> dict:
        return {
            "source_side": sorted(self.source_side),
            "sink_side": sorted(self.sink_side),
            "cut_edges": list(self.cut_edges),
            "capacity_product": self.capacity_product,
            "cardinality": self.cardinality,
        }

    def describe(self) -> str:
        return "{%s}|{%s}" % (",".join(sorted(self.source_side)), ",".join(sorted(self.sink_side)))


def reduction_graph(
    net: Network, weight: Callable[[EdgeInstance], GroupValue]
) -> DirectedCapacityGraph:
    """Directed reduction of an undirected network.

    Edges at the source only leave it, edges at the sink only enter it, and
    every other edge is present in both directions. Each undirected edge that
    crosses a cut therefore contributes exactly one forward arc to that cut.
    Arc labels are :class:`Traversal` objects.
    """
    s, t = net.source, net.sink
    arcs = []
    for e in net.edges:
        w = weight(e)
        if s in (e.u, e.v):
            arcs.append(Arc(s, e.other(s), w, Traversal(e.id, e.u == s)))
        elif t in (e.u, e.v):
            arcs.append(Arc(e.other(t), t, w, Traversal(e.id, e.v == t)))
        else:
            arcs.append(Arc(e.u, e.v, w, Traversal(e.id, True)))
            arcs.append(Arc(e.v, e.u, w, Traversal(e.id, False)))
    return DirectedCapacityGraph(net.vertices, tuple(arcs), s, t)


def log_capacity(e: EdgeInstance) -> GroupValue:
    return GroupValue(0, Fraction(e.capacity))


def unit_capacity(e: EdgeInstance) -> GroupValue:
    return GroupValue(1, Fraction(1))


def lex_capacity(e: EdgeInstance) -> GroupValue:
    return GroupValue(1, Fraction(e.capacity))


def net_edge_flow(net: Network, g: DirectedCapacityGraph, flows: Sequence[GroupValue]) -> list[GroupValue]:
    """Cancel anti-parallel arc flows: per edge, flow in its u->v orientation."""
    out = [ZERO] * len(net.edges)
    for a, f in zip(g.arcs, flows):
        tr: Traversal = a.label
        out[tr.edge] = out[tr.edge] + f if tr.forward else out[tr.edge] - f
    return out


def lex_min_cut(net: Network) -> Cut:
    """Cut minimizing (number of cut edges, product of their capacities).

    For every ``n >= prod(d_e)`` this cut is also a quantum min-cut of the
    scaled network ``n·net``.
    """
    g = reduction_graph(net, lex_capacity)
    return Cut.from_side(net, max_flow(g).source_side)


def edge_disjoint_paths(net: Network) -> list[list[Traversal]]:
    """A maximum set of edge-disjoint simple source-to-sink paths.

    Obtained from an integral unit-capacity flow: anti-parallel flow is
    cancelled, circulations are discarded while walking, and the rest is
    decomposed into paths, preferring the lowest edge id at each step.
    """
    g = reduction_graph(net, unit_capacity)
    flows, value = integral_max_flow(g)
    per_edge = net_edge_flow(net, g, [GroupValue(f, 1) for f in flows])
    out_arcs: dict[str, list[Traversal]] = {v: [] for v in net.vertices}
    for e in net.edges:
        c = per_edge[e.id].count
        if c == 0:
            continue
        assert c in (1, -1), "unit flow should be 0/±1 per edge"
        tr = Traversal(e.id, c == 1)
        out_arcs[tr.tail(net)].append(tr)
    # out_arcs lists are already in edge-id order
    paths: list[list[Traversal]] = []
    for _ in range(value):
        walk: list[Traversal] = []
        pos = {net.source: 0}
        x = net.source
        while x != net.sink:
            tr = out_arcs[x].pop(0)
            y = tr.head(net)
            if y in pos:
                # drop the circulation that closed at y
                del walk[pos[y]:]
                for v in list(pos):
                    if pos[v] > pos[y]:
                        del pos[v]
            else:
                walk.append(tr)
                pos[y] = len(walk)
            x = y
        paths.append(walk)
    return paths
