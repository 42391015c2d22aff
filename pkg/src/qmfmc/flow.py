"""Multiplicative flows on quantum tensor networks.

A flow assigns each edge instance ``e = {u, v}`` a pair of positive values,
one per direction. Conservation is product-form: at every vertex other than
the source and sink, the product of incoming values equals the product of
outgoing values. The value of a flow is the product leaving the source
divided by the product entering it.

Everything is exact (``fractions.Fraction`` / ``int``); no floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, prod

from .arith import factorize, format_fraction, lcm_all, parse_fraction
from .classical import (
    Cut,
    log_capacity,
    max_flow,
    net_edge_flow,
    reduction_graph,
    edge_disjoint_paths,
    lex_min_cut,
)
from .network import Network, Traversal, scale_network

INTEGER = "integer"
STRICT = "strict-integer"
RATIONAL = "rational-single-direction"
KINDS = (INTEGER, STRICT, RATIONAL)


class FlowError(ValueError):
    """Raised when a flow construction's precondition does not hold."""


@dataclass(frozen=True)
class MultiplicativeFlow:
    """Per edge id, ``(f_uv, f_vu)`` in the edge's file orientation."""

    values: tuple[tuple[Fraction, Fraction], ...]
    kind: str = INTEGER

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}")
        object.__setattr__(
            self,
            "values",
            tuple((Fraction(a), Fraction(b)) for a, b in self.values),
        )

    @classmethod
    def ones(cls, net: Network, kind: str = STRICT) -> "MultiplicativeFlow":
        return cls(tuple((Fraction(1), Fraction(1)) for _ in net.edges), kind)

    def along(self, tr: Traversal) -> Fraction:
        fwd, bwd = self.values[tr.edge]
        return fwd if tr.forward else bwd

    def directed(self, net: Network, tail: str, edge_id: int) -> Fraction:
        """Value on edge ``edge_id`` in the direction leaving ``tail``."""
        fwd, bwd = self.values[edge_id]
        return fwd if net.edges[edge_id].u == tail else bwd

    def with_kind(self, kind: str) -> "MultiplicativeFlow":
        return MultiplicativeFlow(self.values, kind)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "edges": {
                str(i): {"fwd": format_fraction(a), "bwd": format_fraction(b)}
                for i, (a, b) in enumerate(self.values)
            },
        }

    @classmethod
    def from_json(cls, data: dict, kind: str | None = None) -> "MultiplicativeFlow":
        edges = data["edges"]
        keys = sorted(edges, key=int)
        if [int(k) for k in keys] != list(range(len(keys))):
            raise ValueError("flow must list every edge id 0..m-1")
        values = tuple(
            (parse_fraction(edges[k]["fwd"]), parse_fraction(edges[k]["bwd"])) for k in keys
        )
        return cls(values, kind or data.get("kind", INTEGER))


def _check_shape(net: Network, f: MultiplicativeFlow):
    if len(f.values) != len(net.edges):
        raise ValueError(
            f"flow has {len(f.values)} edge entries, network has {len(net.edges)} edges"
        )


def flow_value(net: Network, f: MultiplicativeFlow) -> Fraction:
    """Product of values leaving the source over product of values entering it."""
    _check_shape(net, f)
    out = Fraction(1)
    for e in net.incident[net.source]:
        out *= f.directed(net, net.source, e.id)
        out /= f.directed(net, e.other(net.source), e.id)
    return out


def vertex_balance(net: Network, f: MultiplicativeFlow, v: str) -> Fraction:
    """Incoming product over outgoing product at ``v`` (1 when conserved)."""
    ratio = Fraction(1)
    for e in net.incident[v]:
        ratio *= f.directed(net, e.other(v), e.id)
        ratio /= f.directed(net, v, e.id)
    return ratio


@dataclass
class Violation:
    kind: str
    where: str
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "where": self.where, "detail": self.detail}


@dataclass
class FlowReport:
    value: Fraction
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "value": format_fraction(self.value),
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
        }


def verify_flow(net: Network, f: MultiplicativeFlow) -> FlowReport:
    """Check every constraint of ``f.kind``; violations are collected, not raised."""
    _check_shape(net, f)
    bad: list[Violation] = []
    for e in net.edges:
        a, b = f.values[e.id]
        where = f"edge {e.id} ({e.u}-{e.v})"
        if a <= 0 or b <= 0:
            bad.append(Violation("positivity", where, f"values {a}, {b} must be positive"))
            continue
        if f.kind == RATIONAL:
            if a != 1 and b != 1:
                bad.append(Violation("single-direction", where, f"neither {a} nor {b} is 1"))
            lo, hi = Fraction(1, e.capacity), Fraction(e.capacity)
            for x in (a, b):
                if not lo <= x <= hi:
                    bad.append(Violation("capacity", where, f"{x} outside [1/{e.capacity}, {e.capacity}]"))
        else:
            if a.denominator != 1 or b.denominator != 1:
                bad.append(Violation("integrality", where, f"values {a}, {b} must be integers"))
            if a * b > e.capacity:
                bad.append(Violation("capacity", where, f"{a}*{b} = {a * b} > {e.capacity}"))
    for v in net.internal_vertices:
        r = vertex_balance(net, f, v)
        if r != 1:
            bad.append(Violation("conservation", f"vertex {v}", f"in/out product ratio {r}"))
    if f.kind == STRICT:
        for e in net.incident[net.source]:
            x = f.directed(net, e.other(net.source), e.id)
            if x != 1:
                bad.append(Violation("strictness", f"edge {e.id}", f"flow {x} enters the source"))
        for e in net.incident[net.sink]:
            x = f.directed(net, net.sink, e.id)
            if x != 1:
                bad.append(Violation("strictness", f"edge {e.id}", f"flow {x} leaves the sink"))
    return FlowReport(flow_value(net, f) if all(x > 0 for p in f.values for x in p) else Fraction(0), bad)


def is_strict(net: Network, f: MultiplicativeFlow) -> bool:
    return all(
        f.directed(net, e.other(net.source), e.id) == 1 for e in net.incident[net.source]
    ) and all(f.directed(net, net.sink, e.id) == 1 for e in net.incident[net.sink])


def cut_ratio(net: Network, f: MultiplicativeFlow, cut: Cut) -> Fraction:
    """Forward cut-edge product over backward cut-edge product.

    For a conserving flow this equals :func:`flow_value` for every cut.
    """
    _check_shape(net, f)
    side = cut.source_side
    if net.source not in side or net.sink in side:
        raise ValueError("invalid cut")
    out = Fraction(1)
    for e in net.edges:
        if (e.u in side) == (e.v in side):
            continue
        inner = e.u if e.u in side else e.v
        out *= f.directed(net, inner, e.id)
        out /= f.directed(net, e.other(inner), e.id)
    return out


# ---------------------------------------------------------------------------
# Quantum min-cut and rational maximum flows


def quantum_min_cut(net: Network) -> tuple[int, Cut]:
    """Minimum over cuts of the product of cut-edge capacities.

    Computed as ``exp`` of the classical min-cut of the log-capacity
    reduction graph, with logs carried exactly as rationals.
    """
    g = reduction_graph(net, log_capacity)
    flow = max_flow(g)
    qmc = flow.value.logweight
    assert flow.value.count == 0 and qmc.denominator == 1
    witness = Cut.from_side(net, flow.source_side)
    assert witness.capacity_product == qmc
    return int(qmc), witness


def rational_max_flow(net: Network) -> MultiplicativeFlow:
    """Single-direction rational flow whose value equals the quantum min-cut."""
    g = reduction_graph(net, log_capacity)
    flow = max_flow(g)
    values = []
    for h in net_edge_flow(net, g, flow.flows):
        # h is exp(h_uv - h_vu); orient it to the direction where it is >= 1
        w = h.logweight
        values.append((w, Fraction(1)) if w >= 1 else (Fraction(1), 1 / w))
    return MultiplicativeFlow(tuple(values), RATIONAL)


def minimum_cuts(net: Network) -> list[Cut]:
    """Every cut attaining the quantum min-cut (enumeration; desk scale only)."""
    from .oracles import enumerate_cuts

    cuts = list(enumerate_cuts(net))
    best = min(c.capacity_product for c in cuts)
    return [c for c in cuts if c.capacity_product == best]


def saturation_check(net: Network, f: MultiplicativeFlow) -> list[Violation]:
    """Violations of min-cut saturation for a flow of value QMC.

    Every edge crossing a minimum cut must carry its full capacity from the
    source side, i.e. forward value ``d`` or backward value ``1/d``.
    """
    qmc, _ = quantum_min_cut(net)
    if flow_value(net, f) != qmc:
        raise FlowError(f"flow value {flow_value(net, f)} is not the quantum min-cut {qmc}")
    bad = []
    for cut in minimum_cuts(net):
        for i in cut.cut_edges:
            e = net.edges[i]
            inner = e.u if e.u in cut.source_side else e.v
            fwd = f.directed(net, inner, i)
            bwd = f.directed(net, e.other(inner), i)
            if f.kind == RATIONAL:
                ok = fwd == e.capacity or bwd == Fraction(1, e.capacity)
            else:
                ok = fwd == e.capacity and bwd == 1
            if not ok:
                bad.append(
                    Violation("saturation", f"edge {i} in cut {cut.describe()}", f"carries {fwd}/{bwd}")
                )
    return bad


# ---------------------------------------------------------------------------
# Integer flows on scaled networks


@dataclass(frozen=True)
class ScalingParams:
    n0: int
    m0: int
    cut: Cut
    base_flow: MultiplicativeFlow  # rational flow on n0·net

    def to_json(self) -> dict:
        return {"n0": self.n0, "m0": self.m0, "cut": self.cut.to_json()}


def scaling_params(net: Network) -> ScalingParams:
    if not net.connected():
        raise FlowError("source and sink are disconnected")
    n0 = net.capacity_product()
    cut = lex_min_cut(net)
    g = rational_max_flow(scale_network(net, n0))
    m0 = lcm_all(x.numerator for pair in g.values for x in pair)
    m0 = lcm_all([m0, *(x.denominator for pair in g.values for x in pair)])
    return ScalingParams(n0, m0, cut, g)


def _path_edges(net: Network) -> dict[int, Traversal]:
    return {tr.edge: tr for path in edge_disjoint_paths(net) for tr in path}


def _ratio(g: MultiplicativeFlow, tr: Traversal) -> Fraction:
    """Net value of ``g`` in the direction of ``tr`` (g_uv / g_vu)."""
    fwd, bwd = g.values[tr.edge]
    return fwd / bwd if tr.forward else bwd / fwd


def k_min(net: Network, params: ScalingParams | None = None) -> int:
    params = params or scaling_params(net)
    on_path = _path_edges(net)
    k = 1
    for e in net.edges:
        if e.id in on_path:
            continue
        fwd, bwd = params.base_flow.values[e.id]
        r = fwd if fwd != 1 else bwd
        need = ceil(Fraction(r.numerator * r.denominator, params.n0 * params.m0 * e.capacity))
        k = max(k, need)
    return k


def integer_flow(
    net: Network, k: int | None = None, params: ScalingParams | None = None
) -> tuple[int, MultiplicativeFlow]:
    """Integer flow of value QMC on ``n·net`` with ``n = k·n0·m0``.

    Path edges (from a maximum edge-disjoint path family) carry
    ``k·m0·g'`` forward and 1 backward, where ``g'`` is the rational base
    flow reoriented along the path. Every other edge with net ratio
    ``p/q`` carries ``(p, q)``.
    """
    params = params or scaling_params(net)
    kmin = k_min(net, params)
    if k is None:
        k = kmin
    if k < kmin:
        raise FlowError(f"k={k} is below k_min={kmin}")
    n = k * params.n0 * params.m0
    on_path = _path_edges(net)
    g = params.base_flow
    values = []
    for e in net.edges:
        if e.id in on_path:
            tr = on_path[e.id]
            x = k * params.m0 * _ratio(g, tr)
            assert x.denominator == 1
            values.append((x, Fraction(1)) if tr.forward else (Fraction(1), x))
        else:
            r = _ratio(g, Traversal(e.id, True))
            values.append((Fraction(r.numerator), Fraction(r.denominator)))
    return n, MultiplicativeFlow(tuple(values), INTEGER)


# ---------------------------------------------------------------------------
# Exponent flows and strictification


@dataclass(frozen=True)
class ExponentFlow:
    """Exponent of one prime per edge, as ``(alpha_uv, alpha_vu)``."""

    prime: int
    exponents: tuple[tuple[int, int], ...]

    def along(self, tr: Traversal) -> int:
        a, b = self.exponents[tr.edge]
        return a if tr.forward else b

    def balance(self, net: Network, v: str) -> int:
        """Incoming minus outgoing exponent at ``v``."""
        out = 0
        for e in net.incident[v]:
            a, b = self.exponents[e.id]
            out += (b - a) if e.u == v else (a - b)
        return out


def _require_integer(f: MultiplicativeFlow):
    if f.kind == RATIONAL or any(x.denominator != 1 or x < 1 for p in f.values for x in p):
        raise FlowError("an integer flow is required")


def exponent_flows(f: MultiplicativeFlow) -> dict[int, ExponentFlow]:
    _require_integer(f)
    per_edge = [(factorize(int(a)), factorize(int(b))) for a, b in f.values]
    primes = sorted({p for fa, fb in per_edge for p in (*fa, *fb)})
    return {
        p: ExponentFlow(p, tuple((fa.get(p, 0), fb.get(p, 0)) for fa, fb in per_edge))
        for p in primes
    }


def _arcs_with_exponent(net: Network, alpha: list[list[int]], x: str, incoming: bool):
    """Traversals at ``x`` with positive exponent, lowest edge id first."""
    for e in net.incident[x]:
        forward = (e.v == x) if incoming else (e.u == x)
        if alpha[e.id][0 if forward else 1] > 0:
            yield Traversal(e.id, forward)


def cancel_cycle_from(net: Network, alpha: list[list[int]], start: str, backward: bool) -> list[Traversal]:
    """Walk positive-exponent arcs from ``start`` until a vertex repeats.

    Walks against arc direction when ``backward`` (from the head of an arc
    entering ``start``), with it otherwise. Decrements the closed cycle by
    one and returns it. Conservation at internal vertices guarantees the walk
    can always continue; reaching the opposite terminal is an error.
    """
    stop = net.sink if backward else net.source
    pos = {start: 0}
    steps: list[Traversal] = []
    x = start
    while True:
        tr = next(_arcs_with_exponent(net, alpha, x, incoming=backward), None)
        if tr is None:
            raise FlowError(f"exponent walk stuck at {x!r}; flow does not conserve")
        y = tr.tail(net) if backward else tr.head(net)
        steps.append(tr)
        if y in pos:
            cycle = steps[pos[y]:]
            for c in cycle:
                alpha[c.edge][0 if c.forward else 1] -= 1
            return cycle
        if y == stop:
            raise FlowError(f"exponent walk from {start!r} reached {stop!r}; value is below QMC")
        pos[y] = len(steps)
        x = y


def strictify(net: Network, f: MultiplicativeFlow) -> tuple[MultiplicativeFlow, bool]:
    """Strict integer flow of the same (optimal) value.

    For each prime, every unit of exponent entering the source (or leaving
    the sink) is traced back (forward) along positive exponents until a cycle
    closes; that cycle loses one unit of the prime. Returns the flow and
    whether anything changed.
    """
    _require_integer(f)
    qmc, _ = quantum_min_cut(net)
    if flow_value(net, f) != qmc:
        raise FlowError(f"flow value {flow_value(net, f)} differs from QMC {qmc}")
    if is_strict(net, f):
        return f.with_kind(STRICT), False
    values = [[int(a), int(b)] for a, b in f.values]
    for p, ef in exponent_flows(f).items():
        alpha = [list(x) for x in ef.exponents]
        for terminal, backward in ((net.source, True), (net.sink, False)):
            # source: arcs entering s; sink: arcs leaving t
            while next(_arcs_with_exponent(net, alpha, terminal, incoming=backward), None):
                cancel_cycle_from(net, alpha, terminal, backward)
        for i, (a, b) in enumerate(alpha):
            da, db = ef.exponents[i][0] - a, ef.exponents[i][1] - b
            values[i][0] //= p**da
            values[i][1] //= p**db
    out = MultiplicativeFlow(tuple((Fraction(a), Fraction(b)) for a, b in values), STRICT)
    return out, True


# ---------------------------------------------------------------------------


def flow_to_text(f: MultiplicativeFlow) -> str:
    return json.dumps(f.to_json(), sort_keys=True)


def value_of_scaled_qmc(net: Network, params: ScalingParams, n: int) -> int:
    """Closed form ``n^|C| · prod_C d`` valid for ``n >= n0``."""
    return n ** params.cut.cardinality * prod(net.edges[i].capacity for i in params.cut.cut_edges)
