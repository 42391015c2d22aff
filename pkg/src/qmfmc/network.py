"""Network data model: capacity-weighted undirected multigraphs with one
source and one sink, plus JSON/DOT (de)serialization and scaling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator


class NetworkError(ValueError):
    """Raised for malformed or invalid network descriptions."""


@dataclass(frozen=True)
class EdgeInstance:
    id: int
    u: str
    v: str
    capacity: int

    def __post_init__(self):
        if self.u == self.v:
            raise NetworkError(f"self-loop at vertex {self.u!r} (edge {self.id})")
        if not isinstance(self.capacity, int) or isinstance(self.capacity, bool):
            raise NetworkError(f"edge {self.id}: capacity must be an integer")
        if self.capacity < 1:
            raise NetworkError(f"edge {self.id}: capacity {self.capacity} < 1")

    def other(self, x: str) -> str:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise KeyError(f"{x!r} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class Network:
    vertices: tuple[str, ...]
    source: str
    sink: str
    edges: tuple[EdgeInstance, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise NetworkError("duplicate vertex ids")
        known = set(self.vertices)
        if self.source not in known:
            raise NetworkError(f"source {self.source!r} is not a vertex")
        if self.sink not in known:
            raise NetworkError(f"sink {self.sink!r} is not a vertex")
        if self.source == self.sink:
            raise NetworkError("source and sink must differ")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise NetworkError(f"edge ids must be 0..m-1 in order (got {e.id} at {i})")
            if e.u not in known or e.v not in known:
                raise NetworkError(f"edge {e.id} references an unknown vertex")

    # Dense integer indices, for algorithms that want arrays.
    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def incident(self) -> dict[str, tuple[EdgeInstance, ...]]:
        inc: dict[str, list[EdgeInstance]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append(e)
            inc[e.v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @property
    def internal_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in (self.source, self.sink))

    def capacity_product(self) -> int:
        out = 1
        for e in self.edges:
            out *= e.capacity
        return out

    def connected(self) -> bool:
        """True if source and sink lie in the same component."""
        seen = {self.source}
        stack = [self.source]
        while stack:
            x = stack.pop()
            for e in self.incident[x]:
                y = e.other(x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return self.sink in seen

    def __iter__(self) -> Iterator[EdgeInstance]:
        return iter(self.edges)


def build_network(vertices, source, sink, edges) -> Network:
    """Build a network from ``(u, v, d)`` triples; ids follow list order."""
    return Network(
        tuple(vertices),
        source,
        sink,
        tuple(EdgeInstance(i, u, v, d) for i, (u, v, d) in enumerate(edges)),
    )


def network_from_dict(data: dict) -> Network:
    if not isinstance(data, dict):
        raise NetworkError("network JSON must be an object")
    for key in ("vertices", "source", "sink", "edges"):
        if key not in data:
            raise NetworkError(f"missing key {key!r}")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise NetworkError("'vertices' must be a list of strings")
    for key in ("source", "sink"):
        if not isinstance(data[key], str):
            raise NetworkError(f"{key!r} must be a single vertex id")
    if not isinstance(data["edges"], list):
        raise NetworkError("'edges' must be a list")
    triples = []
    for i, raw in enumerate(data["edges"]):
        if not isinstance(raw, dict) or not {"u", "v", "d"} <= raw.keys():
            raise NetworkError(f"edge {i}: expected object with keys u, v, d")
        triples.append((raw["u"], raw["v"], raw["d"]))
    return build_network(vertices, data["source"], data["sink"], triples)


def _no_duplicate_keys(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise NetworkError(f"duplicate key {key!r}")
        out[key] = value
    return out


def parse_network(text: str) -> Network:
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}") from exc
    return network_from_dict(data)


def network_to_dict(net: Network) -> dict:
    return {
        "vertices": list(net.vertices),
        "source": net.source,
        "sink": net.sink,
        "edges": [{"u": e.u, "v": e.v, "d": e.capacity} for e in net.edges],
    }


def serialize_network(net: Network) -> str:
    return json.dumps(network_to_dict(net))


def to_dot(net: Network) -> str:
    lines = ["graph network {"]
    for v in net.vertices:
        attrs = ""
        if v == net.source:
            attrs = " [shape=box, label=\"%s (source)\"]" % v
        elif v == net.sink:
            attrs = " [shape=box, label=\"%s (sink)\"]" % v
        lines.append(f"  {json.dumps(v)}{attrs};")
    for e in net.edges:
        lines.append(f"  {json.dumps(e.u)} -- {json.dumps(e.v)} [label=\"e{e.id}: d={e.capacity}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def scale_network(net: Network, n: int) -> Network:
    """Return ``n·net``: same multigraph, every capacity multiplied by ``n``."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"scale factor must be a positive integer, got {n!r}")
    return Network(
        net.vertices,
        net.source,
        net.sink,
        tuple(EdgeInstance(e.id, e.u, e.v, e.capacity * n) for e in net.edges),
    )


@dataclass(frozen=True)
class Traversal:
    """One directed use of an edge; ``forward`` means from ``e.u`` to ``e.v``."""

    edge: int
    forward: bool

    def tail(self, net: Network) -> str:
        e = net.edges[self.edge]
        return e.u if self.forward else e.v

    def head(self, net: Network) -> str:
        e = net.edges[self.edge]
        return e.v if self.forward else e.u

    def to_json(self) -> dict:
        return {"edge": self.edge, "dir": "fwd" if self.forward else "bwd"}

    @classmethod
    def from_json(cls, data: dict) -> "Traversal":
        if data.get("dir") not in ("fwd", "bwd"):
            raise NetworkError(f"bad traversal direction {data.get('dir')!r}")
        return cls(int(data["edge"]), data["dir"] == "fwd")


def traversal_from(net: Network, edge_id: int, tail: str) -> Traversal:
    return Traversal(edge_id, net.edges[edge_id].u == tail)


# Fixtures used across tests, docs and the CLI.

def path_network(d1: int, d2: int) -> Network:
    return build_network(["s", "v", "t"], "s", "t", [("s", "v", d1), ("v", "t", d2)])


def parallel5() -> Network:
    return build_network(
        ["s", "v", "t"], "s", "t", [("s", "v", 2), ("s", "v", 3), ("v", "t", 5)]
    )


def diamond2() -> Network:
    return build_network(
        ["s", "a", "b", "t"],
        "s",
        "t",
        [("s", "a", 2), ("s", "b", 2), ("a", "t", 2), ("b", "t", 2)],
    )
