"""Randomized lower bound on the contraction rank of a tensor network.

Every internal vertex gets a tensor with one leg per incident edge (leg
dimension = capacity). Contracting all internal edges yields a linear map
from the source legs to the sink legs. Its rank over ``F_q`` for a random
assignment is a lower bound on the generic (maximum) rank, and equals it
with high probability for large ``q``.

Internal vertices that are not linked by internal edges contribute tensor
factors of the map, and the rank of a tensor product is the product of the
ranks, so each connected piece is contracted and ranked on its own. Direct
source-sink edges contribute identity factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .arith import is_prime
from .network import Network

DEFAULT_FIELD_PRIME = 1_000_003
DEFAULT_BUDGET = 2**20
# tensordot accumulates in int64: (contracted size) * (q-1)^2 must fit
_INT64_MAX = np.iinfo(np.int64).max


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class TensorAssignment:
    """Per internal vertex, an int64 array with axes in incident-edge order."""

    tensors: dict[str, np.ndarray]
    q: int
    seed: int | None = None


def random_assignment(net: Network, seed: int, q: int = DEFAULT_FIELD_PRIME,
                      budget: int = DEFAULT_BUDGET) -> TensorAssignment:
    rng = np.random.default_rng(seed)
    tensors = {}
    for v in net.internal_vertices:
        shape = tuple(e.capacity for e in net.incident[v])
        if prod(shape) > budget:
            raise BudgetExceeded(f"tensor at {v!r} has {prod(shape)} entries > budget {budget}")
        tensors[v] = np.asarray(rng.integers(0, q, size=shape, dtype=np.int64))
    return TensorAssignment(tensors, q, seed)


def zero_assignment(net: Network, q: int = DEFAULT_FIELD_PRIME) -> TensorAssignment:
    return TensorAssignment(
        {v: np.zeros(tuple(e.capacity for e in net.incident[v]), dtype=np.int64)
         for v in net.internal_vertices},
        q,
    )


def rank_mod_p(matrix: np.ndarray, q: int) -> int:
    """Rank over F_q by Gaussian elimination (int64, q < 2**31)."""
    a = np.array(matrix, dtype=np.int64) % q
    if a.shape[0] > a.shape[1]:
        a = a.T.copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), q - 2, q)
        a[r, c:] = (a[r, c:] * inv) % q
        below = a[r + 1:, c].copy()
        if below.any():
            a[r + 1:, c:] = (a[r + 1:, c:] - np.outer(below, a[r, c:])) % q
        r += 1
    return r


@dataclass
class Factor:
    """One tensor factor of the contraction map, as a matrix (source x sink legs)."""

    vertices: tuple[str, ...]
    source_legs: tuple[int, ...]
    sink_legs: tuple[int, ...]
    matrix: np.ndarray | None  # None for identity factors of direct s-t edges
    rank: int


@dataclass
class ContractionResult:
    factors: list[Factor]
    source_dim: int
    sink_dim: int
    rank: int
    seed: int | None = None
    q: int = DEFAULT_FIELD_PRIME

    def matrix(self) -> np.ndarray:
        """Full map as a Kronecker product (only sensible at toy sizes).

        Rows are indexed by all source legs ordered by factor, columns by
        all sink legs ordered by factor.
        """
        out = np.ones((1, 1), dtype=np.int64)
        for f in self.factors:
            m = np.eye(f.rank, dtype=np.int64) if f.matrix is None else f.matrix
            out = np.kron(out, m) % self.q
        return out


def _components(net: Network) -> list[list[str]]:
    s, t = net.source, net.sink
    seen: set[str] = set()
    comps = []
    for root in net.internal_vertices:
        if root in seen:
            continue
        comp, stack = [], [root]
        seen.add(root)
        while stack:
            x = stack.pop()
            comp.append(x)
            for e in net.incident[x]:
                y = e.other(x)
                if y not in (s, t) and y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp, key=net.index.__getitem__))
    return comps


def _contract_component(net: Network, comp: list[str], assignment: TensorAssignment,
                        budget: int) -> Factor:
    q = assignment.q
    s, t = net.source, net.sink
    members = set(comp)
    # live tensors: (array, list of edge ids labelling its axes)
    live = []
    for v in comp:
        arr = assignment.tensors[v]
        labels = [e.id for e in net.incident[v]]
        if arr.shape != tuple(net.edges[i].capacity for i in labels):
            raise ValueError(f"tensor at {v!r} has shape {arr.shape}, expected one leg per edge")
        live.append((arr % q, labels))

    def merged_size(a, b):
        shared = set(a[1]) & set(b[1])
        return prod(net.edges[i].capacity for i in a[1] + b[1] if i not in shared)

    while len(live) > 1:
        best = None
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                if not set(live[i][1]) & set(live[j][1]):
                    continue
                size = merged_size(live[i], live[j])
                key = (size, min(set(live[i][1]) & set(live[j][1])))
                if best is None or key < best[0]:
                    best = (key, i, j)
        assert best is not None, "component must be connected by internal edges"
        (size, _), i, j = best
        if size > budget:
            raise BudgetExceeded(f"intermediate tensor of {size} entries > budget {budget}")
        (a, la), (b, lb) = live[i], live[j]
        shared = [x for x in la if x in lb]
        contracted = prod(net.edges[x].capacity for x in shared)
        if contracted * (q - 1) ** 2 > _INT64_MAX:
            raise BudgetExceeded("contraction would overflow int64 accumulation")
        c = np.tensordot(a, b, axes=([la.index(x) for x in shared], [lb.index(x) for x in shared])) % q
        lc = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        live = [item for k, item in enumerate(live) if k not in (i, j)] + [(c, lc)]

    arr, labels = live[0]
    src = sorted(x for x in labels if s in (net.edges[x].u, net.edges[x].v))
    snk = sorted(x for x in labels if t in (net.edges[x].u, net.edges[x].v))
    assert sorted(src + snk) == sorted(labels) and not members & {s, t}
    perm = [labels.index(x) for x in src + snk]
    mat = np.transpose(arr, perm).reshape(
        prod(net.edges[x].capacity for x in src), prod(net.edges[x].capacity for x in snk)
    )
    return Factor(tuple(comp), tuple(src), tuple(snk), mat, rank_mod_p(mat, q))


def contract(net: Network, assignment: TensorAssignment, budget: int = DEFAULT_BUDGET) -> ContractionResult:
    if not is_prime(assignment.q):
        raise ValueError(f"field size {assignment.q} is not prime")
    if assignment.q >= 2**31:
        raise ValueError("field prime must be below 2**31 for int64 arithmetic")
    s, t = net.source, net.sink
    factors = []
    for e in net.edges:
        if {e.u, e.v} == {s, t}:
            factors.append(Factor((), (e.id,), (e.id,), None, e.capacity))
    for comp in _components(net):
        factors.append(_contract_component(net, comp, assignment, budget))
    source_dim = prod(e.capacity for e in net.incident[s])
    sink_dim = prod(e.capacity for e in net.incident[t])
    return ContractionResult(
        factors, source_dim, sink_dim, prod(f.rank for f in factors), assignment.seed, assignment.q
    )


def contract_random(net: Network, seed: int, q: int = DEFAULT_FIELD_PRIME,
                    budget: int = DEFAULT_BUDGET) -> ContractionResult:
    if not is_prime(q):
        raise ValueError(f"field size {q} is not prime")
    return contract(net, random_assignment(net, seed, q, budget), budget)


def rank_ceiling(result: ContractionResult) -> int:
    """Largest rank the factor shapes allow."""
    out = 1
    for f in result.factors:
        out *= f.rank if f.matrix is None else min(f.matrix.shape)
    return out


@dataclass
class Estimate:
    rank: int
    seeds: list[int]
    ranks: list[int] = field(default_factory=list)
    q: int = DEFAULT_FIELD_PRIME

    def to_json(self) -> dict:
        return {"rank": self.rank, "seeds": self.seeds, "ranks": self.ranks, "q": self.q}


def estimate_qmf_tilde(net: Network, trials: int = 20, seed: int = 0,
                       q: int = DEFAULT_FIELD_PRIME, budget: int = DEFAULT_BUDGET) -> Estimate:
    """Maximum contraction rank over ``trials`` seeded random assignments.

    Stops early once a trial reaches the shape-imposed ceiling.
    """
    seeds, ranks = [], []
    for k in range(trials):
        res = contract_random(net, seed + k, q, budget)
        seeds.append(seed + k)
        ranks.append(res.rank)
        if res.rank == rank_ceiling(res):
            break
    return Estimate(max(ranks, default=0), seeds, ranks, q)
