"""Exhaustive oracles for small networks.

These deliberately share no code with the flow-based constructions: cuts
are enumerated vertex subset by vertex subset, and maximum multiplicative
flows are found by enumerating integer direction pairs edge by edge.
"""

from __future__ import annotations

import os
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt

from .classical import Cut
from .flow import INTEGER, STRICT, MultiplicativeFlow
from .network import Network

DEFAULT_ORACLE_CAP = 10**7
MAX_CUT_VERTICES = 22


class OracleLimitError(RuntimeError):
    """The instance is too large for exhaustive search."""


def oracle_cap() -> int:
    raw = os.environ.get("QMFMC_ORACLE_CAP")
    return int(raw) if raw else DEFAULT_ORACLE_CAP


def enumerate_cuts(net: Network):
    """Yield every s/t vertex bipartition as a :class:`Cut`."""
    if len(net.vertices) > MAX_CUT_VERTICES:
        raise OracleLimitError(f"{len(net.vertices)} vertices is too many to enumerate cuts")
    inner = net.internal_vertices
    for r in range(len(inner) + 1):
        for chosen in combinations(inner, r):
            yield Cut.from_side(net, (net.source, *chosen))


def brute_force_qmc(net: Network) -> int:
    return min(c.capacity_product for c in enumerate_cuts(net))


def brute_force_min_cut_cardinality(net: Network) -> int:
    return min(c.cardinality for c in enumerate_cuts(net))


def _pairs(d: int, fwd_one: bool = False, bwd_one: bool = False):
    """All positive integer pairs (a, b) with a*b <= d."""
    for a in range(1, d + 1):
        if fwd_one and a > 1:
            break
        for b in range(1, d // a + 1):
            if bwd_one and b > 1:
                break
            yield a, b


def _count_pairs(d: int, fwd_one: bool, bwd_one: bool) -> int:
    if fwd_one and bwd_one:
        return 1
    if fwd_one or bwd_one:
        return d
    return sum(d // a for a in range(1, d + 1))


def best_integer_flow(net: Network, strict: bool = False, cap: int | None = None):
    """Maximum-value integer flow by exhaustive search; returns ``(value, flow)``.

    Edges are assigned in id order. Once every edge at an internal vertex is
    assigned, its conservation is checked; the edge that completes a vertex
    only ranges over pairs with the ratio conservation requires, which
    enumerates exactly the same feasible set.
    """
    cap = oracle_cap() if cap is None else cap
    s, t = net.source, net.sink
    edges = net.edges
    m = len(edges)

    last_edge = {v: max((e.id for e in net.incident[v]), default=-1) for v in net.internal_vertices}
    completes: list[list[str]] = [[] for _ in range(m)]
    for v, i in last_edge.items():
        if i >= 0:
            completes[i].append(v)

    def restrictions(e):
        # strict flows: nothing enters s, nothing leaves t
        fwd_one = strict and (e.v == s or e.u == t)
        bwd_one = strict and (e.u == s or e.v == t)
        return fwd_one, bwd_one

    size = 1
    for e in edges:
        fo, bo = restrictions(e)
        size *= (isqrt(e.capacity) + 1) if completes[e.id] else _count_pairs(e.capacity, fo, bo)
    if size > cap:
        raise OracleLimitError(f"search space ~{size} exceeds cap {cap}")

    inflow = {v: 1 for v in net.vertices}
    outflow = {v: 1 for v in net.vertices}
    chosen: list[tuple[int, int]] = [(1, 1)] * m
    best: list = [None, None]

    def value() -> Fraction:
        return Fraction(outflow[s], inflow[s])

    def options(e):
        fo, bo = restrictions(e)
        if not completes[e.id]:
            yield from _pairs(e.capacity, fo, bo)
            return
        v = completes[e.id][0]
        # need inflow[v]*f(other->v) == outflow[v]*f(v->other)
        num, den = outflow[v], inflow[v]
        g = gcd(num, den)
        num, den = num // g, den // g
        # (into v, out of v) = (num*k, den*k)
        k = 1
        while num * den * k * k <= e.capacity:
            a, b = (num * k, den * k) if e.v == v else (den * k, num * k)
            if not ((fo and a > 1) or (bo and b > 1)):
                yield a, b
            k += 1

    def recurse(i: int):
        if i == m:
            val = value()
            if best[0] is None or val > best[0]:
                best[0], best[1] = val, list(chosen)
            return
        e = edges[i]
        for a, b in options(e):
            inflow[e.v] *= a
            outflow[e.u] *= a
            inflow[e.u] *= b
            outflow[e.v] *= b
            if all(inflow[v] == outflow[v] for v in completes[i]):
                chosen[i] = (a, b)
                recurse(i + 1)
            inflow[e.v] //= a
            outflow[e.u] //= a
            inflow[e.u] //= b
            outflow[e.v] //= b

    recurse(0)
    val = best[0]
    flow = MultiplicativeFlow(tuple(best[1]), STRICT if strict else INTEGER)
    return (int(val) if val.denominator == 1 else val), flow


def brute_force_qmf(net: Network, strict: bool = False, cap: int | None = None):
    """Maximum value over all (strict) integer flows."""
    return best_integer_flow(net, strict, cap)[0]
