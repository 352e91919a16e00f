"""Exact brute-force oracle for MV(m, n) via maximum clique.

Vertices are the pairs (u, v) in Z_m^n x Z_m^n with <u, v> = 0 (mod m); two
vertices are adjacent when both cross products are nonzero. A clique is then
exactly an MV family. The clique search is a bitset branch and bound with
greedy-colouring upper bounds over a degeneracy vertex order.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .family import MVFamily

MAX_PAIR_CHECKS = 10**7


@dataclass
class Budget:
    max_nodes: Optional[int] = None
    time_limit: Optional[float] = None


@dataclass
class CliqueResult:
    size: int
    clique: list[int]
    optimal: bool
    nodes: int


class _BudgetExceeded(Exception):
    pass


def _dense(adj: list[int]) -> np.ndarray:
    n = len(adj)
    nbytes = (n + 7) // 8
    raw = np.frombuffer(b"".join(a.to_bytes(nbytes, "little") for a in adj), dtype=np.uint8)
    return np.unpackbits(raw.reshape(n, nbytes), axis=1, bitorder="little")[:, :n].astype(bool)


def degeneracy_order(adj: list[int]) -> list[int]:
    """Vertices in reverse smallest-last order (densest core first); ties go to the lowest index."""
    n = len(adj)
    if n == 0:
        return []
    A = _dense(adj)
    deg = A.sum(axis=1).astype(np.int64)
    big = n + 1
    removed = []
    for _ in range(n):
        v = int(np.argmin(deg))
        removed.append(v)
        deg -= A[v]
        deg[v] = big
        A[:, v] = False
    return removed[::-1]


def max_clique(adj: list[int], budget: Optional[Budget] = None) -> CliqueResult:
    """Maximum clique of the graph given as adjacency bitsets ``adj[v]``.

    Deterministic; on budget exhaustion returns the incumbent with
    ``optimal=False``.
    """
    n = len(adj)
    if n == 0:
        return CliqueResult(0, [], True, 0)
    budget = budget or Budget()
    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    order = degeneracy_order(adj)
    perm = np.array(order)
    # relabel so that bit i of radj[k] means order[k] ~ order[i]
    R = np.packbits(_dense(adj)[perm][:, perm], axis=1, bitorder="little")
    radj = [int.from_bytes(row.tobytes(), "little") for row in R]

    # greedy incumbent over the degeneracy order, so a budget stop still has a clique
    best: list[int] = []
    cand = (1 << n) - 1
    while cand:
        v = (cand & -cand).bit_length() - 1
        best.append(v)
        cand &= radj[v]
    nodes = 0
    current: list[int] = []

    def colour_sort(P: int):
        out = []
        colour = 0
        U = P
        while U:
            colour += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~radj[v] & ~low
                U &= ~low
                out.append((v, colour))
        return out

    def expand(P: int):
        nonlocal best, nodes
        nodes += 1
        if budget.max_nodes is not None and nodes > budget.max_nodes:
            raise _BudgetExceeded
        if deadline is not None and time.monotonic() > deadline:
            raise _BudgetExceeded
        for v, c in reversed(colour_sort(P)):
            if len(current) + c <= len(best):
                return
            current.append(v)
            newP = P & radj[v]
            if newP:
                expand(newP)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            P &= ~(1 << v)

    optimal = True
    try:
        expand((1 << n) - 1)
    except _BudgetExceeded:
        optimal = False
    return CliqueResult(len(best), sorted(order[v] for v in best), optimal, nodes)


@dataclass
class CompatibilityGraph:
    m: int
    n: int
    pairs: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(repr=False)
    adj: list[int] = field(repr=False)


def compatibility_graph(m: int, n: int) -> CompatibilityGraph:
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    if m ** (2 * n) > MAX_PAIR_CHECKS:
        raise DomainError(f"m^(2n) = {m ** (2 * n)} exceeds the {MAX_PAIR_CHECKS} pair-check guideline")
    vecs = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64)
    nz = (vecs @ vecs.T) % m != 0  # nz[a, b]: <vec_a, vec_b> != 0
    ua, va = np.nonzero(~nz)  # zero-product pairs (u, v), already distinct
    # adjacency: <u_a, v_b> != 0 and <u_b, v_a> != 0
    A = nz[ua[:, None], va[None, :]]
    A &= A.T
    np.fill_diagonal(A, False)
    packed = np.packbits(A, axis=1, bitorder="little")
    adj = [int.from_bytes(row.tobytes(), "little") for row in packed]
    pairs = [(tuple(int(x) for x in vecs[a]), tuple(int(x) for x in vecs[b])) for a, b in zip(ua, va)]
    return CompatibilityGraph(m, n, pairs, adj)


@dataclass
class MVSearchResult:
    m: int
    n: int
    value: int
    optimal: bool
    witness: MVFamily
    nodes: int
    vertices: int


def brute_force_mv(m: int, n: int, budget: Optional[Budget] = None) -> MVSearchResult:
    """Exact MV(m, n) with a witness family, or a flagged lower bound on budget exhaustion."""
    g = compatibility_graph(m, n)
    res = max_clique(g.adj, budget)
    witness = MVFamily.from_pairs(m, [g.pairs[i] for i in res.clique], n=n)
    return MVSearchResult(m, n, res.size, res.optimal, witness, res.nodes, len(g.adj))
