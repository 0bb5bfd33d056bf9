"""Brute-force partition functions by summing over every spin configuration.

Weights follow the Potts Hamiltonian with ``z = exp(-h/T)``, ``t = exp(-J/T)``
and are normalised like the tree recursion: a configuration with ``k`` spins
equal to 0 and ``m`` disagreeing edges contributes ``z**(|V|-k) * t**m``.
That is ``exp(-H/T)`` multiplied by ``z**|V| t**|E|``; the single-vertex case
reproduces ``z * (1/z + (q-1)) = 1 + (q-1) z``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import TreeKind, TreeSpec

MAX_CONFIGS = 10**7
_CHUNK = 1 << 16


class ConfigSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class TreeGraph:
    adjacency: tuple[tuple[int, ...], ...]
    root: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    @property
    def n_edges(self) -> int:
        return sum(len(n) for n in self.adjacency) // 2

    def distances(self) -> list[int]:
        dist = [-1] * self.n_vertices
        dist[self.root] = 0
        queue = [self.root]
        for v in queue:
            for w in self.adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist


def build_tree(spec: TreeSpec) -> TreeGraph:
    """Adjacency lists for the rooted or unrooted binary Cayley tree.

    Vertex 0 is the root (rooted) or the centre (unrooted); vertices are
    numbered breadth first.
    """
    adj: list[list[int]] = [[]]
    frontier = [0]
    for level in range(spec.depth):
        children = 3 if (spec.kind is TreeKind.UNROOTED and level == 0) else 2
        nxt = []
        for v in frontier:
            for _ in range(children):
                w = len(adj)
                adj.append([v])
                adj[v].append(w)
                nxt.append(w)
        frontier = nxt
    return TreeGraph(tuple(tuple(a) for a in adj), root=0)


def _weights(g: TreeGraph, z: complex, t: float, q: int, root_spin: int | None):
    nv = g.n_vertices
    free = [v for v in range(nv) if root_spin is None or v != g.root]
    total_configs = q ** len(free)
    if total_configs > MAX_CONFIGS:
        raise ConfigSpaceTooLarge(f"{q}**{len(free)} configurations exceeds {MAX_CONFIGS}")
    edges = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    powers = q ** np.arange(len(free), dtype=np.int64)
    z = complex(z)
    total = 0j
    for start in range(0, total_configs, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total_configs), dtype=np.int64)
        spins = np.empty((idx.size, nv), dtype=np.int64)
        spins[:, free] = (idx[:, None] // powers[None, :]) % q
        if root_spin is not None:
            spins[:, g.root] = root_spin
        n_zero = (spins == 0).sum(axis=1)
        n_mis = (spins[:, edges[:, 0]] != spins[:, edges[:, 1]]).sum(axis=1)
        # group by (n_zero, n_mis) so each distinct monomial is evaluated once
        key = n_zero * (len(edges) + 1) + n_mis
        counts = np.bincount(key, minlength=(nv + 1) * (len(edges) + 1))
        for k in np.nonzero(counts)[0]:
            nz_, nm = divmod(int(k), len(edges) + 1)
            total += counts[k] * z ** (nv - nz_) * t**nm
    return total


def brute_partition(g: TreeGraph, z: complex, t: float, q: int) -> complex:
    """Cleared partition function ``z**|V| Z`` by direct enumeration."""
    return _weights(g, z, t, q, None)


def brute_conditional(g: TreeGraph, z: complex, t: float, q: int, root_spin: int) -> complex:
    """Cleared partition function restricted to configurations with the given root spin."""
    if not 0 <= root_spin < q:
        raise ValueError("root spin out of range")
    return _weights(g, z, t, q, root_spin)
