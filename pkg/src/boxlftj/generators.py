"""Synthetic graph generators and brute-force triangle oracles.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``.
Graphs are returned as sorted lists of directed pairs ``(u, v)`` with
``u < v``, the form the triangle query expects.
"""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .io_model import gen_pathological  # re-exported: the thrashing graph lives with the I/O model


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _normalize(us: np.ndarray, vs: np.ndarray):
    """Min/max orient both endpoint arrays and drop self-loops."""
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    keep = lo != hi
    return lo[keep], hi[keep]


def gen_rand(nodes: int, edges: int, seed: int = 0) -> list[tuple[int, int]]:
    """Uniform simple graph with exactly ``edges`` edges.

    Endpoint pairs are drawn uniformly; after simplification the shortfall
    is redrawn until the exact count is reached.  Dense requests (more than
    half of all pairs) sample the edge set directly instead.
    """
    if nodes < 0 or edges < 0:
        raise ValueError("nodes and edges must be non-negative")
    cap = nodes * (nodes - 1) // 2
    if edges > cap:
        raise ValueError(f"{edges} edges exceed the {cap} possible on {nodes} nodes")
    g = rng(seed)
    if edges == 0:
        return []
    if edges * 2 > cap:
        pairs = np.array(list(combinations(range(nodes), 2)), dtype=np.int64)
        pick = g.choice(len(pairs), size=edges, replace=False)
        return sorted(map(tuple, pairs[pick].tolist()))
    have: set[int] = set()
    while len(have) < edges:
        need = edges - len(have)
        batch = max(need + need // 4, 16)
        u = g.integers(0, nodes, size=batch)
        v = g.integers(0, nodes, size=batch)
        lo, hi = _normalize(u, v)
        for code in (lo * nodes + hi).tolist():
            if code not in have:
                have.add(code)
                if len(have) == edges:
                    break
    return sorted((c // nodes, c % nodes) for c in have)


RMAT_PROBS = (0.57, 0.19, 0.19, 0.05)


def gen_rmat(scale: int, edges: int, seed: int = 0, probs=RMAT_PROBS,
             max_rounds: int = 1000) -> list[tuple[int, int]]:
    """R-MAT graph on ``2**scale`` nodes with exactly ``edges`` simple edges.

    Each edge descends ``scale`` levels of the adjacency matrix, choosing a
    quadrant with probabilities ``(a, b, c, d)``.  Self-loops and duplicates
    are dropped and the shortfall resampled (at most ``max_rounds`` rounds).
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (4,) or abs(probs.sum() - 1.0) > 1e-9 or (probs < 0).any():
        raise ValueError("probs must be four non-negative numbers summing to 1")
    n = 1 << scale
    if edges > n * (n - 1) // 2:
        raise ValueError(f"{edges} edges exceed the simple-graph capacity of {n} nodes")
    g = rng(seed)
    cum = np.cumsum(probs)
    have: set[int] = set()
    rounds = 0
    while len(have) < edges:
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError(f"R-MAT could not reach {edges} distinct edges in {max_rounds} rounds")
        need = edges - len(have)
        batch = max(2 * need, 16)
        u = np.zeros(batch, dtype=np.int64)
        v = np.zeros(batch, dtype=np.int64)
        for _ in range(scale):
            q = np.searchsorted(cum, g.random(batch), side="right")
            q = np.minimum(q, 3)
            u = (u << 1) | (q >> 1)
            v = (v << 1) | (q & 1)
        lo, hi = _normalize(u, v)
        for code in (lo * n + hi).tolist():
            if code not in have:
                have.add(code)
                if len(have) == edges:
                    break
    return sorted((c // n, c % n) for c in have)


def gen_clique_pack(alpha_hat: int, m: int) -> list[tuple[int, int]]:
    """``floor(m / l)`` disjoint ``K_k`` (``k = 2 * alpha_hat``, ``l = C(k, 2)``)
    on consecutive ids, then ``m - n*l`` disjoint filler edges."""
    if alpha_hat < 2:
        raise ValueError("alpha_hat must be >= 2")
    k = 2 * alpha_hat
    l = k * (k - 1) // 2
    if m < l:
        raise ValueError(f"m must be at least {l} for alpha_hat={alpha_hat}")
    n = m // l
    out = []
    for c in range(n):
        base = c * k
        out.extend((base + i, base + j) for i, j in combinations(range(k), 2))
    nxt = n * k
    for _ in range(m - n * l):
        out.append((nxt, nxt + 1))
        nxt += 2
    return out


def clique_pack_triangles(alpha_hat: int, m: int) -> int:
    k = 2 * alpha_hat
    return (m // (k * (k - 1) // 2)) * comb(k, 3)


def clique_pack_lower_bound(alpha_hat: int, m: int) -> float:
    """Lower bound on the triangles of an ``m``-edge graph of arboricity
    ``alpha_hat`` built by clique packing."""
    a = alpha_hat
    return (2 / 3) * m * a - (2 / 3) * m - (4 / 3) * a ** 3 - (2 / 3) * a ** 2


def gen_star(leaves: int, hub: int = 0) -> list[tuple[int, int]]:
    """A hub joined to ``leaves`` leaves, plus a path through the leaves so
    that there are triangles through the hub."""
    ls = list(range(hub + 1, hub + 1 + leaves))
    edges = {(hub, v) for v in ls}
    edges.update((a, b) for a, b in zip(ls, ls[1:]))
    return sorted(edges)


# -- oracles ---------------------------------------------------------------------

def adjacency(edges, directed: bool = False) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        if not directed:
            adj.setdefault(v, set()).add(u)
    return adj


def triangles_brute(edges) -> list[tuple[int, int, int]]:
    """O(n^3) enumeration of ``x < y < z`` triples that are pairwise adjacent."""
    adj = adjacency(edges)
    nodes = sorted(adj)
    out = []
    for i, x in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            y = nodes[j]
            if y not in adj[x]:
                continue
            for z in nodes[j + 1:]:
                if z in adj[x] and z in adj[y]:
                    out.append((x, y, z))
    return out


def triangle_count_brute(edges) -> int:
    return len(triangles_brute(edges))


def triangle_count_fast(edges) -> int:
    """Set-intersection count for larger graphs (still independent of the join)."""
    fwd = adjacency([(min(u, v), max(u, v)) for u, v in edges if u != v], directed=True)
    return sum(len(fwd[x] & fwd.get(y, set())) for x in fwd for y in fwd[x])


__all__ = [
    "gen_rand", "gen_rmat", "gen_clique_pack", "gen_pathological", "gen_star",
    "clique_pack_triangles", "clique_pack_lower_bound", "triangles_brute",
    "triangle_count_brute", "triangle_count_fast", "RMAT_PROBS", "rng",
]
