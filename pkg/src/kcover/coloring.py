"""Exact small-graph coloring over bitmask adjacency.

Vertices are integers; ``adj[v]`` is the bitmask of neighbours of ``v``.  A
vertex set is a bitmask as well.  Graphs here are tiny (a few dozen vertices
at most), so plain backtracking with most-constrained-first ordering is enough.
"""
from __future__ import annotations

from typing import Mapping, Sequence


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def greedy_clique(adj: Sequence[int], mask: int) -> int:
    """Size of a clique found greedily (a lower bound on the chromatic number)."""
    best = 0
    for v in bits(mask):
        clique = 1 << v
        cand = adj[v] & mask
        while cand:
            # highest-degree candidate inside the remaining candidate set
            u = max(bits(cand), key=lambda w: (popcount(adj[w] & cand), -w))
            clique |= 1 << u
            cand &= adj[u]
        best = max(best, popcount(clique))
    return best


def greedy_coloring(adj: Sequence[int], mask: int) -> dict[int, int]:
    """Smallest-available-color greedy in largest-degree-first order."""
    colour: dict[int, int] = {}
    for v in sorted(bits(mask), key=lambda v: (-popcount(adj[v] & mask), v)):
        used = {colour[u] for u in bits(adj[v] & mask) if u in colour}
        colour[v] = next(c for c in range(len(used) + 1) if c not in used)
    return colour


def k_coloring(adj: Sequence[int], mask: int, k: int,
               allowed: Mapping[int, int] | None = None) -> dict[int, int] | None:
    """A proper coloring of ``mask`` with colors ``0..k-1``, or None.

    ``allowed`` optionally restricts vertex ``v`` to the colors whose bits are
    set in ``allowed[v]``.  Without restrictions, colors are opened in order
    (a vertex may take at most one new color), which removes permutation
    symmetry; the result is deterministic.
    """
    verts = bits(mask)
    if not verts:
        return {}
    if k <= 0:
        return None
    full = (1 << k) - 1
    avail = {v: full & (allowed.get(v, full) if allowed else full) for v in verts}
    if any(a == 0 for a in avail.values()):
        return None
    colour: dict[int, int] = {}
    symmetric = not allowed

    def pick():
        best, key = None, None
        for v in verts:
            if v in colour:
                continue
            free = avail[v]
            for u in bits(adj[v] & mask):
                c = colour.get(u)
                if c is not None:
                    free &= ~(1 << c)
            kk = (popcount(free), -popcount(adj[v] & mask), v)
            if key is None or kk < key:
                best, key = (v, free), kk
        return best

    def rec(used: int) -> bool:
        if len(colour) == len(verts):
            return True
        v, free = pick()
        for c in range(k):
            if not free >> c & 1:
                continue
            if symmetric and c > used:
                break
            colour[v] = c
            if rec(max(used, c + 1)):
                return True
            del colour[v]
        return False

    return dict(colour) if rec(0) else None


def min_coloring(adj: Sequence[int], mask: int, kmax: int,
                 allowed: Mapping[int, int] | None = None) -> dict[int, int] | None:
    """Coloring with the fewest colors (at most ``kmax``), or None."""
    if not mask:
        return {}
    lo = max(1, greedy_clique(adj, mask))
    for k in range(lo, kmax + 1):
        col = k_coloring(adj, mask, k, allowed)
        if col is not None:
            return col
    return None


class ColorabilityCache:
    """Memoized ``is mask k-colorable`` for a fixed adjacency."""

    def __init__(self, adj: Sequence[int]):
        self.adj = adj
        self._memo: dict[tuple[int, int], bool] = {}

    def __call__(self, mask: int, k: int) -> bool:
        key = (mask, k)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(mask, k)
            self._memo[key] = hit
        return hit

    def _compute(self, mask: int, k: int) -> bool:
        adj = self.adj
        if k == 1:
            return all(not adj[v] & mask for v in bits(mask))
        if k == 2:
            return _bipartite(adj, mask)
        return k_coloring(adj, mask, k) is not None


def _bipartite(adj: Sequence[int], mask: int) -> bool:
    side: dict[int, int] = {}
    for s in bits(mask):
        if s in side:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in bits(adj[v] & mask):
                if u not in side:
                    side[u] = side[v] ^ 1
                    stack.append(u)
                elif side[u] == side[v]:
                    return False
    return True
