"""Ground truth at desk scale: verifier, exact minimum-color cover, planted instances."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coloring import bits, greedy_clique, k_coloring
from .geometry import UnitDisk, disk_contains, disks_conflict
from .model import ColoredCover, Instance, InstanceError

MAX_ORACLE_DISKS = 14
MAX_ORACLE_POINTS = 12
PLANTED_GAP = 0.05


# ------------------------------------------------------------------ verifier

@dataclass
class VerifyReport:
    covered: bool
    conflict_free: bool
    colors_used: int
    within_budget: bool
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.covered and self.conflict_free and self.within_budget

    def to_dict(self) -> dict:
        return {"covered": self.covered, "conflict_free": self.conflict_free,
                "colors_used": self.colors_used, "within_budget": self.within_budget,
                "violations": [[kind, list(ids)] for kind, ids in self.violations]}


def verify(inst: Instance, cover: ColoredCover, budget: int, eps: float | None = None) -> VerifyReport:
    """Check coverage, conflict-freeness and the color budget, listing every violation."""
    m = inst.m
    sel = list(cover.selected)
    for d in list(sel) + list(cover.chi):
        if not (isinstance(d, (int, np.integer)) and 0 <= d < m):
            raise InstanceError(f"cover references unknown disk id {d!r}")
    violations = []
    for d in sel:
        if d not in cover.chi:
            violations.append(("uncolored", (d,)))
    for i, p in enumerate(inst.points):
        if not any(disk_contains(inst.disks[d], p, eps) for d in sel):
            violations.append(("uncovered", (i,)))
    conflict_free = True
    for a_i, a in enumerate(sel):
        for b in sel[a_i + 1:]:
            if a in cover.chi and b in cover.chi and cover.chi[a] == cover.chi[b] \
                    and disks_conflict(inst.disks[a], inst.disks[b], eps):
                violations.append(("conflict", (a, b)))
                conflict_free = False
    covered = not any(kind == "uncovered" for kind, _ in violations)
    colors = len({cover.chi[d] for d in sel if d in cover.chi})
    uncolored = any(kind == "uncolored" for kind, _ in violations)
    within = colors <= budget
    if not within:
        violations.append(("budget", (colors, budget)))
    return VerifyReport(covered, conflict_free and not uncolored, colors, within, violations)


# ------------------------------------------------------------------ exact search

@dataclass
class OracleResult:
    k_star: int
    witness: ColoredCover


class OracleError(ValueError):
    pass


def conflict_masks(disks: Sequence[UnitDisk], eps: float | None = None) -> list[int]:
    adj = [0] * len(disks)
    for i, a in enumerate(disks):
        for j in range(i + 1, len(disks)):
            if disks_conflict(a, disks[j], eps):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def chromatic_number(adj: Sequence[int] | np.ndarray) -> int:
    """Exact chromatic number by iterative deepening from a clique lower bound.

    ``adj`` is either a list of neighbour bitmasks or a square boolean matrix.
    """
    if isinstance(adj, np.ndarray) or (len(adj) and not isinstance(adj[0], (int, np.integer))):
        mat = np.asarray(adj, dtype=bool)
        adj = [sum(1 << int(j) for j in np.flatnonzero(row) if j != i) for i, row in enumerate(mat)]
    n = len(adj)
    if n == 0:
        return 0
    full = (1 << n) - 1
    k = max(1, greedy_clique(adj, full))
    while k_coloring(adj, full, k) is None:
        k += 1
    return k


def min_colors_exact(inst: Instance, limit: int | None = None, eps: float | None = None) -> OracleResult:
    """Smallest k for which some covering subset of disks is k-colorable.

    Branches on a covering disk for the most constrained uncovered point and a
    color for that disk (colors opened in order), for k = 1, 2, ...
    """
    m, n = inst.m, inst.n
    if m > MAX_ORACLE_DISKS or n > MAX_ORACLE_POINTS:
        raise OracleError(f"instance too large for the exact oracle (m={m} > {MAX_ORACLE_DISKS} "
                          f"or n={n} > {MAX_ORACLE_POINTS})")
    covers = [sum(1 << d for d, disk in enumerate(inst.disks) if disk_contains(disk, p, eps))
              for p in inst.points]
    for i, c in enumerate(covers):
        if not c:
            raise OracleError(f"no covering subset exists: point {i} lies in no disk")
    if n == 0:
        return OracleResult(0, ColoredCover.build({}))
    adj = conflict_masks(inst.disks, eps)
    limit = m if limit is None else limit
    for k in range(1, limit + 1):
        chi = _cover_with(covers, adj, k)
        if chi is not None:
            return OracleResult(k, ColoredCover.build(chi))
    raise OracleError(f"k_star exceeds limit {limit}")


def _cover_with(covers: list[int], adj: list[int], k: int) -> dict[int, int] | None:
    colour: dict[int, int] = {}

    def rec(used: int) -> bool:
        sel = 0
        for d in colour:
            sel |= 1 << d
        todo = [i for i, c in enumerate(covers) if not c & sel]
        if not todo:
            return True
        p = min(todo, key=lambda i: (bin(covers[i]).count("1"), i))
        for d in bits(covers[p]):
            for c in range(min(used + 1, k)):
                if any(colour.get(u) == c for u in bits(adj[d] & sel)):
                    continue
                colour[d] = c
                if rec(max(used, c + 1)):
                    return True
                del colour[d]
        return False

    return dict(colour) if rec(0) else None


# ------------------------------------------------------------------ generator

def gen_planted(k: int, cells_per_side: int = 3, density: float = 0.5, seed: int = 0,
                tau: float = 2.0) -> Instance:
    """k families of mutually distant unit disks plus points inside their union.

    Centers within a family are more than ``2 + PLANTED_GAP`` apart, so coloring
    each family with its own color is a valid k-coloring of all disks; that
    witness is stored under ``meta["planted"]``.  ``density`` is points per unit
    area of the ``(cells_per_side * tau)``-wide square.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    side = cells_per_side * tau
    sep2 = (2.0 + PLANTED_GAP) ** 2
    centers, family = [], []
    for f in range(k):
        fam: list[tuple[float, float]] = []
        attempts = max(50, int(30 * side * side))
        for x, y in rng.uniform(0.0, side, size=(attempts, 2)):
            if all((x - a) ** 2 + (y - b) ** 2 > sep2 for a, b in fam):
                fam.append((float(x), float(y)))
        centers.extend(fam)
        family.extend([f] * len(fam))
    npts = int(round(density * side * side))
    pts: list[tuple[float, float]] = []
    carr = np.array(centers)
    guard = 0
    while len(pts) < npts and guard < 1000:
        guard += 1
        cand = rng.uniform(0.0, side, size=(4 * npts, 2))
        d2 = ((cand[:, None, :] - carr[None, :, :]) ** 2).sum(-1)
        # keep 1e-6 clear of every disk boundary (general position)
        inside = (d2 <= (1.0 - 1e-6) ** 2).any(1) & (np.abs(np.sqrt(d2) - 1.0) > 1e-6).all(1)
        pts.extend(map(tuple, cand[inside][: npts - len(pts)].tolist()))
    planted = {"selected": list(range(len(centers))), "colors": {str(d): f for d, f in enumerate(family)}}
    meta = {"generator": {"kind": "planted", "k": k, "cells": cells_per_side, "density": density,
                          "seed": seed, "tau": tau}, "planted": planted}
    return Instance.from_coords(pts, centers, k, meta=meta)


def planted_witness(inst: Instance) -> ColoredCover:
    planted = inst.meta["planted"]
    return ColoredCover.build({int(d): int(c) for d, c in planted["colors"].items()})


def gen_uniform(k: int, n: int, m: int, side: float, seed: int = 0, covered_only: bool = False) -> Instance:
    """Points and disk centers uniform in [0, side]^2; points may be uncovered.

    With ``covered_only`` the points lying in no disk are dropped, so the
    result may hold fewer than ``n`` points.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, side, size=(n, 2))
    ctr = rng.uniform(0.0, side, size=(m, 2))
    if covered_only:
        d2 = ((pts[:, None, :] - ctr[None, :, :]) ** 2).sum(-1)
        pts = pts[(d2 <= 1.0).any(1)] if m else pts[:0]
    meta = {"generator": {"kind": "uniform", "k": k, "n": n, "m": m, "side": side, "seed": seed}}
    return Instance.from_coords(pts.tolist(), ctr.tolist(), k, meta=meta)
