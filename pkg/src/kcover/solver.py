"""Grid-partitioned k-colorable unit disk cover with handover.

Cells holding points are processed in row-major order.  Each cell runs an
exhaustive backtracking search for k pairwise-conflict-free classes of disks
covering its still-uncovered points and containing every disk handed to it.
Every selected disk is finally colored from the color set of the cell that
contains its center, so disks sharing a color either sit in the same cell and
the same class, or in cells at least two units apart.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .coloring import ColorabilityCache, bits, k_coloring, min_coloring, popcount
from .geometry import Tolerance, _eps
from .grid import (CellId, GridParams, cell_rect, cells_of, color_set_index, order_key,
                   rect_hits)
from .model import ColoredCover, Instance, InstanceError
from .packing import profile

log = logging.getLogger(__name__)

MODES = ("default", "tight-experimental")


class SolverError(RuntimeError):
    pass


class CellInfeasible(SolverError):
    def __init__(self, cell: CellId, k: int, points: Sequence[int] = (), handover: Sequence[int] = ()):
        self.cell = CellId(*cell)
        self.k = k
        self.points = tuple(points)
        self.handover = tuple(handover)
        super().__init__(f"cell {tuple(self.cell)}: no {k}-class cover of points "
                         f"{list(self.points)} containing handover disks {list(self.handover)}")


class BudgetExhausted(SolverError):
    def __init__(self, cell: CellId, budget: int):
        self.cell = CellId(*cell)
        self.budget = budget
        super().__init__(f"cell {tuple(self.cell)}: node budget {budget} exhausted")


class _ColoringFailure(SolverError):
    def __init__(self, cell: CellId):
        self.cell = cell
        super().__init__(f"cannot color disks centered in cell {tuple(cell)}")


@dataclass(frozen=True)
class SolverConfig:
    tau: float = 2.0
    mode: str = "default"
    tol: Tolerance = field(default_factory=Tolerance.from_env)
    cell_node_budget: int | None = None
    # try class budgets 1..k in turn and keep the first that succeeds
    lean: bool = True
    # cross-cell backjumps allowed per class budget before giving up
    max_backtracks: int = 10_000

    def __post_init__(self):
        if not (1.0 <= self.tau <= 5.0):
            raise InstanceError(f"tau outside [1,5]: {self.tau}")
        if self.mode not in MODES:
            raise InstanceError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class CellSolution:
    cell: CellId
    classes: tuple[tuple[int, ...], ...]

    @property
    def disks(self) -> list[int]:
        return sorted(d for c in self.classes for d in c)


@dataclass
class SolveStats:
    k: int
    k_used: int = 0
    tau: float = 2.0
    mode: str = "default"
    rho: int = 0
    alpha: int = 0
    layout: str = "block"
    downgraded: bool = False
    cells_processed: int = 0
    handovers: int = 0
    nodes: int = 0
    backtracks: int = 0
    # |classes ∪ handover| per processed cell, and per final color-set group
    cell_loads: dict = field(default_factory=dict)
    group_loads: dict = field(default_factory=dict)
    max_class_size: int = 0
    cardinality_violations: list = field(default_factory=list)
    attempts: list = field(default_factory=list)
    runtime_ms: float = 0.0


# ------------------------------------------------------------------ context

class SearchContext:
    """Precomputed masks for one instance; shared by all cell searches."""

    def __init__(self, inst: Instance, grid: GridParams, eps: float):
        self.inst = inst
        self.grid = grid
        self.eps = eps
        m = inst.m
        self.centers = np.array([d.center for d in inst.disks], dtype=float).reshape(m, 2)
        self.pts = np.array(inst.points, dtype=float).reshape(inst.n, 2)
        cov = _kernels.contains_matrix(self.pts, self.centers, 1.0 + eps)
        self.cover = [_row_mask(r) for r in cov]
        conf = _kernels.contains_matrix(self.centers, self.centers, 2.0 + eps)
        np.fill_diagonal(conf, False)
        self.adj = [_row_mask(r) for r in conf]
        self.home = [CellId(int(i), int(j)) for i, j in cells_of(self.centers, grid.tau)]
        self.homed: dict[CellId, int] = {}
        for d, h in enumerate(self.home):
            self.homed[h] = self.homed.get(h, 0) | (1 << d)
        self.colorable = ColorabilityCache(self.adj)
        self._cand: dict[CellId, int] = {}

    def candidates(self, cell: CellId) -> int:
        hit = self._cand.get(cell)
        if hit is None:
            hit = _row_mask(rect_hits(self.centers, cell_rect(cell, self.grid), self.eps)) if self.inst.m else 0
            self._cand[cell] = hit
        return hit


def _row_mask(row: np.ndarray) -> int:
    mask = 0
    for j in np.flatnonzero(row):
        mask |= 1 << int(j)
    return mask


# ------------------------------------------------------------------ cell search

def iter_cell_solutions(cell: CellId, points: Sequence[int], candidates: int, handover: int,
                        k: int, budget: int | None, ctx: SearchContext,
                        groups: dict[CellId, int] | None = None):
    """Yield the distinct sets of new disks that solve one cell, in canonical order.

    ``points`` are instance point indices still uncovered in ``cell``;
    ``candidates`` and ``handover`` are disk bitmasks.  Beyond the k classes of
    the cell itself, every disk chosen here must keep the set of selected disks
    centered in its own cell k-colorable (``groups`` maps a cell to that set).
    Branching picks the uncovered point with the fewest feasible covering
    disks, then tries those disks by how many uncovered points they cover.
    """
    groups = groups or {}
    colorable = ctx.colorable
    if not colorable(handover, k):
        return
    covers_local: dict[int, int] = {}
    opts = []
    for li, p in enumerate(points):
        o = ctx.cover[p] & candidates
        opts.append(o)
        for d in bits(o):
            covers_local[d] = covers_local.get(d, 0) | (1 << li)
    nodes = 0
    seen: set[int] = set()

    def feasible(d: int, chosen: int) -> bool:
        bit = 1 << d
        if not colorable(handover | chosen | bit, k):
            return False
        h = ctx.home[d]
        if h != cell:
            g = groups.get(h, 0) | (chosen & ctx.homed.get(h, 0)) | bit
            if not colorable(g, k):
                return False
        return True

    def rec(uncovered: int, chosen: int):
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExhausted(cell, budget)
        if not uncovered:
            if chosen not in seen:
                seen.add(chosen)
                yield chosen
            return
        pool = 0
        for d in bits(candidates & ~chosen):
            if covers_local.get(d, 0) & uncovered and feasible(d, chosen):
                pool |= 1 << d
        best, best_n = -1, None
        for li in bits(uncovered):
            c = popcount(opts[li] & pool)
            if c == 0:
                return
            if best_n is None or c < best_n:
                best, best_n = li, c
        order = sorted(bits(opts[best] & pool),
                       key=lambda d: (-popcount(covers_local[d] & uncovered), d))
        for d in order:
            yield from rec(uncovered & ~covers_local[d], chosen | (1 << d))

    for chosen in rec((1 << len(points)) - 1, 0):
        members = handover | chosen
        col = k_coloring(ctx.adj, members, k)
        classes = [[] for _ in range(k)]
        for d in bits(members):
            classes[col[d]].append(d)
        yield CellSolution(CellId(*cell), tuple(tuple(c) for c in classes)), chosen, nodes


def solve_cell(cell: CellId, points: Sequence[int], candidates: int, handover: int, k: int,
               budget: int | None, ctx: SearchContext,
               groups: dict[CellId, int] | None = None) -> CellSolution:
    """First solution of :func:`iter_cell_solutions`; raises CellInfeasible if none.

    The returned classes partition the handover disks together with the new
    disks; each class is pairwise conflict-free, so packing caps its size at alpha.
    """
    for sol, _, _ in iter_cell_solutions(cell, points, candidates, handover, k, budget, ctx, groups):
        return sol
    raise CellInfeasible(cell, k, points, bits(handover))


def handover_pass(sol: CellSolution, cell: CellId, home: Sequence[CellId],
                  ledger: dict[CellId, set]) -> tuple[CellSolution, dict[CellId, set]]:
    """Move every disk centered in a later cell out of ``sol`` into that cell's ledger."""
    ledger = {c: set(v) for c, v in ledger.items()}
    kept = []
    for cls in sol.classes:
        keep = []
        for d in cls:
            h = home[d]
            if order_key(h) > order_key(cell):
                ledger.setdefault(h, set()).add(d)
            else:
                keep.append(d)
        kept.append(tuple(keep))
    return CellSolution(sol.cell, tuple(kept)), ledger


def mark_covered(cover_masks: Sequence[int], remaining: Sequence[int], selected: int) -> list[int]:
    """Drop every point covered by a disk in ``selected`` (including handed-over disks)."""
    return [p for p in remaining if not cover_masks[p] & selected]


def color_id(cell: CellId, cls: int, grid: GridParams, k: int) -> int:
    return color_set_index(cell, grid) * k + cls


def assign_colors(cell_solutions: Sequence[CellSolution], grid: GridParams, k: int) -> dict[int, int]:
    """Color of a disk in class ``a`` (0-based) of cell ``c``: set(c) * k + a."""
    chi = {}
    for sol in cell_solutions:
        for a, cls in enumerate(sol.classes):
            for d in cls:
                chi[d] = color_id(sol.cell, a, grid, k)
    return chi


# ------------------------------------------------------------------ driver

def _layout_for(tau: float, mode: str) -> tuple[GridParams, int]:
    prof = profile(tau, "tight-experimental" if mode == "tight-experimental" else "table")
    layout = "block"
    if mode == "tight-experimental" and prof.rho in (6, 7):
        layout = f"tight{prof.rho}"
    return GridParams(tau, layout=layout), prof.rho


@dataclass
class _State:
    selected: int
    remaining: frozenset
    groups: dict
    ledger: dict


def _run(inst: Instance, cfg: SolverConfig, grid: GridParams, kk: int, ctx: SearchContext,
         stats: SolveStats) -> list[CellSolution]:
    """One pass over the cells with class budget ``kk``.

    When a cell has no solution the search backs up to an earlier cell and takes
    its next solution (conflict-directed backjumping).  A cell is only blamed
    when its candidate disks reach the failing cell's neighbourhood, so jumps
    skip unrelated parts of the grid.
    """
    by_cell: dict[CellId, list[int]] = {}
    for p, c in enumerate(cells_of(ctx.pts, grid.tau)):
        by_cell.setdefault(CellId(int(c[0]), int(c[1])), []).append(p)
    cells = sorted(by_cell, key=order_key)
    L = len(cells)
    cand = [ctx.candidates(c) for c in cells]
    reach = []
    for c in cand:
        r = c
        for d in bits(c):
            r |= ctx.homed[ctx.home[d]]
        reach.append(r)
    rel_cache: dict[int, set] = {}

    def relevant(i: int) -> set:
        hit = rel_cache.get(i)
        if hit is None:
            hit = rel_cache[i] = {j for j in range(i) if cand[j] & reach[i]}
        return hit

    states: list[_State | None] = [None] * (L + 1)
    states[0] = _State(0, frozenset(range(inst.n)), {}, {})
    gens: list = [None] * L
    conflicts: list[set] = [set() for _ in range(L)]
    picks: list = [None] * L
    first_fail: CellInfeasible | None = None
    jumps = 0
    i = 0
    while i < L:
        st = states[i]
        cell = cells[i]
        if gens[i] is None:
            pts = [p for p in by_cell[cell] if p in st.remaining]
            H = 0
            for d in st.ledger.get(cell, ()):
                H |= 1 << d
            gens[i] = iter_cell_solutions(cell, pts, cand[i] & ~st.selected, H, kk,
                                          cfg.cell_node_budget, ctx, st.groups)
            conflicts[i] = set()
        item = next(gens[i], None)
        if item is None:
            if first_fail is None:
                pts = [p for p in by_cell[cell] if p in st.remaining]
                first_fail = CellInfeasible(cell, kk, pts, sorted(st.ledger.get(cell, ())))
            blame = conflicts[i] | relevant(i)
            if not blame or jumps >= cfg.max_backtracks:
                raise first_fail
            jumps += 1
            h = max(blame)
            conflicts[h] |= blame - {h}
            for l in range(h + 1, L):
                gens[l] = None
            i = h
            continue
        sol, chosen, nodes = item
        stats.nodes += nodes
        picks[i] = (sol, chosen)
        _, ledger = handover_pass(sol, cell, ctx.home, st.ledger)
        groups = dict(st.groups)
        for d in bits(chosen):
            h = ctx.home[d]
            groups[h] = groups.get(h, 0) | (1 << d)
        selected = st.selected | chosen
        remaining = frozenset(mark_covered(ctx.cover, sorted(st.remaining), selected))
        states[i + 1] = _State(selected, remaining, groups, ledger)
        i += 1
    final = states[L]
    if final.remaining:  # pragma: no cover - every point lies in some processed cell
        raise SolverError(f"points left uncovered: {sorted(final.remaining)}")
    stats.backtracks += jumps
    _record_cells(cells, picks, states, kk, stats)
    return _color_groups(final.groups, grid, kk, inst.k, ctx, stats)


def _record_cells(cells, picks, states, kk, stats: SolveStats) -> None:
    alpha = stats.alpha
    stats.cell_loads.clear()
    stats.cells_processed = len(cells)
    stats.handovers = 0
    for i, cell in enumerate(cells):
        sol, chosen = picks[i]
        load = len(sol.disks)
        stats.cell_loads[tuple(cell)] = load
        stats.handovers += sum(len(v) for v in states[i + 1].ledger.values()) \
            - sum(len(v) for v in states[i].ledger.values())
        biggest = max((len(c) for c in sol.classes), default=0)
        stats.max_class_size = max(stats.max_class_size, biggest)
        if load > alpha * kk or biggest > alpha:
            stats.cardinality_violations.append(("cell", tuple(cell), load))


def _color_groups(groups: dict[CellId, int], grid: GridParams, kk: int, k: int,
                  ctx: SearchContext, stats: SolveStats) -> list[CellSolution]:
    """Color each center-cell group from its cell's color set.

    A class may be vetoed for a disk when a conflicting disk centered in another
    cell with the same color set already holds it; with the block layout this
    only happens for distances within the tolerance of the threshold.
    """
    chi: dict[int, int] = {}
    colored = 0
    out = []
    for h in sorted(groups, key=order_key):
        mask = groups[h]
        s = color_set_index(h, grid)
        allowed = {}
        for v in bits(mask):
            veto = 0
            for u in bits(ctx.adj[v] & colored):
                if chi[u] // k == s:
                    veto |= 1 << (chi[u] % k)
            if veto:
                allowed[v] = ((1 << kk) - 1) & ~veto
        col = min_coloring(ctx.adj, mask, kk, allowed or None)
        if col is None:
            raise _ColoringFailure(h)
        classes = [[] for _ in range(k)]
        for v in bits(mask):
            chi[v] = s * k + col[v]
            classes[col[v]].append(v)
        colored |= mask
        sol = CellSolution(h, tuple(tuple(c) for c in classes))
        load = popcount(mask)
        stats.group_loads[tuple(h)] = load
        biggest = max(len(c) for c in sol.classes)
        stats.max_class_size = max(stats.max_class_size, biggest)
        if load > stats.alpha * kk or biggest > stats.alpha:
            stats.cardinality_violations.append(("group", tuple(h), load))
        out.append(sol)
    return out


def _solve_layout(inst: Instance, cfg: SolverConfig, grid: GridParams, rho: int,
                  ctx: SearchContext, stats: SolveStats) -> ColoredCover:
    budgets = range(1, inst.k + 1) if cfg.lean else [inst.k]
    last_err: SolverError | None = None
    for kk in budgets:
        try:
            sols = _run(inst, cfg, grid, kk, ctx, stats)
        except (CellInfeasible, BudgetExhausted, _ColoringFailure) as err:
            stats.attempts.append((kk, type(err).__name__))
            last_err = err
            continue
        stats.attempts.append((kk, "ok"))
        stats.k_used = kk
        return ColoredCover.build(assign_colors(sols, grid, inst.k), stats)
    assert last_err is not None
    raise last_err


def solve(inst: Instance, cfg: SolverConfig | None = None) -> ColoredCover:
    """Colored cover using at most rho(tau) * k colors.

    Raises :class:`InstanceError` for invalid input, :class:`CellInfeasible` or
    :class:`BudgetExhausted` when a cell search fails for every class budget.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    eps = _eps(cfg.tol.eps)
    inst.check(eps)
    grid, rho = _layout_for(cfg.tau, cfg.mode)
    prof = profile(cfg.tau, "table")
    stats = SolveStats(k=inst.k, tau=cfg.tau, mode=cfg.mode, rho=rho, alpha=prof.alpha,
                       layout=grid.layout)
    ctx = SearchContext(inst, grid, eps)
    if grid.layout == "block":
        cover = _solve_layout(inst, cfg, grid, rho, ctx, stats)
    else:
        cover = _solve_tight(inst, cfg, grid, rho, ctx, stats, eps)
    stats.runtime_ms = (time.perf_counter() - t0) * 1000.0
    return cover


def _solve_tight(inst, cfg, grid, rho, ctx, stats, eps) -> ColoredCover:
    from .oracle import verify

    try:
        cover = _solve_layout(inst, cfg, grid, rho, ctx, stats)
        report = verify(inst, cover, rho * inst.k, eps)
        if report.ok:
            return cover
        log.warning("tight layout produced an invalid cover: %s", report.violations[:3])
    except (CellInfeasible, BudgetExhausted, _ColoringFailure) as err:
        log.warning("tight layout failed (%s); falling back to the block layout", err)
    grid = GridParams(cfg.tau)
    prof = profile(cfg.tau, "table")
    stats.downgraded = True
    stats.layout = grid.layout
    stats.rho = prof.rho
    stats.cell_loads.clear()
    stats.group_loads.clear()
    ctx = SearchContext(inst, grid, eps)
    return _solve_layout(inst, cfg, grid, prof.rho, ctx, stats)
