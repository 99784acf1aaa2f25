"""Packing bounds for unit disks meeting a tau x tau cell.

``alpha`` is the largest number of pairwise non-conflicting unit disks that can
all meet one cell; ``rho`` is the number of disjoint color sets the grid layout
needs.  Three sources are offered: the tabulated values, the integer formula
for integral widths, and the density bound valid for every width.  The
empirical searcher tries to *beat* the tabulated alpha and so acts as a
falsifier for it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import DEFAULT_EPS, UnitDisk, Point, disk_intersects_rect, disks_conflict, Rect

# hexagonal packing: the densest packing of congruent disks
HEX_PACKING_DENSITY = 0.906899682117109  # pi / sqrt(12)

SQRT2 = math.sqrt(2.0)
_ALPHA_POINTS = {1.0: 4, 2.0: 7, 3.0: 10, 4.0: 14, 5.0: 17}
_ALPHA_INTERVAL = (SQRT2, 8.0 / 5.0, 5)
_TAU_TOL = 1e-12

MODES = ("table", "analytic", "tight-experimental")


class PackingDomainError(ValueError):
    pass


def _check_tau(tau: float):
    if not (1.0 <= tau <= 5.0):
        raise PackingDomainError(f"tau outside [1,5]: {tau}")


def in_table_domain(tau: float) -> bool:
    lo, hi, _ = _ALPHA_INTERVAL
    if lo - _TAU_TOL <= tau <= hi + _TAU_TOL:
        return True
    return any(abs(tau - t) <= _TAU_TOL for t in _ALPHA_POINTS)


def alpha_table(tau: float) -> int:
    """Tabulated alpha; outside the table falls back to :func:`alpha_analytic`.

    Use :func:`profile` to learn whether the fallback was taken.
    """
    lo, hi, a = _ALPHA_INTERVAL
    if lo - _TAU_TOL <= tau <= hi + _TAU_TOL:
        return a
    for t, a in _ALPHA_POINTS.items():
        if abs(tau - t) <= _TAU_TOL:
            return a
    return alpha_analytic(tau)


def alpha_obs1(tau: int) -> int:
    """Integer-width bound from the edge/interior counting argument."""
    if isinstance(tau, bool) or int(tau) != tau or tau < 1:
        raise PackingDomainError(f"integer width >= 1 required, got {tau!r}")
    tau = int(tau)
    inner = (tau / 2) ** 2
    if tau % 2 == 0:
        return 2 * tau + 2 + int(inner)
    return math.floor(4 * math.ceil(tau / 2) + 4 + inner)


def alpha_analytic(tau: float) -> int:
    """Density bound: area of the cell grown by 2 over the area per disk."""
    if tau < 1.0:
        raise PackingDomainError(f"tau must be >= 1, got {tau}")
    area = 4.0 * math.pi + 8.0 * tau + tau * tau
    return math.floor(area / math.sqrt(12.0))


def rho_of(tau: float, mode: str = "table") -> int:
    _check_tau(tau)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "tight-experimental":
        if tau >= 2.0:
            return 4
        if tau >= 8.0 / 5.0:
            return 6
        if tau >= SQRT2:
            return 7
        return 9
    return (1 + math.ceil(2.0 / tau)) ** 2


@dataclass(frozen=True)
class PackingProfile:
    tau: float
    alpha: int
    rho: int
    mode: str
    # set when alpha had to come from the density bound outside the table
    alpha_fallback: bool = False


def profile(tau: float, mode: str = "table") -> PackingProfile:
    _check_tau(tau)
    rho = rho_of(tau, mode)
    if mode == "analytic":
        return PackingProfile(tau, alpha_analytic(tau), rho, mode)
    fallback = not in_table_domain(tau)
    return PackingProfile(tau, alpha_table(tau), rho, mode, fallback)


# ---------------------------------------------------------------- searcher

@dataclass(frozen=True)
class PackingConfig:
    tau: float
    trials: int = 10_000
    seed: int = 0
    local_search_steps: int = 4
    pool: int = 64
    chunk: int = 20_000

    def __post_init__(self):
        _check_tau(self.tau)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class PackingResult:
    tau: float
    best_count: int
    disks: list[UnitDisk] = field(default_factory=list)
    trials: int = 0
    backend: str = ""

    def to_json(self) -> str:
        return json.dumps({"tau": self.tau, "best_count": self.best_count,
                           "centers": [[d.center.x, d.center.y] for d in self.disks]})


_SLOTS = 32


def _sample_pool(rng: np.random.Generator, n: int, pool: int, tau: float):
    """Uniform candidates in [-1, tau+1]^2, flagged valid when within 1 of the cell."""
    cands = rng.uniform(-1.0, tau + 1.0, size=(n, pool, 2))
    qx = np.clip(cands[..., 0], 0.0, tau)
    qy = np.clip(cands[..., 1], 0.0, tau)
    dx = cands[..., 0] - qx
    dy = cands[..., 1] - qy
    valid = dx * dx + dy * dy <= 1.0
    return cands, valid


def empirical_alpha_search(cfg: PackingConfig, backend: str | None = None) -> PackingResult:
    """Randomized lower-bound witness for alpha at width ``cfg.tau``.

    Each trial draws a pool of candidate centers, inserts them greedily, then
    alternates repulsion moves with re-insertion from the pool.  The best
    configuration is replayed through the exact predicates before returning.
    """
    rng = np.random.default_rng(cfg.seed)
    sep = 2.0 + DEFAULT_EPS
    best_count, best_cfg = -1, None
    done = 0
    while done < cfg.trials:
        n = min(cfg.chunk, cfg.trials - done)
        cands, valid = _sample_pool(rng, n, cfg.pool, cfg.tau)
        counts, cfgs = _kernels.pack_trials(cands, valid, cfg.tau, cfg.local_search_steps,
                                            sep * sep, _SLOTS, backend=backend)
        t = int(np.argmax(counts))
        if counts[t] > best_count:
            best_count = int(counts[t])
            best_cfg = cfgs[t, :best_count].copy()
        done += n
    disks = sorted(UnitDisk(Point(float(x), float(y))) for x, y in best_cfg)
    if not packing_is_valid(disks, cfg.tau):
        raise AssertionError("searcher produced an invalid configuration")
    used = backend or _kernels.active_backend()
    return PackingResult(cfg.tau, best_count, disks, cfg.trials, used)


def packing_is_valid(disks, tau: float, eps: float = DEFAULT_EPS) -> bool:
    """Pairwise non-conflicting and every disk meets the cell [0, tau]^2."""
    cell = Rect(0.0, 0.0, tau, tau)
    if not all(disk_intersects_rect(d, cell, eps) for d in disks):
        return False
    return not any(disks_conflict(a, b, eps)
                   for i, a in enumerate(disks) for b in disks[i + 1:])
