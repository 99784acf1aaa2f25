"""Square grid of width tau: cell ids, processing order and color-set layout."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import Point, Rect, UnitDisk, _eps

TAU_MIN, TAU_MAX = 1.0, 5.0

# Label of each parity set for g = 2, matching the usual C1..C4 naming:
# both even -> C1, i even / j odd -> C2, i odd / j even -> C3, both odd -> C4.
PARITY_LABELS = {0: "C1", 2: "C2", 1: "C3", 3: "C4"}


class CellId(NamedTuple):
    i: int
    j: int


class GridError(ValueError):
    pass


def block_period(tau: float) -> int:
    """Smallest g with (g - 1) * tau >= 2, i.e. 1 + ceil(2 / tau)."""
    return 1 + math.ceil(2.0 / tau)


@dataclass(frozen=True)
class GridParams:
    tau: float = 2.0
    block_period: int | None = None
    # "block" is the g x g pattern; "tight6" / "tight7" are the unproven
    # six- and seven-set layouts used by the experimental solver mode.
    layout: str = "block"

    def __post_init__(self):
        if not (TAU_MIN <= self.tau <= TAU_MAX):
            raise GridError(f"tau outside [1,5]: {self.tau}")
        if self.block_period is None:
            object.__setattr__(self, "block_period", block_period(self.tau))
        if self.block_period < 2:
            raise GridError("block_period must be >= 2")
        if self.layout not in ("block", "tight6", "tight7"):
            raise GridError(f"unknown layout {self.layout!r}")

    @property
    def num_sets(self) -> int:
        if self.layout == "tight6":
            return 6
        if self.layout == "tight7":
            return 7
        return self.block_period ** 2


def cell_of(p: Point, g: GridParams) -> CellId:
    if p[0] < 0 or p[1] < 0:
        raise GridError(f"point {tuple(p)} outside the first quadrant")
    return CellId(int(math.floor(p[0] / g.tau)), int(math.floor(p[1] / g.tau)))


def cells_of(xy: np.ndarray, tau: float) -> np.ndarray:
    """Vectorized ``cell_of`` for an (n, 2) array; returns (n, 2) int64."""
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if (xy < 0).any():
        raise GridError("coordinates outside the first quadrant")
    return np.floor(xy / tau).astype(np.int64)


def cell_rect(c: CellId, g: GridParams) -> Rect:
    t = g.tau
    return Rect(c[0] * t, c[1] * t, (c[0] + 1) * t, (c[1] + 1) * t)


def order_key(c: CellId) -> tuple[int, int]:
    """Row-major order from the bottom-left: whole rows bottom to top, left to right."""
    return (c[1], c[0])


def later(c1: CellId, c2: CellId) -> bool:
    return order_key(c1) > order_key(c2)


def partial_greater(c1: CellId, c2: CellId) -> bool:
    """The partial order on ids: strictly up-right, straight up, or straight right."""
    (x1, y1), (x2, y2) = c1, c2
    return (x1 > x2 and y1 > y2) or (x1 == x2 and y1 > y2) or (x1 > x2 and y1 == y2)


def color_set_index(c: CellId, g: GridParams) -> int:
    i, j = c
    if g.layout == "tight6":
        return (i % 3) + 3 * (j % 2)
    if g.layout == "tight7":
        return (i + 3 * j) % 7
    n = g.block_period
    return (i % n) + n * (j % n)


def disks_intersecting_cell(disks: Sequence[UnitDisk], c: CellId, g: GridParams,
                            eps: float | None = None) -> list[int]:
    r = cell_rect(c, g)
    if not disks:
        return []
    centers = np.array([d.center for d in disks], dtype=float)
    return np.flatnonzero(rect_hits(centers, r, _eps(eps))).tolist()


def rect_hits(centers: np.ndarray, r: Rect, eps: float) -> np.ndarray:
    """Boolean mask of unit disks (by center) meeting the closed rectangle ``r``."""
    cx = np.clip(centers[:, 0], r.xmin, r.xmax)
    cy = np.clip(centers[:, 1], r.ymin, r.ymax)
    return np.hypot(centers[:, 0] - cx, centers[:, 1] - cy) <= 1.0 + eps
