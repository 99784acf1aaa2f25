"""Core value types shared by the solver, oracle, reductions and file formats."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .geometry import Point, Rect, Segment, UnitDisk, disk_contains


class InstanceError(ValueError):
    """Input violates an instance invariant (exit code 3 at the CLI)."""


@dataclass(frozen=True)
class Instance:
    points: tuple[Point, ...]
    disks: tuple[UnitDisk, ...]
    k: int
    segments: tuple[Segment, ...] = ()
    region: Rect | None = None
    # provenance, planted witness, generator parameters ...
    meta: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_coords(cls, points: Sequence[Sequence[float]], disks: Sequence[Sequence[float]],
                    k: int, **kw) -> "Instance":
        return cls(tuple(Point(float(x), float(y)) for x, y in points),
                   tuple(UnitDisk(Point(float(x), float(y))) for x, y in disks), int(k), **kw)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.disks)

    def uncovered_points(self, eps: float | None = None) -> list[int]:
        return [i for i, p in enumerate(self.points)
                if not any(disk_contains(d, p, eps) for d in self.disks)]

    def check(self, eps: float | None = None) -> None:
        """Raise :class:`InstanceError` unless the point-cover input invariants hold."""
        if self.k < 1:
            raise InstanceError(f"k must be >= 1, got {self.k}")
        for name, pts in (("point", self.points), ("disk center", [d.center for d in self.disks])):
            for i, p in enumerate(pts):
                if p.x < 0 or p.y < 0:
                    raise InstanceError(f"{name} {i} at {tuple(p)} lies outside the first quadrant")
        bad = self.uncovered_points(eps)
        if bad:
            i = bad[0]
            raise InstanceError(f"point {i} at {tuple(self.points[i])} is not covered by any disk")


@dataclass
class ColoredCover:
    selected: tuple[int, ...]
    chi: dict[int, int]
    num_colors: int
    stats: Any = field(default=None, compare=False, repr=False)

    @classmethod
    def build(cls, chi: dict[int, int], stats: Any = None) -> "ColoredCover":
        chi = {int(d): int(c) for d, c in sorted(chi.items())}
        return cls(tuple(chi), chi, len(set(chi.values())), stats)
