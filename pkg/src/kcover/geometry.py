"""Planar primitives for unit disks, segments and rectangles.

All predicates use closed-set semantics with an additive tolerance ``eps``:
a point on a disk boundary is covered, and tangent disks conflict.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

DEFAULT_EPS = 1e-9
MIN_SEGMENT_LENGTH = 1e-12


class Point(NamedTuple):
    x: float
    y: float


class UnitDisk(NamedTuple):
    center: Point


class Segment(NamedTuple):
    a: Point
    b: Point

    def at(self, t: float) -> Point:
        return Point(self.a.x + t * (self.b.x - self.a.x), self.a.y + t * (self.b.y - self.a.y))


class Rect(NamedTuple):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, p: Point, eps: float = 0.0) -> bool:
        return (self.xmin - eps <= p.x <= self.xmax + eps
                and self.ymin - eps <= p.y <= self.ymax + eps)

    @property
    def corners(self) -> tuple[Point, Point, Point, Point]:
        return (Point(self.xmin, self.ymin), Point(self.xmax, self.ymin),
                Point(self.xmax, self.ymax), Point(self.xmin, self.ymax))


class GeometryError(ValueError):
    """Raised for malformed geometric input (degenerate segments, empty rectangles)."""


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (0.0 < self.eps < 1e-3):
            raise ValueError(f"eps must lie in (0, 1e-3), got {self.eps!r}")

    @classmethod
    def from_env(cls) -> "Tolerance":
        raw = os.environ.get("KCOVER_EPS")
        return cls(float(raw)) if raw else cls()


def default_eps() -> float:
    """Tolerance honoring the ``KCOVER_EPS`` override."""
    return Tolerance.from_env().eps


def _eps(eps: float | None) -> float:
    return default_eps() if eps is None else eps


def make_segment(a: Sequence[float], b: Sequence[float]) -> Segment:
    s = Segment(Point(float(a[0]), float(a[1])), Point(float(b[0]), float(b[1])))
    if dist(s.a, s.b) < MIN_SEGMENT_LENGTH:
        raise GeometryError(f"degenerate segment at {tuple(s.a)}")
    return s


def make_rect(xmin: float, ymin: float, xmax: float, ymax: float) -> Rect:
    if not (xmin < xmax and ymin < ymax):
        raise GeometryError(f"empty rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]")
    return Rect(float(xmin), float(ymin), float(xmax), float(ymax))


def dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def disk_contains(d: UnitDisk, p: Point, eps: float | None = None) -> bool:
    return dist(d.center, p) <= 1.0 + _eps(eps)


def disks_conflict(d1: UnitDisk, d2: UnitDisk, eps: float | None = None) -> bool:
    return dist(d1.center, d2.center) <= 2.0 + _eps(eps)


def clamp_to_rect(p: Point, r: Rect) -> Point:
    return Point(min(max(p.x, r.xmin), r.xmax), min(max(p.y, r.ymin), r.ymax))


def disk_intersects_rect(d: UnitDisk, r: Rect, eps: float | None = None) -> bool:
    return dist(d.center, clamp_to_rect(d.center, r)) <= 1.0 + _eps(eps)


def segment_circle_params(s: Segment, d: UnitDisk, eps: float | None = None) -> list[float]:
    """Parameters in [0, 1] where ``s`` crosses the boundary circle of ``d``.

    A line grazing the circle within ``eps`` yields its single tangency parameter.
    """
    eps = _eps(eps)
    ax, ay = s.a
    dx, dy = s.b.x - ax, s.b.y - ay
    fx, fy = ax - d.center.x, ay - d.center.y
    A = dx * dx + dy * dy
    B = fx * dx + fy * dy  # half of the linear coefficient
    if A == 0.0:
        return []
    # foot of the perpendicular from the center onto the supporting line
    t_foot = -B / A
    h = math.hypot(fx + t_foot * dx, fy + t_foot * dy)
    if h > 1.0 + eps:
        return []
    if abs(h - 1.0) <= eps:
        roots = [t_foot]
    else:
        half = math.sqrt(max(0.0, 1.0 - h * h)) / math.sqrt(A)
        roots = [t_foot - half, t_foot + half]
    return [t for t in roots if 0.0 <= t <= 1.0]
