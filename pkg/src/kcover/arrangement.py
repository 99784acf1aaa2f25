"""Reduce segment and rectangle demands to finitely many representative points.

Points covered by the same set of disks (their *signature*) are interchangeable
for covering purposes, so one point per distinct signature suffices: covering
every representative covers every slice of every segment, or every part of the
rectangle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .geometry import (Point, Rect, Segment, UnitDisk, _eps, dist, segment_circle_params)
from .model import Instance, InstanceError

Signature = tuple[int, ...]

_T_MERGE = 1e-12
DELTA_SCALE = 1e-4
DELTA_FLOOR = 1e-7


class SegmentUncovered(InstanceError):
    def __init__(self, segment: int, interval: tuple[float, float]):
        self.segment = segment
        self.interval = interval
        super().__init__(f"segment {segment}: slice t in [{interval[0]:.6g}, {interval[1]:.6g}] "
                         f"is not covered by any disk")


class RegionUncovered(InstanceError):
    def __init__(self, witness: Point):
        self.witness = witness
        super().__init__(f"region point ({witness.x:.9g}, {witness.y:.9g}) is not covered by any disk")


class RegionIncomplete(InstanceError):
    def __init__(self, missing: list[Signature]):
        self.missing = missing
        super().__init__(f"sampling found {len(missing)} signature(s) without a representative: "
                         f"{missing[:5]}")


@dataclass(frozen=True)
class Representative:
    point: Point
    signature: Signature
    source: dict = field(default_factory=dict, compare=False, hash=False)


@dataclass
class RepresentativeSet:
    reps: list[Representative]

    def __len__(self):
        return len(self.reps)

    def __iter__(self):
        return iter(self.reps)

    @property
    def signatures(self) -> set[Signature]:
        return {r.signature for r in self.reps}

    @property
    def points(self) -> list[Point]:
        return [r.point for r in self.reps]

    def without(self, signature: Signature) -> "RepresentativeSet":
        return RepresentativeSet([r for r in self.reps if r.signature != signature])


def _centers(disks: Sequence[UnitDisk]) -> np.ndarray:
    return np.array([d.center for d in disks], dtype=float).reshape(len(disks), 2)


def signature_matrix(points, disks: Sequence[UnitDisk], eps: float | None = None) -> np.ndarray:
    """(n, m) bool matrix of closed-disk membership."""
    return _kernels.contains_matrix(np.asarray(points, dtype=float).reshape(-1, 2),
                                    _centers(disks), 1.0 + _eps(eps))


def signature_at(p: Point, disks: Sequence[UnitDisk], eps: float | None = None) -> frozenset[int]:
    if not disks:
        return frozenset()
    row = signature_matrix([p], disks, eps)[0]
    return frozenset(int(j) for j in np.flatnonzero(row))


def _rows(sig: np.ndarray) -> list[Signature]:
    return [tuple(int(j) for j in np.flatnonzero(r)) for r in sig]


def _dedupe(found: Iterable[tuple[Point, Signature, dict]]) -> RepresentativeSet:
    first: dict[Signature, Representative] = {}
    for p, s, src in found:
        if s and s not in first:
            first[s] = Representative(p, s, src)
    return RepresentativeSet([first[s] for s in sorted(first)])


# ------------------------------------------------------------------ segments

def segment_slices(s: Segment, disks: Sequence[UnitDisk], eps: float | None = None) -> list[tuple[float, float]]:
    """Consecutive parameter intervals between circle crossings along ``s``."""
    ts = [0.0, 1.0]
    for d in disks:
        ts.extend(segment_circle_params(s, d, eps))
    ts.sort()
    cuts = [ts[0]]
    for t in ts[1:]:
        if t - cuts[-1] > _T_MERGE:
            cuts.append(t)
    if len(cuts) == 1:
        cuts.append(1.0)
    return list(zip(cuts[:-1], cuts[1:]))


def segment_representatives(disks: Sequence[UnitDisk], segments: Sequence[Segment],
                            eps: float | None = None) -> RepresentativeSet:
    """One midpoint per slice, deduplicated by signature across all segments."""
    found = []
    for si, s in enumerate(segments):
        slices = segment_slices(s, disks, eps)
        mids = [s.at(0.5 * (a + b)) for a, b in slices]
        sigs = _rows(signature_matrix(mids, disks, eps)) if disks else [()] * len(mids)
        for (a, b), p, sig in zip(slices, mids, sigs):
            if not sig:
                raise SegmentUncovered(si, (a, b))
            found.append((p, sig, {"source": "segment", "segment": si, "t": 0.5 * (a + b)}))
    return _dedupe(found)


# ------------------------------------------------------------------ region

def default_delta(disks: Sequence[UnitDisk], region: Rect) -> float:
    """Offset distance tied to the smallest feature separation of the instance."""
    gaps = [1.0]
    c = [d.center for d in disks]
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            dd = dist(c[i], c[j])
            gaps.extend((dd, abs(dd - 2.0)))
        x, y = c[i]
        gaps.extend(abs(abs(v) - 1.0) for v in (x - region.xmin, region.xmax - x,
                                                 y - region.ymin, region.ymax - y))
        gaps.extend(abs(dist(c[i], q) - 1.0) for q in region.corners)
    return max(DELTA_FLOOR, DELTA_SCALE * min(gaps))


_COMPASS = [(math.cos(a * math.pi / 4), math.sin(a * math.pi / 4)) for a in range(8)]


def _solve2(n1, n2, b1, b2):
    """v with v.n1 = b1 and v.n2 = b2, or None when the normals are parallel."""
    det = n1[0] * n2[1] - n1[1] * n2[0]
    if abs(det) < 1e-12:
        return None
    return ((b1 * n2[1] - b2 * n1[1]) / det, (n1[0] * b2 - n2[0] * b1) / det)


def region_candidates(disks: Sequence[UnitDisk], region: Rect, delta: float,
                      eps: float | None = None) -> list[tuple[Point, str]]:
    eps = _eps(eps)
    out: list[tuple[Point, str]] = []

    def add(x, y, kind):
        out.append((Point(x, y), kind))

    c = [d.center for d in disks]
    for p in c:
        add(p.x, p.y, "center")
    r = region
    for x, y in ((r.xmin + delta, r.ymin + delta), (r.xmax - delta, r.ymin + delta),
                 (r.xmax - delta, r.ymax - delta), (r.xmin + delta, r.ymax - delta)):
        add(x, y, "corner")
    # circle-circle vertices
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            dx, dy = c[j].x - c[i].x, c[j].y - c[i].y
            dd = math.hypot(dx, dy)
            if dd == 0.0 or dd > 2.0 + eps:
                continue
            a = dd / 2.0
            h = math.sqrt(max(0.0, 1.0 - a * a))
            mx, my = c[i].x + a * dx / dd, c[i].y + a * dy / dd
            for sgn in ((1.0,) if h == 0.0 else (1.0, -1.0)):
                X = (mx - sgn * h * dy / dd, my + sgn * h * dx / dd)
                for ux, uy in _COMPASS:
                    add(X[0] + delta * ux, X[1] + delta * uy, "vertex")
                n1 = (X[0] - c[i].x, X[1] - c[i].y)
                n2 = (X[0] - c[j].x, X[1] - c[j].y)
                for s1 in (-1.0, 1.0):
                    for s2 in (-1.0, 1.0):
                        v = _solve2(n1, n2, s1 * delta, s2 * delta)
                        if v is not None and math.hypot(*v) < 0.1:
                            add(X[0] + v[0], X[1] + v[1], "vertex")
    # circle-edge crossings
    edges = [(Segment(Point(r.xmin, r.ymin), Point(r.xmax, r.ymin)), (0.0, 1.0)),
             (Segment(Point(r.xmax, r.ymin), Point(r.xmax, r.ymax)), (-1.0, 0.0)),
             (Segment(Point(r.xmax, r.ymax), Point(r.xmin, r.ymax)), (0.0, -1.0)),
             (Segment(Point(r.xmin, r.ymax), Point(r.xmin, r.ymin)), (1.0, 0.0))]
    for d in disks:
        for e, nin in edges:
            L = dist(e.a, e.b)
            tx, ty = (e.b.x - e.a.x) / L, (e.b.y - e.a.y) / L
            for t in segment_circle_params(e, d, eps):
                X = e.at(t)
                for s in (-1.0, 1.0):
                    add(X.x + s * delta * tx, X.y + s * delta * ty, "edge")
                    add(X.x + s * delta * tx + delta * nin[0], X.y + s * delta * ty + delta * nin[1], "edge")
                    v = _solve2((X.x - d.center.x, X.y - d.center.y), nin, s * delta, delta)
                    if v is not None and math.hypot(*v) < 0.1:
                        add(X.x + v[0], X.y + v[1], "edge")
    # faces bounded by a whole circle
    for p in c:
        add(p.x - 1.0 + delta, p.y, "leftmost")
        add(p.x - 1.0 - delta, p.y, "leftmost")
    return out


def region_representatives(disks: Sequence[UnitDisk], region: Rect, eps: float | None = None,
                           delta: float | None = None) -> RepresentativeSet:
    """One point per distinct nonempty signature met inside ``region``.

    Raises :class:`RegionUncovered` when a candidate inside the region lies in
    no disk.
    """
    if delta is None:
        delta = default_delta(disks, region)
    cands = [(p, kind) for p, kind in region_candidates(disks, region, delta, eps)
             if region.contains(p)]
    if not cands:
        return RepresentativeSet([])
    if not disks:
        raise RegionUncovered(cands[0][0])
    sigs = _rows(signature_matrix([p for p, _ in cands], disks, eps))
    for (p, _), s in zip(cands, sigs):
        if not s:
            raise RegionUncovered(p)
    return _dedupe((p, s, {"source": "region", "kind": kind}) for (p, kind), s in zip(cands, sigs))


def sample_region(disks: Sequence[UnitDisk], region: Rect, samples: int, seed: int,
                  eps: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    pts = np.column_stack([rng.uniform(region.xmin, region.xmax, samples),
                           rng.uniform(region.ymin, region.ymax, samples)])
    if not disks:
        return pts, np.zeros((samples, 0), dtype=bool)
    return pts, signature_matrix(pts, disks, eps)


def mc_completeness_check(disks: Sequence[UnitDisk], region: Rect, reps: RepresentativeSet,
                          samples: int, seed: int, eps: float | None = None) -> list[Signature]:
    """Nonempty signatures seen at uniform samples of ``region`` but missing from ``reps``."""
    if samples <= 0:
        return []
    _, sig = sample_region(disks, region, samples, seed, eps)
    have = reps.signatures
    uniq = np.unique(np.packbits(sig, axis=1), axis=0)
    rows = np.unpackbits(uniq, axis=1, count=sig.shape[1]).astype(bool)
    missing = [s for s in _rows(rows) if s and s not in have]
    return sorted(missing)


def first_uncovered_sample(disks, region: Rect, samples: int, seed: int,
                           eps: float | None = None) -> Point | None:
    pts, sig = sample_region(disks, region, samples, seed, eps)
    bad = np.flatnonzero(~sig.any(axis=1)) if sig.shape[1] else np.arange(len(pts))
    return Point(*map(float, pts[bad[0]])) if len(bad) else None


# ------------------------------------------------------------------ instances

def to_point_instance(inst: Instance, reps: RepresentativeSet) -> Instance:
    meta = dict(inst.meta)
    meta["provenance"] = [dict(r.source) for r in reps]
    return Instance(tuple(r.point for r in reps), inst.disks, inst.k, meta=meta)


def transform(inst: Instance, eps: float | None = None, delta: float | None = None,
              samples: int = 10_000, seed: int = 0) -> Instance:
    """Point instance equivalent to the segment or region demand of ``inst``.

    Region inputs are additionally checked by sampling: an uncovered sample
    raises :class:`RegionUncovered`, a signature without representative raises
    :class:`RegionIncomplete`.
    """
    if inst.segments:
        return to_point_instance(inst, segment_representatives(inst.disks, inst.segments, eps))
    if inst.region is not None:
        reps = region_representatives(inst.disks, inst.region, eps, delta)
        hole = first_uncovered_sample(inst.disks, inst.region, samples, seed, eps)
        if hole is not None:
            raise RegionUncovered(hole)
        missing = mc_completeness_check(inst.disks, inst.region, reps, samples, seed, eps)
        if missing:
            raise RegionIncomplete(missing)
        return to_point_instance(inst, reps)
    raise InstanceError("instance has neither segments nor a region to transform")
