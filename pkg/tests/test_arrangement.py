import random

import numpy as np
import pytest

from kcover.arrangement import (RegionIncomplete, RegionUncovered, SegmentUncovered,
                                mc_completeness_check, region_candidates, region_representatives,
                                segment_representatives, signature_at, signature_matrix,
                                transform, _dedupe, _rows, default_delta)
from kcover.coloring import greedy_coloring
from kcover.geometry import Point, UnitDisk, make_rect, make_segment
from kcover.model import Instance, InstanceError
from kcover.oracle import conflict_masks, verify
from kcover.solver import solve


def disks(*cs):
    return [UnitDisk(Point(*c)) for c in cs]


def test_signature_at():
    ds = disks((0, 0), (5, 0), (1, 0))
    assert signature_at(Point(5, 0), ds) == {1}
    assert signature_at(Point(10, 10), ds) == frozenset()
    assert signature_at(Point(0.5, 0), ds) == {0, 2}


def test_segment_examples():
    one = segment_representatives(disks((0, 0)), [make_segment((-0.5, 0), (0.5, 0))])
    assert len(one) == 1
    with pytest.raises(SegmentUncovered) as err:
        segment_representatives(disks((0, 0)), [make_segment((-2, 0), (2, 0))])
    assert err.value.interval == pytest.approx((0.0, 0.25))
    assert len(segment_representatives(disks((0, 0)), [make_segment((-1, 0), (1, 0))])) == 1
    two = segment_representatives(disks((0, 0), (1.5, 0)), [make_segment((-1, 0), (2.5, 0))])
    assert [r.signature for r in two] == [(0,), (0, 1), (1,)]
    assert two.reps[1].source == {"source": "segment", "segment": 0, "t": pytest.approx(0.5)}


def test_segments_dedupe_across_segments():
    ds = disks((1, 1))
    reps = segment_representatives(ds, [make_segment((0.5, 1), (1.5, 1)), make_segment((1, 0.5), (1, 1.5))])
    assert len(reps) == 1 and reps.reps[0].source["segment"] == 0


def test_region_examples():
    whole = region_representatives(disks((1, 1)), make_rect(0.8, 0.8, 1.2, 1.2))
    assert len(whole) == 1
    two = region_representatives(disks((1, 1), (2.2, 1)), make_rect(0.5, 0.6, 2.7, 1.4))
    assert sorted(two.signatures) == [(0,), (0, 1), (1,)]


def test_region_hole_raises():
    with pytest.raises(RegionUncovered):
        region_representatives(disks((1, 1)), make_rect(0.5, 0.6, 2.7, 1.4))


def _covered_instance(rng, m, side=3.0):
    """Lattice of disks guaranteeing coverage plus random extras."""
    base = [(x, y) for x in np.arange(0.5, side + 1, 1.3) for y in np.arange(0.5, side + 1, 1.3)]
    extra = rng.uniform(0, side + 1, (max(0, m - len(base)), 2)).tolist()
    return disks(*(base + extra)[:max(m, len(base))])


def greedy_k(ds):
    adj = conflict_masks(ds)
    return max(greedy_coloring(adj, (1 << len(ds)) - 1).values()) + 1


@pytest.mark.parametrize("seed", range(8))
def test_mc_completeness_random_five_disks(seed):
    rng = np.random.default_rng(seed)
    ds = disks(*rng.uniform(1, 2.2, (5, 2)).tolist())
    region = make_rect(1.3, 1.3, 1.9, 1.9)
    try:
        reps = region_representatives(ds, region)
    except RegionUncovered:
        pytest.skip("random draw leaves a hole")
    assert mc_completeness_check(ds, region, reps, 100_000, seed) == []
    assert len(reps) <= 4 * 5 * 5


def test_mc_completeness_fault_injection():
    ds = disks((1, 1), (2.2, 1))
    region = make_rect(0.5, 0.6, 2.7, 1.4)
    reps = region_representatives(ds, region)
    assert mc_completeness_check(ds, region, reps.without((0, 1)), 20_000, 0) == [(0, 1)]
    assert mc_completeness_check(ds, region, reps.without((0, 1)), 0, 0) == []


def test_dedupe_order_independent():
    ds = _covered_instance(np.random.default_rng(1), 12)
    region = make_rect(0.5, 0.5, 3.0, 3.0)
    delta = default_delta(ds, region)
    cands = [(p, k) for p, k in region_candidates(ds, region, delta) if region.contains(p)]
    sigs = _rows(signature_matrix([p for p, _ in cands], ds))
    items = [(p, s, {"kind": k}) for (p, k), s in zip(cands, sigs)]
    a = _dedupe(items).signatures
    random.Random(3).shuffle(items)
    assert _dedupe(items).signatures == a


@pytest.mark.parametrize("seed", range(5))
def test_segment_reduction_soundness(seed):
    rng = np.random.default_rng(seed)
    ds = _covered_instance(rng, 14)
    segs = [make_segment(*rng.uniform(0.3, 3.2, (2, 2)).tolist()) for _ in range(3)]
    inst = Instance((), tuple(ds), greedy_k(ds), segments=tuple(segs))
    pinst = transform(inst)
    assert len(pinst.points) <= sum(2 * len(ds) + 1 for _ in segs)
    cover = solve(pinst)
    chosen = [ds[d] for d in cover.selected]
    for s in segs:
        for t in np.linspace(0, 1, 1000):
            assert signature_at(s.at(float(t)), chosen)


def test_region_transform_provenance_and_solve():
    rng = np.random.default_rng(4)
    ds = _covered_instance(rng, 14)
    k = greedy_k(ds)
    inst = Instance((), tuple(ds), k, region=make_rect(0.5, 0.5, 3.0, 3.0))
    pinst = transform(inst, samples=20_000)
    prov = pinst.meta["provenance"]
    assert len(prov) == pinst.n and all(p["source"] == "region" for p in prov)
    cover = solve(pinst)
    assert verify(pinst, cover, 4 * k).ok


def test_transform_requires_demand():
    with pytest.raises(InstanceError):
        transform(Instance.from_coords([(1, 1)], [(1, 1)], 1))


def test_transform_region_incomplete(monkeypatch):
    import kcover.arrangement as arr
    ds = disks((1, 1), (2.2, 1))
    inst = Instance((), tuple(ds), 1, region=make_rect(0.5, 0.6, 2.7, 1.4))
    real = arr.region_representatives
    monkeypatch.setattr(arr, "region_representatives",
                        lambda *a, **k: real(*a, **k).without((0, 1)))
    with pytest.raises(RegionIncomplete):
        transform(inst, samples=5_000)
