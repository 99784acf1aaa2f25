"""Benchmark harness: a deterministic instance stream per seed, one CSV row per solve."""
from __future__ import annotations

import csv
import dataclasses
import io
import time
from typing import Iterator

import numpy as np

from .model import Instance
from .oracle import gen_planted
from .solver import BudgetExhausted, CellInfeasible, SolverConfig, solve

COLUMNS = ("n", "m", "k", "tau", "runtime_ms", "num_colors", "cells", "infeasible_count")
SUITES = ("empty", "small", "k-scaling", "tau")


def suite_instances(suite: str, seed: int = 0) -> Iterator[tuple[Instance, float]]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    if suite == "small":
        for k in (1, 2, 3):
            for cells in (2, 3, 4):
                yield gen_planted(k, cells, 0.8, int(rng.integers(2**31))), 2.0
    elif suite == "k-scaling":
        base = gen_planted(3, 3, 1.0, int(rng.integers(2**31)))
        for k in range(3, 9):
            yield dataclasses.replace(base, k=k), 2.0
    elif suite == "tau":
        for tau in (1.0, 1.5, 2.0, 3.0, 4.0):
            cells = max(2, int(round(6 / tau)))
            yield gen_planted(2, cells, 0.8, int(rng.integers(2**31)), tau=tau), tau


def run_suite(suite: str, seed: int = 0) -> list[dict]:
    rows = []
    for inst, tau in suite_instances(suite, seed):
        t0 = time.perf_counter()
        try:
            cover = solve(inst, SolverConfig(tau=tau))
            colors, cells, bad = cover.num_colors, cover.stats.cells_processed, 0
        except (CellInfeasible, BudgetExhausted):
            colors, cells, bad = 0, 0, 1
        ms = (time.perf_counter() - t0) * 1000.0
        rows.append({"n": inst.n, "m": inst.m, "k": inst.k, "tau": tau, "runtime_ms": f"{ms:.3f}",
                     "num_colors": colors, "cells": cells, "infeasible_count": bad})
    return rows


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
