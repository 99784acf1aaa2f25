"""``kcover`` command line.

Exit codes: 0 success, 1 verification or semantic failure, 2 solver
infeasibility, 3 input or usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import arrangement, bench, io, oracle, packing, render
from .geometry import GeometryError, Tolerance
from .grid import GridError
from .model import Instance, InstanceError
from .solver import SolverConfig, SolverError, solve

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _eps() -> float:
    try:
        return Tolerance.from_env().eps
    except ValueError as err:
        raise UsageError(f"KCOVER_EPS: {err}") from None


def _need_points(inst: Instance) -> None:
    if inst.segments or inst.region is not None:
        raise UsageError("instance has segment/region demand; run `kcover transform` first")


# ------------------------------------------------------------------ commands

def cmd_solve(a) -> int:
    try:
        cfg = SolverConfig(tau=a.tau, mode=a.mode, tol=Tolerance(_eps()))
    except (InstanceError, ValueError) as err:
        raise UsageError(str(err)) from None
    inst = io.load_instance(a.input)
    _need_points(inst)
    try:
        cover = solve(inst, cfg)
    except SolverError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(io.dumps(io.solution_to_dict(cover, io.solution_meta(cover.stats, a.seed))), a.output)
    return EXIT_OK


def cmd_verify(a) -> int:
    inst = io.load_instance(a.instance)
    _need_points(inst)
    cover, meta = io.load_solution(a.solution)
    budget = a.budget
    if budget is None:
        rho = meta.get("rho") or packing.rho_of(meta.get("tau", 2.0))
        budget = int(rho) * inst.k
    report = oracle.verify(inst, cover, budget, _eps())
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_oracle(a) -> int:
    inst = io.load_instance(a.input)
    _need_points(inst)
    try:
        res = oracle.min_colors_exact(inst, a.limit, _eps())
    except oracle.OracleError as err:
        raise UsageError(str(err)) from None
    print(json.dumps({"k_star": res.k_star, "witness": io.solution_to_dict(res.witness)}))
    return EXIT_OK


def cmd_transform(a) -> int:
    inst = io.load_instance(a.input)
    try:
        out = arrangement.transform(inst, _eps(), a.delta, a.samples, a.seed)
    except arrangement.SegmentUncovered as err:
        print(json.dumps({"error": "segment_uncovered", "segment": err.segment,
                          "interval": list(err.interval)}), file=sys.stderr)
        return EXIT_FAIL
    except arrangement.RegionUncovered as err:
        print(json.dumps({"error": "region_uncovered", "witness": list(err.witness)}), file=sys.stderr)
        return EXIT_FAIL
    except arrangement.RegionIncomplete as err:
        print(json.dumps({"error": "region_incomplete", "missing": [list(s) for s in err.missing]}),
              file=sys.stderr)
        return EXIT_FAIL
    _emit(io.dumps(io.instance_to_dict(out)), a.output)
    return EXIT_OK


def cmd_gen(a) -> int:
    if a.kind == "planted":
        inst = oracle.gen_planted(a.k, a.cells, a.density, a.seed, a.tau)
    else:
        side = a.side if a.side is not None else a.cells * a.tau
        n = a.n if a.n is not None else int(round(a.density * side * side))
        m = a.m if a.m is not None else max(1, int(round(side * side / 2)))
        inst = oracle.gen_uniform(a.k, n, m, side, a.seed)
    _emit(io.dumps(io.instance_to_dict(inst)), a.output)
    return EXIT_OK


def cmd_render(a) -> int:
    inst = io.load_instance(a.instance)
    cover, tau = None, a.tau
    if a.solution:
        cover, meta = io.load_solution(a.solution)
        if tau is None:
            tau = meta.get("tau")
        bad = [d for d in cover.selected if d >= inst.m]
        if bad:
            raise UsageError(f"solution references unknown disk id {bad[0]}")
    _emit(render.render_svg(inst, cover, tau or 2.0), a.output)
    return EXIT_OK


def cmd_bench(a) -> int:
    rows = [] if a.suite == "empty" else bench.run_suite(a.suite, a.seed)
    _emit(bench.to_csv(rows), a.output)
    return EXIT_OK


def cmd_alpha(a) -> int:
    try:
        res = packing.empirical_alpha_search(packing.PackingConfig(a.tau, a.trials, a.seed))
    except (packing.PackingDomainError, ValueError) as err:
        raise UsageError(str(err)) from None
    _emit(res.to_json() + "\n", a.output)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kcover", description="k-colorable unit disk cover toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="grid solver: points instance -> colored cover")
    s.add_argument("input")
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--mode", choices=("default", "tight-experimental"), default="default")
    s.add_argument("--seed", type=int, default=0, help="recorded in the solution meta")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check coverage, conflicts and the color budget")
    s.add_argument("instance")
    s.add_argument("solution")
    s.add_argument("--budget", type=int, help="default: rho * k from the solution meta")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="exact minimum colors on small instances")
    s.add_argument("input")
    s.add_argument("--limit", type=int)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("transform", help="segments/region -> representative points")
    s.add_argument("input")
    s.add_argument("--delta", type=float)
    s.add_argument("--samples", type=int, default=100_000, help="completeness samples for regions")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("gen", help="generate an instance")
    s.add_argument("--kind", choices=("planted", "uniform"), default="planted")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--cells", type=int, default=3)
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--side", type=float)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("render", help="SVG figure of an instance and optional solution")
    s.add_argument("instance")
    s.add_argument("solution", nargs="?")
    s.add_argument("--tau", type=float)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("bench", help="CSV timing rows for a fixed suite")
    s.add_argument("--suite", choices=bench.SUITES, default="small")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("alpha", help="randomized packing search for one cell")
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_alpha)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except (UsageError, InstanceError, GridError, GeometryError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
