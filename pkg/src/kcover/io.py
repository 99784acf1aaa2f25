"""JSON instance and solution files.

Floats are written with Python's shortest round-trip repr, so ``load(save(x))``
reproduces every coordinate bit for bit.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .geometry import GeometryError, make_rect, make_segment
from .model import ColoredCover, Instance, InstanceError

log = logging.getLogger(__name__)

GENERAL_POSITION = 1e-6

_XY = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["k", "disks"],
    "properties": {
        "k": {"type": "integer"},
        "points": {"type": "array", "items": _XY},
        "disks": {"type": "array", "items": _XY},
        "segments": {"type": "array", "items": {"type": "array", "items": _XY,
                                                 "minItems": 2, "maxItems": 2}},
        "region": {"type": "object", "required": ["xmin", "ymin", "xmax", "ymax"],
                   "properties": {key: {"type": "number"} for key in ("xmin", "ymin", "xmax", "ymax")},
                   "additionalProperties": False},
        "meta": {"type": "object"},
    },
    "additionalProperties": False,
}

SOLUTION_SCHEMA = {
    "type": "object",
    "required": ["selected", "colors", "num_colors"],
    "properties": {
        "selected": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "colors": {"type": "object", "patternProperties": {"^[0-9]+$": {"type": "integer", "minimum": 0}},
                   "additionalProperties": False},
        "num_colors": {"type": "integer", "minimum": 0},
        "meta": {"type": "object"},
    },
    "additionalProperties": False,
}


class FileFormatError(InstanceError):
    pass


def _validate(doc: Any, schema: dict, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as err:
        where = "/".join(map(str, err.absolute_path)) or "<root>"
        raise FileFormatError(f"invalid {what} at {where}: {err.message}") from None


def _plain(x: Any) -> Any:
    """JSON-ready copy with numpy scalars and tuples converted."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


# ------------------------------------------------------------------ instances

def instance_to_dict(inst: Instance) -> dict:
    doc: dict[str, Any] = {"k": inst.k,
                           "points": [[p.x, p.y] for p in inst.points],
                           "disks": [[d.center.x, d.center.y] for d in inst.disks]}
    if inst.segments:
        doc["segments"] = [[[s.a.x, s.a.y], [s.b.x, s.b.y]] for s in inst.segments]
    if inst.region is not None:
        r = inst.region
        doc["region"] = {"xmin": r.xmin, "ymin": r.ymin, "xmax": r.xmax, "ymax": r.ymax}
    if inst.meta:
        doc["meta"] = _plain(inst.meta)
    return doc


def instance_from_dict(doc: Any) -> Instance:
    _validate(doc, INSTANCE_SCHEMA, "instance")
    kinds = [bool(doc.get("points")), "segments" in doc, "region" in doc]
    if sum(kinds) > 1:
        raise FileFormatError("instance must use exactly one of points, segments or region as demand")
    try:
        segments = tuple(make_segment(a, b) for a, b in doc.get("segments", []))
        region = make_rect(**doc["region"]) if "region" in doc else None
    except GeometryError as err:
        raise FileFormatError(str(err)) from None
    return Instance.from_coords(doc.get("points", []), doc["disks"], doc["k"], segments=segments,
                                region=region, meta=doc.get("meta", {}))


def warn_general_position(inst: Instance, gap: float = GENERAL_POSITION) -> int:
    """Log (not reject) distances within ``gap`` of a predicate threshold."""
    if not inst.disks:
        return 0
    c = np.array([d.center for d in inst.disks], dtype=float)
    hits = 0
    if inst.points:
        p = np.array(inst.points, dtype=float)
        d = np.sqrt(((p[:, None, :] - c[None, :, :]) ** 2).sum(-1))
        hits += int((np.abs(d - 1.0) < gap).sum())
    cc = np.sqrt(((c[:, None, :] - c[None, :, :]) ** 2).sum(-1))
    iu = np.triu_indices(len(c), 1)
    hits += int((np.abs(cc[iu] - 2.0) < gap).sum())
    if hits:
        log.warning("%d distance(s) within %g of a coverage or conflict threshold; "
                    "results depend on the tolerance", hits, gap)
    return hits


def dumps(doc: dict) -> str:
    """One top-level key per line, values compact."""
    body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v, ensure_ascii=False)}" for k, v in doc.items())
    return "{\n" + body + "\n}\n"


def _read(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise FileFormatError(f"{path}: not valid JSON ({err.msg} at line {err.lineno})") from None
    except OSError as err:
        raise FileFormatError(f"{path}: {err.strerror}") from None


def load_instance(path: str | Path) -> Instance:
    inst = instance_from_dict(_read(path))
    warn_general_position(inst)
    return inst


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)), encoding="utf-8")


# ------------------------------------------------------------------ solutions

def solution_meta(stats, seed: int = 0) -> dict:
    return {"tau": stats.tau, "mode": stats.mode, "rho": stats.rho, "alpha": stats.alpha,
            "runtime_ms": round(stats.runtime_ms, 3), "seed": seed,
            "k_used": stats.k_used, "layout": stats.layout, "downgraded": stats.downgraded}


def solution_to_dict(cover: ColoredCover, meta: dict | None = None) -> dict:
    doc = {"selected": list(cover.selected),
           "colors": {str(d): cover.chi[d] for d in cover.selected},
           "num_colors": cover.num_colors}
    if meta is not None:
        doc["meta"] = _plain(meta)
    return doc


def solution_from_dict(doc: Any) -> tuple[ColoredCover, dict]:
    _validate(doc, SOLUTION_SCHEMA, "solution")
    chi = {int(d): c for d, c in doc["colors"].items()}
    if set(chi) != set(doc["selected"]) or len(set(doc["selected"])) != len(doc["selected"]):
        raise FileFormatError("colors must be keyed by exactly the selected disk ids")
    # num_colors is kept as written; the verifier recounts colors itself
    return ColoredCover(tuple(doc["selected"]), chi, doc["num_colors"]), doc.get("meta", {})


def load_solution(path: str | Path) -> tuple[ColoredCover, dict]:
    return solution_from_dict(_read(path))


def save_solution(cover: ColoredCover, path: str | Path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps(solution_to_dict(cover, meta)), encoding="utf-8")
