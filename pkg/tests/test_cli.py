import csv
import io as stdio
import json
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, strategies as st

from kcover import io
from kcover.cli import main
from kcover.geometry import make_rect, make_segment
from kcover.model import ColoredCover, Instance
from kcover.oracle import gen_planted
from kcover.solver import solve


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def planted(tmp_path):
    p = tmp_path / "p.json"
    assert main(["gen", "--kind", "planted", "--k", "2", "--seed", "42", "-o", str(p)]) == 0
    return p


# ------------------------------------------------------------------ file formats

coords = st.floats(0, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(coords, coords), max_size=6), st.lists(st.tuples(coords, coords), max_size=6),
       st.integers(1, 9))
def test_instance_round_trip(pts, ctr, k):
    inst = Instance.from_coords(pts, ctr, k, meta={"note": "x"})
    doc = json.loads(io.dumps(io.instance_to_dict(inst)))
    back = io.instance_from_dict(doc)
    assert back == inst and back.meta == inst.meta


def test_segment_and_region_round_trip(tmp_path):
    seg = Instance((), Instance.from_coords([], [(1, 1)], 1).disks, 1,
                   segments=(make_segment((0.1, 0.2), (1.3, 0.7)),))
    reg = Instance((), seg.disks, 2, region=make_rect(0.5, 0.5, 1.5, 1.25))
    for inst in (seg, reg):
        io.save_instance(inst, tmp_path / "x.json")
        assert io.load_instance(tmp_path / "x.json") == inst


def test_solution_round_trip(tmp_path):
    cover = solve(gen_planted(2, 2, 0.6, 1))
    meta = io.solution_meta(cover.stats, seed=5)
    io.save_solution(cover, tmp_path / "s.json", meta)
    back, m2 = io.load_solution(tmp_path / "s.json")
    assert back == cover and m2 == meta
    assert set(meta) >= {"tau", "mode", "rho", "alpha", "runtime_ms", "seed"}


@pytest.mark.parametrize("doc", [
    {"k": 1, "disks": [[0, 0]], "points": [[1, 1]], "region": {"xmin": 0, "ymin": 0, "xmax": 1, "ymax": 1}},
    {"k": 1.5, "disks": []},
    {"k": 1, "disks": [[0, 0, 0]]},
    {"k": 1, "disks": [], "extra": 1},
    {"k": 1, "disks": [], "segments": [[[1, 1], [1, 1]]]},
])
def test_invalid_instance_files(doc):
    with pytest.raises(io.FileFormatError):
        io.instance_from_dict(doc)


def test_invalid_solution_files():
    with pytest.raises(io.FileFormatError):
        io.solution_from_dict({"selected": [0, 1], "colors": {"0": 1}, "num_colors": 1})
    with pytest.raises(io.FileFormatError):
        io.solution_from_dict({"selected": [0], "colors": {"a": 1}, "num_colors": 1})


def test_general_position_warning(caplog):
    # the point sits near both circles and the centers are near-tangent
    inst = Instance.from_coords([(2.0000001, 1)], [(1, 1), (3.0000001, 1)], 1)
    assert io.warn_general_position(inst) == 3
    assert "threshold" in caplog.text


# ------------------------------------------------------------------ commands

def test_solve_then_verify(planted, tmp_path, capsys):
    sol = tmp_path / "s.json"
    assert main(["solve", str(planted), "-o", str(sol)]) == 0
    assert main(["verify", str(planted), str(sol)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["covered"] and rep["conflict_free"] and rep["within_budget"]


def test_verify_budget_and_corruption(planted, tmp_path, capsys):
    sol = tmp_path / "s.json"
    main(["solve", str(planted), "-o", str(sol)])
    capsys.readouterr()
    assert main(["verify", str(planted), str(sol), "--budget", "1"]) == 1
    assert json.loads(capsys.readouterr().out)["within_budget"] is False

    inst = io.load_instance(planted)
    cover, meta = io.load_solution(sol)
    from kcover.oracle import conflict_masks
    adj = conflict_masks(inst.disks)
    a, b = next((a, b) for a in cover.selected for b in cover.selected if a < b and adj[a] >> b & 1)
    chi = dict(cover.chi)
    chi[a] = chi[b]
    bad = tmp_path / "bad.json"
    io.save_solution(ColoredCover(cover.selected, chi, cover.num_colors), bad, meta)
    assert main(["verify", str(planted), str(bad)]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert not rep["conflict_free"] and ["conflict", sorted([a, b])] in rep["violations"]


def test_verify_mismatched_files(planted, tmp_path):
    sol = write(tmp_path / "s.json", {"selected": [999], "colors": {"999": 0}, "num_colors": 1})
    assert main(["verify", str(planted), sol]) == 3


def test_solve_input_errors(planted, tmp_path, capsys):
    assert main(["solve", str(planted), "--tau", "0.5"]) == 3
    assert "tau outside [1,5]" in capsys.readouterr().err
    bad = write(tmp_path / "u.json", {"k": 1, "points": [[5, 5]], "disks": [[1, 1]]})
    assert main(["solve", bad]) == 3
    assert main(["solve", str(tmp_path / "missing.json")]) == 3
    (tmp_path / "junk.json").write_text("{")
    assert main(["solve", str(tmp_path / "junk.json")]) == 3
    assert main(["solve"]) == 3


def test_solve_infeasible_exit_code(tmp_path, capsys):
    f = write(tmp_path / "i.json", {"k": 1, "points": [[0.25, 1], [1.75, 1]], "disks": [[0.25, 1], [1.75, 1]]})
    assert main(["solve", f]) == 2
    assert "cell (0, 0)" in capsys.readouterr().err


def test_kcover_eps_env(tmp_path, monkeypatch):
    f = write(tmp_path / "e.json", {"k": 1, "points": [[2.0000005, 1]], "disks": [[1, 1]]})
    assert main(["solve", f]) == 3
    monkeypatch.setenv("KCOVER_EPS", "1e-6")
    assert main(["solve", f, "-o", str(tmp_path / "s.json")]) == 0
    monkeypatch.setenv("KCOVER_EPS", "nope")
    assert main(["solve", f]) == 3


def test_oracle_command(tmp_path, capsys):
    one = write(tmp_path / "one.json", {"k": 1, "points": [[1, 1]], "disks": [[1, 1]]})
    assert main(["oracle", one]) == 0
    assert json.loads(capsys.readouterr().out)["k_star"] == 1
    pair = write(tmp_path / "pair.json", {"k": 1, "points": [[0, 0], [1.5, 0]], "disks": [[0, 0], [1.5, 0]]})
    assert main(["oracle", pair]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["k_star"] == 2 and out["witness"]["num_colors"] == 2
    big = write(tmp_path / "big.json", {"k": 1, "points": [[1, 1]], "disks": [[1 + 0.01 * i, 1] for i in range(15)]})
    assert main(["oracle", big]) == 3


def test_transform_command(tmp_path, capsys):
    reg = write(tmp_path / "r.json", {"k": 1, "disks": [[1, 1], [2.2, 1]],
                                      "region": {"xmin": 0.5, "ymin": 0.6, "xmax": 2.7, "ymax": 1.4}})
    out = tmp_path / "rp.json"
    assert main(["transform", reg, "-o", str(out), "--samples", "20000"]) == 0
    pinst = io.load_instance(out)
    assert pinst.n == 3 and len(pinst.meta["provenance"]) == 3
    seg = write(tmp_path / "s.json", {"k": 1, "disks": [[1, 1]], "segments": [[[0.5, 1], [1.5, 1]]]})
    assert main(["transform", seg, "-o", str(out)]) == 0
    assert io.load_instance(out).n == 1
    hole = write(tmp_path / "h.json", {"k": 1, "disks": [[1, 1]],
                                       "region": {"xmin": 0.5, "ymin": 0.6, "xmax": 2.7, "ymax": 1.4}})
    assert main(["transform", hole]) == 1
    assert "witness" in json.loads(capsys.readouterr().err)
    pts = write(tmp_path / "p.json", {"k": 1, "disks": [[1, 1]], "points": [[1, 1]]})
    assert main(["transform", pts]) == 3


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["gen", "--kind", "planted", "--k", "2", "--seed", "42", "-o", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "--density", "0", "-o", str(a)]) == 0
    assert io.load_instance(a).n == 0
    assert main(["gen", "--kind", "uniform", "--seed", "7", "-o", str(a)]) == 0
    inst = io.load_instance(a)
    assert inst.n > 0 and inst.m > 0
    assert main(["gen", "--k", "0"]) == 3


def _svg(path):
    return ET.parse(path).getroot()


def test_render(planted, tmp_path):
    svg = tmp_path / "f.svg"
    assert main(["render", str(planted), "-o", str(svg)]) == 0
    root = _svg(svg)
    assert not [c for c in root.iter() if c.get("data-color")]
    sol = tmp_path / "s.json"
    main(["solve", str(planted), "-o", str(sol)])
    assert main(["render", str(planted), str(sol), "-o", str(svg)]) == 0
    fills = {c.get("fill") for c in _svg(svg).iter() if c.get("data-color")}
    assert len(fills) == io.load_solution(sol)[0].num_colors
    empty = write(tmp_path / "e.json", {"k": 1, "disks": []})
    assert main(["render", empty, "-o", str(svg)]) == 0
    assert _svg(svg).tag.endswith("svg")


def _rows(text):
    return list(csv.DictReader(stdio.StringIO(text)))


def test_bench(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--suite", "empty", "-o", str(out)]) == 0
    assert out.read_text().strip() == "n,m,k,tau,runtime_ms,num_colors,cells,infeasible_count"
    runs = []
    for _ in range(2):
        assert main(["bench", "--suite", "k-scaling", "--seed", "3", "-o", str(out)]) == 0
        runs.append([{k: v for k, v in r.items() if k != "runtime_ms"} for r in _rows(out.read_text())])
    assert runs[0] == runs[1]
    assert [int(r["k"]) for r in runs[0]] == list(range(3, 9))


def test_alpha_command(tmp_path):
    out = tmp_path / "a.json"
    assert main(["alpha", "--tau", "1", "--trials", "2000", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["best_count"] == len(doc["centers"]) <= 4
    assert main(["alpha", "--tau", "0.5"]) == 3
