import io
import os
import subprocess
import sys
from pathlib import Path

import pytest

from tasbench.cli import run
from tasbench.formats import read_instance, read_sftas, read_shape, read_system, read_tas

DATA = Path(__file__).parent / "data"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def pairs(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and not line.startswith("line="))


def test_tp_min_quartet_prints_four():
    code, out, _ = cli("tp", "min", DATA / "quartet.tp", "--tau-max", "10")
    assert code == 0
    assert out.splitlines()[0] == "tau=4"
    assert all(pairs(out)[f"l{k}"] == "1" for k in range(1, 5))


def test_tp_decide_exit_codes():
    assert cli("tp", "decide", DATA / "quartet.tp", "--tau", "3")[0] == 1
    code, out, _ = cli("--format", "machine", "tp", "decide", DATA / "quartet.tp", "--tau", "5")
    assert code == 0 and pairs(out)["feasible"] == "true"


def test_usage_and_validation_errors_exit_2(tmp_path):
    assert cli("tp", "frobnicate")[0] == 2
    assert cli("tp", "min", tmp_path / "missing.tp")[0] == 2
    bad = tmp_path / "bad.tp"
    bad.write_text("vars: a\na + b >= TAU\n")
    code, _, err = cli("tp", "min", bad)
    assert code == 2 and "line 2" in err


def test_sat_solve(tmp_path):
    code, out, _ = cli("sat", "solve", DATA / "one_clause.sat")
    got = pairs(out)
    assert code == 0 and got.pop("satisfiable") == "true"
    assert sorted(got.values()) == ["0", "0", "1"]
    assert cli("sat", "solve", DATA / "unsat.sat")[0] == 1


def test_reduce_quad_gives_28_clauses(tmp_path):
    target = tmp_path / "quad.sat"
    code, out, _ = cli("sat", "reduce-quad", DATA / "one_clause.sat", "--verify", "-o", target)
    assert code == 0
    inst = read_instance(target.read_text())
    assert len(inst.clauses) == 28 and inst.is_quadripartite()


def test_reduce_quad_to_stdout_is_the_file():
    code, out, err = cli("sat", "reduce-quad", DATA / "one_clause.sat")
    assert code == 0
    assert len(read_instance(out).clauses) == 28
    assert "clauses=28" in err


def test_pipeline_composes(tmp_path):
    quad, tp, sft = tmp_path / "q.sat", tmp_path / "q.tp", tmp_path / "q.sft"
    assert cli("sat", "reduce-quad", DATA / "one_clause.sat", "-o", quad)[0] == 0
    assert cli("sat", "reduce-tp", quad, "--min", "--verify", "-o", tp)[0] == 0
    assert cli("sat", "reduce-sftas", tp, "--verify", "-o", sft)[0] == 0
    read_system(tp.read_text())
    read_sftas(sft.read_text())
    code, out, _ = cli("sftas", "find", sft, "--tau", "4")
    assert code == 0
    assert cli("sftas", "find", sft, "--tau", "2")[0] == 1


def test_check_equiv(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.tas", "b.tas", "c.tas"))
    base = "tau {}\nseed s 0 0\ntile s E=x\ntile u W=x N=y\nglue x {}\nglue y 1\n"
    a.write_text(base.format(2, 2))
    b.write_text(base.format(4, 5))
    c.write_text(base.format(1, 1))
    assert cli("sftas", "check-equiv", a, b)[0] == 0
    assert cli("sftas", "check-equiv", a, c)[0] == 1


def test_witness_then_strict_exit_zero(tmp_path):
    system, tas, shape = tmp_path / "w.tp", tmp_path / "w.tas", tmp_path / "w.pts"
    assert cli("sat", "reduce-tp", DATA / "one_clause_quad.sat", "--tau", "4", "-o", system)[0] == 0
    code, out, err = cli("shape", "witness", system, "--tau", "4", "--height", "4", "--shape", shape, "-o", tas, "--verify")
    assert code == 0
    t = read_tas(tas.read_text())
    assert len(t.tile_types) == int(pairs(out)["tile_types"])
    read_shape(shape.read_text())
    code, out, _ = cli("sim", "strict", tas, shape)
    assert code == 0 and pairs(out)["outcome"] == "yes"
    assert cli("sim", "directed", tas)[0] == 0


def test_sim_budget_exit_3(tmp_path):
    tas = tmp_path / "grow.tas"
    tas.write_text("tau 1\nseed g 0 0\ntile g W=x E=x\nglue x 1\n")
    code, out, _ = cli("sim", "terminals", tas, "--max-size", "30")
    assert code == 3 and pairs(out)["error"] == "resources_exceeded"
    code, out, _ = cli("sim", "frontier", tas)
    assert code == 0


def test_shape_build_and_render(tmp_path):
    shape, plan, svg = tmp_path / "s.pts", tmp_path / "s.plan", tmp_path / "s.svg"
    system = tmp_path / "w.tp"
    cli("sat", "reduce-tp", DATA / "one_clause_quad.sat", "-o", system)
    code, _, _ = cli("shape", "build", system, "--height", "3", "--plan", plan, "--render", "svg", "--render-to", svg, "--verify", "-o", shape)
    assert code == 0
    assert svg.read_text().startswith("<svg")
    code, out, _ = cli("shape", "render", shape, "--plan", plan)
    assert code == 0 and len(out.splitlines()) > 3


def test_oracle_tilecomplexity(tmp_path):
    pts = tmp_path / "line.pts"
    pts.write_text("0 0\n1 0\n2 0\n")
    code, out, _ = cli("--format", "machine", "oracle", "tilecomplexity", pts, "--tau", "2")
    assert code == 0 and pairs(out)["tile_complexity"] == "3"
    code, out, _ = cli("oracle", "tilecomplexity", pts, "--max-types", "2")
    assert code == 1


@pytest.mark.parametrize("seed", ["0", "1", "12345"])
def test_output_is_deterministic_across_hash_seeds(seed, tmp_path):
    env = dict(os.environ, PYTHONHASHSEED=seed)
    cmd = [sys.executable, "-m", "tasbench.cli", "sat", "reduce-quad", str(DATA / "one_clause.sat")]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    ref = subprocess.run(cmd, env=dict(os.environ, PYTHONHASHSEED="777"), capture_output=True, text=True, check=True).stdout
    assert out == ref
