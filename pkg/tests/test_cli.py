"""Command line harness: subcommands, config merging, exit codes."""

import json
from fractions import Fraction as F

import pytest

from epival.bodies import Polytope
from epival.cli import SuiteConfig, main, run_suite
from epival.dual import DualAtomMeasure
from epival.functions import PLConvexFunction
from epival.report import dumps_canonical


def run(*argv):
    return main(list(argv))


def square_measure_file(tmp_path, weights=(1.0, 1.0, 1.0, 1.0)):
    payload = {
        "dim": 2,
        "signed": False,
        "atoms": [
            {"n": [1.0, 0.0], "w": weights[0]},
            {"n": [-1.0, 0.0], "w": weights[1]},
            {"n": [0.0, 1.0], "w": weights[2]},
            {"n": [0.0, -1.0], "w": weights[3]},
        ],
    }
    path = tmp_path / "measure.json"
    path.write_text(json.dumps(payload))
    return str(path)


def gw_input_file(tmp_path, atoms=None):
    seg = Polytope.construct([(F(-1),), (F(1),)], 1)
    if atoms is None:
        atoms = [{"x": ["-1"], "w": "1"}, {"x": ["0"], "w": "-2"},
                 {"x": ["1"], "w": "1"}]
    payload = {
        "measure": {"n": 1, "atoms": atoms},
        "family": [PLConvexFunction.constant(seg, 0).to_dict()],
        "bump": "smooth",
    }
    path = tmp_path / "gw.json"
    path.write_text(json.dumps(payload))
    return str(path)


class TestVerify:
    def test_conjugate_exact(self, tmp_path, capsys):
        out = str(tmp_path / "rep")
        assert run("verify", "--suite", "conjugate", "--cases", "4",
                   "--out", out) == 0
        payload = json.loads((tmp_path / "rep.json").read_text())
        assert payload["pass"] == 4
        assert payload["fail"] == 0
        assert payload["worst_residual"] == 0
        assert (tmp_path / "rep.csv").exists()
        assert "pass=4" in capsys.readouterr().out

    def test_byte_identical_reruns(self, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        for out in (a, b):
            assert run("verify", "--suite", "change-of-vars", "--cases", "3",
                       "--seed", "5", "--out", out) == 0
        assert (tmp_path / "a.json").read_bytes() == \
            (tmp_path / "b.json").read_bytes()
        assert (tmp_path / "a.csv").read_bytes() == \
            (tmp_path / "b.csv").read_bytes()

    def test_config_file_and_override(self, tmp_path):
        cfg = tmp_path / "suite.cfg"
        cfg.write_text("suite=conjugate\ncases=3\nseed=5\n# comment\n")
        out = str(tmp_path / "r")
        assert run("verify", "--config", str(cfg), "--out", out) == 0
        assert json.loads((tmp_path / "r.json").read_text())["cases"] == 3
        # flag beats the file
        assert run("verify", "--config", str(cfg), "--cases", "2",
                   "--out", out) == 0
        assert json.loads((tmp_path / "r.json").read_text())["cases"] == 2

    def test_steiner_runs(self):
        cfg = SuiteConfig("steiner", 1, 2, 7, 1e-9, 1e-6, 3.0, None)
        rep = run_suite(cfg)
        assert len(rep.rows) == 2
        assert {r["kind"] for r in rep.rows} == {"body", "function"}

    def test_usage_errors(self, tmp_path):
        assert run("verify", "--suite", "nope") == 2
        assert run("verify") == 2  # no suite anywhere
        bad = tmp_path / "bad.cfg"
        bad.write_text("this line has no equals sign\n")
        assert run("verify", "--config", str(bad)) == 2
        assert run("verify", "--suite", "conjugate", "--cases", "0") == 2


class TestMinkowski:
    def test_axis_square(self, tmp_path):
        out = tmp_path / "body.json"
        path = square_measure_file(tmp_path)
        assert run("minkowski", "--in", path, "--out", str(out)) == 0
        body = Polytope.from_dict(json.loads(out.read_text()))
        want = Polytope.construct([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
        assert body == want

    def test_canonical_output(self, tmp_path):
        out = tmp_path / "body.json"
        path = square_measure_file(tmp_path)
        run("minkowski", "--in", path, "--out", str(out))
        body = Polytope.from_dict(json.loads(out.read_text()))
        assert out.read_text() == dumps_canonical(body.to_dict())

    def test_unbalanced_fails(self, tmp_path):
        path = square_measure_file(tmp_path, weights=(2.0, 1.0, 1.0, 1.0))
        assert run("minkowski", "--in", path,
                   "--out", str(tmp_path / "x.json")) == 1

    def test_schema_violation(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text('{"not": "a measure"}')
        assert run("minkowski", "--in", str(path),
                   "--out", str(tmp_path / "x.json")) == 2


class TestGw:
    def test_small_run(self, tmp_path):
        out = str(tmp_path / "gwrep")
        assert run("gw", "--in", gw_input_file(tmp_path),
                   "--j-list", "2", "--out", out) == 0
        payload = json.loads((tmp_path / "gwrep.json").read_text())
        assert [row["j"] for row in payload["rows"]] == [2]
        csv = (tmp_path / "gwrep.csv").read_text().splitlines()
        assert csv[0].startswith("j,sup_error")
        assert len(csv) == 2

    def test_zero_measure(self, tmp_path):
        out = str(tmp_path / "zero")
        assert run("gw", "--in", gw_input_file(tmp_path, atoms=[]),
                   "--j-list", "2,4", "--out", out) == 0
        payload = json.loads((tmp_path / "zero.json").read_text())
        assert all(row["sup_error"] == 0 for row in payload["rows"])

    def test_missing_out(self, tmp_path):
        assert run("gw", "--in", gw_input_file(tmp_path)) == 2

    def test_bad_j_list(self, tmp_path):
        assert run("gw", "--in", gw_input_file(tmp_path),
                   "--j-list", "0,2", "--out", "x") == 2
        assert run("gw", "--in", gw_input_file(tmp_path),
                   "--j-list", "a,b", "--out", "x") == 2

    def test_missing_family_key(self, tmp_path):
        path = tmp_path / "nofam.json"
        path.write_text(json.dumps({"measure": {"n": 1, "atoms": []}}))
        assert run("gw", "--in", str(path), "--out", "x") == 2


class TestDecompose:
    def test_registry_round(self, tmp_path):
        from epival.valuations import (BumpKernel, PlaneDensity,
                                       ValuationSpec, save_registry)
        reg = {
            "g": ValuationSpec("gradient", 1,
                               plane=PlaneDensity(1, BumpKernel((0.0,), 1.0),
                                                  1.0)),
            "d": ValuationSpec("dual_density", 1,
                               dual_atoms=(((0.5,), 1.0),)),
        }
        path = tmp_path / "reg.json"
        save_registry(reg, str(path))
        out = str(tmp_path / "dec")
        assert run("decompose", "--in", str(path), "--cases", "2",
                   "--out", out) == 0
        payload = json.loads((tmp_path / "dec.json").read_text())
        names = {row["valuation"] for row in payload["per_case"]}
        assert names == {"g", "d", "combined"}

    def test_empty_registry(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text("{}")
        assert run("decompose", "--in", str(path)) == 2
