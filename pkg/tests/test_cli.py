import io
import json
import os.path as osp

import numpy as np
import pytest

from swe_symmetry import cli
from swe_symmetry.config import RunConfig, UsageError, from_args, parse_param, load_fixture
from swe_symmetry.errors import FixtureError
from swe_symmetry.logger import Logger


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig(command="verify")
        assert cfg.system == "general" and cfg.omega == "symbolic"
        assert cfg.bindings() == {}

    def test_numeric_parameters(self):
        cfg = RunConfig(command="tables", system="pole", omega="0.5", g=9.81)
        assert cfg.bindings() == {"Omega": 0.5, "g": 9.81}

    @pytest.mark.parametrize("kwargs", [
        {"command": "fly"},
        {"command": "verify", "system": "mars"},
        {"command": "verify", "tol": -1.0},
        {"command": "verify", "advection": "upwind"},
        {"command": "integrate", "step": 0.0},
        {"command": "verify", "omega": "fast"},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(UsageError):
            RunConfig(**kwargs)

    def test_non_finite(self):
        with pytest.raises(UsageError):
            parse_param("inf", "omega")

    def test_yaml_layering(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("system: equator\ntol: 1.0e-6\nomega: 2\n")
        args = cli.make_parser().parse_args(["verify", "--config", str(path), "--system", "pole"])
        cfg = from_args(args)
        assert cfg.system == "pole"
        assert cfg.tol == 1e-6
        assert cfg.omega == 2.0

    def test_unknown_yaml_key(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("colour: blue\n")
        args = cli.make_parser().parse_args(["verify", "--config", str(path)])
        with pytest.raises(UsageError):
            from_args(args)

    def test_missing_fixture(self, tmp_path):
        with pytest.raises(FixtureError):
            load_fixture("table1", str(tmp_path))

    def test_malformed_fixture(self, tmp_path):
        (tmp_path / "table1.json").write_text("{not json")
        with pytest.raises(FixtureError, match="malformed"):
            load_fixture("table1", str(tmp_path))


class TestOutput:
    def test_float_precision(self):
        text = cli.dumps({"b": 0.1, "a": [1, np.float64(1/3)], "c": float("nan")})
        assert '"b": 0.10000000000000001' in text
        assert "0.33333333333333331" in text
        assert '"c": null' in text
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["b"] == 0.1

    def test_logger_status(self):
        stream = io.StringIO()
        log = Logger("unit", logdir=None, freq=2, stream=stream)
        for k in range(4):
            log.push({"events": 1.0})
        log.write_dict({"runs": 2})
        lines = stream.getvalue().splitlines()
        assert len(lines) == 3
        assert "events=" in lines[0]
        assert lines[-1] == "runs: 2"
        log.close()


class TestMain:
    def test_missing_subcommand(self):
        assert cli.main([]) == cli.EXIT_USAGE

    def test_unknown_system(self):
        assert cli.main(["verify", "--system", "mars"]) == cli.EXIT_USAGE

    def test_bad_flag(self):
        assert cli.main(["verify", "--bogus"]) == cli.EXIT_USAGE

    def test_missing_fixture(self, tmp_path):
        assert cli.main(["tables", "--system", "general", "--fixtures", str(tmp_path)]) == cli.EXIT_NOINPUT

    def test_integrate_needs_inputs(self):
        assert cli.main(["integrate", "--system", "equator"]) == cli.EXIT_USAGE

    def test_verify_general(self, capsys):
        assert cli.main(["verify", "--system", "general"]) == cli.EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["verified"] is True
        assert set(report["generators"]) == {"X1", "X2", "X3"}
        assert "advection" in {e["id"] for e in report["errata"]}

    def test_verify_equator_with_symbolic_gravity(self, capsys):
        assert cli.main(["verify", "--system", "equator"]) == cli.EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["verified"] is True
        assert set(report["generators"]) == {"Y1", "Y2", "Y3", "Y4", "Y5"}

    def test_verify_pole_without_search(self, capsys):
        assert cli.main(["verify", "--system", "pole", "--no_search"]) == cli.EXIT_UNCORRECTED

    def test_tables_equator(self, tmp_path):
        assert cli.main(["tables", "--system", "equator", "--out", str(tmp_path)]) == cli.EXIT_OK
        with open(osp.join(str(tmp_path), "tables_equator.json")) as fp:
            out = json.load(fp)
        assert out["tables"]["table3"]["summary"]["mismatch"] == 0
        assert out["tables"]["table4"]["summary"]["mismatch"] == 0
        assert out["checks"]["jacobi_residuals"] == 0
        assert out["optimal_system"]["verdict"] == "refuted"
        assert not [e for e in out["errata"] if e["id"].startswith(("table3-", "table4-"))]
        assert osp.isfile(osp.join(str(tmp_path), "table4.txt"))

    def test_reduce_equator(self, tmp_path):
        path = str(tmp_path / "reduce.json")
        assert cli.main(["reduce", "--system", "equator", "--out", path]) == cli.EXIT_OK
        with open(path) as fp:
            out = json.load(fp)
        assert out["equator_y4y5"]["comparison"]["equations"]["V_w"] == "negated"
        assert set(out["equator_y2y5"]["agreement"].values()) == {"match"}
        assert set(out["equator_y2y5"]["closed_form_residuals"].values()) == {"0"}

    def test_integrate_figure(self, tmp_path, capsys):
        assert cli.main(["integrate", "--figure", "equator_y4y5", "--out", str(tmp_path)]) == cli.EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert len(summary["runs"]) == 2
        for run in summary["runs"]:
            assert osp.isfile(run["csv"])
            assert osp.isfile(run["csv"] + ".events.json")

    def test_integrate_unknown_figure(self, tmp_path):
        assert cli.main(["integrate", "--figure", "notes", "--out", str(tmp_path)]) == cli.EXIT_USAGE
