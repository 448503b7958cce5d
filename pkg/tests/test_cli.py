"""Command line behavior: subcommands, config precedence, exit codes."""

from __future__ import annotations

import csv
import json

import pytest

import czwarp.cli as cli
from czwarp.cli import main
from czwarp.experiment import CSV_COLUMNS, ExperimentConfig, run_experiment
from czwarp.quadrature import BoundAudit
from czwarp.warping import profile_from_json, profile_to_json


def test_build_writes_profile_and_samples(tmp_path):
    prof_path = tmp_path / "prof.json"
    csv_path = tmp_path / "sigma.csv"
    rc = main(
        [
            "build",
            "--m", "2", "--k", "2", "--n", "4",
            "--emit-profile", str(prof_path),
            "--samples-csv", str(csv_path),
            "--samples", "64",
        ]
    )
    assert rc == 0
    doc = json.loads(prof_path.read_text())
    assert doc["m"] == 2
    assert doc["windows"][0]["n_teeth"] == 4
    assert profile_to_json(profile_from_json(doc)) == doc
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,sigma,dsigma,d2sigma"
    assert len(lines) == 65
    last = [float(v) for v in lines[-1].split(",")]
    window = doc["windows"][0]
    assert last[0] == pytest.approx(window["z"] + window["width"] + 1.0, rel=1e-12)


def test_build_prints_profile_to_stdout(capsys):
    assert main(["build", "--m", "3", "--k", "2", "--n", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"m", "cap_coefficients", "windows"}
    assert doc["m"] == 3


def test_audit_reports_every_bound(capsys):
    assert main(["audit", "--m", "2", "--p", "2", "--k", "2", "--n", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(line.startswith("PASS ") for line in lines[:-1])
    names = {line.split()[1].rstrip(":") for line in lines[:-1]}
    assert {"strip_lower", "green_upper", "u_mass_upper", "laplacian_mass_upper"} <= names
    assert any(name.startswith("tooth_mass_lower") for name in names)
    assert lines[-1] == f"all {len(lines) - 1} bound audits passed"


def test_audit_failure_exits_three(monkeypatch, capsys):
    def broken_chain(tf, p, spec):
        audit = BoundAudit()
        audit.add("fake_bound", 1.0, 0.0, 0.0)
        return audit

    monkeypatch.setattr(cli, "audit_norm_chain", broken_chain)
    rc = main(["audit", "--m", "2", "--p", "2", "--k", "2", "--n", "4"])
    captured = capsys.readouterr()
    assert rc == 3
    assert "FAIL fake_bound" in captured.out
    assert "bound audits failed" in captured.err


def test_norms_json_matches_the_pipeline(capsys):
    assert main(["norms", "--m", "2", "--p", "2", "--k", "2", "--n", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rep = run_experiment(ExperimentConfig(m=2, p=2.0, k=2.0, n_teeth=4))
    assert doc["norm_u_p_pow"] == rep.norms.norm_u_p_pow
    assert doc["norm_lap_p_pow"] == rep.norms.norm_lap_p_pow
    assert doc["norm_hess_p_pow"] == rep.norms.norm_hess_p_pow
    assert doc["lhs"] == rep.lhs and doc["rhs"] == rep.rhs
    assert doc["ratio"] == rep.ratio
    assert doc["violated"] is rep.violated
    assert doc["audit_pass"] is True
    assert doc["h"] == rep.h
    assert doc["window"]["n_teeth"] == 4
    assert len(doc["audit"]) == len(rep.audit.entries)


def test_norms_writes_file_when_asked(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["norms", "--m", "2", "--p", "2", "--k", "2", "--n", "4", "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["n"] == 4


def test_violate_found_writes_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    rc = main(
        [
            "violate",
            "--m", "2", "--p", "2", "--k", "3",
            "--C1", "0.001", "--C2", "0.001",
            "--n-max", "64",
            "--trace-csv", str(trace),
        ]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n_star"] == 1
    assert doc["probes"] == 1
    assert doc["ratio"] > 1.0
    with open(trace, newline="") as fh:
        records = list(csv.DictReader(fh))
    assert list(records[0].keys()) == list(CSV_COLUMNS)
    assert len(records) == 1
    assert records[0]["violated"] == "true"


def test_violate_not_found_exits_two(capsys):
    rc = main(["violate", "--m", "2", "--p", "2", "--k", "3", "--n-max", "2"])
    assert rc == 2
    assert json.loads(capsys.readouterr().out)["n_star"] is None


def test_violate_rejects_bad_ceiling(capsys):
    rc = main(["violate", "--m", "2", "--n-max", "0"])
    assert rc == 1
    assert "n_max" in capsys.readouterr().err


def test_sweep_runs_a_grid(tmp_path, capsys):
    config = tmp_path / "grid.json"
    config.write_text(
        json.dumps(
            {
                "k": 2.0,
                "grid": {"m": [2, 3], "p": [2.0], "k": [2.0], "n": [1, 2]},
            }
        )
    )
    out = tmp_path / "rows.csv"
    rc = main(["sweep", "--config", str(config), "--out", str(out), "--workers", "2"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "wrote 4 rows" in captured.out
    with open(out, newline="") as fh:
        records = list(csv.DictReader(fh))
    assert [(r["m"], r["p"], r["n"]) for r in records] == [
        ("2", "2.0", "1"), ("2", "2.0", "2"), ("3", "2.0", "1"), ("3", "2.0", "2"),
    ]


def test_sweep_requires_config_with_grid(tmp_path, capsys):
    assert main(["sweep", "--out", str(tmp_path / "x.csv")]) == 1
    assert "requires --config" in capsys.readouterr().err
    config = tmp_path / "nogrid.json"
    config.write_text(json.dumps({"m": 2}))
    assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "x.csv")]) == 1
    assert "grid" in capsys.readouterr().err
    config.write_text(json.dumps({"grid": {"m": [2], "p": [2.0], "k": [2.0]}}))
    assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "x.csv")]) == 1


def test_sweep_rejects_fractional_integer_axis(tmp_path, capsys):
    config = tmp_path / "frac.json"
    config.write_text(
        json.dumps({"grid": {"m": [2.5], "p": [2.0], "k": [2.0], "n": [1]}})
    )
    assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "x.csv")]) == 1
    assert "integers" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    config = tmp_path / "typo.json"
    config.write_text(json.dumps({"n_teeth": 4}))
    assert main(["build", "--config", str(config)]) == 1
    assert "n_teeth" in capsys.readouterr().err


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / "one.json"
    config.write_text(json.dumps({"m": 3, "k": 2.0, "n": 8}))
    assert main(["build", "--config", str(config), "--n", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"] == 3
    assert doc["windows"][0]["n_teeth"] == 2


def test_invalid_exponent_exits_one(capsys):
    assert main(["norms", "--m", "2", "--p", "0.5", "--k", "2", "--n", "2"]) == 1
    assert "error:" in capsys.readouterr().err


def test_quadrature_blowup_exits_four(capsys):
    rc = main(
        [
            "norms",
            "--m", "2", "--p", "2", "--k", "2", "--n", "4",
            "--quad-rel-tol", "1e-15", "--quad-max-depth", "2",
        ]
    )
    assert rc == 4
    assert "did not converge" in capsys.readouterr().err


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
