import json
import math
from pathlib import Path

import jsonschema
import pytest

from critical_disks import __version__
from critical_disks.cli import load_schema, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

EXPECTED_EXIT = {
    "cap-infeasible": 2,
    "cap-p2-forced": 0,
    "cap-p3": 0,
    "elastica-circle": 0,
    "energy-hemisphere": 0,
    "figure-bal-a": 0,
    "figure-bal-b": 0,
    "figure-bal-c": 0,
    "sweep-exp-square": 0,
    "weingarten": 0,
}


def _command(cfg: Path) -> str:
    for line in cfg.read_text().splitlines():
        if line.startswith("command"):
            return line.split('"')[1]
    raise AssertionError(cfg)


def _run(name: str, out: Path, jobs: int = 1) -> tuple[int, dict]:
    cfg = CONFIGS / f"{name}.toml"
    code = main([_command(cfg), str(cfg), "--out", str(out), "--jobs", str(jobs)])
    return code, json.loads((out / "report.json").read_text())


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("runs")
    return {name: (*_run(name, base / name), base / name) for name in EXPECTED_EXIT}


def test_shipped_configs_exit_codes(runs):
    assert {k: v[0] for k, v in runs.items()} == EXPECTED_EXIT


def test_reports_validate_against_schema(runs):
    schema = load_schema("report.schema.json")
    for _, rep, _ in runs.values():
        jsonschema.validate(rep, schema)
        assert rep["schema_version"] == "1.0"


def test_axisym_bundles(runs):
    for name in ("figure-bal-a", "figure-bal-b", "figure-bal-c"):
        _, rep, out = runs[name]
        assert rep["status"] == "ok"
        crit = rep["criticality"]
        assert crit["critical"]
        assert all(abs(v) < 1e-6 for v in crit["residuals"].values())
        assert all(abs(v) < 1e-6 for v in crit["bc_residuals"].values())
        for f in ("profile.csv", "surface.obj", "run-metadata.txt"):
            assert (out / f).stat().st_size > 0


def test_sweep_table(runs):
    _, rep, out = runs["sweep-exp-square"]
    rows = (out / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("phi0,status")
    assert len(rows) == 65
    assert rep["sweep"] == {"n": 64, "all_drift_ok": True}


def test_cap_reports(runs):
    rep = runs["cap-p3"][1]
    assert rep["cap"]["eta"] == 6.75 and rep["c0_forced"] is False
    rep = runs["cap-p2-forced"][1]
    assert rep["c0_forced"] is True and rep["cap"]["c0"] == 0.0
    rep = runs["cap-infeasible"][1]
    assert rep["status"] == "infeasible" and rep["cap"]["feasible"] is False


def test_weingarten_elastica_energy(runs):
    rep = runs["weingarten"][1]
    assert rep["K_minus_2c0H"]["max"] < 1e-6
    assert rep["regularity"] == "C0_at_axis"
    rep = runs["elastica-circle"][1]
    assert len(rep["roots"]) == 1 and abs(rep["roots"][0] - 1.0) < 1e-10
    rep = runs["energy-hemisphere"][1]
    assert abs(rep["energy"]["surface_P"] - 2 * math.pi) < 1e-6


def test_byte_identical_reruns(runs, tmp_path):
    for name in ("figure-bal-b", "cap-p3", "weingarten", "sweep-exp-square"):
        out = tmp_path / name
        _run(name, out, jobs=2)
        first = runs[name][2]
        for f in first.iterdir():
            if f.name != "run-metadata.txt":
                assert (out / f.name).read_bytes() == f.read_bytes(), (name, f.name)


def test_malformed_config_names_field(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('command = "cap-check"\np = 3\nsigma = -1.0\nc0 = 1.0\nbeta = 9.0\n\n'
                   '[boundary_density]\nfamily = "quadratic"\n')
    assert main(["cap-check", str(cfg), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "sigma" in err and f"{cfg}:3:" in err
    assert not (tmp_path / "o" / "report.json").exists()


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text((CONFIGS / "cap-p3.toml").read_text() + "\nbogus = 1\n")
    assert main(["cap-check", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "bogus" in capsys.readouterr().err


def test_command_mismatch(tmp_path):
    assert main(["weingarten", str(CONFIGS / "cap-p3.toml"), "--out", str(tmp_path)]) == 1


def test_regime_violation_exit(tmp_path):
    cfg = tmp_path / "log.toml"
    cfg.write_text('command = "axisym-solve"\nregime = "nongeodesic"\n\n[density]\nfamily = "log_square"\n\n'
                   '[boundary_density]\nfamily = "quadratic"\n\n[guess]\nphi0 = -1e-7\nL = 1.0\n')
    assert main(["axisym-solve", str(cfg), "--out", str(tmp_path / "o")]) == 3
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["status"] == "regime_violation"


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"critical-disks {__version__} (config schema 1.0)"


def test_no_color_when_not_a_tty(tmp_path, capsys):
    main(["cap-check", str(CONFIGS / "cap-infeasible.toml"), "--out", str(tmp_path)])
    assert "\033[" not in capsys.readouterr().err
