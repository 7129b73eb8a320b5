import json
from pathlib import Path

import pytest

from smbundle.cli import SCHEMA, SUITES, ConfigError, RunConfig, load_config, main, report_body, resolve_suites, run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return path


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out
    for name in ("minkowski-coordinate", "curved-demo", "rotating-frame", "trivial-flat", "imaginary-constant", "cgs-nist", "natural"):
        assert name in out


def test_resolve_suites_order():
    assert resolve_suites(["gauge", "identities"]) == ["identities", "gauge"]
    assert resolve_suites(["all"]) == list(SUITES)
    with pytest.raises(ValueError, match="unknown suite"):
        resolve_suites(["bogus"])


def test_malformed_json_reports_position(tmp_path, capsys):
    path = _write(tmp_path, '{"chart": {"preset": "minkowski-coordinate",}\n}')
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 2
    err = capsys.readouterr().err
    assert ":1:" in err and "invalid JSON" in err
    assert not out.exists()


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ({"chart": {"preset": "torus"}}, "field chart.preset"),
        ({"vacuum": "hot"}, "field vacuum"),
        ({"constants": "si"}, "field constants"),
        ({"couplings": {"g2": -1}}, "field couplings.g2"),
        ({"chart": {"extents": 3}}, "field chart.extents"),
        ({"suites": ["nope"]}, "field suites"),
        ({"unexpected": 1}, "field unexpected"),
        ({"yukawa": {"h1": {"real": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]}, "mode": "hermitian"}}, "field yukawa"),
        ({"couplings": {"g2": 0.4}}, "field couplings.g1"),
    ],
)
def test_invalid_config_exits_with_usage_error(tmp_path, capsys, payload, fragment):
    path = _write(tmp_path, payload)
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 2
    assert fragment in capsys.readouterr().err
    assert not out.exists()


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_grid_and_suite_overrides(tmp_path):
    cfg = load_config(_write(tmp_path, {}), suites=["masses"], grid=7)
    assert cfg.chart.extents == 7 and cfg.suites == ["masses"]
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {}), grid=2)


def test_masses_suite_reports_ratio(tmp_path):
    path = _write(tmp_path, {"couplings": {"g2": 1.0}, "higgs": {"v": 1.0, "m_phi": 0.5}, "suites": ["masses"]})
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    values = report["suites"]["masses"]["values"]
    assert values["m_W/m_Z"] == pytest.approx(0.8660, abs=1e-4)
    assert abs(values["m_W/m_Z"] - 3**0.5 / 2) <= 1e-6
    assert values["Q_charged"] == pytest.approx(-1.0, abs=1e-12)


def test_skipped_suites_keep_schema(tmp_path):
    report = run(load_config(_write(tmp_path, {"suites": ["masses"]})))
    assert report["schema"] == SCHEMA
    assert list(report["suites"]) == list(SUITES)
    for name in SUITES:
        entry = report["suites"][name]
        assert set(entry) == {"status", "checks", "values", "notes"}
        assert entry["status"] == ("pass" if name == "masses" else "skipped")
    for check in report["suites"]["masses"]["checks"].values():
        assert set(check) == {"value", "tolerance", "pass", "tests"}
    assert {"version", "config", "grid", "spacing", "seed", "g1"} <= set(report["provenance"])


def test_explicit_g1_notes_unconstrained_charges(tmp_path):
    report = run(load_config(_write(tmp_path, {"couplings": {"g1": 0.3, "g2": 1.0}, "suites": ["masses"]})))
    masses = report["suites"]["masses"]
    assert "charge constraint" not in masses["checks"]
    assert any("explicit g1" in note for note in masses["notes"])


def test_general_mode_skips_quark_masses(tmp_path):
    payload = {"yukawa": {"mode": "general", "h1": {"real": [[0.1, 0.3, 0], [0, 0.2, 0], [0, 0, 0.3]]}}, "suites": ["masses"]}
    report = run(load_config(_write(tmp_path, payload)))
    masses = report["suites"]["masses"]
    assert masses["status"] == "pass"
    assert not any(k.startswith("quark mass") for k in masses["checks"])
    assert any("general coupling mode" in note for note in masses["notes"])


@pytest.mark.slow
def test_identities_suite_on_flat_chart(tmp_path):
    report = run(load_config(_write(tmp_path, {"suites": ["identities"]})))
    assert report["passed"] and report["suites"]["identities"]["status"] == "pass"
    assert report["timing"]["total"] < 60


@pytest.mark.slow
def test_reports_are_reproducible(tmp_path):
    path = _write(tmp_path, {"fields": {"seed": 11}, "suites": ["higgs", "breaking"]})
    first = report_body(run(load_config(path)))
    second = report_body(run(load_config(path)))
    assert json.dumps(first) == json.dumps(second)


@pytest.mark.parametrize("name", ["default.json", "curved.json"])
def test_shipped_configs_validate(name):
    cfg = load_config(CONFIGS / name)
    assert isinstance(cfg, RunConfig) and cfg.suites == list(SUITES)
