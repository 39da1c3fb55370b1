import dataclasses
import json
from pathlib import Path

import pytest

from coulomblab import harness
from coulomblab.cli import main
from coulomblab.errors import NumericalError
from coulomblab.harness import EXPERIMENTS, ConfigError, describe, make_config, parse_config, run


def write(tmp_path, data, name="cfg.json") -> Path:
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return p


SPECTRUM = {"experiment": "spectrum",
            "parameters": {"window": {"type": "disk", "center": [0, 0], "radius": 2.0}, "C_univ": 0.462,
                           "alphas": [0.3, 0.1]}}


def artifacts(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if not p.name.endswith(".manifest.json")}


def test_describe_lists_columns():
    text = describe("spectrum")
    for col in ("alpha", "count", "rhs_upper", "rhs_lower"):
        assert col in text
    assert "slope" in describe("discrepancy-boundary")
    with pytest.raises(ConfigError):
        describe("nope")


def test_cli_describe(capsys):
    assert main(["describe", "sandwich"]) == 0
    assert "finite_count" in capsys.readouterr().out
    assert main(["describe", "nope"]) == 2
    assert main(["describe"]) == 2


def test_malformed_json_reports_position(tmp_path, capsys):
    p = write(tmp_path, '{"experiment": "spectrum",\n  "seed": 1,,\n}')
    assert main(["spectrum", "--config", str(p)]) == 2
    err = capsys.readouterr().err
    assert f"{p}:2:" in err


def test_parse_config_rejects_non_object():
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


@pytest.mark.parametrize("data", [
    {"experiment": "spectrum", "bogus": 1, "parameters": SPECTRUM["parameters"]},
    {"experiment": "spectrum", "parameters": {**SPECTRUM["parameters"], "bogus": 1}},
    {"experiment": "spectrum", "parameters": {"window": {"type": "disk", "center": [0, 0], "radius": -1}}},
    {"experiment": "spectrum", "parameters": {}},
    {"experiment": "gas", "parameters": {"n": 1}},
    {"experiment": "nope"},
    {"experiment": "spectrum", "seed": -3, "parameters": SPECTRUM["parameters"]},
])
def test_invalid_configs_exit_2(tmp_path, data):
    p = write(tmp_path, data)
    assert main([data.get("experiment", "spectrum"), "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_mismatched_experiment(tmp_path):
    p = write(tmp_path, SPECTRUM)
    assert main(["gas", "--config", str(p)]) == 2


def test_domain_error_exit_2(tmp_path):
    data = {"experiment": "spectrum", "parameters": {**SPECTRUM["parameters"], "h": 0.5}}
    assert main(["spectrum", "--config", str(write(tmp_path, data)), "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(p, seed, pool):
        raise NumericalError("did not converge")

    monkeypatch.setitem(EXPERIMENTS, "fekete", dataclasses.replace(EXPERIMENTS["fekete"], runner=boom))
    p = write(tmp_path, {"experiment": "fekete", "parameters": {"n": 4}})
    assert main(["fekete", "--config", str(p), "--out", str(tmp_path / "o")]) == 3


def test_unconverged_refinement_exit_3(tmp_path):
    # a radius-1.5 disk moves by ~0.015 between h and h/sqrt(2) on the cell-centre lattice
    data = {"experiment": "spectrum",
            "parameters": {**SPECTRUM["parameters"], "window": {"type": "disk", "center": [0, 0], "radius": 1.5}}}
    res = run(make_config(data, output_dir=str(tmp_path)))
    assert res.status == 3 and "refinement" in res.message


def test_lab_threads_default(monkeypatch):
    monkeypatch.setenv("LAB_THREADS", "4")
    assert make_config(SPECTRUM).threads == 4
    assert make_config(SPECTRUM, threads=2).threads == 2
    monkeypatch.setenv("LAB_THREADS", "many")
    with pytest.raises(ConfigError):
        make_config(SPECTRUM)


def test_hash_ignores_threads_and_output(tmp_path):
    a = make_config(SPECTRUM, threads=1, output_dir="a")
    b = make_config(SPECTRUM, threads=8, output_dir="b")
    c = make_config(SPECTRUM, seed=5)
    assert a.run_hash() == b.run_hash() != c.run_hash()


def test_spectrum_run_artifacts_and_determinism(tmp_path):
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"t{threads}"
        res = run(make_config(SPECTRUM, threads=threads, output_dir=str(out)))
        assert res.status == 0, res.message
        outs.append(artifacts(out))
    assert outs[0] == outs[1]
    names = sorted(outs[0])
    assert any(n.endswith(".eigenvalues.csv") for n in names)
    main_csv = next(v for k, v in outs[0].items() if k.count(".") == 1 and k.endswith(".csv"))
    assert main_csv.decode().splitlines()[0].startswith("alpha,count")


def test_manifest_rerun_is_byte_identical(tmp_path):
    first = tmp_path / "first"
    assert main(["spectrum", "--config", str(write(tmp_path, SPECTRUM)), "--out", str(first)]) == 0
    manifest = next(first.glob("*.manifest.json"))
    second = tmp_path / "second"
    assert main(["spectrum", "--config", str(manifest), "--out", str(second)]) == 0
    assert artifacts(first) == artifacts(second)
    resolved = json.loads(manifest.read_text())
    assert resolved["parameters"]["h"] == 0.1 and resolved["seed"] == 0


def test_gas_run_deterministic_across_threads(tmp_path):
    data = {"experiment": "gas", "seed": 7, "parameters": {"n": 32, "sweeps": 40, "burn_in": 20}}
    a = run(make_config(data, threads=1, output_dir=str(tmp_path / "a")))
    b = run(make_config(data, threads=4, output_dir=str(tmp_path / "b")))
    assert a.status == b.status == 0
    assert artifacts(tmp_path / "a") == artifacts(tmp_path / "b")


def test_seed_override_changes_output(tmp_path):
    data = {"experiment": "gas", "parameters": {"n": 16, "sweeps": 20, "burn_in": 10}}
    p = write(tmp_path, data)
    assert main(["gas", "--config", str(p), "--seed", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["gas", "--config", str(p), "--seed", "2", "--out", str(tmp_path / "a")]) == 0
    assert len(list((tmp_path / "a").glob("gas-*.csv"))) == 2


def test_bulk_window_ids_with_commas_stay_one_field(tmp_path):
    import csv
    data = {"experiment": "discrepancy-bulk",
            "parameters": {"n_list": [64], "seeds": 1, "sweeps": 20, "burn_in": 10, "M_bulk": 0.5,
                           "windows": {"disk, small": {"type": "disk", "center": [0, 0], "radius": 1.0}}}}
    res = run(make_config(data, output_dir=str(tmp_path)))
    assert res.status in (0, 3)
    body = next(p for p in tmp_path.glob("discrepancy-bulk-*.csv"))
    rows = list(csv.reader(body.open()))
    assert all(len(r) == len(rows[0]) for r in rows)


def test_verify_passes_on_fresh_checkout(tmp_path):
    res = run(make_config({"experiment": "verify"}, output_dir=str(tmp_path)))
    assert res.status == 0, res.message
    table = next(tmp_path.glob("verify-*.csv")).read_text().splitlines()
    assert len(table) == 1 + len(harness_checks())
    assert all(line.endswith(",1") for line in table[1:])


def harness_checks():
    from coulomblab.verify import CHECKS
    return CHECKS


def test_formats_documented():
    root = Path(__file__).resolve().parents[1]
    doc = (root / "docs" / "formats.md").read_text()
    for name in EXPERIMENTS:
        assert name in doc


@pytest.mark.parametrize("path", sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.json")),
                         ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    data = parse_config(path.read_text(), str(path))
    cfg = make_config(data)
    assert cfg.experiment in EXPERIMENTS
