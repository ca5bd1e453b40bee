import csv
import io
from pathlib import Path

import pytest
import yaml

from movingwells import ParameterError, __version__
from movingwells.cli import main
from movingwells.config import ExperimentSpec, config_hash, load_config
from movingwells.experiments import (GAMMA_COLUMNS, ExperimentError, run_annular_study,
                                     run_audit, run_experiment, run_gamma_sweep)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

FIXED = {
    "kind": "gamma-sweep", "seed": 3, "eps": [0.04, 0.02], "grid": 2048, "interface": 0.5,
    "potential": {"domain": {"lower": [0.0], "upper": [1.0]},
                  "wells": {"type": "constant", "value": [1.0]}},
}
MOVING = {
    "kind": "gamma-sweep", "eps": [0.04, 0.02, 0.01], "grid": 4096, "interface": "auto",
    "potential": {"domain": {"lower": [0.0], "upper": [1.0]},
                  "wells": {"type": "expression", "exprs": [["1 + (x - 0.5)**2 / 2"]]}},
}


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_csv_is_deterministic_with_provenance():
    spec = ExperimentSpec.from_dict(FIXED)
    first, second = run_gamma_sweep(spec).to_csv(), run_gamma_sweep(spec).to_csv()
    assert first == second
    header = first.splitlines()[0].split(",")
    assert header == GAMMA_COLUMNS + ["config_hash", "version", "seed"]
    row = rows_of(first)[0]
    assert row["config_hash"] == config_hash(FIXED) and row["version"] == __version__
    assert row["seed"] == "3"


def test_sweep_sorted_by_decreasing_eps_and_close_to_oracle():
    res = run_gamma_sweep(ExperimentSpec.from_dict({**FIXED, "eps": [0.04, 0.02, 0.01]}))
    eps = res.column("eps")
    assert eps == sorted(eps, reverse=True)
    assert all(r["rel_gap"] < 0.02 for r in res.rows)


def test_moving_wells_localize_interface():
    res = run_gamma_sweep(ExperimentSpec.from_dict(MOVING))
    assert res.rows[0]["interface_target"] == pytest.approx(0.5, abs=0.01)
    assert abs(res.rows[-1]["interface"] - 0.5) <= 0.05
    gaps = res.column("gap")
    assert all(b < a for a, b in zip(gaps[:-1], gaps[1:]))


def test_mass_sweep_residual_column():
    spec = ExperimentSpec.from_dict({**FIXED, "kind": "gamma-sweep-mass", "mass": [0.0]})
    res = run_gamma_sweep(spec)
    assert all(r["max_mass_residual"] <= 1e-10 for r in res.rows)


def test_eps_list_must_decrease():
    with pytest.raises(ParameterError):
        ExperimentSpec.from_dict({**FIXED, "eps": [0.01, 0.02]})


def test_unknown_kind():
    with pytest.raises(ParameterError):
        ExperimentSpec.from_dict({"kind": "nope"})


def test_module_errors_carry_context():
    spec = ExperimentSpec.from_dict({**FIXED, "interface": 0.01})
    with pytest.raises(ExperimentError, match=r"gamma-sweep .*eps=0.04"):
        run_gamma_sweep(spec)


def test_annular_baseline_and_capped_collapse():
    res = run_annular_study(ExperimentSpec.from_dict(
        {"kind": "annular-study", "rings": [1], "caps": [1e-5]}))
    plain, capped = res.rows
    assert plain["length"] >= 1.0
    assert capped["length"] == pytest.approx(1.0, abs=0.05)
    assert capped["distance"] < plain["distance"]


def test_annular_rejects_large_ring_counts():
    with pytest.raises(ParameterError):
        run_annular_study(ExperimentSpec.from_dict({"kind": "annular-study", "rings": [7]}))


def test_audit_rows_per_family():
    spec = load_config(CONFIGS / "audit.yaml")
    res = run_audit(spec)
    fams = {r["family"] for r in res.rows}
    assert fams == {"quartic-constant", "quartic-moving", "min-power-2d"}
    assert all(r["passed"] for r in res.rows)


def test_audit_broken_separation_row():
    spec = ExperimentSpec.from_dict({"kind": "audit", "potential": {
        "domain": {"lower": [0.0], "upper": [1.0]},
        "wells": {"type": "expression", "exprs": [["0.5 + x"]], "delta": 1.0}}})
    rows = {r["hypothesis"]: r for r in run_audit(spec).rows}
    assert rows["well_separation"]["passed"] is False


def test_field_dumps_written(tmp_path):
    run_experiment(ExperimentSpec.from_dict({**FIXED, "dump_fields": True}), tmp_path)
    assert (tmp_path / "fields" / "eps_0.02.bin").stat().st_size == 2048 * 8
    assert (tmp_path / "fields" / "eps_0.02.hdr").exists()


def write_yaml(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


def test_cli_gamma_with_figures(tmp_path, capsys):
    cfg = write_yaml(tmp_path / "c.yaml", FIXED)
    assert main(["gamma", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "gamma-sweep.csv").exists()
    assert (tmp_path / "out" / "figures" / "gamma-sweep_energy.png").exists()


def test_cli_no_figures_and_byte_identical(tmp_path):
    cfg = write_yaml(tmp_path / "c.yaml", FIXED)
    for out in ("a", "b"):
        assert main(["gamma", str(cfg), "--out", str(tmp_path / out), "--no-figures"]) == 0
    assert not (tmp_path / "a" / "figures").exists()
    a = (tmp_path / "a" / "gamma-sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "gamma-sweep.csv").read_bytes()


def test_cli_geodesic_config(tmp_path):
    out = tmp_path / "g"
    assert main(["geodesic", str(CONFIGS / "geodesic_bench.yaml"), "--out", str(out)]) == 0
    rows = rows_of((out / "geodesic-bench.csv").read_text())
    assert float(rows[0]["distance"]) == pytest.approx(8 / 3, abs=1e-3)
    assert float(rows[2]["distance"]) == pytest.approx(float(rows[0]["distance"]), abs=2e-3)
    assert (out / "timings.csv").exists()


@pytest.mark.parametrize("args, status", [
    (["audit", "__CFG__", "--out", "__OUT__"], 2),
    (["gamma", "/does/not/exist.yaml", "--out", "__OUT__"], 2),
])
def test_cli_errors_are_machine_readable(tmp_path, capsys, args, status):
    cfg = write_yaml(tmp_path / "c.yaml", FIXED)
    args = [a.replace("__CFG__", str(cfg)).replace("__OUT__", str(tmp_path / "o")) for a in args]
    assert main(args) == status
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert err.startswith("error: {")
    assert yaml.safe_load(err[len("error: "):])["type"]


def test_cli_runtime_error_status(tmp_path, capsys):
    cfg = write_yaml(tmp_path / "c.yaml", {**FIXED, "interface": 0.01})
    assert main(["gamma", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert '"ExperimentError"' in capsys.readouterr().err


def test_example_configs_parse():
    for path in CONFIGS.glob("*.yaml"):
        spec = load_config(path)
        assert spec.kind and len(spec.hash) == 12
