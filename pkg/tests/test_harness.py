import dataclasses
import json

import numpy as np
import pytest

from cadam.cli import build_manifest, main, read_config
from cadam.errors import ConfigInvalid, IncompatibleRuns
from cadam.harness import CSV_HEADER, RunManifest, SweepSpec, compare, preset, run, sweep
from cadam.optim import Hyperparams

# Table-1 values, frozen field-for-field
GOLDEN_PRESETS = {
    "synthetic": {"alpha0": 0.5, "beta1": 0.9, "beta2": 0.99, "epsilon": 1e-8,
                  "batch_size": 1, "iterations": 5_000_000, "l2": None},
    "logreg": {"alpha0": 1e-3, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-12,
               "batch_size": 128, "iterations": 200, "l2": 1e-4},
    "mlp": {"alpha0": 1e-3, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-12,
            "batch_size": 128, "iterations": 500, "l2": 1e-4},
}


def small_synthetic(optimizer="cadam", seed=3, iterations=20_000):
    m = preset("synthetic", optimizer, seed=seed)
    return dataclasses.replace(m, iterations=iterations, trace_stride=1000)


@pytest.mark.parametrize("name,golden", GOLDEN_PRESETS.items())
def test_presets_match_published_table(name, golden):
    m = preset(name)
    assert m.hyper.alpha0 == golden["alpha0"]
    assert m.hyper.beta1 == golden["beta1"]
    assert m.hyper.beta2 == golden["beta2"]
    assert m.hyper.epsilon == golden["epsilon"]
    assert m.batch_size == golden["batch_size"]
    assert m.iterations == golden["iterations"]
    if golden["l2"] is None:
        assert "l2" not in m.dataset
    else:
        assert m.dataset["l2"] == golden["l2"]


def test_mlp_preset_hidden_layer_width():
    assert preset("mlp").dataset["hidden"] == 100


def test_synthetic_run_byte_identical(tmp_path):
    m = small_synthetic()
    run(m, tmp_path / "a")
    run(m, tmp_path / "b")
    assert (tmp_path / "a/trace.csv").read_bytes() == (tmp_path / "b/trace.csv").read_bytes()
    assert (tmp_path / "a/summary.json").read_bytes() == (tmp_path / "b/summary.json").read_bytes()


def test_classification_run_byte_identical(tmp_path):
    m = dataclasses.replace(preset("logreg", "adam", seed=1), iterations=12)
    run(m, tmp_path / "a")
    run(m, tmp_path / "b")
    assert (tmp_path / "a/trace.csv").read_bytes() == (tmp_path / "b/trace.csv").read_bytes()
    assert (tmp_path / "a/val_trace.csv").read_bytes() == (tmp_path / "b/val_trace.csv").read_bytes()


def test_logreg_preset_trace_has_one_row_per_iteration(tmp_path):
    m = preset("logreg", "cadam", seed=0)
    result = run(m, tmp_path / "r")
    lines = (tmp_path / "r/trace.csv").read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) - 1 == 200
    val_lines = (tmp_path / "r/val_trace.csv").read_text().strip().split("\n")
    assert len(val_lines) - 1 == 200
    assert result.summary["final_val_accuracy"] > 0.5


def test_csv_schema_and_variant_columns(tmp_path):
    run(small_synthetic("sgd", iterations=3000), tmp_path / "sgd")
    lines = (tmp_path / "sgd/trace.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    assert lines[0] == CSV_HEADER
    row = dict(zip(header, lines[1].split(",")))
    assert row["psi_min"] == "" and row["lambda_min"] == ""  # absent for sgd, not omitted
    run(small_synthetic("amsgrad", iterations=3000), tmp_path / "ams")
    row = dict(zip(header, (tmp_path / "ams/trace.csv").read_text().strip()
                   .split("\n")[1].split(",")))
    assert row["psi_min"] != "" and row["lambda_min"] == ""
    run(small_synthetic("cadam", iterations=3000), tmp_path / "cad")
    row = dict(zip(header, (tmp_path / "cad/trace.csv").read_text().strip()
                   .split("\n")[1].split(",")))
    assert row["lambda_min"] != "" and row["lambda_max"] != ""


def test_unknown_optimizer_names_field():
    with pytest.raises(ConfigInvalid, match="optimizer"):
        RunManifest("synthetic", "adamw", Hyperparams(), seed=0, iterations=10)


def test_unknown_experiment_names_field():
    with pytest.raises(ConfigInvalid, match="experiment"):
        preset("cifar")


def test_noisy2d_outputs(tmp_path):
    m = preset("noisy2d", "cadam", seed=0)
    m = dataclasses.replace(m, iterations=15,
                            dataset=dict(m.dataset, n=400))
    result = run(m, tmp_path / "r")
    assert len(result.summary["true_boundary"]) == 3
    assert len(result.summary["learned_boundary"]) == 3
    pts = (tmp_path / "r/points.csv").read_text().strip().split("\n")
    assert pts[0] == "x1,x2,label"
    assert len(pts) - 1 == 400
    # multi-coordinate runs can split coordinates across the two cases
    assert all(r.case_tag in ("case1", "case2", "mixed") for r in result.trace)


def test_theorem_check_summary(tmp_path):
    m = preset("synthetic-det", "cadam", seed=0)
    m = dataclasses.replace(m, iterations=2000, theorem_check=True)
    result = run(m, tmp_path / "r")
    report = result.summary["bound_report"]
    assert result.summary["bound_holds"]
    assert report["realized_regret"] <= report["rhs"]


def test_theorem_check_rejected_for_unbounded_experiments(tmp_path):
    m = dataclasses.replace(preset("logreg"), theorem_check=True, iterations=5)
    with pytest.raises(ConfigInvalid):
        run(m, tmp_path / "r")


def test_sweep_seeds(tmp_path):
    base = small_synthetic("cadam", iterations=5000)
    rows = sweep(SweepSpec(base=base, axis="seeds", values=(1, 2, 3)), tmp_path)
    assert [r["value"] for r in rows] == [1, 2, 3]
    assert (tmp_path / "sweep.json").exists() and (tmp_path / "sweep.csv").exists()
    assert len({r["final_x"] for r in rows}) > 1  # seeds actually vary


def test_sweep_epsilon0(tmp_path):
    base = small_synthetic("cadam-v2", iterations=5000)
    rows = sweep(SweepSpec(base=base, axis="epsilon0", values=(1e-4, 1.0)), tmp_path)
    assert len(rows) == 2
    manifest = json.loads((tmp_path / "point_01_epsilon0_1.0/manifest.json").read_text())
    assert manifest["hyper"]["epsilon0"] == 1.0


def test_sweep_empty_grid():
    with pytest.raises(ConfigInvalid):
        SweepSpec(base=small_synthetic(), axis="seeds", values=())


def test_compare_aligned_runs(tmp_path):
    m = dataclasses.replace(preset("logreg", seed=5), iterations=10)
    for opt in ("adam", "amsgrad", "cadam"):
        run(dataclasses.replace(m, optimizer=opt), tmp_path / opt)
    report = compare([tmp_path / o for o in ("adam", "amsgrad", "cadam")], tmp_path / "cmp")
    lines = (tmp_path / "cmp/comparison.csv").read_text().strip().split("\n")
    assert lines[0] == "t,loss_adam,loss_amsgrad,loss_cadam"
    assert len(lines) - 1 == 10
    assert set(report["finals"]) == {"adam", "amsgrad", "cadam"}


def test_compare_rejects_mixed_experiments(tmp_path):
    run(small_synthetic(iterations=2000), tmp_path / "a")
    m = dataclasses.replace(preset("logreg"), iterations=5)
    run(m, tmp_path / "b")
    with pytest.raises(IncompatibleRuns):
        compare([tmp_path / "a", tmp_path / "b"], tmp_path / "cmp")


def test_compare_run_with_itself_zero_deltas(tmp_path):
    run(small_synthetic(iterations=2000), tmp_path / "a")
    report = compare([tmp_path / "a", tmp_path / "a"], tmp_path / "cmp")
    for deltas in report["deltas"].values():
        assert all(v == 0.0 for v in deltas.values())


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_run_and_exit_codes(tmp_path, capsys):
    code = main(["run", "--experiment", "synthetic", "--optimizer", "cadam",
                 "--seed", "3", "--iterations", "5000", "--out", str(tmp_path / "r")])
    assert code == 0
    assert (tmp_path / "r/trace.csv").exists()
    out = capsys.readouterr().out
    assert "final_x" in out


def test_cli_config_error_exit_code(tmp_path, capsys):
    code = main(["run", "--experiment", "synthetic", "--optimizer", "nope",
                 "--out", str(tmp_path / "r")])
    assert code == 1


def test_cli_check_pass(capsys):
    assert main(["check", "--steps", "30", "--dim", "50"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_compare_runtime_error(tmp_path, capsys):
    code = main(["compare", str(tmp_path / "missing1"), str(tmp_path / "missing2"),
                 "--out", str(tmp_path / "cmp")])
    assert code == 2


def test_config_file_layering(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nseed = 11\nalpha0 = 0.25\nbeta2=0.98\n")
    parsed = read_config(cfg)
    assert parsed == {"seed": "11", "alpha0": "0.25", "beta2": "0.98"}
    settings = {"experiment": "synthetic", **parsed, "seed": 99}  # flag wins
    m = build_manifest(settings)
    assert m.seed == 99
    assert m.hyper.alpha0 == 0.25
    assert m.hyper.beta2 == 0.98


def test_config_unknown_key():
    with pytest.raises(ConfigInvalid, match="warp_speed"):
        build_manifest({"experiment": "synthetic", "warp_speed": "9"})


def test_cli_sweep(tmp_path):
    code = main(["sweep", "--experiment", "synthetic", "--optimizer", "cadam",
                 "--iterations", "4000", "--axis", "seeds", "--values", "1,2",
                 "--out", str(tmp_path / "sw")])
    assert code == 0
    rows = json.loads((tmp_path / "sw/sweep.json").read_text())
    assert len(rows) == 2
