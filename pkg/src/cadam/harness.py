"""Experiment orchestration: presets, deterministic runs, sweeps, comparisons.

A run is fully described by a :class:`RunManifest`; identical manifests
produce byte-identical trace files.  Outputs per run directory:

* ``trace.csv``     -- fixed header
  ``t,loss,avg_regret,x0,psi_min,lambda_min,lambda_max,grad_inf,lr_eff_min,lr_eff_max``;
  columns that do not apply to a variant/experiment stay empty.
* ``manifest.json`` -- the resolved configuration, PRNG and init recipe.
* ``summary.json``  -- final metrics plus diagnostic minima.
* ``val_trace.csv`` -- per-iteration validation loss/accuracy (classification).
* ``points.csv``    -- the 2-D dataset with labels (noisy2d only).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    Dataset,
    batches,
    gen_noisy_2d,
    load_idx,
    stratified_split,
    synthetic_digits,
)
from .diagnostics import (
    RunHistory,
    StepTrace,
    regret_bound_rhs,
    second_moment_view,
)
from .errors import CadamError, ConfigInvalid, IncompatibleRuns
from .models import ModelSpec, ParamVector, accuracy, decision_boundary, init_params, loss_and_grad
from .oco import LinearLossProblem, average_regret, run_oco
from .optim import Hyperparams, Variant, init_state, step
from .projection import FeasibleBox, project

EXPERIMENTS = ("synthetic", "synthetic-det", "noisy2d", "logreg", "mlp")

CSV_HEADER = "t,loss,avg_regret,x0,psi_min,lambda_min,lambda_max,grad_inf,lr_eff_min,lr_eff_max"

PRNG_FAMILY = "numpy PCG64 (default_rng); per-purpose streams via SeedSequence.spawn"
INIT_RECIPE = "weights ~ U(-1,1)/sqrt(fan_in), biases 0"


@dataclass(frozen=True)
class RunManifest:
    experiment: str
    optimizer: str
    hyper: Hyperparams
    seed: int
    iterations: int
    batch_size: int = 1
    trace_stride: int = 1
    theorem_check: bool = False
    dataset: dict = field(default_factory=dict)
    code_version: str = __version__

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(f"experiment: unknown value {self.experiment!r}")
        try:
            Variant(self.optimizer)
        except ValueError:
            raise ConfigInvalid(f"optimizer: unknown value {self.optimizer!r}") from None
        if self.iterations < 1:
            raise ConfigInvalid("iterations must be >= 1")
        if self.batch_size < 1:
            raise ConfigInvalid("batch_size must be >= 1")
        if self.trace_stride < 1:
            raise ConfigInvalid("trace_stride must be >= 1")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["prng"] = PRNG_FAMILY
        d["init"] = INIT_RECIPE
        return d


def preset(experiment: str, optimizer: str = "cadam", seed: int = 7) -> RunManifest:
    """Named presets for every experiment row in scope."""
    synth_h = Hyperparams(alpha0=0.5, alpha_schedule="inv_sqrt", beta1=0.9,
                          beta2=0.99, epsilon=1e-8)
    logistic_h = Hyperparams(alpha0=1e-3, alpha_schedule="constant", beta1=0.9,
                             beta2=0.999, epsilon=1e-12)
    if experiment == "synthetic":
        return RunManifest("synthetic", optimizer, synth_h, seed,
                           iterations=5_000_000, batch_size=1, trace_stride=1000,
                           dataset={"source": "linear", "mode": "stochastic", "p": 0.01})
    if experiment == "synthetic-det":
        return RunManifest("synthetic-det", optimizer, synth_h, seed,
                           iterations=5_000_000, batch_size=1, trace_stride=1000,
                           dataset={"source": "linear", "mode": "deterministic", "period": 101})
    if experiment == "noisy2d":
        # the boundary experiment has no published iteration budget; 800
        # batches of the logistic row clears the noise-floor neighbourhood
        # while the optimizers are still distinguishable
        return RunManifest("noisy2d", optimizer, logistic_h, seed,
                           iterations=800, batch_size=128,
                           dataset={"source": "noisy2d", "n": 10_000, "flip": 0.10,
                                    "train_fraction": 0.8, "l2": 1e-4})
    if experiment == "logreg":
        return RunManifest("logreg", optimizer, logistic_h, seed,
                           iterations=200, batch_size=128,
                           dataset={"source": "synthetic-digits", "n_pool": 2500,
                                    "n_train": 2000, "n_val": 500, "l2": 1e-4})
    if experiment == "mlp":
        return RunManifest("mlp", optimizer, logistic_h, seed,
                           iterations=500, batch_size=128,
                           dataset={"source": "synthetic-digits", "n_pool": 2500,
                                    "n_train": 2000, "n_val": 500, "l2": 1e-4,
                                    "hidden": 100})
    raise ConfigInvalid(f"experiment: unknown value {experiment!r}")


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def _trace_csv_lines(rows: list[StepTrace]) -> list[str]:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            str(r.t), _fmt(r.loss), _fmt(r.avg_regret), _fmt(r.x0), _fmt(r.psi_min),
            _fmt(r.lambda_min), _fmt(r.lambda_max), _fmt(r.grad_norm_inf),
            _fmt(r.lr_eff_min), _fmt(r.lr_eff_max)]))
    return lines


def _write_text(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass
class RunResult:
    manifest: RunManifest
    out_dir: Path
    summary: dict
    trace: list[StepTrace]


def _run_synthetic(manifest: RunManifest) -> tuple[list[StepTrace], dict]:
    ds = manifest.dataset
    if manifest.experiment == "synthetic-det":
        prob = LinearLossProblem(mode="deterministic", period=int(ds.get("period", 101)))
    else:
        prob = LinearLossProblem(mode="stochastic", p=float(ds.get("p", 0.01)),
                                 seed=manifest.seed)
    res = run_oco(prob, manifest.optimizer, manifest.hyper, manifest.iterations,
                  stride=manifest.trace_stride, collect_history=manifest.theorem_check)
    summary = {
        "experiment": manifest.experiment,
        "optimizer": manifest.optimizer,
        "seed": manifest.seed,
        "iterations": manifest.iterations,
        "final_x": res.final_x,
        "final_loss": res.trace[-1].loss if res.trace else None,
        "avg_regret": average_regret(res.tracker),
        "cumulative_loss": res.tracker.cumulative_loss,
        "psi_min": res.psi_min,
        "moment_bound_margin_min": res.moment_margin_min,
        "settle_iteration": res.settle_iteration,
        "lambda_max_strict": res.lambda_max_strict,
        "case1_fraction": res.case1_fraction,
    }
    if manifest.theorem_check:
        report = regret_bound_rhs(res.history, manifest.hyper, prob.box,
                                  realized_regret=res.tracker.regret)
        summary["bound_report"] = report.to_dict()
        summary["bound_holds"] = res.tracker.regret <= report.rhs
    return res.trace, summary


def _build_classification_data(manifest: RunManifest, data_seed: int):
    ds = manifest.dataset
    source = ds.get("source")
    if manifest.experiment == "noisy2d":
        full, true_boundary = gen_noisy_2d(int(ds.get("n", 10_000)),
                                           float(ds.get("flip", 0.10)), seed=data_seed)
        n_train = int(round(full.n * float(ds.get("train_fraction", 0.8))))
        perm = np.random.default_rng(data_seed + 1).permutation(full.n)
        train = full.take(perm[:n_train])
        val = full.take(perm[n_train:])
        spec = ModelSpec.linear2d(l2=float(ds.get("l2", 0.0)))
        return train, val, spec, {"true_boundary": true_boundary, "full": full}
    if source == "idx":
        full = load_idx(ds["images"], ds["labels"])
    elif source == "synthetic-digits":
        full = synthetic_digits(int(ds.get("n_pool", 2500)), seed=data_seed)
    else:
        raise ConfigInvalid(f"dataset.source: unknown value {source!r}")
    train, val = stratified_split(full, int(ds.get("n_train", 2000)),
                                  int(ds.get("n_val", 500)), seed=data_seed + 1)
    l2 = float(ds.get("l2", 0.0))
    if manifest.experiment == "mlp":
        spec = ModelSpec.mlp(train.n_features, train.n_classes,
                             n_hidden=int(ds.get("hidden", 100)), l2=l2)
    else:
        spec = ModelSpec.softmax(train.n_features, train.n_classes, l2=l2)
    return train, val, spec, {}


def _run_classification(manifest: RunManifest) -> tuple[list[StepTrace], dict, dict]:
    seeds = np.random.SeedSequence(manifest.seed).spawn(3)
    data_seed = int(seeds[0].generate_state(1)[0])
    init_seed = int(seeds[1].generate_state(1)[0])
    epoch_rng = np.random.default_rng(seeds[2])

    train, val, spec, extras = _build_classification_data(manifest, data_seed)
    if manifest.batch_size > train.n:
        raise ConfigInvalid(f"batch_size {manifest.batch_size} > train size {train.n}")
    params = init_params(spec, seed=init_seed)
    variant = Variant(manifest.optimizer)
    state = init_state(variant, params.flat)
    h = manifest.hyper
    box = FeasibleBox.unbounded()
    eval_spec = dataclasses.replace(spec, l2=0.0)

    initial_train_loss, _ = loss_and_grad(spec, params, (train.features, train.labels))
    trace: list[StepTrace] = []
    val_rows: list[str] = ["t,val_loss,val_accuracy"]
    psi_min_run = math.inf
    prev_scaled: np.ndarray | None = None
    batch_iter: list = []
    t = 0
    while t < manifest.iterations:
        if not batch_iter:
            batch_iter = batches(train, manifest.batch_size,
                                 int(epoch_rng.integers(2 ** 63)))
        batch = batch_iter.pop(0)
        t += 1
        pv = ParamVector(state.x, spec)
        loss, grad = loss_and_grad(spec, pv, batch.arrays())
        state, out = step(state, h, grad)
        state.x = project(out.proposed_x, np.zeros_like(out.proposed_x), box)

        psi = None
        if variant is not Variant.SGD:
            scaled = np.sqrt(second_moment_view(state)) / h.alpha_at(t)
            base = prev_scaled if prev_scaled is not None else np.zeros_like(scaled)
            psi = float(np.min(scaled - base))
            prev_scaled = scaled
            psi_min_run = min(psi_min_run, psi)

        lam_min = lam_max = None
        case_tag = None
        if out.lam is not None:
            lam_min = float(np.min(out.lam))
            lam_max = float(np.max(out.lam))
            ones = out.lam == 1.0
            case_tag = "case1" if bool(np.all(ones)) else (
                "case2" if not bool(np.any(ones)) else "mixed")

        if t % manifest.trace_stride == 0 or t == manifest.iterations:
            trace.append(StepTrace(
                t=t, loss=loss, grad_norm_inf=float(np.max(np.abs(grad))),
                lr_eff_min=float(np.min(out.effective_lr)),
                lr_eff_max=float(np.max(out.effective_lr)),
                x0=float(state.x[0]), psi_min=psi,
                lambda_min=lam_min, lambda_max=lam_max,
                m_norm_inf=float(np.max(np.abs(state.m))),
                v_norm_inf=float(np.max(np.abs(state.v))),
                vaux_norm_inf=float(np.max(np.abs(state.v_aux))),
                case_tag=case_tag))
        pv = ParamVector(state.x, spec)
        val_loss, _ = loss_and_grad(eval_spec, pv, (val.features, val.labels))
        val_acc = accuracy(spec, pv, val)
        val_rows.append(f"{t},{_fmt(val_loss)},{_fmt(val_acc)}")

    pv = ParamVector(state.x, spec)
    final_train_loss, _ = loss_and_grad(spec, pv, (train.features, train.labels))
    final_val_loss, _ = loss_and_grad(eval_spec, pv, (val.features, val.labels))
    summary = {
        "experiment": manifest.experiment,
        "optimizer": manifest.optimizer,
        "seed": manifest.seed,
        "iterations": manifest.iterations,
        "initial_train_loss": initial_train_loss,
        "final_train_loss": final_train_loss,
        "final_val_loss": final_val_loss,
        "final_train_accuracy": accuracy(spec, pv, train),
        "final_val_accuracy": accuracy(spec, pv, val),
        "psi_min": psi_min_run if psi_min_run < math.inf else None,
        "moment_bound_margin_min": None,
        "final_loss": trace[-1].loss if trace else None,
    }
    files = {"val_rows": val_rows}
    if manifest.experiment == "noisy2d":
        w1, w2, b = decision_boundary(spec, pv)
        summary["true_boundary"] = list(extras["true_boundary"])
        summary["learned_boundary"] = [w1, w2, b]
        full = extras["full"]
        pts = ["x1,x2,label"]
        for i in range(full.n):
            pts.append(f"{_fmt(full.features[i, 0])},{_fmt(full.features[i, 1])},{full.labels[i]}")
        files["points"] = pts
    return trace, summary, files


def run(manifest: RunManifest, out_dir) -> RunResult:
    """Execute one manifest; writes trace.csv, manifest.json and summary.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if manifest.experiment in ("synthetic", "synthetic-det"):
        trace, summary = _run_synthetic(manifest)
        files = {}
    else:
        if manifest.theorem_check:
            raise ConfigInvalid("theorem_check: needs a bounded box; "
                                "only the synthetic experiments qualify")
        trace, summary, files = _run_classification(manifest)
    _write_text(out / "trace.csv", _trace_csv_lines(trace))
    _write_json(out / "manifest.json", manifest.to_dict())
    _write_json(out / "summary.json", summary)
    if "val_rows" in files:
        _write_text(out / "val_trace.csv", files["val_rows"])
    if "points" in files:
        _write_text(out / "points.csv", files["points"])
    return RunResult(manifest=manifest, out_dir=out, summary=summary, trace=trace)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

SWEEP_AXES = ("seeds", "epsilon0", "alpha0")


@dataclass(frozen=True)
class SweepSpec:
    base: RunManifest
    axis: str
    values: tuple

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigInvalid(f"axis: unknown value {self.axis!r}")
        if len(self.values) == 0:
            raise ConfigInvalid("values: sweep grid must be nonempty")

    def manifests(self) -> list[RunManifest]:
        out = []
        for v in self.values:
            if self.axis == "seeds":
                out.append(replace(self.base, seed=int(v)))
            elif self.axis == "epsilon0":
                out.append(replace(self.base,
                                   hyper=replace(self.base.hyper, epsilon0=float(v))))
            else:
                out.append(replace(self.base,
                                   hyper=replace(self.base.hyper, alpha0=float(v))))
        return out


def sweep(spec: SweepSpec, out_dir) -> list[dict]:
    """One run per grid point, in grid order; returns the summary rows."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, m in enumerate(spec.manifests()):
        label = f"{spec.axis[:-1] if spec.axis == 'seeds' else spec.axis}_{spec.values[i]}"
        result = run(m, out / f"point_{i:02d}_{label}")
        row = {"index": i, "axis": spec.axis, "value": spec.values[i]}
        row.update(result.summary)
        rows.append(row)
    _write_json(out / "sweep.json", rows)
    keys = sorted({k for r in rows for k in r if not isinstance(r[k], (dict, list))})
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join("" if r.get(k) is None else str(r.get(k, "")) for k in keys))
    _write_text(out / "sweep.csv", lines)
    return rows


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------

def _load_run(run_dir: Path) -> tuple[dict, dict, list[dict]]:
    manifest = json.loads((run_dir / "manifest.json").read_text())
    summary = json.loads((run_dir / "summary.json").read_text())
    lines = (run_dir / "trace.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    return manifest, summary, rows


def compare(run_dirs, out_dir) -> dict:
    """Align per-iteration losses of >= 2 completed runs of one experiment."""
    dirs = [Path(d) for d in run_dirs]
    if len(dirs) < 2:
        raise IncompatibleRuns("need at least two runs to compare")
    loaded = [_load_run(d) for d in dirs]
    experiments = {m["experiment"] for m, _, _ in loaded}
    if len(experiments) != 1:
        raise IncompatibleRuns(f"experiments differ: {sorted(experiments)}")
    t_columns = [[r["t"] for r in rows] for _, _, rows in loaded]
    if any(tc != t_columns[0] for tc in t_columns[1:]):
        raise IncompatibleRuns("trace iteration grids differ")

    names = []
    for m, _, _ in loaded:
        base = m["optimizer"]
        name = base
        k = 2
        while name in names:
            name = f"{base}_{k}"
            k += 1
        names.append(name)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["t," + ",".join(f"loss_{n}" for n in names)]
    for i, t in enumerate(t_columns[0]):
        lines.append(t + "," + ",".join(rows[i]["loss"] for _, _, rows in loaded))
    _write_text(out / "comparison.csv", lines)

    finals = {}
    metric_keys = ("final_loss", "final_x", "avg_regret", "final_train_loss",
                   "final_val_loss", "final_val_accuracy")
    for name, (_, summary, _) in zip(names, loaded):
        finals[name] = {k: summary.get(k) for k in metric_keys if summary.get(k) is not None}
    deltas = {}
    base_name = names[0]
    for name in names[1:]:
        deltas[f"{name}_minus_{base_name}"] = {
            k: finals[name][k] - finals[base_name][k]
            for k in finals[name] if k in finals[base_name]}
    report = {"experiment": loaded[0][0]["experiment"], "runs": names,
              "finals": finals, "deltas": deltas}
    _write_json(out / "comparison.json", report)
    return report
