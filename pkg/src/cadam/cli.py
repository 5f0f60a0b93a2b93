"""Command-line entry points: run, sweep, compare, check.

Configuration resolves in three layers: experiment preset, then a flat
``key=value`` config file, then CLI flags (flags win).  The fully resolved
configuration is echoed into the run's manifest.json.

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 invariant/acceptance check failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .diagnostics import run_invariant_sweep
from .errors import CadamError, ConfigInvalid, DatasetMissing
from .harness import EXPERIMENTS, RunManifest, SweepSpec, compare, preset, run, sweep
from .optim import Hyperparams

_HYPER_KEYS = {
    "alpha0": float, "alpha_schedule": str, "beta1": float, "beta1_schedule": str,
    "beta1_decay": float, "beta2": float, "epsilon": float, "epsilon0": float,
    "decay_base": str,
}
_MANIFEST_KEYS = {
    "experiment": str, "optimizer": str, "seed": int, "iterations": int,
    "batch_size": int, "trace_stride": int, "theorem_check": bool,
}
_DATASET_KEYS = {
    "mnist_images": str, "mnist_labels": str, "synthetic_digits": bool,
    "n_pool": int, "n_train": int, "n_val": int, "n_points": int,
    "flip": float, "l2": float, "hidden": int, "period": int, "p": float,
}


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigInvalid(f"expected a boolean, got {s!r}")


def read_config(path) -> dict:
    """Flat key=value lines; '#' starts a comment; later keys win."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def _coerce(key: str, value):
    for table in (_MANIFEST_KEYS, _HYPER_KEYS, _DATASET_KEYS):
        if key in table:
            kind = table[key]
            if isinstance(value, str):
                return _parse_bool(value) if kind is bool else kind(value)
            return value
    raise ConfigInvalid(f"{key}: unknown configuration key")


def build_manifest(settings: dict) -> RunManifest:
    """Resolve preset -> config -> flag layers into one manifest."""
    experiment = settings.get("experiment")
    if experiment is None:
        raise ConfigInvalid("experiment: required")
    if experiment not in EXPERIMENTS:
        raise ConfigInvalid(f"experiment: unknown value {experiment!r}")
    manifest = preset(experiment, settings.get("optimizer", "cadam"))

    hyper_kwargs = dataclasses.asdict(manifest.hyper)
    manifest_kwargs: dict = {}
    dataset = dict(manifest.dataset)
    for key, value in settings.items():
        if value is None:
            continue
        value = _coerce(key, value)
        if key in _HYPER_KEYS:
            hyper_kwargs[key] = value
        elif key in ("experiment", "optimizer"):
            manifest_kwargs[key] = value
        elif key in _MANIFEST_KEYS:
            manifest_kwargs[key] = value
        elif key == "synthetic_digits":
            if value:
                dataset["source"] = "synthetic-digits"
        elif key == "mnist_images":
            dataset["source"] = "idx"
            dataset["images"] = value
        elif key == "mnist_labels":
            dataset["source"] = "idx"
            dataset["labels"] = value
        elif key == "n_points":
            dataset["n"] = value
        else:
            dataset[key] = value
    if dataset.get("source") == "idx" and not (dataset.get("images") and dataset.get("labels")):
        raise ConfigInvalid("mnist_images/mnist_labels: both paths are required")
    return dataclasses.replace(manifest, hyper=Hyperparams(**hyper_kwargs),
                               dataset=dataset, **manifest_kwargs)


def _collect_settings(args: argparse.Namespace) -> dict:
    settings: dict = {}
    if args.config:
        settings.update(read_config(args.config))
    for key in list(_MANIFEST_KEYS) + list(_HYPER_KEYS) + \
            ["mnist_images", "mnist_labels", "synthetic_digits", "n_points", "flip",
             "n_pool", "n_train", "n_val", "l2", "hidden"]:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            settings[key] = flag
    return settings


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--optimizer")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int)
    p.add_argument("--trace-stride", dest="trace_stride", type=int)
    p.add_argument("--theorem-check", dest="theorem_check", action="store_true", default=False)
    p.add_argument("--synthetic-digits", dest="synthetic_digits", action="store_true", default=False)
    p.add_argument("--mnist-images", dest="mnist_images")
    p.add_argument("--mnist-labels", dest="mnist_labels")
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--flip", type=float)
    p.add_argument("--n-pool", dest="n_pool", type=int)
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-val", dest="n_val", type=int)
    p.add_argument("--l2", type=float)
    p.add_argument("--hidden", type=int)
    for key, kind in _HYPER_KEYS.items():
        p.add_argument(f"--{key.replace('_', '-')}", dest=key,
                       type=kind if kind is not str else None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cadam",
                                     description="adaptive-optimizer experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment")
    _add_run_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run a grid over seeds/epsilon0/alpha0")
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--axis", choices=("seeds", "epsilon0", "alpha0"), required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated grid values")

    p_cmp = sub.add_parser("compare", help="align finished runs side by side")
    p_cmp.add_argument("runs", nargs="+", help="run directories")
    p_cmp.add_argument("--out", required=True)

    p_check = sub.add_parser("check", help="randomized invariant sweep")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--steps", type=int, default=400)
    p_check.add_argument("--dim", type=int, default=1000)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            manifest = build_manifest(_collect_settings(args))
            result = run(manifest, args.out)
            for key, value in sorted(result.summary.items()):
                if not isinstance(value, (dict, list)):
                    print(f"{key}: {value}")
            print(f"outputs: {result.out_dir}")
        elif args.command == "sweep":
            manifest = build_manifest(_collect_settings(args))
            values = tuple(v.strip() for v in args.values.split(",") if v.strip())
            if not values:
                raise ConfigInvalid("values: sweep grid must be nonempty")
            rows = sweep(SweepSpec(base=manifest, axis=args.axis, values=values), args.out)
            for row in rows:
                brief = {k: row[k] for k in ("axis", "value", "final_x", "avg_regret",
                                             "final_train_loss", "settle_iteration")
                         if row.get(k) is not None}
                print(brief)
        elif args.command == "compare":
            report = compare(args.runs, args.out)
            print(f"experiment: {report['experiment']}")
            for name, metrics in report["finals"].items():
                print(f"{name}: {metrics}")
        elif args.command == "check":
            report = run_invariant_sweep(seed=args.seed, dim=args.dim, steps=args.steps)
            print(f"coordinate-steps checked: {report.steps_checked}")
            print(f"psi_min:                  {report.psi_min:.3e} (>= -1e-12 required)")
            print(f"moment bound margin min:  {report.moment_margin_min:.3e} (>= -1e-12 required)")
            print(f"lambda in [0,1]:          {report.lambda_range_ok}")
            print(f"sandwich holds:           {report.sandwich_ok}")
            print(f"domination holds:         {report.domination_ok}")
            if not report.passed:
                print("FAIL")
                return 3
            print("PASS")
    except (ConfigInvalid, DatasetMissing) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (CadamError, OSError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
