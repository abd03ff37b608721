"""Command-line front end: generate, train, eval, compare, simulate.

Every command is deterministic given its flags. Exit codes: 0 success,
2 usage/config error, 3 data/schema error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .baselines import FEATURE_MAPS, dummy_train, logreg_train, svm_train
from .channelsim import ScenarioConfig, gen_dataset
from .dataset import (
    DEFAULT_FEATURE_NAMES,
    CsvFormatError,
    Dataset,
    LabelRule,
    SchemaError,
    labels_array,
    read_csv,
    split,
    write_csv,
)
from .metrics import EvalReport, compare, report, write_curve_csv, write_curves_svg, write_reports_csv
from .mlp import PRESETS, TrainConfig, preset_architecture, preset_learning_rate, train
from .modelio import load_model, save_model
from .relay import group_candidates, handover_sim, selection_accuracy, write_trace_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4

DEFAULT_SEED = 42
SEED_ENV_VAR = "RELAYLEARN_SEED"

MODEL_CHOICES = (*sorted(PRESETS), "logreg", "dummy", "svm")


class UsageError(ValueError):
    """Invalid flags or configuration (exit code 2)."""


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _require_input(path: str) -> None:
    if not os.path.isfile(path):
        raise UsageError(f"input file does not exist: {path}")


def _require_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise UsageError(f"output path is not writable: {path}")


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True))
        fh.write("\n")


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def _scenario_from_args(args) -> ScenarioConfig:
    base: dict = {}
    if args.config is not None:
        _require_input(args.config)
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: not valid scenario JSON: {exc}") from None
        if not isinstance(base, dict):
            raise UsageError(f"{args.config}: scenario JSON must be an object")
    fi = dict(base.pop("fi", {}))
    overrides = {
        "d_min": args.d_min,
        "d_max": args.d_max,
        "freq_ghz": args.freq_ghz,
        "bandwidth_mhz": args.bandwidth_mhz,
        "tx_power_dbm": args.tx_power_dbm,
        "n_samples": args.n,
        "n_candidates": args.n_candidates,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    for key, value in (("alpha", args.alpha), ("beta", args.beta), ("sigma", args.sigma)):
        if value is not None:
            fi[key] = value
    base["seed"] = _resolve_seed(args.seed)
    if fi:
        base["fi"] = fi
    try:
        return ScenarioConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid scenario config: {exc}") from None


def cmd_generate(args) -> int:
    cfg = _scenario_from_args(args)
    rule = LabelRule(args.threshold_db)
    _require_writable(args.out)
    samples = gen_dataset(cfg, rule)
    write_csv(Dataset(samples), args.out)
    strong = sum(s.label for s in samples)
    weak = len(samples) - strong
    print(f"wrote {len(samples)} samples to {args.out}")
    print(f"label balance: {strong} strong / {weak} weak ({strong / len(samples):.3f} strong)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _loss_csv_path(model_path: str) -> str:
    stem, _ = os.path.splitext(model_path)
    return stem + ".loss.csv"


def _write_loss_csv(model, path: str) -> None:
    history = getattr(model, "loss_history", [])
    val_history = getattr(model, "val_loss_history", None)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if val_history:
            fh.write("epoch,loss,val_loss\n")
            for i, (a, b) in enumerate(zip(history, val_history), start=1):
                fh.write(f"{i},{a!r},{b!r}\n")
        else:
            fh.write("epoch,loss\n")
            for i, value in enumerate(history, start=1):
                fh.write(f"{i},{value!r}\n")


def cmd_train(args) -> int:
    seed = _resolve_seed(args.seed)
    _require_input(args.data)
    _require_writable(args.out)
    loss_csv = args.loss_csv or _loss_csv_path(args.out)
    _require_writable(loss_csv)
    if args.features is None:
        features = DEFAULT_FEATURE_NAMES
    else:
        features = tuple(name.strip() for name in args.features.split(",") if name.strip())
        if not features:
            raise UsageError("--features must name at least one column")

    digest = _sha256_file(args.data)
    ds = read_csv(args.data, feature_names=features)
    train_ds, _ = split(ds, args.train_fraction, seed)
    y = labels_array(train_ds)
    if len(set(y.tolist())) < 2:
        raise SchemaError("training split contains a single class; cannot fit a classifier")

    name = args.model
    if name in PRESETS:
        cfg = TrainConfig(
            learning_rate=args.learning_rate if args.learning_rate is not None else preset_learning_rate(name),
            max_epochs=args.max_epochs if args.max_epochs is not None else 300,
            batch_size=args.batch_size,
            tol=args.tol if args.tol is not None else 1e-4,
            n_iter_no_change=args.n_iter_no_change,
            seed=seed,
        )
        model = train(preset_architecture(name, len(features)), cfg, train_ds)
    elif name == "logreg":
        model = logreg_train(
            train_ds,
            learning_rate=args.learning_rate if args.learning_rate is not None else 0.1,
            max_epochs=args.max_epochs if args.max_epochs is not None else 1000,
            tol=args.tol if args.tol is not None else 1e-7,
            seed=seed,
        )
    elif name == "dummy":
        model = dummy_train(train_ds)
    else:  # svm
        model = svm_train(
            train_ds,
            C=args.svm_c,
            learning_rate=args.learning_rate if args.learning_rate is not None else 0.01,
            max_epochs=args.max_epochs if args.max_epochs is not None else 500,
            seed=seed,
            feature_map=args.feature_map,
        )

    split_meta = {
        "seed": seed,
        "train_fraction": args.train_fraction,
        "n_samples": len(ds),
        "dataset_sha256": digest,
    }
    save_model(model, args.out, name=name, split=split_meta)
    _write_loss_csv(model, loss_csv)
    history = getattr(model, "loss_history", [])
    final = f"{history[-1]:.6g}" if history else "n/a"
    print(f"model {name}: epochs_run={getattr(model, 'epochs_run', 0)} final_loss={final}")
    print(f"wrote {args.out} and {loss_csv}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval / compare
# ---------------------------------------------------------------------------


def _eval_part(doc: dict, ds: Dataset, data_path: str, split_choice: str) -> Dataset:
    meta = doc.get("split")
    if split_choice == "all" or (split_choice == "auto" and meta is None):
        return ds
    if meta is None:
        raise SchemaError("model records no split metadata; use --split all")
    if meta["dataset_sha256"] != _sha256_file(data_path):
        raise SchemaError(
            f"{data_path} does not match the dataset this model was trained on "
            "(fingerprint mismatch); pass the original file or use --split all"
        )
    train_part, test_part = split(ds, meta["train_fraction"], meta["seed"])
    return train_part if split_choice == "train" else test_part


def _evaluate_model(model_path: str, data_path: str, split_choice: str) -> EvalReport:
    model, doc = load_model(model_path)
    ds = read_csv(data_path)
    part = _eval_part(doc, ds, data_path, split_choice)
    scores = model.predict_score(part)
    preds = model.predict(part)
    labels = labels_array(part)
    name = doc.get("name") or doc["kind"]
    return report(name, scores, preds, labels)


def cmd_eval(args) -> int:
    _require_input(args.model_file)
    _require_input(args.data)
    _require_writable(args.out)
    if args.report_csv:
        _require_writable(args.report_csv)
    rep = _evaluate_model(args.model_file, args.data, args.split)
    _write_json(rep.to_dict(), args.out)
    print(
        f"{rep.model_name}: accuracy={rep.accuracy:.4f} precision={rep.precision:.4f} "
        f"recall={rep.recall:.4f} f1={rep.f1:.4f} roc_auc={rep.roc_auc:.4f}"
    )
    print(f"wrote {args.out}")
    if args.report_csv:
        write_reports_csv([rep], args.report_csv)
    curves_dir = args.curves_dir or (os.path.dirname(os.path.abspath(args.out)))
    os.makedirs(curves_dir, exist_ok=True)
    roc_path = os.path.join(curves_dir, f"{rep.model_name}_roc.csv")
    pr_path = os.path.join(curves_dir, f"{rep.model_name}_pr.csv")
    write_curve_csv(rep.roc_points, roc_path, "fpr", "tpr")
    write_curve_csv(rep.pr_points, pr_path, "recall", "precision")
    print(f"wrote {roc_path} and {pr_path}")
    if args.svg:
        write_curves_svg(
            [(rep.model_name, rep.roc_points)],
            os.path.join(curves_dir, f"{rep.model_name}_roc.svg"),
            "false positive rate",
            "true positive rate",
            "ROC",
        )
        write_curves_svg(
            [(rep.model_name, rep.pr_points)],
            os.path.join(curves_dir, f"{rep.model_name}_pr.svg"),
            "recall",
            "precision",
            "Precision-recall",
        )
    return EXIT_OK


def cmd_compare(args) -> int:
    for path in args.model_file:
        _require_input(path)
    _require_input(args.data)
    _require_writable(args.out)
    reports = [_evaluate_model(path, args.data, args.split) for path in args.model_file]
    ranked = compare(reports)
    write_reports_csv(ranked, args.out)
    for rank, rep in enumerate(ranked, start=1):
        print(f"{rank}. {rep.model_name}: accuracy={rep.accuracy:.4f} roc_auc={rep.roc_auc:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    _require_input(args.model_file)
    _require_input(args.data)
    _require_writable(args.trace)
    _require_writable(args.summary)
    model, _doc = load_model(args.model_file)
    ds = read_csv(args.data)
    sets = group_candidates(ds, args.n_candidates)
    rule = LabelRule(args.threshold_db)
    trace = handover_sim(model, sets, rule, args.hysteresis_db)
    accuracy = selection_accuracy(model, sets)
    write_trace_csv(trace, args.trace)
    summary = {
        "steps": len(trace.steps),
        "switch_count": trace.switch_count,
        "outage_fraction": trace.outage_fraction,
        "selection_accuracy": accuracy,
    }
    _write_json(summary, args.summary)
    print(
        f"steps={len(trace.steps)} switch_count={trace.switch_count} "
        f"outage_fraction={trace.outage_fraction:.4f} selection_accuracy={accuracy:.4f}"
    )
    print(f"wrote {args.trace} and {args.summary}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaylearn",
        description="Synthesize mmWave link datasets, train strong/weak-link "
        "classifiers, evaluate them, and simulate relay selection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize a link dataset CSV")
    gen.add_argument("--config", help="scenario JSON file (flags override its fields)")
    gen.add_argument("--n", "--n-samples", dest="n", type=int, help="number of samples")
    gen.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    gen.add_argument("--d-min", type=float, help="minimum distance, m")
    gen.add_argument("--d-max", type=float, help="maximum distance, m")
    gen.add_argument("--freq-ghz", type=float, help="carrier frequency, GHz")
    gen.add_argument("--bandwidth-mhz", type=float, help="bandwidth, MHz")
    gen.add_argument("--tx-power-dbm", type=float, help="transmit power, dBm")
    gen.add_argument("--n-candidates", type=int, help="links per selection instance")
    gen.add_argument("--alpha", type=float, help="floating intercept, dB")
    gen.add_argument("--beta", type=float, help="path-loss exponent slope")
    gen.add_argument("--sigma", type=float, help="shadow-fading stddev, dB")
    gen.add_argument("--threshold-db", type=float, default=120.0, help="labeling threshold, dB")
    gen.add_argument("-o", "--out", required=True, help="output dataset CSV")
    gen.set_defaults(func=cmd_generate)

    tr = sub.add_parser("train", help="train a classifier on a dataset CSV")
    tr.add_argument("--model", required=True, choices=MODEL_CHOICES)
    tr.add_argument("--data", required=True, help="dataset CSV")
    tr.add_argument("--seed", type=int, help=f"split/init seed (default ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    tr.add_argument("--train-fraction", type=float, default=0.75)
    tr.add_argument("--learning-rate", type=float, help="default: 0.05 (1e-5 for m1), 0.1 logreg, 0.01 svm")
    tr.add_argument("--max-epochs", type=int, help="default: 300 mlp, 1000 logreg, 500 svm")
    tr.add_argument("--batch-size", type=int, default=200)
    tr.add_argument("--tol", type=float, help="early-stopping tolerance (default 1e-4 mlp, 1e-7 logreg)")
    tr.add_argument("--n-iter-no-change", type=int, default=10)
    tr.add_argument("--svm-c", type=float, default=1.0, help="SVM hinge-loss weight")
    tr.add_argument("--feature-map", choices=FEATURE_MAPS, default="identity", help="SVM feature map")
    tr.add_argument("--features", help="comma-separated feature columns (default: standard six)")
    tr.add_argument("-o", "--out", required=True, help="output model JSON")
    tr.add_argument("--loss-csv", help="loss-history CSV (default: alongside the model JSON)")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a trained model")
    ev.add_argument("--model-file", required=True, help="model JSON")
    ev.add_argument("--data", required=True, help="dataset CSV")
    ev.add_argument(
        "--split",
        choices=("auto", "test", "train", "all"),
        default="auto",
        help="which part to evaluate on (auto: recorded held-out split if present)",
    )
    ev.add_argument("-o", "--out", required=True, help="output report JSON")
    ev.add_argument("--report-csv", help="also write a one-row metrics CSV")
    ev.add_argument(
        "--curves-dir",
        help="directory for ROC/PR curve CSVs (default: alongside the report JSON)",
    )
    ev.add_argument("--svg", action="store_true", help="also render curve SVGs")
    ev.set_defaults(func=cmd_eval)

    cp = sub.add_parser("compare", help="rank several models on one dataset")
    cp.add_argument("--model-file", action="append", required=True, help="model JSON (repeatable)")
    cp.add_argument("--data", required=True, help="dataset CSV")
    cp.add_argument("--split", choices=("auto", "test", "train", "all"), default="auto")
    cp.add_argument("-o", "--out", required=True, help="output ranked CSV")
    cp.set_defaults(func=cmd_compare)

    sim = sub.add_parser("simulate", help="run relay selection / handover along a trajectory")
    sim.add_argument("--model-file", required=True, help="model JSON")
    sim.add_argument("--data", required=True, help="trajectory dataset CSV (grouped by rows)")
    sim.add_argument("--n-candidates", type=int, default=4, help="links per candidate set")
    sim.add_argument("--threshold-db", type=float, default=120.0, help="outage threshold, dB")
    sim.add_argument("--hysteresis-db", type=float, default=0.0, help="switch hysteresis, dB of odds")
    sim.add_argument("-o", "--trace", required=True, help="output trace CSV")
    sim.add_argument("--summary", required=True, help="output summary JSON")
    sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CsvFormatError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
