"""
Command-line entry point.

Subcommands: ``ingest``, ``train``, ``sweep``, ``eval`` and ``audit``.
Structured results are printed to stdout as JSON; diagnostics go to the log.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from quantum_classifier import complexity, dataset
from quantum_classifier.circuit import CircuitShape
from quantum_classifier.classifier import confusion_matrix, evaluate_accuracy
from quantum_classifier.config import load_train_config
from quantum_classifier.errors import ConfigError, QuantumClassifierError
from quantum_classifier.logging_setup import configure_logging
from quantum_classifier.trainer import load_checkpoint, sweep_repetitions, train

logger = logging.getLogger(__name__)

TRAIN_CSV = "train.csv"
TEST_CSV = "test.csv"
EXIT_OK = 0
EXIT_ERROR = 2


def _int_list(text):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quantum-classifier",
        description="Multi-class parallel quantum classifier on a statevector simulator",
    )
    parser.add_argument("--log-level", default="INFO", help="logging level (default INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="extract features from MNIST IDX files")
    ingest.add_argument("--images", required=True, help="IDX image file path or URL (gzip accepted)")
    ingest.add_argument("--labels", required=True, help="IDX label file path or URL (gzip accepted)")
    ingest.add_argument("--classes", required=True, type=_int_list, help="digits to keep, e.g. 1,7")
    ingest.add_argument("--train", type=int, required=True, help="training samples per class")
    ingest.add_argument("--test", type=int, required=True, help="test samples per class")
    ingest.add_argument("--seed", type=int, default=0)
    ingest.add_argument("--out", required=True, type=Path, help="output directory for feature CSVs")

    train_cmd = sub.add_parser("train", help="train from a config file")
    train_cmd.add_argument("--config", required=True, type=Path)
    train_cmd.add_argument("--out", required=True, type=Path)
    train_cmd.add_argument("--resume", action="store_true", help="continue from checkpoint_latest.json")

    sweep = sub.add_parser("sweep", help="train once per repetition count")
    sweep.add_argument("--config", required=True, type=Path)
    sweep.add_argument("--out", required=True, type=Path)
    sweep.add_argument("--m", type=_int_list, default=[1, 2, 3], help="repetition counts, e.g. 1,2,3")

    evaluate = sub.add_parser("eval", help="evaluate a checkpoint on held-out features")
    evaluate.add_argument("--checkpoint", required=True, type=Path)
    evaluate.add_argument("--test", required=True, type=Path, help="feature CSV or a directory holding test.csv")
    evaluate.add_argument("--shots", type=int, default=None, help="decode from sampled shots instead of exact probabilities")
    evaluate.add_argument("--seed", type=int, default=0)

    audit = sub.add_parser("audit", help="gate and qubit resource report")
    audit.add_argument("--L", dest="num_classes", type=int, required=True)
    audit.add_argument("--k", type=int, required=True)
    audit.add_argument("--m", type=int, required=True)
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--skip-check", action="store_true", help="skip the unitary equivalence check")

    return parser


def _emit(payload):
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _load_split(config):
    for key in ("train_data", "test_data"):
        path = getattr(config, key)
        if path is None:
            raise ConfigError(f"Config needs a '{key}' path")
        if not Path(path).exists():
            raise ConfigError(f"Dataset path does not exist: {path}")

    train_groups = dataset.pool_by_class(dataset.read_feature_csv(config.train_data), config.classes)
    test_groups = dataset.pool_by_class(
        dataset.read_feature_csv(config.test_data), config.classes, config.test_per_class or None
    )
    return dataset.ClassSplit(config.classes, train_groups, test_groups)


def cmd_ingest(args):
    images = dataset.fetch_idx_bytes(args.images)
    labels = dataset.fetch_idx_bytes(args.labels)
    pool = dataset.SamplePool.from_idx(images, labels)
    train_idx, test_idx = dataset.select_indices(pool, args.classes, args.train, args.test, args.seed)

    train_rows = np.concatenate([train_idx[label] for label in args.classes])
    test_rows = np.concatenate([test_idx[label] for label in args.classes])
    dataset.write_feature_csv(pool.subset(train_rows), args.out / TRAIN_CSV)
    dataset.write_feature_csv(pool.subset(test_rows), args.out / TEST_CSV)
    logger.info("Wrote %d train and %d test rows to %s", len(train_rows), len(test_rows), args.out)
    _emit({"train": str(args.out / TRAIN_CSV), "test": str(args.out / TEST_CSV),
           "train_rows": int(len(train_rows)), "test_rows": int(len(test_rows))})
    return EXIT_OK


def cmd_train(args):
    config = load_train_config(args.config)
    split = _load_split(config)
    _, rows = train(config, split, out_dir=args.out, resume=args.resume)
    last = rows[-1]
    _emit({"iterations": last.iteration, "cost": last.cost, "train_acc": last.train_acc,
           "test_acc": last.test_acc, "out": str(args.out)})
    return EXIT_OK


def cmd_sweep(args):
    config = load_train_config(args.config)
    split = _load_split(config)
    results = sweep_repetitions(config, split, args.m, out_dir=args.out)
    _emit({
        f"m{m}": {"iterations": rows[-1].iteration, "cost": rows[-1].cost, "test_acc": rows[-1].test_acc}
        for m, rows in results.items()
    })
    return EXIT_OK


def cmd_eval(args):
    checkpoint = load_checkpoint(args.checkpoint)
    test_path = args.test / TEST_CSV if args.test.is_dir() else args.test
    pool = dataset.read_feature_csv(test_path)
    groups = dataset.pool_by_class(pool, checkpoint.classes)
    samples = [s for group in groups for s in group]

    table = confusion_matrix(checkpoint.shape, checkpoint.params, samples, args.shots, args.seed)
    accuracy = evaluate_accuracy(checkpoint.shape, checkpoint.params, samples, args.shots, args.seed)
    _emit({
        "checkpoint": str(args.checkpoint),
        "iteration": checkpoint.iteration,
        "classes": list(checkpoint.classes),
        "samples": len(samples),
        "accuracy": accuracy,
        "confusion": {
            "rows": "true class",
            "columns": "predicted class",
            "counts": table.tolist(),
        },
    })
    return EXIT_OK


def cmd_audit(args):
    shape = CircuitShape(args.num_classes, args.m, args.k)
    check = False if args.skip_check else None
    report = complexity.audit(shape, args.k, seed=args.seed, check_equivalence=check)
    _emit(report.to_dict())
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "audit": cmd_audit,
}


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    try:
        configure_logging(args.log_level)
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR

    try:
        return COMMANDS[args.command](args)
    except QuantumClassifierError as e:
        logger.error("%s failed: %s", args.command, e)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
