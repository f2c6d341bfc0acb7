"""
Quantum-classical training loop: batching, Adam iterations, convergence
detection, per-iteration checkpoints and the metrics CSV.
"""

import json
import logging
import shutil
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from quantum_classifier.circuit import CircuitShape, check_parameters, random_parameters
from quantum_classifier.classifier import classify, evaluate_accuracy
from quantum_classifier.config import AdamConfig, format_train_config, thread_count
from quantum_classifier.errors import DataError, NumericError, QuantumClassifierError
from quantum_classifier.objective import AdamState, Batch, adam_step, cost, grad_fd

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
METRICS_FILE = "metrics.csv"
METRICS_COLUMNS = ["iter", "cost", "train_acc", "test_acc", "elapsed_ms"]
LATEST_CHECKPOINT = "checkpoint_latest.json"
CONFIG_FILE = "config.txt"
# consecutive small cost deltas that end training
CONVERGENCE_WINDOW = 3


@dataclass(frozen=True)
class MetricsRow:
    iteration: int
    cost: float
    train_acc: float
    test_acc: float
    elapsed_ms: float


@dataclass(frozen=True)
class Checkpoint:
    """Everything needed to evaluate or resume a run at one iteration.

    ``adam`` is the optimizer state before the update of ``iteration``.
    """

    shape: CircuitShape
    classes: tuple
    seed: int
    iteration: int
    params: np.ndarray
    adam: AdamState


def checkpoint_name(iteration):
    return f"checkpoint_{iteration:04d}.json"


def save_checkpoint(path, checkpoint):
    shape = checkpoint.shape
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "shape": {
            "num_classes": shape.num_classes,
            "repetitions": shape.repetitions,
            "units": shape.units,
            "register_width": shape.register_width,
            "label_offset": shape.label_offset,
            "n_padded": shape.n_padded,
        },
        "classes": list(checkpoint.classes),
        "seed": checkpoint.seed,
        "iteration": checkpoint.iteration,
        "parameter_order": ["class", "repetition", "qubit", "unit", "angle"],
        "parameters": np.asarray(checkpoint.params, dtype=float).ravel().tolist(),
        "adam": {
            **asdict(checkpoint.adam.config),
            "step": checkpoint.adam.step,
            "first_moment": checkpoint.adam.first_moment.ravel().tolist(),
            "second_moment": checkpoint.adam.second_moment.ravel().tolist(),
        },
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1))


def load_checkpoint(path):
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as e:
        raise DataError(f"Cannot read checkpoint {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DataError(f"Checkpoint {path} is not valid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise DataError(f"Checkpoint {path} does not hold a JSON object")

    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise DataError(f"Unsupported checkpoint version {payload.get('format_version')!r} in {path}")

    try:
        raw_shape = payload["shape"]
        shape = CircuitShape(raw_shape["num_classes"], raw_shape["repetitions"], raw_shape["units"])
        params = np.array(payload["parameters"], dtype=float)
        adam_raw = payload["adam"]
        adam_config = AdamConfig(
            step_size=adam_raw["step_size"],
            beta1=adam_raw["beta1"],
            beta2=adam_raw["beta2"],
            epsilon=adam_raw["epsilon"],
        )
        first = np.array(adam_raw["first_moment"], dtype=float)
        second = np.array(adam_raw["second_moment"], dtype=float)
        size = int(np.prod(shape.param_shape))
        if params.size != size or first.size != size or second.size != size:
            raise DataError(f"Checkpoint {path} arrays do not match shape {shape.param_shape}")
        adam = AdamState(
            first.reshape(shape.param_shape),
            second.reshape(shape.param_shape),
            int(adam_raw["step"]),
            adam_config,
        )
        return Checkpoint(
            shape=shape,
            classes=tuple(payload["classes"]),
            seed=payload["seed"],
            iteration=int(payload["iteration"]),
            params=params.reshape(shape.param_shape),
            adam=adam,
        )
    except QuantumClassifierError:
        raise
    except KeyError as e:
        raise DataError(f"Checkpoint {path} is missing field {e}") from e
    except (AttributeError, TypeError, ValueError) as e:
        raise DataError(f"Checkpoint {path} holds a malformed field: {e}") from e


def write_metrics(path, rows):
    frame = pd.DataFrame(
        [(r.iteration, r.cost, r.train_acc, r.test_acc, r.elapsed_ms) for r in rows],
        columns=METRICS_COLUMNS,
    )
    frame.to_csv(path, index=False)


def read_metrics(path):
    frame = pd.read_csv(path)
    if list(frame.columns) != METRICS_COLUMNS:
        raise DataError(f"{path} does not have the metrics header {','.join(METRICS_COLUMNS)}")
    return [
        MetricsRow(int(r.iter), float(r.cost), float(r.train_acc), float(r.test_acc), float(r.elapsed_ms))
        for r in frame.itertuples(index=False)
    ]


def make_batches(per_class_samples, count, seed):
    """Shuffle each class with the seeded generator and zip into tuples.

    ``per_class_samples[i]`` holds the samples of class ``i``; ``seed`` may be
    an int, a SeedSequence or a Generator.
    """
    rng = np.random.default_rng(seed)
    chosen = []
    for class_id, samples in enumerate(per_class_samples):
        if len(samples) < count:
            raise DataError(f"Class {class_id} has {len(samples)} samples, {count} requested")
        order = rng.permutation(len(samples))[:count]
        chosen.append([samples[i] for i in order])
    return Batch.from_tuples(list(zip(*chosen)))


def _batch_samples(batch):
    """The batch's features flattened into (features, labels) for accuracy."""
    m, num_classes, n_padded = batch.features.shape
    return batch.features.reshape(m * num_classes, n_padded), np.tile(np.arange(num_classes), m)


def _stable_count(rows, tolerance):
    stable = 0
    for previous, current in zip(rows, rows[1:]):
        stable = stable + 1 if abs(current.cost - previous.cost) < tolerance else 0
    return stable


def train(config, dataset, out_dir=None, resume=False, workers=None):
    """Optimise the circuit parameters on ``dataset`` (a ClassSplit).

    Returns the parameters evaluated at the last recorded iteration and one
    MetricsRow per iteration. With ``out_dir`` set, a checkpoint and the
    metrics CSV are written after every iteration.
    """
    if dataset.num_classes != config.num_classes:
        raise DataError(f"Dataset has {dataset.num_classes} classes, config expects {config.num_classes}")
    if any(len(group) == 0 for group in dataset.test):
        raise DataError("Every class needs at least one test sample")

    workers = workers or thread_count()
    n_padded = dataset.train[0][0].features.size
    shape = CircuitShape.for_features(config.num_classes, config.repetitions, n_padded)

    init_seed, batch_seed = np.random.SeedSequence(config.seed).spawn(2)
    batch = make_batches(dataset.train, config.train_per_class, batch_seed)
    train_features, train_labels = _batch_samples(batch)
    test_samples = dataset.test_samples()

    params = random_parameters(shape, np.random.default_rng(init_seed))
    adam = AdamState.zeros(shape.param_shape, config.adam)
    rows = []
    first_iteration = 1

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / CONFIG_FILE).write_text(format_train_config(config))

    if resume:
        if out_dir is None:
            raise DataError("Resuming needs an output directory")
        checkpoint = load_checkpoint(out_dir / LATEST_CHECKPOINT)
        if checkpoint.shape != shape or checkpoint.classes != config.classes:
            raise DataError("Checkpoint does not match the configured circuit")
        rows = read_metrics(out_dir / METRICS_FILE)[: checkpoint.iteration]
        if (
            checkpoint.iteration >= config.iterations
            or _stable_count(rows, config.tolerance) >= CONVERGENCE_WINDOW
        ):
            logger.info("Run in %s already finished at iteration %d", out_dir, checkpoint.iteration)
            return checkpoint.params, rows
        grad = grad_fd(shape, batch, checkpoint.params, config.grad_eps, workers)
        params, adam = adam_step(checkpoint.params, grad, checkpoint.adam)
        first_iteration = checkpoint.iteration + 1
        logger.info("Resuming from iteration %d", checkpoint.iteration)

    logger.info(
        "Training %d classes, m=%d, K=%d, %d tuples, %d parameters",
        shape.num_classes, shape.repetitions, shape.units, batch.size, params.size,
    )
    started = time.perf_counter()

    for iteration in range(first_iteration, config.iterations + 1):
        try:
            value = cost(shape, batch, params, workers)
        except NumericError as e:
            raise NumericError(f"Iteration {iteration}: {e}") from e

        train_acc = float(np.mean(classify(shape, params, train_features) == train_labels))
        test_acc = evaluate_accuracy(shape, params, test_samples, config.shots, config.seed)
        elapsed = round((time.perf_counter() - started) * 1000, 3) if config.record_elapsed else 0.0
        row = MetricsRow(iteration, value, train_acc, test_acc, elapsed)
        rows.append(row)
        logger.info(
            "iter %d cost %.6f train_acc %.4f test_acc %.4f elapsed_ms %.1f",
            iteration, value, train_acc, test_acc, elapsed,
        )

        if out_dir is not None:
            checkpoint = Checkpoint(shape, config.classes, config.seed, iteration, params, adam)
            save_checkpoint(out_dir / checkpoint_name(iteration), checkpoint)
            shutil.copyfile(out_dir / checkpoint_name(iteration), out_dir / LATEST_CHECKPOINT)
            write_metrics(out_dir / METRICS_FILE, rows)

        if _stable_count(rows, config.tolerance) >= CONVERGENCE_WINDOW:
            logger.info("Cost converged at iteration %d", iteration)
            break
        if iteration == config.iterations:
            break

        grad = grad_fd(shape, batch, params, config.grad_eps, workers)
        params, adam = adam_step(params, grad, adam)

    return check_parameters(shape, params), rows


def sweep_repetitions(config, dataset, values, out_dir=None):
    """Train once per repetition count; returns ``{m: metrics rows}``."""
    results = {}
    for m in values:
        run_dir = None if out_dir is None else Path(out_dir) / f"m{m}"
        logger.info("Sweep: training with m=%d", m)
        _, rows = train(replace(config, repetitions=m), dataset, run_dir)
        results[m] = rows
    return results
