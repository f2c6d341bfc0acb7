"""
Fidelity cost, central finite-difference gradient and the Adam update.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from quantum_classifier.circuit import (
    branch_columns,
    branch_overlaps,
    check_parameters,
    label_bits,
    load_classes,
    optimal_state,
)
from quantum_classifier.config import AdamConfig
from quantum_classifier.encoding import apply_to_zero, build_v
from quantum_classifier.errors import NumericError, ShapeError
from quantum_classifier.statevector import inner_product

logger = logging.getLogger(__name__)

DEFAULT_GRAD_EPS = 1e-4
COST_ATOL = 1e-12


@dataclass(frozen=True)
class Batch:
    """M training tuples, one sample per class each.

    ``features`` has shape ``(M, L, 3K)``; slot ``i`` of every tuple holds a
    sample of class ``i``.
    """

    features: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        if features.ndim != 3:
            raise ShapeError(f"Batch features must have shape (M, L, 3K), got {features.shape}")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)

    @classmethod
    def from_tuples(cls, tuples):
        """Build from sequences of EncodedSample, each covering every label once."""
        rows = []
        for position, group in enumerate(tuples):
            by_label = sorted(group, key=lambda s: s.label)
            if [s.label for s in by_label] != list(range(len(by_label))):
                raise ShapeError(f"Tuple {position} does not hold each class label exactly once")
            rows.append(np.stack([s.features for s in by_label]))
        if not rows:
            raise ShapeError("Batch is empty")
        if len({row.shape for row in rows}) != 1:
            raise ShapeError("Tuples differ in arity or feature length")
        return cls(np.stack(rows))

    @property
    def size(self):
        return self.features.shape[0]

    def __len__(self):
        return self.size


def _check_batch(shape, batch):
    if batch.size == 0:
        raise ShapeError("Batch is empty")
    if batch.features.shape[1:] != (shape.num_classes, shape.n_padded):
        raise ShapeError(
            f"Batch tuples have shape {batch.features.shape[1:]}, "
            f"circuit expects {(shape.num_classes, shape.n_padded)}"
        )


def fidelities(shape, batch, params, workers=1):
    """|<optimal|final_r>|^2 for every tuple r, in tuple order."""
    _check_batch(shape, batch)
    target = optimal_state(shape.register_width)

    def evaluate(chunk):
        return np.abs(inner_product(target, load_classes(shape, chunk, params))) ** 2

    if workers <= 1 or batch.size < 2:
        return evaluate(batch.features)

    chunks = np.array_split(batch.features, min(workers, batch.size))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(evaluate, chunks))
    return np.concatenate(parts)


def cost(shape, batch, params, workers=1):
    """Mean over tuples of ``1 - |<optimal|final(W)>|^2``."""
    value = float(np.mean(1.0 - fidelities(shape, batch, params, workers)))
    if not np.isfinite(value):
        raise NumericError("Cost evaluated to a non-finite value")
    if not -COST_ATOL <= value <= 1.0 + COST_ATOL:
        raise NumericError(f"Cost {value} lies outside [0, 1]")
    return value


def _shifted_costs(shape, batch, params, overlaps, picked, class_index, qubit, eps):
    """Costs with each weight of one (class, sample qubit) pair moved by ``+eps`` then ``-eps``.

    Only that class's branch changes, and within it only that qubit's factor.
    """
    weights = params[class_index, :, qubit]
    count = weights.size
    steps = eps * np.eye(count).reshape((count,) + weights.shape)
    shifted = np.concatenate([weights + steps, weights - steps])

    # (M, 1, 1, 3K) against (2n, m, K, 3)
    v = build_v(batch.features[:, class_index, np.newaxis, np.newaxis, :], shifted)
    factor = apply_to_zero(v)[..., int(label_bits(shape)[class_index, qubit])]

    others = np.prod(np.delete(picked[:, class_index], qubit, axis=-1), axis=-1)
    term = np.prod(picked[:, class_index], axis=-1)
    change = (others[:, np.newaxis] * factor - term[:, np.newaxis]) / 2 ** shape.register_width
    moved = overlaps[:, np.newaxis] + change
    costs = np.mean(1.0 - np.abs(moved) ** 2, axis=0)
    return (costs[:count] - costs[count:]).reshape(weights.shape) / (2 * eps)


def grad_fd(shape, batch, params, eps=DEFAULT_GRAD_EPS, workers=1):
    """Central finite-difference gradient of :func:`cost`, same shape as ``params``.

    Each coordinate's ``cost(W + eps e) - cost(W - eps e)`` is evaluated by
    recomputing only the branch factor the coordinate touches; all the shifts
    of one (class, sample qubit) pair go through the simulator as one stack.
    """
    if not eps > 0:
        raise NumericError(f"Finite-difference step must be positive, got {eps}")
    params = check_parameters(shape, params)
    _check_batch(shape, batch)

    columns = branch_columns(shape, batch.features, params)
    picked = np.where(label_bits(shape), columns[..., 1], columns[..., 0])
    overlaps = branch_overlaps(shape, columns)
    if not np.all(np.isfinite(overlaps)):
        raise NumericError("Cost evaluated to a non-finite value")

    pairs = [(i, j) for i in range(shape.num_classes) for j in range(shape.register_width)]

    def evaluate(pair):
        return _shifted_costs(shape, batch, params, overlaps, picked, pair[0], pair[1], eps)

    if workers <= 1:
        slices = [evaluate(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slices = list(pool.map(evaluate, pairs))

    grad = np.zeros(params.shape)
    for (i, j), values in zip(pairs, slices):
        grad[i, :, j] = values
    if not np.all(np.isfinite(grad)):
        raise NumericError("Gradient contains non-finite entries")
    return grad


@dataclass(frozen=True)
class AdamState:
    """Moment accumulators, step counter and hyperparameters."""

    first_moment: np.ndarray
    second_moment: np.ndarray
    step: int = 0
    config: AdamConfig = field(default_factory=AdamConfig)

    def __post_init__(self):
        if np.shape(self.first_moment) != np.shape(self.second_moment):
            raise ShapeError("Adam accumulators differ in shape")
        if self.step < 0:
            raise ShapeError(f"Adam step counter must be >= 0, got {self.step}")

    @classmethod
    def zeros(cls, param_shape, config=None):
        return cls(np.zeros(param_shape), np.zeros(param_shape), 0, config or AdamConfig())


def adam_step(params, grad, state):
    """One bias-corrected Adam update; returns ``(new_params, new_state)``."""
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape or params.shape != state.first_moment.shape:
        raise ShapeError(
            f"Shape mismatch: params {params.shape}, grad {grad.shape}, "
            f"moments {state.first_moment.shape}"
        )

    cfg = state.config
    step = state.step + 1
    first = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad
    second = cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * (grad * grad)

    first_hat = first / (1.0 - cfg.beta1 ** step)
    second_hat = second / (1.0 - cfg.beta2 ** step)
    updated = params - cfg.step_size * first_hat / (np.sqrt(second_hat) + cfg.epsilon)

    return updated, replace(state, first_moment=first, second_moment=second, step=step)
