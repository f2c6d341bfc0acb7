"""
Classifier circuit: a Hadamard layer on the label register followed by
``m`` rounds of label-controlled class-loading blocks.

Qubit layout on ``2t`` qubits: sample register on qubits ``0..t-1``, label
register on ``t..2t-1``. Sample qubit ``j`` pairs with label qubit ``t+j``,
so the basis index of ``|s>_s|l>_l`` is ``(l << t) | s``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from quantum_classifier import statevector
from quantum_classifier.encoding import apply_to_zero, build_v, num_units
from quantum_classifier.errors import QubitIndexError, ShapeError, SizeError

logger = logging.getLogger(__name__)

MAX_REGISTER_WIDTH = 8


@dataclass(frozen=True)
class CircuitShape:
    """Integer hyperparameters fixing the circuit topology.

    ``units`` is K, the number of SU(2) units per encoding operator.
    """

    num_classes: int
    repetitions: int
    units: int

    def __post_init__(self):
        if self.num_classes < 2:
            raise SizeError(f"At least two classes are required, got {self.num_classes}")
        if self.repetitions < 1:
            raise SizeError(f"Repetitions must be >= 1, got {self.repetitions}")
        if self.units < 1:
            raise SizeError(f"Encoding units must be >= 1, got {self.units}")
        if self.register_width > MAX_REGISTER_WIDTH:
            raise SizeError(f"{self.num_classes} classes need more than {MAX_REGISTER_WIDTH} label qubits")

    @classmethod
    def for_features(cls, num_classes, repetitions, n_padded):
        return cls(num_classes, repetitions, num_units(n_padded))

    @property
    def register_width(self):
        """t = ceil(log2 L)."""
        return (self.num_classes - 1).bit_length()

    @property
    def label_offset(self):
        return 0 if self.num_classes == 2 ** self.register_width else 1

    @property
    def n_padded(self):
        return 3 * self.units

    @property
    def num_qubits(self):
        return 2 * self.register_width

    @property
    def sample_qubits(self):
        return tuple(range(self.register_width))

    @property
    def label_qubits(self):
        return tuple(range(self.register_width, 2 * self.register_width))

    @property
    def param_shape(self):
        return (self.num_classes, self.repetitions, self.register_width, self.units, 3)

    @property
    def cost_floor(self):
        """Lowest reachable cost: 1 - ((L + label_offset) / 2**t)**2."""
        return 1.0 - ((self.num_classes + self.label_offset) / 2 ** self.register_width) ** 2

    def label_value(self, class_index):
        """Label-register basis value carrying class ``class_index``."""
        if not 0 <= class_index < self.num_classes:
            raise QubitIndexError(f"Class index {class_index} out of range for {self.num_classes} classes")
        return class_index + self.label_offset


def zero_parameters(shape):
    return np.zeros(shape.param_shape)


def random_parameters(shape, rng):
    """Weights drawn uniformly from [-pi, pi)."""
    return rng.uniform(-np.pi, np.pi, size=shape.param_shape)


def check_parameters(shape, params):
    params = np.asarray(params, dtype=float)
    if params.shape != shape.param_shape:
        raise ShapeError(f"Expected parameters of shape {shape.param_shape}, got {params.shape}")
    return params


def initial_state(shape):
    """Sample register |0..0>, label register in uniform superposition."""
    sv = statevector.new_zero(shape.num_qubits)
    for qubit in shape.label_qubits:
        sv = statevector.apply_single(sv, qubit, statevector.HADAMARD)
    return sv


def apply_class_block(sv, shape, class_index, features, rep_params):
    """Load ``features`` into the branch of class ``class_index``.

    ``rep_params`` is the ``(t, K, 3)`` slice for one (class, repetition);
    ``features`` may carry leading batch axes matching the state's.
    """
    controls = statevector.controls_for_value(shape.label_value(class_index), shape.label_qubits)
    rep_params = np.asarray(rep_params, dtype=float)
    if rep_params.shape != shape.param_shape[2:]:
        raise ShapeError(f"Expected block parameters of shape {shape.param_shape[2:]}, got {rep_params.shape}")

    for qubit in shape.sample_qubits:
        v = build_v(features, rep_params[qubit])
        sv = statevector.apply_controlled(sv, controls, qubit, v)
    return sv


def load_classes(shape, features, params):
    """Final state for class-slotted features of shape ``(..., L, 3K)``."""
    features = np.asarray(features, dtype=float)
    if features.ndim < 2 or features.shape[-2:] != (shape.num_classes, shape.n_padded):
        raise ShapeError(
            f"Expected features of shape (..., {shape.num_classes}, {shape.n_padded}), got {features.shape}"
        )
    params = check_parameters(shape, params)

    sv = initial_state(shape)
    for rep in range(shape.repetitions):
        for class_index in range(shape.num_classes):
            sv = apply_class_block(sv, shape, class_index, features[..., class_index, :], params[class_index, rep])
    return sv


def build_final_state(shape, samples, params):
    """Final state for one sample per class (labels 0..L-1, any order)."""
    if len(samples) != shape.num_classes:
        raise ShapeError(f"Expected {shape.num_classes} samples, got {len(samples)}")
    by_label = sorted(samples, key=lambda s: s.label)
    if [s.label for s in by_label] != list(range(shape.num_classes)):
        raise ShapeError(f"Samples must carry labels 0..{shape.num_classes - 1} exactly once")
    return load_classes(shape, np.stack([s.features for s in by_label]), params)


def optimal_state(t):
    """Uniform superposition of |i>_s|i>_l over every i < 2**t."""
    if not 1 <= t <= MAX_REGISTER_WIDTH:
        raise SizeError(f"Register width must be in [1, {MAX_REGISTER_WIDTH}], got {t}")
    amps = np.zeros(2 ** (2 * t), dtype=complex)
    values = np.arange(2 ** t)
    amps[(values << t) | values] = 1 / np.sqrt(2 ** t)
    return statevector.StateVector(2 * t, amps)


def label_bits(shape):
    """``(L, t)`` boolean table: bit ``j`` of each class's label value."""
    values = np.array([shape.label_value(i) for i in range(shape.num_classes)])
    return ((values[:, np.newaxis] >> np.arange(shape.register_width)) & 1).astype(bool)


def branch_columns(shape, features, params):
    """Per class and sample qubit, the qubit's state inside that class's branch.

    Only class ``i``'s blocks act in its label branch, one single-qubit
    operator per sample qubit and repetition, so the branch's sample state is
    the product of these columns. ``features`` has shape ``(..., L, 3K)``;
    the result has shape ``(..., L, t, 2)``.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim < 2 or features.shape[-2:] != (shape.num_classes, shape.n_padded):
        raise ShapeError(
            f"Expected features of shape (..., {shape.num_classes}, {shape.n_padded}), got {features.shape}"
        )
    params = check_parameters(shape, params)
    # (..., L, 1, 1, 3K) against (L, m, t, K, 3) gives (..., L, m, t, 2, 2)
    v = build_v(features[..., np.newaxis, np.newaxis, :], params)
    return apply_to_zero(np.moveaxis(v, -4, -3))


def branch_overlaps(shape, columns):
    """``<optimal|final>`` from :func:`branch_columns` output, one per leading index.

    Every used branch contributes the amplitude of its own label value; the
    unused value 0 (present when ``label_offset`` is 1) keeps ``|0>`` and
    contributes 1.
    """
    picked = np.where(label_bits(shape), columns[..., 1], columns[..., 0])
    terms = np.prod(picked, axis=-1)
    return (np.sum(terms, axis=-1) + shape.label_offset) / 2 ** shape.register_width
