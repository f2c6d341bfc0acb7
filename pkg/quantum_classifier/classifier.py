"""
Inference with trained parameters.

The unclassified features are loaded into every class block, the sample
register is measured, and the class is read off the label window
``[label_offset, label_offset + L)`` of the outcome distribution.
"""

import logging

import numpy as np

from quantum_classifier import statevector
from quantum_classifier.circuit import load_classes
from quantum_classifier.errors import DataError, ShapeError

logger = logging.getLogger(__name__)


def predict_probs(shape, params, features, shots=None, seed=None):
    """Sample-register outcome distribution for ``features``.

    ``features`` has shape ``(3K,)`` or ``(N, 3K)``. With ``shots`` set the
    result is the empirical frequency of a seeded shot sample.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim == 0 or features.shape[-1] != shape.n_padded:
        raise ShapeError(f"Expected {shape.n_padded} padded features, got shape {features.shape}")

    slotted = np.broadcast_to(
        features[..., np.newaxis, :], features.shape[:-1] + (shape.num_classes, shape.n_padded)
    )
    sv = load_classes(shape, slotted, params)
    if shots is None:
        return statevector.marginal_probs(sv, shape.sample_qubits)
    counts = statevector.sample_counts(sv, shape.sample_qubits, shots, seed)
    return counts / shots


def decode(shape, probs):
    """Class ids from outcome distributions; ties go to the smaller id."""
    probs = np.asarray(probs, dtype=float)
    window = probs[..., shape.label_offset:shape.label_offset + shape.num_classes]
    return np.argmax(window, axis=-1)


def classify(shape, params, features, shots=None, seed=None):
    """Predicted class id (or ids, for a stack of feature vectors)."""
    decoded = decode(shape, predict_probs(shape, params, features, shots, seed))
    if np.ndim(decoded) == 0:
        return int(decoded)
    return decoded


def _stack(samples):
    if not samples:
        raise DataError("Cannot evaluate an empty sample set")
    features = np.stack([s.features for s in samples])
    labels = np.array([s.label for s in samples])
    return features, labels


def evaluate_accuracy(shape, params, samples, shots=None, seed=None):
    """Fraction of ``samples`` whose predicted class equals their label."""
    features, labels = _stack(samples)
    predicted = classify(shape, params, features, shots, seed)
    return float(np.mean(predicted == labels))


def confusion_matrix(shape, params, samples, shots=None, seed=None):
    """L x L counts; rows are true classes, columns predicted classes."""
    features, labels = _stack(samples)
    if np.any(labels >= shape.num_classes):
        raise DataError(f"Sample label outside 0..{shape.num_classes - 1}")
    predicted = classify(shape, params, features, shots, seed)
    table = np.zeros((shape.num_classes, shape.num_classes), dtype=int)
    np.add.at(table, (labels, predicted), 1)
    return table
