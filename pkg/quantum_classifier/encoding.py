"""
Weighted SU(2) data encoding.

A feature vector of length ``3K`` is cut into ``K`` units of three features.
Unit ``k`` contributes the rotation ``su2(w_k * x_k)`` (elementwise product of
its three weights and three features) and the units are chained with unit 1
applied first.
"""

import math
from dataclasses import dataclass

import numpy as np

from quantum_classifier.errors import NumericError, ShapeError

FEATURE_ATOL = 1e-12


def padded_length(n):
    """Smallest multiple of 3 that is >= n."""
    return 3 * math.ceil(n / 3)


def pad_features(x):
    """Append zeros to ``x`` until its length is a multiple of 3."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ShapeError(f"Expected a non-empty 1-D feature vector, got shape {x.shape}")
    return np.pad(x, (0, padded_length(x.size) - x.size))


def num_units(n_padded):
    if n_padded < 3 or n_padded % 3:
        raise ShapeError(f"Padded feature length must be a positive multiple of 3, got {n_padded}")
    return n_padded // 3


@dataclass(frozen=True)
class EncodedSample:
    """A padded feature vector in [0, 1] with its class id."""

    features: np.ndarray
    label: int

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        if features.ndim != 1:
            raise ShapeError(f"Features must be 1-D, got shape {features.shape}")
        num_units(features.size)
        if not np.all(np.isfinite(features)):
            raise ShapeError("Features must be finite")
        if np.any(features < -FEATURE_ATOL) or np.any(features > 1 + FEATURE_ATOL):
            raise ShapeError("Features must lie in [0, 1]")
        if self.label < 0:
            raise ShapeError(f"Label must be non-negative, got {self.label}")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "label", int(self.label))

    @classmethod
    def from_raw(cls, features, label):
        """Pad an unpadded feature vector and wrap it."""
        return cls(pad_features(features), label)


def su2(phi1, phi2, phi3):
    """ZYZ rotation ``Rz(phi3) @ Ry(phi2) @ Rz(phi1)``.

    Angles broadcast; the result has shape ``broadcast_shape + (2, 2)``.
    """
    phi1, phi2, phi3 = np.broadcast_arrays(
        np.asarray(phi1, dtype=float), np.asarray(phi2, dtype=float), np.asarray(phi3, dtype=float)
    )
    if not (np.all(np.isfinite(phi1)) and np.all(np.isfinite(phi2)) and np.all(np.isfinite(phi3))):
        raise NumericError("su2 angles must be finite")

    cos = np.cos(phi2 / 2)
    sin = np.sin(phi2 / 2)
    plus = np.exp(-0.5j * (phi1 + phi3))
    minus = np.exp(0.5j * (phi1 - phi3))

    u = np.empty(phi1.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = plus * cos
    u[..., 0, 1] = -minus * sin
    u[..., 1, 0] = np.conj(minus) * sin
    u[..., 1, 1] = np.conj(plus) * cos
    return u


def unit_angles(features, weights):
    """Angle triples ``w_k * x_k`` for every unit.

    ``features`` has shape ``(..., 3K)`` and ``weights`` shape ``(..., K, 3)``;
    leading axes broadcast.
    """
    features = np.asarray(features, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if weights.ndim < 2 or weights.shape[-1] != 3:
        raise ShapeError(f"Weights must have shape (..., K, 3), got {weights.shape}")
    units = weights.shape[-2]
    if features.shape[-1] != 3 * units:
        raise ShapeError(
            f"Feature length {features.shape[-1]} does not match {units} encoding units"
        )
    return weights * features.reshape(features.shape[:-1] + (units, 3))


def build_v(features, weights):
    """Single-qubit operator ``U(w_K*x_K) ... U(w_1*x_1)``."""
    angles = unit_angles(features, weights)
    rotations = su2(angles[..., 0], angles[..., 1], angles[..., 2])
    v = rotations[..., 0, :, :]
    for k in range(1, angles.shape[-2]):
        v = rotations[..., k, :, :] @ v
    return v


def apply_to_zero(operators):
    """``ops[..., n-1] @ ... @ ops[..., 0] @ |0>`` for operators stacked as ``(..., n, 2, 2)``."""
    operators = np.asarray(operators)
    column = operators[..., 0, :, 0]
    for index in range(1, operators.shape[-3]):
        column = np.einsum("...ab,...b->...a", operators[..., index, :, :], column)
    return column
