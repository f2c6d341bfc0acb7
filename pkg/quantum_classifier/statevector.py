"""
Dense statevector simulator.

Bit convention: basis index ``b`` stores qubit ``q`` as bit ``q`` of ``b``
(qubit 0 is the least significant bit). Amplitude arrays may carry leading
batch axes; every kernel broadcasts over them, so a stack of states sharing
one qubit layout is evolved with a single numpy call per gate.
"""

import logging
from dataclasses import dataclass

import numpy as np

from quantum_classifier.errors import NumericError, QubitIndexError, ShapeError, SizeError

logger = logging.getLogger(__name__)

MAX_QUBITS = 24
UNITARY_ATOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over ``2**num_qubits`` basis states.

    The stored array is read-only; gate applications return new states.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim == 0 or amps.shape[-1] != 2 ** self.num_qubits:
            raise ShapeError(
                f"Expected trailing dimension {2 ** self.num_qubits} for "
                f"{self.num_qubits} qubits, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def batch_shape(self):
        return self.amplitudes.shape[:-1]

    def norm(self):
        return np.linalg.norm(self.amplitudes, axis=-1)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


def new_zero(num_qubits):
    """Return |0...0> on ``num_qubits`` qubits."""
    if not isinstance(num_qubits, (int, np.integer)) or not 1 <= num_qubits <= MAX_QUBITS:
        raise SizeError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amps = np.zeros(2 ** int(num_qubits), dtype=complex)
    amps[0] = 1.0
    return StateVector(int(num_qubits), amps)


def controls_for_value(value, qubits):
    """Controls requiring register ``qubits`` to read the integer ``value``.

    Bit ``r`` of ``value`` is matched against ``qubits[r]``.
    """
    if not 0 <= value < 2 ** len(qubits):
        raise QubitIndexError(f"Value {value} does not fit in a {len(qubits)}-qubit register")
    return tuple((q, (value >> r) & 1) for r, q in enumerate(qubits))


def _check_qubit(num_qubits, qubit):
    if not 0 <= qubit < num_qubits:
        raise QubitIndexError(f"Qubit {qubit} out of range for {num_qubits} qubits")


def _check_unitary(u):
    u = np.asarray(u, dtype=complex)
    if u.shape[-2:] != (2, 2):
        raise ShapeError(f"Single-qubit unitary must be 2x2, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NumericError("Unitary contains non-finite entries")
    product = np.conj(np.swapaxes(u, -1, -2)) @ u
    if not np.allclose(product, IDENTITY, atol=UNITARY_ATOL, rtol=0):
        raise NumericError("Matrix is not unitary")
    return u


def _control_mask(num_qubits, controls):
    index = np.arange(2 ** num_qubits)
    mask = np.ones(2 ** num_qubits, dtype=bool)
    for qubit, bit in controls:
        mask &= ((index >> qubit) & 1) == bit
    return mask


def _apply_matrix(amplitudes, num_qubits, qubit, u):
    batch = amplitudes.shape[:-1]
    psi = amplitudes.reshape(batch + (2 ** (num_qubits - qubit - 1), 2, 2 ** qubit))
    out = np.einsum("...ij,...ajb->...aib", u, psi)
    return out.reshape(out.shape[:-3] + (2 ** num_qubits,))


def apply_single(sv, qubit, u):
    """Apply the 2x2 unitary ``u`` (or a stack of them) to ``qubit``."""
    _check_qubit(sv.num_qubits, qubit)
    u = _check_unitary(u)
    return StateVector(sv.num_qubits, _apply_matrix(sv.amplitudes, sv.num_qubits, qubit, u))


def apply_controlled(sv, controls, qubit, u):
    """Apply ``u`` to ``qubit`` on the basis states matching every control.

    ``controls`` is a sequence of ``(qubit, required_bit)`` pairs; an empty
    sequence degenerates to :func:`apply_single`.
    """
    _check_qubit(sv.num_qubits, qubit)
    seen = set()
    for control, bit in controls:
        _check_qubit(sv.num_qubits, control)
        if control == qubit:
            raise QubitIndexError(f"Control qubit {control} is also the target")
        if control in seen:
            raise QubitIndexError(f"Control qubit {control} listed twice")
        if bit not in (0, 1):
            raise QubitIndexError(f"Required bit for qubit {control} must be 0 or 1, got {bit}")
        seen.add(control)

    u = _check_unitary(u)
    updated = _apply_matrix(sv.amplitudes, sv.num_qubits, qubit, u)
    if not seen:
        return StateVector(sv.num_qubits, updated)
    mask = _control_mask(sv.num_qubits, controls)
    return StateVector(sv.num_qubits, np.where(mask, updated, sv.amplitudes))


def inner_product(a, b):
    """Return sum(conj(a_i) * b_i), batched over any leading axes."""
    if a.num_qubits != b.num_qubits:
        raise ShapeError(f"Cannot take overlap of {a.num_qubits}- and {b.num_qubits}-qubit states")
    overlap = np.sum(np.conj(a.amplitudes) * b.amplitudes, axis=-1)
    if np.ndim(overlap) == 0:
        return complex(overlap)
    return overlap


def marginal_probs(sv, qubits):
    """Probability of each readout pattern of ``qubits``.

    Entry ``j`` holds the probability that ``qubits[r]`` reads bit ``r`` of
    ``j`` for every ``r``.
    """
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"Duplicate qubit in {qubits}")
    for q in qubits:
        _check_qubit(sv.num_qubits, q)

    n = sv.num_qubits
    batch = sv.batch_shape
    nb = len(batch)
    tensor = sv.probabilities().reshape(batch + (2,) * n)

    keep = [nb + n - 1 - q for q in qubits]
    summed = tuple(axis for axis in range(nb, nb + n) if axis not in keep)
    reduced = tensor.sum(axis=summed) if summed else tensor

    remaining = sorted(keep)
    order = [nb + remaining.index(nb + n - 1 - q) for q in reversed(qubits)]
    reduced = np.transpose(reduced, list(range(nb)) + order)
    return reduced.reshape(batch + (2 ** len(qubits),))


def sample_counts(sv, qubits, shots, seed=None):
    """Draw ``shots`` seeded measurements of ``qubits`` and return counts."""
    if shots < 1:
        raise NumericError(f"shots must be positive, got {shots}")
    probs = marginal_probs(sv, qubits)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum(axis=-1, keepdims=True)

    rng = np.random.default_rng(seed)
    if probs.ndim == 1:
        return rng.multinomial(shots, probs)
    flat = probs.reshape(-1, probs.shape[-1])
    counts = np.stack([rng.multinomial(shots, row) for row in flat])
    return counts.reshape(probs.shape)
