"""
Gate and qubit accounting for the classifier circuit.

The closed forms are evaluated in exact rational arithmetic. The explicit
decomposition rewrites every label-controlled operator into X gates, a
Toffoli ladder onto ancilla qubits and one-qubit controlled gates, and the
audit checks it against the direct multi-controlled circuit.

Layout on ``3t - 1`` qubits: sample register ``0..t-1``, label register
``t..2t-1``, ancillas ``2t..3t-2``.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from quantum_classifier import statevector
from quantum_classifier.encoding import su2
from quantum_classifier.errors import AuditError, QubitIndexError, SizeError

logger = logging.getLogger(__name__)

EQUIVALENCE_ATOL = 1e-9
ANCILLA_ATOL = 1e-12
MAX_CHECKED_WIDTH = 3


@dataclass(frozen=True)
class Hadamard:
    qubit: int

    @property
    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True)
class PauliX:
    qubit: int

    @property
    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True)
class Toffoli:
    control1: int
    control2: int
    target: int

    @property
    def qubits(self):
        return (self.control1, self.control2, self.target)

    def same_action(self, other):
        return (
            isinstance(other, Toffoli)
            and other.target == self.target
            and {other.control1, other.control2} == {self.control1, self.control2}
        )


@dataclass(frozen=True, eq=False)
class ControlledU:
    control: int
    target: int
    matrix: np.ndarray = field(repr=False)

    @property
    def qubits(self):
        return (self.control, self.target)


GATE_KINDS = ("hadamard", "x", "toffoli", "controlled_u")
_KIND_OF = {Hadamard: "hadamard", PauliX: "x", Toffoli: "toffoli", ControlledU: "controlled_u"}


def gate_kind(gate):
    return _KIND_OF[type(gate)]


def gate_count_formula(t, k, m):
    """Closed-form total gate count ``2^t t (k m + 5/2) + (13/4) 2^t - 2t + 12``."""
    if t < 1 or k < 1 or m < 1:
        raise SizeError(f"t, k and m must be >= 1, got t={t}, k={k}, m={m}")
    return (
        2 ** t * t * (k * m + Fraction(5, 2))
        + Fraction(13, 4) * 2 ** t
        - 2 * t
        + 12
    )


def x_gate_formula(t):
    """Closed-form X-gate count ``2^(t-2) (2t + 5) - 2t + 2``."""
    if t < 1:
        raise SizeError(f"t must be >= 1, got {t}")
    return Fraction(2) ** (t - 2) * (2 * t + 5) - 2 * t + 2


def qubit_count(t):
    """Work qubits 2t plus t - 1 ancillas."""
    if t < 1:
        raise SizeError(f"t must be >= 1, got {t}")
    return 3 * t - 1


def cancel_adjacent_pairs(gates, kinds=(PauliX, Toffoli)):
    """Drop pairs of identical self-inverse gates with nothing between them.

    Two gates are adjacent when no kept gate in between touches any of
    their qubits. Cancellation cascades, so nested compute/uncompute
    ladders collapse.
    """
    kept = []
    last_on = {}

    for gate in gates:
        if isinstance(gate, kinds):
            previous = {last_on[q][-1] if last_on.get(q) else None for q in gate.qubits}
            if len(previous) == 1 and None not in previous:
                index = previous.pop()
                candidate = kept[index]
                same = gate.same_action(candidate) if isinstance(gate, Toffoli) else candidate == gate
                if same and set(candidate.qubits) == set(gate.qubits):
                    kept[index] = None
                    for q in gate.qubits:
                        last_on[q].pop()
                    continue
        kept.append(gate)
        for q in gate.qubits:
            last_on.setdefault(q, []).append(len(kept) - 1)

    return [gate for gate in kept if gate is not None]


def _ladder(t):
    """Toffolis accumulating the AND of the label register into the last ancilla."""
    controls = [t + r for r in range(t)]
    ancillas = [2 * t + r for r in range(t - 1)]
    gates = [Toffoli(controls[0], controls[1], ancillas[0])]
    for r in range(2, t):
        gates.append(Toffoli(controls[r], ancillas[r - 2], ancillas[r - 1]))
    return gates, ancillas[-1]


def decompose_multicontrolled(t, control_value, targets):
    """Decompose |control_value>-controlled operators into primitive gates.

    ``targets`` is a sequence of ``(sample_qubit, unitaries)`` pairs; every
    unitary becomes one one-qubit controlled gate. Each target is first
    decomposed on its own (X flips, ladder, controlled gates, uncompute,
    X restore) and adjacent cancelling X and Toffoli pairs are then removed.
    """
    if t < 1:
        raise SizeError(f"t must be >= 1, got {t}")
    if not 0 <= control_value < 2 ** t:
        raise QubitIndexError(f"Control value {control_value} does not fit in {t} qubits")

    flips = [PauliX(t + r) for r in range(t) if not (control_value >> r) & 1]
    if t == 1:
        compute, drive = [], t
    else:
        compute, drive = _ladder(t)
    uncompute = list(reversed(compute))

    gates = []
    for qubit, unitaries in targets:
        if not 0 <= qubit < t:
            raise QubitIndexError(f"Target {qubit} is not a sample qubit for t={t}")
        gates.extend(flips)
        gates.extend(compute)
        gates.extend(ControlledU(drive, qubit, np.asarray(u, dtype=complex)) for u in unitaries)
        gates.extend(uncompute)
        gates.extend(flips)
    return cancel_adjacent_pairs(gates)


def simulate_gates(sv, gates):
    """Apply a gate list to a (possibly batched) state."""
    for gate in gates:
        if isinstance(gate, Hadamard):
            sv = statevector.apply_single(sv, gate.qubit, statevector.HADAMARD)
        elif isinstance(gate, PauliX):
            sv = statevector.apply_single(sv, gate.qubit, statevector.PAULI_X)
        elif isinstance(gate, Toffoli):
            sv = statevector.apply_controlled(
                sv, ((gate.control1, 1), (gate.control2, 1)), gate.target, statevector.PAULI_X
            )
        else:
            sv = statevector.apply_controlled(sv, ((gate.control, 1),), gate.target, gate.matrix)
    return sv


def circuit_depth(gates):
    """Longest chain of gates sharing qubits."""
    if not gates:
        return 0
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(gates)))
    last = {}
    for index, gate in enumerate(gates):
        for q in gate.qubits:
            if q in last:
                graph.add_edge(last[q], index)
            last[q] = index
    return nx.dag_longest_path_length(graph) + 1


def count_gates(gates):
    counts = Counter(gate_kind(gate) for gate in gates)
    return {kind: counts.get(kind, 0) for kind in GATE_KINDS}


@dataclass
class ResourceReport:
    num_classes: int
    t: int
    k: int
    m: int
    formula_total: Fraction
    formula_x: Fraction
    formula_qubits: int
    enumerated: dict
    enumerated_total: int
    qubits_used: int
    depth: int
    toffoli_per_control_value: list
    controlled_u_expected: int
    equivalence_checked: bool
    notes: list = field(default_factory=list)

    def to_dict(self):
        def number(value):
            return int(value) if value.denominator == 1 else float(value)

        return {
            "num_classes": self.num_classes,
            "t": self.t,
            "k": self.k,
            "m": self.m,
            "formula": {
                "total_gates": number(self.formula_total),
                "total_gates_exact": str(self.formula_total),
                "x_gates": number(self.formula_x),
                "x_gates_exact": str(self.formula_x),
                "qubits": self.formula_qubits,
            },
            "enumerated": {**self.enumerated, "total": self.enumerated_total},
            "qubits_used": self.qubits_used,
            "depth": self.depth,
            "toffoli_per_control_value": self.toffoli_per_control_value,
            "controlled_u_expected": self.controlled_u_expected,
            "equivalence_checked": self.equivalence_checked,
            "notes": self.notes,
        }


def _random_unit_matrices(t, k, m, seed):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(-np.pi, np.pi, size=(2 ** t, m, t, k, 3))
    return su2(angles[..., 0], angles[..., 1], angles[..., 2])


def _block_targets(units, value):
    """Targets of one control value: repetitions outermost, then sample qubits."""
    m, t = units.shape[1], units.shape[2]
    return [(qubit, list(units[value, rep, qubit])) for rep in range(m) for qubit in range(t)]


def _chain(unit_matrices):
    v = unit_matrices[0]
    for u in unit_matrices[1:]:
        v = u @ v
    return v


def _basis_batch(t, total_qubits):
    work = 2 ** (2 * t)
    amps = np.zeros((work, 2 ** total_qubits), dtype=complex)
    amps[np.arange(work), np.arange(work)] = 1.0
    return statevector.StateVector(total_qubits, amps)


def _direct_block(sv, t, value, units, repetitions):
    controls = statevector.controls_for_value(value, tuple(range(t, 2 * t)))
    for rep in range(repetitions):
        for qubit in range(t):
            sv = statevector.apply_controlled(sv, controls, qubit, _chain(units[value, rep, qubit]))
    return sv


def _check_ancillas(sv, t, control_value):
    if t < 2:
        return
    ancillas = list(range(2 * t, 3 * t - 1))
    clean = statevector.marginal_probs(sv, ancillas)[..., 0]
    if np.any(clean < 1 - ANCILLA_ATOL):
        raise AuditError("Ancilla qubits not returned to |0>", control_value)


def audit(shape, k=None, seed=0, check_equivalence=None):
    """Enumerate the decomposed circuit and compare it with the closed forms.

    ``k`` is the per-operator unit count (defaults to ``shape.units``). The
    equivalence check runs for ``t <= 3`` unless disabled.
    """
    t, m = shape.register_width, shape.repetitions
    k = shape.units if k is None else k
    if k < 1:
        raise SizeError(f"k must be >= 1, got {k}")
    if check_equivalence is None:
        check_equivalence = t <= MAX_CHECKED_WIDTH
    if check_equivalence and t > MAX_CHECKED_WIDTH:
        raise SizeError(f"Equivalence check supports t <= {MAX_CHECKED_WIDTH}, got t={t}")

    total_qubits = qubit_count(t)
    units = _random_unit_matrices(t, k, m, seed)
    hadamards = [Hadamard(t + r) for r in range(t)]

    blocks = []
    for value in range(2 ** t):
        block = decompose_multicontrolled(t, value, _block_targets(units, value))
        blocks.append(block)
        logger.debug("Control value %d: %s", value, count_gates(block))

        if check_equivalence:
            basis = _basis_batch(t, total_qubits)
            decomposed = simulate_gates(basis, block)
            direct = _direct_block(basis, t, value, units, m)
            _check_ancillas(decomposed, t, value)
            if not np.allclose(decomposed.amplitudes, direct.amplitudes, atol=EQUIVALENCE_ATOL, rtol=0):
                raise AuditError("Decomposed block differs from the direct controlled block", value)

    gates = hadamards + cancel_adjacent_pairs([g for block in blocks for g in block], kinds=(PauliX,))

    if check_equivalence:
        basis = _basis_batch(t, total_qubits)
        decomposed = simulate_gates(basis, gates)
        direct = simulate_gates(basis, hadamards)
        for rep in range(m):
            for value in range(2 ** t):
                controls = statevector.controls_for_value(value, tuple(range(t, 2 * t)))
                for qubit in range(t):
                    direct = statevector.apply_controlled(direct, controls, qubit, _chain(units[value, rep, qubit]))
        _check_ancillas(decomposed, t, None)
        if not np.allclose(decomposed.amplitudes, direct.amplitudes, atol=EQUIVALENCE_ATOL, rtol=0):
            raise AuditError("Decomposed circuit differs from the direct circuit")

    counts = count_gates(gates)
    report = ResourceReport(
        num_classes=shape.num_classes,
        t=t,
        k=k,
        m=m,
        formula_total=gate_count_formula(t, k, m),
        formula_x=x_gate_formula(t),
        formula_qubits=total_qubits,
        enumerated=counts,
        enumerated_total=sum(counts.values()),
        qubits_used=1 + max(q for gate in gates for q in gate.qubits),
        depth=circuit_depth(gates),
        toffoli_per_control_value=[count_gates(block)["toffoli"] for block in blocks],
        controlled_u_expected=2 ** t * t * k * m,
        equivalence_checked=check_equivalence,
    )
    _annotate(report)
    return report


def _annotate(report):
    notes = report.notes
    if report.formula_total.denominator != 1:
        notes.append(f"Closed-form gate count {report.formula_total} is not an integer for t={report.t}")
    if report.formula_x.denominator != 1:
        notes.append(f"Closed-form X count {report.formula_x} is not an integer for t={report.t}")
    if report.enumerated_total != report.formula_total:
        notes.append(
            f"Enumerated total {report.enumerated_total} differs from closed form {report.formula_total}"
        )
    if report.enumerated["x"] != report.formula_x:
        notes.append(f"Enumerated X count {report.enumerated['x']} differs from closed form {report.formula_x}")
    if report.enumerated["controlled_u"] != report.controlled_u_expected:
        notes.append(
            f"Enumerated controlled-U count {report.enumerated['controlled_u']} "
            f"differs from 2^t*t*k*m = {report.controlled_u_expected}"
        )
    expected_toffoli = 2 * (report.t - 1)
    if any(count != expected_toffoli for count in report.toffoli_per_control_value):
        notes.append(f"Toffoli count per control value differs from 2(t-1) = {expected_toffoli}")
    if report.num_classes != 2 ** report.t:
        notes.append(
            f"{report.num_classes} classes is not a power of two; counts cover all {2 ** report.t} control values"
        )
    if not report.equivalence_checked:
        notes.append("Equivalence check skipped")
