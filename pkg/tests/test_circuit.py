import numpy as np
import pytest

from quantum_classifier import statevector
from quantum_classifier.circuit import (
    CircuitShape,
    apply_class_block,
    branch_columns,
    branch_overlaps,
    build_final_state,
    initial_state,
    label_bits,
    load_classes,
    optimal_state,
    random_parameters,
    zero_parameters,
)
from quantum_classifier.encoding import EncodedSample
from quantum_classifier.errors import QubitIndexError, ShapeError, SizeError


def branch(sv, shape, label_value):
    """Sample-register amplitudes of one label branch."""
    t = shape.register_width
    return sv.amplitudes[..., label_value << t:(label_value + 1) << t]


@pytest.mark.parametrize("num_classes,t,offset", [(2, 1, 0), (3, 2, 1), (4, 2, 0), (5, 3, 1), (8, 3, 0)])
def test_shape_register_width(num_classes, t, offset):
    shape = CircuitShape(num_classes, 1, 11)
    assert shape.register_width == t
    assert shape.label_offset == offset
    assert shape.num_qubits == 2 * t
    assert shape.param_shape == (num_classes, 1, t, 11, 3)


def test_shape_from_features():
    shape = CircuitShape.for_features(2, 2, 33)
    assert shape.units == 11
    assert shape.n_padded == 33
    with pytest.raises(ShapeError):
        CircuitShape.for_features(2, 1, 32)


def test_shape_rejects_bad_sizes():
    with pytest.raises(SizeError):
        CircuitShape(1, 1, 1)
    with pytest.raises(SizeError):
        CircuitShape(2, 0, 1)
    with pytest.raises(SizeError):
        CircuitShape(300, 1, 1)


def test_initial_state():
    one = initial_state(CircuitShape(2, 1, 1))
    assert np.allclose(one.amplitudes, [1 / np.sqrt(2), 0, 1 / np.sqrt(2), 0])

    shape = CircuitShape(4, 1, 1)
    two = initial_state(shape)
    nonzero = np.flatnonzero(np.abs(two.amplitudes) > 1e-12)
    assert len(nonzero) == 4
    assert np.allclose(two.amplitudes[nonzero], 0.5)
    assert np.allclose(statevector.marginal_probs(two, shape.label_qubits), 0.25)


def test_block_skips_mismatched_branch():
    shape = CircuitShape(2, 1, 1)
    # label register collapsed onto |1>
    sv = statevector.apply_single(statevector.new_zero(2), 1, statevector.PAULI_X)
    params = np.zeros(shape.param_shape)
    params[0, 0, 0, 0] = (0.0, np.pi, 0.0)

    after = apply_class_block(sv, shape, 0, np.ones(3), params[0, 0])
    assert np.array_equal(after.amplitudes, sv.amplitudes)


def test_block_with_zero_parameters_is_identity(rng):
    shape = CircuitShape(4, 1, 2)
    sv = initial_state(shape)
    after = apply_class_block(sv, shape, 2, rng.uniform(0, 1, size=6), np.zeros((2, 2, 3)))
    assert np.allclose(after.amplitudes, sv.amplitudes)


def test_block_loads_class_one_branch(contrived_params):
    shape = CircuitShape(2, 1, 1)
    params = contrived_params(shape)
    after = apply_class_block(initial_state(shape), shape, 1, np.ones(3), params[1, 0])
    assert abs(abs(after.amplitudes[(1 << 1) | 1]) - 1 / np.sqrt(2)) < 1e-12
    assert abs(after.amplitudes[(1 << 1) | 0]) < 1e-12


def test_block_rejects_class_index():
    shape = CircuitShape(2, 1, 1)
    with pytest.raises(QubitIndexError):
        apply_class_block(initial_state(shape), shape, 2, np.ones(3), np.zeros((1, 1, 3)))


def test_final_state_with_zero_parameters(ones_tuple):
    shape = CircuitShape(3, 2, 1)
    sv = build_final_state(shape, ones_tuple(3), zero_parameters(shape))
    assert np.allclose(sv.amplitudes, initial_state(shape).amplitudes)


def test_final_state_bell(contrived_params, ones_tuple):
    shape = CircuitShape(2, 1, 1)
    sv = build_final_state(shape, ones_tuple(2), contrived_params(shape))
    assert abs(abs(statevector.inner_product(optimal_state(1), sv)) - 1) < 1e-12


def test_final_state_padding_branches(rng):
    shape = CircuitShape(5, 1, 2)
    samples = [EncodedSample(rng.uniform(0, 1, size=6), label) for label in range(5)]
    sv = build_final_state(shape, samples, random_parameters(shape, rng))

    # classes sit on label values 1..5; 0, 6 and 7 keep sample |000>
    assert 2 ** shape.register_width - (shape.num_classes + shape.label_offset) == 2
    for value in (0, 6, 7):
        amps = branch(sv, shape, value)
        assert abs(abs(amps[0]) ** 2 - 1 / 8) < 1e-12
        assert np.allclose(amps[1:], 0)


def test_final_state_rejects_bad_tuple(ones_tuple):
    shape = CircuitShape(3, 1, 1)
    with pytest.raises(ShapeError):
        build_final_state(shape, ones_tuple(2), zero_parameters(shape))
    duplicate = ones_tuple(3)[:2] + [EncodedSample(np.ones(3), 1)]
    with pytest.raises(ShapeError):
        build_final_state(shape, duplicate, zero_parameters(shape))


def test_branch_isolation(rng):
    shape = CircuitShape(4, 2, 2)
    features = rng.uniform(0, 1, size=(4, 6))
    params = random_parameters(shape, rng)
    base = load_classes(shape, features, params)

    perturbed = params.copy()
    perturbed[3] += rng.normal(size=perturbed[3].shape)
    other = load_classes(shape, features, perturbed)

    for class_index in range(3):
        value = shape.label_value(class_index)
        assert np.array_equal(branch(base, shape, value), branch(other, shape, value))
    assert not np.allclose(branch(base, shape, 3), branch(other, shape, 3))


def test_label_marginal_is_uniform(rng):
    shape = CircuitShape(5, 2, 2)
    sv = load_classes(shape, rng.uniform(0, 1, size=(5, 6)), random_parameters(shape, rng))
    assert np.allclose(statevector.marginal_probs(sv, shape.label_qubits), 1 / 8, atol=1e-12)


def test_load_classes_batches_tuples(rng):
    shape = CircuitShape(2, 1, 2)
    params = random_parameters(shape, rng)
    stacked = rng.uniform(0, 1, size=(3, 2, 6))
    batched = load_classes(shape, stacked, params)
    for row in range(3):
        single = load_classes(shape, stacked[row], params)
        assert np.allclose(batched.amplitudes[row], single.amplitudes, atol=1e-12)


def test_optimal_state():
    one = optimal_state(1)
    assert np.allclose(one.amplitudes, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])

    shape = CircuitShape(8, 1, 1)
    three = optimal_state(3)
    assert abs(np.linalg.norm(three.amplitudes) - 1) < 1e-12
    assert np.allclose(statevector.marginal_probs(three, shape.sample_qubits), 1 / 8)

    with pytest.raises(SizeError):
        optimal_state(9)


@pytest.mark.parametrize("num_classes,floor", [(2, 0.0), (4, 0.0), (3, 0.0), (5, 0.4375), (6, 1 - (7 / 8) ** 2)])
def test_cost_floor(num_classes, floor):
    assert CircuitShape(num_classes, 1, 1).cost_floor == pytest.approx(floor)


def test_label_bits():
    assert label_bits(CircuitShape(4, 1, 1)).tolist() == [[False, False], [True, False], [False, True], [True, True]]
    # class 0 sits at value 1 once the offset applies
    assert label_bits(CircuitShape(3, 1, 1))[0].tolist() == [True, False]


@pytest.mark.parametrize("num_classes,m,k", [(2, 1, 1), (3, 2, 2), (4, 1, 2), (5, 2, 1)])
def test_branch_overlaps_match_simulation(rng, num_classes, m, k):
    shape = CircuitShape(num_classes, m, k)
    features = rng.uniform(0, 1, size=(4, num_classes, 3 * k))
    params = random_parameters(shape, rng)

    simulated = statevector.inner_product(optimal_state(shape.register_width), load_classes(shape, features, params))
    from_branches = branch_overlaps(shape, branch_columns(shape, features, params))
    assert np.allclose(from_branches, simulated, atol=1e-12)
