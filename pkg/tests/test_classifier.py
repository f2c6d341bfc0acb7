import numpy as np
import pytest

from quantum_classifier.circuit import CircuitShape, random_parameters, zero_parameters
from quantum_classifier.classifier import (
    classify,
    confusion_matrix,
    decode,
    evaluate_accuracy,
    predict_probs,
)
from quantum_classifier.encoding import EncodedSample
from quantum_classifier.errors import DataError, ShapeError


def balanced_samples(gen, num_classes, per_class, n_padded=3):
    return [
        EncodedSample(gen.uniform(0, 1, size=n_padded), label)
        for label in range(num_classes)
        for _ in range(per_class)
    ]


def test_decode_power_of_two():
    shape = CircuitShape(2, 1, 1)
    assert decode(shape, [0.3, 0.7]) == 1
    assert decode(shape, [0.8, 0.2]) == 0


def test_decode_reads_offset_window():
    shape = CircuitShape(5, 1, 1)
    # outcome 0 is padding, class i sits at outcome i + 1
    probs = np.array([0.5, 0.05, 0.1, 0.05, 0.2, 0.1, 0.0, 0.0])
    assert decode(shape, probs) == 3


def test_decode_tie_goes_to_smaller_class():
    shape = CircuitShape(4, 1, 1)
    assert decode(shape, [0.1, 0.4, 0.4, 0.1]) == 1
    assert np.array_equal(decode(shape, [[0.25] * 4, [0, 0, 0.5, 0.5]]), [0, 2])


def test_predict_probs_is_a_distribution(rng):
    shape = CircuitShape(5, 2, 2)
    params = random_parameters(shape, rng)
    probs = predict_probs(shape, params, rng.uniform(0, 1, size=(4, 6)))
    assert probs.shape == (4, 8)
    assert np.allclose(probs.sum(axis=-1), 1.0)


def test_predict_probs_with_shots(rng):
    shape = CircuitShape(2, 1, 1)
    params = random_parameters(shape, rng)
    features = rng.uniform(0, 1, size=3)
    sampled = predict_probs(shape, params, features, shots=500, seed=3)
    again = predict_probs(shape, params, features, shots=500, seed=3)
    assert np.array_equal(sampled, again)
    assert sampled.sum() == pytest.approx(1.0)
    assert np.allclose(sampled, predict_probs(shape, params, features), atol=0.1)


def test_predict_probs_rejects_feature_length():
    shape = CircuitShape(2, 1, 2)
    with pytest.raises(ShapeError):
        predict_probs(shape, zero_parameters(shape), np.ones(3))


def test_contrived_parameters_tie_at_half(contrived_params):
    shape = CircuitShape(2, 1, 1)
    probs = predict_probs(shape, contrived_params(shape), np.ones(3))
    assert np.allclose(probs, [0.5, 0.5])
    assert classify(shape, contrived_params(shape), np.ones(3)) == 0


def test_zero_parameters_give_chance_accuracy(rng):
    shape = CircuitShape(2, 1, 1)
    samples = balanced_samples(rng, 2, 25)
    # every branch keeps sample |0>, so everything decodes to class 0
    assert evaluate_accuracy(shape, zero_parameters(shape), samples) == pytest.approx(0.5)

    table = confusion_matrix(shape, zero_parameters(shape), samples)
    assert table.tolist() == [[25, 0], [25, 0]]


def test_classify_returns_int_for_single_vector(rng):
    shape = CircuitShape(4, 1, 1)
    params = random_parameters(shape, rng)
    single = classify(shape, params, rng.uniform(0, 1, size=3))
    assert isinstance(single, int)
    assert 0 <= single < 4


def test_confusion_matrix_totals(rng):
    shape = CircuitShape(3, 1, 1)
    samples = balanced_samples(rng, 3, 7)
    table = confusion_matrix(shape, random_parameters(shape, rng), samples)
    assert table.shape == (3, 3)
    assert table.sum(axis=1).tolist() == [7, 7, 7]


def test_empty_sample_set_is_rejected():
    shape = CircuitShape(2, 1, 1)
    with pytest.raises(DataError):
        evaluate_accuracy(shape, zero_parameters(shape), [])


def test_decode_second_highest_rule():
    shape = CircuitShape(5, 1, 1)
    assert decode(shape, [0.5, 0.05, 0.05, 0.3, 0.05, 0.05, 0.0, 0.0]) == 2
    assert decode(shape, [0.4, 0.2, 0.2, 0.05, 0.05, 0.1, 0.0, 0.0]) == 0


def test_padding_outcome_floor(rng):
    shape = CircuitShape(5, 1, 2)
    for _ in range(50):
        probs = predict_probs(shape, random_parameters(shape, rng), rng.uniform(0, 1, size=6))
        assert probs[0] >= 0.25 - 1e-12


def test_cost_zero_tuple_is_classified_perfectly():
    from quantum_classifier.objective import Batch, cost

    shape = CircuitShape(2, 1, 1)
    params = zero_parameters(shape)
    params[:, 0, 0, 0] = (0.0, np.pi, 0.0)
    samples = [EncodedSample(np.zeros(3), 0), EncodedSample(np.array([0.0, 1.0, 0.0]), 1)]

    assert cost(shape, Batch.from_tuples([samples]), params) == pytest.approx(0.0, abs=1e-12)
    assert evaluate_accuracy(shape, params, samples) == 1.0
