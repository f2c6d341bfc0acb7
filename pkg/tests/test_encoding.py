import numpy as np
import pytest

from quantum_classifier.encoding import (
    EncodedSample,
    apply_to_zero,
    build_v,
    num_units,
    pad_features,
    padded_length,
    su2,
    unit_angles,
)
from quantum_classifier.errors import NumericError, ShapeError


def equal_up_to_phase(a, b, atol=1e-10):
    overlap = np.trace(a.conj().T @ b) / 2
    return np.isclose(abs(overlap), 1.0, atol=atol)


def test_pad_features():
    padded = pad_features(np.linspace(0, 1, 32))
    assert padded.shape == (33,)
    assert padded[-1] == 0
    assert num_units(padded.size) == 11

    assert np.array_equal(pad_features([0.1, 0.2, 0.3]), [0.1, 0.2, 0.3])
    assert np.array_equal(pad_features([0.5]), [0.5, 0, 0])
    assert padded_length(4) == 6


def test_pad_features_rejects_empty():
    with pytest.raises(ShapeError):
        pad_features([])


def test_su2_examples():
    assert np.allclose(su2(0, 0, 0), np.eye(2))
    assert np.allclose(su2(0, np.pi, 0), [[0, -1], [1, 0]])

    a, b = 0.4, -1.3
    assert equal_up_to_phase(su2(a, 0, b), su2(a + b, 0, 0))


def test_su2_is_unitary_and_broadcasts(rng):
    angles = rng.uniform(-10, 10, size=(3, 5, 4))
    u = su2(angles[0], angles[1], angles[2])
    assert u.shape == (5, 4, 2, 2)
    product = np.conj(np.swapaxes(u, -1, -2)) @ u
    assert np.allclose(product, np.eye(2), atol=1e-12)


def test_su2_rejects_non_finite():
    with pytest.raises(NumericError):
        su2(np.nan, 0, 0)
    with pytest.raises(NumericError):
        su2(0, np.inf, 0)


def test_unit_angles_are_elementwise(rng):
    features = rng.uniform(0, 1, size=9)
    weights = rng.uniform(-np.pi, np.pi, size=(3, 3))
    angles = unit_angles(features, weights)
    for k in range(3):
        assert np.array_equal(angles[k], weights[k] * features[3 * k:3 * k + 3])


def test_build_v_identity_cases(rng):
    features = rng.uniform(0, 1, size=6)
    weights = rng.uniform(-np.pi, np.pi, size=(2, 3))
    assert np.allclose(build_v(features, np.zeros((2, 3))), np.eye(2))
    assert np.allclose(build_v(np.zeros(6), weights), np.eye(2))


def test_build_v_zero_second_unit(rng):
    features = rng.uniform(0, 1, size=6)
    weights = rng.uniform(-np.pi, np.pi, size=(2, 3))
    weights[1] = 0
    first = weights[0] * features[:3]
    assert np.allclose(build_v(features, weights), su2(*first))


def test_build_v_applies_unit_one_first(rng):
    for _ in range(10):
        features = rng.uniform(0, 1, size=9)
        weights = rng.uniform(-np.pi, np.pi, size=(3, 3))
        units = [su2(*(weights[k] * features[3 * k:3 * k + 3])) for k in range(3)]

        v = build_v(features, weights)
        assert np.allclose(v, units[2] @ units[1] @ units[0], atol=1e-12)
        assert not np.allclose(v, units[0] @ units[1] @ units[2], atol=1e-6)
        assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-10)


def test_build_v_rejects_length_mismatch():
    with pytest.raises(ShapeError):
        build_v(np.ones(6), np.zeros((3, 3)))
    with pytest.raises(ShapeError):
        build_v(np.ones(6), np.zeros((2, 2)))


def test_encoded_sample_validation():
    sample = EncodedSample.from_raw([0.2, 0.4, 0.6, 0.8], 3)
    assert sample.features.shape == (6,)
    assert sample.label == 3

    with pytest.raises(ShapeError):
        EncodedSample(np.ones(4), 0)
    with pytest.raises(ShapeError):
        EncodedSample(np.array([0.5, 1.5, 0.0]), 0)
    with pytest.raises(ShapeError):
        EncodedSample(np.ones(3), -1)


def test_encoded_sample_rejects_nan():
    with pytest.raises(ShapeError):
        EncodedSample(np.array([np.nan, 0.0, 0.0]), 0)
    with pytest.raises(ShapeError):
        EncodedSample.from_raw([0.5, np.inf], 1)


def test_apply_to_zero_chains_in_order(rng):
    ops = su2(*rng.uniform(-np.pi, np.pi, size=(3, 4)))
    expected = ops[3] @ ops[2] @ ops[1] @ ops[0] @ np.array([1, 0])
    assert np.allclose(apply_to_zero(ops), expected)

    stacked = np.stack([ops, ops[::-1]])
    assert np.allclose(apply_to_zero(stacked)[0], expected)
