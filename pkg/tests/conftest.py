import numpy as np
import pytest

from quantum_classifier.dataset import (
    ClassSplit,
    SamplePool,
    rough_grid_features,
    select_subset,
    write_idx_images,
    write_idx_labels,
)
from quantum_classifier.encoding import EncodedSample


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def contrived_params():
    """Weights sending branch ``l`` to sample ``|l>`` when every feature is 1.

    Unit 0 of sample qubit ``j`` gets ``(0, pi, 0)``, an X up to sign, when bit
    ``j`` of the class's label value is set; everything else stays zero.
    """

    def build(shape):
        params = np.zeros(shape.param_shape)
        for class_index in range(shape.num_classes):
            value = shape.label_value(class_index)
            for qubit in shape.sample_qubits:
                if (value >> qubit) & 1:
                    params[class_index, 0, qubit, 0] = (0.0, np.pi, 0.0)
        return params

    return build


@pytest.fixture
def ones_tuple():
    """One all-ones sample per class."""

    def build(num_classes, n_padded=3):
        return [EncodedSample(np.ones(n_padded), label) for label in range(num_classes)]

    return build


@pytest.fixture
def toy_split():
    """Well-separated synthetic classes on ``n_padded`` features."""

    def build(num_classes, train, test, n_padded=3, seed=0):
        gen = np.random.default_rng(seed)
        centres = np.linspace(0.15, 0.85, num_classes)

        def group(class_id, count):
            rows = np.clip(centres[class_id] + 0.05 * gen.standard_normal((count, n_padded)), 0, 1)
            return [EncodedSample(row, class_id) for row in rows]

        return ClassSplit(
            classes=tuple(range(num_classes)),
            train=[group(c, train) for c in range(num_classes)],
            test=[group(c, test) for c in range(num_classes)],
        )

    return build


def synthetic_digits(labels, per_label, seed=0):
    """28x28 uint8 images where digit ``d`` lights up a vertical band at column ``2d + 4``."""
    gen = np.random.default_rng(seed)
    images, targets = [], []
    for label in labels:
        for _ in range(per_label):
            image = gen.integers(0, 20, size=(28, 28))
            column = 2 * label + 4
            image[4:24, column:column + 3] = 255
            images.append(image)
            targets.append(label)
    order = gen.permutation(len(images))
    return np.array(images, dtype=np.uint8)[order], np.array(targets, dtype=np.uint8)[order]


@pytest.fixture
def idx_files(tmp_path):
    """Synthetic IDX image and label files for digits 1 and 7."""
    images, labels = synthetic_digits([1, 7, 3], per_label=12)
    image_path = tmp_path / "images-idx3-ubyte"
    label_path = tmp_path / "labels-idx1-ubyte"
    image_path.write_bytes(write_idx_images(images))
    label_path.write_bytes(write_idx_labels(labels))
    return image_path, label_path, images, labels


@pytest.fixture
def digit_split():
    """Grid features of synthetic digits, split per label like an ingest run."""

    def build(labels, train, test, seed=0):
        images, targets = synthetic_digits(labels, train + test, seed=seed)
        pool = SamplePool(rough_grid_features(images), targets.astype(int))
        return select_subset(pool, labels, train, test, seed)

    return build
