"""
MNIST ingestion: IDX parsing, rough grid features and per-class sample pools.
"""

import gzip
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
import requests

from quantum_classifier.encoding import EncodedSample
from quantum_classifier.errors import DataError, FormatError, ShapeError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"

IMAGE_SIDE = 28
# 4 rows of 7 pixels, 8 columns alternating 4 and 3 pixels wide
ROW_HEIGHTS = (7, 7, 7, 7)
COLUMN_WIDTHS = (4, 3, 4, 3, 4, 3, 4, 3)
NUM_FEATURES = len(ROW_HEIGHTS) * len(COLUMN_WIDTHS)

FEATURE_COLUMNS = [f"f{i}" for i in range(NUM_FEATURES)]

DOWNLOAD_TIMEOUT = 60


def _maybe_gunzip(data):
    data = bytes(data)
    if data[:2] == GZIP_MAGIC:
        try:
            return gzip.decompress(data)
        except (OSError, EOFError) as e:
            raise FormatError(f"Corrupt gzip stream: {e}", 0) from e
    return data


def _read_header(data, magic, fields, kind):
    header_size = 4 * (1 + fields)
    if len(data) < header_size:
        raise FormatError(f"Truncated {kind} header: {len(data)} bytes", len(data))
    header = np.frombuffer(data, dtype=">u4", count=1 + fields)
    if int(header[0]) != magic:
        raise FormatError(f"Bad {kind} magic 0x{int(header[0]):08x}, expected 0x{magic:08x}", 0)
    return [int(v) for v in header[1:]], header_size


def parse_idx_images(data):
    """Decode an IDX image file into a ``(count, rows, cols)`` uint8 array."""
    data = _maybe_gunzip(data)
    (count, rows, cols), offset = _read_header(data, IMAGE_MAGIC, 3, "image")
    expected = offset + count * rows * cols
    if len(data) < expected:
        raise FormatError(
            f"Truncated image payload: header declares {count} images of {rows}x{cols}, "
            f"file holds {len(data)} bytes of {expected}",
            len(data),
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=offset)
    return pixels.reshape(count, rows, cols)


def parse_idx_labels(data):
    """Decode an IDX label file into a uint8 array."""
    data = _maybe_gunzip(data)
    (count,), offset = _read_header(data, LABEL_MAGIC, 1, "label")
    if len(data) < offset + count:
        raise FormatError(
            f"Truncated label payload: header declares {count} labels, file holds {len(data) - offset}",
            len(data),
        )
    labels = np.frombuffer(data, dtype=np.uint8, count=count, offset=offset)
    bad = np.flatnonzero(labels > 9)
    if bad.size:
        raise FormatError(f"Label value {labels[bad[0]]} outside 0..9", offset + int(bad[0]))
    return labels


def write_idx_images(images):
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ShapeError(f"Expected (count, rows, cols) images, got shape {images.shape}")
    header = np.array([IMAGE_MAGIC, *images.shape], dtype=">u4").tobytes()
    return header + images.tobytes()


def write_idx_labels(labels):
    labels = np.asarray(labels, dtype=np.uint8).ravel()
    header = np.array([LABEL_MAGIC, labels.size], dtype=">u4").tobytes()
    return header + labels.tobytes()


def fetch_idx_bytes(location):
    """Read an IDX file from a local path or an http(s) URL."""
    location = str(location)
    if location.startswith(("http://", "https://")):
        try:
            response = requests.get(location, timeout=DOWNLOAD_TIMEOUT)
            response.raise_for_status()
        except requests.exceptions.RequestException as e:
            raise DataError(f"Network error fetching {location}: {e}") from e
        logger.info("Fetched %d bytes from %s", len(response.content), location)
        return response.content

    try:
        return Path(location).read_bytes()
    except OSError as e:
        raise DataError(f"Cannot read {location}: {e}") from e


def rough_grid_features(image):
    """Cell-mean intensities of a 4 x 8 grid, scaled to [0, 1], row-major.

    Accepts one ``28 x 28`` image or a stack of them.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim < 2 or image.shape[-2:] != (IMAGE_SIDE, IMAGE_SIDE):
        raise ShapeError(f"Expected {IMAGE_SIDE}x{IMAGE_SIDE} images, got shape {image.shape}")

    row_starts = np.cumsum((0,) + ROW_HEIGHTS[:-1])
    col_starts = np.cumsum((0,) + COLUMN_WIDTHS[:-1])
    rows_axis = image.ndim - 2
    sums = np.add.reduceat(np.add.reduceat(image, row_starts, axis=rows_axis), col_starts, axis=rows_axis + 1)
    cells = np.outer(ROW_HEIGHTS, COLUMN_WIDTHS)
    features = sums / cells / 255.0
    return features.reshape(image.shape[:-2] + (NUM_FEATURES,))


@dataclass(frozen=True)
class SamplePool:
    """Raw (unpadded) feature rows with their dataset labels."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.features) != len(self.labels):
            raise ShapeError(f"{len(self.features)} feature rows but {len(self.labels)} labels")

    @classmethod
    def from_idx(cls, image_bytes, label_bytes):
        images = parse_idx_images(image_bytes)
        labels = parse_idx_labels(label_bytes)
        if len(images) != len(labels):
            raise DataError(f"{len(images)} images but {len(labels)} labels")
        return cls(rough_grid_features(images), labels.astype(int))

    def subset(self, indices):
        return SamplePool(self.features[indices], self.labels[indices])


@dataclass(frozen=True)
class ClassSplit:
    """Per-class train and test samples; list position is the class id."""

    classes: tuple
    train: list
    test: list

    @property
    def num_classes(self):
        return len(self.classes)

    def test_samples(self):
        return [s for group in self.test for s in group]


def select_indices(pool, wanted_labels, train_count, test_count, seed):
    """Seeded disjoint train/test index selections per wanted label."""
    rng = np.random.default_rng(seed)
    train, test = {}, {}
    for label in wanted_labels:
        candidates = np.flatnonzero(pool.labels == label)
        needed = train_count + test_count
        if len(candidates) < needed:
            raise DataError(f"Label {label} has {len(candidates)} samples, {needed} requested")
        chosen = rng.permutation(candidates)[:needed]
        train[label] = chosen[:train_count]
        test[label] = chosen[train_count:]
    return train, test


def _encode(pool, indices, class_id):
    return [EncodedSample.from_raw(pool.features[i], class_id) for i in indices]


def select_subset(pool, wanted_labels, train_count, test_count, seed):
    """Seeded selection without replacement; train and test are disjoint."""
    wanted_labels = tuple(int(label) for label in wanted_labels)
    train_idx, test_idx = select_indices(pool, wanted_labels, train_count, test_count, seed)
    split = ClassSplit(
        classes=wanted_labels,
        train=[_encode(pool, train_idx[label], cid) for cid, label in enumerate(wanted_labels)],
        test=[_encode(pool, test_idx[label], cid) for cid, label in enumerate(wanted_labels)],
    )
    for label in wanted_labels:
        logger.info("Label %d: %d train, %d test", label, len(train_idx[label]), len(test_idx[label]))
    return split


def pool_to_frame(pool):
    frame = pd.DataFrame(pool.features, columns=FEATURE_COLUMNS)
    frame.insert(0, "label", pool.labels.astype(int))
    return frame


def write_feature_csv(pool, path):
    """Cache feature rows as ``label,f0,...,f31`` CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pool_to_frame(pool).to_csv(path, index=False)


def read_feature_csv(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"Feature file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot parse feature file {path}: {e}") from e
    if "label" not in frame.columns or len(frame.columns) < 2:
        raise DataError(f"Feature file {path} needs a 'label' column and feature columns")
    if frame.isna().any().any():
        raise DataError(f"Feature file {path} has empty cells")
    features = frame.drop(columns="label").to_numpy(dtype=float)
    if not np.all(np.isfinite(features)) or np.any(features < 0) or np.any(features > 1):
        raise DataError(f"Feature file {path} holds values outside [0, 1]")
    return SamplePool(features, frame["label"].to_numpy(dtype=int))


def pool_by_class(pool, classes, limit=None):
    """Per-class EncodedSample lists in file order, optionally truncated."""
    groups = []
    for class_id, label in enumerate(classes):
        indices = np.flatnonzero(pool.labels == label)
        if indices.size == 0:
            raise DataError(f"No samples of label {label}")
        if limit is not None:
            indices = indices[:limit]
        groups.append(_encode(pool, indices, class_id))
    return groups
