"""
Training configuration.

Config files are line-oriented ``key = value`` text. ``#`` starts a comment,
blank lines are ignored, and unknown or repeated keys are errors.
"""

import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from quantum_classifier.errors import ConfigError

THREADS_ENV = "QCLASSIFY_THREADS"


@dataclass(frozen=True)
class AdamConfig:
    step_size: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("beta1 and beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ConfigError(f"adam_epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run.

    ``classes`` lists dataset labels; position in the list is the class id.
    """

    classes: tuple
    train_per_class: int
    test_per_class: int = 0
    repetitions: int = 1
    iterations: int = 30
    tolerance: float = 1e-4
    seed: int = 0
    grad_eps: float = 1e-4
    adam: AdamConfig = field(default_factory=AdamConfig)
    train_data: Path = None
    test_data: Path = None
    shots: int = None
    record_elapsed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(int(c) for c in self.classes))
        if len(self.classes) < 2:
            raise ConfigError("At least two classes must be configured")
        if len(set(self.classes)) != len(self.classes):
            raise ConfigError(f"Duplicate class in {self.classes}")
        if self.train_per_class < 1:
            raise ConfigError(f"train_per_class must be >= 1, got {self.train_per_class}")
        if self.test_per_class < 0:
            raise ConfigError(f"test_per_class must be >= 0, got {self.test_per_class}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if not (self.grad_eps > 0 and math.isfinite(self.grad_eps)):
            raise ConfigError(f"grad_eps must be positive, got {self.grad_eps}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"shots must be positive, got {self.shots}")

    @property
    def num_classes(self):
        return len(self.classes)


def _parse_bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _parse_classes(text):
    return tuple(int(part) for part in text.split(",") if part.strip())


def _parse_float(text):
    # accepts inf for "never converge on delta"
    return float(text)


_TOP_LEVEL = {
    "classes": _parse_classes,
    "train_per_class": int,
    "test_per_class": int,
    "repetitions": int,
    "iterations": int,
    "tolerance": _parse_float,
    "seed": int,
    "grad_eps": _parse_float,
    "train_data": Path,
    "test_data": Path,
    "shots": int,
    "record_elapsed": _parse_bool,
}

_ADAM_KEYS = {
    "step_size": "step_size",
    "beta1": "beta1",
    "beta2": "beta2",
    "adam_epsilon": "epsilon",
}

REQUIRED_KEYS = ("classes", "train_per_class")


def parse_train_config(text, base_dir=None):
    """Parse config text; relative data paths resolve against ``base_dir``."""
    values = {}
    adam_values = {}
    seen = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {lineno}: expected 'key = value', got {raw.strip()!r}")

        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"Line {lineno}: duplicate key '{key}'")
        seen.add(key)

        try:
            if key in _TOP_LEVEL:
                values[key] = _TOP_LEVEL[key](value)
            elif key in _ADAM_KEYS:
                adam_values[_ADAM_KEYS[key]] = float(value)
            else:
                raise ConfigError(f"Line {lineno}: unknown key '{key}'")
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Line {lineno}: invalid value for '{key}': {e}") from e

    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        raise ConfigError(f"Missing required keys: {', '.join(missing)}")

    if base_dir is not None:
        for key in ("train_data", "test_data"):
            if key in values and not values[key].is_absolute():
                values[key] = Path(base_dir) / values[key]

    return TrainConfig(adam=AdamConfig(**adam_values), **values)


def load_train_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_train_config(text, base_dir=path.parent)


def format_train_config(config):
    """Render ``config`` back into ``key = value`` text."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        if f.name == "adam":
            for key, attr in _ADAM_KEYS.items():
                lines.append(f"{key} = {getattr(value, attr)!r}")
        elif f.name == "classes":
            lines.append(f"classes = {','.join(str(c) for c in value)}")
        elif isinstance(value, bool):
            lines.append(f"{f.name} = {'true' if value else 'false'}")
        elif isinstance(value, float):
            lines.append(f"{f.name} = {value!r}")
        else:
            lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def thread_count():
    """Worker threads for per-tuple evaluation, from the environment."""
    raw = os.getenv(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {count}")
    return count
