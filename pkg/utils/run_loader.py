import re
from pathlib import Path

import pandas as pd

from quantum_classifier.config import parse_train_config
from quantum_classifier.errors import ConfigError, DataError
from quantum_classifier.trainer import CONFIG_FILE, METRICS_COLUMNS, METRICS_FILE

_SWEEP_DIR = re.compile(r"^m(\d+)$")


def discover_runs(runs_dir):
    """Directories under runs_dir that hold a metrics CSV, sorted by path"""
    runs_dir = Path(runs_dir)
    if not runs_dir.is_dir():
        raise DataError(f"Runs directory not found: {runs_dir}")
    return sorted(path.parent for path in runs_dir.rglob(METRICS_FILE))


def run_repetitions(run_dir):
    """Repetition count m of a run, from its saved config or an m<value> directory name"""
    run_dir = Path(run_dir)
    config_path = run_dir / CONFIG_FILE
    if config_path.exists():
        try:
            return parse_train_config(config_path.read_text()).repetitions
        except ConfigError:
            pass

    match = _SWEEP_DIR.match(run_dir.name)
    return int(match.group(1)) if match else None


def load_run(run_dir, runs_dir=None):
    """Metrics of one run with its label and repetition count attached"""
    run_dir = Path(run_dir)
    path = run_dir / METRICS_FILE
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Cannot read {path}: {e}") from e

    if list(df.columns) != METRICS_COLUMNS:
        raise DataError(f"{path} does not have the metrics header {','.join(METRICS_COLUMNS)}")

    label = str(run_dir.relative_to(runs_dir)) if runs_dir is not None else run_dir.name
    df.insert(0, 'run', label if label != '.' else run_dir.name)
    df.insert(1, 'm', run_repetitions(run_dir))
    return df


def load_runs(runs_dir):
    """All metrics under runs_dir stacked into one DataFrame"""
    runs_dir = Path(runs_dir)
    frames = [load_run(run_dir, runs_dir) for run_dir in discover_runs(runs_dir)]
    if not frames:
        return pd.DataFrame(columns=['run', 'm'] + METRICS_COLUMNS)
    return pd.concat(frames, ignore_index=True)


def summarize_runs(df):
    """One row per run: final iteration, final cost, best and final test accuracy"""
    if df.empty:
        return pd.DataFrame(columns=['run', 'm', 'iterations', 'final_cost', 'final_test_acc', 'best_test_acc'])

    ordered = df.sort_values(['run', 'iter'])
    grouped = ordered.groupby('run', sort=True)
    summary = pd.DataFrame({
        'm': grouped['m'].first(),
        'iterations': grouped['iter'].max(),
        'final_cost': grouped['cost'].last(),
        'final_test_acc': grouped['test_acc'].last(),
        'best_test_acc': grouped['test_acc'].max(),
    })
    return summary.reset_index()
