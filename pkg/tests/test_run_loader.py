import pytest

from quantum_classifier.config import TrainConfig, format_train_config
from quantum_classifier.errors import DataError
from quantum_classifier.trainer import CONFIG_FILE, METRICS_FILE, MetricsRow, write_metrics
from utils.run_loader import discover_runs, load_runs, run_repetitions, summarize_runs


def write_run(run_dir, costs, accuracies, repetitions=None):
    run_dir.mkdir(parents=True)
    rows = [MetricsRow(i + 1, c, a, a, 0.0) for i, (c, a) in enumerate(zip(costs, accuracies))]
    write_metrics(run_dir / METRICS_FILE, rows)
    if repetitions is not None:
        config = TrainConfig(classes=(1, 7), train_per_class=5, repetitions=repetitions)
        (run_dir / CONFIG_FILE).write_text(format_train_config(config))


def test_discover_and_load(tmp_path):
    write_run(tmp_path / "sweep" / "m1", [0.7, 0.6, 0.5], [0.5, 0.6, 0.7])
    write_run(tmp_path / "sweep" / "m2", [0.6, 0.4], [0.6, 0.9])
    write_run(tmp_path / "digits", [0.5, 0.45], [0.8, 0.75], repetitions=3)

    runs = discover_runs(tmp_path)
    assert [r.name for r in runs] == ["digits", "m1", "m2"]

    df = load_runs(tmp_path)
    assert len(df) == 7
    assert set(df['run']) == {"digits", "sweep/m1", "sweep/m2"}
    assert df.loc[df['run'] == "digits", 'm'].unique().tolist() == [3]
    assert df.loc[df['run'] == "sweep/m2", 'm'].unique().tolist() == [2]


def test_summarize_runs(tmp_path):
    write_run(tmp_path / "m1", [0.7, 0.6, 0.5], [0.5, 0.8, 0.7])
    summary = summarize_runs(load_runs(tmp_path)).set_index('run')
    assert summary.loc["m1", 'iterations'] == 3
    assert summary.loc["m1", 'final_cost'] == pytest.approx(0.5)
    assert summary.loc["m1", 'final_test_acc'] == pytest.approx(0.7)
    assert summary.loc["m1", 'best_test_acc'] == pytest.approx(0.8)


def test_run_repetitions_falls_back_to_directory_name(tmp_path):
    (tmp_path / "m4").mkdir()
    assert run_repetitions(tmp_path / "m4") == 4
    (tmp_path / "other").mkdir()
    assert run_repetitions(tmp_path / "other") is None


def test_empty_and_missing_directories(tmp_path):
    assert load_runs(tmp_path).empty
    assert summarize_runs(load_runs(tmp_path)).empty
    with pytest.raises(DataError):
        discover_runs(tmp_path / "absent")


def test_bad_metrics_header(tmp_path):
    run_dir = tmp_path / "broken"
    run_dir.mkdir()
    (run_dir / METRICS_FILE).write_text("a,b\n1,2\n")
    with pytest.raises(DataError):
        load_runs(tmp_path)
