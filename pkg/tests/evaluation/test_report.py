import orjson
import pandas as pd
import pytest

from src.errors import ReportError
from src.evaluation.report import (
    FOLDS_DIR, RAW_FILE, REPORT_FILE, TABLES_FILE, aggregate_report, load_reference, read_failures,
    read_raw_csv, render_tables, write_raw_csv, write_report,
)
from src.evaluation.schemas import FailureRecord, FoldResult


def fold(dataset="ACEInhibitors", model="fasttext", view="all", repetition=0, half=0, wss=0.8, precision=0.1,
         seconds=0.5, n_docs=2544):
    return FoldResult(dataset=dataset, model=model, feature_view=view, repetition=repetition, half=half,
                      wss95=wss, precision_at_95=precision, train_seconds=seconds, n_docs=n_docs)


@pytest.fixture
def results():
    values = {("ACEInhibitors", "fasttext"): [0.81, 0.79, 0.83, 0.77],
              ("ACEInhibitors", "dae-ff"): [0.70, 0.72, 0.74, 0.76],
              ("Proton Beam", "fasttext"): [0.60, 0.62, 0.64, 0.66],
              ("Proton Beam", "dae-ff"): [0.50, 0.40, 0.45, 0.55]}
    return [
        fold(dataset, model, repetition=i // 2, half=i % 2, wss=wss, precision=wss / 10, seconds=0.1 * (i + 1))
        for (dataset, model), scores in values.items() for i, wss in enumerate(scores)
    ]


def test_single_result_is_its_own_mean():
    report = aggregate_report([fold(wss=0.42, precision=0.05)])
    row = report.rows[0]
    assert (row.n_folds, row.mean_wss95, row.std_wss95, row.mean_precision95) == (1, 0.42, 0.0, 0.05)
    assert row.reference_wss95 is None and row.abs_delta_pp is None


def test_means_per_combination(results):
    report = aggregate_report(results)
    rows = {(r.dataset, r.model): r for r in report.rows}
    assert len(rows) == 4
    assert rows[("ACEInhibitors", "fasttext")].mean_wss95 == pytest.approx(0.80, abs=1e-12)
    assert rows[("Proton Beam", "dae-ff")].mean_wss95 == pytest.approx(0.475, abs=1e-12)
    assert rows[("Proton Beam", "dae-ff")].n_folds == 4
    assert rows[("ACEInhibitors", "dae-ff")].mean_train_seconds == pytest.approx(0.25)


def test_absolute_delta_in_percentage_points():
    report = aggregate_report([fold(model="dae-ff", wss=0.7866)], reference={("ACEInhibitors", "dae-ff"): 0.785})
    assert report.rows[0].reference_wss95 == 0.785
    assert report.rows[0].abs_delta_pp == pytest.approx(0.16, abs=1e-9)


def test_first_halves_only(results):
    report = aggregate_report(results, halves="first")
    rows = {(r.dataset, r.model): r for r in report.rows}
    assert report.halves == "first"
    assert rows[("ACEInhibitors", "fasttext")].n_folds == 2
    assert rows[("ACEInhibitors", "fasttext")].mean_wss95 == pytest.approx((0.81 + 0.83) / 2, abs=1e-12)
    assert all(result.half == 0 for result in report.results)


def test_nothing_to_aggregate():
    with pytest.raises(ReportError):
        aggregate_report([])
    with pytest.raises(ReportError):
        aggregate_report([fold(half=1)], halves="first")


def test_group_averages(results):
    groups = {(g.group, g.model): g for g in aggregate_report(results).groups}
    assert [key[0] for key in groups] == ["Drug", "Drug", "Clinical", "Clinical", "All", "All"]
    assert groups[("Drug", "fasttext")].mean_wss95 == pytest.approx(0.80)
    assert groups[("All", "fasttext")].n_datasets == 2
    assert groups[("All", "fasttext")].mean_wss95 == pytest.approx((0.80 + 0.63) / 2)


def test_best_feature_view_counts(results):
    title_only = [r.model_copy(update={"feature_view": "title", "wss95": r.wss95 + 0.01}) for r in results
                  if r.model == "fasttext"]
    report = aggregate_report(results + title_only)
    wins = {(w.model, w.feature_view): w.wins for w in report.view_wins}
    assert wins == {("fasttext", "title"): 2, ("dae-ff", "all"): 2}


def test_one_view_has_no_wins(results):
    assert aggregate_report(results).view_wins == []


def test_raw_csv_reproduces_the_report(tmp_path, results):
    noisy = [r.model_copy(update={"wss95": r.wss95 / 3.0, "train_seconds": r.train_seconds / 7.0}) for r in results]
    write_raw_csv(tmp_path / RAW_FILE, noisy)
    header = (tmp_path / RAW_FILE).read_text().splitlines()[0]
    assert header == "dataset,model,feature_view,repetition,half,wss95,precision95,train_seconds,n_docs"

    reread = aggregate_report(read_raw_csv(tmp_path / RAW_FILE))
    original = aggregate_report(noisy)
    for left, right in zip(original.rows, reread.rows):
        assert (left.dataset, left.model) == (right.dataset, right.model)
        assert abs(left.mean_wss95 - right.mean_wss95) <= 1e-12
        assert abs(left.mean_train_seconds - right.mean_train_seconds) <= 1e-12


def test_raw_csv_problems(tmp_path):
    with pytest.raises(ReportError):
        read_raw_csv(tmp_path / RAW_FILE)
    pd.DataFrame({"dataset": ["x"], "model": ["y"]}).to_csv(tmp_path / RAW_FILE, index=False)
    with pytest.raises(ReportError, match="wss95"):
        read_raw_csv(tmp_path / RAW_FILE)


def test_raw_csv_without_sizes(tmp_path):
    frame = pd.DataFrame([{"dataset": "ADHD", "model": "cnn", "feature_view": "all", "repetition": 0, "half": 1,
                           "wss95": 0.5, "precision95": 0.2, "train_seconds": 1.0}])
    frame.to_csv(tmp_path / RAW_FILE, index=False)
    assert read_raw_csv(tmp_path / RAW_FILE)[0].n_docs == 0


def test_reference_table(tmp_path):
    (tmp_path / "ref.csv").write_text("dataset,model,wss95\nACEInhibitors,dae-ff,.785\nADHD,dae-ff,.639\n")
    assert load_reference(tmp_path / "ref.csv") == {("ACEInhibitors", "dae-ff"): 0.785, ("ADHD", "dae-ff"): 0.639}
    (tmp_path / "bad.csv").write_text("name,score\nADHD,.6\n")
    with pytest.raises(ReportError):
        load_reference(tmp_path / "bad.csv")
    with pytest.raises(ReportError):
        load_reference(tmp_path / "missing.csv")


def test_tables_layout(results):
    reference = {("ACEInhibitors", "fasttext"): 0.785}
    text = render_tables(aggregate_report(results, reference=reference))
    assert "WSS@95% (averaged over folds)" in text
    assert "Average" in text
    assert "fasttext reference" in text
    assert "78.50%" in text
    assert "Precision at 95% recall (group averages)" in text
    assert "Failed combinations" not in text


def test_written_run_directory(tmp_path, results):
    failure = FailureRecord(dataset="ADHD", model="cnn", feature_view="all", error_code="fold_failed", message="boom")
    report = aggregate_report(results, failures=[failure])
    tables = write_report(tmp_path, report)

    assert (tmp_path / TABLES_FILE).read_text() == tables
    assert "ADHD | cnn | all | fold_failed: boom" in tables
    payload = orjson.loads((tmp_path / REPORT_FILE).read_bytes())
    assert len(payload["rows"]) == 4 and len(payload["results"]) == 16
    assert read_failures(tmp_path) == [failure]

    folds = tmp_path / FOLDS_DIR
    per_fold = pd.read_csv(folds / "wss95_ACEInhibitors.csv")
    assert list(per_fold.columns) == ["model", "feature_view", "repetition", "half", "wss95"]
    assert len(per_fold) == 8
    assert (folds / "wss95_Proton_Beam.csv").exists()
    series = pd.read_csv(folds / "train_time.csv")
    assert list(series.columns) == ["dataset", "n_docs", "model", "mean_train_seconds"]
    assert len(series) == 4


def test_no_report_means_no_failures(tmp_path):
    assert read_failures(tmp_path) == []
