from pathlib import Path

import orjson
import pandas as pd
import pytest
from typer.testing import CliRunner

from src import app
from src.evaluation.report import RAW_FILE, REPORT_FILE, TABLES_FILE

runner = CliRunner(mix_stderr=False)


def write_config(path: Path, paths, models=("fasttext",), repetitions=2) -> Path:
    models_toml = ", ".join(f'"{m}"' for m in models)
    path.write_text(
        "[run]\n"
        f'manifests = ["{paths["manifest"].as_posix()}"]\n'
        f'cache_dir = "{paths["cache"].as_posix()}"\n'
        f"models = [{models_toml}]\n"
        f'output_dir = "{(paths["root"] / "results").as_posix()}"\n'
        "seed = 7\n"
        "\n[cv]\n"
        f"repetitions = {repetitions}\n"
    )
    return path


def test_fetch_on_a_full_cache(synthetic_on_disk):
    result = runner.invoke(app, ["fetch", "-m", str(synthetic_on_disk["manifest"]), "-o", str(synthetic_on_disk["cache"])])
    assert result.exit_code == 0, result.stderr
    assert "0 fetched, 200 cached" in result.stdout


def test_fetch_dry_run_plans_batches(tmp_path, synthetic_on_disk):
    result = runner.invoke(app, ["fetch", "-m", str(synthetic_on_disk["manifest"]), "-o", str(tmp_path / "empty"),
                                 "--batch-size", "64", "--dry-run"])
    assert result.exit_code == 0
    assert "batch 4: 8 ids" in result.stdout
    assert "200 to fetch in 4 batches, 0 cached" in result.stdout


def test_missing_manifest_is_a_usage_error(tmp_path):
    missing = tmp_path / "adhd.csv"
    result = runner.invoke(app, ["fetch", "-m", str(missing)])
    assert result.exit_code == 2
    detail = orjson.loads(result.stderr.strip().splitlines()[-1])
    assert detail["error_code"] == "manifest_not_found"
    assert "adhd.csv" in detail["message"]


def test_stats_row(synthetic_on_disk):
    result = runner.invoke(app, ["stats", "-m", str(synthetic_on_disk["manifest"])])
    assert result.exit_code == 0
    assert "synthetic | 200 | 20 (10.0%) | 180 (90.0%) | 85.50%" in result.stdout


def test_stats_of_an_empty_manifest(tmp_path):
    (tmp_path / "empty.csv").write_text("doc_id,label\n")
    assert runner.invoke(app, ["stats", "-m", str(tmp_path / "empty.csv")]).exit_code == 2


def test_stats_averages_several_manifests(synthetic_on_disk, tmp_path):
    other = tmp_path / "again.csv"
    other.write_text(synthetic_on_disk["manifest"].read_text())
    result = runner.invoke(app, ["stats", "-m", str(synthetic_on_disk["manifest"]), "-m", str(other)])
    assert result.exit_code == 0
    assert len(result.stdout.strip().splitlines()) >= 4


def test_synthesize_writes_a_runnable_dataset(tmp_path):
    result = runner.invoke(app, ["synthesize", "-o", str(tmp_path / "syn"), "--embedding-dim", "8"])
    assert result.exit_code == 0
    assert (tmp_path / "syn" / "synthetic.csv").exists()
    assert (tmp_path / "syn" / "embeddings.txt").read_text().splitlines()[0].count(" ") == 8
    stats = runner.invoke(app, ["stats", "-m", str(tmp_path / "syn" / "synthetic.csv"), "--cache", str(tmp_path / "syn" / "cache")])
    assert stats.exit_code == 0


def test_benchmark_is_reproducible(tmp_path, synthetic_on_disk):
    config = write_config(tmp_path / "run.toml", synthetic_on_disk)
    first = runner.invoke(app, ["benchmark", "-c", str(config)])
    assert first.exit_code == 0, first.stderr
    run_dir = Path(first.stdout.splitlines()[0].removeprefix("run directory: "))
    assert "WSS@95% (averaged over folds)" in first.stdout
    raw = pd.read_csv(run_dir / RAW_FILE)
    assert len(raw) == 4
    assert set(raw["model"]) == {"fasttext"}

    second = runner.invoke(app, ["benchmark", "-c", str(config)])
    assert second.exit_code == 0
    again = pd.read_csv(run_dir / RAW_FILE)
    stable = [column for column in raw.columns if column != "train_seconds"]
    pd.testing.assert_frame_equal(raw[stable], again[stable])
    assert (run_dir / "config.json").exists()
    assert (run_dir / "folds" / "wss95_synthetic.csv").exists()


def test_report_rerenders_from_raw_csv(tmp_path, synthetic_on_disk):
    config = write_config(tmp_path / "run.toml", synthetic_on_disk, repetitions=1)
    run = runner.invoke(app, ["benchmark", "-c", str(config)])
    run_dir = Path(run.stdout.splitlines()[0].removeprefix("run directory: "))
    (run_dir / TABLES_FILE).unlink()

    result = runner.invoke(app, ["report", "-r", str(run_dir), "--halves", "first"])
    assert result.exit_code == 0
    assert (run_dir / TABLES_FILE).exists()
    assert orjson.loads((run_dir / REPORT_FILE).read_bytes())["halves"] == "first"


def test_report_rejects_unknown_halves(tmp_path):
    result = runner.invoke(app, ["report", "-r", str(tmp_path), "--halves", "second"])
    assert result.exit_code == 2


def test_report_without_results(tmp_path):
    assert runner.invoke(app, ["report", "-r", str(tmp_path)]).exit_code == 2


def test_benchmark_needs_embeddings_for_the_cnn(tmp_path, synthetic_on_disk):
    config = write_config(tmp_path / "run.toml", synthetic_on_disk, models=("cnn",))
    result = runner.invoke(app, ["benchmark", "-c", str(config)])
    assert result.exit_code == 2
    assert "invalid_config" in result.stderr


def test_failed_combinations_exit_one(tmp_path, synthetic_on_disk):
    config = write_config(tmp_path / "run.toml", synthetic_on_disk, models=("fasttext", "dae-ff"), repetitions=1)
    with config.open("a") as handle:
        handle.write("\n[dae_ff]\nmin_count = 100000\n")
    result = runner.invoke(app, ["benchmark", "-c", str(config)])
    assert result.exit_code == 1
    run_dir = Path(result.stdout.splitlines()[0].removeprefix("run directory: "))
    failures = orjson.loads((run_dir / REPORT_FILE).read_bytes())["failures"]
    assert [(f["model"], f["error_code"]) for f in failures] == [("dae-ff", "empty_vocabulary")]


def test_missing_config_file(tmp_path):
    assert runner.invoke(app, ["benchmark", "-c", str(tmp_path / "nope.toml")]).exit_code == 2


@pytest.mark.parametrize("command", ["fetch", "stats", "synthesize", "benchmark", "report"])
def test_every_command_has_help(command):
    assert runner.invoke(app, [command, "--help"]).exit_code == 0
