"""Aggregation of fold results and the exported artifacts of a benchmark run."""
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import re

import orjson
import pandas as pd

from src.corpus.catalog import group_of
from src.errors import ReportError
from src.evaluation.schemas import (
    BenchmarkReport, FailureRecord, FoldResult, GroupRow, Halves, ReportRow, ViewWins,
)

logger = logging.getLogger(__name__)

RAW_FILE = "raw.csv"
REPORT_FILE = "report.json"
TABLES_FILE = "tables.txt"
FOLDS_DIR = "folds"

RAW_COLUMNS = ["dataset", "model", "feature_view", "repetition", "half", "wss95", "precision95", "train_seconds", "n_docs"]
KEYS = ["dataset", "model", "feature_view"]
ALL_GROUP = "All"

Reference = Dict[Tuple[str, str], float]


def results_frame(results: Sequence[FoldResult]) -> pd.DataFrame:
    frame = pd.DataFrame([result.model_dump() for result in results])
    return frame.rename(columns={"precision_at_95": "precision95"})[RAW_COLUMNS]


def write_raw_csv(path: Path, results: Sequence[FoldResult]) -> None:
    results_frame(results).to_csv(path, index=False, float_format="%.12g")


def read_raw_csv(path: Path) -> List[FoldResult]:
    path = Path(path)
    if not path.exists():
        raise ReportError(f"No raw results at {path}")
    frame = pd.read_csv(path, dtype={"dataset": str, "model": str, "feature_view": str})
    missing = set(RAW_COLUMNS) - set(frame.columns) - {"n_docs"}
    if missing:
        raise ReportError(f"{path} is missing column(s): {', '.join(sorted(missing))}")
    if "n_docs" not in frame.columns:
        frame["n_docs"] = 0
    frame = frame.rename(columns={"precision95": "precision_at_95"})
    return [FoldResult(**row) for row in frame.to_dict(orient="records")]


def load_reference(path: Path) -> Reference:
    """Published scores as CSV `dataset,model,wss95` (fractions, e.g. .785)."""
    path = Path(path)
    if not path.exists():
        raise ReportError(f"No reference table at {path}")
    frame = pd.read_csv(path, dtype={"dataset": str, "model": str})
    if not {"dataset", "model", "wss95"} <= set(frame.columns):
        raise ReportError(f"{path} must have the columns dataset,model,wss95")
    return {(row.dataset, row.model): float(row.wss95) for row in frame.itertuples(index=False)}


def _group_rows(rows: pd.DataFrame) -> List[GroupRow]:
    rows = rows.assign(group=[(group_of(name).value if group_of(name) else None) for name in rows["dataset"]])
    groups = []
    for group in [*(g for g in ("Drug", "Clinical", "SWIFT") if g in set(rows["group"])), ALL_GROUP]:
        members = rows if group == ALL_GROUP else rows[rows["group"] == group]
        for (model, view), block in members.groupby(["model", "feature_view"], sort=False):
            groups.append(GroupRow(
                group=group, model=model, feature_view=view, n_datasets=len(block),
                mean_wss95=float(block["mean_wss95"].mean()),
                mean_precision95=float(block["mean_precision95"].mean()),
            ))
    return groups


def _view_wins(rows: pd.DataFrame) -> List[ViewWins]:
    if rows["feature_view"].nunique() < 2:
        return []
    wins: Dict[Tuple[str, str], int] = {}
    for (model, _), block in rows.groupby(["model", "dataset"], sort=False):
        best = block.sort_values(["mean_wss95", "feature_view"], ascending=[False, True]).iloc[0]
        wins[(model, best["feature_view"])] = wins.get((model, best["feature_view"]), 0) + 1
    return [ViewWins(model=model, feature_view=view, wins=count) for (model, view), count in wins.items()]


def aggregate_report(
    results: Sequence[FoldResult],
    halves: Halves = "both",
    reference: Optional[Reference] = None,
    failures: Sequence[FailureRecord] = (),
) -> BenchmarkReport:
    """Per (dataset, model, feature view) means over the folds.

    halves="first" keeps one evaluation per repetition instead of both directions.
    """
    if not results:
        raise ReportError("No fold results to aggregate")
    frame = results_frame(results)
    if halves == "first":
        frame = frame[frame["half"] == 0]
        if frame.empty:
            raise ReportError("No first-half results to aggregate")

    grouped = frame.groupby(KEYS, sort=False)
    rows = grouped.agg(
        n_docs=("n_docs", "max"),
        n_folds=("wss95", "size"),
        mean_wss95=("wss95", "mean"),
        std_wss95=("wss95", lambda values: float(values.std(ddof=0))),
        mean_precision95=("precision95", "mean"),
        mean_train_seconds=("train_seconds", "mean"),
    ).reset_index()

    report_rows = []
    for row in rows.to_dict(orient="records"):
        ref = (reference or {}).get((row["dataset"], row["model"]))
        report_rows.append(ReportRow(
            **row,
            reference_wss95=ref,
            abs_delta_pp=abs(row["mean_wss95"] - ref) * 100.0 if ref is not None else None,
        ))

    kept = {(r.dataset, r.model, r.feature_view, r.repetition, r.half) for r in frame.itertuples(index=False)}
    return BenchmarkReport(
        halves=halves,
        rows=report_rows,
        groups=_group_rows(rows),
        view_wins=_view_wins(rows),
        failures=list(failures),
        results=[r for r in results if (r.dataset, r.model, r.feature_view, r.repetition, r.half) in kept],
    )


def _rows_frame(report: BenchmarkReport) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in report.rows])


def _primary_view(frame: pd.DataFrame) -> str:
    views = list(dict.fromkeys(frame["feature_view"]))
    return "all" if "all" in views else views[0]


def _percent(frame: pd.DataFrame) -> str:
    return frame.to_string(float_format=lambda value: f"{value:.2%}", na_rep="-")


def render_wss_table(report: BenchmarkReport) -> str:
    """Datasets down, models across: mean WSS@95%, with reference and absolute delta when supplied."""
    frame = _rows_frame(report)
    frame = frame[frame["feature_view"] == _primary_view(frame)]
    table = frame.pivot(index="dataset", columns="model", values="mean_wss95")
    table = table.reindex(index=list(dict.fromkeys(frame["dataset"])), columns=list(dict.fromkeys(frame["model"])))
    table.loc["Average"] = table.mean()
    if frame["reference_wss95"].notna().any():
        for model in list(dict.fromkeys(frame["model"])):
            block = frame[frame["model"] == model].set_index("dataset")
            table[f"{model} reference"] = block["reference_wss95"]
            table[f"{model} |delta| pp"] = block["abs_delta_pp"] / 100.0
    return _percent(table)


def render_feature_view_table(report: BenchmarkReport) -> str:
    """Mean WSS@95% per dataset and model for every feature view."""
    frame = _rows_frame(report)
    table = frame.pivot_table(index=["dataset", "model"], columns="feature_view", values="mean_wss95", sort=False)
    text = _percent(table)
    if report.view_wins:
        wins = pd.DataFrame([win.model_dump() for win in report.view_wins]).pivot(
            index="model", columns="feature_view", values="wins",
        ).fillna(0).astype(int)
        text += "\n\nBest feature view counts\n" + wins.to_string()
    return text


def render_precision_table(report: BenchmarkReport) -> str:
    """Group averages down, models across: mean precision at 95% recall."""
    frame = pd.DataFrame([group.model_dump() for group in report.groups])
    frame = frame[frame["feature_view"] == _primary_view(frame)]
    table = frame.pivot(index="group", columns="model", values="mean_precision95")
    table = table.reindex(index=list(dict.fromkeys(frame["group"])), columns=list(dict.fromkeys(frame["model"])))
    return _percent(table)


def render_tables(report: BenchmarkReport) -> str:
    sections = [
        ("WSS@95% (averaged over folds)", render_wss_table(report)),
        ("WSS@95% by input document features", render_feature_view_table(report)),
        ("Precision at 95% recall (group averages)", render_precision_table(report)),
    ]
    if report.failures:
        failed = "\n".join(f"{f.dataset} | {f.model} | {f.feature_view} | {f.error_code}: {f.message}"
                           for f in report.failures)
        sections.append(("Failed combinations", failed))
    return "\n\n".join(f"{title}\n{'=' * len(title)}\n{body}" for title, body in sections) + "\n"


def _file_safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_")


def write_fold_exports(run_dir: Path, report: BenchmarkReport) -> None:
    """Per-fold WSS for box plots and the dataset size vs. training time series."""
    folds_dir = Path(run_dir) / FOLDS_DIR
    folds_dir.mkdir(parents=True, exist_ok=True)
    frame = results_frame(report.results)
    for dataset, block in frame.groupby("dataset", sort=False):
        block[["model", "feature_view", "repetition", "half", "wss95"]].to_csv(
            folds_dir / f"wss95_{_file_safe(dataset)}.csv", index=False, float_format="%.12g",
        )
    series = _rows_frame(report)[["dataset", "n_docs", "model", "mean_train_seconds"]]
    series.groupby(["dataset", "n_docs", "model"], sort=False).mean().reset_index().to_csv(
        folds_dir / "train_time.csv", index=False, float_format="%.6f",
    )


def write_report(run_dir: Path, report: BenchmarkReport) -> str:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / REPORT_FILE).write_bytes(orjson.dumps(report.model_dump(mode="json"), option=orjson.OPT_INDENT_2))
    tables = render_tables(report)
    (run_dir / TABLES_FILE).write_text(tables)
    write_fold_exports(run_dir, report)
    logger.info(f"Wrote report for {len(report.rows)} combination(s) to {run_dir}")
    return tables


def read_failures(run_dir: Path) -> List[FailureRecord]:
    path = Path(run_dir) / REPORT_FILE
    if not path.exists():
        return []
    try:
        payload = orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise ReportError(f"{path}: {e}") from e
    return [FailureRecord(**failure) for failure in payload.get("failures", [])]
