from pathlib import Path
from typing import Iterable, List, Optional, Sequence
import logging

from pydantic import ValidationError

from src.corpus import medline
from src.corpus.catalog import group_of
from src.corpus.schemas import (
    CorpusStats, Dataset, DatasetGroup, DatasetManifest, DocumentRecord,
    FeatureView, ManifestEntry,
)
from src.errors import (
    DatasetValidationError, DuplicateDocumentId, ManifestNotFound, ManifestParseError,
)
from src.evaluation.metrics import max_wss_at_recall

logger = logging.getLogger(__name__)

MANIFEST_HEADER = "doc_id,label"
RECORD_SUFFIX = ".txt"
FETCH_LOG = "fetch.log"


def parse_manifest(path: Path, name: Optional[str] = None, group: Optional[DatasetGroup] = None) -> DatasetManifest:
    """Read a `doc_id,label` CSV; the dataset name defaults to the file stem."""
    path = Path(path)
    if not path.exists():
        raise ManifestNotFound(path)

    lines = path.read_text(encoding="utf-8-sig").splitlines()
    if not lines or not any(line.strip() for line in lines):
        raise DatasetValidationError(f"Manifest {path} is empty")
    if lines[0].strip() != MANIFEST_HEADER:
        raise ManifestParseError(path, 1, f"expected header `{MANIFEST_HEADER}`, got `{lines[0].strip()}`")

    entries: List[ManifestEntry] = []
    seen = set()
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.strip().split(",")
        if len(parts) != 2 or not parts[0].strip():
            raise ManifestParseError(path, line_number, f"expected `doc_id,label`, got `{line.strip()}`")
        doc_id, label = parts[0].strip(), parts[1].strip()
        if label not in ("0", "1"):
            raise ManifestParseError(path, line_number, f"label must be 0 or 1, got `{label}`")
        if doc_id in seen:
            raise DuplicateDocumentId(doc_id, line_number)
        seen.add(doc_id)
        entries.append(ManifestEntry(doc_id=doc_id, label=int(label)))

    if not entries:
        raise DatasetValidationError(f"Manifest {path} has a header but no entries")

    name = name or path.stem
    try:
        return DatasetManifest(name=name, group=group or group_of(name), entries=entries)
    except ValidationError as e:
        raise DatasetValidationError(f"Manifest {path}: {e.errors()[0]['msg']}") from e


def write_manifest(path: Path, manifest: DatasetManifest) -> None:
    rows = [MANIFEST_HEADER] + [f"{entry.doc_id},{entry.label}" for entry in manifest.entries]
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")


def compose_text(record: DocumentRecord, view: FeatureView) -> str:
    if view == FeatureView.TITLE_ONLY:
        fields = [record.title]
    elif view == FeatureView.ABSTRACT_ONLY:
        fields = [record.abstract]
    elif view == FeatureView.TITLE_ABSTRACT:
        fields = [record.title, record.abstract]
    else:
        fields = [record.title, record.abstract, record.authors, record.journal]
    return " ".join(field for field in fields if field).strip()


def compute_stats(manifest: DatasetManifest, records: Optional[Sequence[DocumentRecord]] = None) -> CorpusStats:
    n_total = len(manifest.entries)
    n_included = sum(manifest.labels)
    missing = None
    if records is not None:
        missing = sum(1 for record in records if not record.abstract) / len(records) if records else 0.0
    return CorpusStats(
        name=manifest.name,
        group=manifest.group,
        n_total=n_total,
        n_included=n_included,
        included_fraction=n_included / n_total,
        max_wss95=max_wss_at_recall(n_total, n_included, 0.95),
        missing_abstract_fraction=missing,
    )


def average_stats(stats: Sequence[CorpusStats], name: str = "Average") -> CorpusStats:
    """The averaged row printed under a block of datasets."""
    if not stats:
        raise DatasetValidationError("Cannot average an empty list of datasets")
    count = len(stats)
    missing = [s.missing_abstract_fraction for s in stats if s.missing_abstract_fraction is not None]
    return CorpusStats(
        name=name,
        n_total=round(sum(s.n_total for s in stats) / count),
        n_included=round(sum(s.n_included for s in stats) / count),
        included_fraction=sum(s.included_fraction for s in stats) / count,
        max_wss95=sum(s.max_wss95 for s in stats) / count,
        missing_abstract_fraction=sum(missing) / len(missing) if missing else None,
    )


def group_averages(stats: Sequence[CorpusStats]) -> List[CorpusStats]:
    rows = []
    for group in DatasetGroup:
        members = [s for s in stats if s.group == group]
        if members:
            rows.append(average_stats(members, name=f"Average {group.value}"))
    rows.append(average_stats(stats, name="Average (All datasets)"))
    return rows


def dataset_cache_dir(cache_dir: Path, dataset_name: str) -> Path:
    return Path(cache_dir) / dataset_name


def record_path(cache_dir: Path, dataset_name: str, doc_id: str) -> Path:
    return dataset_cache_dir(cache_dir, dataset_name) / f"{doc_id}{RECORD_SUFFIX}"


def store_cache(cache_dir: Path, dataset_name: str, records: Iterable[DocumentRecord]) -> int:
    target = dataset_cache_dir(cache_dir, dataset_name)
    target.mkdir(parents=True, exist_ok=True)
    count = 0
    for record in records:
        medline.write_record_file(target / f"{record.doc_id}{RECORD_SUFFIX}", record)
        count += 1
    return count


def cached_ids(cache_dir: Path, dataset_name: str, doc_ids: Sequence[str]) -> List[str]:
    return [doc_id for doc_id in doc_ids if record_path(cache_dir, dataset_name, doc_id).exists()]


def load_cached_records(cache_dir: Path, dataset_name: str, doc_ids: Sequence[str]) -> List[DocumentRecord]:
    return [medline.read_record_file(record_path(cache_dir, dataset_name, doc_id)) for doc_id in doc_ids]


def load_dataset(manifest: DatasetManifest, cache_dir: Path) -> Dataset:
    """Join a manifest with its cache; labels always come from the manifest."""
    missing = missing_records(manifest, cache_dir)
    if missing:
        raise DatasetValidationError(
            f"{len(missing)} of {len(manifest.entries)} records of {manifest.name} are not cached "
            f"under {dataset_cache_dir(cache_dir, manifest.name)}; run `fetch` first"
        )
    records = load_cached_records(cache_dir, manifest.name, manifest.doc_ids)
    records = [
        record.model_copy(update={"label": entry.label})
        for record, entry in zip(records, manifest.entries)
    ]
    logger.info(f"Loaded {len(records)} records for {manifest.name}")
    return Dataset(manifest=manifest, records=records)


def plan_batches(doc_ids: Sequence[str], batch_size: int) -> List[List[str]]:
    if batch_size < 1:
        raise DatasetValidationError(f"batch_size must be >= 1, got {batch_size}")
    return [list(doc_ids[i:i + batch_size]) for i in range(0, len(doc_ids), batch_size)]


def missing_records(manifest: DatasetManifest, cache_dir: Path) -> List[str]:
    present = set(cached_ids(cache_dir, manifest.name, manifest.doc_ids))
    return [doc_id for doc_id in manifest.doc_ids if doc_id not in present]
