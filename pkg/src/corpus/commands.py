from pathlib import Path
from typing import Annotated, List, Optional
import logging

import typer

from src.config import Config
from src.corpus.client import fetch_records
from src.corpus.service import (
    compute_stats, group_averages, load_dataset, missing_records, parse_manifest, plan_batches,
    store_cache, write_manifest,
)
from src.corpus.synthetic import generate_synthetic_corpus, synthetic_embeddings
from src.errors import handle_errors
from src.textprep.service import write_embedding_file

logger = logging.getLogger(__name__)

STATS_HEADER = "Dataset | # Citations | Included | Excluded | Maximum WSS@95%"


@handle_errors
def fetch(
    manifest: Annotated[Path, typer.Option("--manifest", "-m", help="Manifest CSV with `doc_id,label` rows")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Cache directory")] = Config.CACHE_DIR,
    batch_size: Annotated[Optional[int], typer.Option(help="Ids per API call")] = None,
    dry_run: Annotated[bool, typer.Option("--dry-run", help="Print the planned batches without any network call")] = False,
) -> None:
    """Download and cache every record of a dataset manifest."""
    dataset_manifest = parse_manifest(manifest)
    endpoint = Config.ENDPOINT
    if batch_size is not None:
        endpoint = endpoint.model_copy(update={"batch_size": batch_size})

    if dry_run:
        todo = missing_records(dataset_manifest, out)
        batches = plan_batches(todo, endpoint.batch_size)
        for i, batch in enumerate(batches, start=1):
            typer.echo(f"batch {i}: {len(batch)} ids ({batch[0]} .. {batch[-1]})")
        typer.echo(
            f"{len(todo)} to fetch in {len(batches)} batches, "
            f"{len(dataset_manifest.entries) - len(todo)} cached"
        )
        return

    _, summary = fetch_records(dataset_manifest, out, endpoint)
    line = f"{summary.fetched} fetched, {summary.cached} cached"
    if summary.missing:
        line += f", {len(summary.missing)} missing at source"
    typer.echo(line)


@handle_errors
def stats(
    manifest: Annotated[List[Path], typer.Option("--manifest", "-m", help="One or more manifest CSVs")],
    cache: Annotated[Optional[Path], typer.Option(help="Cache directory; adds the missing-abstract column")] = None,
) -> None:
    """Print dataset statistics rows, one per manifest, plus averages for several."""
    rows = []
    for path in manifest:
        dataset_manifest = parse_manifest(path)
        records = load_dataset(dataset_manifest, cache).records if cache is not None else None
        rows.append(compute_stats(dataset_manifest, records))

    header = STATS_HEADER + (" | Missing abstracts" if cache is not None else "")
    typer.echo(header)
    for row in rows:
        typer.echo(row.table_row())
    if len(rows) > 1:
        for row in group_averages(rows):
            typer.echo(row.table_row())


@handle_errors
def synthesize(
    out: Annotated[Path, typer.Option("--out", "-o", help="Directory for manifest, cache and embeddings")],
    n_docs: Annotated[int, typer.Option(min=4)] = 200,
    n_includes: Annotated[int, typer.Option(min=2)] = 20,
    seed: int = 42,
    embedding_dim: Annotated[int, typer.Option(min=1)] = 100,
    background_vocab: Annotated[int, typer.Option(min=0)] = 0,
    name: str = "synthetic",
) -> None:
    """Write a seeded synthetic dataset so benchmarks can run offline."""
    corpus = generate_synthetic_corpus(
        n_docs=n_docs, n_includes=n_includes, seed=seed, background_vocab=background_vocab, name=name,
    )
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / f"{name}.csv"
    cache_dir = out / "cache"
    embedding_path = out / "embeddings.txt"

    write_manifest(manifest_path, corpus.dataset.manifest)
    store_cache(cache_dir, name, corpus.dataset.records)
    table = synthetic_embeddings(
        [corpus.include_pool, corpus.exclude_pool],
        dim=embedding_dim,
        seed=seed,
        extra_words=corpus.background + corpus.metadata_words,
    )
    write_embedding_file(embedding_path, table)

    logger.info(f"Synthetic corpus {name}: {n_docs} docs, {n_includes} includes, seed {seed}")
    typer.echo(f"manifest: {manifest_path}")
    typer.echo(f"cache: {cache_dir}")
    typer.echo(f"embeddings: {embedding_path}")
