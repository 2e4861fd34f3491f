from pathlib import Path
from typing import Callable, Dict, List

import httpx
import pytest

from src.config import EndpointConfig
from src.corpus import medline
from src.corpus.schemas import DocumentRecord
from src.corpus.service import store_cache, write_manifest
from src.corpus.synthetic import SyntheticCorpus, generate_synthetic_corpus, synthetic_embeddings
from src.textprep.schemas import EmbeddingTable


@pytest.fixture(scope="session")
def synthetic_corpus() -> SyntheticCorpus:
    return generate_synthetic_corpus(seed=42)


@pytest.fixture(scope="session")
def synthetic_table(synthetic_corpus) -> EmbeddingTable:
    return synthetic_embeddings(
        [synthetic_corpus.include_pool, synthetic_corpus.exclude_pool],
        dim=16,
        seed=42,
        extra_words=synthetic_corpus.metadata_words,
    )


@pytest.fixture
def synthetic_on_disk(tmp_path, synthetic_corpus) -> Dict[str, Path]:
    """Manifest and populated cache for the 200-doc corpus."""
    manifest_path = tmp_path / "synthetic.csv"
    cache_dir = tmp_path / "cache"
    write_manifest(manifest_path, synthetic_corpus.dataset.manifest)
    store_cache(cache_dir, "synthetic", synthetic_corpus.dataset.records)
    return {"manifest": manifest_path, "cache": cache_dir, "root": tmp_path}


@pytest.fixture
def make_records() -> Callable[..., List[DocumentRecord]]:
    def make(texts: List[str], labels: List[int]) -> List[DocumentRecord]:
        return [
            DocumentRecord(doc_id=str(1000 + i), title=text, label=label)
            for i, (text, label) in enumerate(zip(texts, labels))
        ]
    return make


@pytest.fixture
def fast_endpoint() -> EndpointConfig:
    return EndpointConfig(
        base_url="https://eutils.test/entrez/eutils/",
        rate_limit=1000.0,
        batch_size=2,
        max_retries=2,
        backoff_seconds=0.0,
        max_concurrency=2,
    )


class FakeEutils:
    """Serves MEDLINE text for known ids; `fail_first` answers that many calls with a status first."""

    def __init__(self, records: Dict[str, DocumentRecord], fail_first: int = 0, status: int = 503):
        self.records = records
        self.fail_first = fail_first
        self.status = status
        self.requests: List[httpx.Request] = []

    def __call__(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        if len(self.requests) <= self.fail_first:
            return httpx.Response(self.status, text="busy")
        ids = request.url.params["id"].split(",")
        body = "\n".join(
            medline.format_record(self.records[doc_id]).replace(f"LB  - {self.records[doc_id].label}\n", "")
            for doc_id in ids if doc_id in self.records
        )
        return httpx.Response(200, text=body)

    def transport(self) -> httpx.MockTransport:
        return httpx.MockTransport(self)


@pytest.fixture
def fake_eutils() -> Callable[..., FakeEutils]:
    return FakeEutils

