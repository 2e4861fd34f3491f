"""Batch client for the literature API (E-utilities efetch, MEDLINE text)."""
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple
import asyncio
import logging
import time

import httpx
from asgiref.sync import async_to_sync

from src.config import Config, EndpointConfig
from src.corpus import medline
from src.corpus.schemas import DatasetManifest, DocumentRecord, FetchLogEntry, FetchSummary
from src.corpus.service import (
    FETCH_LOG, dataset_cache_dir, load_cached_records, missing_records, plan_batches, store_cache,
)
from src.errors import FetchError

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class RateLimiter:
    """Spaces request starts at least 1/rate seconds apart across all tasks."""

    def __init__(self, requests_per_second: float):
        self.interval = 1.0 / requests_per_second
        self._next_slot = 0.0
        self._lock = asyncio.Lock()

    async def acquire(self) -> None:
        async with self._lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self.interval
        if wait > 0:
            await asyncio.sleep(wait)


class EutilsClient:
    def __init__(self, endpoint: EndpointConfig, transport: Optional[httpx.AsyncBaseTransport] = None):
        self.endpoint = endpoint
        self.rate_limiter = RateLimiter(endpoint.rate_limit)
        self.semaphore = asyncio.Semaphore(endpoint.max_concurrency)
        self.client = httpx.AsyncClient(
            base_url=endpoint.base_url,
            timeout=endpoint.timeout,
            transport=transport,
        )
        self.api_calls = 0

    async def aclose(self) -> None:
        await self.client.aclose()

    def _params(self, batch: List[str]) -> Dict[str, str]:
        params = {
            "db": "pubmed",
            "id": ",".join(batch),
            "rettype": "medline",
            "retmode": "text",
            "tool": self.endpoint.tool,
        }
        if self.endpoint.email:
            params["email"] = self.endpoint.email
        if self.endpoint.api_key:
            params["api_key"] = self.endpoint.api_key
        return params

    async def fetch_batch(self, batch: List[str]) -> str:
        """One efetch call, retried with exponential backoff on transport errors, 429 and 5xx."""
        retries = 0
        async with self.semaphore:
            while True:
                await self.rate_limiter.acquire()
                self.api_calls += 1
                try:
                    response = await self.client.get("efetch.fcgi", params=self._params(batch))
                    if response.status_code < 400:
                        return response.text
                    reason = f"HTTP {response.status_code}"
                    if response.status_code not in RETRYABLE_STATUS:
                        raise FetchError(batch, reason)
                except httpx.TransportError as e:
                    reason = f"{type(e).__name__}: {e}"

                if retries >= self.endpoint.max_retries:
                    raise FetchError(batch, f"{reason} after {retries} retries")
                wait_time = self.endpoint.backoff_seconds * (2 ** retries)
                retries += 1
                logger.warning(f"efetch failed ({reason}); retrying in {wait_time:.1f}s ({retries}/{self.endpoint.max_retries})")
                await asyncio.sleep(wait_time)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class FetchLog:
    def __init__(self, path: Path):
        self.path = path

    def append(self, doc_ids: List[str], status: str) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        entry = FetchLogEntry(timestamp=_now(), doc_ids=doc_ids, status=status)
        with self.path.open("a", encoding="utf-8", newline="\n") as handle:
            handle.write(entry.to_line() + "\n")

    def read(self) -> List[FetchLogEntry]:
        if not self.path.exists():
            return []
        return [FetchLogEntry.from_line(line) for line in self.path.read_text(encoding="utf-8").splitlines() if line]


def fetch_log_for(cache_dir: Path, dataset_name: str) -> FetchLog:
    return FetchLog(dataset_cache_dir(cache_dir, dataset_name) / FETCH_LOG)


async def afetch_records(
    manifest: DatasetManifest,
    cache_dir: Path,
    endpoint: Optional[EndpointConfig] = None,
    transport: Optional[httpx.AsyncBaseTransport] = None,
) -> Tuple[List[DocumentRecord], FetchSummary]:
    """Fill the cache for every manifest id not cached yet, then return all records in manifest order."""
    endpoint = endpoint or Config.ENDPOINT
    labels = dict(zip(manifest.doc_ids, manifest.labels))
    todo = missing_records(manifest, cache_dir)
    summary = FetchSummary(dataset=manifest.name, fetched=0, cached=len(manifest.entries) - len(todo))

    if todo:
        log = fetch_log_for(cache_dir, manifest.name)
        write_lock = asyncio.Lock()
        client = EutilsClient(endpoint, transport=transport)

        async def run_batch(batch: List[str]) -> None:
            try:
                text = await client.fetch_batch(batch)
            except FetchError:
                async with write_lock:
                    log.append(batch, "error")
                raise

            parsed = {}
            for fields in medline.parse_medline(text):
                if fields.get(medline.TAG_ID):
                    parsed[fields[medline.TAG_ID]] = fields
            records, absent = [], []
            for doc_id in batch:
                if doc_id in parsed:
                    records.append(medline.to_document(parsed[doc_id], label=labels[doc_id], doc_id=doc_id))
                else:
                    absent.append(doc_id)
                    records.append(DocumentRecord(doc_id=doc_id, label=labels[doc_id]))

            async with write_lock:
                store_cache(cache_dir, manifest.name, records)
                log.append(batch, "ok")
                for doc_id in absent:
                    logger.warning(f"{manifest.name}: id {doc_id} not found at source; cached as empty record")
                    log.append([doc_id], "missing")
                summary.fetched += len(batch) - len(absent)
                summary.missing.extend(absent)

        try:
            outcomes = await asyncio.gather(
                *(run_batch(batch) for batch in plan_batches(todo, endpoint.batch_size)),
                return_exceptions=True,
            )
        finally:
            summary.api_calls = client.api_calls
            await client.aclose()

        failures = [outcome for outcome in outcomes if isinstance(outcome, BaseException)]
        if failures:
            for failure in failures[1:]:
                logger.error(f"{manifest.name}: {failure}")
            raise failures[0]

    logger.info(
        f"{manifest.name}: {summary.fetched} fetched, {summary.cached} cached, "
        f"{len(summary.missing)} missing, {summary.api_calls} API calls"
    )
    records = load_cached_records(cache_dir, manifest.name, manifest.doc_ids)
    return records, summary


fetch_records = async_to_sync(afetch_records)
