"""Seeded two-topic corpus standing in for a screening dataset in tests and offline runs."""
from typing import List, NamedTuple, Sequence

import numpy as np

from src.corpus.schemas import Dataset, DatasetManifest, DocumentRecord, ManifestEntry
from src.errors import DatasetValidationError
from src.textprep.schemas import EmbeddingTable
from src.textprep.service import load_stoplist, porter_stem

_CONSONANTS = list("bcdfghjklmnpqrtvwz")
_VOWELS = list("aeiou")
TITLE_TOKENS = 8


class SyntheticCorpus(NamedTuple):
    dataset: Dataset
    include_pool: List[str]
    exclude_pool: List[str]
    background: List[str]
    metadata_words: List[str]


def pseudo_words(count: int, rng: np.random.Generator, exclude: Sequence[str] = ()) -> List[str]:
    """Unique CVCVC words that the stemmer leaves unchanged and the stoplist does not drop."""
    stoplist = load_stoplist()
    taken = set(exclude)
    words: List[str] = []
    while len(words) < count:
        letters = [
            rng.choice(_CONSONANTS), rng.choice(_VOWELS), rng.choice(_CONSONANTS),
            rng.choice(_VOWELS), rng.choice(_CONSONANTS),
        ]
        word = "".join(letters)
        if word in taken or word in stoplist or porter_stem(word) != word:
            continue
        taken.add(word)
        words.append(word)
    return words


def generate_synthetic_corpus(
    n_docs: int = 200,
    n_includes: int = 20,
    pool_size: int = 50,
    purity: float = 0.8,
    min_length: int = 30,
    max_length: int = 60,
    seed: int = 42,
    background_vocab: int = 0,
    background_rate: float = 0.5,
    name: str = "synthetic",
) -> SyntheticCorpus:
    """Includes draw `purity` of their topic tokens from pool A, excludes from pool B.

    With `background_vocab` > 0 each token is first replaced, with probability
    `background_rate`, by a word from a shared topic-neutral vocabulary.
    """
    if not 0 < n_includes < n_docs:
        raise DatasetValidationError(f"need 0 < n_includes < n_docs, got {n_includes} of {n_docs}")
    if not 1 <= min_length <= max_length:
        raise DatasetValidationError(f"bad length range {min_length}..{max_length}")

    rng = np.random.default_rng(seed)
    include_pool = pseudo_words(pool_size, rng)
    exclude_pool = pseudo_words(pool_size, rng, exclude=include_pool)
    background = pseudo_words(background_vocab, rng, exclude=include_pool + exclude_pool)
    metadata_words = pseudo_words(25, rng, exclude=include_pool + exclude_pool + background)
    surnames, journals = metadata_words[:20], metadata_words[20:]

    labels = np.zeros(n_docs, dtype=int)
    labels[rng.choice(n_docs, size=n_includes, replace=False)] = 1

    records = []
    for i, label in enumerate(labels):
        own, other = (include_pool, exclude_pool) if label else (exclude_pool, include_pool)
        length = int(rng.integers(min_length, max_length + 1))
        tokens = []
        for _ in range(length):
            if background and rng.random() < background_rate:
                tokens.append(background[rng.integers(len(background))])
            elif rng.random() < purity:
                tokens.append(own[rng.integers(len(own))])
            else:
                tokens.append(other[rng.integers(len(other))])
        authors = [surnames[j].capitalize() for j in rng.choice(len(surnames), size=2, replace=False)]
        records.append(DocumentRecord(
            doc_id=str(100000 + i),
            title=" ".join(tokens[:TITLE_TOKENS]).capitalize(),
            abstract=" ".join(tokens[TITLE_TOKENS:]),
            authors=", ".join(authors),
            journal=f"{journals[rng.integers(len(journals))].capitalize()} Journal",
            label=int(label),
        ))

    manifest = DatasetManifest(
        name=name,
        entries=[ManifestEntry(doc_id=record.doc_id, label=record.label) for record in records],
    )
    return SyntheticCorpus(
        dataset=Dataset(manifest=manifest, records=records),
        include_pool=include_pool,
        exclude_pool=exclude_pool,
        background=background,
        metadata_words=metadata_words,
    )


def synthetic_embeddings(
    pools: Sequence[Sequence[str]],
    dim: int = 100,
    seed: int = 42,
    noise: float = 0.3,
    extra_words: Sequence[str] = (),
) -> EmbeddingTable:
    """Clustered vectors: each pool word is its pool centroid plus gaussian noise."""
    rng = np.random.default_rng(seed)
    vectors = {}
    for pool in pools:
        centroid = rng.normal(0.0, 1.0, size=dim)
        for word in pool:
            vectors[word] = centroid + rng.normal(0.0, noise, size=dim)
    for word in extra_words:
        vectors[word] = rng.normal(0.0, 1.0, size=dim)
    return EmbeddingTable(dim=dim, vectors=vectors)
