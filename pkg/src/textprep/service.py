from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging
import re
import string

import numpy as np
from nltk.stem.porter import PorterStemmer

from src.config import Config
from src.errors import EmbeddingParseError, VocabularyError
from src.textprep.schemas import BowVector, EmbeddingTable, SequenceEncoding, Vocabulary

logger = logging.getLogger(__name__)

DEFAULT_STOPWORDS = Path(__file__).parent / "data" / "stopwords.txt"
DEFAULT_MAX_LEN = 600

_NON_ALNUM = re.compile(r"[\W_]+")
_LOWER_ASCII = re.compile(r"^[a-z]+$")
_STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def tokenize_minimal(text: str) -> List[str]:
    return [token for token in _NON_ALNUM.split(text.lower()) if token]


def tokenize_cnn(text: str) -> List[str]:
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(string.punctuation)
        if token and token.isalpha():
            tokens.append(token)
    return tokens


@lru_cache(maxsize=None)
def porter_stem(token: str) -> str:
    """Classic 1980 Porter stemmer; anything that is not lowercase ASCII letters passes through."""
    if not _LOWER_ASCII.match(token):
        return token
    return _STEMMER.stem(token, to_lowercase=False)


def remove_stopwords(tokens: Sequence[str], stoplist: Iterable[str]) -> List[str]:
    stoplist = stoplist if isinstance(stoplist, (set, frozenset)) else set(stoplist)
    return [token for token in tokens if token not in stoplist]


@lru_cache(maxsize=8)
def _read_stoplist(path: Path) -> FrozenSet[str]:
    words = (line.strip() for line in path.read_text(encoding="utf-8").splitlines())
    return frozenset(word for word in words if word and not word.startswith("#"))


def load_stoplist(path: Optional[Path] = None) -> FrozenSet[str]:
    return _read_stoplist(Path(path or Config.STOPWORDS_PATH or DEFAULT_STOPWORDS))


def dae_tokens(text: str, stoplist: Optional[FrozenSet[str]] = None) -> List[str]:
    stoplist = load_stoplist() if stoplist is None else stoplist
    return [porter_stem(token) for token in remove_stopwords(tokenize_minimal(text), stoplist)]


def cnn_tokens(text: str) -> List[str]:
    return tokenize_cnn(text)


def fasttext_tokens(text: str) -> List[str]:
    return tokenize_minimal(text)


def build_vocab(corpus: Sequence[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Index tokens by descending frequency, ties broken lexicographically."""
    if min_count < 1:
        raise VocabularyError(f"min_count must be >= 1, got {min_count}")
    counts = Counter(token for document in corpus for token in document)
    if not counts:
        raise VocabularyError("Cannot build a vocabulary from an empty corpus")
    kept = sorted((token for token, count in counts.items() if count >= min_count),
                  key=lambda token: (-counts[token], token))
    if not kept:
        raise VocabularyError(f"No token occurs at least {min_count} times")
    return Vocabulary.from_tokens(kept, min_count=min_count)


def _present_ids(tokens: Iterable[str], vocab: Vocabulary) -> List[int]:
    return sorted({index for index in map(vocab.lookup, tokens) if index})


def vectorize_bow(tokens: Sequence[str], vocab: Vocabulary) -> BowVector:
    if vocab.size == 0:
        raise VocabularyError("Cannot vectorize against an empty vocabulary")
    indices = _present_ids(tokens, vocab)
    return BowVector(indices=indices, values=[1.0] * len(indices), dim=vocab.size)


def bow_matrix(token_lists: Sequence[Sequence[str]], vocab: Vocabulary, dtype=np.float64) -> np.ndarray:
    """Dense binary document-term matrix; column i-1 holds vocabulary index i."""
    matrix = np.zeros((len(token_lists), vocab.size), dtype=dtype)
    for row, tokens in enumerate(token_lists):
        indices = _present_ids(tokens, vocab)
        if indices:
            matrix[row, np.asarray(indices) - 1] = 1.0
    return matrix


def encode_sequence(tokens: Sequence[str], vocab: Vocabulary, max_len: int = DEFAULT_MAX_LEN) -> SequenceEncoding:
    if max_len < 1:
        raise VocabularyError(f"max_len must be >= 1, got {max_len}")
    kept = [vocab.lookup(token) for token in tokens[:max_len]]
    return SequenceEncoding(token_ids=kept + [0] * (max_len - len(kept)), true_length=len(kept))


def encode_matrix(token_lists: Sequence[Sequence[str]], vocab: Vocabulary,
                  max_len: int = DEFAULT_MAX_LEN) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked encode_sequence ids (documents x max_len) and true lengths."""
    ids = np.zeros((len(token_lists), max_len), dtype=np.int64)
    lengths = np.zeros(len(token_lists), dtype=np.int64)
    for row, tokens in enumerate(token_lists):
        encoding = encode_sequence(tokens, vocab, max_len)
        ids[row] = encoding.token_ids
        lengths[row] = encoding.true_length
    return ids, lengths


def parse_embedding_file(path: Path, expected_dim: int = 100) -> EmbeddingTable:
    """Read GloVe-style text vectors: `token v1 ... vdim` per line."""
    path = Path(path)
    vectors = {}
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            token, raw_values = parts[0], parts[1:]
            if len(raw_values) != expected_dim:
                raise EmbeddingParseError(path, line_number, f"expected {expected_dim} values, got {len(raw_values)}")
            try:
                vector = np.array([float(value) for value in raw_values], dtype=np.float64)
            except ValueError as e:
                raise EmbeddingParseError(path, line_number, f"unreadable number ({e})") from e
            if token in vectors:
                logger.warning(f"{path}:{line_number}: duplicate token {token!r}, keeping the last vector")
            vectors[token] = vector
    return EmbeddingTable(dim=expected_dim, vectors=vectors)


def write_embedding_file(path: Path, table: EmbeddingTable) -> None:
    lines = [
        f"{token} " + " ".join(repr(float(value)) for value in vector)
        for token, vector in table.vectors.items()
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
