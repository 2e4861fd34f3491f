"""Averaged unigram embeddings feeding a linear softmax, trained from scratch by SGD."""
from typing import Any, Dict, List
import logging

import numpy as np

from src.corpus.schemas import FeatureView
from src.models.base import Screener
from src.models.sampling import oversample_minority
from src.models.schemas import FastTextConfig
from src.nn.layers import softmax
from src.nn.schemas import Optimizer, TrainConfig
from src.textprep.schemas import Vocabulary
from src.textprep.service import build_vocab, fasttext_tokens

logger = logging.getLogger(__name__)


def document_vector(embeddings: np.ndarray, ids: np.ndarray) -> np.ndarray:
    """Mean of the rows for in-vocabulary ids (repeats count); zero vector when there are none."""
    if len(ids) == 0:
        return np.zeros(embeddings.shape[1], dtype=embeddings.dtype)
    return embeddings[ids].mean(axis=0)


class FastTextScreener(Screener):
    model_type = "fasttext"

    def __init__(self, config: FastTextConfig | None = None, feature_view: FeatureView = FeatureView.ALL_FEATURES):
        super().__init__(config or FastTextConfig(), feature_view)
        self.vocab: Vocabulary | None = None
        self.embeddings: np.ndarray | None = None
        self.output_weights: np.ndarray | None = None
        self.output_bias: np.ndarray | None = None

    def default_train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            epochs=self.config.epochs, batch_size=1, learning_rate=self.config.learning_rate,
            seed=seed, optimizer=Optimizer.SGD,
        )

    def _ids(self, texts: List[str]) -> List[np.ndarray]:
        docs = []
        for text in texts:
            ids = [self.vocab.lookup(token) for token in fasttext_tokens(text)]
            docs.append(np.array([i for i in ids if i], dtype=np.int64))
        return docs

    def _fit(self, texts: List[str], labels: np.ndarray, train_config: TrainConfig) -> None:
        config = self.config
        rng = np.random.default_rng(train_config.seed)
        self.vocab = build_vocab([fasttext_tokens(text) for text in texts], config.min_count)
        dim = config.embedding_dim
        # row 0 is the unknown/padding slot and is never read
        self.embeddings = rng.uniform(-1.0 / dim, 1.0 / dim, size=(self.vocab.size + 1, dim))
        self.embeddings[0] = 0.0
        self.output_weights = np.zeros((dim, 2))
        self.output_bias = np.zeros(2)

        docs = self._ids(texts)
        order = np.arange(len(docs))
        if config.oversample:
            order = np.asarray(oversample_minority(order, labels, train_config.seed))
        total_updates = train_config.epochs * len(order)
        lr0 = train_config.learning_rate
        step = 0
        self.epoch_losses = []

        for _ in range(train_config.epochs):
            epoch_loss = 0.0
            for index in rng.permutation(order):
                lr = lr0 * (1.0 - step / total_updates)
                step += 1
                ids = docs[index]
                hidden = document_vector(self.embeddings, ids)
                probs = softmax(hidden @ self.output_weights + self.output_bias)
                epoch_loss -= np.log(max(probs[labels[index]], 1e-300))

                dlogits = probs.copy()
                dlogits[labels[index]] -= 1.0
                dhidden = self.output_weights @ dlogits
                self.output_weights -= lr * np.outer(hidden, dlogits)
                self.output_bias -= lr * dlogits
                if len(ids):
                    np.add.at(self.embeddings, ids, -lr * dhidden / len(ids))
            self.epoch_losses.append(epoch_loss / len(order))
        logger.debug(f"fasttext epoch losses: {[round(loss, 4) for loss in self.epoch_losses]}")

    def _score(self, texts: List[str]) -> np.ndarray:
        hidden = np.stack([document_vector(self.embeddings, ids) for ids in self._ids(texts)])
        return softmax(hidden @ self.output_weights + self.output_bias)[:, 1]

    def _parameters(self) -> Dict[str, np.ndarray]:
        return {
            "embeddings": self.embeddings,
            "output_weights": self.output_weights,
            "output_bias": self.output_bias,
        }

    def _extra(self) -> Dict[str, Any]:
        return {"vocabulary": self.vocab.tokens(), "min_count": self.vocab.min_count}

    @classmethod
    def from_checkpoint(cls, header: Dict[str, Any], params: Dict[str, np.ndarray]) -> "FastTextScreener":
        config = dict(header["config"])
        view = config.pop("feature_view")
        screener = cls(FastTextConfig(**config), FeatureView(view))
        screener.vocab = Vocabulary.from_tokens(header["extra"]["vocabulary"], header["extra"]["min_count"])
        screener.embeddings = params["embeddings"]
        screener.output_weights = params["output_weights"]
        screener.output_bias = params["output_bias"]
        screener.trained = True
        return screener


def train_fasttext(documents, labels, config: FastTextConfig | None = None,
                   feature_view: FeatureView = FeatureView.ALL_FEATURES) -> FastTextScreener:
    return FastTextScreener(config, feature_view).train(documents, labels)
