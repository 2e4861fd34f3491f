from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Sequence
import logging

import numpy as np
from pydantic import BaseModel

from src.corpus.schemas import DocumentRecord, FeatureView
from src.corpus.service import compose_text
from src.errors import ModelValidationError, NumericError
from src.models.sampling import check_binary_labels
from src.models.schemas import RankedPrediction
from src.nn.checkpoint import save_checkpoint
from src.nn.schemas import TrainConfig

logger = logging.getLogger(__name__)


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Independent child seeds for the stages of one training run."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


class Screener(ABC):
    """Trains on labeled documents, then scores documents so that higher means more likely included."""

    model_type: ClassVar[str]

    def __init__(self, config: BaseModel, feature_view: FeatureView = FeatureView.ALL_FEATURES):
        self.config = config
        self.feature_view = FeatureView(feature_view)
        self.trained = False
        self.epoch_losses: List[float] = []

    def texts(self, documents: Sequence[DocumentRecord]) -> List[str]:
        return [compose_text(document, self.feature_view) for document in documents]

    @abstractmethod
    def default_train_config(self, seed: int) -> TrainConfig:
        ...

    @abstractmethod
    def _fit(self, texts: List[str], labels: np.ndarray, train_config: TrainConfig) -> None:
        ...

    @abstractmethod
    def _score(self, texts: List[str]) -> np.ndarray:
        ...

    @abstractmethod
    def _parameters(self) -> Dict[str, np.ndarray]:
        ...

    def _extra(self) -> Dict[str, Any]:
        return {}

    def train(self, documents: Sequence[DocumentRecord], labels: Sequence[int],
              train_config: Optional[TrainConfig] = None) -> "Screener":
        if len(documents) != len(labels):
            raise ModelValidationError(f"{len(documents)} documents but {len(labels)} labels")
        labels = check_binary_labels(labels)
        train_config = train_config or self.default_train_config(self.config.seed)
        self._fit(self.texts(documents), labels, train_config)
        self.trained = True
        return self

    def score(self, documents: Sequence[DocumentRecord]) -> List[RankedPrediction]:
        if not self.trained:
            raise ModelValidationError(f"{self.model_type} screener must be trained before scoring")
        if not documents:
            return []
        scores = np.asarray(self._score(self.texts(documents)), dtype=np.float64)
        if not np.all(np.isfinite(scores)):
            raise NumericError(f"{self.model_type} produced non-finite scores")
        return [RankedPrediction(doc_id=document.doc_id, score=float(score))
                for document, score in zip(documents, scores)]

    def save(self, path: Path) -> None:
        if not self.trained:
            raise ModelValidationError("only trained screeners can be saved")
        config = {**self.config.model_dump(mode="json"), "feature_view": self.feature_view.value}
        save_checkpoint(path, self.model_type, config, self._parameters(), self._extra())
        logger.info(f"Saved {self.model_type} checkpoint to {path}")
