from pathlib import Path
from typing import Callable, Dict, Optional, Type
import logging

from src.corpus.schemas import FeatureView
from src.errors import CheckpointError, ModelValidationError
from src.models.base import Screener
from src.models.cnn import CnnScreener
from src.models.dae_ff import DaeFfScreener
from src.models.fasttext import FastTextScreener
from src.models.schemas import CnnConfig, DaeFfConfig, FastTextConfig
from src.nn.checkpoint import load_checkpoint
from src.textprep.schemas import EmbeddingTable

logger = logging.getLogger(__name__)

SCREENERS: Dict[str, Type[Screener]] = {
    DaeFfScreener.model_type: DaeFfScreener,
    CnnScreener.model_type: CnnScreener,
    FastTextScreener.model_type: FastTextScreener,
}

ScreenerFactory = Callable[[], Screener]


def create_screener(
    name: str,
    feature_view: FeatureView = FeatureView.ALL_FEATURES,
    dae_ff: Optional[DaeFfConfig] = None,
    cnn: Optional[CnnConfig] = None,
    fasttext: Optional[FastTextConfig] = None,
    embeddings: Optional[EmbeddingTable] = None,
) -> Screener:
    if name == DaeFfScreener.model_type:
        return DaeFfScreener(dae_ff, feature_view)
    if name == CnnScreener.model_type:
        if embeddings is None:
            raise ModelValidationError("the cnn screener needs a pretrained embedding table")
        return CnnScreener(cnn, feature_view, embeddings)
    if name == FastTextScreener.model_type:
        return FastTextScreener(fasttext, feature_view)
    raise ModelValidationError(f"Unknown model {name!r}; choose one of {', '.join(SCREENERS)}")


def screener_factory(name: str, feature_view: FeatureView, **kwargs) -> ScreenerFactory:
    """A fresh, untrained screener per call, so concurrent folds never share an instance."""
    create_screener(name, feature_view, **kwargs)  # fail fast on bad names or missing resources
    return lambda: create_screener(name, feature_view, **kwargs)


def load_screener(path: Path) -> Screener:
    header, params = load_checkpoint(path)
    model_type = header.get("model_type")
    screener_class = SCREENERS.get(model_type)
    if screener_class is None:
        raise CheckpointError(f"{path}: unknown model type {model_type!r}")
    logger.info(f"Loaded {model_type} checkpoint from {path}")
    return screener_class.from_checkpoint(header, params)
