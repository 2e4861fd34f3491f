"""Multi-channel 1D CNN over a frozen pretrained embedding matrix."""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np

from src.corpus.schemas import FeatureView
from src.errors import ModelValidationError
from src.models.base import Screener
from src.models.sampling import oversample_minority
from src.models.schemas import CnnConfig, supervised_train_config
from src.nn.layers import (
    conv1d_backward_batch, conv1d_forward_batch, dropout, glorot_uniform, global_max_pool_backward_batch,
    global_max_pool_batch, init_conv1d, linear_backward, relu, softmax,
)
from src.nn.losses import cross_entropy, softmax_cross_entropy_grad
from src.nn.optim import optimizer_step
from src.nn.schemas import Conv1DLayer, TrainConfig
from src.textprep.schemas import EmbeddingTable, Vocabulary
from src.textprep.service import build_vocab, cnn_tokens, encode_matrix

logger = logging.getLogger(__name__)

SCORE_BATCH = 256


@dataclass
class ForwardCache:
    inputs: np.ndarray
    conv_pre: List[np.ndarray]
    argmax: List[np.ndarray]
    pooled_dropped: np.ndarray
    dropout_mask: np.ndarray
    dense_pre: np.ndarray
    dense_out: np.ndarray


def init_cnn_params(config: CnnConfig, rng: np.random.Generator, dtype=np.float64) -> Dict[str, np.ndarray]:
    params = {}
    for i, width in enumerate(config.channels):
        layer = init_conv1d(width, config.embedding_dim, config.filters_per_channel, rng, dtype)
        params[f"conv{i}_W"], params[f"conv{i}_b"] = layer.weights, layer.bias
    pooled = len(config.channels) * config.filters_per_channel
    params["dense_W"] = glorot_uniform(pooled, config.dense_units, rng, dtype)
    params["dense_b"] = np.zeros(config.dense_units, dtype=dtype)
    params["out_W"] = glorot_uniform(config.dense_units, 2, rng, dtype)
    params["out_b"] = np.zeros(2, dtype=dtype)
    return params


def _conv_layer(params: Dict[str, np.ndarray], config: CnnConfig, i: int) -> Conv1DLayer:
    return Conv1DLayer(config.channels[i], config.embedding_dim, params[f"conv{i}_W"], params[f"conv{i}_b"])


def trim_batch(ids: np.ndarray, widest_kernel: int) -> np.ndarray:
    """Cut trailing padding, keeping one all-zero window for the widest kernel.

    Every window past the last real token sees only zero vectors and yields the
    bias, so one such window per kernel reproduces the fully padded max pool.
    """
    nonzero = np.flatnonzero(ids.any(axis=0))
    used = int(nonzero[-1]) + 1 if len(nonzero) else 0
    return ids[:, :min(ids.shape[1], used + widest_kernel)]


def cnn_forward(params: Dict[str, np.ndarray], embeddings: np.ndarray, ids: np.ndarray, config: CnnConfig,
                rng: Optional[np.random.Generator] = None, training: bool = False) -> Tuple[np.ndarray, ForwardCache]:
    inputs = embeddings[ids]
    conv_pre, argmaxes, pooled = [], [], []
    for i in range(len(config.channels)):
        z = conv1d_forward_batch(_conv_layer(params, config, i), inputs)
        pooled_i, argmax = global_max_pool_batch(relu(z))
        conv_pre.append(z)
        argmaxes.append(argmax)
        pooled.append(pooled_i)

    dropped, mask = dropout(np.concatenate(pooled, axis=1), config.dropout_rate, rng, training)
    dense_pre = dropped @ params["dense_W"] + params["dense_b"]
    dense_out = relu(dense_pre)
    probs = softmax(dense_out @ params["out_W"] + params["out_b"])
    return probs, ForwardCache(inputs, conv_pre, argmaxes, dropped, mask, dense_pre, dense_out)


def cnn_loss_and_grads(params: Dict[str, np.ndarray], embeddings: np.ndarray, ids: np.ndarray, targets: np.ndarray,
                       config: CnnConfig, rng: Optional[np.random.Generator] = None,
                       training: bool = False) -> Tuple[float, Dict[str, np.ndarray]]:
    """Cross-entropy and gradients for every trainable tensor; the embedding matrix gets none."""
    probs, cache = cnn_forward(params, embeddings, ids, config, rng, training)
    loss = cross_entropy(probs, targets)

    grads = {}
    dlogits = softmax_cross_entropy_grad(probs, targets)
    ddense, grads["out_W"], grads["out_b"] = linear_backward(cache.dense_out, params["out_W"], dlogits)
    dpooled, grads["dense_W"], grads["dense_b"] = linear_backward(
        cache.pooled_dropped, params["dense_W"], ddense * (cache.dense_pre > 0)
    )
    dpooled = dpooled * cache.dropout_mask

    filters = config.filters_per_channel
    for i in range(len(config.channels)):
        z = cache.conv_pre[i]
        dmap = global_max_pool_backward_batch(dpooled[:, i * filters:(i + 1) * filters], cache.argmax[i], z.shape[1])
        _, grads[f"conv{i}_W"], grads[f"conv{i}_b"] = conv1d_backward_batch(
            _conv_layer(params, config, i), cache.inputs, dmap * (z > 0), need_input_grad=False,
        )
    return loss, grads


class CnnScreener(Screener):
    model_type = "cnn"

    def __init__(self, config: CnnConfig | None = None, feature_view: FeatureView = FeatureView.ALL_FEATURES,
                 embeddings: EmbeddingTable | None = None):
        super().__init__(config or CnnConfig(), feature_view)
        if embeddings is not None and embeddings.dim != self.config.embedding_dim:
            raise ModelValidationError(
                f"embedding table has dimension {embeddings.dim}, config expects {self.config.embedding_dim}"
            )
        self.embeddings = embeddings
        self.vocab: Vocabulary | None = None
        self.embedding_matrix: np.ndarray | None = None
        self.params: Dict[str, np.ndarray] = {}
        self.train_accuracy: float | None = None

    def default_train_config(self, seed: int) -> TrainConfig:
        config = self.config
        return supervised_train_config(config.epochs, config.batch_size, config.learning_rate, seed, config.dtype)

    def _encode(self, texts: List[str]) -> np.ndarray:
        ids, _ = encode_matrix([cnn_tokens(text) for text in texts], self.vocab, self.config.max_len)
        return ids

    def _fit(self, texts: List[str], labels: np.ndarray, train_config: TrainConfig) -> None:
        if self.embeddings is None:
            raise ModelValidationError("the cnn screener needs a pretrained embedding table")
        config = self.config
        dtype = train_config.np_dtype
        rng = np.random.default_rng(train_config.seed)

        self.vocab = build_vocab([cnn_tokens(text) for text in texts], min_count=1)
        self.embedding_matrix = self.embeddings.matrix(self.vocab, dtype)
        self.embedding_matrix.setflags(write=False)
        covered = sum(1 for token in self.vocab.tokens() if token in self.embeddings.vectors)
        logger.debug(f"cnn vocabulary {self.vocab.size}, {covered} tokens with pretrained vectors")

        ids = self._encode(texts)
        targets = np.eye(2, dtype=dtype)[labels]
        self.params = init_cnn_params(config, rng, dtype)
        order = np.asarray(oversample_minority(np.arange(len(labels)), labels, train_config.seed))
        widest = max(config.channels)

        state, self.epoch_losses = None, []
        for _ in range(train_config.epochs):
            shuffled = rng.permutation(order)
            batch_losses = []
            for start in range(0, len(shuffled), train_config.batch_size):
                rows = shuffled[start:start + train_config.batch_size]
                loss, grads = cnn_loss_and_grads(
                    self.params, self.embedding_matrix, trim_batch(ids[rows], widest), targets[rows],
                    config, rng, training=True,
                )
                self.params, state = optimizer_step(self.params, grads, train_config, state)
                batch_losses.append(loss)
            self.epoch_losses.append(float(np.mean(batch_losses)))

        predicted = self._probabilities(ids).argmax(axis=1)
        self.train_accuracy = float((predicted == labels).mean())
        logger.debug(f"cnn training accuracy {self.train_accuracy:.3f}")

    def _probabilities(self, ids: np.ndarray) -> np.ndarray:
        widest = max(self.config.channels)
        chunks = []
        for start in range(0, len(ids), SCORE_BATCH):
            probs, _ = cnn_forward(self.params, self.embedding_matrix, trim_batch(ids[start:start + SCORE_BATCH], widest),
                                   self.config)
            chunks.append(probs)
        return np.concatenate(chunks, axis=0)

    def _score(self, texts: List[str]) -> np.ndarray:
        return self._probabilities(self._encode(texts))[:, 1]

    def _parameters(self) -> Dict[str, np.ndarray]:
        return {"embedding_matrix": self.embedding_matrix, **self.params}

    def _extra(self) -> Dict[str, Any]:
        return {"vocabulary": self.vocab.tokens()}

    @classmethod
    def from_checkpoint(cls, header: Dict[str, Any], params: Dict[str, np.ndarray]) -> "CnnScreener":
        config = dict(header["config"])
        view = config.pop("feature_view")
        screener = cls(CnnConfig(**config), FeatureView(view))
        screener.vocab = Vocabulary.from_tokens(header["extra"]["vocabulary"])
        params = dict(params)
        screener.embedding_matrix = params.pop("embedding_matrix")
        screener.params = params
        screener.trained = True
        return screener


def train_multichannel_cnn(documents, labels, config: CnnConfig | None = None, embeddings: EmbeddingTable | None = None,
                           feature_view: FeatureView = FeatureView.ALL_FEATURES) -> CnnScreener:
    return CnnScreener(config, feature_view, embeddings).train(documents, labels)
