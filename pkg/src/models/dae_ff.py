"""Three denoising autoencoders over binary bag-of-words, a supervised feed-forward
feature extractor on their concatenated codes, and a linear SVM ranker."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import time

import numpy as np

from src.corpus.schemas import FeatureView
from src.errors import ModelValidationError
from src.models.base import Screener, spawn_seeds
from src.models.sampling import oversample_minority
from src.models.schemas import DaeFfConfig, supervised_train_config
from src.models.svm import LinearSvm, train_linear_svm
from src.nn.layers import dense_forward, init_dense, linear_backward, relu, sigmoid, softmax
from src.nn.losses import cross_entropy, sigmoid_cross_entropy, sigmoid_cross_entropy_grad, softmax_cross_entropy_grad
from src.nn.optim import optimizer_step
from src.nn.schemas import Activation, DenseLayer, TrainConfig
from src.textprep.schemas import Vocabulary
from src.textprep.service import bow_matrix, build_vocab, dae_tokens, load_stoplist

logger = logging.getLogger(__name__)


@dataclass
class TrainedAutoencoder:
    encoder: DenseLayer
    decoder: DenseLayer
    corruption: float
    epoch_losses: List[float] = field(default_factory=list)


def corrupt(x: np.ndarray, level: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Zero-mask each entry independently with probability `level`; returns (corrupted, keep mask)."""
    keep = rng.random(x.shape) >= level
    return x * keep, keep


def dae_loss_and_grads(params: Dict[str, np.ndarray], corrupted: np.ndarray,
                       clean: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    hidden = sigmoid(corrupted @ params["W_enc"] + params["b_enc"])
    logits = hidden @ params["W_dec"] + params["b_dec"]
    loss = sigmoid_cross_entropy(logits, clean)

    dlogits = sigmoid_cross_entropy_grad(logits, clean)
    dhidden, dW_dec, db_dec = linear_backward(hidden, params["W_dec"], dlogits)
    dz = dhidden * hidden * (1.0 - hidden)
    _, dW_enc, db_enc = linear_backward(corrupted, params["W_enc"], dz)
    return loss, {"W_enc": dW_enc, "b_enc": db_enc, "W_dec": dW_dec, "b_dec": db_dec}


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train_dae(bow: np.ndarray, corruption: float, config: DaeFfConfig,
              seed: Optional[int] = None) -> TrainedAutoencoder:
    if bow.ndim != 2 or bow.shape[0] == 0 or bow.shape[1] == 0:
        raise ModelValidationError(f"cannot train an autoencoder on a matrix of shape {bow.shape}")
    if not 0.0 <= corruption < 1.0:
        raise ModelValidationError(f"corruption must lie in [0, 1), got {corruption}")

    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    dtype = np.dtype(config.dtype)
    encoder = init_dense(bow.shape[1], config.dae_hidden, Activation.SIGMOID, rng, dtype)
    decoder = init_dense(config.dae_hidden, bow.shape[1], Activation.IDENTITY, rng, dtype)
    params = {"W_enc": encoder.weights, "b_enc": encoder.bias, "W_dec": decoder.weights, "b_dec": decoder.bias}
    train_config = supervised_train_config(config.dae_epochs, config.batch_size, config.dae_learning_rate, seed, config.dtype)

    state, losses = None, []
    for _ in range(train_config.epochs):
        corrupted, _ = corrupt(bow, corruption, rng)  # fresh mask every epoch
        batch_losses = []
        for batch in _batches(bow.shape[0], train_config.batch_size, rng):
            loss, grads = dae_loss_and_grads(params, corrupted[batch], bow[batch])
            params, state = optimizer_step(params, grads, train_config, state)
            batch_losses.append(loss)
        losses.append(float(np.mean(batch_losses)))

    return TrainedAutoencoder(encoder=encoder, decoder=decoder, corruption=corruption, epoch_losses=losses)


def encode_all(encoders: Sequence[DenseLayer], bow: np.ndarray) -> np.ndarray:
    """Concatenated codes, in encoder (corruption level) order."""
    return np.hstack([dense_forward(encoder, bow) for encoder in encoders])


def ff_loss_and_grads(params: Dict[str, np.ndarray], x: np.ndarray,
                      targets: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    z = x @ params["W_hidden"] + params["b_hidden"]
    hidden = relu(z)
    probs = softmax(hidden @ params["W_out"] + params["b_out"])
    loss = cross_entropy(probs, targets)

    dlogits = softmax_cross_entropy_grad(probs, targets)
    dhidden, dW_out, db_out = linear_backward(hidden, params["W_out"], dlogits)
    _, dW_hidden, db_hidden = linear_backward(x, params["W_hidden"], dhidden * (z > 0))
    return loss, {"W_hidden": dW_hidden, "b_hidden": db_hidden, "W_out": dW_out, "b_out": db_out}


def train_ff(codes: np.ndarray, labels: np.ndarray, config: DaeFfConfig,
             train_config: TrainConfig) -> Tuple[DenseLayer, DenseLayer, List[float]]:
    """Supervised net on oversampled codes; returns (hidden layer, softmax head, epoch losses)."""
    rng = np.random.default_rng(train_config.seed)
    dtype = train_config.np_dtype
    hidden = init_dense(codes.shape[1], config.ff_hidden, Activation.RELU, rng, dtype)
    head = init_dense(config.ff_hidden, 2, Activation.SOFTMAX, rng, dtype)
    params = {"W_hidden": hidden.weights, "b_hidden": hidden.bias, "W_out": head.weights, "b_out": head.bias}

    order = np.asarray(oversample_minority(np.arange(len(labels)), labels, train_config.seed))
    targets = np.eye(2, dtype=dtype)[labels]
    state, losses = None, []
    for _ in range(train_config.epochs):
        batch_losses = []
        for batch in _batches(len(order), train_config.batch_size, rng):
            rows = order[batch]
            loss, grads = ff_loss_and_grads(params, codes[rows], targets[rows])
            params, state = optimizer_step(params, grads, train_config, state)
            batch_losses.append(loss)
        losses.append(float(np.mean(batch_losses)))
    return hidden, head, losses


def extract_features(encoders: Sequence[DenseLayer], ff_hidden: DenseLayer, bow: np.ndarray) -> np.ndarray:
    """FF hidden activations over the concatenated DAE codes: one ff_hidden-wide row per document."""
    return dense_forward(ff_hidden, encode_all(encoders, bow))


class DaeFfScreener(Screener):
    model_type = "dae-ff"

    def __init__(self, config: DaeFfConfig | None = None, feature_view: FeatureView = FeatureView.ALL_FEATURES):
        super().__init__(config or DaeFfConfig(), feature_view)
        self.vocab: Vocabulary | None = None
        self.encoders: List[DenseLayer] = []
        self.ff_hidden: DenseLayer | None = None
        self.ff_head: DenseLayer | None = None
        self.svm: LinearSvm | None = None
        self.stage_seconds: Dict[str, float] = {}
        self.dae_losses: List[List[float]] = []

    def default_train_config(self, seed: int) -> TrainConfig:
        config = self.config
        return supervised_train_config(config.ff_epochs, config.batch_size, config.ff_learning_rate, seed, config.dtype)

    def _bow(self, texts: List[str]) -> np.ndarray:
        stoplist = load_stoplist()
        return bow_matrix([dae_tokens(text, stoplist) for text in texts], self.vocab, np.dtype(self.config.dtype))

    def _fit(self, texts: List[str], labels: np.ndarray, train_config: TrainConfig) -> None:
        config = self.config
        dae_seeds = spawn_seeds(train_config.seed, len(config.corruption_levels) + 1)
        stoplist = load_stoplist()

        started = time.perf_counter()
        tokens = [dae_tokens(text, stoplist) for text in texts]
        vocab = build_vocab(tokens, config.min_count)
        if config.bow_dim is not None and vocab.size > config.bow_dim:
            vocab = Vocabulary.from_tokens(vocab.tokens()[:config.bow_dim], config.min_count)
        self.vocab = vocab
        bow = bow_matrix(tokens, vocab, np.dtype(config.dtype))
        autoencoders = [
            train_dae(bow, level, config, seed=seed)
            for level, seed in zip(config.corruption_levels, dae_seeds)
        ]
        self.encoders = [autoencoder.encoder for autoencoder in autoencoders]
        self.dae_losses = [autoencoder.epoch_losses for autoencoder in autoencoders]
        dae_done = time.perf_counter()

        self.ff_hidden, self.ff_head, self.epoch_losses = train_ff(
            encode_all(self.encoders, bow), labels, config, train_config,
        )
        ff_done = time.perf_counter()

        features = extract_features(self.encoders, self.ff_hidden, bow)
        rows = np.arange(len(labels))
        if config.svm_oversample:
            rows = np.asarray(oversample_minority(rows, labels, dae_seeds[-1]))
        self.svm = train_linear_svm(
            features[rows], labels[rows], C=config.svm_C, epochs=config.svm_epochs,
            batch_size=config.svm_batch_size, seed=dae_seeds[-1],
        )
        svm_done = time.perf_counter()

        self.stage_seconds = {"dae": dae_done - started, "ff": ff_done - dae_done, "svm": svm_done - ff_done}
        total = sum(self.stage_seconds.values())
        share = self.stage_seconds["dae"] / total if total > 0 else 0.0
        logger.info(
            f"dae-ff trained on {len(labels)} docs, bow dim {vocab.size}: "
            f"dae {self.stage_seconds['dae']:.2f}s ({share:.1%}), ff {self.stage_seconds['ff']:.2f}s, "
            f"svm {self.stage_seconds['svm']:.2f}s"
        )

    def _score(self, texts: List[str]) -> np.ndarray:
        return self.svm.decision_function(extract_features(self.encoders, self.ff_hidden, self._bow(texts)))

    def _parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for i, encoder in enumerate(self.encoders):
            params[f"enc{i}_W"] = encoder.weights
            params[f"enc{i}_b"] = encoder.bias
        params.update({
            "ff_W": self.ff_hidden.weights, "ff_b": self.ff_hidden.bias,
            "head_W": self.ff_head.weights, "head_b": self.ff_head.bias,
            "svm_w": self.svm.weights, "svm_b": np.array([self.svm.bias]),
        })
        return params

    def _extra(self) -> Dict[str, Any]:
        return {
            "vocabulary": self.vocab.tokens(),
            "min_count": self.vocab.min_count,
            "stage_seconds": self.stage_seconds,
        }

    @classmethod
    def from_checkpoint(cls, header: Dict[str, Any], params: Dict[str, np.ndarray]) -> "DaeFfScreener":
        config = dict(header["config"])
        view = config.pop("feature_view")
        screener = cls(DaeFfConfig(**config), FeatureView(view))
        extra = header["extra"]
        screener.vocab = Vocabulary.from_tokens(extra["vocabulary"], extra["min_count"])
        screener.stage_seconds = extra.get("stage_seconds", {})
        screener.encoders = [
            DenseLayer(params[f"enc{i}_W"], params[f"enc{i}_b"], Activation.SIGMOID)
            for i in range(len(screener.config.corruption_levels))
        ]
        screener.ff_hidden = DenseLayer(params["ff_W"], params["ff_b"], Activation.RELU)
        screener.ff_head = DenseLayer(params["head_W"], params["head_b"], Activation.SOFTMAX)
        screener.svm = LinearSvm(weights=params["svm_w"], bias=float(params["svm_b"][0]))
        screener.trained = True
        return screener


def train_dae_ff(documents, labels, config: DaeFfConfig | None = None,
                 feature_view: FeatureView = FeatureView.ALL_FEATURES) -> DaeFfScreener:
    return DaeFfScreener(config, feature_view).train(documents, labels)
