import numpy as np
import pytest

from src.corpus.schemas import DocumentRecord
from src.errors import ModelValidationError
from src.models.cnn import (
    CnnScreener, cnn_forward, cnn_loss_and_grads, init_cnn_params, train_multichannel_cnn, trim_batch,
)
from src.models.schemas import CnnConfig
from src.models.service import load_screener
from src.nn.gradcheck import gradient_check

MINI = CnnConfig(embedding_dim=8, max_len=10, channels=[2, 3], filters_per_channel=4, dense_units=5, dropout_rate=0.5)
SMALL = CnnConfig(
    embedding_dim=16, max_len=80, channels=[2, 3, 4], filters_per_channel=16, dense_units=16,
    epochs=15, batch_size=32, learning_rate=0.005,
)


@pytest.fixture(scope="module")
def trained(synthetic_corpus, synthetic_table):
    records = synthetic_corpus.dataset.records
    return train_multichannel_cnn(records, [r.label for r in records], SMALL, synthetic_table)


def _mini_params(rng):
    params = init_cnn_params(MINI, rng)
    for name in params:
        if name.endswith("_b"):
            params[name] = rng.normal(0.0, 0.3, size=params[name].shape)
    return params


def test_pooled_width_is_channels_times_filters():
    rng = np.random.default_rng(0)
    embeddings = rng.normal(size=(12, 8))
    probs, cache = cnn_forward(_mini_params(rng), embeddings, rng.integers(1, 12, size=(3, 10)), MINI)
    assert cache.pooled_dropped.shape == (3, 2 * 4)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)


def test_full_model_gradient_check():
    rng = np.random.default_rng(1)
    params = _mini_params(rng)
    embeddings = rng.normal(size=(12, 8))
    ids = rng.integers(1, 12, size=(4, 10))
    targets = np.eye(2)[[0, 1, 1, 0]]

    def closure():
        return cnn_loss_and_grads(params, embeddings, ids, targets, MINI, np.random.default_rng(9), training=True)

    report = gradient_check(closure, params, epsilon=1e-5, abs_tolerance=1e-8)
    assert report.max_relative_error < 1e-4


def test_trimming_matches_full_padding():
    rng = np.random.default_rng(2)
    config = CnnConfig(embedding_dim=4, max_len=30, channels=[2, 5], filters_per_channel=3, dense_units=3)
    params = init_cnn_params(config, rng)
    params["conv0_b"] = rng.normal(size=3)
    params["conv1_b"] = rng.normal(size=3)
    embeddings = rng.normal(size=(9, 4))
    embeddings[0] = 0.0
    ids = np.zeros((3, 30), dtype=np.int64)
    ids[0, :7] = rng.integers(1, 9, size=7)
    ids[1, :2] = rng.integers(1, 9, size=2)
    ids[2, [0, 3]] = [4, 5]
    trimmed = trim_batch(ids, 5)
    assert trimmed.shape == (3, 12)
    full, _ = cnn_forward(params, embeddings, ids, config)
    short, _ = cnn_forward(params, embeddings, trimmed, config)
    np.testing.assert_allclose(full, short, rtol=1e-12)


def test_trim_keeps_the_widest_kernel_for_empty_batches():
    assert trim_batch(np.zeros((2, 30), dtype=np.int64), 7).shape == (2, 7)
    assert trim_batch(np.ones((2, 30), dtype=np.int64), 7).shape == (2, 30)


def test_embedding_dimension_must_match(synthetic_table):
    with pytest.raises(ModelValidationError):
        CnnScreener(CnnConfig(embedding_dim=100), embeddings=synthetic_table)


def test_training_needs_embeddings(make_records):
    records = make_records(["a b c", "d e f"], [1, 0])
    with pytest.raises(ModelValidationError):
        CnnScreener(MINI).train(records, [1, 0])


def test_fits_the_separable_corpus(trained):
    assert trained.train_accuracy >= 0.95
    assert trained.epoch_losses[0] > trained.epoch_losses[-1]


def test_embeddings_stay_frozen(trained, synthetic_table):
    np.testing.assert_array_equal(trained.embedding_matrix, synthetic_table.matrix(trained.vocab))
    assert not trained.embedding_matrix.flags.writeable


def test_scores_are_include_probabilities_per_document(trained, synthetic_corpus):
    records = synthetic_corpus.dataset.records
    scores = np.array([p.score for p in trained.score(records)])
    assert scores.shape == (200,)
    assert np.all((scores >= 0.0) & (scores <= 1.0))
    labels = np.array([r.label for r in records])
    assert scores[labels == 1].mean() > scores[labels == 0].mean()


def test_short_and_unseen_documents_still_score(trained):
    odd = [
        DocumentRecord(doc_id="1", title="zzzqx", label=0),
        DocumentRecord(doc_id="2", label=1),
    ]
    assert len(trained.score(odd)) == 2


def test_scores_ignore_document_order(trained, synthetic_corpus):
    records = synthetic_corpus.dataset.records[:40]
    forward = {p.doc_id: p.score for p in trained.score(records)}
    backward = {p.doc_id: p.score for p in trained.score(records[::-1])}
    assert forward.keys() == backward.keys()
    for doc_id in forward:
        assert forward[doc_id] == pytest.approx(backward[doc_id], abs=1e-12)


def test_checkpoint_round_trip(tmp_path, trained, synthetic_corpus):
    trained.save(tmp_path / "cnn")
    restored = load_screener(tmp_path / "cnn")
    assert isinstance(restored, CnnScreener)
    records = synthetic_corpus.dataset.records[:25]
    np.testing.assert_allclose([p.score for p in restored.score(records)], [p.score for p in trained.score(records)])

