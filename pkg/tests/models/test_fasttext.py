import numpy as np
import pytest

from src.models.fasttext import FastTextScreener, document_vector, train_fasttext
from src.models.schemas import FastTextConfig
from src.models.service import load_screener

CONFIG = FastTextConfig(embedding_dim=20, epochs=5)


@pytest.fixture(scope="module")
def trained(synthetic_corpus):
    records = synthetic_corpus.dataset.records
    return train_fasttext(records, [r.label for r in records], CONFIG)


def test_document_vector_counts_repeats():
    table = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]])
    np.testing.assert_allclose(document_vector(table, np.array([1, 1, 2])), [2.0 / 3.0, 1.0])


def test_document_vector_of_nothing_is_zero():
    table = np.ones((3, 4))
    np.testing.assert_array_equal(document_vector(table, np.array([], dtype=np.int64)), np.zeros(4))


def test_training_is_deterministic(synthetic_corpus):
    records = synthetic_corpus.dataset.records[:80]
    labels = [r.label for r in records]
    first = train_fasttext(records, labels, CONFIG)
    second = train_fasttext(records, labels, CONFIG)
    np.testing.assert_array_equal(first.embeddings, second.embeddings)
    assert [p.score for p in first.score(records)] == [p.score for p in second.score(records)]


def test_loss_goes_down(trained):
    assert len(trained.epoch_losses) == CONFIG.epochs
    assert trained.epoch_losses[-1] < trained.epoch_losses[0]


def test_includes_outscore_excludes(trained, synthetic_corpus):
    records = synthetic_corpus.dataset.records
    scores = np.array([p.score for p in trained.score(records)])
    labels = np.array([r.label for r in records])
    assert scores[labels == 1].mean() > scores[labels == 0].mean()


def test_unknown_words_score_like_an_empty_document(trained, make_records):
    unseen, empty = make_records(["qqqzzz xxxyyy", ""], [0, 0])
    assert trained.score([unseen])[0].score == trained.score([empty])[0].score


def test_oversampling_changes_the_update_sequence(synthetic_corpus):
    records = synthetic_corpus.dataset.records[:80]
    labels = [r.label for r in records]
    plain = train_fasttext(records, labels, CONFIG)
    balanced = train_fasttext(records, labels, CONFIG.model_copy(update={"oversample": True}))
    assert not np.array_equal(plain.output_weights, balanced.output_weights)


def test_checkpoint_round_trip(tmp_path, trained, synthetic_corpus):
    trained.save(tmp_path / "ft")
    restored = load_screener(tmp_path / "ft")
    assert isinstance(restored, FastTextScreener)
    assert restored.vocab == trained.vocab
    records = synthetic_corpus.dataset.records[:30]
    assert [p.score for p in restored.score(records)] == [p.score for p in trained.score(records)]
