import numpy as np
import numpy.testing as npt
import pytest

from otood.exceptions import ConfigurationError
from otood.io import write_features, write_labels
from otood.metrics import MetricsReport
from otood.pipeline import RunConfig, run_pipeline, score_features
from otood.scoring import ScoredBatch, score_batch
from otood.synthetic import gen_synthetic
from otood.transport import SinkhornConfig, uniform_measure

from conftest import unit_rows


@pytest.fixture(scope="module")
def fixture_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    train, test, labels = gen_synthetic(150, 60, 60, 16, 1.5, 42)
    write_features(root / "train.feat", train)
    write_features(root / "test.feat", test)
    write_labels(root / "labels.csv", labels)
    return root, train, test, labels


class TestScoreFeatures:
    def test_one_big_batch_equals_score_batch(self, fixture_files):
        _, train, test, _ = fixture_files
        cfg = RunConfig(lam=0.1)
        combined = score_features(train, test, cfg)
        direct = score_batch(uniform_measure(train), uniform_measure(test),
                             SinkhornConfig(lam=0.1))
        npt.assert_array_equal(combined.scores, direct.scores)

    def test_oversized_batch_equals_single_batch(self, fixture_files):
        _, train, test, _ = fixture_files
        whole = score_features(train, test, RunConfig(lam=0.1))
        oversized = score_features(train, test, RunConfig(lam=0.1, batch_size=10_000))
        npt.assert_array_equal(whole.scores, oversized.scores)

    def test_batch_size_one_scores_are_train_entropy(self, rng):
        # a single test input must absorb the whole training marginal, so
        # its conditional is the training distribution itself
        train = unit_rows(rng, 25, 6)
        test = unit_rows(rng, 7, 6)
        batch = score_features(train, test, RunConfig(lam=0.1, batch_size=1))
        npt.assert_allclose(batch.scores, np.log(25), atol=1e-9)
        assert len(batch.diags) == 7

    def test_scores_stay_bounded_for_all_batch_sizes(self, fixture_files):
        _, train, test, _ = fixture_files
        for batch_size in (1, 8, 32, 128):
            batch = score_features(train, test, RunConfig(lam=0.1, batch_size=batch_size))
            assert batch.scores.min() >= -1e-9
            assert batch.scores.max() <= np.log(train.shape[0]) + 1e-9

    def test_shuffle_with_single_batch_preserves_scores(self, fixture_files):
        # one batch holds all rows either way; shuffling only permutes the
        # columns inside the solve, and the output returns to input order
        _, train, test, _ = fixture_files
        plain = score_features(train, test, RunConfig(lam=0.1))
        shuffled = score_features(train, test, RunConfig(lam=0.1, seed=7))
        npt.assert_allclose(shuffled.scores, plain.scores, atol=1e-9)

    def test_shuffled_batching_is_seed_deterministic(self, fixture_files):
        _, train, test, _ = fixture_files
        cfg = RunConfig(lam=0.1, batch_size=30, seed=11)
        first = score_features(train, test, cfg)
        second = score_features(train, test, cfg)
        npt.assert_array_equal(first.scores, second.scores)

    def test_thread_env_does_not_change_scores(self, fixture_files, monkeypatch):
        _, train, test, _ = fixture_files
        cfg = RunConfig(lam=0.1, batch_size=16)
        serial = score_features(train, test, cfg)
        monkeypatch.setenv("OTOOD_THREADS", "4")
        threaded = score_features(train, test, cfg)
        npt.assert_array_equal(serial.scores, threaded.scores)

    def test_invalid_batch_size_rejected(self):
        with pytest.raises(ConfigurationError):
            RunConfig(batch_size=0)


class TestRunPipeline:
    def test_returns_scores_without_labels(self, fixture_files):
        root, _, test, _ = fixture_files
        result = run_pipeline(RunConfig(), root / "train.feat", root / "test.feat")
        assert isinstance(result, ScoredBatch)
        assert result.scores.shape == (test.shape[0],)

    def test_returns_metrics_with_labels(self, fixture_files):
        root, *_ = fixture_files
        result = run_pipeline(RunConfig(batch_size=40), root / "train.feat",
                              root / "test.feat", root / "labels.csv")
        assert isinstance(result, MetricsReport)
        assert result.n_id == 60 and result.n_ood == 60
        assert result.auroc > 0.95
        assert result.nonconverged_batches == ()

    def test_nonconverged_batches_are_listed(self, fixture_files):
        root, *_ = fixture_files
        cfg = RunConfig(batch_size=40, max_iter=1, check_every=1)
        result = run_pipeline(cfg, root / "train.feat", root / "test.feat",
                              root / "labels.csv")
        assert result.nonconverged_batches == (0, 1, 2)

    def test_label_length_mismatch_rejected(self, fixture_files, tmp_path):
        root, *_ = fixture_files
        bad = tmp_path / "short.csv"
        bad.write_text("0\n1\n")
        with pytest.raises(ConfigurationError):
            run_pipeline(RunConfig(), root / "train.feat", root / "test.feat", bad)

    def test_dimension_mismatch_rejected(self, fixture_files, tmp_path, rng):
        root, *_ = fixture_files
        other = tmp_path / "other.feat"
        write_features(other, unit_rows(rng, 5, 4))
        with pytest.raises(ConfigurationError):
            run_pipeline(RunConfig(), root / "train.feat", other)

    def test_batch_trend_rises_then_plateaus(self, fixture_files):
        root, train, test, labels = fixture_files
        aurocs = {}
        for batch_size in (8, 32, 128):
            report = run_pipeline(RunConfig(batch_size=batch_size), root / "train.feat",
                                  root / "test.feat", root / "labels.csv")
            aurocs[batch_size] = report.auroc
        assert aurocs[128] >= aurocs[8] - 0.02
        assert aurocs[32] >= aurocs[8] - 0.02
