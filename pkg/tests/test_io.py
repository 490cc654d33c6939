import struct

import numpy as np
import numpy.testing as npt
import pytest

from otood.exceptions import DataError, FormatError
from otood.io import (
    read_features,
    read_labels,
    read_scores,
    write_features,
    write_labels,
    write_scores,
)
from otood.scoring import ScoredBatch, SolverDiagnostics

from conftest import unit_rows


def make_batch(scores, converged=True, n_train=100):
    scores = np.asarray(scores, dtype=np.float64)
    return ScoredBatch(
        scores=scores,
        lam=0.1,
        n_train=n_train,
        diags=(SolverDiagnostics(10, 1e-9, converged),),
        row_converged=np.full(scores.size, converged),
    )


class TestFeatureFiles:
    def test_binary_round_trip(self, tmp_path, rng):
        original = unit_rows(rng, 9, 5).astype(np.float32)
        path = tmp_path / "x.feat"
        write_features(path, original)
        back = read_features(path, normalize=False)
        npt.assert_array_equal(back, original.astype(np.float64))

    def test_handcrafted_header_and_payload(self, tmp_path):
        path = tmp_path / "id.feat"
        payload = np.array([1.0, 0.0, 0.0, 1.0], dtype="<f4").tobytes()
        path.write_bytes(struct.pack("<4sIII", b"FEAT", 1, 2, 2) + payload)
        matrix = read_features(path, normalize=False)
        npt.assert_array_equal(matrix, np.eye(2))

    def test_csv_three_four_five_normalization(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("3,4\n")
        npt.assert_allclose(read_features(path, normalize=True), [[0.6, 0.8]], atol=1e-12)

    def test_csv_and_binary_agree(self, tmp_path, rng):
        rows = unit_rows(rng, 4, 3).astype(np.float32)
        binary = tmp_path / "x.feat"
        csv_path = tmp_path / "x.csv"
        write_features(binary, rows)
        np.savetxt(csv_path, rows, delimiter=",", fmt="%.9g")
        npt.assert_array_equal(
            read_features(binary, normalize=True), read_features(csv_path, normalize=True)
        )

    def test_truncated_payload_rejected(self, tmp_path, rng):
        path = tmp_path / "x.feat"
        write_features(path, unit_rows(rng, 3, 4))
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(FormatError, match="truncated"):
            read_features(path)

    def test_trailing_bytes_rejected(self, tmp_path, rng):
        path = tmp_path / "x.feat"
        write_features(path, unit_rows(rng, 3, 4))
        path.write_bytes(path.read_bytes() + b"zz")
        with pytest.raises(FormatError, match="trailing"):
            read_features(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "x.feat"
        path.write_bytes(struct.pack("<4sIII", b"FEET", 1, 0, 0))
        with pytest.raises(FormatError, match="magic"):
            read_features(path)

    def test_bad_version_rejected(self, tmp_path):
        path = tmp_path / "x.feat"
        path.write_bytes(struct.pack("<4sIII", b"FEAT", 2, 0, 0))
        with pytest.raises(FormatError, match="version"):
            read_features(path)

    def test_short_header_rejected(self, tmp_path):
        path = tmp_path / "x.feat"
        path.write_bytes(b"FEAT")
        with pytest.raises(FormatError):
            read_features(path)

    def test_non_finite_payload_rejected(self, tmp_path):
        path = tmp_path / "x.feat"
        payload = np.array([np.nan, 0.0], dtype="<f4").tobytes()
        path.write_bytes(struct.pack("<4sIII", b"FEAT", 1, 1, 2) + payload)
        with pytest.raises(DataError, match="non-finite"):
            read_features(path)

    def test_zero_row_named_in_error(self, tmp_path):
        path = tmp_path / "x.feat"
        rows = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.float32)
        path.write_bytes(struct.pack("<4sIII", b"FEAT", 1, 2, 2) + rows.tobytes())
        with pytest.raises(DataError, match="row 1"):
            read_features(path, normalize=True)

    def test_unnormalized_rows_rejected_without_normalize(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("3,4\n")
        with pytest.raises(DataError, match="norm"):
            read_features(path, normalize=False)

    def test_unparseable_csv_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,banana\n")
        with pytest.raises(FormatError):
            read_features(path)


class TestScoreFiles:
    def test_rows_match_format(self, tmp_path):
        path = tmp_path / "s.csv"
        write_scores(path, make_batch([0.1, 1.7]))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "index,score,converged"
        assert lines[1] == "0,0.100000,true"
        assert lines[2] == "1,1.700000,true"

    def test_empty_batch_writes_header_only(self, tmp_path):
        path = tmp_path / "s.csv"
        batch = ScoredBatch(np.array([]), 0.1, 10, (), np.array([], dtype=bool))
        write_scores(path, batch)
        assert path.read_text().strip() == "index,score,converged"

    def test_round_trip_within_tolerance(self, tmp_path, rng):
        path = tmp_path / "s.csv"
        scores = rng.uniform(0.0, np.log(100), 25)
        write_scores(path, make_batch(scores))
        back, flags = read_scores(path)
        assert np.abs(back - scores).max() < 1e-6
        assert flags.all()

    def test_non_convergence_flag_round_trips(self, tmp_path):
        path = tmp_path / "s.csv"
        write_scores(path, make_batch([0.5], converged=False))
        _, flags = read_scores(path)
        assert not flags.any()

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(FormatError):
            read_scores(path)

    def test_bad_flag_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("index,score,converged\n0,1.0,maybe\n")
        with pytest.raises(FormatError):
            read_scores(path)


class TestLabelFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "l.csv"
        labels = np.array([0, 1, 1, 0, 1])
        write_labels(path, labels)
        npt.assert_array_equal(read_labels(path), labels)

    def test_bad_token_rejected(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("0\n2\n")
        with pytest.raises(FormatError):
            read_labels(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("")
        with pytest.raises(FormatError):
            read_labels(path)
