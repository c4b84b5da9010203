import struct

import numpy as np
import pytest

from rclass.config import HyperParams
from rclass.errors import CorruptSnapshotError, VersionMismatchError
from rclass.harness import FileOracle
from rclass.learner import OnlineLearner
from rclass.snapshot import model_to_tree, snapshot_load, snapshot_save
from rclass.streams import gaussian_stream


def trained_model(n=150, seed=9):
    cfg = HyperParams(budget=0.6, init_radius=0.05, recurrent_init=1.0)
    learner = OnlineLearner(4, 4, cfg)
    oracle = FileOracle()
    for s in gaussian_stream(n, seed=seed, std=0.05):
        learner.process(s, oracle)
    return learner.model


def trees_equal(a, b, path="root"):
    assert type(a) is type(b), path
    if isinstance(a, dict):
        assert a.keys() == b.keys(), path
        for k in a:
            trees_equal(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            trees_equal(x, y, f"{path}[{i}]")
    elif isinstance(a, np.ndarray):
        assert a.dtype == b.dtype and a.shape == b.shape, path
        assert np.array_equal(a, b, equal_nan=True), path
    else:
        assert a == b, path


class TestRoundTrip:
    def test_bit_exact(self, tmp_path):
        model = trained_model()
        path = str(tmp_path / "model.rcsn")
        snapshot_save(model, path)
        loaded = snapshot_load(path)
        trees_equal(model_to_tree(model), model_to_tree(loaded))

    def test_loaded_model_predicts_identically(self, tmp_path):
        from rclass.model import predict_outputs
        model = trained_model()
        path = str(tmp_path / "model.rcsn")
        snapshot_save(model, path)
        loaded = snapshot_load(path)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(0, 1, 4)
            np.testing.assert_array_equal(predict_outputs(model, x),
                                          predict_outputs(loaded, x))

    def test_save_load_save_stable(self, tmp_path):
        model = trained_model()
        p1, p2 = str(tmp_path / "a.rcsn"), str(tmp_path / "b.rcsn")
        snapshot_save(model, p1)
        snapshot_save(snapshot_load(p1), p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()


class TestContainerValidation:
    def test_truncated_file(self, tmp_path):
        model = trained_model(n=60)
        path = tmp_path / "model.rcsn"
        snapshot_save(model, str(path))
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(CorruptSnapshotError):
            snapshot_load(str(path))

    def test_wrong_version(self, tmp_path):
        model = trained_model(n=60)
        path = tmp_path / "model.rcsn"
        snapshot_save(model, str(path))
        blob = bytearray(path.read_bytes())
        blob[4:8] = struct.pack("<I", 99)
        path.write_bytes(bytes(blob))
        with pytest.raises(VersionMismatchError):
            snapshot_load(str(path))

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "model.rcsn"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CorruptSnapshotError):
            snapshot_load(str(path))

    def test_flipped_payload_byte(self, tmp_path):
        model = trained_model(n=60)
        path = tmp_path / "model.rcsn"
        snapshot_save(model, str(path))
        blob = bytearray(path.read_bytes())
        blob[20] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptSnapshotError):
            snapshot_load(str(path))
