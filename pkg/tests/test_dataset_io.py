import gzip
import struct

import numpy as np
import pytest

from pcm.dataset_io import (
    DATA_ENV,
    IMAGES_MAGIC,
    LABELS_MAGIC,
    IdxError,
    IdxFile,
    binarize,
    dump_idx,
    featurize,
    load_idx,
    load_mnist,
    mnist_paths,
    parse_idx,
    subsample,
    synth_classification,
    synth_mnist_like,
    write_idx,
)
from pcm.objectives import make_hinge
from pcm.oracle import hinge_dual
from pcm.rng import stream


def fake_mnist(directory, n=40, gz=False):
    rng = np.random.default_rng(0)
    imgs = rng.integers(0, 256, size=(n, 28, 28), dtype=np.uint8)
    labs = (np.arange(n) % 10).astype(np.uint8)
    suffix = ".gz" if gz else ""
    write_idx(directory / f"train-images-idx3-ubyte{suffix}", imgs)
    write_idx(directory / f"train-labels-idx1-ubyte{suffix}", labs)
    return imgs, labs


class TestIdx:
    def test_header_layout(self):
        raw = dump_idx(IdxFile(LABELS_MAGIC, (3,), bytes([1, 2, 3])))
        assert raw == b"\x00\x00\x08\x01\x00\x00\x00\x03\x01\x02\x03"

    @pytest.mark.parametrize("gz", [False, True])
    def test_round_trip(self, tmp_path, gz):
        a = np.random.default_rng(1).integers(0, 256, size=(5, 28, 28), dtype=np.uint8)
        p = write_idx(tmp_path / ("x.idx.gz" if gz else "x.idx"), a)
        back = load_idx(p)
        assert back.magic == IMAGES_MAGIC and back.dims == (5, 28, 28)
        np.testing.assert_array_equal(back.array(), a)
        if gz:
            assert gzip.open(p).read()[:4] == struct.pack(">i", IMAGES_MAGIC)

    def test_bad_magic(self):
        with pytest.raises(IdxError, match="magic"):
            parse_idx(struct.pack(">ii", 1234, 1) + b"\x00")

    def test_truncated_payload(self):
        raw = dump_idx(IdxFile(LABELS_MAGIC, (4,), bytes(4)))
        with pytest.raises(IdxError, match="truncated"):
            parse_idx(raw[:-1])

    def test_truncated_header(self):
        with pytest.raises(IdxError):
            parse_idx(struct.pack(">ii", IMAGES_MAGIC, 2))
        with pytest.raises(IdxError):
            parse_idx(b"\x00\x00")

    def test_trailing_bytes(self):
        with pytest.raises(IdxError, match="trailing"):
            parse_idx(dump_idx(IdxFile(LABELS_MAGIC, (1,), b"\x05")) + b"\x00")

    def test_write_rejects(self, tmp_path):
        with pytest.raises(IdxError):
            write_idx(tmp_path / "x", np.zeros(3, dtype=np.int32))
        with pytest.raises(IdxError):
            write_idx(tmp_path / "x", np.zeros((2, 2), dtype=np.uint8))


class TestTransforms:
    def test_blank_image(self):
        f = featurize(np.zeros((28, 28), dtype=np.uint8))
        assert f.shape == (785,) and np.count_nonzero(f) == 1 and f[-1] == 1.0

    def test_featurize(self):
        img = np.zeros((28, 28), dtype=np.uint8)
        img[0, 0], img[27, 27] = 255, 51
        f = featurize(img)
        assert f.shape == (785,)
        assert f[0] == 1.0 and f[783] == pytest.approx(0.2) and f[784] == 1.0
        assert featurize(np.stack([img, img])).shape == (2, 785)

    def test_binarize(self):
        np.testing.assert_array_equal(binarize([3, 7, 3], 3), [1.0, -1.0, 1.0])
        for bad in (10, -1, 2.5):
            with pytest.raises(ValueError):
                binarize([1], bad)

    def test_subsample(self):
        a = subsample(100, 10, 3)
        assert a.size == 10 and np.all(np.diff(a) > 0)
        np.testing.assert_array_equal(a, subsample(100, 10, 3))
        np.testing.assert_array_equal(subsample(5, None, 0), np.arange(5))
        np.testing.assert_array_equal(subsample(5, 50, 0), np.arange(5))
        with pytest.raises(ValueError):
            subsample(5, 0, 0)


class TestMnistFiles:
    @pytest.mark.parametrize("gz", [False, True])
    def test_load(self, tmp_path, gz):
        imgs, labs = fake_mnist(tmp_path, gz=gz)
        ds = load_mnist(4, data_dir=tmp_path)
        assert ds.features.shape == (40, 785)
        np.testing.assert_array_equal(ds.labels, np.where(labs == 4, 1.0, -1.0))
        np.testing.assert_allclose(ds.features[3, :784], imgs[3].ravel() / 255.0)

    def test_limit(self, tmp_path):
        fake_mnist(tmp_path)
        ds = load_mnist(0, limit=7, seed=2, data_dir=tmp_path)
        assert ds.n == 7

    def test_env(self, tmp_path, monkeypatch):
        fake_mnist(tmp_path)
        monkeypatch.setenv(DATA_ENV, str(tmp_path))
        assert mnist_paths() is not None
        monkeypatch.delenv(DATA_ENV)
        assert mnist_paths() is None

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_mnist(0, data_dir=tmp_path)

    def test_count_mismatch(self, tmp_path):
        fake_mnist(tmp_path)
        write_idx(tmp_path / "train-labels-idx1-ubyte", np.zeros(3, dtype=np.uint8))
        with pytest.raises(IdxError):
            load_mnist(0, data_dir=tmp_path)


class TestSynthetic:
    def test_margin(self):
        rng = stream(0, "data")
        ds = synth_classification(300, 5, 0.2, rng)
        assert ds.n == 300 and set(np.unique(ds.labels)) <= {-1.0, 1.0}
        # replay the generator's direction to verify the margin post hoc
        w = stream(0, "data").standard_normal(5)
        w /= np.linalg.norm(w)
        assert np.min(ds.labels * (ds.features @ w)) >= 0.2

    def test_oracle_accuracy(self):
        ds = synth_classification(100, 5, 0.2, stream(0, "data"))
        res = hinge_dual(make_hinge(ds, 0.01))
        assert np.all(np.sign(ds.features @ res.x) == ds.labels)

    def test_classification_determinism(self):
        a = synth_classification(100, 5, 0.1, stream(3, "data"))
        b = synth_classification(100, 5, 0.1, stream(3, "data"))
        np.testing.assert_array_equal(a.features, b.features)

    def test_determinism(self):
        a = synth_mnist_like(50, 3, stream(1, "data"))
        b = synth_mnist_like(50, 3, stream(1, "data"))
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_mnist_like_shape(self):
        ds = synth_mnist_like(200, 0, stream(0, "data"))
        assert ds.features.shape == (200, 785)
        assert np.all(ds.features[:, -1] == 1.0)
        assert 0.02 < np.mean(ds.labels == 1) < 0.25

    def test_mnist_like_learnable(self):
        ds = synth_mnist_like(2000, 0, stream(0, "data"))
        res = hinge_dual(make_hinge(ds, 1.2e-2))
        assert np.mean(np.sign(ds.features @ res.x) == ds.labels) >= 0.99
        assert res.f > 0

    def test_rejects(self):
        with pytest.raises(ValueError):
            synth_classification(1, 2, 0.1, stream(0, "d"))
        with pytest.raises(ValueError):
            synth_classification(10, 2, 0.0, stream(0, "d"))
        with pytest.raises(ValueError):
            synth_mnist_like(10, 11, stream(0, "d"))
