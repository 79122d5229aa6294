"""MNIST IDX ingestion and synthetic stand-in datasets.

IDX layout: a 4-byte big-endian magic (``0x00000803`` for images,
``0x00000801`` for labels), one 4-byte big-endian size per dimension, then the
unsigned-byte payload. Files may be gzip-compressed (``.gz``).
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .objectives import Dataset
from .rng import stream

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049
_NDIMS = {IMAGES_MAGIC: 3, LABELS_MAGIC: 1}

DATA_ENV = "PCM_DATA_DIR"
TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"


class IdxError(ValueError):
    pass


@dataclass(frozen=True)
class IdxFile:
    magic: int
    dims: tuple[int, ...]
    payload: bytes

    def __post_init__(self):
        if self.magic not in _NDIMS:
            raise IdxError(f"bad IDX magic {self.magic:#010x}")
        if len(self.dims) != _NDIMS[self.magic]:
            raise IdxError(f"magic {self.magic} expects {_NDIMS[self.magic]} dims, got {len(self.dims)}")
        if len(self.payload) != int(np.prod(self.dims)):
            raise IdxError(f"payload has {len(self.payload)} bytes, dims {self.dims} need {int(np.prod(self.dims))}")

    def array(self) -> np.ndarray:
        return np.frombuffer(self.payload, dtype=np.uint8).reshape(self.dims)


def _open(path: Path):
    return gzip.open(path, "rb") if path.suffix == ".gz" else path.open("rb")


def parse_idx(raw: bytes) -> IdxFile:
    if len(raw) < 4:
        raise IdxError("file too short for an IDX header")
    (magic,) = struct.unpack(">i", raw[:4])
    if magic not in _NDIMS:
        raise IdxError(f"bad IDX magic {magic:#010x}")
    nd = _NDIMS[magic]
    head = 4 + 4 * nd
    if len(raw) < head:
        raise IdxError("truncated IDX header")
    dims = struct.unpack(f">{nd}i", raw[4:head])
    need = int(np.prod(dims))
    payload = raw[head:]
    if len(payload) < need:
        raise IdxError(f"truncated payload: {len(payload)} of {need} bytes")
    if len(payload) > need:
        raise IdxError(f"trailing bytes after payload ({len(payload) - need})")
    return IdxFile(magic, tuple(dims), payload)


def load_idx(path) -> IdxFile:
    path = Path(path)
    with _open(path) as fh:
        return parse_idx(fh.read())


def dump_idx(idx: IdxFile) -> bytes:
    return struct.pack(f">i{len(idx.dims)}i", idx.magic, *idx.dims) + idx.payload


def write_idx(path, array) -> Path:
    """Write a ``uint8`` array as IDX (3-D images or 1-D labels)."""
    a = np.asarray(array)
    if a.dtype != np.uint8:
        raise IdxError("IDX payload must be uint8")
    magic = {3: IMAGES_MAGIC, 1: LABELS_MAGIC}.get(a.ndim)
    if magic is None:
        raise IdxError("only 3-D image and 1-D label arrays are supported")
    raw = dump_idx(IdxFile(magic, tuple(a.shape), a.tobytes()))
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wb") as fh:
        fh.write(raw)
    return path


def featurize(images) -> np.ndarray:
    """Pixels scaled to ``[0, 1]`` plus a trailing constant 1 (28x28 -> 785)."""
    a = np.asarray(images)
    single = a.ndim == 2
    if single:
        a = a[None]
    if a.ndim != 3:
        raise IdxError("images must be (rows, cols) or (n, rows, cols)")
    flat = a.reshape(a.shape[0], -1).astype(float) / 255.0
    out = np.hstack([flat, np.ones((flat.shape[0], 1))])
    return out[0] if single else out


def binarize(labels, digit: int) -> np.ndarray:
    """One-vs-rest labels: ``+1`` where the label equals ``digit``, else ``-1``."""
    if not (isinstance(digit, (int, np.integer)) and 0 <= digit <= 9):
        raise ValueError(f"digit must be an integer in 0..9, got {digit!r}")
    return np.where(np.asarray(labels) == digit, 1.0, -1.0)


def subsample(n_total: int, limit: int | None, seed: int) -> np.ndarray:
    """Sorted record indices kept under ``--limit`` (all records when ``None``)."""
    if limit is None or limit >= n_total:
        return np.arange(n_total)
    if limit < 1:
        raise ValueError("limit must be positive")
    return np.sort(stream(seed, "subsample").choice(n_total, size=limit, replace=False))


def _find(directory: Path, stem: str) -> Path | None:
    for name in (stem, stem + ".gz", stem.replace("-idx", ".idx"), stem.replace("-idx", ".idx") + ".gz"):
        p = directory / name
        if p.exists():
            return p
    return None


def mnist_paths(data_dir=None) -> tuple[Path, Path] | None:
    """Training image/label files under ``data_dir`` or ``$PCM_DATA_DIR``."""
    d = data_dir if data_dir is not None else os.environ.get(DATA_ENV)
    if not d:
        return None
    d = Path(d)
    imgs, labs = _find(d, TRAIN_IMAGES), _find(d, TRAIN_LABELS)
    if imgs is None or labs is None:
        return None
    return imgs, labs


def load_mnist(digit: int, limit: int | None = None, seed: int = 0, data_dir=None) -> Dataset:
    paths = mnist_paths(data_dir)
    if paths is None:
        raise FileNotFoundError(f"MNIST training files not found; set {DATA_ENV} or pass a data directory")
    images, labels = load_idx(paths[0]), load_idx(paths[1])
    if images.magic != IMAGES_MAGIC or labels.magic != LABELS_MAGIC:
        raise IdxError("image/label files have the wrong magic numbers")
    if images.dims[0] != labels.dims[0]:
        raise IdxError(f"{images.dims[0]} images but {labels.dims[0]} labels")
    keep = subsample(images.dims[0], limit, seed)
    return Dataset(featurize(images.array()[keep]), binarize(labels.array()[keep], digit))


def synth_classification(n: int, d: int, margin: float, rng: np.random.Generator) -> Dataset:
    """Linearly separable data: ``Z = sign(<w, Y>)`` with ``|<w, Y>| >= margin``.

    ``w`` is a random unit vector and ``Y`` standard normal; points inside the
    margin are rejected and redrawn.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if d < 1:
        raise ValueError("d must be at least 1")
    if not margin > 0:
        raise ValueError("margin must be positive")
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)
    kept, have = [], 0
    while have < n:
        Y = rng.standard_normal((max(2 * (n - have), 16), d))
        Y = Y[np.abs(Y @ w) >= margin]
        kept.append(Y)
        have += Y.shape[0]
    Y = np.vstack(kept)[:n]
    Z = np.sign(Y @ w)
    return Dataset(Y, Z)


def synth_mnist_like(n: int, digit: int, rng: np.random.Generator) -> Dataset:
    """Stand-in for MNIST when the files are absent.

    Ten sparse random 28x28 prototypes sharing half their ink with a common
    stroke pattern; each record is its class prototype plus heavy pixel noise,
    clipped, quantized to bytes, featurized to 785 dimensions and labelled
    one-vs-rest against ``digit``. The classes overlap, so the hinge loss has
    a clearly positive minimum as it does on MNIST.
    """
    binarize([], digit)
    common = rng.random((28, 28)) * (rng.random((28, 28)) < 0.3)
    own = rng.random((10, 28, 28)) * (rng.random((10, 28, 28)) < 0.3)
    protos = 0.5 * common + 0.5 * own
    cls = rng.integers(10, size=n)
    imgs = np.clip(protos[cls] + 0.6 * rng.standard_normal((n, 28, 28)), 0.0, 1.0)
    pixels = np.round(imgs * 255.0).astype(np.uint8)
    return Dataset(featurize(pixels), binarize(cls, digit))
