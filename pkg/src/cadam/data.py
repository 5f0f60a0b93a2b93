"""Dataset ingestion and generation.

Covers the standard big-endian IDX container (magic 0x00000803 for image
files, 0x00000801 for labels, pixels scaled to [0, 1] as value/255), the
noisy two-dimensional binary dataset, a seeded synthetic stand-in for the
digit images so nothing has to be downloaded, deterministic mini-batching
and stratified subsampling.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import (
    BadMagic,
    ConfigInvalid,
    CountMismatch,
    DatasetMissing,
    TruncatedFile,
)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


@dataclass
class Dataset:
    """Row-major float64 features with integer class labels."""

    features: np.ndarray  # (n, D)
    labels: np.ndarray    # (n,) ints in [0, K)
    n_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise ConfigInvalid("features must be a nonempty (n, D) matrix")
        if self.labels.shape[0] != self.features.shape[0]:
            raise CountMismatch("feature and label counts differ")
        if self.labels.min() < 0 or self.labels.max() >= self.n_classes:
            raise ConfigInvalid("labels outside [0, n_classes)")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices)
        return Dataset(self.features[idx], self.labels[idx], self.n_classes)


@dataclass
class Batch:
    """A view of dataset rows selected by unique in-range indices."""

    dataset: Dataset
    indices: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.indices.size < 1:
            raise ConfigInvalid("batch must be nonempty")
        if np.unique(self.indices).size != self.indices.size:
            raise ConfigInvalid("batch indices must be unique")
        if self.indices.min() < 0 or self.indices.max() >= self.dataset.n:
            raise ConfigInvalid("batch indices out of range")

    @property
    def features(self) -> np.ndarray:
        return self.dataset.features[self.indices]

    @property
    def labels(self) -> np.ndarray:
        return self.dataset.labels[self.indices]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.features, self.labels

    def __len__(self) -> int:
        return self.indices.size


def _read_idx_header(raw: bytes, path, expected_magic: int, n_dims: int) -> tuple:
    header = 4 * (1 + n_dims)
    if len(raw) < header:
        raise TruncatedFile(f"{path}: shorter than its header")
    magic = struct.unpack(">i", raw[:4])[0]
    if magic != expected_magic:
        raise BadMagic(f"{path}: magic {magic:#010x}, expected {expected_magic:#010x}")
    dims = struct.unpack(f">{n_dims}i", raw[4:header])
    return dims, raw[header:]


def load_idx(images_path, labels_path) -> Dataset:
    """Parse an IDX image/label file pair into features in [0, 1]."""
    images_path, labels_path = Path(images_path), Path(labels_path)
    for p in (images_path, labels_path):
        if not p.exists():
            raise DatasetMissing(str(p))
    img_raw = images_path.read_bytes()
    (n, rows, cols), img_body = _read_idx_header(img_raw, images_path, IMAGES_MAGIC, 3)
    if len(img_body) < n * rows * cols:
        raise TruncatedFile(f"{images_path}: {len(img_body)} bytes for {n}x{rows}x{cols} pixels")
    lab_raw = labels_path.read_bytes()
    (n_labels,), lab_body = _read_idx_header(lab_raw, labels_path, LABELS_MAGIC, 1)
    if len(lab_body) < n_labels:
        raise TruncatedFile(f"{labels_path}: {len(lab_body)} bytes for {n_labels} labels")
    if n != n_labels:
        raise CountMismatch(f"{n} images vs {n_labels} labels")
    pixels = np.frombuffer(img_body, dtype=np.uint8, count=n * rows * cols)
    features = pixels.reshape(n, rows * cols).astype(np.float64) / 255.0
    labels = np.frombuffer(lab_body, dtype=np.uint8, count=n).astype(np.int64)
    return Dataset(features, labels, n_classes=int(labels.max()) + 1)


def save_idx(ds: Dataset, images_path, labels_path, rows: int | None = None,
             cols: int | None = None) -> None:
    """Write a dataset as an IDX pair, quantizing features to round(f*255).

    Reloading reproduces the features bit-for-bit whenever they already
    sit on the k/255 grid.
    """
    if rows is None or cols is None:
        side = int(round(ds.n_features ** 0.5))
        if side * side == ds.n_features:
            rows, cols = side, side
        else:
            rows, cols = 1, ds.n_features
    if rows * cols != ds.n_features:
        raise ConfigInvalid(f"rows*cols = {rows * cols} != D = {ds.n_features}")
    pixels = np.clip(np.round(ds.features * 255.0), 0, 255).astype(np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">iiii", IMAGES_MAGIC, ds.n, rows, cols))
        f.write(pixels.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">ii", LABELS_MAGIC, ds.n))
        f.write(ds.labels.astype(np.uint8).tobytes())


def gen_noisy_2d(n: int = 10_000, flip: float = 0.10,
                 seed: int = 0) -> tuple[Dataset, tuple[float, float, float]]:
    """Uniform points on [-1, 1]^2 labelled by a random line, labels flipped.

    The line passes through a point near the origin with a random
    orientation; each label is flipped independently with probability
    ``flip``.  Returns the dataset and the true boundary (w1, w2, b).
    """
    if n < 1:
        raise ConfigInvalid("n must be >= 1")
    if not 0.0 <= flip < 0.5:
        raise ConfigInvalid("flip must be in [0, 0.5)")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 2))
    anchor = rng.uniform(-0.2, 0.2, size=2)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    w = np.array([np.cos(theta), np.sin(theta)])
    b = -float(w @ anchor)
    labels = (X @ w + b > 0.0).astype(np.int64)
    flipped = rng.random(n) < flip
    labels[flipped] ^= 1
    return Dataset(X, labels, n_classes=2), (float(w[0]), float(w[1]), b)


def batches(ds: Dataset, batch_size: int, epoch_seed: int) -> list[Batch]:
    """A seeded permutation of the rows, chunked; the short final chunk is kept."""
    if not 1 <= batch_size <= ds.n:
        raise ConfigInvalid(f"batch_size must be in [1, {ds.n}]")
    perm = np.random.default_rng(epoch_seed).permutation(ds.n)
    return [Batch(ds, perm[i:i + batch_size]) for i in range(0, ds.n, batch_size)]


def _stratified_indices(labels: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Largest-remainder per-class allocation of m rows, sampled without replacement."""
    n = labels.shape[0]
    classes, counts = np.unique(labels, return_counts=True)
    exact = m * counts / n
    alloc = np.floor(exact).astype(np.int64)
    remainders = exact - alloc
    short = m - int(alloc.sum())
    for k in np.argsort(-remainders, kind="stable")[:short]:
        alloc[k] += 1
    if m >= classes.size:
        # every present class keeps at least one row
        for k in range(classes.size):
            if alloc[k] == 0:
                donor = int(np.argmax(alloc))
                alloc[donor] -= 1
                alloc[k] += 1
    chosen = []
    for cls, take in zip(classes, alloc):
        rows = np.flatnonzero(labels == cls)
        if take > 0:
            chosen.append(rng.choice(rows, size=int(take), replace=False))
    return np.sort(np.concatenate(chosen))


def subsample(ds: Dataset, m: int, seed: int) -> Dataset:
    """m rows without replacement, class proportions preserved within +-1."""
    if not 1 <= m <= ds.n:
        raise ConfigInvalid(f"m must be in [1, {ds.n}]")
    return ds.take(_stratified_indices(ds.labels, m, np.random.default_rng(seed)))


def stratified_split(ds: Dataset, n_train: int, n_val: int,
                     seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint stratified train/validation subsets of one dataset."""
    if n_train + n_val > ds.n:
        raise ConfigInvalid(f"n_train + n_val = {n_train + n_val} > n = {ds.n}")
    rng = np.random.default_rng(seed)
    train_idx = _stratified_indices(ds.labels, n_train, rng)
    mask = np.ones(ds.n, dtype=bool)
    mask[train_idx] = False
    rest = np.flatnonzero(mask)
    val_in_rest = _stratified_indices(ds.labels[rest], n_val, rng)
    return ds.take(train_idx), ds.take(rest[val_in_rest])


def synthetic_digits(n: int, seed: int = 0, n_classes: int = 10, side: int = 28,
                     pixel_noise: float = 0.30, shared_frac: float = 0.5,
                     label_noise: float = 0.05) -> Dataset:
    """Seeded stand-in for digit images: blurred class templates plus noise.

    Class templates share half their structure, samples get heavy pixel
    noise and a small fraction of labels is resampled, so a linear model
    is still descending after a couple hundred batches instead of
    saturating -- roughly the difficulty profile of real digit data.
    Pixels are quantized to the uint8 grid so IDX round-trips are exact.
    """
    if n < 1:
        raise ConfigInvalid("n must be >= 1")
    rng = np.random.default_rng(seed)
    shared = gaussian_filter(rng.random((side, side)), sigma=side / 7.0)
    templates = []
    for _ in range(n_classes):
        own = gaussian_filter(rng.random((side, side)), sigma=side / 7.0)
        t = shared_frac * shared + (1.0 - shared_frac) * own
        t = (t - t.min()) / (t.max() - t.min())
        templates.append(t)
    labels = rng.integers(0, n_classes, size=n)
    features = np.empty((n, side * side))
    for i, lab in enumerate(labels):
        scale = rng.uniform(0.4, 1.0)
        img = templates[lab] * scale + rng.normal(0.0, pixel_noise, size=(side, side))
        img = np.clip(img, 0.0, 1.0)
        features[i] = (np.round(img * 255.0) / 255.0).reshape(-1)
    flip_mask = rng.random(n) < label_noise
    labels[flip_mask] = rng.integers(0, n_classes, size=int(flip_mask.sum()))
    return Dataset(features, labels.astype(np.int64), n_classes=n_classes)
