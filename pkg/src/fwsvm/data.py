"""Dataset ingestion (svmlight text format) and synthetic blob generation.

The svmlight format is one example per line, ``<label> <idx>:<val> ...``
with 1-based strictly increasing feature indices; ``#`` starts a comment and
blank lines are skipped.  External labels may be arbitrary integers; they
are remapped to contiguous internal ids in first-appearance order and the
map is kept on the dataset (and later persisted in trained models).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .model import SparseVector


class SvmlightParseError(ValueError):
    """Malformed svmlight input; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Dataset:
    """Sparse design matrix (n, d0), internal labels y in [0, m), label map."""

    X: sp.csr_matrix
    y: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.int64)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if self.X.shape[0] != y.shape[0]:
            raise ValueError("X and y row counts differ")
        if self.X.shape[0] < 1:
            raise ValueError("dataset must contain at least one example")
        if y.size and (y.min() < 0 or y.max() >= len(self.labels)):
            raise ValueError("internal labels out of range")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d0(self) -> int:
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return len(self.labels)

    def example(self, i: int) -> SparseVector:
        row = self.X.getrow(i)
        return SparseVector(indices=row.indices.astype(np.int64),
                            values=row.data.astype(np.float64),
                            dim=self.d0)

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Row subset sharing this dataset's label map."""
        return Dataset(X=self.X[rows], y=self.y[rows], labels=self.labels)


def parse_svmlight(source: Iterable[str] | io.TextIOBase | str,
                   min_dim: int = 0) -> Dataset:
    """Parse svmlight text into a Dataset.

    ``source`` may be a string, an open text file, or any iterable of lines.
    ``min_dim`` pads the feature dimension (used to match a trained model).
    """
    if isinstance(source, str):
        source = io.StringIO(source)

    label_ids: dict[int, int] = {}
    ys: list[int] = []
    indptr = [0]
    col_idx: list[int] = []
    values: list[float] = []
    d0 = min_dim

    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            ext_label = int(tokens[0])
        except ValueError:
            raise SvmlightParseError(lineno, f"malformed label {tokens[0]!r}") from None
        ys.append(label_ids.setdefault(ext_label, len(label_ids)))

        prev = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise SvmlightParseError(lineno, f"malformed feature token {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise SvmlightParseError(
                    lineno, f"malformed feature token {tok!r}") from None
            if idx < 1:
                raise SvmlightParseError(lineno, f"feature index {idx} must be >= 1")
            if idx <= prev:
                raise SvmlightParseError(
                    lineno, f"feature indices must be strictly increasing at {tok!r}")
            if not np.isfinite(val):
                raise SvmlightParseError(lineno, f"non-finite value in {tok!r}")
            prev = idx
            col_idx.append(idx - 1)
            values.append(val)
        indptr.append(len(col_idx))
        d0 = max(d0, prev)

    if not ys:
        raise SvmlightParseError(0, "no examples")

    X = sp.csr_matrix(
        (np.asarray(values, dtype=np.float64),
         np.asarray(col_idx, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(ys), d0),
    )
    labels = tuple(sorted(label_ids, key=label_ids.get))
    return Dataset(X=X, y=np.asarray(ys, dtype=np.int64), labels=labels)


def load_svmlight(path: str, min_dim: int = 0) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_svmlight(fh, min_dim=min_dim)


def serialize_svmlight(data: Dataset) -> str:
    """Inverse of parse_svmlight: exact index/value round trip."""
    out = []
    X = data.X
    for i in range(data.n):
        start, end = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(
            f"{int(j) + 1}:{repr(float(v))}"
            for j, v in zip(X.indices[start:end], X.data[start:end])
        )
        label = data.labels[data.y[i]]
        out.append(f"{label} {feats}".rstrip())
    return "\n".join(out) + "\n"


def save_svmlight(data: Dataset, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_svmlight(data))


def synth_blobs(m: int, d0: int, n_per_class: int, separation: float,
                sigma: float, seed: int) -> Dataset:
    """Gaussian blobs: class means on a sphere of radius ``separation``.

    Deterministic for a fixed seed.  External labels are 1..m.
    """
    if m < 1 or d0 < 1 or n_per_class < 1:
        raise ValueError("m, d0 and n_per_class must be positive")
    if separation <= 0:
        raise ValueError("separation must be positive")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    means = rng.standard_normal((m, d0))
    means *= separation / np.linalg.norm(means, axis=1, keepdims=True)
    rows = np.vstack([
        means[j] + sigma * rng.standard_normal((n_per_class, d0))
        for j in range(m)
    ])
    y = np.repeat(np.arange(m), n_per_class)
    return Dataset(X=sp.csr_matrix(rows), y=y, labels=tuple(range(1, m + 1)))


def scale_max_abs(data: Dataset) -> Dataset:
    """Optional per-feature max-abs scaling; not applied by default."""
    X = data.X.copy().tocsc()
    for j in range(X.shape[1]):
        start, end = X.indptr[j], X.indptr[j + 1]
        if end > start:
            peak = np.max(np.abs(X.data[start:end]))
            if peak > 0:
                X.data[start:end] /= peak
    return Dataset(X=X.tocsr(), y=data.y, labels=data.labels)
