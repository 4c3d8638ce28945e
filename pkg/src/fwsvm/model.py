"""Linear multiclass scorer with per-class weight columns, plus persistence.

The model is a dense (d0, m) weight matrix; the score of class j for a
sparse input x is the inner product of x with column j.  Prediction returns
the k highest-scoring classes, ties resolved toward the smaller class index.

Models round-trip through a versioned line-oriented text file: a header with
the loss configuration and label map, then one line of m weights per feature
row, written with full round-trip precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import LossFamily, LossSpec, TOP_K_FAMILIES, WEIGHTED_FAMILIES

MODEL_MAGIC = "fwsvm-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Model file is malformed or truncated."""


class ModelVersionError(ModelFormatError):
    """Model file declares an unsupported format version."""


class ModelDimensionError(ModelFormatError):
    """Declared and actual shapes in a model file disagree."""


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector: strictly increasing 0-based indices."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be equal-length vectors")
        if idx.size and (idx[0] < 0 or idx[-1] >= self.dim):
            raise ValueError(f"indices must lie in [0, {self.dim})")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("values must be finite")


@dataclass(frozen=True)
class Model:
    """Trained classifier: weights, label map, and training configuration.

    ``labels[j]`` is the external label of internal class j.  Immutable
    after construction; concurrent reads are safe.
    """

    W: np.ndarray
    labels: tuple[int, ...]
    loss_spec: LossSpec
    lam: float
    gamma_sm: float = 0.0

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if W.ndim != 2:
            raise ValueError("W must be a (d0, m) matrix")
        if len(self.labels) != W.shape[1]:
            raise ValueError(
                f"label map has {len(self.labels)} entries for {W.shape[1]} classes"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label map must be a bijection")
        if self.loss_spec.m != W.shape[1]:
            raise ValueError("loss spec class count differs from W columns")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.gamma_sm < 0:
            raise ValueError("gamma_sm must be nonnegative")

    @property
    def d0(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]


def scores(model: Model, x: SparseVector) -> np.ndarray:
    """Per-class scores of one example; O(m * nnz(x))."""
    if x.dim != model.d0:
        raise ValueError(f"feature dim {x.dim} does not match model d0 {model.d0}")
    if x.indices.size == 0:
        return np.zeros(model.m)
    return x.values @ model.W[x.indices, :]


def predict_topk(model: Model, x: SparseVector, k: int) -> list[int]:
    """The k external labels with the highest scores, best first.

    Ties go to the smaller internal class index.
    """
    if not 1 <= k <= model.m:
        raise ValueError(f"k must be in [1, {model.m}], got {k}")
    s = scores(model, x)
    order = np.argsort(-s, kind="stable")
    return [model.labels[j] for j in order[:k]]


def _fmt(v: float) -> str:
    return repr(float(v))


def save_model(model: Model, path: str):
    """Write the model in the versioned text format; load() restores it bit-exactly."""
    spec = model.loss_spec
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}"]
    lines.append(f"loss {spec.family.value}")
    if spec.family in TOP_K_FAMILIES:
        lines.append(f"k {spec.k}")
    if spec.family in WEIGHTED_FAMILIES:
        lines.append("rho " + ",".join(_fmt(v) for v in spec.rho))
    lines.append(f"lambda {_fmt(model.lam)}")
    lines.append(f"gamma_sm {_fmt(model.gamma_sm)}")
    lines.append(f"m {model.m}")
    lines.append(f"d0 {model.d0}")
    lines.append("labels " + ",".join(str(v) for v in model.labels))
    lines.append("weights")
    for row in model.W:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str) -> Model:
    """Read a model file; raises ModelFormatError and subclasses on bad input."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ModelFormatError("empty model file")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MODEL_MAGIC:
        raise ModelFormatError(f"not a {MODEL_MAGIC} file")
    if magic[1] != str(MODEL_VERSION):
        raise ModelVersionError(f"unsupported model version {magic[1]!r}")

    header: dict[str, str] = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line == "weights":
            body_at = i + 1
            break
        key, _, value = line.partition(" ")
        if not value:
            raise ModelFormatError(f"malformed header line {i + 1}: {line!r}")
        header[key] = value
    if body_at is None:
        raise ModelFormatError("truncated model file: no weights section")

    try:
        m = int(header["m"])
        d0 = int(header["d0"])
        lam = float(header["lambda"])
        gamma_sm = float(header["gamma_sm"])
        family = LossFamily(header["loss"])
        labels = tuple(int(v) for v in header["labels"].split(","))
    except KeyError as e:
        raise ModelFormatError(f"missing header field {e.args[0]!r}") from e
    except ValueError as e:
        raise ModelFormatError(f"malformed header value: {e}") from e

    k = None
    rho = None
    if family in TOP_K_FAMILIES:
        if "k" not in header:
            raise ModelFormatError("missing header field 'k'")
        k = int(header["k"])
    if family in WEIGHTED_FAMILIES:
        if "rho" not in header:
            raise ModelFormatError("missing header field 'rho'")
        rho = np.array([float(v) for v in header["rho"].split(",")])
        if rho.shape[0] != m:
            raise ModelDimensionError(f"rho has {rho.shape[0]} entries for m={m}")

    rows = lines[body_at:]
    if len(rows) != d0:
        raise ModelDimensionError(f"expected {d0} weight rows, found {len(rows)}")
    W = np.empty((d0, m))
    for r, line in enumerate(rows):
        parts = line.split()
        if len(parts) != m:
            raise ModelDimensionError(
                f"weight row {r} has {len(parts)} values, expected {m}"
            )
        try:
            W[r] = [float(v) for v in parts]
        except ValueError as e:
            raise ModelFormatError(f"malformed weight in row {r}: {e}") from e

    try:
        spec = LossSpec(family=family, m=m, k=k, rho=rho)
        return Model(W=W, labels=labels, loss_spec=spec, lam=lam, gamma_sm=gamma_sm)
    except ValueError as e:
        raise ModelFormatError(f"inconsistent model file: {e}") from e
