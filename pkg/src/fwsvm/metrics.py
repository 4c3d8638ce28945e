"""Evaluation metrics: top-k error ratios."""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .model import Model


def topk_error(model: Model, data: Dataset, ks: list[int]) -> dict[int, float]:
    """Fraction of examples whose true label misses the top-k prediction.

    Ties use the model's rule (smaller internal class index wins).  The
    dataset's labels are translated through the model's label map; a label
    the model has never seen raises ValueError.
    """
    for k in ks:
        if not 1 <= k <= model.m:
            raise ValueError(f"k must be in [1, {model.m}], got {k}")
    if data.d0 != model.d0:
        raise ValueError(f"feature dim {data.d0} does not match model d0 {model.d0}")
    to_model = {ext: j for j, ext in enumerate(model.labels)}
    try:
        trans = np.array([to_model[ext] for ext in data.labels], dtype=np.int64)
    except KeyError as e:
        raise ValueError(f"label {e.args[0]} unknown to the model") from e
    y = trans[data.y]

    S = data.X @ model.W
    order = np.argsort(-S, axis=1, kind="stable")
    ranks = np.argmax(order == y[:, None], axis=1)
    return {int(k): float(np.mean(ranks >= k)) for k in ks}
