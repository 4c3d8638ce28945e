"""Projected subgradient baseline on the primal objective.

Full-batch subgradient steps with the 1/(lambda * t) schedule, followed by
projection onto a Frobenius ball.  The default radius sqrt(2 P(0) / lambda)
is a valid bound on the optimum, since lambda/2 * ||w*||^2 <= P(w*) <= P(0).
There is no dual iterate, so trace rows carry NaN in the dual and gap
columns and no certificate is ever claimed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .losses import LossSpec, beta_matrix, loss_vector, margin_matrix
from .model import Model
from .solver import TraceRecord, TrainResult, _Engine


@dataclass
class PgConfig:
    lam: float
    max_iters: int = 1000
    radius: float = 0.0  # 0 means auto: sqrt(2 P(0) / lambda)
    trace_stride: int = 1
    n_threads: int = 1
    deterministic: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")


def pg_train(data: Dataset, spec: LossSpec, config: PgConfig) -> TrainResult:
    """Minimize the primal by projected subgradient descent from W = 0."""
    if spec.m != data.m:
        raise ValueError(f"loss spec is for {spec.m} classes, data has {data.m}")
    n = data.n
    rows = np.arange(n)
    W = np.zeros((data.d0, data.m))
    n_threads = 1 if config.deterministic else config.n_threads
    engine = _Engine(data.X, n_threads)
    nan = float("nan")

    losses0 = loss_vector(spec, margin_matrix(np.zeros((n, data.m)), data.y))
    p0 = float(losses0.sum()) / n
    radius = config.radius if config.radius > 0 else math.sqrt(2.0 * p0 / config.lam)

    trace: list[TraceRecord] = []
    t = 0
    t0 = time.perf_counter()
    try:
        while True:
            S = engine.scores(W)
            C = margin_matrix(S, data.y)
            if t % config.trace_stride == 0 or t >= config.max_iters:
                primal = (0.5 * config.lam * float((W * W).sum())
                          + float(loss_vector(spec, C).sum()) / n)
                elapsed = 0.0 if config.deterministic else time.perf_counter() - t0
                trace.append(TraceRecord(t, elapsed, primal, nan, nan))
            if t >= config.max_iters:
                break
            B, mass = beta_matrix(spec, C)
            G = B  # per-example loss subgradients as rows
            G[rows, data.y] -= mass
            grad = config.lam * W + engine.gram(G) / n
            W -= grad / (config.lam * (t + 1))
            norm = math.sqrt(float((W * W).sum()))
            if norm > radius:
                W *= radius / norm
            t += 1
    finally:
        engine.close()

    model = Model(W=W, labels=data.labels, loss_spec=spec, lam=config.lam)
    return TrainResult(model=model, trace=trace, certified=False, iterations=t)
