"""Frank-Wolfe solver for the dual of the regularized multiclass hinge risk.

The dual variable is one vector per training example, stacked here as the
rows of ``alpha`` (n, m).  The weight matrix is linked to the dual by

    W = (1 / (lambda * n)) * X^T alpha,

and on the feasible set the dual objective simplifies to

    D = (1/n) * sum_i alpha[i, y_i] - (lambda/2) * ||W||_F^2.

Each iteration finds the feasible vertex maximizing the linearized dual
(one loss subgradient per example, so a sort per row) and moves toward it,
either by exact line search over the segment (the step has a closed form
because D is quadratic along it) or by the schedule 2 / (t + 1).

Smoothing: with ``gamma_sm > 0`` the per-example losses are replaced by
their quadratic-regularized envelopes.  The same iteration applies with the
scores augmented to ``s~ = X W + gamma_sm * alpha`` (row-wise), the extra
line-search curvature ``gamma_sm * ||dA||_F^2``, and the penalty
``(gamma_sm / 2n) * ||alpha||_F^2`` on both objectives; the reported primal
is then the equivalent augmented-feature objective, so the gap remains a
valid optimality certificate.  All formulas below include these terms,
which vanish identically at ``gamma_sm = 0``.

The primal-dual gap is evaluated every ``gap_stride`` iterations from the
scores already computed for direction finding; training stops once
``gap <= epsilon`` (a certificate that the primal error is at most epsilon)
or after ``max_iters`` updates.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .data import Dataset
from .losses import (
    LossSpec,
    beta_matrix,
    loss_and_beta_matrix,
    margin_matrix,
)
from .model import Model

TRACE_HEADER = "iter,elapsed_sec,primal,dual,gap"


class StepRule(Enum):
    LINE_SEARCH = "linesearch"
    SCHEDULE = "schedule"


@dataclass
class SolverConfig:
    """Solver settings.

    ``epsilon`` is the duality-gap stopping tolerance; ``None`` disables
    early stopping (fixed iteration budgets for benchmarking).  ``seed`` is
    recorded for reproducibility metadata; the solver itself is
    deterministic and draws no random numbers.  ``deterministic`` forces
    serial reductions and zeroes the elapsed-time column so repeated runs
    are byte-identical.
    """

    lam: float
    gamma_sm: float = 0.0
    epsilon: float | None = 1e-5
    max_iters: int = 1000
    step_rule: StepRule = StepRule.LINE_SEARCH
    gap_stride: int = 1
    refresh_every: int = 100
    seed: int = 0
    n_threads: int = 1
    deterministic: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.gamma_sm < 0:
            raise ValueError("gamma_sm must be nonnegative")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.gap_stride < 1:
            raise ValueError("gap_stride must be >= 1")
        if self.refresh_every < 1:
            raise ValueError("refresh_every must be >= 1")


@dataclass
class DualState:
    """Mutable solver state: dual rows, linked weights, iteration count."""

    alpha: np.ndarray  # (n, m); row i is the dual vector of example i
    W: np.ndarray      # (d0, m), maintained as X^T alpha / (lambda n)
    t: int = 0         # completed updates
    elapsed: float = 0.0


@dataclass(frozen=True)
class TraceRecord:
    """One convergence-trace row; gap = primal - dual."""

    iteration: int
    elapsed_sec: float
    primal: float
    dual: float
    gap: float


@dataclass
class TrainResult:
    """Outcome of a training run; ``certified`` is True when the final gap
    was at or below the configured epsilon."""

    model: Model
    trace: list[TraceRecord] = field(default_factory=list)
    certified: bool = False
    iterations: int = 0


class _Engine:
    """Design-matrix products, optionally chunked over a thread pool.

    Partial results are always reduced in fixed chunk order, so a given
    thread count reproduces itself exactly; different thread counts may
    differ in the last bits of sums.
    """

    def __init__(self, X, n_threads: int = 1):
        self.X = X
        n = X.shape[0]
        k = max(1, min(int(n_threads), n))
        if k > 1:
            bounds = np.linspace(0, n, k + 1).astype(int)
            self._slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])
                            if b > a]
            self._parts = [X[sl] for sl in self._slices]
            self._pool = ThreadPoolExecutor(max_workers=len(self._parts))
        else:
            self._slices = None
            self._pool = None

    def scores(self, W: np.ndarray) -> np.ndarray:
        """X @ W, shape (n, m)."""
        if self._pool is None:
            return self.X @ W
        chunks = list(self._pool.map(lambda P: P @ W, self._parts))
        return np.concatenate(chunks, axis=0)

    def gram(self, V: np.ndarray) -> np.ndarray:
        """X^T @ V, shape (d0, m)."""
        if self._pool is None:
            return self.X.T @ V
        futures = [
            self._pool.submit(lambda P, sl: P.T @ V[sl], P, sl)
            for P, sl in zip(self._parts, self._slices)
        ]
        out = futures[0].result()
        for fut in futures[1:]:
            out = out + fut.result()
        return out

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()


def init_state(data: Dataset) -> DualState:
    """Start at alpha = 0 (feasible for every family) and hence W = 0."""
    return DualState(alpha=np.zeros((data.n, data.m)),
                     W=np.zeros((data.d0, data.m)))


def recompute_weights(state: DualState, data: Dataset, lam: float):
    """Rebuild W from alpha from scratch (bounds incremental drift)."""
    state.W = (data.X.T @ state.alpha) / (lam * data.n)


def _direction_from_scores(spec: LossSpec, St: np.ndarray,
                           y: np.ndarray) -> np.ndarray:
    """Feasible vertex maximizing the linearized dual, one row per example."""
    B, mass = beta_matrix(spec, margin_matrix(St, y))
    U = -B
    U[np.arange(St.shape[0]), y] += mass
    return U


def _direction_from_beta(B: np.ndarray, mass: np.ndarray,
                         y: np.ndarray) -> np.ndarray:
    U = -B
    U[np.arange(B.shape[0]), y] += mass
    return U


def _gamma_hat(St, dA, dW, y, lam, n, gamma_sm):
    num = float(dA[np.arange(n), y].sum()) - float((dA * St).sum())
    den = lam * n * float((dW * dW).sum()) + gamma_sm * float((dA * dA).sum())
    if den <= 0.0:
        return 0.0
    return min(1.0, max(0.0, num / den))


def _primal_dual(Wsq, Asq, loss_sum, alpha_y_sum, n, lam, gamma_sm):
    smooth = (gamma_sm / (2.0 * n)) * Asq
    primal = 0.5 * lam * Wsq + loss_sum / n + smooth
    dual = alpha_y_sum / n - 0.5 * lam * Wsq - smooth
    return primal, dual


def direction_find(state: DualState, data: Dataset, spec: LossSpec,
                   gamma_sm: float = 0.0) -> np.ndarray:
    """Direction-finding step: rows are negated loss subgradients at the
    (smoothing-augmented) scores, i.e. vertices of the dual feasible set."""
    St = data.X @ state.W + gamma_sm * state.alpha
    return _direction_from_scores(spec, St, data.y)


def line_search_gamma(state: DualState, U: np.ndarray, data: Dataset,
                      lam: float, gamma_sm: float = 0.0) -> float:
    """Exact maximizer of the dual over the segment toward U, clamped to [0, 1].

    The dual is quadratic in the step length, so the maximizer is the ratio
    of the directional derivative to the curvature.  A zero direction
    returns 0.
    """
    n = data.n
    St = data.X @ state.W + gamma_sm * state.alpha
    dA = U - state.alpha
    dW = (data.X.T @ dA) / (lam * n)
    return _gamma_hat(St, dA, dW, data.y, lam, n, gamma_sm)


def dual_value(state: DualState, data: Dataset, lam: float,
               gamma_sm: float = 0.0) -> float:
    """Dual objective at the current state (uses the maintained W)."""
    n = data.n
    Wsq = float((state.W * state.W).sum())
    Asq = float((state.alpha * state.alpha).sum())
    ay = float(state.alpha[np.arange(n), data.y].sum())
    return _primal_dual(Wsq, Asq, 0.0, ay, n, lam, gamma_sm)[1]


def primal_value(state: DualState, data: Dataset, spec: LossSpec, lam: float,
                 gamma_sm: float = 0.0) -> float:
    """Primal objective at w(A); with smoothing, the augmented-feature
    objective whose dual is the smoothed dual (same optimum, same gap
    semantics)."""
    n = data.n
    St = data.X @ state.W + gamma_sm * state.alpha
    losses, _, _ = loss_and_beta_matrix(spec, margin_matrix(St, data.y))
    Wsq = float((state.W * state.W).sum())
    Asq = float((state.alpha * state.alpha).sum())
    return _primal_dual(Wsq, Asq, float(losses.sum()), 0.0, n, lam, gamma_sm)[0]


def _apply_update(state: DualState, engine: _Engine, data: Dataset,
                  config: SolverConfig, St: np.ndarray,
                  U: np.ndarray) -> float:
    """One dual update from precomputed scores and direction; returns gamma."""
    n = data.n
    dA = U - state.alpha
    dW = engine.gram(dA) / (config.lam * n)
    if config.step_rule is StepRule.SCHEDULE:
        gamma = 2.0 / (state.t + 2.0)
    else:
        gamma = _gamma_hat(St, dA, dW, data.y, config.lam, n, config.gamma_sm)
    state.alpha += gamma * dA
    state.W += gamma * dW
    state.t += 1
    if state.t % config.refresh_every == 0:
        state.W = engine.gram(state.alpha) / (config.lam * n)
    return gamma


def step(state: DualState, config: SolverConfig, data: Dataset,
         spec: LossSpec) -> DualState:
    """Run one full iteration (direction, step length, update) in place."""
    engine = _Engine(data.X, 1)
    try:
        St = engine.scores(state.W) + config.gamma_sm * state.alpha
        U = _direction_from_scores(spec, St, data.y)
        _apply_update(state, engine, data, config, St, U)
    finally:
        engine.close()
    return state


def train(data: Dataset, spec: LossSpec, config: SolverConfig) -> TrainResult:
    """Train from alpha = 0 until the gap certificate or the iteration cap.

    The gap at the pre-update point is evaluated every ``gap_stride``
    iterations (reusing the direction-finding scores) and once more at the
    final state, so the trace always ends with the returned model's values.
    Non-convergence is reported through ``certified``, not raised.
    """
    if spec.m != data.m:
        raise ValueError(f"loss spec is for {spec.m} classes, data has {data.m}")
    n = data.n
    rows = np.arange(n)
    state = init_state(data)
    n_threads = 1 if config.deterministic else config.n_threads
    engine = _Engine(data.X, n_threads)
    trace: list[TraceRecord] = []
    certified = False
    t0 = time.perf_counter()
    try:
        while True:
            St = engine.scores(state.W) + config.gamma_sm * state.alpha
            U = None
            if state.t % config.gap_stride == 0 or state.t >= config.max_iters:
                C = margin_matrix(St, data.y)
                losses, B, mass = loss_and_beta_matrix(spec, C)
                Wsq = float((state.W * state.W).sum())
                Asq = float((state.alpha * state.alpha).sum())
                ay = float(state.alpha[rows, data.y].sum())
                primal, dual = _primal_dual(Wsq, Asq, float(losses.sum()), ay,
                                            n, config.lam, config.gamma_sm)
                gap = primal - dual
                state.elapsed = (0.0 if config.deterministic
                                 else time.perf_counter() - t0)
                trace.append(TraceRecord(state.t, state.elapsed, primal, dual,
                                         gap))
                if config.epsilon is not None and gap <= config.epsilon:
                    certified = True
                    break
                U = _direction_from_beta(B, mass, data.y)
            if state.t >= config.max_iters:
                break
            if U is None:
                U = _direction_from_scores(spec, St, data.y)
            _apply_update(state, engine, data, config, St, U)
    finally:
        engine.close()
    model = Model(W=state.W.copy(), labels=data.labels, loss_spec=spec,
                  lam=config.lam, gamma_sm=config.gamma_sm)
    return TrainResult(model=model, trace=trace, certified=certified,
                       iterations=state.t)


def write_trace(path: str, records: list[TraceRecord]):
    """Write a trace CSV with full round-trip float formatting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRACE_HEADER + "\n")
        for r in records:
            fh.write(f"{r.iteration},{r.elapsed_sec!r},{r.primal!r},"
                     f"{r.dual!r},{r.gap!r}\n")


def read_trace(path: str) -> list[TraceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"not a trace CSV: {path}")
    out = []
    for line in lines[1:]:
        it, el, p, d, g = line.split(",")
        out.append(TraceRecord(int(it), float(el), float(p), float(d),
                               float(g)))
    return out
