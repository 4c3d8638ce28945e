"""Brute-force oracles for validating the closed-form solver pieces.

These deliberately avoid the production code paths: the feasible sets of
the unweighted families are enumerated vertex by vertex, subgradients are
checked against central differences of the loss itself, and the line-search
step is checked against direct dual evaluation on a grid, with the weight
matrix rebuilt from scratch at every grid point.  Small scale only.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .data import Dataset
from .losses import LossFamily, LossSpec, loss_eval, margin_vector, subgradient
from .solver import DualState

_ENUM_LIMIT = 8


def simplex_vertices(family: LossFamily, m: int, k: int | None = None) -> np.ndarray:
    """All vertices of an unweighted family's feasible set, one per row.

    Max hinge: the origin and the unit vectors.  Top-k hinge: the origin and
    the uniform 1/k points on every k-subset.  Usunier: the origin and the
    uniform 1/k points on every subset of size 1..k.  Weighted families are
    rejected (their sets are not enumerated here).
    """
    if m > _ENUM_LIMIT:
        raise ValueError(f"enumeration supports m <= {_ENUM_LIMIT}, got {m}")
    if family is LossFamily.MAX_HINGE:
        return np.vstack([np.zeros((1, m)), np.eye(m)])
    if family in (LossFamily.TOP_K, LossFamily.USUNIER):
        if k is None or not 1 <= k <= m:
            raise ValueError(f"k must be in [1, {m}]")
        sizes = [k] if family is LossFamily.TOP_K else range(1, k + 1)
        rows = [np.zeros(m)]
        for size in sizes:
            for subset in combinations(range(m), size):
                v = np.zeros(m)
                v[list(subset)] = 1.0 / k
                rows.append(v)
        return np.vstack(rows)
    raise ValueError(f"{family.name} vertices are not enumerable here")


def bruteforce_maxdot(vertices: np.ndarray, c: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact max of <beta, c> over a finite vertex list: (value, argmax)."""
    vertices = np.asarray(vertices, dtype=np.float64)
    if vertices.size == 0:
        raise ValueError("empty vertex list")
    dots = vertices @ np.asarray(c, dtype=np.float64)
    best = int(np.argmax(dots))
    return float(dots[best]), vertices[best]


def _is_generic(spec: LossSpec, s: np.ndarray, y: int, delta: float) -> bool:
    """True when s sits strictly inside one linear piece of the loss."""
    c = margin_vector(s, y).c
    c_sorted = np.sort(c)[::-1]
    if c_sorted.size > 1 and np.min(np.abs(np.diff(c_sorted))) <= delta:
        return False
    off = np.abs(np.delete(c, y))
    if off.size and off.min() <= delta:
        return False
    if spec.family is LossFamily.TOP_K:
        return abs(c_sorted[: spec.k].mean()) > delta
    if spec.family is LossFamily.WEIGHTED_TOP_K:
        return abs(spec.rho @ c_sorted) > delta
    return True


def finite_diff_subgradient_check(spec: LossSpec, s, y: int, h: float = 1e-6,
                                  tol: float = 1e-4,
                                  rng: np.random.Generator | None = None) -> bool:
    """Check the subgradient against central differences of the loss.

    Points too close to a sorting tie or a hinge kink are nudged by seeded
    jitter until the loss is differentiable there, so the subgradient must
    equal the gradient.
    """
    s = np.asarray(s, dtype=np.float64).copy()
    rng = rng or np.random.default_rng(0)
    delta = max(1e-3, 10.0 * h)
    for _ in range(100):
        if _is_generic(spec, s, y, delta):
            break
        s = s + rng.normal(scale=10.0 * delta, size=s.shape)
    else:
        raise RuntimeError("could not jitter the point away from kinks")

    g = subgradient(spec, s, y)
    fd = np.empty_like(s)
    for j in range(s.shape[0]):
        bump = np.zeros_like(s)
        bump[j] = h
        fd[j] = (loss_eval(spec, s + bump, y) - loss_eval(spec, s - bump, y)) / (2 * h)
    return bool(np.max(np.abs(fd - g)) <= tol)


def grid_line_search_oracle(state: DualState, U: np.ndarray, data: Dataset,
                            lam: float, gamma_sm: float = 0.0,
                            grid_size: int = 101) -> tuple[float, float]:
    """Best step on a uniform grid of [0, 1] by direct dual evaluation.

    Returns (gamma, dual value).  The dual at each grid point is computed
    from first principles, rebuilding the weight matrix from the stepped
    dual variable.
    """
    n = data.n
    rows = np.arange(n)
    dA = U - state.alpha
    best_gamma, best_val = 0.0, -np.inf
    for gamma in np.linspace(0.0, 1.0, grid_size):
        A = state.alpha + gamma * dA
        W = (data.X.T @ A) / (lam * n)
        val = (float(A[rows, data.y].sum()) / n
               - 0.5 * lam * float((W * W).sum())
               - (gamma_sm / (2.0 * n)) * float((A * A).sum()))
        if val > best_val:
            best_gamma, best_val = float(gamma), val
    return best_gamma, best_val
