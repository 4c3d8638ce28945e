"""Multiclass hinge-loss families with sorting-based linear maximization.

Every family here evaluates a penalty on the margin vector

    c = 1 - e_y + s - s_y * 1,

where ``s`` is the score vector and ``y`` the true class, so ``c[y] == 0``
and ``c[j] = 1 + s[j] - s[y]`` for the other classes.  Each loss equals the
maximum of ``<beta, c>`` over a family-specific convex set of nonnegative
weight vectors, and that maximizer is found by sorting ``c`` once.  The
maximizer drives both the subgradient and the dual direction-finding step of
the solver.

Families:

* max hinge: penalty of the single worst class (classic multiclass SVM).
* top-k hinge: one hinge on the mean of the k largest margins.
* Usunier loss: mean of per-rank hinges over the k largest margins.
* weighted top-k hinge: one hinge on a rank-weighted sum of all margins.
* weighted Usunier loss: rank-weighted sum of per-rank hinges.

The weighted families take a nonincreasing weight vector ``rho`` with
``rho[0] > 0`` and ``rho[m-1] == 0``; weights are applied in margin rank
order (largest margin gets ``rho[0]``).

Scalar functions (`loss_eval`, `beta_argmax`, `subgradient`) operate on one
example; the ``*_matrix`` / ``*_vector`` helpers are the row-vectorized
equivalents used by the solvers.  All functions are pure and safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class LossFamily(Enum):
    """The five supported loss families (values double as CLI codes)."""

    MAX_HINGE = "mh"
    TOP_K = "utk"
    USUNIER = "uu"
    WEIGHTED_TOP_K = "wtk"
    WEIGHTED_USUNIER = "wu"


TOP_K_FAMILIES = (LossFamily.TOP_K, LossFamily.USUNIER)
WEIGHTED_FAMILIES = (LossFamily.WEIGHTED_TOP_K, LossFamily.WEIGHTED_USUNIER)


def default_rho(m: int) -> np.ndarray:
    """Linearly decaying rank weights max(0, 6-j)/15 for ranks j = 1..m.

    Puts weight on the first five ranks only and sums to 1 for m >= 6.  The
    last entry is forced to zero so the vector is valid at any m >= 2.
    """
    rho = np.maximum(0.0, 6.0 - np.arange(1, m + 1)) / 15.0
    rho[-1] = 0.0
    return rho


@dataclass(frozen=True)
class LossSpec:
    """A loss family instance for an m-class problem.

    ``k`` is required for the top-k families, ``rho`` (length m,
    nonincreasing, rho[0] > 0, rho[m-1] == 0) for the weighted families;
    the max hinge takes neither.
    """

    family: LossFamily
    m: int
    k: int | None = None
    rho: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"class count must be >= 1, got {self.m}")
        if self.family in TOP_K_FAMILIES:
            if self.k is None:
                raise ValueError(f"{self.family.name} requires k")
            if not 1 <= self.k <= self.m:
                raise ValueError(f"k must be in [1, {self.m}], got {self.k}")
            if self.rho is not None:
                raise ValueError(f"{self.family.name} does not take rho")
        elif self.family in WEIGHTED_FAMILIES:
            if self.rho is None:
                raise ValueError(f"{self.family.name} requires rho")
            if self.k is not None:
                raise ValueError(f"{self.family.name} does not take k")
            rho = np.asarray(self.rho, dtype=np.float64)
            object.__setattr__(self, "rho", rho)
            if rho.shape != (self.m,):
                raise ValueError(f"rho must have length m={self.m}, got {rho.shape}")
            if not np.all(np.isfinite(rho)):
                raise ValueError("rho must be finite")
            if np.any(np.diff(rho) > 0):
                raise ValueError("rho must be nonincreasing")
            if rho[-1] != 0.0:
                raise ValueError("rho must end with 0")
            if rho[0] <= 0.0:
                raise ValueError("rho[0] must be positive")
        else:
            if self.k is not None or self.rho is not None:
                raise ValueError("MAX_HINGE takes neither k nor rho")

    @property
    def levels(self) -> tuple[tuple[int, float], ...]:
        """Strict-decrease points of rho: pairs (rank, weight at that rank).

        For rho = (1/k, ..., 1/k, 0, ..., 0) this is ((k, 1/k),), matching
        the reduction of the weighted families to their unweighted
        counterparts.  Empty for the unweighted families.
        """
        if self.rho is None:
            return ()
        rho = self.rho
        return tuple(
            (j + 1, float(rho[j])) for j in range(self.m - 1) if rho[j] > rho[j + 1]
        )


@dataclass(frozen=True)
class MarginVector:
    """Margin vector c = 1 - e_y + s - s_y*1 with its label; c[y] is 0."""

    c: np.ndarray
    y: int


@dataclass(frozen=True)
class BetaVertex:
    """A maximizer of <beta, c> over the family's feasible set.

    ``mass`` is the component sum of ``beta``.
    """

    beta: np.ndarray
    mass: float


def margin_vector(s, y: int) -> MarginVector:
    """Build the margin vector for scores ``s`` and 0-based true class ``y``.

    The y-th entry is set to exactly 0.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1:
        raise ValueError(f"scores must be a vector, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    if not 0 <= y < s.shape[0]:
        raise ValueError(f"label {y} out of range for {s.shape[0]} classes")
    c = s - s[y] + 1.0
    c[y] = 0.0
    return MarginVector(c=c, y=int(y))


def _check_dims(spec: LossSpec, n_entries: int):
    if n_entries != spec.m:
        raise ValueError(f"expected {spec.m} classes, got {n_entries}")


def _descending(c: np.ndarray) -> np.ndarray:
    # ties broken by ascending index (stable sort on the negated vector)
    return np.argsort(-c, kind="stable")


def loss_eval(spec: LossSpec, s, y: int) -> float:
    """Evaluate the loss at score vector ``s`` with true class ``y``."""
    mv = margin_vector(s, y)
    _check_dims(spec, mv.c.shape[0])
    c_sorted = mv.c[_descending(mv.c)]
    fam = spec.family
    if fam is LossFamily.MAX_HINGE:
        # c[y] == 0 keeps the maximum nonnegative
        return float(c_sorted[0])
    if fam is LossFamily.TOP_K:
        return max(0.0, float(c_sorted[: spec.k].sum()) / spec.k)
    if fam is LossFamily.USUNIER:
        return float(np.maximum(c_sorted[: spec.k], 0.0).sum()) / spec.k
    if fam is LossFamily.WEIGHTED_TOP_K:
        return max(0.0, float(spec.rho @ c_sorted))
    return float(spec.rho @ np.maximum(c_sorted, 0.0))


def beta_argmax(spec: LossSpec, margin: MarginVector) -> BetaVertex:
    """Maximize <beta, c> over the family's feasible set.

    Returns a vertex of the set; when the maximum is 0 the zero vector is
    chosen, which keeps converged solver iterates stationary.
    """
    c = margin.c
    _check_dims(spec, c.shape[0])
    order = _descending(c)
    beta = np.zeros_like(c)
    fam = spec.family
    if fam is LossFamily.MAX_HINGE:
        j = order[0]
        if c[j] > 0.0:
            beta[j] = 1.0
    elif fam is LossFamily.TOP_K:
        top = order[: spec.k]
        if c[top].sum() > 0.0:
            beta[top] = 1.0 / spec.k
    elif fam is LossFamily.USUNIER:
        top = order[: spec.k]
        beta[top[c[top] > 0.0]] = 1.0 / spec.k
    elif fam is LossFamily.WEIGHTED_TOP_K:
        c_sorted = c[order]
        if spec.rho @ c_sorted > 0.0:
            beta[order] = spec.rho
    else:  # WEIGHTED_USUNIER
        c_sorted = c[order]
        pos = c_sorted > 0.0
        beta[order[pos]] = spec.rho[pos]
    return BetaVertex(beta=beta, mass=float(beta.sum()))


def subgradient(spec: LossSpec, s, y: int) -> np.ndarray:
    """A subgradient of the loss at ``s``: beta* - <1, beta*> * e_y."""
    bv = beta_argmax(spec, margin_vector(s, y))
    g = bv.beta.copy()
    g[y] -= bv.mass
    return g


# ---------------------------------------------------------------------------
# Row-vectorized versions: one example per row, shared by the solvers.
# ---------------------------------------------------------------------------


def margin_matrix(S: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Margin vectors for a batch: S is (n, m) scores, y is (n,) labels."""
    rows = np.arange(S.shape[0])
    C = S - S[rows, y][:, None] + 1.0
    C[rows, y] = 0.0
    return C


def _sorted_margins(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(-C, axis=1, kind="stable")
    return order, np.take_along_axis(C, order, axis=1)


def _loss_from_sorted(spec: LossSpec, Cs: np.ndarray) -> np.ndarray:
    fam = spec.family
    if fam is LossFamily.MAX_HINGE:
        return Cs[:, 0].copy()
    if fam is LossFamily.TOP_K:
        return np.maximum(Cs[:, : spec.k].sum(axis=1) / spec.k, 0.0)
    if fam is LossFamily.USUNIER:
        return np.maximum(Cs[:, : spec.k], 0.0).sum(axis=1) / spec.k
    if fam is LossFamily.WEIGHTED_TOP_K:
        return np.maximum(Cs @ spec.rho, 0.0)
    return np.maximum(Cs, 0.0) @ spec.rho


def _beta_from_sorted(spec: LossSpec, Cs: np.ndarray) -> np.ndarray:
    Bs = np.zeros_like(Cs)  # maximizer in sorted coordinates
    fam = spec.family
    if fam is LossFamily.MAX_HINGE:
        Bs[:, 0] = (Cs[:, 0] > 0.0).astype(np.float64)
    elif fam is LossFamily.TOP_K:
        active = Cs[:, : spec.k].sum(axis=1) > 0.0
        Bs[active, : spec.k] = 1.0 / spec.k
    elif fam is LossFamily.USUNIER:
        Bs[:, : spec.k] = (Cs[:, : spec.k] > 0.0) / spec.k
    elif fam is LossFamily.WEIGHTED_TOP_K:
        active = (Cs @ spec.rho) > 0.0
        Bs[active] = spec.rho
    else:  # WEIGHTED_USUNIER
        Bs = np.where(Cs > 0.0, spec.rho[None, :], 0.0)
    return Bs


def loss_vector(spec: LossSpec, C: np.ndarray) -> np.ndarray:
    """Per-row loss values from a margin matrix."""
    _check_dims(spec, C.shape[1])
    _, Cs = _sorted_margins(C)
    return _loss_from_sorted(spec, Cs)


def beta_matrix(spec: LossSpec, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row maximizers of <beta, c>: returns (B, mass) with B of shape C."""
    _check_dims(spec, C.shape[1])
    order, Cs = _sorted_margins(C)
    B = np.zeros_like(C)
    np.put_along_axis(B, order, _beta_from_sorted(spec, Cs), axis=1)
    return B, B.sum(axis=1)


def loss_and_beta_matrix(
    spec: LossSpec, C: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Losses and maximizers in one pass, sharing the sort: (losses, B, mass)."""
    _check_dims(spec, C.shape[1])
    order, Cs = _sorted_margins(C)
    B = np.zeros_like(C)
    np.put_along_axis(B, order, _beta_from_sorted(spec, Cs), axis=1)
    return _loss_from_sorted(spec, Cs), B, B.sum(axis=1)
