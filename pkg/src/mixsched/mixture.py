"""Simplex-constrained task mixtures and the equilibrium reweighting rule.

A mixture assigns one sampling probability per task dataset.  The update
rule multiplies each weight by ``exp(-alpha * trend_j)`` where ``trend_j``
is the task's recent score change (positive = improving), then renormalizes,
so regressing tasks gain sampling mass and improving ones cede it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

SUM_TOL = 1e-9


def _as_readonly(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MixtureProportions:
    """A point on the k-simplex: one sampling probability per task."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _as_readonly(self.weights, "weights")
        if arr.size < 1:
            raise ValueError("mixture needs at least one task")
        if not np.all(np.isfinite(arr)):
            raise ValueError("mixture weights must be finite")
        if np.any(arr < 0.0):
            raise ValueError(f"mixture weights must be non-negative, got {arr}")
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"mixture weights must sum to 1 (got {total!r})")
        object.__setattr__(self, "weights", arr)

    @property
    def k(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.weights.size

    def __getitem__(self, i: int) -> float:
        return float(self.weights[i])

    def to_json(self) -> str:
        """JSON array of weights, ordered by task index."""
        return json.dumps([float(w) for w in self.weights])

    @classmethod
    def from_json(cls, text: str) -> "MixtureProportions":
        return cls(np.asarray(json.loads(text), dtype=np.float64))


@dataclass(frozen=True)
class PerformanceDelta:
    """Per-task score changes plus the positive scales used to normalize them.

    ``deltas`` are in the improvement-positive convention (a worsening task
    has a negative delta regardless of its metric's native direction).
    """

    deltas: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        d = _as_readonly(self.deltas, "deltas")
        s = _as_readonly(self.scales, "scales")
        if d.size != s.size:
            raise ValueError(f"deltas ({d.size}) and scales ({s.size}) length mismatch")
        if not np.all(s > 0.0):
            raise ValueError("all delta scales must be strictly positive")
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "scales", s)

    @property
    def k(self) -> int:
        return self.deltas.size


@dataclass(frozen=True)
class DesConfig:
    """Knobs of the equilibrium update.

    alpha:            sensitivity of the multiplicative reweighting (>= 0).
    lambda_floor:     minimum post-update weight; keeps every task sampled.
    normalize_deltas: divide each delta by its task's scale before the update
                      (use when tasks are scored in different metric units).
    """

    alpha: float = 1.0
    lambda_floor: float = 0.01
    normalize_deltas: bool = True

    def __post_init__(self):
        if not (self.alpha >= 0.0 and np.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (0.0 <= self.lambda_floor < 1.0):
            raise ValueError(f"lambda_floor must lie in [0, 1), got {self.lambda_floor}")


def uniform_mixture(k: int) -> MixtureProportions:
    """Equal proportions over k tasks."""
    if k < 1:
        raise ValueError(f"task count must be >= 1, got {k}")
    return MixtureProportions(np.full(k, 1.0 / k))


def _apply_floor(weights: np.ndarray, floor: float) -> np.ndarray:
    """Raise sub-floor weights to the floor, renormalizing the rest.

    Rescaling the unfloored coordinates can push new ones below the floor,
    so iterate to a fixpoint.  Terminates because the floored set only grows
    and k * floor < 1 guarantees the last free coordinate stays above it.
    """
    out = weights.copy()
    floored = np.zeros(out.size, dtype=bool)
    while True:
        below = (out < floor) & ~floored
        if not below.any():
            return out
        floored |= below
        free = ~floored
        out[floored] = floor
        remaining = 1.0 - floor * floored.sum()
        out[free] *= remaining / out[free].sum()


def des_update(
    lam: MixtureProportions, delta: PerformanceDelta, cfg: DesConfig
) -> MixtureProportions:
    """One equilibrium step: reweight proportions by recent score trends.

    Returns lam' with lam'_j proportional to lam_j * exp(-alpha * d_j),
    where d_j is the (optionally scale-normalized) delta of task j.  The
    product is evaluated in log space so extreme exponents cannot overflow
    or underflow, then any weight below the floor is lifted and the rest
    renormalized.
    """
    k = lam.k
    if delta.k != k:
        raise ValueError(f"delta has {delta.k} tasks, mixture has {k}")
    if not np.all(np.isfinite(delta.deltas)):
        raise ValueError(f"performance deltas must be finite, got {delta.deltas}")
    if cfg.lambda_floor * k >= 1.0:
        raise ValueError(
            f"lambda_floor {cfg.lambda_floor} is infeasible for k={k} tasks"
        )
    d = delta.deltas / delta.scales if cfg.normalize_deltas else delta.deltas

    w = lam.weights
    with np.errstate(divide="ignore"):
        log_w = np.where(w > 0.0, np.log(np.where(w > 0.0, w, 1.0)), -np.inf)
    logits = log_w - cfg.alpha * d
    logits = logits - logits.max()
    expd = np.exp(logits)
    new = expd / expd.sum()

    if cfg.lambda_floor > 0.0:
        new = _apply_floor(new, cfg.lambda_floor)
    return MixtureProportions(new)


def mixture_distribution(dataset_sizes, lam: MixtureProportions) -> np.ndarray:
    """Flat per-sample probability table induced by a mixture.

    Sample x of task i carries probability lam_i / |D_i|; the returned array
    concatenates the per-task blocks in task order.
    """
    sizes = [int(n) for n in dataset_sizes]
    if len(sizes) != lam.k:
        raise ValueError(f"{len(sizes)} dataset sizes for a {lam.k}-task mixture")
    for i, n in enumerate(sizes):
        if n < 1:
            raise ValueError(f"task {i} has an empty dataset")
    return np.concatenate(
        [np.full(n, lam.weights[i] / n) for i, n in enumerate(sizes)]
    )
