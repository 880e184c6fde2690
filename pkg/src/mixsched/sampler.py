"""Batch composition from mixture proportions and reference-set extraction.

Sampling is driven entirely by the counter-based generator in
:mod:`mixsched.rng`; identical inputs and seed produce bit-identical plans
on any platform.  Index selection never touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .mixture import MixtureProportions
from .rng import CounterRng, derive_seed

BATCH_MODES = ("multinomial", "quota")

# substream tags so the same user seed feeds split and batch streams independently
_SPLIT_STREAM = 0x5E1


@dataclass(frozen=True)
class TaskDataset:
    """An indexed collection of sample identifiers for one task."""

    task_id: int
    samples: tuple[Hashable, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(set(self.samples)) != len(self.samples):
            raise ValueError(f"task {self.task_id} has duplicate sample identifiers")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class BatchPlan:
    """An ordered list of (task_id, sample_id) entries forming one batch."""

    entries: tuple[tuple[int, Hashable], ...]
    size: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != self.size:
            raise ValueError(
                f"plan holds {len(self.entries)} entries but declares size {self.size}"
            )

    def task_counts(self, k: int) -> np.ndarray:
        counts = np.zeros(k, dtype=np.int64)
        for task_id, _ in self.entries:
            counts[task_id] += 1
        return counts

    def csv_rows(self, iteration: int) -> list[tuple[int, int, Hashable]]:
        """Audit rows (iteration, task_id, sample_id)."""
        return [(iteration, task_id, sample_id) for task_id, sample_id in self.entries]


@dataclass(frozen=True)
class SplitResult:
    """Disjoint train / reference partition, one pair per task."""

    train: tuple[TaskDataset, ...]
    reference: tuple[TaskDataset, ...]


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Apportion ``total`` slots to weights, ties broken by lower index."""
    target = total * weights
    counts = np.floor(target).astype(np.int64)
    leftover = total - int(counts.sum())
    if leftover > 0:
        remainders = target - counts
        order = np.lexsort((np.arange(weights.size), -remainders))
        counts[order[:leftover]] += 1
    return counts


def _sample_without_replacement(rng: CounterRng, n: int, m: int) -> list[int]:
    """First m slots of a partial Fisher-Yates shuffle of range(n)."""
    idx = list(range(n))
    for j in range(m):
        swap = j + rng.below(n - j)
        idx[j], idx[swap] = idx[swap], idx[j]
    return idx[:m]


def compose_batch(
    datasets: Sequence[TaskDataset],
    lam: MixtureProportions,
    batch_size: int,
    seed: int,
    mode: str = "multinomial",
) -> BatchPlan:
    """Draw one training batch from the mixture distribution.

    multinomial: each slot draws its task i.i.d. from lam, then a sample
    uniformly with replacement within that task.  quota: task counts are the
    largest-remainder apportionment of batch_size * lam (ties to the lower
    task index) and samples are drawn uniformly without replacement, falling
    back to replacement when a quota exceeds the task size.
    """
    if mode not in BATCH_MODES:
        raise ValueError(f"unknown batch mode {mode!r}, expected one of {BATCH_MODES}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if len(datasets) != lam.k:
        raise ValueError(f"{len(datasets)} datasets for a {lam.k}-task mixture")
    for ds in datasets:
        if len(ds) == 0 and lam.weights[datasets.index(ds)] > 0.0:
            raise ValueError(f"task {ds.task_id} has an empty dataset")

    rng = CounterRng(seed)
    entries: list[tuple[int, Hashable]] = []

    if mode == "multinomial":
        cumulative = np.cumsum(lam.weights)
        positive = np.flatnonzero(lam.weights > 0.0)
        fallback = int(positive[-1])
        for _ in range(batch_size):
            u = rng.uniform()
            t = int(np.searchsorted(cumulative, u, side="right"))
            if t >= lam.k:
                t = fallback
            ds = datasets[t]
            entries.append((ds.task_id, ds.samples[rng.below(len(ds))]))
    else:
        counts = _largest_remainder(lam.weights, batch_size)
        for t, ds in enumerate(datasets):
            c = int(counts[t])
            if c == 0:
                continue
            n = len(ds)
            if c <= n:
                picked = _sample_without_replacement(rng, n, c)
            else:
                picked = [rng.below(n) for _ in range(c)]
            entries.extend((ds.task_id, ds.samples[j]) for j in picked)

    return BatchPlan(tuple(entries), batch_size)


def split_reference(
    datasets: Sequence[TaskDataset], m: int = 10, seed: int = 0
) -> SplitResult:
    """Carve m held-out samples per task, disjoint from the training split.

    The reference subset is drawn uniformly without replacement; the train
    split is the dataset minus the reference, in original order.
    """
    if m < 1:
        raise ValueError(f"reference size must be >= 1, got {m}")
    for ds in datasets:
        if len(ds) <= m:
            raise ValueError(
                f"task {ds.task_id} has {len(ds)} samples; "
                f"need more than {m} to extract the reference set"
            )
    train: list[TaskDataset] = []
    reference: list[TaskDataset] = []
    for position, ds in enumerate(datasets):
        rng = CounterRng(derive_seed(seed, _SPLIT_STREAM, position))
        picked = set(_sample_without_replacement(rng, len(ds), m))
        ref_ids = tuple(s for j, s in enumerate(ds.samples) if j in picked)
        train_ids = tuple(s for j, s in enumerate(ds.samples) if j not in picked)
        reference.append(TaskDataset(ds.task_id, ref_ids))
        train.append(TaskDataset(ds.task_id, train_ids))
    return SplitResult(tuple(train), tuple(reference))
