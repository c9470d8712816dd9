"""Synthetic per-sequence accuracies from a closed-form continual-learning error model.

Each task gets an "optimal weight" vector equal to ``alpha`` times the sum of its
class embeddings.  The expected generalization error of training on the tasks
in order follows the overparameterized linear-regression formula

    E = r^T/T * sum_{i<T} |w_i|^2
        + (1-r)/T * sum_i r^(T-i) sum_k |w_k - w_i|^2
        + p sigma^2 / (p - n - 1) * (1 - r^T),      r = 1 - n/p,

and accuracy is the bounded decreasing map ``1 - E / (E + c)`` plus optional
seeded Gaussian noise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TaskPartition, TaskSequence
from .enumeration import DEFAULT_CAP, sequence_array
from .simio import AccuracyRecordSet, EmbeddingSet


@dataclass(frozen=True)
class SurrogateParams:
    p: int = 10
    n: int = 4
    sigma: float = 0.5
    alpha: float | None = None  # None -> 1/M
    noise_std: float = 0.01
    link_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise ValueError("p and n must be positive integers")
        if self.p < self.n + 2:
            raise ValueError(f"need p >= n + 2, got p={self.p}, n={self.n}")
        if self.sigma < 0 or self.noise_std < 0:
            raise ValueError("sigma and noise_std must be non-negative")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.link_scale > 0:
            raise ValueError("link_scale must be positive")

    @property
    def r(self) -> float:
        return 1.0 - self.n / self.p

    def alpha_for(self, task_size: int) -> float:
        return self.alpha if self.alpha is not None else 1.0 / task_size


def task_weights(partition: TaskPartition | TaskSequence, emb: EmbeddingSet, alpha: float) -> np.ndarray:
    """``(K, d)`` array; row ``i`` is ``alpha`` times the summed embeddings of task ``i``."""
    if partition.n_classes != emb.n_classes:
        raise ValueError(f"partition has N={partition.n_classes}, embeddings N={emb.n_classes}")
    idx = np.array(partition.tasks)
    return alpha * emb.vectors[idx].sum(axis=1)


def _batch_error(w: np.ndarray, params: SurrogateParams) -> np.ndarray:
    """Errors for a ``(S, T, d)`` stack of weight sequences; rows are in training order."""
    t = w.shape[1]
    r = params.r
    sq = np.einsum("std,std->st", w, w)
    first = r**t / t * sq[:, : t - 1].sum(axis=1)
    diff = ((w[:, :, None, :] - w[:, None, :, :]) ** 2).sum(axis=3)  # diff[s, i, k] = |w_k - w_i|^2
    decay = r ** (t - np.arange(1, t + 1))
    # elementwise product rather than matmul keeps results identical across batch sizes
    second = (1 - r) / t * (diff.sum(axis=2) * decay).sum(axis=1)
    third = params.p * params.sigma**2 / (params.p - params.n - 1) * (1 - r**t)
    return first + second + third


def expected_generalization_error(weights: np.ndarray, params: SurrogateParams) -> float:
    """Error for weights given in training order (row ``i`` = ``i``-th task trained)."""
    w = np.asarray(weights, dtype=float)
    return float(_batch_error(w[None], params)[0])


def sequence_error(seq: TaskSequence, emb: EmbeddingSet, params: SurrogateParams) -> float:
    w = task_weights(seq, emb, params.alpha_for(seq.task_size))
    return expected_generalization_error(w, params)


def error_to_accuracy(err, scale: float = 1.0):
    err = np.asarray(err, dtype=float)
    return np.clip(1.0 - err / (err + scale), 0.0, 1.0)


def _noise(seq_flat, params: SurrogateParams) -> float:
    if params.noise_std == 0:
        return 0.0
    rng = np.random.default_rng([params.seed, *map(int, seq_flat)])
    return float(rng.normal(0.0, params.noise_std))


def synthetic_accuracy(seq: TaskSequence, emb: EmbeddingSet, params: SurrogateParams) -> float:
    """Deterministic given ``params.seed`` and the canonical sequence."""
    acc = float(error_to_accuracy(sequence_error(seq, emb, params), params.link_scale))
    return float(np.clip(acc + _noise(seq.flat(), params), 0.0, 1.0))


def landscape_errors(emb: EmbeddingSet, n_tasks: int, params: SurrogateParams,
                     cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Enumerated sequences ``(S, K, M)`` and their noise-free expected errors."""
    seqs = sequence_array(emb.n_classes, n_tasks, cap)
    alpha = params.alpha_for(seqs.shape[2])
    w = alpha * emb.vectors[seqs].sum(axis=2)  # (S, K, d)
    return seqs, _batch_error(w, params)


def landscape(emb: EmbeddingSet, n_tasks: int, params: SurrogateParams,
              cap: int = DEFAULT_CAP) -> AccuracyRecordSet:
    """One synthetic accuracy per enumerated sequence."""
    seqs, err = landscape_errors(emb, n_tasks, params, cap)
    acc = error_to_accuracy(err, params.link_scale)
    records = []
    for row, a in zip(seqs, acc):
        flat = row.ravel()
        a = float(np.clip(a + _noise(flat, params), 0.0, 1.0))
        records.append((TaskSequence(tuple(map(tuple, row)), "enumerated"), a))
    return AccuracyRecordSet(tuple(records))
