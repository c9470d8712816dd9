"""Inter-task similarity scoring and hard / easy / median sequence generation."""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import agglomerate, balance, cut
from .core import PartitionError, TaskPartition, TaskSequence, check_divisible
from .simio import SimilarityMatrix


@dataclass(frozen=True)
class GenerationConfig:
    """Knobs for extreme-sequence search.

    ``granularities=None`` means ``K, K+1, ..., min(3K, N)``.  With
    ``multi_start`` the greedy ordering is also run from every possible first
    task (not only the row-sum extremum) and the best-scoring order is kept.
    """

    granularities: tuple[int, ...] | None = None
    seed: int = 0
    multi_start: bool = True
    workers: int = 1

    def resolve(self, n_classes: int, n_tasks: int) -> tuple[int, ...]:
        if self.granularities is None:
            return tuple(range(n_tasks, min(3 * n_tasks, n_classes) + 1))
        gs = tuple(sorted(set(int(g) for g in self.granularities)))
        if not gs:
            raise ValueError("granularity set is empty")
        bad = [g for g in gs if not n_tasks <= g <= n_classes]
        if bad:
            raise ValueError(f"granularities {bad} outside [K={n_tasks}, N={n_classes}]")
        return gs


@dataclass(frozen=True)
class Candidate:
    sequence: TaskSequence
    score: float
    granularity: int
    start: int | None = None


def _entries(sim) -> np.ndarray:
    return np.asarray(getattr(sim, "entries", sim), dtype=float)


def similarity_score(seq: TaskSequence, sim) -> float:
    """Normalized sum of similarities between consecutive tasks.

    ``S = K / ((K - 1) N) * sum_i sum_{c in T_i, c' in T_{i+1}} sim[c, c']``
    """
    g = _entries(sim)
    n, k = seq.shape
    if g.shape != (n, n):
        raise ValueError(f"sequence has N={n} but similarity matrix is {g.shape[0]}x{g.shape[1]}")
    if k < 2:
        raise ValueError("similarity score is undefined for a single task (K=1)")
    total = 0.0
    for a, b in zip(seq.tasks, seq.tasks[1:]):
        total += g[np.ix_(a, b)].sum()
    return float(k / ((k - 1) * n) * total)


def its_matrix(partition: TaskPartition, sim) -> np.ndarray:
    """K x K matrix of mean cross-task class similarity (diagonal left at 0)."""
    g = _entries(sim)
    idx = np.array(partition.tasks)
    # block sums: (K, M, K, M) -> (K, K)
    blocks = g[idx[:, :, None, None], idx[None, None, :, :]].sum(axis=(1, 3))
    its = blocks / (partition.task_size ** 2)
    np.fill_diagonal(its, 0.0)
    return its


def greedy_order(its, mode: str = "min", start: int | None = None) -> list[int]:
    """Greedy task ordering on an ITS matrix.

    The first task extremizes its row sum (unless ``start`` is given); every
    later task extremizes the sum of its ITS entries to all tasks already
    placed.  Ties go to the lowest id.
    """
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    its = np.array(its, dtype=float)
    k = its.shape[0]
    np.fill_diagonal(its, 0.0)
    sign = 1.0 if mode == "min" else -1.0
    if start is None:
        start = int(np.argmin(sign * its.sum(axis=1)))
    elif not 0 <= start < k:
        raise ValueError(f"start task {start} out of range for K={k}")
    order = [int(start)]
    remaining = [t for t in range(k) if t != order[0]]
    acc = its[order[0]].copy()
    while remaining:
        vals = sign * acc[remaining]
        nxt = remaining[int(np.argmin(vals))]
        order.append(nxt)
        remaining.remove(nxt)
        acc += its[nxt]
    return order


def _candidate(dendro, g, sim_mat, k, n, mode, multi_start) -> Candidate:
    partition = balance(cut(dendro, g), k, n)
    its = its_matrix(partition, sim_mat)
    provenance = "hard" if mode == "min" else "easy"
    order = greedy_order(its, mode)
    seq = partition.ordered(order, provenance)
    best = Candidate(seq, similarity_score(seq, sim_mat), g, order[0])
    if not multi_start:
        return best
    for start in range(k):
        if start == best.start:
            continue
        seq = partition.ordered(greedy_order(its, mode, start), provenance)
        score = similarity_score(seq, sim_mat)
        if (score < best.score) if mode == "min" else (score > best.score):
            best = Candidate(seq, score, g, start)
    return best


def extreme_candidates(sim: SimilarityMatrix, n_tasks: int, cfg: GenerationConfig | None = None,
                       mode: str = "min") -> list[Candidate]:
    """One greedy candidate per granularity, in ascending granularity order."""
    cfg = cfg or GenerationConfig()
    n = sim.n_classes
    check_divisible(n, n_tasks)
    if n_tasks < 2:
        raise PartitionError("extreme sequences need K >= 2")
    grans = cfg.resolve(n, n_tasks)
    g_mat = sim.zero_diagonal().entries
    if mode == "min":
        dist = 1.0 - g_mat
        np.fill_diagonal(dist, 0.0)
    elif mode == "max":
        # similarity used directly as the distance, so similar classes end up apart
        dist = g_mat
    else:
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    dendro = agglomerate(dist)

    def build(g):
        return _candidate(dendro, g, g_mat, n_tasks, n, mode, cfg.multi_start)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(build, grans))
    return [build(g) for g in grans]


def select_extreme(sim: SimilarityMatrix, n_tasks: int, cfg: GenerationConfig | None = None,
                   mode: str = "min") -> Candidate:
    cands = extreme_candidates(sim, n_tasks, cfg, mode)
    scores = np.array([c.score for c in cands])
    best = int(np.argmin(scores)) if mode == "min" else int(np.argmax(scores))
    return cands[best]


def generate_hard(sim: SimilarityMatrix, n_tasks: int, cfg: GenerationConfig | None = None) -> TaskSequence:
    return select_extreme(sim, n_tasks, cfg, "min").sequence


def generate_easy(sim: SimilarityMatrix, n_tasks: int, cfg: GenerationConfig | None = None) -> TaskSequence:
    return select_extreme(sim, n_tasks, cfg, "max").sequence


def generate_median(n_classes: int, n_tasks: int, seed: int = 0,
                    provenance: str = "median") -> TaskSequence:
    """Uniform draw from the sequence space: seeded shuffle, then chunk into K tasks."""
    m = check_divisible(n_classes, n_tasks)
    perm = np.random.default_rng(seed).permutation(n_classes)
    return TaskSequence(tuple(tuple(perm[i * m:(i + 1) * m]) for i in range(n_tasks)), provenance)


@dataclass(frozen=True)
class Triplet:
    hard: Candidate
    easy: Candidate
    median: TaskSequence
    median_score: float
    swapped: bool = False

    @property
    def sequences(self) -> tuple[TaskSequence, TaskSequence, TaskSequence]:
        return self.hard.sequence, self.easy.sequence, self.median


def generate_triplet(sim: SimilarityMatrix, n_tasks: int, cfg: GenerationConfig | None = None) -> Triplet:
    """Hard, easy and median sequences for one protocol run.

    If the greedy search ever returns a "hard" sequence scoring above the
    "easy" one, the two are swapped and a warning is emitted.
    """
    cfg = cfg or GenerationConfig()
    hard = select_extreme(sim, n_tasks, cfg, "min")
    easy = select_extreme(sim, n_tasks, cfg, "max")
    swapped = bool(hard.score > easy.score)
    if swapped:
        warnings.warn(f"hard score {hard.score:.6g} exceeds easy score {easy.score:.6g}; swapping",
                      RuntimeWarning, stacklevel=2)
        hard, easy = (Candidate(easy.sequence.with_provenance("hard"), easy.score, easy.granularity, easy.start),
                      Candidate(hard.sequence.with_provenance("easy"), hard.score, hard.granularity, hard.start))
    median = generate_median(sim.n_classes, n_tasks, cfg.seed)
    return Triplet(hard, easy, median, similarity_score(median, sim.zero_diagonal()), swapped)


def sequence_scores(sequences: Sequence[TaskSequence], sim) -> np.ndarray:
    return np.array([similarity_score(s, sim) for s in sequences])
