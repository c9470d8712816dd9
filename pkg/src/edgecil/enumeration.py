"""Exact counting and enumeration of the sequence space at desk scale."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import TaskSequence, check_divisible, format_sequence
from .simio import AccuracyRecordSet

DEFAULT_CAP = 10**6


class CapExceeded(RuntimeError):
    """The sequence space is too large to enumerate under the configured cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"|Omega| = {size} exceeds the enumeration cap {cap}")


class CoverageError(ValueError):
    pass


def count_sequences(n_classes: int, n_tasks: int) -> int:
    """``N! / (M!)^K`` as an exact integer."""
    m = check_divisible(n_classes, n_tasks)
    return math.factorial(n_classes) // math.factorial(m) ** n_tasks


def _check_cap(n_classes: int, n_tasks: int, cap: int) -> int:
    size = count_sequences(n_classes, n_tasks)
    if size > cap:
        raise CapExceeded(size, cap)
    return size


def _ordered_partitions(items: tuple[int, ...], m: int):
    if not items:
        yield ()
        return
    for first in itertools.combinations(items, m):
        chosen = set(first)
        rest = tuple(c for c in items if c not in chosen)
        for tail in _ordered_partitions(rest, m):
            yield (first,) + tail


def iterate_sequences(n_classes: int, n_tasks: int, cap: int = DEFAULT_CAP) -> Iterator[TaskSequence]:
    """Every canonical sequence exactly once, in lexicographic order."""
    _check_cap(n_classes, n_tasks, cap)
    m = n_classes // n_tasks
    for tasks in _ordered_partitions(tuple(range(n_classes)), m):
        yield TaskSequence(tasks, "enumerated")


def sequence_array(n_classes: int, n_tasks: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All sequences as an integer array of shape ``(|Omega|, K, M)``, same order as the stream."""
    size = _check_cap(n_classes, n_tasks, cap)
    m = n_classes // n_tasks
    out = np.empty((size, n_tasks, m), dtype=np.int64)
    for i, tasks in enumerate(_ordered_partitions(tuple(range(n_classes)), m)):
        out[i] = tasks
    return out


def score_array(seqs: np.ndarray, sim) -> np.ndarray:
    """Vectorized similarity score for every row of a ``(S, K, M)`` sequence array."""
    g = np.asarray(getattr(sim, "entries", sim), dtype=float)
    _, k, m = seqs.shape
    n = k * m
    total = np.zeros(seqs.shape[0])
    for i in range(k - 1):
        a = seqs[:, i, :]
        b = seqs[:, i + 1, :]
        total += g[a[:, :, None], b[:, None, :]].sum(axis=(1, 2))
    return k / ((k - 1) * n) * total


@dataclass(frozen=True)
class Extremes:
    min_sequence: TaskSequence
    max_sequence: TaskSequence
    scores: np.ndarray

    @property
    def min_score(self) -> float:
        return float(self.scores.min())

    @property
    def max_score(self) -> float:
        return float(self.scores.max())


def extremes_by_score(sim, n_tasks: int, cap: int = DEFAULT_CAP) -> Extremes:
    """Exact argmin / argmax of the similarity score over the whole space (first hit wins ties)."""
    g = np.asarray(getattr(sim, "entries", sim), dtype=float)
    seqs = sequence_array(g.shape[0], n_tasks, cap)
    scores = score_array(seqs, g)
    lo, hi = int(np.argmin(scores)), int(np.argmax(scores))
    return Extremes(TaskSequence(tuple(map(tuple, seqs[lo])), "enumerated"),
                    TaskSequence(tuple(map(tuple, seqs[hi])), "enumerated"), scores)


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    samples: np.ndarray
    source: str = "truth"

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).ravel()
        if samples.size == 0:
            raise ValueError("an empirical distribution needs at least one sample")
        if np.any((samples < 0) | (samples > 1)) or np.any(np.isnan(samples)):
            raise ValueError("samples must be accuracy fractions in [0, 1]")
        if self.source not in ("truth", "rs", "edge", "surrogate"):
            raise ValueError(f"unknown source {self.source!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def summary(self) -> dict[str, float]:
        s = self.samples
        return {"count": int(s.size), "min": float(s.min()), "max": float(s.max()),
                "mean": float(s.mean()), "variance": float(s.var())}


def true_distribution(acc: AccuracyRecordSet, cap: int = DEFAULT_CAP) -> EmpiricalDistribution:
    """Ground-truth distribution from records covering every sequence exactly once."""
    if len(acc) == 0:
        raise CoverageError("no accuracy records")
    n, k = acc.shape
    seen: dict[TaskSequence, int] = {}
    for seq, _ in acc.records:
        if seq in seen:
            raise CoverageError(f"sequence {format_sequence(seq)} appears more than once")
        seen[seq] = 1
    for seq in iterate_sequences(n, k, cap):
        if seq not in seen:
            raise CoverageError(f"missing sequence {format_sequence(seq)} "
                                f"({len(acc)} of {count_sequences(n, k)} present)")
    return EmpiricalDistribution(acc.accuracies(), "truth")


def coverage_fraction(n_samples: int, n_classes: int, n_tasks: int) -> Fraction:
    """Exact ratio ``L / |Omega|``."""
    return Fraction(n_samples, count_sequences(n_classes, n_tasks))


def format_scientific(x: Fraction, digits: int = 4) -> str:
    """Render a (possibly astronomically small) rational in scientific notation."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    exp = len(str(x.numerator)) - len(str(x.denominator))
    if x < Fraction(10) ** exp:
        exp -= 1
    mant = x / Fraction(10) ** exp
    text = f"{float(mant):.{digits - 1}f}"
    if text.startswith("10"):
        exp += 1
        text = f"{float(mant / 10):.{digits - 1}f}"
    return f"{sign}{text}e{exp:+d}"
