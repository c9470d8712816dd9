"""Task partitions and ordered task sequences.

A sequence is an ordered partition of ``N`` class indices into ``K`` tasks of
equal size ``M = N / K``.  The canonical form sorts classes inside every task,
so two sequences that only differ by within-task order compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

PROVENANCES = ("hard", "easy", "median", "enumerated", "external")


class PartitionError(ValueError):
    """Raised when a set of tasks is not a valid equal-size partition."""


def check_divisible(n_classes: int, n_tasks: int) -> int:
    """Return the task size ``M = N / K`` or raise if ``K`` does not divide ``N``."""
    if n_tasks < 1 or n_classes < 1:
        raise PartitionError(f"need N >= 1 and K >= 1, got N={n_classes}, K={n_tasks}")
    if n_classes % n_tasks:
        raise PartitionError(f"K={n_tasks} does not divide N={n_classes}")
    return n_classes // n_tasks


def _canonical_tasks(tasks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    out = tuple(tuple(sorted(int(c) for c in t)) for t in tasks)
    if not out:
        raise PartitionError("a partition needs at least one task")
    sizes = {len(t) for t in out}
    if len(sizes) != 1 or 0 in sizes:
        raise PartitionError(f"tasks must be non-empty and of equal size, got sizes {[len(t) for t in out]}")
    flat = [c for t in out for c in t]
    if sorted(flat) != list(range(len(flat))):
        raise PartitionError("tasks must be disjoint and cover classes 0..N-1")
    return out


@dataclass(frozen=True)
class TaskPartition:
    """K disjoint, equal-size tasks covering classes ``0..N-1`` (canonical form)."""

    tasks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", _canonical_tasks(self.tasks))

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_classes(self) -> int:
        return sum(len(t) for t in self.tasks)

    @property
    def task_size(self) -> int:
        return len(self.tasks[0])

    def ordered(self, order: Sequence[int], provenance: str = "external") -> "TaskSequence":
        if sorted(order) != list(range(self.n_tasks)):
            raise PartitionError(f"order {list(order)} is not a permutation of 0..{self.n_tasks - 1}")
        return TaskSequence(tuple(self.tasks[i] for i in order), provenance)


@dataclass(frozen=True)
class TaskSequence:
    """An ordered partition; equality and hashing ignore provenance."""

    tasks: tuple[tuple[int, ...], ...]
    provenance: str = "external"

    def __post_init__(self):
        object.__setattr__(self, "tasks", _canonical_tasks(self.tasks))
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __eq__(self, other):
        if not isinstance(other, TaskSequence):
            return NotImplemented
        return self.tasks == other.tasks

    def __hash__(self):
        return hash(self.tasks)

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_classes(self) -> int:
        return sum(len(t) for t in self.tasks)

    @property
    def task_size(self) -> int:
        return len(self.tasks[0])

    @property
    def shape(self) -> tuple[int, int]:
        """``(N, K)``."""
        return self.n_classes, self.n_tasks

    def partition(self) -> TaskPartition:
        return TaskPartition(self.tasks)

    def reversed(self) -> "TaskSequence":
        return TaskSequence(self.tasks[::-1], self.provenance)

    def with_provenance(self, provenance: str) -> "TaskSequence":
        return TaskSequence(self.tasks, provenance)

    def to_list(self) -> list[list[int]]:
        return [list(t) for t in self.tasks]

    def flat(self) -> tuple[int, ...]:
        return tuple(c for t in self.tasks for c in t)

    def __str__(self) -> str:
        return format_sequence(self)


def format_sequence(seq: TaskSequence) -> str:
    """Compact text form: classes separated by spaces, tasks by ``|``."""
    return "|".join(" ".join(str(c) for c in t) for t in seq.tasks)


def parse_sequence(text: str, provenance: str = "external") -> TaskSequence:
    """Inverse of :func:`format_sequence`; also re-canonicalizes within tasks."""
    tasks = []
    for chunk in text.split("|"):
        fields = chunk.split()
        if not fields:
            raise PartitionError(f"empty task in sequence {text!r}")
        try:
            tasks.append([int(f) for f in fields])
        except ValueError as exc:
            raise PartitionError(f"non-integer class index in sequence {text!r}") from exc
    return TaskSequence(tuple(tuple(t) for t in tasks), provenance)
