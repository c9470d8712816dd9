"""Complete-linkage agglomerative clustering and balancing of clusters into tasks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PartitionError, TaskPartition, check_divisible


@dataclass(frozen=True)
class Dendrogram:
    """Merge history. Leaves are ``0..N-1``; the cluster made at step ``s`` gets id ``N + s``."""

    merges: tuple[tuple[int, int, float], ...]
    n_leaves: int

    def __post_init__(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError(f"{self.n_leaves} leaves need {self.n_leaves - 1} merges, got {len(self.merges)}")

    @property
    def heights(self) -> np.ndarray:
        return np.array([h for _, _, h in self.merges])


@dataclass(frozen=True)
class ClusterAssignment:
    cluster_of: tuple[int, ...]

    def __post_init__(self):
        ids = set(self.cluster_of)
        if ids != set(range(len(ids))):
            raise ValueError("cluster ids must form the contiguous range 0..g-1")

    @property
    def n_clusters(self) -> int:
        return max(self.cluster_of) + 1 if self.cluster_of else 0

    def members(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_clusters)]
        for cls, cid in enumerate(self.cluster_of):
            out[cid].append(cls)
        return out


def agglomerate(dissimilarity, linkage: str = "complete") -> Dendrogram:
    """Complete-linkage agglomeration of a symmetric dissimilarity table.

    Equal-distance candidates are resolved by merging the pair whose
    ``(min id, max id)`` is lexicographically smallest.
    """
    if linkage != "complete":
        raise ValueError(f"unsupported linkage {linkage!r}; only 'complete' is implemented")
    d = np.array(getattr(dissimilarity, "entries", dissimilarity), dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"dissimilarity must be square, got shape {d.shape}")
    n = d.shape[0]
    if n < 2:
        raise ValueError("agglomeration needs at least 2 items")
    if not np.all(np.isfinite(d)):
        raise ValueError("dissimilarity entries must be finite")
    if np.abs(d - d.T).max() > 1e-9:
        raise ValueError("dissimilarity must be symmetric")

    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, np.inf)
    ids = np.arange(n)
    merges = []
    for step in range(n - 1):
        best = d.min()
        ii, jj = np.nonzero(d == best)
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
        lo = np.minimum(ids[ii], ids[jj])
        hi = np.maximum(ids[ii], ids[jj])
        pick = np.lexsort((hi, lo))[0]
        i, j = int(ii[pick]), int(jj[pick])
        merges.append((int(lo[pick]), int(hi[pick]), float(best)))
        # complete linkage: new distance is the max over both members
        merged = np.maximum(d[i], d[j])
        d[i, :] = merged
        d[:, i] = merged
        d[i, i] = np.inf
        d[j, :] = np.inf
        d[:, j] = np.inf
        ids[i] = n + step
    return Dendrogram(tuple(merges), n)


def cut(dendrogram: Dendrogram, g: int) -> ClusterAssignment:
    """Undo the last ``g - 1`` merges.  Clusters are numbered by their smallest member."""
    n = dendrogram.n_leaves
    if not 1 <= g <= n:
        raise ValueError(f"g must lie in [1, {n}], got {g}")
    members = {i: [i] for i in range(n)}
    for step, (a, b, _) in enumerate(dendrogram.merges[: n - g]):
        members[n + step] = members.pop(a) + members.pop(b)
    groups = sorted((sorted(m) for m in members.values()), key=lambda m: m[0])
    cluster_of = [0] * n
    for cid, group in enumerate(groups):
        for cls in group:
            cluster_of[cls] = cid
    return ClusterAssignment(tuple(cluster_of))


def balance(assignment: ClusterAssignment, n_tasks: int, n_classes: int) -> TaskPartition:
    """Pack clusters into ``K`` tasks of exactly ``M = N / K`` classes.

    Clusters are visited largest first.  A cluster bigger than ``M`` keeps its
    first ``M`` classes (ascending index) in the currently smallest task; its
    overflow is held back and dealt out one class at a time, once every cluster
    has been placed, to whichever task is smallest at that moment.  Clusters of
    size ``<= M`` go whole to the currently smallest task.  A final pass moves
    the most recently added classes out of oversized tasks into undersized ones.
    Ties on "smallest task" go to the lowest task index.
    """
    if not assignment.cluster_of:
        raise ValueError("empty cluster assignment")
    if len(assignment.cluster_of) != n_classes:
        raise ValueError(f"assignment covers {len(assignment.cluster_of)} classes, expected {n_classes}")
    m = check_divisible(n_classes, n_tasks)

    clusters = assignment.members()
    order = sorted(range(len(clusters)), key=lambda c: (-len(clusters[c]), c))
    tasks: list[list[int]] = [[] for _ in range(n_tasks)]

    def smallest() -> int:
        return min(range(n_tasks), key=lambda t: (len(tasks[t]), t))

    overflow: list[int] = []
    for cid in order:
        group = sorted(clusters[cid])
        if len(group) > m:
            tasks[smallest()].extend(group[:m])
            overflow.extend(group[m:])
        else:
            tasks[smallest()].extend(group)
    for cls in overflow:
        tasks[smallest()].append(cls)

    for t in range(n_tasks):
        while len(tasks[t]) > m:
            target = smallest()
            if len(tasks[target]) >= m:
                raise PartitionError("balancing failed to equalize task sizes")
            tasks[target].append(tasks[t].pop())
    return TaskPartition(tuple(tuple(task) for task in tasks))
