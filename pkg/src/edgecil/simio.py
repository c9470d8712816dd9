"""Reading, validating and writing embeddings, similarity tables and accuracy records.

File formats (all comma-separated, parsed with :mod:`csv`):

* embeddings: one class per line, ``label,x1,x2,...,xd``
* similarity: square table; the first row holds the column labels (first cell
  ignored), every following row is ``label,s1,...,sN``
* accuracies: header ``sequence,accuracy`` then one row per sequence, the
  sequence written as ``0 1|2 3|4 5`` and the accuracy as a fraction in [0, 1]
"""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import PartitionError, TaskSequence, format_sequence, parse_sequence

SYM_TOL = 1e-9
RANGE_TOL = 1e-9


class FormatError(ValueError):
    """Malformed input file; carries the 1-based line and column of the first problem."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    labels: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] < 1:
            raise ValueError("vectors must form an N x d array with d >= 1")
        if len(self.labels) != vectors.shape[0]:
            raise ValueError(f"{len(self.labels)} labels for {vectors.shape[0]} vectors")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors must be finite")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms <= 0):
            raise ValueError(f"zero-norm vector for class {self.labels[int(np.argmin(norms))]!r}")
        vectors.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "vectors", vectors)

    @property
    def n_classes(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    labels: tuple[str, ...]
    entries: np.ndarray
    diag_zeroed: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"similarity matrix must be square, got shape {entries.shape}")
        n = entries.shape[0]
        if n < 2:
            raise ValueError("need at least 2 classes")
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for a {n}x{n} matrix")
        if not np.all(np.isfinite(entries)):
            raise ValueError("similarity entries must be finite")
        asym = np.abs(entries - entries.T).max()
        if asym > SYM_TOL:
            raise ValueError(f"matrix is not symmetric (max |s_ij - s_ji| = {asym:.3g})")
        if np.abs(entries).max() > 1 + RANGE_TOL:
            raise ValueError("similarity entries must lie in [-1, 1]")
        entries.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "entries", entries)

    @property
    def n_classes(self) -> int:
        return self.entries.shape[0]

    def zero_diagonal(self) -> "SimilarityMatrix":
        g = self.entries.copy()
        np.fill_diagonal(g, 0.0)
        return SimilarityMatrix(self.labels, g, diag_zeroed=True)

    @classmethod
    def from_array(cls, entries, labels: Sequence[str] | None = None) -> "SimilarityMatrix":
        entries = np.asarray(entries, dtype=float)
        if labels is None:
            labels = [f"c{i}" for i in range(entries.shape[0])]
        return cls(tuple(labels), entries)


@dataclass(frozen=True)
class AccuracyRecordSet:
    records: tuple[tuple[TaskSequence, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        records = tuple((seq, float(acc)) for seq, acc in self.records)
        shapes = {seq.shape for seq, _ in records}
        if len(shapes) > 1:
            raise ValueError(f"sequences have inconsistent (N, K): {sorted(shapes)}")
        for seq, acc in records:
            if not 0.0 <= acc <= 1.0 or math.isnan(acc):
                raise ValueError(f"accuracy {acc} for {format_sequence(seq)} outside [0, 1]")
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    @property
    def shape(self) -> tuple[int, int] | None:
        return self.records[0][0].shape if self.records else None

    def accuracies(self) -> np.ndarray:
        return np.array([acc for _, acc in self.records])

    def lookup(self) -> dict[TaskSequence, float]:
        return {seq: acc for seq, acc in self.records}


# --- construction -----------------------------------------------------------------


def cosine_similarity(emb: EmbeddingSet) -> SimilarityMatrix:
    unit = emb.vectors / np.linalg.norm(emb.vectors, axis=1, keepdims=True)
    sim = unit @ unit.T
    sim = 0.5 * (sim + sim.T)
    np.fill_diagonal(sim, 1.0)
    # rounding can push |cos| a hair past 1
    np.clip(sim, -1.0, 1.0, out=sim)
    return SimilarityMatrix(emb.labels, sim)


# --- readers ----------------------------------------------------------------------


def _rows(path) -> list[tuple[int, list[str]]]:
    text = Path(path).read_text(encoding="utf-8")
    out = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        out.append((lineno, [cell.strip() for cell in row]))
    return out


def _float(cell: str, line: int, column: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"cannot parse {cell!r} as a number", line, column) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value {cell!r}", line, column)
    return value


def load_embeddings(path) -> EmbeddingSet:
    rows = _rows(path)
    if not rows:
        raise FormatError("no embedding records found")
    labels, vectors, seen = [], [], {}
    dim = None
    for line, row in rows:
        label = row[0]
        if not label:
            raise FormatError("empty label", line, 1)
        if label in seen:
            raise FormatError(f"duplicate label {label!r} (first seen on line {seen[label]})", line, 1)
        if len(row) < 2:
            raise FormatError("record has no vector components", line, 2)
        vec = [_float(cell, line, col) for col, cell in enumerate(row[1:], start=2)]
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise FormatError(f"dimension mismatch: expected {dim} components, got {len(vec)}", line, 2)
        if not any(vec):
            raise FormatError(f"zero-norm vector for {label!r}", line, 2)
        seen[label] = line
        labels.append(label)
        vectors.append(vec)
    return EmbeddingSet(tuple(labels), np.array(vectors))


def load_similarity(path) -> SimilarityMatrix:
    rows = _rows(path)
    if not rows:
        raise FormatError("empty similarity file")
    header_line, header = rows[0]
    labels = header[1:]
    n = len(labels)
    if n < 2:
        raise FormatError("header must list at least two labels", header_line)
    body = rows[1:]
    if len(body) != n:
        raise FormatError(f"non-square table: {n} columns but {len(body)} rows",
                          body[-1][0] if body else header_line)
    entries = np.empty((n, n))
    for i, (line, row) in enumerate(body):
        if len(row) != n + 1:
            raise FormatError(f"non-square table: expected {n} values, got {len(row) - 1}", line, len(row))
        if row[0] != labels[i]:
            raise FormatError(f"row label {row[0]!r} does not match column label {labels[i]!r}", line, 1)
        for j, cell in enumerate(row[1:]):
            value = _float(cell, line, j + 2)
            if abs(value) > 1 + RANGE_TOL:
                raise FormatError(f"entry {value} outside [-1, 1]", line, j + 2)
            entries[i, j] = value
    asym = np.abs(entries - entries.T)
    if asym.max() > SYM_TOL:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise FormatError(f"asymmetric entry: s[{i},{j}]={entries[i, j]} vs s[{j},{i}]={entries[j, i]}",
                          body[i][0], j + 2)
    if len(set(labels)) != n:
        raise FormatError("duplicate labels in header", header_line)
    return SimilarityMatrix(tuple(labels), entries)


def load_accuracies(path) -> AccuracyRecordSet:
    rows = _rows(path)
    if not rows:
        raise FormatError("empty accuracy file")
    line, header = rows[0]
    if [h.lower() for h in header] != ["sequence", "accuracy"]:
        raise FormatError("header must be 'sequence,accuracy'", line, 1)
    records = []
    shape = None
    for line, row in rows[1:]:
        if len(row) != 2:
            raise FormatError(f"expected 2 fields, got {len(row)}", line, min(len(row), 3))
        try:
            seq = parse_sequence(row[0])
        except PartitionError as exc:
            raise FormatError(f"malformed sequence: {exc}", line, 1) from None
        acc = _float(row[1], line, 2)
        if not 0.0 <= acc <= 1.0:
            raise FormatError(f"accuracy {acc} outside [0, 1]", line, 2)
        if shape is None:
            shape = seq.shape
        elif seq.shape != shape:
            raise FormatError(f"sequence shape (N, K)={seq.shape} differs from {shape}", line, 1)
        records.append((seq, acc))
    return AccuracyRecordSet(tuple(records))


# --- writers ----------------------------------------------------------------------


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def save_embeddings(emb: EmbeddingSet, path) -> None:
    atomic_write(path, _csv_text([label, *map(repr, map(float, vec))]
                                 for label, vec in zip(emb.labels, emb.vectors)))


def save_similarity(sim: SimilarityMatrix, path) -> None:
    rows = [["", *sim.labels]]
    rows += [[label, *map(repr, map(float, row))] for label, row in zip(sim.labels, sim.entries)]
    atomic_write(path, _csv_text(rows))


def save_accuracies(acc: AccuracyRecordSet, path) -> None:
    rows = [["sequence", "accuracy"]]
    rows += [[format_sequence(seq), repr(float(a))] for seq, a in acc.records]
    atomic_write(path, _csv_text(rows))
