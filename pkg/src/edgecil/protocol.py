"""End-to-end EDGE vs. random-sampling evaluation on one class set."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bounds
from .core import TaskSequence, format_sequence
from .enumeration import (DEFAULT_CAP, CoverageError, EmpiricalDistribution, count_sequences,
                          true_distribution)
from .seqgen import GenerationConfig, generate_median, generate_triplet, similarity_score
from .simio import AccuracyRecordSet, EmbeddingSet, SimilarityMatrix
from .stats import GaussianEstimate, comparison_grid, discretize, fit_gaussian, jsd, wasserstein1
from .surrogate import SurrogateParams, landscape, synthetic_accuracy

RS_SEEDS = (0, 42, 1993)


class MissingAccuracy(KeyError):
    pass


@dataclass(frozen=True)
class ProtocolConfig:
    n_tasks: int
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    rs_seeds: tuple[int, ...] = RS_SEEDS
    bins: int = 64
    cap: int = DEFAULT_CAP
    epsilon: float = 0.1
    delta: float = 0.05


@dataclass
class AccuracySource:
    """Looks up or synthesizes the accuracy of a sequence; may also hold the full landscape."""

    lookup: Callable[[TaskSequence], float]
    truth: AccuracyRecordSet | None = None
    kind: str = "file"

    @classmethod
    def from_records(cls, records: AccuracyRecordSet, cap: int = DEFAULT_CAP) -> "AccuracySource":
        table = records.lookup()

        def lookup(seq):
            try:
                return table[seq]
            except KeyError:
                raise MissingAccuracy(f"no accuracy recorded for sequence {format_sequence(seq)}") from None

        truth = None
        if records.shape is not None and count_sequences(*records.shape) <= cap:
            try:
                true_distribution(records, cap)
                truth = records
            except CoverageError:
                truth = None
        return cls(lookup, truth, "file")

    @classmethod
    def from_surrogate(cls, emb: EmbeddingSet, n_tasks: int, params: SurrogateParams,
                       cap: int = DEFAULT_CAP) -> "AccuracySource":
        if count_sequences(emb.n_classes, n_tasks) <= cap:
            src = cls.from_records(landscape(emb, n_tasks, params, cap), cap)
            src.kind = "surrogate"
            return src
        return cls(lambda seq: synthetic_accuracy(seq, emb, params), None, "surrogate")


def compare_estimate(truth: np.ndarray, estimate: GaussianEstimate | np.ndarray, bins: int = 64) -> dict:
    """JSD and W1 between an empirical truth set and an estimate on the shared default grid."""
    truth = np.asarray(truth, dtype=float)
    if isinstance(estimate, GaussianEstimate):
        edges = comparison_grid(truth, [estimate], bins)
    else:
        estimate = np.asarray(estimate, dtype=float)
        edges = comparison_grid(np.concatenate([truth, estimate]), [], bins)
    p, q = discretize(truth, edges), discretize(estimate, edges)
    return {"jsd": jsd(p, q), "w1": wasserstein1(p, q)}


def _gaussian_dict(g: GaussianEstimate) -> dict:
    return {"mean": g.mean, "variance": g.variance, "std": g.std, "sample_count": g.sample_count}


def _seq_entry(role, seq, sim, acc, labels, **extra) -> dict:
    return {"role": role, "sequence": format_sequence(seq), "tasks": seq.to_list(),
            "labels": [[labels[c] for c in t] for t in seq.tasks],
            "score": similarity_score(seq, sim), "accuracy": acc, **extra}


def run_protocol(sim: SimilarityMatrix, source: AccuracySource, cfg: ProtocolConfig) -> dict:
    """EDGE triplet + RS baseline, Gaussian fits, and truth comparison when the landscape is complete."""
    k = cfg.n_tasks
    n = sim.n_classes
    g_sim = sim.zero_diagonal()
    triplet = generate_triplet(sim, k, cfg.generation)
    roles = (("hard", triplet.hard.sequence, {"granularity": triplet.hard.granularity}),
             ("easy", triplet.easy.sequence, {"granularity": triplet.easy.granularity}),
             ("median", triplet.median, {"seed": cfg.generation.seed}))
    edge_entries = [_seq_entry(r, s, g_sim, source.lookup(s), sim.labels, **x) for r, s, x in roles]
    rs_entries = []
    for seed in cfg.rs_seeds:
        seq = generate_median(n, k, seed)
        rs_entries.append(_seq_entry("random", seq, g_sim, source.lookup(seq), sim.labels, seed=seed))

    edge_acc = np.array([e["accuracy"] for e in edge_entries])
    rs_acc = np.array([e["accuracy"] for e in rs_entries])
    g_edge, g_rs = fit_gaussian(edge_acc), fit_gaussian(rs_acc)

    omega = count_sequences(n, k)
    report = {
        "n_classes": n, "n_tasks": k, "omega_size": omega, "accuracy_source": source.kind,
        "swapped": triplet.swapped,
        "edge": {"sequences": edge_entries, "gaussian": _gaussian_dict(g_edge),
                 "min": float(edge_acc.min()), "max": float(edge_acc.max())},
        "rs": {"sequences": rs_entries, "gaussian": _gaussian_dict(g_rs),
               "min": float(rs_acc.min()), "max": float(rs_acc.max())},
        "truth": None, "comparison": None,
    }
    if source.truth is not None:
        truth = true_distribution(source.truth, cfg.cap)
        report["truth"] = truth.summary()
        report["comparison"] = {"edge": compare_estimate(truth.samples, g_edge, cfg.bins),
                                "rs": compare_estimate(truth.samples, g_rs, cfg.bins)}
    report["bounds"] = bound_panel(omega, n, cfg.epsilon, cfg.delta,
                                   r_sigma=float(edge_acc.max() - edge_acc.min()))
    return report


def bound_panel(omega: int, n_classes: int, epsilon: float, delta: float, r_sigma: float | None = None) -> dict:
    panel = {}
    if omega >= 2:
        panel["thm1"] = bounds.min_samples_rs(bounds.BoundQuery(omega, epsilon, delta)).as_dict()
    if n_classes >= 3:
        panel["remark2"] = bounds.min_samples_rs_approx(n_classes, epsilon, delta).as_dict()
    if omega >= 4 and r_sigma:
        panel["thm2"] = bounds.min_samples_edge(bounds.BoundQuery(omega, epsilon, delta, r_sigma)).as_dict()
    return panel


# --- serialization ----------------------------------------------------------------


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def distribution_json(records: AccuracyRecordSet, source: str = "truth") -> dict:
    dist = EmpiricalDistribution(records.accuracies(), source)
    return {"kind": "distribution", "source": source,
            "records": [{"sequence": format_sequence(s), "accuracy": a} for s, a in records.records],
            "summary": dist.summary()}


def gaussian_json(g: GaussianEstimate, source: str) -> dict:
    return {"kind": "gaussian", "source": source, **_gaussian_dict(g)}


def load_estimate(obj: dict) -> tuple[str, GaussianEstimate | np.ndarray]:
    """Parse a distribution or Gaussian JSON object into samples or a Gaussian."""
    kind = obj.get("kind")
    if kind == "gaussian":
        return kind, GaussianEstimate(float(obj["mean"]), float(obj["variance"]), int(obj.get("sample_count", 1)))
    if kind == "distribution":
        if "records" in obj:
            samples = [float(r["accuracy"]) for r in obj["records"]]
        else:
            samples = [float(v) for v in obj["samples"]]
        return kind, EmpiricalDistribution(samples, obj.get("source", "truth")).samples
    raise ValueError(f"unknown estimate kind {kind!r}; expected 'distribution' or 'gaussian'")


# --- human-readable table ---------------------------------------------------------


def _pct(x) -> str:
    return "-" if x is None else f"{100 * x:.2f}"


def render_table(report: dict) -> str:
    truth = report.get("truth") or {}
    comp = report.get("comparison") or {}
    edge, rs = report["edge"], report["rs"]
    lines = [f"N={report['n_classes']} K={report['n_tasks']} |Omega|={report['omega_size']}",
             "",
             f"{'metric':<10}{'truth':>10}{'RS':>10}{'EDGE':>10}",
             f"{'min (%)':<10}{_pct(truth.get('min')):>10}{_pct(rs['min']):>10}{_pct(edge['min']):>10}",
             f"{'max (%)':<10}{_pct(truth.get('max')):>10}{_pct(rs['max']):>10}{_pct(edge['max']):>10}",
             f"{'mean (%)':<10}{_pct(truth.get('mean')):>10}{_pct(rs['gaussian']['mean']):>10}"
             f"{_pct(edge['gaussian']['mean']):>10}",
             f"{'std (%)':<10}{_pct(math.sqrt(truth['variance']) if truth else None):>10}"
             f"{_pct(rs['gaussian']['std']):>10}{_pct(edge['gaussian']['std']):>10}"]
    if comp:
        lines.append(f"{'JSD':<10}{'':>10}{comp['rs']['jsd']:>10.2f}{comp['edge']['jsd']:>10.2f}")
        lines.append(f"{'W (%)':<10}{'':>10}{_pct(comp['rs']['w1']):>10}{_pct(comp['edge']['w1']):>10}")
    lines.append("")
    for block, name in ((edge, "EDGE"), (rs, "RS")):
        for e in block["sequences"]:
            lines.append(f"{name:<5}{e['role']:<8}{e['sequence']:<24}S={e['score']:.4f}  acc={_pct(e['accuracy'])}%")
    for key, panel in report.get("bounds", {}).items():
        lines.append(f"bound {key}: L={panel['required_L']} (rhs={panel['rhs']:.4g})")
    return "\n".join(lines) + "\n"
