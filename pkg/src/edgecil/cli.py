"""``edgecil`` command-line interface.

Exit statuses: 0 success, 1 infeasible or refused computation, 2 usage or input error.
Every failure also prints one JSON object on stderr, e.g.
``{"error": "FormatError", "message": "...", "line": 3, "column": 2}``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


from . import bounds, protocol
from .core import PartitionError, format_sequence
from .enumeration import (DEFAULT_CAP, CapExceeded, CoverageError, count_sequences, coverage_fraction,
                          format_scientific, iterate_sequences, true_distribution)
from .seqgen import GenerationConfig, generate_median, select_extreme, similarity_score
from .simio import (FormatError, SimilarityMatrix, atomic_write, cosine_similarity, load_accuracies,
                    load_embeddings, load_similarity, save_accuracies)
from .stats import comparison_grid, discretize
from .surrogate import SurrogateParams, landscape

EXIT_OK, EXIT_REFUSED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Refused(Exception):
    def __init__(self, message: str, **fields):
        super().__init__(message)
        self.fields = fields


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message)
        sys.exit(EXIT_USAGE)


def _emit_error(kind: str, message: str, **fields) -> None:
    print(json.dumps({"error": kind, "message": message, **fields}, sort_keys=True), file=sys.stderr)


def _granularities(text: str | None):
    if text is None:
        return None
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if lo > hi:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad granularity spec {text!r}; use a..b or a comma list") from None


def _similarity(args, required: bool = True) -> SimilarityMatrix | None:
    if getattr(args, "sim", None):
        return load_similarity(args.sim)
    if getattr(args, "embeddings", None):
        return cosine_similarity(load_embeddings(args.embeddings))
    if required:
        raise UsageError("need --sim or --embeddings")
    return None


def _emit(args, text: str) -> None:
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _surrogate_params(args) -> SurrogateParams:
    return SurrogateParams(p=args.p, n=args.n, sigma=args.sigma, noise_std=args.noise_std,
                           link_scale=args.link_scale, seed=args.noise_seed)


# --- commands ---------------------------------------------------------------------


def cmd_count(args) -> int:
    omega = count_sequences(args.classes, args.tasks)
    if args.format == "json":
        out = {"n_classes": args.classes, "n_tasks": args.tasks, "omega_size": omega}
        if args.samples is not None:
            frac = coverage_fraction(args.samples, args.classes, args.tasks)
            out["coverage"] = format_scientific(frac)
        _emit(args, protocol.to_json(out))
        return EXIT_OK
    lines = [str(omega)]
    if args.samples is not None:
        lines.append(f"coverage {format_scientific(coverage_fraction(args.samples, args.classes, args.tasks))}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    sim = _similarity(args, required=False)
    n = sim.n_classes if sim is not None else args.classes
    if n is None:
        raise UsageError("need --classes, --sim or --embeddings")
    omega = count_sequences(n, args.tasks)
    if omega > args.cap:
        raise Refused(f"|Omega| = {omega} exceeds cap {args.cap}; refusing to enumerate",
                      omega_size=str(omega), cap=args.cap)
    g = sim.zero_diagonal() if sim is not None else None
    if args.format == "json":
        seqs = []
        for seq in iterate_sequences(n, args.tasks, args.cap):
            entry = {"sequence": format_sequence(seq), "tasks": seq.to_list()}
            if g is not None:
                entry["score"] = similarity_score(seq, g)
            seqs.append(entry)
        _emit(args, protocol.to_json({"n_classes": n, "n_tasks": args.tasks, "omega_size": omega,
                                      "sequences": seqs}))
        return EXIT_OK
    rows = ["sequence,score" if sim is not None else "sequence"]
    for seq in iterate_sequences(n, args.tasks, args.cap):
        rows.append(f"{format_sequence(seq)},{similarity_score(seq, g)!r}" if g is not None
                    else format_sequence(seq))
    _emit(args, "\n".join(rows) + "\n")
    return EXIT_OK


def _sequence_doc(seq, sim, extra) -> dict:
    doc = {"provenance": seq.provenance, "sequence": format_sequence(seq), "tasks": seq.to_list(), **extra}
    if sim is not None:
        doc["labels"] = [[sim.labels[c] for c in t] for t in seq.tasks]
        doc["score"] = similarity_score(seq, sim.zero_diagonal()) if seq.n_tasks > 1 else None
    return doc


def cmd_generate(args) -> int:
    cfg = GenerationConfig(granularities=_granularities(args.granularities), seed=args.seed,
                           multi_start=not args.single_start, workers=args.workers)
    if args.mode == "median":
        sim = _similarity(args, required=args.classes is None)
        n = sim.n_classes if sim is not None else args.classes
        doc = _sequence_doc(generate_median(n, args.tasks, args.seed), sim, {"seed": args.seed})
    else:
        sim = _similarity(args)
        cand = select_extreme(sim, args.tasks, cfg, "min" if args.mode == "hard" else "max")
        doc = _sequence_doc(cand.sequence, sim, {"granularity": cand.granularity})
    _emit(args, protocol.to_json(doc))
    return EXIT_OK


def cmd_landscape(args) -> int:
    if not args.embeddings:
        raise UsageError("landscape needs --embeddings")
    emb = load_embeddings(args.embeddings)
    records = landscape(emb, args.tasks, _surrogate_params(args), args.cap)
    if args.out:
        save_accuracies(records, args.out)
    else:
        sys.stdout.write("sequence,accuracy\n")
        for seq, a in records.records:
            sys.stdout.write(f"{format_sequence(seq)},{a!r}\n")
    return EXIT_OK


def _accuracy_source(args, sim):
    if args.acc:
        return protocol.AccuracySource.from_records(load_accuracies(args.acc), args.cap)
    if args.embeddings:
        return protocol.AccuracySource.from_surrogate(load_embeddings(args.embeddings), args.tasks,
                                                      _surrogate_params(args), args.cap)
    raise UsageError("protocol needs --acc FILE or --embeddings for the surrogate")


def _write_artifacts(directory: Path, report: dict, source, sim, bins: int) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    edge_g = protocol.GaussianEstimate(**{k: report["edge"]["gaussian"][k] for k in ("mean", "variance", "sample_count")})
    rs_g = protocol.GaussianEstimate(**{k: report["rs"]["gaussian"][k] for k in ("mean", "variance", "sample_count")})
    atomic_write(directory / "edge_gaussian.json", protocol.to_json(protocol.gaussian_json(edge_g, "edge")))
    atomic_write(directory / "rs_gaussian.json", protocol.to_json(protocol.gaussian_json(rs_g, "rs")))
    if source.truth is None:
        return
    truth = true_distribution(source.truth)
    atomic_write(directory / "truth.json", protocol.to_json(protocol.distribution_json(source.truth)))
    g = sim.zero_diagonal()
    rows = ["sequence,score,accuracy"]
    for seq, a in source.truth.records:
        rows.append(f"{format_sequence(seq)},{similarity_score(seq, g)!r},{a!r}")
    atomic_write(directory / "scatter.csv", "\n".join(rows) + "\n")
    edges = comparison_grid(truth.samples, [edge_g, rs_g], bins)
    h_truth, h_edge, h_rs = (discretize(s, edges) for s in (truth.samples, edge_g, rs_g))
    rows = ["bin_lo,bin_hi,truth,edge,rs"]
    for i in range(bins):
        cells = (edges[i], edges[i + 1], h_truth.masses[i], h_edge.masses[i], h_rs.masses[i])
        rows.append(",".join(repr(float(c)) for c in cells))
    atomic_write(directory / "hist.csv", "\n".join(rows) + "\n")


def cmd_protocol(args) -> int:
    sim = _similarity(args)
    source = _accuracy_source(args, sim)
    cfg = protocol.ProtocolConfig(
        n_tasks=args.tasks,
        generation=GenerationConfig(granularities=_granularities(args.granularities), seed=args.seed,
                                    multi_start=not args.single_start, workers=args.workers),
        rs_seeds=tuple(args.rs_seeds), bins=args.bins, cap=args.cap, epsilon=args.eps, delta=args.delta)
    try:
        report = protocol.run_protocol(sim, source, cfg)
    except protocol.MissingAccuracy as e:
        raise FormatError(e.args[0]) from None
    if args.artifacts:
        _write_artifacts(Path(args.artifacts), report, source, sim, args.bins)
    _emit(args, protocol.to_json(report) if args.format == "json" else protocol.render_table(report))
    return EXIT_OK


def cmd_bounds(args) -> int:
    if not 0 < args.delta < 1:
        raise UsageError("--delta must lie in (0, 1)")
    if not args.eps > 0:
        raise UsageError("--eps must be > 0")
    if args.omega is not None:
        omega = int(args.omega)
    elif args.classes is not None and args.tasks is not None:
        omega = count_sequences(args.classes, args.tasks)
    else:
        raise UsageError("bounds needs --omega or both --classes and --tasks")
    panel = {"omega_size": omega}
    reports = [bounds.min_samples_rs(bounds.BoundQuery(omega, args.eps, args.delta))]
    if args.classes is not None and args.classes >= 3:
        reports.append(bounds.min_samples_rs_approx(args.classes, args.eps, args.delta))
    if args.r_sigma is not None:
        reports.append(bounds.min_samples_edge(bounds.BoundQuery(omega, args.eps, args.delta, args.r_sigma)))
    for r in reports:
        panel[r.formula_id] = r.as_dict()
    if args.tail_fraction is not None:
        L = args.samples if args.samples is not None else reports[0].required_L
        if L is not None:
            panel["miss"] = {"tail_fraction": args.tail_fraction, "L": L,
                             "probability": bounds.extreme_miss_probability(args.tail_fraction, L)}
    if args.s_bar is not None or args.upper is not None:
        if args.s_bar is None or args.upper is None or args.classes is None or args.tasks is None:
            raise UsageError("greedy bound needs --classes, --tasks, --s-bar and --upper")
        panel["greedy"] = bounds.greedy_bound(args.classes, args.tasks, args.s_bar, args.upper).as_dict()
    if args.format == "json":
        text = protocol.to_json(panel)
    else:
        lines = [f"|Omega| = {omega}"]
        for r in reports:
            L = r.required_L if r.feasible else "INFEASIBLE"
            lines.append(f"{r.formula_id:<8} L = {L}  (lhs_max = {r.lhs_max:.6g}, rhs = {r.rhs:.6g})")
            if r.formula_id == "thm2" and r.feasible:
                lines.append(f"{'':<8} total cost = {r.extra['total_cost']}")
        if "miss" in panel:
            lines.append(f"{'miss':<8} P = {panel['miss']['probability']:.6g} at L = {panel['miss']['L']}")
        if "greedy" in panel:
            gb = panel["greedy"]
            lines.append(f"{'greedy':<8} E = {gb['expected_random_score']:.6g}  delta = {gb['delta_gap']:.6g}  "
                         f"p >= {gb['high_prob_guarantee']:.6g}  threshold_ok = {gb['threshold_ok']}")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if all(r.feasible for r in reports) else EXIT_REFUSED


def cmd_compare(args) -> int:
    truth_kind, truth = protocol.load_estimate(_read_json(args.truth))
    if truth_kind != "distribution":
        raise UsageError("compare: the first file must be an empirical distribution")
    kind, est = protocol.load_estimate(_read_json(args.estimate))
    metrics = protocol.compare_estimate(truth, est, args.bins)
    out = {"truth": str(args.truth), "estimate": str(args.estimate), "estimate_kind": kind, **metrics}
    if args.format == "json":
        _emit(args, protocol.to_json(out))
    else:
        _emit(args, f"JSD {metrics['jsd']:.6g}\nW1  {metrics['w1']:.6g}\n")
    return EXIT_OK


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON: {e.msg}", e.lineno, e.colno) from None


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgecil", description="Extreme/median class-sequence evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, tasks_required=True):
        p.add_argument("--tasks", "-k", type=int, required=tasks_required, help="number of tasks K")
        p.add_argument("--out", "-o", help="output file (written atomically); stdout if omitted")
        p.add_argument("--format", choices=("table", "json"), default="table")

    def inputs(p):
        p.add_argument("--sim", help="similarity matrix CSV")
        p.add_argument("--embeddings", help="class embedding CSV (cosine similarity is derived)")

    def generation(p):
        p.add_argument("--granularities", help="cluster counts, a..b or comma list (default K..min(3K,N))")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--single-start", action="store_true",
                       help="only try the row-sum start in the greedy ordering")
        p.add_argument("--workers", type=int, default=1)

    def surrogate(p):
        p.add_argument("--p", type=int, default=10, help="surrogate parameter dimension")
        p.add_argument("--n", type=int, default=4, help="surrogate samples per task")
        p.add_argument("--sigma", type=float, default=0.5)
        p.add_argument("--noise-std", type=float, default=0.01)
        p.add_argument("--noise-seed", type=int, default=0)
        p.add_argument("--link-scale", type=float, default=1.0)

    p = sub.add_parser("count", help="size of the sequence space")
    common(p)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--samples", type=int, help="also report the fraction of the space L samples cover")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", help="list every canonical sequence")
    common(p)
    inputs(p)
    p.add_argument("--classes", type=int)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("generate", help="hard, easy or median sequence")
    common(p)
    inputs(p)
    generation(p)
    p.add_argument("--mode", choices=("hard", "easy", "median"), required=True)
    p.add_argument("--classes", type=int, help="class count for median mode without a matrix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("landscape", help="surrogate accuracy for every sequence")
    common(p)
    surrogate(p)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("protocol", help="EDGE vs random-seed evaluation report")
    common(p)
    inputs(p)
    generation(p)
    surrogate(p)
    p.add_argument("--acc", help="accuracy CSV (sequence,accuracy); otherwise the surrogate is used")
    p.add_argument("--rs-seeds", type=int, nargs="+", default=list(protocol.RS_SEEDS))
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--artifacts", help="directory for distribution, Gaussian and plot-data files")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("bounds", help="sample-complexity and greedy bounds")
    common(p, tasks_required=False)
    p.add_argument("--omega", type=int)
    p.add_argument("--classes", type=int)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--r-sigma", type=float)
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--s-bar", type=float)
    p.add_argument("--upper", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compare", help="JSD and W1 between a truth distribution and an estimate")
    p.add_argument("truth", help="distribution JSON")
    p.add_argument("estimate", help="distribution or gaussian JSON")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--out", "-o")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Refused as e:
        _emit_error("Refused", str(e), **e.fields)
        return EXIT_REFUSED
    except CapExceeded as e:
        _emit_error("Refused", str(e), omega_size=str(e.size), cap=e.cap)
        return EXIT_REFUSED
    except FormatError as e:
        _emit_error("FormatError", str(e), line=e.line, column=e.column)
        return EXIT_USAGE
    except (UsageError, PartitionError, CoverageError, ValueError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        _emit_error(type(e).__name__, str(msg))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
