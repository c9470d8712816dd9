import json

import numpy as np
import pytest

from edgecil import protocol
from edgecil.enumeration import iterate_sequences
from edgecil.protocol import AccuracySource, MissingAccuracy, ProtocolConfig, compare_estimate, run_protocol
from edgecil.seqgen import generate_median
from edgecil.simio import AccuracyRecordSet, cosine_similarity
from edgecil.stats import GaussianEstimate, fit_gaussian
from edgecil.surrogate import SurrogateParams, synthetic_accuracy

from conftest import random_sim


@pytest.fixture(scope="module")
def report(cifar6):
    sim = cosine_similarity(cifar6)
    src = AccuracySource.from_surrogate(cifar6, 3, SurrogateParams(noise_std=0.02))
    return run_protocol(sim, src, ProtocolConfig(n_tasks=3))


def test_report_structure(report):
    assert report["truth"]["count"] == 90
    assert len(report["edge"]["sequences"]) == 3 and len(report["rs"]["sequences"]) == 3
    assert [e["role"] for e in report["edge"]["sequences"]] == ["hard", "easy", "median"]
    assert set(report["comparison"]) == {"edge", "rs"}
    for est in ("edge", "rs"):
        assert set(report["comparison"][est]) == {"jsd", "w1"}
        accs = [e["accuracy"] for e in report[est]["sequences"]]
        assert all(0 <= a <= 1 for a in accs)
        assert report[est]["min"] == min(accs) <= report[est]["max"] == max(accs)
        g = fit_gaussian(accs)
        assert report[est]["gaussian"]["mean"] == g.mean and report[est]["gaussian"]["variance"] == g.variance
    assert report["edge"]["sequences"][0]["score"] <= report["edge"]["sequences"][1]["score"]


def test_rs_uses_fixed_seeds(report):
    for entry, seed in zip(report["rs"]["sequences"], protocol.RS_SEEDS):
        assert entry["seed"] == seed
        assert entry["tasks"] == generate_median(6, 3, seed).to_list()


def test_report_json_deterministic(report, cifar6):
    again = run_protocol(cosine_similarity(cifar6),
                         AccuracySource.from_surrogate(cifar6, 3, SurrogateParams(noise_std=0.02)),
                         ProtocolConfig(n_tasks=3))
    assert protocol.to_json(report) == protocol.to_json(again)
    json.loads(protocol.to_json(report))


def test_table_rendering(report):
    text = protocol.render_table(report)
    assert "JSD" in text and "W (%)" in text
    mn = f"{100 * report['truth']['min']:.2f}"
    assert mn in text.splitlines()[3]


def test_degenerate_truth_gives_zero():
    sim = random_sim(6, np.random.default_rng(0))
    recs = AccuracyRecordSet(tuple((s, 0.5) for s in iterate_sequences(6, 3)))
    rep = run_protocol(sim, AccuracySource.from_records(recs), ProtocolConfig(n_tasks=3))
    for est in ("edge", "rs"):
        assert rep["comparison"][est] == {"jsd": 0.0, "w1": 0.0}


def test_missing_accuracy():
    sim = random_sim(6, np.random.default_rng(0))
    recs = AccuracyRecordSet(tuple((s, 0.5) for s in list(iterate_sequences(6, 3))[:10]))
    src = AccuracySource.from_records(recs)
    assert src.truth is None
    with pytest.raises(MissingAccuracy):
        run_protocol(sim, src, ProtocolConfig(n_tasks=3))


def test_large_instance_without_truth():
    rng = np.random.default_rng(1)
    from edgecil.simio import EmbeddingSet
    emb = EmbeddingSet(tuple(f"c{i}" for i in range(20)), np.abs(rng.normal(size=(20, 6))))
    params = SurrogateParams()
    src = AccuracySource.from_surrogate(emb, 4, params, cap=1000)
    rep = run_protocol(cosine_similarity(emb), src, ProtocolConfig(n_tasks=4, cap=1000))
    assert rep["truth"] is None and rep["comparison"] is None
    hard = rep["edge"]["sequences"][0]
    from edgecil.core import parse_sequence
    assert hard["accuracy"] == synthetic_accuracy(parse_sequence(hard["sequence"]), emb, params)
    assert "thm2" in rep["bounds"] and "thm1" in rep["bounds"]


def test_compare_estimate_variants():
    truth = np.array([0.2, 0.3, 0.3, 0.4])
    same = compare_estimate(truth, truth)
    assert same == {"jsd": 0.0, "w1": 0.0}
    g = compare_estimate(truth, GaussianEstimate(0.3, 0.005))
    assert g["jsd"] > 0 and g["w1"] > 0


def test_load_estimate():
    kind, g = protocol.load_estimate({"kind": "gaussian", "mean": 0.3, "variance": 0.01, "sample_count": 3})
    assert kind == "gaussian" and g == GaussianEstimate(0.3, 0.01, 3)
    kind, s = protocol.load_estimate({"kind": "distribution", "samples": [0.1, 0.2]})
    assert kind == "distribution" and list(s) == [0.1, 0.2]
    with pytest.raises(ValueError):
        protocol.load_estimate({"kind": "histogram"})
