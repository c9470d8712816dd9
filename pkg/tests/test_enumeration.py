import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgecil.core import PartitionError, TaskSequence, format_sequence
from edgecil.enumeration import (CapExceeded, CoverageError, EmpiricalDistribution, count_sequences,
                                 coverage_fraction, extremes_by_score, format_scientific, iterate_sequences,
                                 score_array, sequence_array, true_distribution)
from edgecil.seqgen import similarity_score
from edgecil.simio import AccuracyRecordSet, SimilarityMatrix

from conftest import random_sim

TABLE_A1 = {(4, 2): 6, (6, 2): 20, (8, 2): 70, (10, 2): 252, (6, 3): 90, (9, 3): 1680, (8, 4): 2520}


def multinomial(n, k):
    """Product of binomials: choose task 1, then task 2 from the rest, ..."""
    m = n // k
    out = 1
    for i in range(k):
        out *= math.comb(n - i * m, m)
    return out


@pytest.mark.parametrize("nk,expected", TABLE_A1.items())
def test_table_counts(nk, expected):
    assert count_sequences(*nk) == expected


def test_hundred_classes():
    omega = count_sequences(100, 10)
    assert omega == multinomial(100, 10)
    assert len(str(omega)) - 1 == 92
    assert str(omega).startswith("2357")


def test_single_task_and_errors():
    assert count_sequences(17, 1) == 1
    with pytest.raises(PartitionError):
        count_sequences(7, 2)


@given(st.integers(1, 12), st.integers(1, 6))
def test_count_matches_multinomial(m, k):
    assert count_sequences(m * k, k) == multinomial(m * k, k)


def test_six_three_has_ninety():
    seqs = list(iterate_sequences(6, 3))
    assert len(seqs) == 90 == len(set(seqs))
    assert [format_sequence(s) for s in seqs[:2]] == ["0 1|2 3|4 5", "0 1|2 4|3 5"]
    assert [format_sequence(s) for s in seqs] == sorted(format_sequence(s) for s in seqs)


def test_two_two():
    assert list(iterate_sequences(2, 2)) == [TaskSequence(((0,), (1,))), TaskSequence(((1,), (0,)))]


def test_eight_four():
    seqs = list(iterate_sequences(8, 4))
    assert len(seqs) == 2520 == len(set(seqs))


def test_stream_length_grid():
    grid = [(n, k) for n in range(1, 13) for k in range(1, n + 1)
            if n % k == 0 and count_sequences(n, k) <= 10**4]
    assert len(grid) > 15
    for n, k in grid:
        assert sum(1 for _ in iterate_sequences(n, k)) == count_sequences(n, k), (n, k)


def test_cap():
    with pytest.raises(CapExceeded) as info:
        list(iterate_sequences(12, 3, cap=1000))
    assert info.value.size == 34650
    with pytest.raises(CapExceeded):
        sequence_array(100, 10)


def test_sequence_array_matches_iterator():
    arr = sequence_array(6, 3)
    assert arr.shape == (90, 3, 2)
    assert [TaskSequence(tuple(map(tuple, row))) for row in arr] == list(iterate_sequences(6, 3))


def test_score_array_matches_scalar():
    sim = random_sim(8, np.random.default_rng(1)).zero_diagonal()
    seqs = list(iterate_sequences(8, 4))
    fast = score_array(sequence_array(8, 4), sim)
    slow = np.array([similarity_score(s, sim) for s in seqs])
    np.testing.assert_allclose(fast, slow, atol=1e-12)


def test_extremes_block(block4):
    ex = extremes_by_score(block4.zero_diagonal(), 2)
    assert ex.min_score == pytest.approx(0.2) and ex.max_score == pytest.approx(1.0)
    ones = SimilarityMatrix.from_array(np.ones((6, 6))).zero_diagonal()
    ex = extremes_by_score(ones, 3)
    assert ex.min_score == pytest.approx(2.0) == ex.max_score


def test_sandwich():
    rng = np.random.default_rng(3)
    sim = random_sim(8, rng).zero_diagonal()
    ex = extremes_by_score(sim, 4)
    for seed in range(1000):
        perm = np.random.default_rng(seed).permutation(8)
        seq = TaskSequence(tuple(tuple(perm[i:i + 2]) for i in range(0, 8, 2)))
        assert ex.min_score - 1e-12 <= similarity_score(seq, sim) <= ex.max_score + 1e-12


def full_records(n, k, value=None, seed=0):
    rng = np.random.default_rng(seed)
    return AccuracyRecordSet(tuple((s, value if value is not None else float(rng.uniform()))
                                   for s in iterate_sequences(n, k)))


def test_true_distribution():
    dist = true_distribution(full_records(6, 3))
    assert dist.samples.size == 90
    flat = true_distribution(full_records(6, 3, value=0.5)).summary()
    assert flat["variance"] == 0 and flat["min"] == flat["max"] == 0.5


def test_true_distribution_names_missing():
    recs = full_records(6, 3)
    missing = recs.records[17][0]
    partial = AccuracyRecordSet(recs.records[:17] + recs.records[18:])
    with pytest.raises(CoverageError, match=format_sequence(missing).replace("|", r"\|")):
        true_distribution(partial)
    dup = AccuracyRecordSet(recs.records + recs.records[:1])
    with pytest.raises(CoverageError, match="more than once"):
        true_distribution(dup)


def test_summary_matches_two_pass():
    dist = true_distribution(full_records(6, 3, seed=5))
    x = [float(v) for v in dist.samples]
    mean = math.fsum(x) / len(x)
    var = math.fsum((v - mean) ** 2 for v in x) / len(x)
    s = dist.summary()
    assert s["mean"] == pytest.approx(mean, abs=1e-12) and s["variance"] == pytest.approx(var, abs=1e-12)


def test_empirical_validation():
    with pytest.raises(ValueError):
        EmpiricalDistribution([])
    with pytest.raises(ValueError):
        EmpiricalDistribution([1.5])
    with pytest.raises(ValueError):
        EmpiricalDistribution([0.5], "model")


def test_coverage():
    assert coverage_fraction(90, 6, 3) == 1
    assert coverage_fraction(3, 6, 3) == Fraction(1, 30)
    tiny = coverage_fraction(3, 100, 10)
    # three random seeds cover about 1.3e-92 of the 100-class space
    assert Fraction(1, 10**92) < tiny < Fraction(1, 10**91)
    assert format_scientific(tiny) == "1.273e-92"
    assert format_scientific(Fraction(1, 30)) == "3.333e-2"
    assert format_scientific(Fraction(1)) == "1.000e+0"


@settings(max_examples=50)
@given(st.fractions(min_value=Fraction(1, 10**300), max_value=10**9))
def test_format_scientific_roundtrip(x):
    text = format_scientific(x, digits=6)
    assert float(text) == pytest.approx(float(x), rel=1e-5)
