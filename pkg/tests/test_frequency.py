import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from betashift import Beta, NotConcatenable, PeriodicStream
from betashift.frequency import (
    FrequencyTrace,
    alternating_limits,
    certify_prefix,
    construct_divergent_point,
    cyclic_density,
    divergence_gap,
    divergence_report,
    naive_count,
    word_frequency_trace,
)


@pytest.mark.parametrize("s,word,n,count", [
    (PeriodicStream((), (1, 0)), (1, 0), 10, 5),
    (PeriodicStream((), (0,)), (1,), 10, 0),
    (PeriodicStream((), (0,)), (1,), 1, 0),
    (PeriodicStream((), (1,)), (1, 1), 10, 9),
])
def test_count_examples(s, word, n, count):
    tr = word_frequency_trace(s, word, [n])
    assert tr.counts == (count,)
    assert tr.ratios[0] == count / n


def test_word_longer_than_prefix():
    tr = word_frequency_trace(PeriodicStream((), (1,)), (1, 1, 1), [2, 3])
    assert tr.counts == (0, 1)


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        word_frequency_trace(PeriodicStream((), (1,)), (), [3])


@settings(max_examples=40)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=600),
       st.lists(st.integers(0, 2), min_size=1, max_size=4),
       st.lists(st.integers(1, 600), min_size=1, max_size=6))
def test_counts_match_quadratic_oracle(digits, word, cps):
    cps = [min(c, len(digits)) for c in cps]
    tr = word_frequency_trace(digits, word, cps)
    for n, c in zip(tr.prefix_lengths, tr.counts):
        assert c == oracles.count_occurrences(digits, word, n) == naive_count(digits, word, n)


@pytest.mark.parametrize("beta,word,r", [(Beta(2), (1,), 2), (Beta.golden_ratio(), (1,), 3)])
def test_counts_on_constructions_match_oracle_to_ten_thousand(beta, word, r):
    s = construct_divergent_point(beta, word, r)
    digits = s.prefix(10 ** 4)
    cps = [1, 17, 999, 4321, 10 ** 4] + s.block_ends(10 ** 4)
    tr = word_frequency_trace(s, word, cps)
    for n, c in zip(tr.prefix_lengths, tr.counts):
        assert c == oracles.count_occurrences(digits, word, n)


def test_block_stream_digit_and_array_agree():
    s = construct_divergent_point(Beta.golden_ratio(), (1,), 2)
    arr = s.array(3000)
    assert all(s.digit(i) == arr[i] for i in range(0, 3000, 7))


def test_ratio_must_grow():
    with pytest.raises(ValueError):
        construct_divergent_point(Beta(2), (1,), 1)
    with pytest.raises(ValueError):
        construct_divergent_point(Beta(2), (1,), Fraction(1, 2))


def test_inadmissible_block_rejected():
    with pytest.raises(NotConcatenable):
        construct_divergent_point(Beta.golden_ratio(), (1,), 2, u=(1, 1))
    with pytest.raises(NotConcatenable):
        construct_divergent_point(Beta(2), (1, 1), 2, u=(1, 0))


@pytest.mark.parametrize("beta", [Beta(2), Beta.golden_ratio(), Beta("1.9"), Beta.tribonacci()])
def test_constructed_prefix_is_admissible(beta):
    s = construct_divergent_point(beta, (1,), 2)
    assert certify_prefix(s, beta, 10 ** 5)


def test_golden_construction_never_shows_11():
    s = construct_divergent_point(Beta.golden_ratio(), (1,), 2)
    assert s.u == (1, 0)
    assert naive_count(s.prefix(5000), (1, 1), 5000) == 0


def test_closed_forms():
    assert alternating_limits(1, 2) == (Fraction(1, 3), Fraction(2, 3))
    assert alternating_limits(Fraction(1, 2), 3) == (Fraction(1, 8), Fraction(3, 8))
    assert cyclic_density((1, 0), (1,)) == Fraction(1, 2)
    assert cyclic_density((1, 1, 0), (1, 1)) == Fraction(1, 3)


@pytest.mark.parametrize("beta,r", [(Beta(2), 2), (Beta.golden_ratio(), 3), (Beta.golden_ratio(), 2)])
def test_boundary_ratios_approach_closed_form(beta, r):
    s = construct_divergent_point(beta, (1,), r)
    n = 10 ** 6
    ends = s.block_ends(n)
    tr = word_frequency_trace(s, (1,), ends)
    lo, hi = alternating_limits(cyclic_density(s.u, (1,)), r)
    # u-block ends approach the upper limit, zero-block ends the lower one
    for j, (m, ratio) in enumerate(zip(tr.prefix_lengths, tr.ratios)):
        if m < 10 ** 4:
            continue
        target = hi if j % 2 == 0 else lo
        assert abs(ratio - float(target)) < 50 / m + 1e-12


def test_gap_conventions():
    flat = FrequencyTrace((1,), (10, 20, 30, 40), (5, 10, 15, 20))
    assert divergence_gap(flat) == (0.5, 0.5)
    single = FrequencyTrace((1,), (10,), (3,))
    lo, hi = divergence_gap(single)
    assert hi - lo == 0


def test_report_gap_two_and_golden():
    rep2 = divergence_report(Beta(2), (1,), 2, 10 ** 6)
    assert float(rep2["gap"]) >= 0.2 and rep2["closed_form"] == ["1/3", "2/3"]
    repg = divergence_report(Beta.golden_ratio(), (1,), 3, 10 ** 6)
    assert float(repg["gap"]) >= 0.2 and repg["closed_form"] == ["1/8", "3/8"]
    # r = 2 still oscillates, just with a smaller gap of 1/6
    rep = divergence_report(Beta.golden_ratio(), (1,), 2, 10 ** 6)
    assert abs(float(rep["gap"]) - 1 / 6) < 0.01


def test_csv_and_json():
    tr = word_frequency_trace(PeriodicStream((), (1, 0)), (1,), [4, 10])
    lines = tr.to_csv().splitlines()
    assert lines[0] == "n,count,ratio" and lines[1] == "4,2,0.5"
    doc = json.loads(json.dumps(tr.to_json()))
    assert doc["count"] == [2, 5] and doc["n"] == [4, 10]


def test_numpy_input_accepted():
    arr = np.array([1, 0, 1, 1, 0, 1])
    assert word_frequency_trace(arr, (1, 0, 1), [6]).counts == (2,)
    with pytest.raises(ValueError):
        word_frequency_trace(arr, (1,), [7])
