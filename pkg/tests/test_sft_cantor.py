from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

import oracles
from betashift import Beta, Interval, NotFound, SftSpec, build_cover, distance_to_cover, witness_excluded_word
from betashift.beta_core import cylinder_interval, is_admissible, parse_beta
from betashift.errors import CoverTooLarge
from betashift.numeric import to_mpq
from betashift.sft_cantor import CantorCover, contained_in_shift, refined_distance, sft_admissible

GOLDEN_MEAN = SftSpec(1, [(1, 1)])


def test_normalization_drops_superwords():
    s = SftSpec(1, [(1, 1, 0), (1, 1), (0, 1, 1, 1)])
    assert s.forbidden == ((1, 1),)
    assert s.memory == 2
    assert s == SftSpec(1, [(1, 1)])
    assert SftSpec.from_json(s.to_json()) == s


def test_sft_admissible_examples():
    assert sft_admissible((1, 0, 1, 0), GOLDEN_MEAN)
    assert not sft_admissible((0, 1, 1, 0), GOLDEN_MEAN)
    assert sft_admissible((), GOLDEN_MEAN)


def test_containment_examples():
    assert contained_in_shift(GOLDEN_MEAN, Beta("1.9"), 12)
    assert not contained_in_shift(GOLDEN_MEAN, Beta("1.5"), 12)
    assert contained_in_shift(SftSpec(1, []), Beta(2), 12)


@pytest.mark.parametrize("beta", ["1.9", "1.5", "1.7", "golden", "1.3"])
def test_containment_against_enumeration(beta):
    b = parse_beta(beta)
    frac = Fraction(beta) if beta != "golden" else None
    dm = oracles.rational_dminus(frac, 30) if frac else oracles.periodic_prefix((1, 0), 30)
    expected = all(oracles.lex_admissible(w, dm)
                   for n in range(1, 11) for w in oracles.words((1,) * 30, n, 1)
                   if sft_admissible(w, GOLDEN_MEAN))
    assert contained_in_shift(GOLDEN_MEAN, b, 10) == expected


def test_witness_examples():
    assert witness_excluded_word(GOLDEN_MEAN, Beta("1.9"), 10) == (1, 1)
    with pytest.raises(NotFound):
        witness_excluded_word(GOLDEN_MEAN, Beta.golden_ratio(), 10)
    assert witness_excluded_word(SftSpec(2, [(2,)]), Beta("2.5"), 10) == (2,)


@given(st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=5), min_size=1, max_size=4))
def test_witness_is_admissible_and_forbidden(forbidden):
    sft = SftSpec(1, forbidden)
    b = Beta("1.9")
    dm = oracles.rational_dminus(Fraction("1.9"), 30)
    try:
        w = witness_excluded_word(sft, b, 8)
    except NotFound:
        # then no S_beta word up to length 8 is forbidden
        assert all(sft_admissible(w, sft) for n in range(1, 9) for w in oracles.words(dm, n, 1))
        return
    assert oracles.lex_admissible(w, dm)
    assert not sft_admissible(w, sft)
    shorter = [v for n in range(1, len(w)) for v in oracles.words(dm, n, 1)]
    assert all(sft_admissible(v, sft) for v in shorter)


@pytest.mark.parametrize("beta,g,count", [("2", 3, 5), ("1.9", 4, 8)])
def test_cover_counts_are_fibonacci(beta, g, count):
    assert count == oracles.golden_mean_count(g)
    cover = build_cover(GOLDEN_MEAN, parse_beta(beta), g)
    assert len(cover) == count


def test_full_shift_cover_tiles_unit_interval():
    cover = build_cover(SftSpec(1, []), Beta(2), 2)
    assert len(cover) == 4
    assert [c.left_exact for c in cover.intervals] == [0, mpq(1, 4), mpq(1, 2), mpq(3, 4)]
    assert cover.total_length().contains(1)


def test_cover_cap():
    with pytest.raises(CoverTooLarge):
        build_cover(SftSpec(1, []), Beta(2), 12, cap=100)


@pytest.mark.parametrize("beta", ["1.9", "2", "golden"])
def test_cover_structure(beta):
    b = parse_beta(beta)
    prev = None
    for g in range(1, 9):
        cover = build_cover(GOLDEN_MEAN, b, g)
        for a, z in zip(cover.intervals, cover.intervals[1:]):
            assert (z.left_exact - a.right_exact).sign() >= 0
        assert to_mpq(cover.slack_bounds.lo) <= to_mpq(b.inv_pow(g).bounds().hi)
        total = cover.total_length()
        if prev is not None:
            # every interval sits inside an interval of the coarser cover
            for c in cover.intervals:
                assert any(p.word == c.word[:-1] for p in prev.intervals)
            assert total.lo <= prev.total_length().hi
        prev = cover


def test_cover_words_are_exactly_the_joint_language():
    b = Beta("1.9")
    dm = oracles.rational_dminus(Fraction("1.9"), 30)
    cover = build_cover(GOLDEN_MEAN, b, 9)
    expected = [w for w in oracles.words(dm, 9, 1) if sft_admissible(w, GOLDEN_MEAN)]
    assert [c.word for c in cover.intervals] == expected


def test_sft_points_lie_in_cover():
    b = Beta("1.9")
    cover = build_cover(GOLDEN_MEAN, b, 8)
    for w in oracles.words((1,) * 20, 14, 1):
        if sft_admissible(w, GOLDEN_MEAN):
            x = oracles.project(w, mpmath.mpf("1.9"))
            assert any(mpmath.mpf(str(to_mpq(iv.lo))) - 1e-30 <= x <= mpmath.mpf(str(to_mpq(iv.hi))) + 1e-30
                       for iv in cover.bounds)


def test_distance_examples():
    cover = CantorCover.from_bounds([(0, mpq(1, 4))])
    assert distance_to_cover(mpq(1, 2), cover) == Interval(mpq(1, 4), mpq(1, 4))
    assert distance_to_cover(mpq(1, 8), cover) == Interval(0, 0)


def test_distance_of_excluded_cylinder_point():
    b = Beta("1.9")
    cover = build_cover(GOLDEN_MEAN, b, 8)
    x = cylinder_interval((1, 1), b).left_exact
    assert distance_to_cover(x, cover).lo > 0


@given(st.fractions(0, 1, max_denominator=10 ** 6), st.fractions(0, 1, max_denominator=10 ** 6))
def test_distance_is_lipschitz(x, y):
    cover = build_cover(GOLDEN_MEAN, Beta("1.9"), 6)
    dx = distance_to_cover(to_mpq(x), cover)
    dy = distance_to_cover(to_mpq(y), cover)
    gap = abs(to_mpq(x) - to_mpq(y))
    assert to_mpq(dx.lo) <= to_mpq(dy.hi) + gap + mpq(1, 10 ** 30)
    assert to_mpq(dy.lo) <= to_mpq(dx.hi) + gap + mpq(1, 10 ** 30)


@given(st.fractions(0, 1, max_denominator=10 ** 6))
def test_distance_matches_linear_scan(x):
    cover = build_cover(GOLDEN_MEAN, Beta("1.9"), 7)
    q = to_mpq(x)
    naive = min(max(0, to_mpq(iv.lo) - q, q - to_mpq(iv.hi)) for iv in cover.bounds)
    d = distance_to_cover(q, cover)
    assert to_mpq(d.lo) <= naive <= to_mpq(d.hi)


@given(st.fractions(0, 1, max_denominator=10 ** 6))
def test_refined_distance_is_the_deeper_cover_distance(x):
    b = Beta("1.9")
    coarse, fine = build_cover(GOLDEN_MEAN, b, 5), build_cover(GOLDEN_MEAN, b, 9)
    q = to_mpq(x)
    r = refined_distance(q, coarse, 9)
    d = distance_to_cover(q, fine)
    assert to_mpq(d.lo) - mpq(1, 10 ** 30) <= to_mpq(r) <= to_mpq(d.hi)
    assert r >= distance_to_cover(q, coarse).lo


def test_cover_json():
    cover = build_cover(GOLDEN_MEAN, Beta("1.9"), 3)
    doc = cover.to_json()
    assert doc["words"] == ["000", "001", "010", "100", "101"]
    assert all(mpmath.mpf(lo) < mpmath.mpf(hi) for lo, hi in doc["intervals"])
    assert doc["sft"] == {"alphabet_max": 1, "forbidden": [[1, 1]]}


def test_golden_shift_is_golden_mean_sft():
    # no witness: every golden-base word already avoids 11
    b = Beta.golden_ratio()
    assert contained_in_shift(GOLDEN_MEAN, b, 15)
    assert all(is_admissible(w, b) == sft_admissible(w, GOLDEN_MEAN) for w in oracles.words((1,) * 9, 9, 1))
