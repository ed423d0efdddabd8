import json
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

import oracles
from betashift import Beta, IllegalMove, NotFound, SftSpec, build_cover
from betashift.numeric import to_mpq
from betashift.schmidt_game import (
    BLACK,
    WHITE,
    AdversarialBlack,
    CenterStrategy,
    GameConfig,
    GameTranscript,
    Move,
    RandomBlack,
    Strategy,
    black_strategies,
    choose_k,
    choose_M,
    cylinder_in_interval,
    epsilon,
    explicit_alpha,
    find_sft_approximation,
    intersect_strategies,
    place_interval,
    play,
    project_transcript,
    replay,
    validate_move,
    verify_avoidance,
    white_avoidance_strategy,
)
from betashift.sft_cantor import CantorCover

GM = SftSpec(1, [(1, 1)])
B19 = Beta("1.9")
DM19 = oracles.rational_dminus(Fraction("1.9"), 200)


def cfg(alpha="1/4", gamma="1/2", rounds=10, **kw):
    return GameConfig(mpq(alpha), mpq(gamma), rounds, **kw)


B0 = Move(BLACK, 0, 1, 0)


@pytest.mark.parametrize("w,ok", [((mpq(1, 4), mpq(1, 2)), True), ((mpq(2, 5), mpq(1, 2)), False)])
def test_validate_ratio(w, ok):
    assert validate_move(Move(WHITE, *w, 0), [B0], cfg()) is ok


def test_validate_containment_and_reason():
    hist = [Move(BLACK, 0, mpq(1, 2), 0)]
    m = Move(WHITE, mpq(2, 5), mpq(3, 5), 0)
    assert not validate_move(m, hist, cfg(alpha="1/100"))
    with pytest.raises(IllegalMove) as e:
        validate_move(m, hist, cfg(alpha="1/100"), raise_on_fail=True)
    assert e.value.reason == "not_contained" and e.value.move == m


def test_validate_order_and_black_ratio():
    w = Move(WHITE, 0, mpq(1, 2), 0)
    assert not validate_move(Move(WHITE, 0, mpq(1, 4), 0), [B0, w], cfg())
    assert not validate_move(Move(BLACK, 0, mpq(1, 8), 1), [B0, w], cfg())
    assert validate_move(Move(BLACK, 0, mpq(1, 4), 1), [B0, w], cfg())


def test_config_rejects_bad_parameters():
    for a, g in [(0, "1/2"), (1, "1/2"), ("1/2", "3/2")]:
        with pytest.raises(ValueError):
            GameConfig(a, g, 3)


def test_center_vs_center_width():
    c = cfg(rounds=10)
    t = play(CenterStrategy(WHITE), CenterStrategy(BLACK), c)
    assert t.final_point.hi - t.final_point.lo == (c.alpha * c.gamma) ** 10
    assert replay(t) == (True, "", None)


def test_zero_rounds():
    t = play(CenterStrategy(WHITE), CenterStrategy(BLACK), cfg(rounds=0))
    assert len(t.moves) == 1 and t.moves[0].player == BLACK
    assert replay(t)[0]


def test_center_black_example():
    hist = [B0, Move(WHITE, mpq(1, 5), mpq(3, 5), 0)]
    b = CenterStrategy(BLACK).reply(hist, cfg(gamma="1/2"))
    assert (b.lo, b.hi) == (mpq(3, 10), mpq(1, 2))


def test_adversarial_black_hugs_cover():
    cover = CantorCover.from_bounds([(0, mpq(1, 10))])
    hist = [B0, Move(WHITE, 0, mpq(2, 5), 0)]
    b = AdversarialBlack(cover).reply(hist, cfg(gamma="1/4"))
    assert (b.lo, b.hi) == (0, mpq(1, 10))


def test_random_black_reproducible():
    c = cfg(rounds=30)
    t1 = play(CenterStrategy(WHITE), RandomBlack(5), c)
    t2 = play(CenterStrategy(WHITE), RandomBlack(5), c)
    t3 = play(CenterStrategy(WHITE), RandomBlack(6), c)
    assert t1.digest() == t2.digest() != t3.digest()


@given(st.fractions(0, 1, max_denominator=1000), st.fractions(0, 1, max_denominator=1000))
def test_place_interval_contains_target(a, b):
    lo_t, hi_t = sorted((to_mpq(a), to_mpq(b)))
    if lo_t == hi_t:
        return
    lo, hi = place_interval(lo_t, hi_t, (mpq(0), mpq(1)), hi_t - lo_t)
    assert lo <= lo_t and hi >= hi_t


def test_constants_examples():
    assert choose_M(B19, GM) == 1
    assert choose_k(B19, 1) == 1
    with pytest.raises(NotFound):
        choose_M(B19, SftSpec(1, []))
    with pytest.raises(NotFound):
        choose_k(Beta.golden_ratio(), 1)
    assert choose_k(Beta.golden_ratio(), 0) == 1
    a = explicit_alpha(B19, 1, 1)
    assert a.bounds().contains(mpq(1, 4) / mpq(19, 10) ** 3)
    assert float(a) == pytest.approx(0.0364485, abs=1e-6)
    assert float(explicit_alpha(B19, 1, 1, composite=True)) == pytest.approx(0.0091121, abs=1e-6)
    assert explicit_alpha(Beta(2), 0, 0).bounds().contains(mpq(1, 8))


def test_choose_M_at_two_and_a_half():
    # d(1, 2.5) = 2, 1, 0, ... so (2, 2) is never a prefix
    with pytest.raises(NotFound):
        choose_M(Beta("2.5"), SftSpec(2, [(2, 2)]))
    assert choose_M(Beta("2.5"), SftSpec(2, [(2, 1)])) == 1


def test_alpha_decreases_with_M_and_k():
    vals = [float(explicit_alpha(B19, m, k)) for m, k in [(0, 0), (1, 0), (1, 1), (2, 1), (3, 2)]]
    assert vals == sorted(vals, reverse=True)


def _match_len(word, d):
    best = -1
    for m in range(len(word)):
        if tuple(word[len(word) - m - 1:]) == tuple(d[:m + 1]):
            best = m
    return best


def _oracle_overlap(word, beta_mp, dm, amax, a, b):
    left, _, right = oracles.brute_cylinder(word, beta_mp, dm, amax, depth=len(word) + 40)
    return max(mpmath.mpf(0), min(right, b) - max(left, a)), left, right


@settings(max_examples=40)
@given(st.fractions(0, 1, max_denominator=997), st.fractions(Fraction(1, 200), 1, max_denominator=997))
def test_cylinder_in_interval_property_1_9(a, w):
    b = min(a + w, Fraction(1))
    if b <= a:
        return
    info = {}
    cyl = cylinder_in_interval((to_mpq(a), to_mpq(b)), B19, 1, info=info)
    d = oracles.rational_expansion_of_one(Fraction("1.9"), 40)[0]
    assert _match_len(cyl.word, d) >= 1
    assert oracles.lex_admissible(cyl.word, DM19)
    am, bm = mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(b.numerator) / b.denominator
    ov, _, _ = _oracle_overlap(cyl.word, mpmath.mpf("1.9"), DM19, 1, am, bm)
    eps = mpmath.mpf("1.9") ** -3 / 2
    assert ov > eps * (bm - am) * (1 - mpmath.mpf(10) ** -20)


def test_cylinder_in_interval_examples():
    info = {}
    cyl = cylinder_in_interval((mpq(49, 100), mpq(51, 100)), B19, 1, info=info)
    assert cyl.word[-2:] == (1, 1) and info["match"] >= 1
    ov = (min(cyl.right_exact, B19.exact(mpq(51, 100))) - max(cyl.left_exact, B19.exact(mpq(49, 100))))
    assert float(ov) > float(epsilon(B19, 1, 1)) * 0.02
    phi = Beta.golden_ratio()
    # at the golden base a word ending in 11 is not admissible, so M = 1 has no cylinder
    with pytest.raises(NotFound):
        cylinder_in_interval((mpq(3, 10), mpq(1, 2)), phi, 1, k=1)
    cyl = cylinder_in_interval((mpq(3, 10), mpq(1, 2)), phi, 0, info=info)
    assert cyl.word[-1] == 1
    # d(1, 2) = 2 0 0 ...: no binary word ends in the digit 2
    with pytest.raises(NotFound):
        cylinder_in_interval((mpq(0), mpq(1)), Beta(2), 0, k=0)


def test_bad_interval_rejected():
    with pytest.raises(ValueError):
        cylinder_in_interval((mpq(1, 2), mpq(1, 2)), B19, 1)


def _avoidance_game(black, rounds=60, seed=0):
    w = white_avoidance_strategy(B19, GM)
    c = GameConfig(explicit_alpha(B19, w.M, w.k).c[0], mpq(1, 2), rounds, B19, seed)
    return w, play(w, black, c)


def test_avoidance_game_words_and_nesting():
    cover = build_cover(GM, B19, 10)
    w, t = _avoidance_game(RandomBlack(1))
    assert replay(t)[0]
    d = oracles.rational_expansion_of_one(Fraction("1.9"), 10)[0]
    for cyl in w.cylinders:
        assert _match_len(cyl.word, d) >= 1
    # White moves sit inside the announced cylinder
    for m, cyl in zip(t.white_moves(), w.cylinders):
        assert to_mpq(cyl.bounds().lo) <= m.lo + mpq(1, 10 ** 12) and m.hi <= to_mpq(cyl.bounds().hi) + mpq(1, 10 ** 12)
        assert "word=" + "".join(map(str, cyl.word)) in m.annotation
    v = verify_avoidance(t, B19, cover, 40)
    assert v["status"] == "PASS"


def test_first_white_move_is_centred():
    w = white_avoidance_strategy(B19, GM)
    c = GameConfig(w.alpha, mpq(1, 2), 1, B19)
    t = play(w, CenterStrategy(BLACK), c)
    m = t.moves[1]
    cyl = w.cylinders[0]
    j_lo, j_hi = max(cyl.bounds().lo, 0), min(cyl.bounds().hi, 1)
    mid = float(j_lo + j_hi) / 2
    assert abs(float(m.lo + m.hi) / 2 - mid) < 1e-6
    assert m.length >= c.alpha


def test_center_game_usually_fails():
    cover = build_cover(GM, B19, 10)
    t = play(CenterStrategy(WHITE), RandomBlack(3), cfg(alpha="1/4", rounds=80))
    assert verify_avoidance(t, B19, cover, 60)["status"] == "FAIL"


def test_orbit_len_zero_is_vacuous():
    cover = build_cover(GM, B19, 6)
    t = play(CenterStrategy(WHITE), CenterStrategy(BLACK), cfg(rounds=20))
    v = verify_avoidance(t, B19, cover, 0)
    assert v["status"] == "PASS" and v["worst_n"] == 0
    assert v["margin"] == v["point_distance"]


def test_transcript_json_round_trip():
    _, t = _avoidance_game(RandomBlack(2), rounds=20)
    t.verdict = [{"status": "x"}]
    doc = json.loads(json.dumps(t.to_json()))
    t2 = GameTranscript.from_json(doc)
    assert t2.digest() == t.digest() and replay(t2)[0]


def test_replay_detects_tampering():
    t = play(CenterStrategy(WHITE), CenterStrategy(BLACK), cfg(rounds=5))
    m = t.moves[3]
    t.moves[3] = Move(m.player, m.lo, m.lo + (m.hi - m.lo) / 100, m.round)
    ok, reason, idx = replay(t)
    assert not ok and idx in (3, 4)


class _Illegal(Strategy):
    def reply(self, history, config):
        b = history[-1]
        return Move(WHITE, b.lo - 1, b.hi, b.round)

    def describe(self):
        return {"name": "illegal"}


def test_combinator_single_item_is_identity():
    w1 = white_avoidance_strategy(B19, GM)
    w2 = white_avoidance_strategy(B19, GM)
    c = GameConfig(w1.alpha, mpq(1, 2), 30, B19, 0)
    t1 = play(w1, RandomBlack(4), c)
    t2 = play(intersect_strategies([(w2, w2.alpha)]), RandomBlack(4), c)
    assert [(m.lo, m.hi) for m in t1.moves] == [(m.lo, m.hi) for m in t2.moves]


def test_combinator_illegal_stub_raises():
    w = white_avoidance_strategy(B19, GM)
    comb = intersect_strategies([(w, w.alpha), (_Illegal(), mpq(1, 10))])
    with pytest.raises(IllegalMove):
        play(comb, RandomBlack(0), GameConfig(comb.alpha, mpq(1, 2), 6))


def test_combinator_projection_is_legal_game():
    w1 = white_avoidance_strategy(B19, GM)
    b2 = Beta("1.85")
    w2 = white_avoidance_strategy(b2, SftSpec(1, [(1, 1, 1)]))
    comb = intersect_strategies([(w1, w1.alpha), (w2, w2.alpha)])
    assert comb.alpha == min(w1.alpha, w2.alpha)
    c = GameConfig(comb.alpha, mpq(1, 2), 20, None, 0)
    t = play(comb, RandomBlack(0), c)
    g_eff = comb.effective_gamma(c)
    for i, (_, a_i) in enumerate(comb.items):
        seen = project_transcript(t, i, 2)
        sub = c.replace(alpha=a_i, gamma=g_eff)
        for j, m in enumerate(seen):
            if m.player == WHITE:
                assert validate_move(m, [seen[j - 1]], sub)
        for prev, nxt in zip(seen, seen[1:]):
            if prev.player == WHITE and nxt.player == BLACK:
                assert nxt.length >= g_eff * prev.length


def test_black_strategies_dict():
    cover = build_cover(GM, B19, 4)
    assert set(black_strategies(0)) == {"center", "random"}
    assert set(black_strategies(0, cover)) == {"center", "random", "adversarial"}


def test_find_sft_approximation():
    b = find_sft_approximation(B19)
    assert float(b) < 1.9 and float(b) > 1.89
    assert b.expansion_of_one().is_finite


def test_coarse_cover_can_miss_at_small_gamma():
    # with gamma = 1/2 this game leaves a 10-digit stretch without 11, so an
    # orbit point sits inside the generation-10 cover; a finer cover separates it
    cover = build_cover(GM, B19, 10)
    w = white_avoidance_strategy(B19, GM)
    t = play(w, RandomBlack(3), GameConfig(explicit_alpha(B19, 1, 1).c[0], mpq(1, 2), 200, B19, 3))
    coarse = verify_avoidance(t, B19, cover, 100)
    fine = verify_avoidance(t, B19, cover, 100, refine_generation=40)
    assert coarse["status"] == "FAIL" and coarse["worst_n"] == 60
    assert fine["status"] == "PASS" and fine["refined_points"] >= 1
