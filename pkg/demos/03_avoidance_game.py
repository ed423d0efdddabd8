"""A Schmidt game in which White keeps the orbit of the limit point away from
the golden-mean subshift, checked against a generation-10 cover.

Run: python demos/03_avoidance_game.py
"""
from gmpy2 import mpq

from betashift import Beta, SftSpec, build_cover
from betashift.schmidt_game import (
    WHITE,
    CenterStrategy,
    GameConfig,
    RandomBlack,
    black_strategies,
    choose_k,
    choose_M,
    explicit_alpha,
    play,
    replay,
    verify_avoidance,
    white_avoidance_strategy,
)

b = Beta("1.9")
sft = SftSpec(1, [(1, 1)])
M = choose_M(b, sft)
k = choose_k(b, M)
alpha = explicit_alpha(b, M, k).c[0]
print(f"M = {M}, k = {k}, alpha = {alpha} ~ {float(alpha):.5f}")

cover = build_cover(sft, b, 10)
for name in ("center", "random", "adversarial"):
    white = white_avoidance_strategy(b, sft)
    black = black_strategies(0, cover)[name]
    t = play(white, black, GameConfig(alpha, mpq(3, 4), 200, b, 0))
    v = verify_avoidance(t, b, cover, 100)
    print(f"black={name:<11} legal={replay(t)[0]}  {v['status']}  margin={v['margin']}  worst n={v['worst_n']}")
    print("   first White moves:", "; ".join(m.annotation for m in t.white_moves()[:3]))

# a White that ignores the subshift usually lands on a point whose orbit comes close to it
t = play(CenterStrategy(WHITE), RandomBlack(3), GameConfig(mpq(1, 4), mpq(1, 2), 80))
print("\ncenter White:", verify_avoidance(t, b, cover, 60)["status"])
