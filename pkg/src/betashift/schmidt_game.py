"""The (alpha, gamma) Schmidt game and a White strategy for orbit avoidance.

Black opens with B_0; then each round White picks W_k inside B_k with
|W_k| >= alpha |B_k| and Black picks B_{k+1} inside W_k with
|B_{k+1}| >= gamma |W_k|.  Endpoints are exact rationals.  A mover whose
ideal endpoint is irrational, or a rational with a huge denominator, rounds
it outward to a dyadic grid finer than the move by a factor 2**24 and then
clamps to the container, so every rule is checked with exact arithmetic.

White's avoidance strategy keeps forcing the point into cylinders whose
word ends in a long enough prefix of d(1, beta).  If Sigma_A forbids that
prefix, the orbit of the limit point keeps returning to cylinders that
Sigma_A does not meet, and centring W_k keeps it off their endpoints.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpq

from .beta_core import (
    Beta,
    CylinderInterval,
    PeriodicStream,
    _interval_orbit,
    beta_compare,
    compare,
    cylinder_interval,
    parry_check,
    root_cylinder,
    solve_beta_from_digits,
)
from .errors import (
    AmbiguousDigit,
    ComparisonUndecided,
    IllegalMove,
    NotAdmissible,
    NotFound,
    NotParryAdmissible,
    PrecisionExhausted,
)
from .numeric import DEFAULT_PREC, FieldElement, Interval, _ctx, decimal_down, exact_str, precision_limit, to_mpq
from .sft_cantor import CantorCover, SftSpec, distance_to_cover, refined_distance, sft_admissible

BLACK, WHITE = "black", "white"
SNAP_BITS = 24
MAX_EXACT_DEN_BITS = 64
K_BUDGET = 64
M_BUDGET = 64


# -- configuration and records ------------------------------------------------------

@dataclass(frozen=True)
class GameConfig:
    alpha: object
    gamma: object
    rounds: int
    beta_context: Optional[Beta] = None
    rng_seed: int = 0
    b0: tuple = (0, 1)

    def __post_init__(self):
        a, g = to_mpq(self.alpha), to_mpq(self.gamma)
        if not (0 < a < 1 and 0 < g < 1):
            raise ValueError("alpha and gamma must lie in (0, 1)")
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "b0", (to_mpq(self.b0[0]), to_mpq(self.b0[1])))

    def replace(self, **kw) -> "GameConfig":
        return dataclasses.replace(self, **kw)

    def to_json(self):
        return {
            "alpha": exact_str(self.alpha),
            "gamma": exact_str(self.gamma),
            "rounds": self.rounds,
            "beta": None if self.beta_context is None else self.beta_context.to_json(),
            "rng_seed": self.rng_seed,
            "b0": [exact_str(self.b0[0]), exact_str(self.b0[1])],
        }

    @classmethod
    def from_json(cls, obj) -> "GameConfig":
        beta = None if obj.get("beta") is None else Beta.from_json(obj["beta"])
        return cls(obj["alpha"], obj["gamma"], obj["rounds"], beta, obj.get("rng_seed", 0),
                   tuple(obj.get("b0", (0, 1))))


@dataclass(frozen=True)
class Move:
    player: str
    lo: object
    hi: object
    round: int
    annotation: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lo", to_mpq(self.lo))
        object.__setattr__(self, "hi", to_mpq(self.hi))

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def to_json(self):
        return {"player": self.player, "round": self.round, "interval": [exact_str(self.lo), exact_str(self.hi)],
                "annotation": self.annotation}

    @classmethod
    def from_json(cls, obj) -> "Move":
        return cls(obj["player"], obj["interval"][0], obj["interval"][1], obj["round"], obj.get("annotation", ""))


@dataclass
class GameTranscript:
    config: GameConfig
    moves: list
    final_point: Interval
    verdict: list = field(default_factory=list)
    strategies: dict = field(default_factory=dict)

    def white_moves(self):
        return [m for m in self.moves if m.player == WHITE]

    def black_moves(self):
        return [m for m in self.moves if m.player == BLACK]

    def to_json(self):
        return {
            "schema": "betashift.transcript/1",
            "config": self.config.to_json(),
            "strategies": self.strategies,
            "moves": [m.to_json() for m in self.moves],
            "final_point": [exact_str(to_mpq(self.final_point.lo)), exact_str(to_mpq(self.final_point.hi))],
            "verdict": self.verdict,
        }

    @classmethod
    def from_json(cls, obj) -> "GameTranscript":
        lo, hi = obj["final_point"]
        return cls(GameConfig.from_json(obj["config"]), [Move.from_json(m) for m in obj["moves"]],
                   Interval(to_mpq(lo), to_mpq(hi)), obj.get("verdict", []), obj.get("strategies", {}))

    def digest(self, include_verdict: bool = True) -> str:
        obj = self.to_json()
        if not include_verdict:
            obj.pop("verdict")
        return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# -- legality -------------------------------------------------------------------------

def check_move(m: Move, history: Sequence[Move], config: GameConfig):
    """(ok, reason) for move ``m`` following ``history``."""
    if not m.lo < m.hi:
        return False, "degenerate"
    if not history:
        if m.player != BLACK or m.round != 0:
            return False, "order"
        if m.lo < 0 or m.hi > 1:
            return False, "not_contained"
        return True, ""
    prev = history[-1]
    expected = WHITE if prev.player == BLACK else BLACK
    expected_round = prev.round if expected == WHITE else prev.round + 1
    if m.player != expected or m.round != expected_round:
        return False, "order"
    if m.lo < prev.lo or m.hi > prev.hi:
        return False, "not_contained"
    ratio = config.alpha if m.player == WHITE else config.gamma
    if m.length < ratio * prev.length:
        return False, "ratio"
    return True, ""


def validate_move(m: Move, history: Sequence[Move], config: GameConfig, raise_on_fail: bool = False) -> bool:
    """Containment and length-ratio check, exact.

    With ``raise_on_fail`` an illegal move raises :class:`IllegalMove`
    carrying the reason code ("order", "degenerate", "not_contained",
    "ratio").
    """
    ok, reason = check_move(m, history, config)
    if not ok and raise_on_fail:
        raise IllegalMove(reason, m)
    return ok


def replay(transcript: GameTranscript):
    """Re-validate every move; returns (ok, reason, index of first bad move)."""
    moves = transcript.moves
    for i, m in enumerate(moves):
        ok, reason = check_move(m, moves[:i], transcript.config)
        if not ok:
            return False, reason, i
    last = moves[-1] if moves else None
    if last is None or last.player != BLACK or transcript.final_point != last.interval:
        return False, "final_point", len(moves)
    if last.round != transcript.config.rounds:
        return False, "rounds", len(moves)
    return True, "", None


# -- placing intervals ------------------------------------------------------------------

def _is_small_rational(x):
    return not isinstance(x, FieldElement) and to_mpq(x).denominator.bit_length() <= MAX_EXACT_DEN_BITS


def _grid_bits(length) -> int:
    q = to_mpq(length)
    return max(0, q.denominator.bit_length() - q.numerator.bit_length()) + SNAP_BITS


def _floor_to(x, q: int):
    if isinstance(x, FieldElement):
        if x.field.rational:
            x = x.c[0]
        else:
            return mpq((x * (1 << q)).floor(), 1 << q)
    x = to_mpq(x)
    return mpq(gmpy2.f_div(x.numerator << q, x.denominator), 1 << q)


def _ceil_to(x, q: int):
    return -_floor_to(-x, q)


def place_interval(lo_t, hi_t, container: tuple, length):
    """Exact rational interval containing [lo_t, hi_t], clamped into ``container``.

    Small rationals are used as they are; anything else is rounded outward
    to the grid 2**-q with 2**-q <= length * 2**-24.
    """
    q = _grid_bits(length)
    lo = to_mpq(lo_t) if _is_small_rational(lo_t) else _floor_to(lo_t, q)
    hi = to_mpq(hi_t) if _is_small_rational(hi_t) else _ceil_to(hi_t, q)
    c_lo, c_hi = container
    return max(lo, c_lo), min(hi, c_hi)


# -- strategies ----------------------------------------------------------------------------

class Strategy:
    """A player: ``reply(history, config)`` returns the next Move."""

    name = "strategy"

    def reset(self, config: GameConfig):
        pass

    def opening(self, config: GameConfig) -> Move:
        lo, hi = config.b0
        return Move(BLACK, lo, hi, 0, "opening")

    def reply(self, history: Sequence[Move], config: GameConfig) -> Move:
        raise NotImplementedError

    def describe(self):
        return {"name": self.name}


class CenterStrategy(Strategy):
    """Reply with the middle subinterval of the minimal legal length."""

    def __init__(self, player: str):
        self.player = player
        self.name = f"center-{player}"

    def reply(self, history, config):
        prev = history[-1]
        ratio = config.alpha if self.player == WHITE else config.gamma
        length = ratio * prev.length
        mid = (prev.lo + prev.hi) / 2
        lo, hi = place_interval(mid - length / 2, mid + length / 2, (prev.lo, prev.hi), length)
        rnd = prev.round if self.player == WHITE else prev.round + 1
        return Move(self.player, lo, hi, rnd, "center")


class RandomBlack(Strategy):
    """B_{k+1} of length gamma |W_k| at a uniformly random position (seeded)."""

    def __init__(self, seed: int):
        self.seed = seed
        self.name = "random"
        self._rng = np.random.default_rng(seed)

    def reset(self, config):
        self._rng = np.random.default_rng(self.seed)

    def reply(self, history, config):
        w = history[-1]
        length = config.gamma * w.length
        t = to_mpq(float(self._rng.random()))
        lo_t = w.lo + t * (w.length - length)
        lo, hi = place_interval(lo_t, lo_t + length, (w.lo, w.hi), length)
        return Move(BLACK, lo, hi, w.round + 1, "random")

    def describe(self):
        return {"name": self.name, "seed": self.seed}


class AdversarialBlack(Strategy):
    """Move the centre of B_{k+1} as close to the cover as the rules allow (leftmost on ties)."""

    def __init__(self, cover: CantorCover):
        self.cover = cover
        self.name = "adversarial"
        self._bounds = [(to_mpq(b.lo), to_mpq(b.hi)) for b in cover.bounds]

    def reply(self, history, config):
        w = history[-1]
        length = config.gamma * w.length
        c_lo, c_hi = w.lo + length / 2, w.hi - length / 2
        best, best_d = None, None
        for lo, hi in self._bounds:
            if hi < c_lo:
                cand, d = c_lo, c_lo - hi
            elif lo > c_hi:
                cand, d = c_hi, lo - c_hi
            else:
                cand, d = max(lo, c_lo), mpq(0)
            if best_d is None or d < best_d:
                best, best_d = cand, d
            if lo > c_hi:
                break
        c = best if best is not None else (c_lo + c_hi) / 2
        lo, hi = place_interval(c - length / 2, c + length / 2, (w.lo, w.hi), length)
        return Move(BLACK, lo, hi, w.round + 1, f"adversarial dist={decimal_down(best_d or 0, 6)}")


def black_strategies(seed: int = 0, cover: Optional[CantorCover] = None) -> dict:
    out = {"center": CenterStrategy(BLACK), "random": RandomBlack(seed)}
    if cover is not None:
        out["adversarial"] = AdversarialBlack(cover)
    return out


# -- constants from d(1, beta) ------------------------------------------------------------------

def choose_M(beta: Beta, sft: SftSpec, max_depth: int = M_BUDGET) -> int:
    """Smallest M such that d(1, beta)_0 ... d(1, beta)_M is forbidden in Sigma_A."""
    d = beta.expansion_of_one()
    for M in range(max_depth):
        if not sft_admissible(d.prefix(M + 1), sft):
            return M
    raise NotFound(f"no prefix of d(1, beta) up to length {max_depth} is forbidden in Sigma_A")


def choose_k(beta: Beta, M: int, max_k: int = K_BUDGET) -> int:
    """Smallest k >= 0 with (d_0 ... d_M) 0^k 1 below d(1, beta).

    The word is compared with the prefix of d(1, beta) of the same length and
    must be strictly smaller there, so it is a word of S_beta that leaves
    the d(1, beta)-prefix before its last digit.
    """
    d = beta.expansion_of_one()
    head = d.prefix(M + 1)
    for k in range(max_k + 1):
        w = head + (0,) * k + (1,)
        if w < d.prefix(len(w)):
            return k
    raise NotFound(f"(d_0..d_M) 0^k 1 is never below d(1, beta) for k <= {max_k}")


def epsilon(beta: Beta, M: int, k: int) -> FieldElement:
    """beta^-(M+k+1) / 2: the overlap fraction guaranteed by cylinder_in_interval."""
    return beta.inv_pow(M + k + 1) * mpq(1, 2)


def explicit_alpha(beta: Beta, M: int, k: int, composite: bool = False) -> FieldElement:
    """beta^-(M+k+1) / 4, or / 16 for the composite game."""
    return beta.inv_pow(M + k + 1) * mpq(1, 16 if composite else 4)


def rational_below(x, bits: int = 64):
    """A rational in (x (1 - 2**-bits), x], equal to x when x is rational."""
    if isinstance(x, FieldElement):
        if x.field.rational:
            return x.c[0]
        lo = x.bounds(max(DEFAULT_PREC, bits + 64)).lo
        return to_mpq(_ctx(bits, False).add(0, lo))
    return to_mpq(x)


# -- cylinder search ------------------------------------------------------------------------------

def _fmax(x, y):
    return x if (x - y).sign() >= 0 else y


def _fmin(x, y):
    return x if (x - y).sign() <= 0 else y


def _overlap(cyl: CylinderInterval, a, b):
    lo = _fmax(cyl.left_exact, a)
    hi = _fmin(cyl.right_exact, b)
    d = hi - lo
    return d if d.sign() > 0 else cyl.beta.field.zero


def _inside(cyl: CylinderInterval, a, b) -> bool:
    return (cyl.left_exact - a).sign() >= 0 and (b - cyl.right_exact).sign() >= 0


def _covers(cyl: CylinderInterval, a, b) -> bool:
    return (a - cyl.left_exact).sign() >= 0 and (cyl.right_exact - b).sign() >= 0


def _extend(cyl: CylinderInterval, digits):
    for c in digits:
        cyl = cyl.child(c)
    return cyl


def cylinder_in_interval(I, beta: Beta, M: int, *, k: Optional[int] = None, start: Optional[CylinderInterval] = None,
                         info: Optional[dict] = None, depth_slack: int = 64) -> CylinderInterval:
    """A cylinder C whose word ends in d(1,beta)_0..d(1,beta)_m with m >= M and |C n I| > eps |I|.

    eps = beta^-(M+k+1)/2.  The search follows the proof of the covering
    lemma: descend to the first generation with a cylinder inside I, take
    the parent covering at least half of I (the left one on ties), and
    return it if its suffix already matches; otherwise append the missing
    digits of d(1, beta).  Should that cylinder fall outside I, the
    descendants of both parents are searched a few generations deep for the
    matching cylinder with the largest overlap, and failing that the longest
    matching ancestor of the parent is used.  ``info`` receives the path
    taken ("parent", "lemma", "search" or "ancestor") and the match length.
    """
    a, b = (I.lo, I.hi) if isinstance(I, Interval) else I
    fa, fb = beta.exact(a), beta.exact(b)
    width = fb - fa
    if width.sign() <= 0 or fa.sign() < 0 or (fb - 1).sign() > 0:
        raise ValueError("I must be a non-degenerate subinterval of [0, 1]")
    if k is None:
        k = choose_k(beta, M)
    eps = epsilon(beta, M, k)
    need = eps * width
    if start is None or not _covers(start, fa, fb):
        start = root_cylinder(beta)
    lw = to_mpq(I.hi - I.lo) if isinstance(I, Interval) else to_mpq(b) - to_mpq(a)
    if isinstance(lw, type(mpq())) and lw > 0:
        bits = lw.denominator.bit_length() - lw.numerator.bit_length() + 1
    else:
        bits = 64
    budget = start.generation + int(bits / math.log2(float(beta))) + depth_slack

    active = [start]
    while True:
        children = [ch for p in active for ch in p.children() if _overlap(ch, fa, fb).sign() > 0]
        if any(_inside(ch, fa, fb) for ch in children):
            break
        active = children
        if not active or active[0].generation > budget:
            raise PrecisionExhausted("no cylinder inside I within the generation budget")
    parents = active
    if len(parents) > 2:
        raise AssertionError("more than two generation-n cylinders meet I without one inside it")
    half = width * mpq(1, 2)
    parent = parents[0] if (len(parents) == 1 or (_overlap(parents[0], fa, fb) - half).sign() >= 0) else parents[1]

    matcher = beta.d_matcher
    state = matcher.run(parent.word)
    if state - 1 >= M:
        _note(info, "parent", state - 1, parent)
        return parent
    d = beta.expansion_of_one()
    try:
        cand = _extend(parent, d.prefix(M + 1)[state:])
    except NotAdmissible:
        cand = None
    if cand is not None and (_overlap(cand, fa, fb) - need).sign() > 0:
        _note(info, "lemma", matcher.run(cand.word[len(parent.word):], state) - 1, cand)
        return cand

    best, best_ov, best_m = None, None, -1
    frontier = [(p, matcher.run(p.word)) for p in parents]
    for _ in range(M + k + 3):
        nxt = []
        for node, st in frontier:
            for ch in node.children():
                ov = _overlap(ch, fa, fb)
                # descendants overlap I no more than their ancestor does
                if ov.sign() <= 0 or (best_ov is not None and (ov - best_ov).sign() <= 0):
                    continue
                s2 = matcher.step(st, ch.word[-1])
                if s2 - 1 >= M:
                    best, best_ov, best_m = ch, ov, s2 - 1
                else:
                    nxt.append((ch, s2))
        frontier = nxt
    if best is not None and (best_ov - need).sign() > 0:
        _note(info, "search", best_m, best)
        return best
    # an ancestor of the parent covers at least as much of I as the parent does
    for j in range(len(parent.word) - 1, 0, -1):
        m = matcher.run(parent.word[:j]) - 1
        if m >= M:
            anc = cylinder_interval(parent.word[:j], beta)
            _note(info, "ancestor", m, anc)
            return anc
    raise NotFound("no matching cylinder with enough overlap near I")


def _note(info, path, match, cyl):
    if info is not None:
        info.update(path=path, match=match, generation=cyl.generation)


# -- White ------------------------------------------------------------------------------------

class WhiteAvoidance(Strategy):
    """Place W_k in the middle of C n B_k, C from :func:`cylinder_in_interval`."""

    def __init__(self, beta: Beta, sft: SftSpec, M: Optional[int] = None, k: Optional[int] = None):
        self.beta = beta
        self.sft = sft
        self.M = choose_M(beta, sft) if M is None else M
        self.k = choose_k(beta, self.M) if k is None else k
        self.eps = epsilon(beta, self.M, self.k)
        self.name = "white-avoidance"
        self.cylinders: list[CylinderInterval] = []
        self._last = None

    @property
    def alpha(self):
        """Largest rational alpha not above eps/2."""
        return rational_below(self.eps * mpq(1, 2))

    def reset(self, config):
        self.cylinders = []
        self._last = None

    def reply(self, history, config):
        bk = history[-1]
        info = {}
        cyl = cylinder_in_interval((bk.lo, bk.hi), self.beta, self.M, k=self.k, start=self._last, info=info)
        self._last = cyl
        self.cylinders.append(cyl)
        f = self.beta.field
        j_lo = _fmax(cyl.left_exact, f.scalar(bk.lo))
        j_hi = _fmin(cyl.right_exact, f.scalar(bk.hi))
        length = config.alpha * bk.length
        mid = (j_lo + j_hi) * mpq(1, 2)
        lo, hi = place_interval(_simplify(mid - length / 2), _simplify(mid + length / 2), (bk.lo, bk.hi), length)
        note = f"word={''.join(map(str, cyl.word))} match={info['match']} path={info['path']}"
        move = Move(WHITE, lo, hi, bk.round, note)
        if (f.scalar(lo) - j_lo).sign() < 0 or (j_hi - hi).sign() < 0:
            raise IllegalMove("strategy_failure", move, "W does not fit inside the chosen cylinder")
        return move

    def describe(self):
        return {"name": self.name, "beta": self.beta.to_json(), "sft": self.sft.to_json(), "M": self.M, "k": self.k}


def _simplify(x):
    if isinstance(x, FieldElement) and x.field.rational:
        return x.c[0]
    return x


def white_avoidance_strategy(beta: Beta, sft: SftSpec, M: Optional[int] = None) -> WhiteAvoidance:
    return WhiteAvoidance(beta, sft, M)


class CombinedWhite(Strategy):
    """Round-robin White: sub-strategy i answers the rounds k = i (mod N).

    Everything between two turns of strategy i (other White moves and Black
    moves) is one Black move in its own game, with ratio
    gamma (alpha gamma)^(N-1).  Each reply is checked against strategy i's
    own alpha before it is played.
    """

    def __init__(self, items):
        self.items = [(s, to_mpq(a) if not isinstance(a, FieldElement) else rational_below(a)) for s, a in items]
        if not self.items:
            raise ValueError("need at least one strategy")
        self.alpha = min(a for _, a in self.items)
        self.name = "combined"

    def reset(self, config):
        for s, _ in self.items:
            s.reset(config)

    def effective_gamma(self, config):
        n = len(self.items)
        return config.gamma * (self.alpha * config.gamma) ** (n - 1)

    def reply(self, history, config):
        bk = history[-1]
        i = bk.round % len(self.items)
        strat, alpha_i = self.items[i]
        sub = config.replace(alpha=alpha_i, gamma=self.effective_gamma(config))
        move = strat.reply(history, sub)
        ok, reason = check_move(move, history, sub)
        if not ok:
            raise IllegalMove(reason, move, f"sub-strategy {i}")
        return Move(move.player, move.lo, move.hi, move.round, f"[{i}] {move.annotation}")

    def describe(self):
        return {"name": self.name, "parts": [dict(s.describe(), alpha=exact_str(a)) for s, a in self.items]}


def intersect_strategies(items) -> CombinedWhite:
    """Combine White strategies for several targets; alpha is the least of theirs."""
    return CombinedWhite(items)


def project_transcript(t: GameTranscript, i: int, n: int):
    """Moves strategy i of an n-way combination sees: its own W's and the effective B's."""
    out = []
    for m in t.moves:
        if m.player == BLACK and m.round % n == i:
            out.append(Move(BLACK, m.lo, m.hi, m.round // n, m.annotation))
        elif m.player == WHITE and m.round % n == i:
            out.append(Move(WHITE, m.lo, m.hi, m.round // n, m.annotation))
    return out


# -- playing ----------------------------------------------------------------------------------

def _precision_for(config: GameConfig) -> int:
    # endpoints shrink by alpha*gamma per round; comparisons with cylinder
    # endpoints need about that many bits, plus headroom
    per_round = math.log2(1 / float(config.alpha * config.gamma))
    return max(1024, 1 << math.ceil(math.log2(per_round * (config.rounds + 2) + 256)))


def play(white: Strategy, black: Strategy, config: GameConfig) -> GameTranscript:
    """Run ``config.rounds`` rounds; the final point is enclosed by B_rounds.

    Every move is validated as it is made; an illegal one raises
    :class:`IllegalMove` with the move attached.
    """
    white.reset(config)
    black.reset(config)
    moves = []
    with precision_limit(_precision_for(config)):
        b = black.opening(config)
        validate_move(b, moves, config, raise_on_fail=True)
        moves.append(b)
        for _ in range(config.rounds):
            w = white.reply(moves, config)
            validate_move(w, moves, config, raise_on_fail=True)
            moves.append(w)
            b = black.reply(moves, config)
            validate_move(b, moves, config, raise_on_fail=True)
            moves.append(b)
    last = moves[-1]
    return GameTranscript(config, moves, last.interval, [],
                          {"white": white.describe(), "black": black.describe()})


# -- verification ---------------------------------------------------------------------------------

def verify_avoidance(t: GameTranscript, beta: Beta, cover: CantorCover, orbit_len: int,
                     subtract_slack: bool = False, refine_generation: Optional[int] = None) -> dict:
    """Certified distances from f^n(y), n = 1..orbit_len, to the cover.

    y is the final point of the transcript.  The margin is the least
    certified lower bound over those n; the verdict is PASS when it is
    positive.  Because pi(Sigma_A) lies inside the cover, a positive margin
    bounds the distance to pi(Sigma_A) from below as well.  The margin minus
    the cover slack (largest cylinder length) is reported too, and becomes
    the deciding number with ``subtract_slack``.  For orbit_len = 0 the
    verdict is PASS vacuously and the margin is the distance of y itself.

    With ``refine_generation``, orbit points whose bound against the cover
    is zero are re-measured against the Sigma_A cylinders of that deeper
    generation near them (still a superset of pi(Sigma_A)).
    """
    fp = t.final_point
    with precision_limit(max(1024, 4 * to_mpq(fp.hi - fp.lo).denominator.bit_length())):
        try:
            _, pts = _interval_orbit(Interval(to_mpq(fp.lo), to_mpq(fp.hi)), beta, orbit_len)
        except AmbiguousDigit as exc:
            raise AmbiguousDigit(f"final point too wide for {orbit_len} orbit steps: {exc}") from None
        encl = [Interval(a.bounds().lo, b.bounds().hi) for a, b in pts]
    dists = [distance_to_cover(e, cover) for e in encl]
    refined = 0
    if refine_generation is not None and refine_generation > cover.generation:
        for n, e in enumerate(encl):
            if dists[n].lo <= 0:
                lo = refined_distance(e, cover, refine_generation)
                dists[n] = Interval(lo, max(lo, dists[n].hi))
                refined += 1
    slack = cover.slack_bounds.hi
    dn = _ctx(DEFAULT_PREC, False)
    if orbit_len == 0:
        worst_n, margin = 0, dists[0].lo
    else:
        worst_n = min(range(1, orbit_len + 1), key=lambda n: dists[n].lo)
        margin = dists[worst_n].lo
    decisive = dn.sub(margin, slack) if subtract_slack else margin
    status = "PASS" if orbit_len == 0 or decisive > 0 else "FAIL"
    return {
        "status": status,
        "margin": decimal_down(margin, 12),
        "margin_minus_slack": decimal_down(dn.sub(margin, slack), 12),
        "slack": decimal_down(slack, 12) if slack else "0",
        "worst_n": worst_n,
        "orbit_len": orbit_len,
        "generation": cover.generation,
        "point_distance": decimal_down(dists[0].lo, 12),
        "subtract_slack": subtract_slack,
        "refine_generation": refine_generation,
        "refined_points": refined,
    }


# -- finite-type approximation --------------------------------------------------------------------

def find_sft_approximation(beta: Beta, max_len: int = 32) -> Beta:
    """A base beta' < beta whose d(1, beta') is finite, close to beta.

    Truncates d(1, beta) at decreasing lengths; when the truncation fails
    Parry's criterion the last nonzero digit is lowered until it passes.
    """
    d = beta.expansion_of_one()
    for n in range(max_len, 0, -1):
        w = list(d.prefix(n))
        while any(w) and not parry_check(tuple(w)):
            i = max(j for j, c in enumerate(w) if c)
            w[i] -= 1
            while w and w[-1] == 0:
                w.pop()
        if not any(w) or tuple(w) == (1,):
            continue
        try:
            cand = solve_beta_from_digits(tuple(w))
        except NotParryAdmissible:
            continue
        if beta_compare(cand, beta) < 0:
            return cand
    raise NotFound("no finite-type base below beta found")
