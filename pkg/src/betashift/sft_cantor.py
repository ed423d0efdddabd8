"""Subshifts of finite type inside a beta-shift and covers of their projections."""
from __future__ import annotations

import bisect
from typing import Iterable, Sequence

from .beta_core import Beta, CylinderInterval, root_cylinder, suffix_state
from .errors import CoverTooLarge, NotFound
from .numeric import DEFAULT_PREC, FieldElement, Interval, _ctx, decimal_down, decimal_up, to_mpq

COVER_CAP = 10 ** 6


class SftSpec:
    """Shift space on {0..alphabet_max} defined by a finite list of forbidden words.

    Words containing another forbidden word are dropped, so equal shifts given
    by redundant lists compare equal.
    """

    def __init__(self, alphabet_max: int, forbidden: Iterable[Sequence[int]] = ()):
        self.alphabet_max = int(alphabet_max)
        words = sorted({tuple(int(d) for d in w) for w in forbidden}, key=lambda w: (len(w), w))
        if any(not w for w in words):
            raise ValueError("the empty word cannot be forbidden")
        kept = []
        for w in words:
            if not any(_occurs(f, w) for f in kept):
                kept.append(w)
        self.forbidden = tuple(kept)
        self._set = frozenset(kept)
        self._lengths = sorted({len(w) for w in kept})
        self.memory = max(self._lengths, default=0)

    def __eq__(self, other):
        return isinstance(other, SftSpec) and (self.alphabet_max, self.forbidden) == (other.alphabet_max, other.forbidden)

    def __hash__(self):
        return hash((self.alphabet_max, self.forbidden))

    def __repr__(self):
        return f"SftSpec({self.alphabet_max}, {[list(w) for w in self.forbidden]})"

    def ends_forbidden(self, word: Sequence[int]) -> bool:
        """Whether some forbidden word is a suffix of ``word``."""
        n = len(word)
        return any(L <= n and tuple(word[n - L:]) in self._set for L in self._lengths)

    def to_json(self):
        return {"alphabet_max": self.alphabet_max, "forbidden": [list(w) for w in self.forbidden]}

    @classmethod
    def from_json(cls, obj) -> "SftSpec":
        return cls(obj["alphabet_max"], obj.get("forbidden", ()))


def _occurs(f, w):
    L = len(f)
    return any(tuple(w[i:i + L]) == f for i in range(len(w) - L + 1))


def sft_admissible(w: Sequence[int], sft: SftSpec) -> bool:
    """True iff no forbidden word occurs in ``w``."""
    w = tuple(w)
    return not any(_occurs(f, w) for f in sft.forbidden)


def contained_in_shift(sft: SftSpec, beta: Beta, depth: int) -> bool:
    """Whether every Sigma_A word of length <= depth is in the language of S_beta.

    Runs a breadth-first search on the product of the SFT context (last
    memory-1 digits) and the beta-shift suffix state, so the cost is
    polynomial in ``depth``.
    """
    dm = beta.quasi_greedy()
    keep = max(sft.memory - 1, 0)
    layer = {((), 0)}
    for _ in range(depth):
        nxt = set()
        for ctx, state in layer:
            top = dm.digit(state)
            for c in range(sft.alphabet_max + 1):
                w = ctx + (c,)
                if sft.ends_forbidden(w):
                    continue
                if c > top:
                    return False
                nxt.add((w[len(w) - keep:] if keep else (), state + 1 if c == top else 0))
        layer = nxt
    return True


def witness_excluded_word(sft: SftSpec, beta: Beta, max_len: int) -> tuple:
    """A shortest word of S_beta that Sigma_A forbids.

    Any such word contains a forbidden word, and factors of S_beta words are
    S_beta words, so the shortest witness is itself a forbidden word.
    Lexicographically smallest among the shortest.
    """
    for w in sft.forbidden:
        if len(w) <= max_len and suffix_state(w, beta) is not None:
            return w
    raise NotFound(f"every S_beta word of length <= {max_len} is allowed in Sigma_A")


class CantorCover:
    """Generation-g cylinders covering pi_beta(Sigma_A), in increasing order.

    ``bounds`` holds outward enclosures of the closed cylinders, ``slack`` the
    largest cylinder length (exact when built from cylinders).
    """

    def __init__(self, beta, sft, generation, intervals, bounds=None, slack=None):
        self.beta = beta
        self.sft = sft
        self.generation = generation
        self.intervals: list[CylinderInterval] = list(intervals)
        if bounds is None:
            bounds = [c.bounds() for c in self.intervals]
        self.bounds: list[Interval] = list(bounds)
        if slack is None:
            lengths = [c.length_exact for c in self.intervals]
            slack = max(lengths, key=lambda v: v.bounds().hi) if lengths else 0
        self.slack = slack
        self._lo = [b.lo for b in self.bounds]

    @classmethod
    def from_bounds(cls, pairs) -> "CantorCover":
        """A cover given directly by closed intervals (sorted, disjoint)."""
        bounds = sorted((p if isinstance(p, Interval) else Interval(to_mpq(p[0]), to_mpq(p[1])) for p in pairs),
                        key=lambda b: b.lo)
        slack = max((to_mpq(b.hi) - to_mpq(b.lo) for b in bounds), default=0)
        return cls(None, None, None, (), bounds, slack)

    def __len__(self):
        return len(self.bounds)

    @property
    def slack_bounds(self) -> Interval:
        if isinstance(self.slack, FieldElement):
            return self.slack.bounds()
        return Interval.exact(self.slack)

    def total_length(self) -> Interval:
        if self.intervals:
            total = self.beta.field.zero
            for c in self.intervals:
                total = total + c.length_exact
            return total.bounds()
        dn, upc = _ctx(DEFAULT_PREC, False), _ctx(DEFAULT_PREC, True)
        lo = hi = 0
        for b in self.bounds:
            lo = dn.add(lo, dn.sub(b.hi, b.lo))
            hi = upc.add(hi, upc.sub(b.hi, b.lo))
        return Interval(lo, hi)

    def to_json(self, digits: int = 30):
        out = {"intervals": [[decimal_down(b.lo, digits), decimal_up(b.hi, digits)] for b in self.bounds]}
        if self.intervals:
            out = {
                "beta": self.beta.to_json(),
                "sft": self.sft.to_json(),
                "generation": self.generation,
                "words": ["".join(map(str, c.word)) for c in self.intervals],
                "slack": decimal_up(self.slack_bounds.hi, digits),
                **out,
            }
        return out


def build_cover(sft: SftSpec, beta: Beta, g: int, cap: int = COVER_CAP) -> CantorCover:
    """All words of length g admissible in both Sigma_A and S_beta, as cylinders.

    Depth-first, digits in increasing order, so cylinders come out sorted.
    """
    out = []
    stack = [root_cylinder(beta)]
    amax = min(sft.alphabet_max, beta.alphabet_max)
    dm = beta.quasi_greedy()
    while stack:
        cyl = stack.pop()
        if cyl.generation == g:
            out.append(cyl)
            if len(out) > cap:
                raise CoverTooLarge(f"more than {cap} words at generation {g}")
            continue
        top = min(dm.digit(cyl.state), amax)
        for c in range(top, -1, -1):
            if not sft.ends_forbidden(cyl.word + (c,)):
                stack.append(cyl.child(c))
    return CantorCover(beta, sft, g, out)


def distance_to_cover(x, cover: CantorCover) -> Interval:
    """Enclosure of dist(x, union of closed cover intervals).

    ``x`` is an exact number or an :class:`Interval` holding the point.  Both
    ends hold for every point of that interval, so the distance of the
    enclosed point lies in the result.
    """
    if isinstance(x, FieldElement):
        x = x.bounds()
    elif not isinstance(x, Interval):
        x = Interval.exact(x)
    if not cover.bounds:
        raise ValueError("distance to an empty cover is undefined")
    dn, upc = _ctx(DEFAULT_PREC, False), _ctx(DEFAULT_PREC, True)
    i = bisect.bisect_right(cover._lo, x.hi)
    j = bisect.bisect_left(cover._lo, x.lo)
    cand = range(max(0, min(i, j) - 2), min(len(cover.bounds), max(i, j) + 2))
    lo_best = hi_best = None
    for k in cand:
        b = cover.bounds[k]
        lo = max(0, dn.sub(b.lo, x.hi), dn.sub(x.lo, b.hi))
        hi = max(0, upc.sub(b.lo, x.lo), upc.sub(x.hi, b.hi))
        lo_best = lo if lo_best is None else min(lo_best, lo)
        hi_best = hi if hi_best is None else min(hi_best, hi)
    return Interval(lo_best, max(hi_best, lo_best))


def _interval_gap(x: Interval, b: Interval):
    dn = _ctx(DEFAULT_PREC, False)
    return max(0, dn.sub(b.lo, x.hi), dn.sub(x.lo, b.hi))


def refined_distance(x, cover: CantorCover, generation: int, max_nodes: int = 200000):
    """Certified lower bound on dist(x, union of Sigma_A cylinders of a deeper generation).

    Best-first descent from the cover's cylinders: the cylinder nearest to
    ``x`` is split into its Sigma_A-children until the nearest one has the
    target generation.  Descendants lie inside their ancestor, so a
    cylinder's distance bounds all of theirs from below and the first
    target-generation cylinder popped gives the minimum.
    """
    import heapq

    if not cover.intervals:
        raise ValueError("refinement needs a cover built from cylinders")
    if isinstance(x, FieldElement):
        x = x.bounds()
    elif not isinstance(x, Interval):
        x = Interval.exact(x)
    sft, dm = cover.sft, cover.beta.quasi_greedy()
    amax = min(sft.alphabet_max, cover.beta.alphabet_max)
    heap = []
    for i, c in enumerate(cover.intervals):
        heapq.heappush(heap, (_interval_gap(x, cover.bounds[i]), i, c))
    tick = len(heap)
    while heap:
        d, _, c = heapq.heappop(heap)
        if c.generation >= generation:
            return d
        tick += 1
        if tick > max_nodes:
            return d
        for digit in range(min(dm.digit(c.state), amax) + 1):
            if sft.ends_forbidden(c.word + (digit,)):
                continue
            ch = c.child(digit)
            heapq.heappush(heap, (max(d, _interval_gap(x, ch.bounds())), tick, ch))
            tick += 1
    return 0
