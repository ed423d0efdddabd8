"""Word frequencies along digit sequences, and points where they fail to converge."""
from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .beta_core import Beta, DigitStream, PeriodicStream, is_admissible, suffix_state
from .errors import NotConcatenable


@dataclass(frozen=True)
class FrequencyTrace:
    word: tuple
    prefix_lengths: tuple
    counts: tuple

    @property
    def ratios(self) -> tuple:
        return tuple(c / n if n else 0.0 for n, c in zip(self.prefix_lengths, self.counts))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count", "ratio"])
        for n, c, r in zip(self.prefix_lengths, self.counts, self.ratios):
            w.writerow([n, c, repr(r)])
        return buf.getvalue()

    def to_json(self):
        return {
            "word": list(self.word),
            "n": list(self.prefix_lengths),
            "count": list(self.counts),
            "ratio": [repr(r) for r in self.ratios],
        }


def _prefix_array(s, n: int) -> np.ndarray:
    if isinstance(s, BlockStream):
        return s.array(n)
    if isinstance(s, DigitStream):
        return np.fromiter(s.prefix(n), dtype=np.int64, count=n)
    arr = np.asarray(s, dtype=np.int64)
    if len(arr) < n:
        raise ValueError("sequence shorter than the largest checkpoint")
    return arr[:n]


def occurrence_starts(digits: np.ndarray, word: Sequence[int]) -> np.ndarray:
    """Boolean mask of start positions i with digits[i:i+m] == word."""
    m = len(word)
    if len(digits) < m:
        return np.zeros(0, dtype=bool)
    win = np.lib.stride_tricks.sliding_window_view(digits, m)
    return np.all(win == np.asarray(word, dtype=digits.dtype), axis=1)


def word_frequency_trace(s, word: Sequence[int], checkpoints: Sequence[int]) -> FrequencyTrace:
    """Overlapping occurrence counts of ``word`` inside the first n digits, per checkpoint.

    An occurrence starting at i counts for n when it fits, i.e. i + |word| <= n.
    """
    word = tuple(int(d) for d in word)
    if not word:
        raise ValueError("word must be non-empty")
    cps = sorted(int(n) for n in checkpoints)
    if not cps:
        return FrequencyTrace(word, (), ())
    digits = _prefix_array(s, cps[-1])
    cum = np.concatenate([[0], np.cumsum(occurrence_starts(digits, word), dtype=np.int64)])
    m = len(word)
    counts = tuple(int(cum[n - m + 1]) if n >= m else 0 for n in cps)
    return FrequencyTrace(word, tuple(cps), counts)


def naive_count(digits: Sequence[int], word: Sequence[int], n: int) -> int:
    """Quadratic reference count of occurrences inside digits[:n]."""
    m = len(word)
    return sum(1 for i in range(0, n - m + 1) if tuple(digits[i:i + m]) == tuple(word))


def divergence_gap(trace: FrequencyTrace):
    """(min, max) of the ratios over the last half of the checkpoints."""
    r = trace.ratios
    if len(r) < 2:
        return (r[0], r[0]) if r else (0.0, 0.0)
    tail = r[len(r) // 2:]
    if len(tail) < 2:
        return (tail[0], tail[0])
    return (min(tail), max(tail))


# -- divergent points -----------------------------------------------------------------

class BlockStream(DigitStream):
    """Alternating blocks u^(k_j) and 0^(z_j) with geometrically growing lengths."""

    def __init__(self, u: tuple, ratio, first: int):
        self.u = u
        self.ratio = ratio
        self.first = first
        self.boundaries = [0]
        self._kinds = []

    def _grow(self, n):
        b = self.boundaries
        while b[-1] <= n:
            j = len(self._kinds)
            length = self.first * float(self.ratio) ** j
            if j % 2 == 0:
                p = len(self.u)
                length = max(p, int(math.ceil(length / p)) * p)
            else:
                length = max(1, int(math.ceil(length)))
            self._kinds.append(j % 2 == 0)
            b.append(b[-1] + length)

    def digit(self, n):
        self._grow(n)
        j = bisect.bisect_right(self.boundaries, n) - 1
        if not self._kinds[j]:
            return 0
        return self.u[(n - self.boundaries[j]) % len(self.u)]

    def array(self, n: int) -> np.ndarray:
        self._grow(n)
        out = np.zeros(n, dtype=np.int64)
        u = np.asarray(self.u, dtype=np.int64)
        for j, is_u in enumerate(self._kinds):
            a, b = self.boundaries[j], min(self.boundaries[j + 1], n)
            if a >= n:
                break
            if is_u:
                out[a:b] = np.resize(u, b - a)
        return out

    def prefix(self, n):
        return tuple(int(v) for v in self.array(n))

    def block_ends(self, n: int) -> list:
        """Block boundaries in (0, n]."""
        self._grow(n)
        return [b for b in self.boundaries[1:] if b <= n]


def cyclic_density(u: Sequence[int], word: Sequence[int]) -> Fraction:
    """Occurrences of ``word`` per digit in u^inf."""
    u, m = tuple(u), len(word)
    reps = -(-(len(u) + m) // len(u)) + 1
    ext = u * reps
    hits = sum(1 for i in range(len(u)) if tuple(ext[i:i + m]) == tuple(word))
    return Fraction(hits, len(u))


def alternating_limits(rho, r):
    """(liminf, limsup) of block-boundary ratios: rho/(r+1) and rho*r/(r+1)."""
    rho, r = Fraction(rho), Fraction(r)
    return rho / (r + 1), rho * r / (r + 1)


def default_block(beta: Beta, word: Sequence[int]) -> tuple:
    """Shortest word0^j whose periodic repetition lies in S_beta."""
    word = tuple(word)
    for j in range(len(word) + 3):
        u = word + (0,) * j
        if any(u) and is_admissible(PeriodicStream((), u), beta):
            return u
    raise NotConcatenable(f"no repetition of {word} followed by zeros is admissible")


def construct_divergent_point(beta: Beta, word: Sequence[int], block_schedule, u: Optional[Sequence[int]] = None,
                              first: int = 8) -> BlockStream:
    """An S_beta sequence along which the frequency of ``word`` oscillates.

    Blocks u^k (u contains ``word`` and u^inf is admissible) alternate with
    blocks of zeros, the j-th block having length about first * r^j.  At the
    block ends the frequency approaches rho*r/(r+1) and rho/(r+1) in turn,
    rho being the density of ``word`` in u^inf.  Junctions are safe: zeros
    never raise a shift above d_-(1, beta), and cutting u^inf short only
    lowers it.
    """
    r = Fraction(block_schedule) if not isinstance(block_schedule, float) else Fraction(block_schedule).limit_denominator(10 ** 6)
    if r <= 1:
        raise ValueError("the block ratio must exceed 1")
    word = tuple(int(d) for d in word)
    if u is None:
        u = default_block(beta, word)
    else:
        u = tuple(int(d) for d in u)
        if not any(u) or not is_admissible(PeriodicStream((), u), beta):
            raise NotConcatenable(f"{u} repeated is not in S_beta")
    if cyclic_density(u, word) == 0:
        raise NotConcatenable(f"{word} does not occur in {u} repeated")
    if beta.expansion_of_one().digit(0) < 1:
        raise NotConcatenable("d(1, beta) must start with a nonzero digit")
    return BlockStream(u, r, first)


def certify_prefix(s: DigitStream, beta: Beta, n: int) -> bool:
    """Whether the first n digits of ``s`` form a word of S_beta."""
    return suffix_state(s.prefix(n), beta) is not None


def divergence_report(beta: Beta, word, r, n: int, u=None) -> dict:
    s = construct_divergent_point(beta, word, r, u)
    cps = s.block_ends(n) + ([n] if not s.block_ends(n) or s.block_ends(n)[-1] != n else [])
    trace = word_frequency_trace(s, word, cps)
    lo, hi = divergence_gap(trace)
    lim = alternating_limits(cyclic_density(s.u, word), s.ratio)
    return {
        "beta": beta.to_json(),
        "word": list(word),
        "block": list(s.u),
        "ratio": str(s.ratio),
        "n": n,
        "liminf_est": repr(lo),
        "limsup_est": repr(hi),
        "gap": repr(hi - lo),
        "closed_form": [str(lim[0]), str(lim[1])],
        "trace": trace.to_json(),
    }


def trace_to_json(trace: FrequencyTrace) -> str:
    return json.dumps(trace.to_json(), sort_keys=True)
