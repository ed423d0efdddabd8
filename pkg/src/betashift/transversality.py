"""Empirical checks of transversality for power series with bounded coefficients.

For a pair of beta-shift sequences a, b the series
g(x) = 1 + sum_{k>=1} (a_k - b_k) x^k is expected to satisfy, for some
delta > 0, that |g(x)| < delta forces g'(x) < -delta on [0, 1/beta].  The same
is expected for free {-1, 0, 1} coefficients on [0, x0] when x0 is below
roughly 0.649.  Nothing here proves that; :func:`scan` estimates the best
delta on samples and :func:`falsify` hunts for violations.  Both report
certified enclosures for anything they flag.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from gmpy2 import mpq

from .beta_core import Beta, DigitStream, PeriodicStream, as_stream
from .numeric import DEFAULT_PREC, Interval, _ctx, to_mpq

DEFAULT_TRUNCATION = 200
DEFAULT_DELTA0 = mpq(1, 1000)
FREE_X0 = mpq(649, 1000)
_CHUNK = 64


@dataclass(frozen=True)
class SeriesPair:
    """Two digit sequences; g has coefficients a_k - b_k (k counted from 1)."""

    a: DigitStream
    b: DigitStream
    beta: Optional[Beta] = None
    truncation: int = DEFAULT_TRUNCATION

    def coefficients(self, n: Optional[int] = None) -> np.ndarray:
        n = self.truncation if n is None else n
        return np.array(self.a.prefix(n), dtype=np.int64) - np.array(self.b.prefix(n), dtype=np.int64)

    @property
    def coefficient_bound(self) -> int:
        return self.beta.alphabet_max if self.beta is not None else 1

    def _finite_within(self, n):
        """True when every coefficient past index n is zero."""
        a, b = self.a, self.b
        if isinstance(a, PeriodicStream) and isinstance(b, PeriodicStream) \
                and (a.preperiod, a.period) == (b.preperiod, b.period):
            return True
        return all(isinstance(s, PeriodicStream) and s.is_finite and len(s.preperiod) <= n for s in (self.a, self.b))

    def to_json(self):
        def enc(s):
            if isinstance(s, PeriodicStream):
                if s.is_finite:
                    return "".join(map(str, s.preperiod))
                return s.to_json()
            return "".join(map(str, s.prefix(self.truncation)))
        return {"a": enc(self.a), "b": enc(self.b), "truncation": self.truncation}


def make_pair(a, b, beta=None, truncation=DEFAULT_TRUNCATION) -> SeriesPair:
    return SeriesPair(as_stream(a), as_stream(b), beta, truncation)


def _tails(xhi, n, amax, prec):
    """Bounds on |sum_{k>n} c_k x^k| and |sum_{k>n} k c_k x^(k-1)| for |c_k| <= amax."""
    upc, dn = _ctx(prec, True), _ctx(prec, False)
    one_minus = dn.sub(1, xhi)
    xn = upc.pow(xhi, n)
    t0 = upc.div(upc.mul(amax, upc.mul(xn, xhi)), one_minus)
    t1 = upc.mul(amax, upc.add(upc.div(upc.mul(n + 1, xn), one_minus),
                               upc.div(upc.mul(xn, xhi), upc.mul(one_minus, one_minus))))
    return t0, t1


def eval_g(p: SeriesPair, x, prec: int = DEFAULT_PREC, delta0=DEFAULT_DELTA0):
    """Enclosures of g(x) and g'(x) for x in [0, 1) (a number or an Interval).

    The series is cut at ``p.truncation`` terms; the geometric tail bound
    for coefficients in [-amax, amax] widens both enclosures.  If that bound
    exceeds a tenth of ``delta0`` the truncation is doubled until it does not.
    """
    x = x if isinstance(x, Interval) else Interval.exact(x)
    xlo, xhi = to_mpq(x.lo), to_mpq(x.hi)
    if xlo < 0 or xhi >= 1:
        raise ValueError("x must lie in [0, 1)")
    n = p.truncation
    amax = p.coefficient_bound
    if p._finite_within(n):
        t0 = t1 = 0
    else:
        limit = to_mpq(delta0) / 10
        while True:
            t0, t1 = _tails(xhi, n, amax, prec)
            if (t0 < limit and t1 < limit) or xhi == 0 or n >= 1 << 16:
                break
            n *= 2
    c = p.coefficients(n)
    one = Interval.exact(1)
    xi = x.rounded(prec)
    # Horner for sum c_k x^(k-1) and for g'(x) = sum k c_k x^(k-1)
    s = Interval.exact(0)
    d = Interval.exact(0)
    for k in range(n, 0, -1):
        ck = int(c[k - 1])
        s = s * xi + ck
        d = d * xi + k * ck
    g = one + xi * s
    dn, upc = _ctx(prec, False), _ctx(prec, True)
    g = Interval(dn.sub(g.lo, t0), upc.add(g.hi, t0))
    d = Interval(dn.sub(d.lo, t1), upc.add(d.hi, t1))
    return g, d


def certified_delta(p: SeriesPair, x, prec=DEFAULT_PREC):
    """Enclosure of max(|g(x)|, -g'(x))."""
    g, d = eval_g(p, x, prec)
    # exact rationals: negating an mpfr would round to the ambient precision
    glo, ghi, dlo, dhi = (to_mpq(v) for v in (g.lo, g.hi, d.lo, d.hi))
    abs_lo = 0 if glo <= 0 <= ghi else min(abs(glo), abs(ghi))
    abs_hi = max(abs(glo), abs(ghi))
    return Interval(max(abs_lo, -dhi), max(abs_hi, -dlo))


def is_counterexample(p: SeriesPair, x, delta0=DEFAULT_DELTA0, prec=DEFAULT_PREC) -> bool:
    """Certified |g(x)| < delta0 together with g'(x) >= -delta0."""
    g, d = eval_g(p, x, prec, delta0)
    return -delta0 < g.lo and g.hi < delta0 and d.lo >= -delta0


# -- sampling -------------------------------------------------------------------

def random_admissible_word(beta: Beta, n: int, rng: np.random.Generator, state: int = 0) -> tuple:
    """Random walk on the suffix automaton: digit uniform in 0..d_-[state]."""
    dm = beta.quasi_greedy()
    out = []
    for _ in range(n):
        top = dm.digit(state)
        c = int(rng.integers(0, top + 1))
        out.append(c)
        state = state + 1 if c == top else 0
    return tuple(out)


def _boundary_words(beta: Beta, n: int) -> list:
    dm = beta.quasi_greedy()
    return [dm.prefix(n), dm.shift(1).prefix(n), (0,) + dm.prefix(n - 1), (0,) * n]


def sample_pairs(beta: Beta, samples: int, seed: int, truncation=DEFAULT_TRUNCATION, boundary_fraction=0.25):
    """Admissible pairs: random walks plus pairs built from d_-(1, beta)."""
    rng = np.random.default_rng(seed)
    bwords = _boundary_words(beta, truncation)
    pairs = []
    for i in range(samples):
        if rng.random() < boundary_fraction:
            a = bwords[int(rng.integers(len(bwords)))]
            b = bwords[int(rng.integers(len(bwords)))] if rng.random() < 0.5 else random_admissible_word(beta, truncation, rng)
            if rng.random() < 0.5:
                a, b = b, a
        else:
            a = random_admissible_word(beta, truncation, rng)
            b = random_admissible_word(beta, truncation, rng)
        pairs.append(SeriesPair(PeriodicStream.finite(a), PeriodicStream.finite(b), beta, truncation))
    return pairs


def sample_free_pairs(samples: int, seed: int, truncation=DEFAULT_TRUNCATION):
    """Free {-1,0,1} coefficient series, written as a pair of 0/1 sequences."""
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(samples):
        if i % 8 == 0:
            # all -1 beyond a random prefix: the series whose root sits at 1/2
            k = int(rng.integers(0, 4))
            c = np.concatenate([rng.integers(-1, 2, size=k), -np.ones(truncation - k, dtype=np.int64)])
        else:
            c = rng.integers(-1, 2, size=truncation)
        a = tuple(int(v > 0) for v in c)
        b = tuple(int(v < 0) for v in c)
        pairs.append(SeriesPair(PeriodicStream.finite(a), PeriodicStream.finite(b), None, truncation))
    return pairs


# -- scanning --------------------------------------------------------------------

def _grid(x_max_f: float, grid: int, include_zero: bool = True) -> np.ndarray:
    j = np.arange(0 if include_zero else 1, grid + (0 if include_zero else 1), dtype=np.float64)
    denom = max(grid - 1, 1) if include_zero else grid
    return x_max_f * j / denom


def _power_matrices(xs: np.ndarray, n: int):
    k = np.arange(1, n + 1, dtype=np.float64)[:, None]
    with np.errstate(under="ignore"):
        pw = xs[None, :] ** k
        dpw = k * xs[None, :] ** (k - 1)
    return pw, dpw


def _objective(coef: np.ndarray, pw, dpw):
    g = 1.0 + coef @ pw
    d = coef @ dpw
    return np.maximum(np.abs(g), -d), g, d


def domain_max(beta: Optional[Beta], x0=FREE_X0) -> float:
    """Largest float not above 1/beta (or x0 for free coefficients)."""
    if beta is None:
        return float(_ctx(53, False).add(0, to_mpq(x0)))
    _, hi = beta.field.generator_bounds(DEFAULT_PREC)
    return float(_ctx(53, False).div(1, hi))


@dataclass
class ScanReport:
    mode: str
    domain: tuple
    samples: int
    grid: int
    seed: int
    truncation: int
    delta0: object
    delta_hat: Optional[float] = None
    delta_hat_certified: Optional[Interval] = None
    worst_case: Optional[dict] = None
    counterexample: Optional[dict] = None
    candidates_checked: int = 0
    beta: Optional[Beta] = None
    extra: dict = field(default_factory=dict)

    def to_json(self):
        def dec(v):
            return None if v is None else repr(float(v))
        out = {
            "mode": self.mode,
            "beta": None if self.beta is None else self.beta.to_json(),
            "domain": [dec(self.domain[0]), dec(self.domain[1])],
            "samples": self.samples,
            "grid": self.grid,
            "seed": self.seed,
            "truncation": self.truncation,
            "delta0": str(self.delta0),
            "delta_hat": dec(self.delta_hat),
            "delta_hat_certified": None if self.delta_hat_certified is None else self.delta_hat_certified.to_json(20),
            "worst_case": self.worst_case,
            "counterexample": self.counterexample,
            "candidates_checked": self.candidates_checked,
            "verdict": self.verdict,
        }
        out.update(self.extra)
        return out

    @property
    def verdict(self) -> str:
        if self.samples == 0:
            return "empty"
        if self.counterexample is not None:
            return "counterexample"
        return "no counterexample at this resolution"

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()


def _point_record(p: SeriesPair, x: float, prec=DEFAULT_PREC):
    g, d = eval_g(p, to_mpq(x), prec)
    return {
        "pair": p.to_json(),
        "x": repr(x),
        "g": g.to_json(20),
        "g_prime": d.to_json(20),
    }


def scan(beta: Optional[Beta], samples: int, grid: int, seed: int, coefficient_mode: str = "beta-shift-pairs",
         x0=FREE_X0, truncation: int = DEFAULT_TRUNCATION, delta0=DEFAULT_DELTA0, pairs=None,
         max_certify: int = 200) -> ScanReport:
    """Estimate delta = min over sampled (pair, x) of max(|g(x)|, -g'(x)).

    The grid has ``grid`` uniform points on [0, x_max] with x_max = 1/beta in
    beta-shift mode and ``x0`` in free mode.  Grid points whose float value
    falls below 2*delta0 are re-evaluated with enclosures; any that certify
    |g| < delta0 and g' >= -delta0 is a counterexample.
    """
    delta0 = to_mpq(delta0)
    free = coefficient_mode == "free-pm1"
    if coefficient_mode not in ("beta-shift-pairs", "free-pm1"):
        raise ValueError(f"unknown coefficient mode {coefficient_mode!r}")
    x_max = domain_max(None if free else beta, x0)
    report = ScanReport(coefficient_mode, (0.0, x_max), samples, grid, seed, truncation, delta0,
                        beta=None if free else beta)
    if samples <= 0 or grid <= 0:
        report.samples = 0
        return report
    if pairs is None:
        pairs = sample_pairs(beta, samples, seed, truncation) if not free else sample_free_pairs(samples, seed, truncation)
    if free:
        pairs = [SeriesPair(p.a, p.b, None, p.truncation) for p in pairs]
    xs = _grid(x_max, grid)
    pw, dpw = _power_matrices(xs, truncation)
    best = (np.inf, -1, -1)
    flagged = []
    threshold = 2 * float(delta0)
    for start in range(0, len(pairs), _CHUNK):
        chunk = pairs[start:start + _CHUNK]
        coef = np.stack([p.coefficients(truncation) for p in chunk]).astype(np.float64)
        obj, _, _ = _objective(coef, pw, dpw)
        i, j = np.unravel_index(int(np.argmin(obj)), obj.shape)
        if obj[i, j] < best[0]:
            best = (float(obj[i, j]), start + int(i), int(j))
        for ii, jj in zip(*np.nonzero(obj < threshold)):
            flagged.append((float(obj[ii, jj]), start + int(ii), int(jj)))
    report.delta_hat = best[0]
    wp, wx = pairs[best[1]], float(xs[best[2]])
    report.worst_case = _point_record(wp, wx)
    report.delta_hat_certified = certified_delta(wp, to_mpq(wx))
    flagged.sort()
    for val, i, j in flagged[:max_certify]:
        report.candidates_checked += 1
        if is_counterexample(pairs[i], to_mpq(float(xs[j])), delta0):
            report.counterexample = _point_record(pairs[i], float(xs[j]))
            break
    return report


def a_zero_check(beta: Beta, samples: int, grid: int, seed: int, truncation: int = DEFAULT_TRUNCATION):
    """Largest g'(x) over (0, 1/beta] for pairs with a = 0 and b admissible, nonzero.

    Returns (max float value, certified upper bound at that point); both
    should be negative.
    """
    rng = np.random.default_rng(seed)
    words = _boundary_words(beta, truncation)[:3]
    while len(words) < samples:
        w = random_admissible_word(beta, truncation, rng)
        if any(w):
            words.append(w)
    pairs = [SeriesPair(PeriodicStream.finite(()), PeriodicStream.finite(w), beta, truncation) for w in words[:samples]]
    xs = _grid(domain_max(beta), grid, include_zero=False)
    _, dpw = _power_matrices(xs, truncation)
    worst = (-np.inf, 0, 0)
    for start in range(0, len(pairs), _CHUNK):
        chunk = pairs[start:start + _CHUNK]
        coef = np.stack([p.coefficients(truncation) for p in chunk]).astype(np.float64)
        d = coef @ dpw
        i, j = np.unravel_index(int(np.argmax(d)), d.shape)
        if d[i, j] > worst[0]:
            worst = (float(d[i, j]), start + int(i), int(j))
    _, dcert = eval_g(pairs[worst[1]], to_mpq(float(xs[worst[2]])))
    return worst[0], dcert.hi


# -- falsification -----------------------------------------------------------------

def _clamp_admissible(word: np.ndarray, beta: Beta, start: int = 0) -> np.ndarray:
    """Lower digits from ``start`` on until the word is in the language of S_beta."""
    dm = beta.quasi_greedy()
    state = 0
    for k in range(len(word)):
        top = dm.digit(state)
        c = int(word[k])
        if c > top:
            word[k] = c = top
        state = state + 1 if c == top else 0
    return word


def falsify(beta: Beta, budget: int, seed: int, delta0=DEFAULT_DELTA0, length: int = 64, grid: int = 512,
            batch: int = 256, restarts: int = 8, start: Optional[SeriesPair] = None):
    """Stochastic search for a pair violating transversality at level delta0.

    Hill-climbs on digit changes of (a, b), keeping both words admissible,
    to minimise min_x max(|g(x)|, -g'(x)) over a grid on [0, 1/beta].
    ``budget`` is the number of candidate pairs evaluated.  Returns a dict
    describing a certified counterexample, or None.
    """
    if budget <= 0:
        return None
    delta0 = to_mpq(delta0)
    rng = np.random.default_rng(seed)
    xs = _grid(domain_max(beta), grid)
    pw, dpw = _power_matrices(xs, length)

    def objective(A, B):
        obj, _, _ = _objective((A - B).astype(np.float64), pw, dpw)
        j = np.argmin(obj, axis=1)
        return obj[np.arange(len(A)), j], j

    climbers = []
    if start is not None:
        climbers.append((np.array(start.a.prefix(length)), np.array(start.b.prefix(length))))
    bw = _boundary_words(beta, length)
    while len(climbers) < restarts:
        a = bw[len(climbers) % len(bw)] if len(climbers) < len(bw) else random_admissible_word(beta, length, rng)
        b = random_admissible_word(beta, length, rng)
        climbers.append((np.array(a), np.array(b)))
    A = np.stack([c[0] for c in climbers])
    B = np.stack([c[1] for c in climbers])
    used = len(climbers)
    vals, _ = objective(A, B)
    # geometric position choice: early coefficients dominate the series
    p_geo = 1.0 - 1.0 / 12.0
    while used < budget:
        n = min(batch, budget - used)
        owner = rng.integers(0, len(A), size=n)
        CA, CB = A[owner].copy(), B[owner].copy()
        pos = np.minimum(rng.geometric(1.0 - p_geo, size=n) - 1, length - 1)
        which = rng.integers(0, 2, size=n)
        for t in range(n):
            word = CA[t] if which[t] == 0 else CB[t]
            word[pos[t]] = int(rng.integers(0, beta.alphabet_max + 1))
            _clamp_admissible(word, beta)
        used += n
        cv, cj = objective(CA, CB)
        for t in np.argsort(cv, kind="stable"):
            o = owner[t]
            if cv[t] < vals[o]:
                A[o], B[o], vals[o] = CA[t], CB[t], cv[t]
                if cv[t] < float(delta0):
                    pair = make_pair(tuple(int(v) for v in CA[t]), tuple(int(v) for v in CB[t]), beta, length)
                    x = float(xs[cj[t]])
                    if is_counterexample(pair, to_mpq(x), delta0):
                        rec = _point_record(pair, x)
                        rec["evaluated"] = used
                        return rec
    return None
