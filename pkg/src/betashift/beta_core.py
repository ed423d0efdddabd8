"""Beta-expansions, the beta-shift and its cylinders.

Digits are plain ints, finite words are tuples of ints.  Infinite sequences
are :class:`DigitStream` objects.  Every digit decision is exact: the base is
an algebraic number carried as a :class:`~betashift.numeric.NumberField`
generator, points are field elements, and real outputs are directed-rounding
:class:`~betashift.numeric.Interval` enclosures.
"""
from __future__ import annotations

import itertools
import math
import threading
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

from .errors import (
    AmbiguousDigit,
    ComparisonUndecided,
    FinitenessUndecided,
    NotAdmissible,
    NotParryAdmissible,
    PrecisionExhausted,
)
from .numeric import (
    DEFAULT_PREC,
    FieldElement,
    Interval,
    NumberField,
    _ctx,
    bounds_of,
    down,
    exact_str,
    max_precision,
    to_mpq,
    up,
)

COMPARISON_BUDGET = 256
FINITENESS_BUDGET = 2048
DEFAULT_DEPTH = 64

Word = tuple


# -- digit streams -----------------------------------------------------------

class DigitStream:
    """An infinite digit sequence with indexed access and shifts."""

    def digit(self, n: int) -> int:
        raise NotImplementedError

    def prefix(self, n: int) -> tuple:
        return tuple(self.digit(i) for i in range(n))

    def __getitem__(self, key):
        if isinstance(key, slice):
            if key.stop is None:
                raise ValueError("streams are infinite; slices need a stop")
            start = key.start or 0
            return self.prefix(key.stop)[start::key.step]
        if key < 0:
            raise IndexError("negative index into a digit stream")
        return self.digit(key)

    def __iter__(self):
        return (self.digit(i) for i in itertools.count())

    def shift(self, m: int) -> "DigitStream":
        return m and ShiftedStream(self, m) or self

    def __repr__(self):
        return f"{type(self).__name__}({','.join(map(str, self.prefix(12)))},...)"


class PeriodicStream(DigitStream):
    """Eventually periodic stream ``preperiod + period^inf`` in normal form.

    A finite word followed by zeros is the special case ``period == (0,)``.
    """

    def __init__(self, preperiod: Sequence[int] = (), period: Sequence[int] = (0,)):
        pre, per = tuple(int(d) for d in preperiod), tuple(int(d) for d in period)
        if not per:
            raise ValueError("period must be non-empty")
        for p in range(1, len(per) + 1):
            if len(per) % p == 0 and per == per[:p] * (len(per) // p):
                per = per[:p]
                break
        while pre and pre[-1] == per[-1]:
            per = per[-1:] + per[:-1]
            pre = pre[:-1]
        self.preperiod = pre
        self.period = per

    @classmethod
    def finite(cls, digits: Iterable[int]) -> "PeriodicStream":
        return cls(tuple(digits), (0,))

    @property
    def is_finite(self) -> bool:
        return self.period == (0,)

    @property
    def horizon(self) -> int:
        return len(self.preperiod) + len(self.period)

    def digit(self, n):
        pre = self.preperiod
        if n < len(pre):
            return pre[n]
        return self.period[(n - len(pre)) % len(self.period)]

    def shift(self, m):
        if m <= len(self.preperiod):
            return PeriodicStream(self.preperiod[m:], self.period)
        k = (m - len(self.preperiod)) % len(self.period)
        return PeriodicStream((), self.period[k:] + self.period[:k])

    def __eq__(self, other):
        return isinstance(other, PeriodicStream) and (self.preperiod, self.period) == (other.preperiod, other.period)

    def __hash__(self):
        return hash((self.preperiod, self.period))

    def __repr__(self):
        if self.is_finite:
            return f"PeriodicStream.finite({self.preperiod})"
        return f"PeriodicStream({self.preperiod}, {self.period})"

    def to_json(self):
        if self.is_finite:
            return list(self.preperiod)
        return {"preperiod": list(self.preperiod), "period": list(self.period)}


class LazyStream(DigitStream):
    """Stream backed by an iterator; digits are cached and extension is locked."""

    def __init__(self, iterator):
        self._it = iter(iterator)
        self._cache: list[int] = []
        self._lock = threading.Lock()

    def _extend(self, n):
        with self._lock:
            cache = self._cache
            while len(cache) <= n:
                cache.append(next(self._it))

    def digit(self, n):
        if n >= len(self._cache):
            self._extend(n)
        return self._cache[n]

    def prefix(self, n):
        if n > len(self._cache):
            self._extend(n - 1)
        return tuple(self._cache[:n])


class ShiftedStream(DigitStream):
    def __init__(self, base: DigitStream, offset: int):
        if isinstance(base, ShiftedStream):
            base, offset = base.base, base.offset + offset
        self.base = base
        self.offset = offset

    def digit(self, n):
        return self.base.digit(n + self.offset)

    def prefix(self, n):
        return self.base.prefix(n + self.offset)[self.offset:]


class GreedyStream(LazyStream):
    """The greedy digits d(x, beta), generated by iterating f_beta exactly."""

    def __init__(self, x, beta: "Beta"):
        self.beta = beta
        self.x = beta.exact(x)
        self.points = [self.x]
        super().__init__(self._digits())

    def _digits(self):
        y = self.x
        while True:
            z = y.mul_gen()
            d = z.floor()
            y = z - d
            self.points.append(y)
            yield d


def as_stream(s) -> DigitStream:
    if isinstance(s, DigitStream):
        return s
    return PeriodicStream.finite(s)


def stream_to_json(s: DigitStream):
    if isinstance(s, PeriodicStream):
        return s.to_json()
    raise TypeError("only eventually periodic streams have a JSON form")


def stream_from_json(obj) -> PeriodicStream:
    if isinstance(obj, list):
        return PeriodicStream.finite(obj)
    return PeriodicStream(obj.get("preperiod", ()), obj["period"])


def compare(s, t, budget: int = COMPARISON_BUDGET) -> int:
    """Lexicographic comparison of two infinite sequences: -1, 0 or 1.

    Exact for eventually periodic streams (finite words count as followed by
    zeros); otherwise decided on the first ``budget`` digits or
    :class:`ComparisonUndecided` is raised.
    """
    s, t = as_stream(s), as_stream(t)
    if isinstance(s, PeriodicStream) and isinstance(t, PeriodicStream):
        n = max(len(s.preperiod), len(t.preperiod)) + math.lcm(len(s.period), len(t.period))
    else:
        n = budget
    a, b = s.prefix(n), t.prefix(n)
    if a != b:
        return -1 if a < b else 1
    if isinstance(s, PeriodicStream) and isinstance(t, PeriodicStream):
        return 0
    raise ComparisonUndecided(f"streams agree on the first {budget} digits")


class PrefixMatcher:
    """Knuth-Morris-Pratt automaton for "longest suffix that is a prefix of seq".

    ``seq`` may be an infinite stream; the failure table grows on demand.
    """

    def __init__(self, seq):
        self.seq = seq if isinstance(seq, DigitStream) else as_stream(seq)
        self._fail = [0]
        self._lock = threading.Lock()

    def _failure(self, i):
        fail = self._fail
        if i >= len(fail):
            with self._lock:
                seq = self.seq
                while len(fail) <= i:
                    j = len(fail)
                    k = fail[j - 1]
                    c = seq.digit(j)
                    while k and seq.digit(k) != c:
                        k = fail[k - 1]
                    fail.append(k + 1 if seq.digit(k) == c else 0)
        return fail[i]

    def step(self, state: int, c: int) -> int:
        seq = self.seq
        while state and seq.digit(state) != c:
            state = self._failure(state - 1)
        return state + 1 if seq.digit(state) == c else 0

    def run(self, word: Iterable[int], state: int = 0) -> int:
        for c in word:
            state = self.step(state, c)
        return state


def match_length(word: Sequence[int], seq) -> int:
    """Largest m with ``word[-(m+1):] == seq[0..m]``; -1 when no suffix matches."""
    matcher = seq.d_matcher if isinstance(seq, Beta) else PrefixMatcher(seq)
    return matcher.run(word) - 1


# -- the base ----------------------------------------------------------------

class Beta:
    """A base beta > 1, held exactly as a real algebraic number.

    ``Beta("1.9")`` and ``Beta(2)`` give rational bases; irrational ones come
    from :meth:`from_polynomial`, :meth:`golden_ratio`, :meth:`tribonacci` or
    :func:`solve_beta_from_digits`.
    """

    def __init__(self, value=None, *, field: NumberField | None = None, name: str | None = None):
        if field is None:
            q = to_mpq(value)
            field = NumberField([1, -q], (q, q))
            name = name or exact_str(q)
        self.field = field
        self.gen = field.gen
        self.name = name
        if not self.gen > 1:
            raise ValueError("beta must exceed 1")
        fl = self.gen.floor()
        self.is_integer = field.rational and self.gen == fl
        self.alphabet_max = fl - 1 if self.is_integer else fl
        self._lock = threading.RLock()
        self._inv = self.gen.inverse()
        self._inv_pows = [field.one]
        self._d1 = None
        self._dm = None
        self._qorbit = None
        self._matcher = None

    # constructors
    @classmethod
    def from_polynomial(cls, coeffs, near=None, bracket=None, name=None) -> "Beta":
        """Root of an integer polynomial (highest degree first) near ``near``."""
        minpoly, bracket = _isolate_root(coeffs, near=near, bracket=bracket)
        return cls(field=NumberField(minpoly, bracket), name=name)

    @classmethod
    def golden_ratio(cls) -> "Beta":
        return cls.from_polynomial([1, -1, -1], bracket=("1.6", "1.7"), name="golden_ratio")

    @classmethod
    def tribonacci(cls) -> "Beta":
        return cls.from_polynomial([1, -1, -1, -1], bracket=("1.8", "1.9"), name="tribonacci")

    # basic numerics
    def exact(self, x) -> FieldElement:
        """Coerce a number into Q(beta) exactly."""
        if isinstance(x, FieldElement):
            return self.field.coerce(x)
        return self.field.scalar(x)

    def enclosure(self, prec: int = DEFAULT_PREC) -> Interval:
        lo, hi = self.field.generator_bounds(prec)
        return Interval(lo, hi)

    def inv_pow(self, n: int) -> FieldElement:
        """beta**-n, exactly (cached)."""
        pows = self._inv_pows
        if n >= len(pows):
            with self._lock:
                while len(pows) <= n:
                    pows.append(pows[-1] * self._inv)
        return pows[n]

    def __float__(self):
        return float(self.gen)

    def __repr__(self):
        return f"Beta({self.name or float(self)})"

    def __lt__(self, other):
        return beta_compare(self, other) < 0

    def __gt__(self, other):
        return beta_compare(self, other) > 0

    # expansions of one
    def expansion_of_one(self) -> DigitStream:
        """d(1, beta), computed by the exact greedy orbit of 1."""
        with self._lock:
            if self._d1 is None:
                self._d1 = _expand_one(self)
        return self._d1

    def quasi_greedy(self) -> DigitStream:
        with self._lock:
            if self._dm is None:
                self._dm = quasi_greedy_expansion_of_one(self)
        return self._dm

    @property
    def d_matcher(self) -> PrefixMatcher:
        """Suffix matcher against d(1, beta)."""
        with self._lock:
            if self._matcher is None:
                self._matcher = PrefixMatcher(self.expansion_of_one())
        return self._matcher

    def quasi_orbit(self, m: int) -> FieldElement:
        """pi_beta(sigma^m d_-(1, beta)), exactly."""
        with self._lock:
            if self._qorbit is None:
                self._qorbit = _QuasiOrbit(self)
            return self._qorbit.value(m)

    def to_json(self, digits: int = 30):
        f = self.field
        enc = self.enclosure(max(DEFAULT_PREC, 4 * digits)).to_json(digits)
        if f.rational:
            definition = {"rational": exact_str(self.gen.c[0])}
        else:
            definition = {
                "polynomial": [exact_str(c) for c in f.poly],
                "bracket": [exact_str(f._lo), exact_str(f._hi)],
            }
        out = {"enclosure": enc, "definition": definition}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj) -> "Beta":
        d = obj["definition"]
        if "rational" in d:
            return cls(d["rational"], name=obj.get("name"))
        field = NumberField([to_mpq(c) for c in d["polynomial"]], [to_mpq(b) for b in d["bracket"]])
        return cls(field=field, name=obj.get("name"))


def parse_beta(text: str) -> Beta:
    """Beta from a CLI-style string: '1.9', 'golden', 'tribonacci', 'digits:1,1'."""
    key = text.strip().lower()
    if key in ("phi", "golden", "golden_ratio"):
        return Beta.golden_ratio()
    if key == "tribonacci":
        return Beta.tribonacci()
    if key.startswith("digits:"):
        return solve_beta_from_digits([int(t) for t in key[7:].split(",")])
    return Beta(text)


def beta_compare(a: Beta, b: Beta) -> int:
    """Exact comparison of two bases, by escalating enclosures if needed."""
    if b.field.rational:
        return (a.gen - b.gen.c[0]).sign()
    if a.field.rational:
        return -(b.gen - a.gen.c[0]).sign()
    if a.field is b.field or a.field.same_as(b.field):
        return (a.gen - a.field.coerce(b.gen)).sign()
    prec = DEFAULT_PREC
    while prec <= max_precision():
        ia, ib = a.enclosure(prec), b.enclosure(prec)
        if ia.hi < ib.lo:
            return -1
        if ib.hi < ia.lo:
            return 1
        prec *= 2
    raise PrecisionExhausted("could not separate the two bases")


def _isolate_root(coeffs, near=None, bracket=None):
    """Minimal polynomial of the chosen root and a rational isolating bracket."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Integer(int(c)) if float(c).is_integer() else sympy.Rational(str(c)) for c in coeffs], x)
    candidates = []
    for fac, _ in poly.factor_list()[1]:
        for (lo, hi), _mult in fac.intervals():
            candidates.append((fac, sympy.Rational(lo), sympy.Rational(hi)))
    if bracket is not None:
        blo, bhi = (sympy.Rational(str(b)) for b in bracket)
        picked = [c for c in candidates if c[1] <= bhi and c[2] >= blo and c[0].count_roots(blo, bhi) >= 1]
    elif near is not None:
        target = sympy.Rational(str(near))
        picked = sorted(candidates, key=lambda c: abs((c[1] + c[2]) / 2 - target))[:1]
    else:
        picked = sorted(candidates, key=lambda c: -c[2])[:1]
    if len(picked) != 1:
        raise ValueError("could not isolate a unique root")
    fac, lo, hi = picked[0]
    if fac.degree() == 1:
        c1, c0 = fac.all_coeffs()
        r = to_mpq(str(-c0 / c1))
        return [1, -r], (r, r)
    while fac.count_roots(lo, hi) != 1 or fac.eval(lo) == 0 or fac.eval(hi) == 0:
        lo, hi = fac.refine_root(lo, hi, eps=(hi - lo) / 4)
    return [to_mpq(str(c)) for c in fac.all_coeffs()], (to_mpq(str(lo)), to_mpq(str(hi)))


# -- greedy expansion and orbit ----------------------------------------------

def _check_unit(y: FieldElement, allow_one: bool):
    if y.sign() < 0 or (y - 1).sign() > 0 or (not allow_one and y == 1):
        raise ValueError("point must lie in [0, 1]" if allow_one else "point must lie in [0, 1)")


def _interval_endpoints(x: Interval, beta: Beta):
    return beta.exact(to_mpq(x.lo)), beta.exact(to_mpq(x.hi))


def greedy_expand(x, beta: Beta, n: int) -> tuple:
    """First ``n`` greedy digits d(x, beta)_k = [beta * f_beta^k(x)].

    ``x`` may be any exact number in [0, 1] (int, decimal string, Fraction,
    float, field element) or an :class:`Interval`; an interval of positive
    width yields digits only while all its points share them, otherwise
    :class:`AmbiguousDigit` is raised.

    >>> greedy_expand("0.625", Beta(2), 4)
    (1, 0, 1, 0)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(x, Interval):
        if x.is_point:
            x = to_mpq(x.lo)
        else:
            return _interval_orbit(x, beta, n)[0]
    y = beta.exact(x)
    _check_unit(y, allow_one=True)
    out = []
    for _ in range(n):
        z = y.mul_gen()
        d = z.floor()
        out.append(d)
        y = z - d
    return tuple(out)


def _interval_orbit(x: Interval, beta: Beta, n: int):
    a, b = _interval_endpoints(x, beta)
    _check_unit(a, allow_one=True)
    _check_unit(b, allow_one=True)
    digits, points = [], [(a, b)]
    for k in range(n):
        za, zb = a.mul_gen(), b.mul_gen()
        da = za.floor()
        if (zb - (da + 1)).sign() >= 0:
            raise AmbiguousDigit(f"enclosure straddles a cutpoint at step {k}")
        digits.append(da)
        a, b = za - da, zb - da
        points.append((a, b))
    return tuple(digits), points


def orbit_exact(x, beta: Beta, n: int) -> list:
    """Exact points f_beta^k(x), k < n."""
    y = beta.exact(x)
    _check_unit(y, allow_one=False)
    out = []
    for _ in range(n):
        out.append(y)
        z = y.mul_gen()
        y = z - z.floor()
    return out


def orbit(x, beta: Beta, n: int, prec: int = DEFAULT_PREC) -> list:
    """Enclosures of f_beta^k(x) for k < n; digits satisfy d_k = [beta f^k(x)]."""
    if isinstance(x, Interval) and not x.is_point:
        _, pts = _interval_orbit(x, beta, max(n - 1, 0))
        return [Interval(a.bounds(prec).lo, b.bounds(prec).hi) for a, b in pts[:n]]
    if isinstance(x, Interval):
        x = to_mpq(x.lo)
    return [p.bounds(prec) for p in orbit_exact(x, beta, n)]


# -- expansions of one ---------------------------------------------------------

def _expand_one(beta: Beta, budget: int = FINITENESS_BUDGET) -> DigitStream:
    if beta.is_integer:
        return PeriodicStream.finite((beta.gen.floor(),))
    if beta.field.rational:
        # beta = p/q with q > 1: f^k(1) has denominator exactly q^k, so the
        # orbit of 1 never hits 0 and never repeats.
        return GreedyStream(1, beta)
    y = beta.field.one
    seen = {}
    digits = []
    for k in range(budget):
        z = y.mul_gen()
        d = z.floor()
        digits.append(d)
        y = z - d
        if y.is_zero():
            return PeriodicStream.finite(digits)
        if y in seen:
            j = seen[y]
            return PeriodicStream(digits[:j], digits[j:])
        seen[y] = k + 1
    return GreedyStream(1, beta)


def expansion_of_one(beta: Beta) -> DigitStream:
    return beta.expansion_of_one()


def quasi_greedy_expansion_of_one(beta: Beta) -> DigitStream:
    """d_-(1, beta): equals d(1, beta) unless that ends in zeros.

    If d(1, beta) = d_0 ... d_m 0^inf with d_m != 0 the result is
    (d_0 ... d_{m-1} (d_m - 1))^inf.
    """
    d = beta.expansion_of_one()
    if isinstance(d, PeriodicStream):
        if d.is_finite:
            w = list(d.preperiod)
            w[-1] -= 1
            return PeriodicStream((), w)
        return d
    if beta.field.rational:
        return d
    raise FinitenessUndecided(f"d(1, beta) neither terminated nor repeated within {FINITENESS_BUDGET} digits")


def check_quasi_greedy_limit(beta: Beta, js=range(4, 40, 4), length: int = 40) -> list:
    """Agreement lengths between d(1 - 2**-j, beta) and d_-(1, beta).

    The quasi-greedy expansion is the limit of d(x, beta) as x increases to 1,
    so these lengths must grow without bound along increasing j.
    """
    dm = beta.quasi_greedy().prefix(length)
    out = []
    for j in js:
        digits = greedy_expand(1 - mpq(1, 2 ** j), beta, length)
        k = 0
        while k < length and digits[k] == dm[k]:
            k += 1
        out.append(k)
    return out


class _QuasiOrbit:
    """Values y_m = pi(sigma^m d_-), via y_{m+1} = beta*y_m - d_-[m]."""

    def __init__(self, beta: Beta):
        self.dm = beta.quasi_greedy()
        self.values = [beta.field.one]
        self.periodic = isinstance(self.dm, PeriodicStream)

    def value(self, m):
        if self.periodic:
            pre, per = len(self.dm.preperiod), len(self.dm.period)
            if m >= pre + per:
                m = pre + (m - pre) % per
        vals = self.values
        while len(vals) <= m:
            k = len(vals) - 1
            vals.append(vals[k].mul_gen() - self.dm.digit(k))
        return vals[m]


# -- admissibility ---------------------------------------------------------------

def suffix_state(word: Sequence[int], beta: Beta, state: int = 0):
    """Length of the longest suffix of ``word`` that is a prefix of d_-(1, beta).

    Returns None when the word leaves the beta-shift.  The longest such suffix
    carries the binding constraint: the next digit c is allowed iff
    c <= d_-[state], and the state resets to 0 whenever c < d_-[state].
    """
    dm = beta.quasi_greedy()
    for c in word:
        top = dm.digit(state)
        if c > top:
            return None
        state = state + 1 if c == top else 0
    return state


def is_admissible(s, beta: Beta, depth: int | None = None, budget: int = COMPARISON_BUDGET) -> bool:
    """Whether every shift of ``s`` is lexicographically <= d_-(1, beta).

    Finite words are checked completely (they are in the language iff they
    followed by zeros are).  For eventually periodic streams the check is
    exact; for other streams the shifts n < depth are compared on ``budget``
    digits.
    """
    if not isinstance(s, DigitStream):
        return suffix_state(tuple(s), beta) is not None
    dm = beta.quasi_greedy()
    if isinstance(s, PeriodicStream) and s.is_finite:
        return suffix_state(s.preperiod, beta) is not None
    if isinstance(s, PeriodicStream) and isinstance(dm, PeriodicStream):
        return all(compare(s.shift(n), dm) <= 0 for n in range(s.horizon))
    if depth is None:
        depth = DEFAULT_DEPTH
    return all(compare(s.shift(n), dm, budget) <= 0 for n in range(depth))


def parry_check(s, depth: int | None = None, budget: int = COMPARISON_BUDGET) -> bool:
    """Parry's criterion: sigma^n(s) < s strictly for every n > 0.

    Exact for finite-then-zeros and eventually periodic input, whose shift
    orbit is finite.
    """
    s = as_stream(s)
    if isinstance(s, PeriodicStream):
        if s.is_finite and not any(s.preperiod):
            return False
        return all(compare(s.shift(n), s) < 0 for n in range(1, s.horizon + 1))
    return all(compare(s.shift(n), s, budget) < 0 for n in range(1, (depth or DEFAULT_DEPTH) + 1))


# -- the inverse problem -------------------------------------------------------

def _parry_polynomial(s: PeriodicStream) -> list:
    """Integer polynomial (highest degree first) vanishing at the Parry root."""
    import sympy

    x = sympy.Symbol("x")
    pre, per = s.preperiod, s.period
    a = len(pre)
    p_u = x ** a - sum(d * x ** (a - 1 - k) for k, d in enumerate(pre))
    if s.is_finite:
        expr = p_u
    else:
        p = len(per)
        q_v = sum(d * x ** (p - 1 - j) for j, d in enumerate(per))
        expr = (x ** p - 1) * p_u - q_v
    return [int(c) for c in sympy.Poly(sympy.expand(expr), x).all_coeffs()]


def _series_bracket(s: PeriodicStream, tol=mpq(1, 10 ** 12)):
    """Bisection on x -> sum d_k x^-(k+1) - 1 with certified tail bounds."""
    dmax = max(s.preperiod + s.period)
    lo, hi = mpq(1), mpq(dmax + 1)
    dn, upc = _ctx(DEFAULT_PREC, False), _ctx(DEFAULT_PREC, True)

    def sign_at(xq):
        x_lo, x_hi = down(xq), up(xq)
        gap = xq - 1
        # tail < 1e-15 * (x - 1) once x^-T * dmax / (x - 1) is that small
        t = 1
        while mpq(dmax) / (gap * gap) * mpq(10) ** 15 > xq ** min(t, 4096) and t < 4096:
            t *= 2
        if s.is_finite:
            t = len(s.preperiod)
        vlo = vhi = gmpy2.mpfr(0)
        for d in reversed(s.prefix(t)):
            vlo = dn.div(dn.add(vlo, d), x_hi)
            vhi = upc.div(upc.add(vhi, d), x_lo)
        if not s.is_finite:
            vhi = upc.add(vhi, upc.div(upc.mul(dmax, upc.pow(x_lo, -t)), dn.sub(x_lo, 1)))
        if vlo > 1:
            return 1
        if vhi < 1:
            return -1
        return 0

    while hi - lo > tol:
        mid = (lo + hi) / 2
        sg = sign_at(mid)
        if sg == 0:
            break
        if sg > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def solve_beta_from_digits(s) -> Beta:
    """The unique beta > 1 with 1 = sum_k s_k beta^-(k+1).

    ``s`` is a finite word (followed by zeros) or a :class:`PeriodicStream`
    satisfying Parry's criterion; the returned base then has d(1, beta) = s.

    >>> float(solve_beta_from_digits((1, 1)))  # doctest: +ELLIPSIS
    1.618033988749...
    """
    s = as_stream(s)
    if not isinstance(s, PeriodicStream):
        raise TypeError("solve_beta_from_digits needs a finite or eventually periodic sequence")
    if not parry_check(s):
        raise NotParryAdmissible(f"{s!r} fails sigma^n(s) < s")
    if s.is_finite and tuple(s.preperiod) == (1,):
        raise NotParryAdmissible("(1, 0, 0, ...) corresponds to beta = 1")
    lo, hi = _series_bracket(s)
    coeffs = _parry_polynomial(s)
    minpoly, bracket = _isolate_root(coeffs, bracket=(lo, hi))
    beta = Beta(field=NumberField(minpoly, bracket), name="digits:" + ",".join(map(str, s.prefix(s.horizon))))
    return beta


# -- projection and cylinders -------------------------------------------------

def pi_beta(s, beta: Beta, depth: int | None = None, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of sum_k s_k beta^-(k+1).

    Finite words are summed exactly as the word followed by zeros.  Streams
    are truncated at ``depth`` with the tail bound
    [0, alphabet_max * beta^-depth / (beta - 1)] added to the upper end.
    """
    tail = True
    if not isinstance(s, DigitStream):
        s = tuple(s)
        depth = len(s) if depth is None else depth
        tail = depth < len(s)
        digits = s[:depth]
    else:
        if isinstance(s, PeriodicStream) and s.is_finite and (depth is None or depth >= len(s.preperiod)):
            digits, tail = s.preperiod, False
            depth = len(digits)
        else:
            depth = DEFAULT_DEPTH if depth is None else depth
            digits = s.prefix(depth)
    b_lo, b_hi = beta.field.generator_bounds(prec)
    dn, upc = _ctx(prec, False), _ctx(prec, True)
    lo = hi = gmpy2.mpfr(0)
    for d in reversed(digits):
        lo = dn.div(dn.add(lo, d), b_hi)
        hi = upc.div(upc.add(hi, d), b_lo)
    if tail and beta.alphabet_max > 0:
        t = upc.div(upc.mul(beta.alphabet_max, upc.pow(dn.div(1, b_lo), depth)), dn.sub(b_lo, 1))
        hi = upc.add(hi, t)
    return Interval(lo, hi)


class CylinderInterval:
    """The half-open interval pi_beta([w]) of a word w of the beta-shift.

    ``left_exact`` and ``length_exact`` are exact field elements; ``left`` and
    ``length`` are their enclosures.  ``state`` is the suffix-automaton state
    after reading the word.
    """

    __slots__ = ("word", "beta", "state", "left_exact", "length_exact")

    def __init__(self, word, beta, state, left_exact, length_exact):
        self.word = word
        self.beta = beta
        self.state = state
        self.left_exact = left_exact
        self.length_exact = length_exact

    @property
    def generation(self) -> int:
        return len(self.word)

    @property
    def right_exact(self) -> FieldElement:
        return self.left_exact + self.length_exact

    @property
    def left(self) -> Interval:
        return self.left_exact.bounds()

    @property
    def length(self) -> Interval:
        return self.length_exact.bounds()

    def bounds(self, prec: int = DEFAULT_PREC) -> Interval:
        """Enclosure of the closure [left, left + length]."""
        return Interval(self.left_exact.bounds(prec).lo, self.right_exact.bounds(prec).hi)

    @property
    def is_full(self) -> bool:
        return self.state == 0 or self.beta.quasi_orbit(self.state) == 1

    def child(self, c: int) -> "CylinderInterval":
        beta = self.beta
        dm = beta.quasi_greedy()
        top = dm.digit(self.state)
        if not 0 <= c <= top:
            raise NotAdmissible(f"digit {c} cannot follow {self.word}")
        n = len(self.word) + 1
        state = self.state + 1 if c == top else 0
        scale = beta.inv_pow(n)
        left = self.left_exact + scale * c if c else self.left_exact
        return CylinderInterval(self.word + (c,), beta, state, left, scale * beta.quasi_orbit(state))

    def children(self) -> list:
        top = self.beta.quasi_greedy().digit(self.state)
        return [self.child(c) for c in range(top + 1)]

    def __repr__(self):
        return f"CylinderInterval({''.join(map(str, self.word)) or '()'}, {self.bounds()!r})"

    def to_json(self, digits: int = 30):
        return {"word": list(self.word), "interval": self.bounds(max(DEFAULT_PREC, 4 * digits)).to_json(digits)}


def root_cylinder(beta: Beta) -> CylinderInterval:
    return CylinderInterval((), beta, 0, beta.field.zero, beta.field.one)


def cylinder_interval(w: Sequence[int], beta: Beta) -> CylinderInterval:
    """pi_beta([w]) with exact endpoints.

    The left end is pi(w 0^inf); the length is beta^-n times pi of the maximal
    admissible continuation, which is sigma^m(d_-(1, beta)) for the longest
    suffix of w matching a prefix of d_-(1, beta).
    """
    w = tuple(int(d) for d in w)
    state = suffix_state(w, beta)
    if state is None:
        raise NotAdmissible(f"{w} is not in the language of S_beta")
    left = beta.field.zero
    inv = beta._inv
    for d in reversed(w):
        left = (left + d) * inv
    return CylinderInterval(w, beta, state, left, beta.inv_pow(len(w)) * beta.quasi_orbit(state))


def is_full_word(w: Sequence[int], beta: Beta) -> bool:
    """Whether every admissible word may follow w (its cylinder has length beta^-n)."""
    state = suffix_state(tuple(w), beta)
    if state is None:
        raise NotAdmissible(f"{tuple(w)} is not in the language of S_beta")
    return state == 0 or beta.quasi_orbit(state) == 1


def shift_constant(beta: Beta) -> FieldElement:
    """The constant C with C beta^-n <= |pi([w])| <= beta^-n for all words w.

    It is the least value of pi(sigma^m d_-(1, beta)); defined when d_- is
    eventually periodic (in particular when d(1, beta) is finite).
    """
    dm = beta.quasi_greedy()
    if not isinstance(dm, PeriodicStream):
        raise FinitenessUndecided("no uniform lower bound: d_-(1, beta) is not eventually periodic")
    vals = [beta.quasi_orbit(m) for m in range(dm.horizon)]
    best = vals[0]
    for v in vals[1:]:
        if v < best:
            best = v
    return best


def admissible_words(beta: Beta, n: int) -> list:
    """All words of length n in the language of S_beta, in lexicographic order."""
    dm = beta.quasi_greedy()
    out = []

    def rec(prefix, state):
        if len(prefix) == n:
            out.append(prefix)
            return
        top = dm.digit(state)
        for c in range(top + 1):
            rec(prefix + (c,), state + 1 if c == top else 0)

    rec((), 0)
    return out
