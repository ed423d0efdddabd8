"""Certified real arithmetic.

Two layers live here:

* :class:`Interval` -- closed enclosures whose endpoints are either exact
  rationals (``gmpy2.mpq``) or binary floats (``gmpy2.mpfr``) produced with
  directed rounding.  Exact endpoints stay exact under +, -, *.
* :class:`NumberField` / :class:`FieldElement` -- exact arithmetic in Q(beta)
  for a real algebraic beta.  Signs are decided from directed-rounding
  enclosures whose precision doubles until the sign is certain; an element is
  zero only when all its coordinates are, so every cutpoint decision is exact.
"""
from __future__ import annotations

import contextlib
import contextvars
import functools
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import PrecisionExhausted

DEFAULT_PREC = 128
MAX_PREC = 1024

_max_prec = contextvars.ContextVar("betashift_max_prec", default=MAX_PREC)
_ZERO = mpfr(0)
_MPFR = type(_ZERO)


@contextlib.contextmanager
def precision_limit(bits):
    """Temporarily change the cap used by precision escalation."""
    token = _max_prec.set(int(bits))
    try:
        yield
    finally:
        _max_prec.reset(token)


def max_precision():
    return _max_prec.get()


@functools.lru_cache(maxsize=None)
class _Directed:
    """add/sub/mul/div/pow rounded one way, sound for any exact operand.

    gmpy2 rounds an mpq (or a wider mpfr) operand to the working precision
    in the context's own direction before operating, which is the wrong
    direction for a subtrahend or a negative factor.  Operands are therefore
    first enclosed in [down, up] and the extreme candidate is kept.
    """

    __slots__ = ("prec", "up", "_c", "_lo", "_hi")

    def __init__(self, prec, up):
        self.prec = prec
        self.up = up
        self._lo = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        self._hi = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        self._c = self._hi if up else self._lo

    def _enc(self, x):
        if isinstance(x, _MPFR) and x.precision <= self.prec:
            return x, x
        if isinstance(x, int) and x.bit_length() <= self.prec:
            return x, x
        return self._lo.add(_ZERO, x), self._hi.add(_ZERO, x)

    def _pick(self, vals):
        return max(vals) if self.up else min(vals)

    def add(self, a, b):
        (al, ah), (bl, bh) = self._enc(a), self._enc(b)
        return self._c.add(ah, bh) if self.up else self._c.add(al, bl)

    def sub(self, a, b):
        (al, ah), (bl, bh) = self._enc(a), self._enc(b)
        return self._c.sub(ah, bl) if self.up else self._c.sub(al, bh)

    def mul(self, a, b):
        (al, ah), (bl, bh) = self._enc(a), self._enc(b)
        if al == ah and bl == bh:
            return self._c.mul(al, bl)
        return self._pick([self._c.mul(x, y) for x in (al, ah) for y in (bl, bh)])

    def div(self, a, b):
        (al, ah), (bl, bh) = self._enc(a), self._enc(b)
        if bl <= 0 <= bh and not (bl == bh == 0):
            if bl == bh:
                return self._c.div(al, bl)
            raise ZeroDivisionError("divisor enclosure contains zero")
        if al == ah and bl == bh:
            return self._c.div(al, bl)
        return self._pick([self._c.div(x, y) for x in (al, ah) for y in (bl, bh)])

    def pow(self, a, n):
        al, ah = self._enc(a)
        if al == ah:
            return self._c.pow(al, n)
        if al < 0:
            raise ValueError("directed pow needs a non-negative base")
        return self._pick([self._c.pow(al, n), self._c.pow(ah, n)])


def _ctx(prec, up):
    return _Directed(prec, up)


def down(x, prec=DEFAULT_PREC):
    """Largest ``prec``-bit float <= x."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown).add(_ZERO, x)


def up(x, prec=DEFAULT_PREC):
    """Smallest ``prec``-bit float >= x."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp).add(_ZERO, x)


def to_mpq(x):
    """Exact rational from int, str (decimal or p/q), float, Fraction, mpq or mpfr."""
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        n, d = x.as_integer_ratio()
        return mpq(n, d)
    if isinstance(x, type(_ZERO)):
        return mpq(x)
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def floor_int(x):
    """Exact floor; gmpy2.floor would round through the context precision."""
    q = to_mpq(x)
    return int(q.numerator) // int(q.denominator)


# -- decimal strings ---------------------------------------------------------

def exact_str(q):
    """Exact string for a rational: terminating decimal when possible, else 'p/q'."""
    q = to_mpq(q)
    den = int(q.denominator)
    d, twos, fives = den, 0, 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    k = max(twos, fives)
    scaled = int(q.numerator) * (10 ** k // den)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    if k == 0:
        return sign + digits
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def _sci(x, digits, up_):
    q = to_mpq(x)
    if q == 0:
        return "0"
    a = abs(q)
    e = int(gmpy2.floor(gmpy2.log10(gmpy2.mpfr(a, 64))))
    # normalise so that 10**e <= a < 10**(e+1)
    while a >= mpq(10) ** (e + 1):
        e += 1
    while a < mpq(10) ** e:
        e -= 1
    scaled = q * mpq(10) ** (digits - 1 - e)
    num, den = int(scaled.numerator), int(scaled.denominator)
    m = -((-num) // den) if up_ else num // den
    if abs(m) >= 10 ** digits:
        m = m // 10 if not up_ else -((-m) // 10)
        e += 1
    sign = "-" if m < 0 else ""
    s = str(abs(m)).rjust(digits, "0")
    return f"{sign}{s[0]}.{s[1:]}e{e}"


def decimal_down(x, digits=30):
    """Decimal string of a number <= x (directed rounding to ``digits`` figures)."""
    return _sci(x, digits, False)


def decimal_up(x, digits=30):
    return _sci(x, digits, True)


# -- intervals ---------------------------------------------------------------

class Interval:
    """Closed interval ``[lo, hi]`` with exact or outward-rounded endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _coerce_endpoint(lo)
        hi = lo if hi is None else _coerce_endpoint(hi)
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, x):
        q = to_mpq(x)
        return cls(q, q)

    @classmethod
    def around(cls, x, prec=DEFAULT_PREC):
        """Tight float enclosure of an exact rational."""
        q = to_mpq(x)
        return cls(down(q, prec), up(q, prec))

    def rounded(self, prec=DEFAULT_PREC):
        return Interval(down(self.lo, prec), up(self.hi, prec))

    @property
    def width(self):
        return _ctx(DEFAULT_PREC, True).sub(self.hi, self.lo)

    @property
    def mid(self):
        return (to_mpq(self.lo) + to_mpq(self.hi)) / 2

    @property
    def is_point(self):
        return self.lo == self.hi

    def contains(self, x):
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(_ctx(DEFAULT_PREC, False).add(self.lo, other.lo),
                        _ctx(DEFAULT_PREC, True).add(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(_negate(self.hi), _negate(self.lo))

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        dn, upc = _ctx(DEFAULT_PREC, False), _ctx(DEFAULT_PREC, True)
        pairs = [(self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi)]
        return Interval(min(dn.mul(a, b) for a, b in pairs), max(upc.mul(a, b) for a, b in pairs))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"Interval({decimal_down(self.lo, 17)}, {decimal_up(self.hi, 17)})"

    def to_json(self, digits=30):
        """Decimal-string pair; exact when both endpoints are terminating rationals."""
        lo, hi = to_mpq(self.lo), to_mpq(self.hi)
        if max(lo.denominator.bit_length(), hi.denominator.bit_length()) > 4 * digits:
            return [decimal_down(lo, digits), decimal_up(hi, digits)]
        exact_lo, exact_hi = exact_str(lo), exact_str(hi)
        if "/" not in exact_lo and "/" not in exact_hi and max(len(exact_lo), len(exact_hi)) <= 4 * digits:
            return [exact_lo, exact_hi]
        return [decimal_down(lo, digits), decimal_up(hi, digits)]

    @classmethod
    def from_json(cls, pair):
        return cls(to_mpq(pair[0]), to_mpq(pair[1]))


def _negate(x):
    # plain unary minus on an mpfr rounds to the ambient 53-bit context
    if isinstance(x, _MPFR):
        return gmpy2.context(precision=max(x.precision, 2)).minus(x)
    return -x


def _coerce_endpoint(x):
    if isinstance(x, (type(_ZERO), type(mpq()))):
        return x
    return to_mpq(x)


def _as_interval(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, FieldElement):
        return x.bounds()
    return Interval.exact(x)


# -- exact arithmetic in Q(beta) -------------------------------------------

class NumberField:
    """Q(theta) for a real root theta of an irreducible polynomial.

    ``minpoly`` lists rational coefficients, highest degree first; ``bracket``
    is a rational interval on which the polynomial changes sign and which
    contains no other root.
    """

    def __init__(self, minpoly, bracket):
        coeffs = [to_mpq(c) for c in minpoly]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        if len(coeffs) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        lead = coeffs[0]
        monic = [c / lead for c in coeffs]
        self.degree = len(monic) - 1
        self.poly = tuple(monic)
        # x^d = -(a_0 + a_1 x + ... + a_{d-1} x^{d-1})
        self._neg_red = tuple(-c for c in reversed(monic[1:]))
        lo, hi = (to_mpq(b) for b in bracket)
        if self.degree == 1:
            root = -monic[1]
            lo = hi = root
        elif self._peval(lo) * self._peval(hi) > 0:
            raise ValueError("bracket does not isolate a sign change")
        self._lo, self._hi = lo, hi
        self._bounds = {}
        self._powers = {}
        self.zero = FieldElement(self, (mpq(0),) * self.degree)
        self.one = self.scalar(1)
        self.gen = self.zero if self.degree == 0 else (
            self.scalar(lo) if self.degree == 1 else FieldElement(self, (mpq(0), mpq(1)) + (mpq(0),) * (self.degree - 2)))

    def __repr__(self):
        return f"NumberField(degree={self.degree}, poly={[str(c) for c in self.poly]})"

    def same_as(self, other):
        return other is self or (other.poly == self.poly and other._lo <= self._hi and self._lo <= other._hi)

    @property
    def rational(self):
        return self.degree == 1

    def scalar(self, q):
        q = to_mpq(q)
        return FieldElement(self, (q,) + (mpq(0),) * (self.degree - 1))

    def element(self, coords):
        coords = tuple(to_mpq(c) for c in coords)
        if len(coords) > self.degree:
            return self._reduce(list(coords))
        return FieldElement(self, coords + (mpq(0),) * (self.degree - len(coords)))

    def coerce(self, x):
        if isinstance(x, FieldElement):
            if x.field is self:
                return x
            if x.field.rational:
                return self.scalar(x.c[0])
            if self.same_as(x.field):
                return FieldElement(self, x.c)
            raise TypeError("elements of different number fields")
        return self.scalar(x)

    def _peval(self, q):
        acc = mpq(0)
        for c in self.poly:
            acc = acc * q + c
        return acc

    def _reduce(self, p):
        d = self.degree
        red = self._neg_red
        for i in range(len(p) - 1, d - 1, -1):
            t = p[i]
            if t:
                base = i - d
                for j in range(d):
                    p[base + j] += t * red[j]
            p[i] = mpq(0)
        return FieldElement(self, tuple(p[:d]) + (mpq(0),) * max(0, d - len(p)))

    # enclosures of the generator
    def _refine_bracket(self, bits):
        """Shrink the rational bracket to width <= 2**-bits."""
        target = mpq(1, 2 ** bits)
        lo, hi = self._lo, self._hi
        if hi - lo <= target:
            return lo, hi
        sl = self._peval(lo) > 0
        # coarse bisection so Newton starts inside its basin
        while hi - lo > mpq(1, 2 ** 40) and hi - lo > target:
            m = (lo + hi) / 2
            if (self._peval(m) > 0) == sl:
                lo = m
            else:
                hi = m
        if hi - lo > target:
            ctx = gmpy2.context(precision=bits + 64)
            x = ctx.add(_ZERO, (lo + hi) / 2)
            poly, dpoly = self.poly, [c * (self.degree - i) for i, c in enumerate(self.poly[:-1])]
            for _ in range(200):
                fx = fdx = _ZERO
                for c in poly:
                    fx = ctx.add(ctx.mul(fx, x), c)
                for c in dpoly:
                    fdx = ctx.add(ctx.mul(fdx, x), c)
                step = ctx.div(fx, fdx)
                x = ctx.sub(x, step)
                if step == 0 or abs(step) < mpfr(2) ** (-(bits + 32)):
                    break
            xq = mpq(x)
            cand_lo, cand_hi = xq - target / 4, xq + target / 4
            if lo <= cand_lo and cand_hi <= hi and (self._peval(cand_lo) > 0) == sl and (self._peval(cand_hi) > 0) != sl:
                lo, hi = cand_lo, cand_hi
            else:
                while hi - lo > target:
                    m = (lo + hi) / 2
                    if (self._peval(m) > 0) == sl:
                        lo = m
                    else:
                        hi = m
        self._lo, self._hi = lo, hi
        return lo, hi

    def generator_bounds(self, prec=DEFAULT_PREC):
        """(lo, hi) ``prec``-bit floats enclosing the generator."""
        got = self._bounds.get(prec)
        if got is None:
            if self.rational:
                root = self._lo
                got = (down(root, prec), up(root, prec))
            else:
                mag = max(1, floor_int(abs(to_mpq(self._hi))).bit_length())
                lo, hi = self._refine_bracket(prec + mag + 8)
                got = (down(lo, prec), up(hi, prec))
            self._bounds[prec] = got
        return got

    def _power_bounds(self, prec):
        got = self._powers.get(prec)
        if got is None:
            lo, hi = self.generator_bounds(prec)
            if lo < 0:
                raise ValueError("only positive generators are supported")
            dn, upc = _ctx(prec, False), _ctx(prec, True)
            got = [(mpfr(1), mpfr(1))]
            for _ in range(1, self.degree):
                pl, ph = got[-1]
                got.append((dn.mul(pl, lo), upc.mul(ph, hi)))
            self._powers[prec] = got
        return got

    def evaluate(self, coords, prec=DEFAULT_PREC):
        """Directed-rounding enclosure (lo, hi) of an element's value."""
        if self.rational:
            q = coords[0]
            return down(q, prec), up(q, prec)
        dn, upc = _ctx(prec, False), _ctx(prec, True)
        lo = hi = _ZERO
        for c, (pl, ph) in zip(coords, self._power_bounds(prec)):
            if c > 0:
                lo = dn.add(lo, dn.mul(c, pl))
                hi = upc.add(hi, upc.mul(c, ph))
            elif c < 0:
                lo = dn.add(lo, dn.mul(c, ph))
                hi = upc.add(hi, upc.mul(c, pl))
        return lo, hi


def _start_prec(coords):
    bits = 0
    for c in coords:
        if c:
            bits = max(bits, int(c.numerator).bit_length() - int(c.denominator).bit_length())
    prec = DEFAULT_PREC
    while prec < bits + 64:
        prec *= 2
    return prec


class FieldElement:
    """Exact element of a :class:`NumberField` (coordinates in the power basis)."""

    __slots__ = ("field", "c")

    def __init__(self, field, c):
        self.field = field
        self.c = c

    # -- coercion helpers
    def _other(self, x):
        if isinstance(x, FieldElement):
            return self.field.coerce(x) if x.field is not self.field else x
        return self.field.scalar(x)

    def __add__(self, x):
        if not isinstance(x, FieldElement) and self.field.degree == 1:
            return FieldElement(self.field, (self.c[0] + to_mpq(x),))
        o = self._other(x)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.c))

    def __sub__(self, x):
        if not isinstance(x, FieldElement) and self.field.degree == 1:
            return FieldElement(self.field, (self.c[0] - to_mpq(x),))
        o = self._other(x)
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, x):
        return self._other(x) - self

    def __mul__(self, x):
        f = self.field
        if not isinstance(x, FieldElement):
            q = to_mpq(x)
            return FieldElement(f, tuple(a * q for a in self.c))
        o = self._other(x)
        if f.degree == 1:
            return FieldElement(f, (self.c[0] * o.c[0],))
        d = f.degree
        p = [mpq(0)] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        p[i + j] += a * b
        return f._reduce(p)

    __rmul__ = __mul__

    def mul_gen(self):
        """Multiply by the generator (cheap shift-and-reduce)."""
        f = self.field
        if f.degree == 1:
            return FieldElement(f, (self.c[0] * f._lo,))
        top = self.c[-1]
        shifted = (mpq(0),) + self.c[:-1]
        if top:
            shifted = tuple(s + top * r for s, r in zip(shifted, f._neg_red))
        return FieldElement(f, shifted)

    def inverse(self):
        f = self.field
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if f.degree == 1:
            return FieldElement(f, (1 / self.c[0],))
        d = f.degree
        cols = []
        v = self
        for _ in range(d):
            cols.append(list(v.c))
            v = v.mul_gen()
        # solve sum_j x_j * cols[j] = e_0
        rows = [[cols[j][i] for j in range(d)] + [mpq(1 if i == 0 else 0)] for i in range(d)]
        for col in range(d):
            piv = next(r for r in range(col, d) if rows[r][col] != 0)
            rows[col], rows[piv] = rows[piv], rows[col]
            pv = rows[col][col]
            rows[col] = [a / pv for a in rows[col]]
            for r in range(d):
                if r != col and rows[r][col] != 0:
                    fac = rows[r][col]
                    rows[r] = [a - fac * b for a, b in zip(rows[r], rows[col])]
        return f.element([rows[i][d] for i in range(d)])

    def __truediv__(self, x):
        if not isinstance(x, FieldElement):
            q = to_mpq(x)
            return FieldElement(self.field, tuple(a / q for a in self.c))
        return self * self._other(x).inverse()

    def __rtruediv__(self, x):
        return self._other(x) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- exact predicates
    def is_zero(self):
        return not any(self.c)

    def __eq__(self, x):
        if isinstance(x, FieldElement):
            try:
                x = self._other(x)
            except TypeError:
                return False
            return self.c == x.c
        try:
            return self.c == self.field.scalar(x).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def sign(self):
        """Exact sign, certified by enclosures of escalating precision."""
        if self.field.degree == 1:
            q = self.c[0]
            return (q > 0) - (q < 0)
        if self.is_zero():
            return 0
        prec = _start_prec(self.c)
        cap = max(max_precision(), prec)
        while prec <= cap:
            lo, hi = self.field.evaluate(self.c, prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise PrecisionExhausted(f"sign undecided at {cap} bits")

    def __lt__(self, x):
        return (self - x).sign() < 0

    def __le__(self, x):
        return (self - x).sign() <= 0

    def __gt__(self, x):
        return (self - x).sign() > 0

    def __ge__(self, x):
        return (self - x).sign() >= 0

    def floor(self):
        """Exact integer part."""
        if self.field.degree == 1:
            return floor_int(self.c[0])
        prec = _start_prec(self.c)
        cap = max(max_precision(), prec)
        while prec <= cap:
            lo, hi = self.field.evaluate(self.c, prec)
            a, b = floor_int(lo), floor_int(hi)
            if a == b:
                return a
            if b == a + 1:
                return b if (self - b).sign() >= 0 else a
            prec *= 2
        raise PrecisionExhausted(f"integer part undecided at {cap} bits")

    def bounds(self, prec=DEFAULT_PREC):
        lo, hi = self.field.evaluate(self.c, prec)
        return Interval(lo, hi)

    def rational_value(self):
        """The value as mpq when the element lies in Q, else None."""
        if self.field.degree == 1 or not any(self.c[1:]):
            return self.c[0]
        return None

    def approx(self, bits):
        """A rational within 2**-bits (relative to magnitude 1) of the value."""
        q = self.rational_value()
        if q is not None:
            return q
        lo, hi = self.field.evaluate(self.c, max(DEFAULT_PREC, _start_prec(self.c), bits + 16))
        return (mpq(lo) + mpq(hi)) / 2

    def __float__(self):
        q = self.rational_value()
        if q is not None:
            return float(q)
        lo, hi = self.field.evaluate(self.c, 64)
        return float((mpq(lo) + mpq(hi)) / 2)

    def __repr__(self):
        return f"FieldElement({float(self):.17g})"


def exact_sign(x):
    if isinstance(x, FieldElement):
        return x.sign()
    q = to_mpq(x)
    return (q > 0) - (q < 0)


def bounds_of(x, prec=DEFAULT_PREC):
    """Interval enclosure of an exact number (rational or field element)."""
    if isinstance(x, FieldElement):
        return x.bounds(prec)
    if isinstance(x, Interval):
        return x
    return Interval.around(to_mpq(x), prec)
