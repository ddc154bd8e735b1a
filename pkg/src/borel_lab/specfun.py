"""Certified constants: geometric series, Riemann/Hurwitz zeta, the
fractional-part integral, and the exponential tower sum.

Every routine builds its own mpmath interval context, so results are
outward-rounded and the functions are safe to call from several threads.
Truncation remainders are folded into the returned ``Enclosure``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .expr import BinOp, Call, Const, Neg, Num, Var, parse_growth

__all__ = [
    "Enclosure",
    "TowerTerms",
    "DomainError",
    "gamma_series",
    "gamma_enclosure",
    "riemann_zeta",
    "hurwitz_zeta",
    "zeta_gap_quadrature",
    "tower_terms",
    "doubling_tower",
    "tower_partial_sum",
    "tower_constant_Se",
    "tower_tail_bound",
    "tower_dominates_doubling",
    "enclose",
]

MAX_SE_DIGITS = 50


class DomainError(ValueError):
    pass


# --------------------------------------------------------------------------
# exact conversions
# --------------------------------------------------------------------------


def _exact_mpf(x) -> mpmath.mpf:
    """Convert without rounding to the global mpmath precision."""
    if hasattr(x, "_mpf_"):
        return mpmath.mp.make_mpf(x._mpf_)
    if isinstance(x, int):
        with mpmath.workprec(max(53, x.bit_length() + 1)):
            return mpmath.mpf(x)
    if isinstance(x, float):
        return mpmath.mpf(x)
    raise TypeError(f"cannot convert {type(x).__name__} exactly")


def _to_fraction(x) -> Fraction:
    x = _exact_mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    man, exp = x.man_exp
    man = int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _decimal_string(x, digits: int, rounding: str) -> str:
    q = _to_fraction(x)
    ctx = Context(prec=digits, rounding=rounding)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    return format(d, "f") if -30 < d.adjusted() < 30 else str(d)


def _iv_context(dps: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.dps = dps
    return ctx


def _endpoints(v) -> tuple[mpmath.mpf, mpmath.mpf]:
    lo, hi = v._mpi_
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


# --------------------------------------------------------------------------
# Enclosure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` certified to contain a true value."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    digits: int

    def __post_init__(self):
        object.__setattr__(self, "lo", _exact_mpf(self.lo))
        object.__setattr__(self, "hi", _exact_mpf(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def from_interval(cls, v, digits: int) -> "Enclosure":
        lo, hi = _endpoints(v)
        return cls(lo, hi, digits)

    @classmethod
    def point(cls, x, digits: int) -> "Enclosure":
        return cls(x, x, digits)

    @property
    def width(self) -> mpmath.mpf:
        return mpmath.fsub(self.hi, self.lo, exact=True)

    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.ldexp(mpmath.fadd(self.lo, self.hi, exact=True), -1)

    def to_interval(self, ctx: MPIntervalContext):
        return ctx.mpf([self.lo, self.hi])

    def __contains__(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, str):
            q = Fraction(x)
            return _to_fraction(self.lo) <= q <= _to_fraction(self.hi)
        return self.lo <= x <= self.hi

    def inside(self, lower: str | float | None = None, upper: str | float | None = None) -> bool:
        """Exact test ``lower < lo`` and ``hi < upper`` (open interval).

        Decimal strings are compared as exact rationals, never as floats.
        """
        ok = True
        if lower is not None:
            ok = ok and Fraction(str(lower)) < _to_fraction(self.lo)
        if upper is not None:
            ok = ok and _to_fraction(self.hi) < Fraction(str(upper))
        return ok

    def below(self, bound) -> bool:
        """Exact test ``hi <= bound``."""
        return _to_fraction(self.hi) <= Fraction(str(bound))

    def _binary(self, other, op) -> "Enclosure":
        digits = min(self.digits, other.digits) if isinstance(other, Enclosure) else self.digits
        ctx = _iv_context(digits + 20)
        a = self.to_interval(ctx)
        b = other.to_interval(ctx) if isinstance(other, Enclosure) else enclose(other, ctx)
        return Enclosure.from_interval(op(a, b), digits)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def lo_str(self, digits: int | None = None) -> str:
        return _decimal_string(self.lo, (digits or self.digits) + 3, ROUND_FLOOR)

    def hi_str(self, digits: int | None = None) -> str:
        return _decimal_string(self.hi, (digits or self.digits) + 3, ROUND_CEILING)

    def to_dict(self) -> dict:
        return {"lo": self.lo_str(), "hi": self.hi_str(), "digits": self.digits}

    def __repr__(self):
        return f"Enclosure([{self.lo_str()}, {self.hi_str()}], digits={self.digits})"


# --------------------------------------------------------------------------
# input coercion
# --------------------------------------------------------------------------


def _iv_eval(node, ctx):
    if isinstance(node, Num):
        return ctx.mpf(node.text)
    if isinstance(node, Const):
        return ctx.e if node.name == "e" else ctx.pi
    if isinstance(node, Var):
        raise DomainError("constant expected; the variable r is not allowed here")
    if isinstance(node, Neg):
        return -_iv_eval(node.operand, ctx)
    if isinstance(node, Call):
        x = _iv_eval(node.arg, ctx)
        if node.func == "exp":
            return ctx.exp(x)
        if node.func == "log":
            if not x.a > 0:
                raise DomainError("log of nonpositive value")
            return ctx.log(x)
        if x.a < 0:
            raise DomainError("sqrt of negative value")
        return ctx.sqrt(x)
    a, b = _iv_eval(node.left, ctx), _iv_eval(node.right, ctx)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b.a <= 0 <= b.b:
            raise DomainError("division by an interval containing zero")
        return a / b
    if not a.a > 0:
        raise DomainError("power base must be positive in constant expressions")
    return ctx.exp(b * ctx.log(a))


def enclose(x, ctx: MPIntervalContext):
    """Interval for ``x``: number, decimal string, constant expression
    (e.g. ``"sqrt(2)+1"``), or an ``Enclosure``."""
    if isinstance(x, Enclosure):
        return x.to_interval(ctx)
    if isinstance(x, str):
        text = x.strip()
        try:
            Fraction(text)
        except ValueError:
            return _iv_eval(parse_growth(text).root, ctx)
        return ctx.mpf(text)
    if isinstance(x, (int, float, mpmath.mpf)):
        if isinstance(x, float) and not math.isfinite(x):
            raise DomainError(f"non-finite input {x}")
        return ctx.mpf(x)
    if hasattr(x, "_mpi_"):
        lo, hi = _endpoints(x)
        return ctx.mpf([lo, hi])
    raise TypeError(f"cannot enclose {type(x).__name__}")


# --------------------------------------------------------------------------
# geometric series
# --------------------------------------------------------------------------


def gamma_series(s):
    """Closed form ``s/(s-1)`` of the geometric series sum of ``s**-n``."""
    if not s > 1:
        raise DomainError("gamma(s) needs s > 1; at s = 1 the series diverges linearly")
    return s / (s - 1)


def gamma_enclosure(s, digits: int = 30) -> Enclosure:
    ctx = _iv_context(digits + 10)
    sv = enclose(s, ctx)
    if not sv.a > 1:
        raise DomainError("gamma(s) needs s > 1; at s = 1 the series diverges linearly")
    return Enclosure.from_interval(sv / (sv - 1), digits)


# --------------------------------------------------------------------------
# Euler-Maclaurin machinery
# --------------------------------------------------------------------------


def _bernoulli(ctx, n: int):
    p, q = mpmath.bernfrac(n)
    return ctx.mpf(int(p)) / int(q)


def _em_tail(ctx, N: int, integral, value_at_N, derivative, tol):
    """Enclose ``sum_{n>=N} g(n)`` for a completely monotone ``g``.

    ``derivative(k)`` returns an interval for the k-th derivative at N.
    For completely monotone g the remainder after the last kept correction
    is bounded by the first omitted one.  Returns None if the corrections
    stop decreasing before reaching ``tol`` (caller should enlarge N).
    """
    total = integral + value_at_N / 2
    factorial = ctx.mpf(1)
    prev_mag = None
    for j in range(1, 400):
        factorial *= (2 * j - 1) * (2 * j)
        term = _bernoulli(ctx, 2 * j) / factorial * derivative(2 * j - 1)
        mag = abs(term).b
        if prev_mag is not None and mag > prev_mag:
            return None
        if mag < tol:
            return total + ctx.mpf([-mag, mag])
        total -= term
        prev_mag = mag
    return None


def _initial_shift(digits: int, s_hi) -> int:
    return max(math.ceil(1.5 * digits), math.ceil(abs(float(s_hi))) + 10)


# --------------------------------------------------------------------------
# zeta functions
# --------------------------------------------------------------------------


def hurwitz_zeta(s, a, digits: int = 30) -> Enclosure:
    """Enclosure of ``sum_{n>=0} (n+a)**-s`` for real s > 1, a > 0.

    ``s`` and ``a`` may be numbers, decimal strings, constant expressions
    such as ``"sqrt(2)+1"``, or enclosures.  The first N terms are summed
    directly and the rest by Euler-Maclaurin with a certified remainder.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    probe = _iv_context(30)
    s0, a0 = enclose(s, probe), enclose(a, probe)
    if not s0.a > 1:
        raise DomainError("zeta(s, a) needs s > 1")
    if not a0.a > 0:
        raise DomainError("zeta(s, a) needs a > 0")

    # magnitude guard digits: value ~ a^-s + 1/(s-1)
    scale = float(s0.b) * max(0.0, -math.log10(float(a0.a))) + max(0.0, -math.log10(float(s0.a) - 1))
    target = mpmath.mpf(10) ** (-digits + 2)
    guard = 15
    N = _initial_shift(digits, s0.b)
    for _ in range(8):
        ctx = _iv_context(digits + guard + math.ceil(scale))
        sv, av = enclose(s, ctx), enclose(a, ctx)
        direct = ctx.mpf(0)
        for n in range(N):
            direct += (av + n) ** (-sv)
        x = av + N
        base = x ** (-sv)

        def derivative(k, sv=sv, x=x, base=base):
            rising = ctx.mpf(1)
            for i in range(k):
                rising *= sv + i
            return (-1) ** k * rising * base / x**k

        tol = ctx.mpf(10) ** (-(digits + 2))
        tail = _em_tail(ctx, N, x * base / (sv - 1), base, derivative, tol)
        if tail is None:
            N *= 2
            continue
        result = direct + tail
        enc = Enclosure.from_interval(result, digits)
        if enc.width <= target or not _is_point(s) or not _is_point(a):
            return enc
        guard += 15
    raise ArithmeticError("Euler-Maclaurin evaluation did not reach the requested width")


def riemann_zeta(s, digits: int = 30) -> Enclosure:
    """Enclosure of ``zeta(s)`` for real s > 1."""
    probe = _iv_context(30)
    if not enclose(s, probe).a > 1:
        raise DomainError("zeta(s) needs s > 1")
    return hurwitz_zeta(s, 1, digits)


def _is_point(x) -> bool:
    return not isinstance(x, Enclosure) or x.lo == x.hi


def _J(ctx, x, p, tol):
    """``int_0^1 u (x+u)**-p du`` for x > 1, p > 1, by the binomial series.

    Terms alternate; once the ratio bound ``(p+k)/((k+1)x)`` drops below 1
    they decrease, and the remainder is bounded by the next term.
    """
    xinv = 1 / x
    coeff = ctx.mpf(1)  # (p)_k / k! * x^-k, signed
    total = ctx.mpf(0)
    p_hi = p.b
    x_lo = x.a
    for k in range(100000):
        term = coeff / (k + 2)
        ratio_ok = (p_hi + k) / ((k + 1) * x_lo) < 1
        mag = abs(term).b
        if ratio_ok and mag < tol:
            return x ** (-p) * (total + ctx.mpf([-mag, mag]))
        total += term
        coeff = -coeff * (p + k) / (k + 1) * xinv
    raise ArithmeticError("binomial series did not converge")


def zeta_gap_quadrature(s, digits: int = 30) -> Enclosure:
    """Enclosure of ``s * int_1^inf (t - floor t) / t**(s+1) dt``.

    Unit intervals [n, n+1) are integrated exactly with the antiderivative
    ``t**(1-s)/(1-s) + n t**-s / s``.  The tail from N on is the sum of the
    per-interval integrals f(n) = int_0^1 u (n+u)**-(s+1) du, a completely
    monotone function of n, which is summed by Euler-Maclaurin.
    """
    probe = _iv_context(30)
    s0 = enclose(s, probe)
    if not s0.a > 1:
        raise DomainError("the gap integral needs s > 1")
    N = _initial_shift(digits, s0.b)
    target = mpmath.mpf(10) ** (-digits + 2)
    guard = 15 + math.ceil(2 * math.log10(N) + max(0.0, -math.log10(float(s0.a) - 1)))
    for _ in range(8):
        ctx = _iv_context(digits + guard)
        sv = enclose(s, ctx)

        def antiderivative(t, n):
            return t ** (1 - sv) / (1 - sv) + n * t ** (-sv) / sv

        head = ctx.mpf(0)
        for n in range(1, N):
            head += antiderivative(ctx.mpf(n + 1), n) - antiderivative(ctx.mpf(n), n)

        tol = ctx.mpf(10) ** (-(digits + 4))
        x = ctx.mpf(N)
        q = sv + 1

        def derivative(k):
            rising = ctx.mpf(1)
            for i in range(k):
                rising *= q + i
            return (-1) ** k * rising * _J(ctx, x, q + k, tol)

        tail = _em_tail(ctx, N, _J(ctx, x, sv, tol) / sv, _J(ctx, x, q, tol), derivative, tol)
        if tail is None:
            N *= 2
            continue
        enc = Enclosure.from_interval(sv * (head + tail), digits)
        if not enc.lo > 0:
            raise ArithmeticError("could not certify a positive gap integral")
        if enc.width <= target or not _is_point(s):
            return enc
        guard += 15
    raise ArithmeticError("gap quadrature did not reach the requested width")


# --------------------------------------------------------------------------
# exponential and doubling towers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerTerms:
    """Magnitude bookkeeping for a_n (a_0 = 1, a_n = exp(a_{n-1})).

    ``value`` is set while a_n fits a double; otherwise ``log_value``
    (= a_{n-1}) while that fits; ``log_depth`` counts how many natural logs
    separate a_n from the last stored number.  ``reciprocal_log10`` is
    log10(1/a_n) = -a_{n-1}/ln 10 when a_{n-1} is stored.
    """

    n: int
    value: mpmath.mpf | None
    log_value: mpmath.mpf | None
    log_depth: int
    reciprocal_log10: mpmath.mpf | None


def _tower_values(ctx, count: int) -> list:
    values = [ctx.mpf(1)]
    for _ in range(1, count):
        values.append(ctx.exp(values[-1]))
    return values


def tower_terms(n: int, digits: int = 30) -> TowerTerms:
    if n < 0:
        raise ValueError("n must be nonnegative")
    ctx = _iv_context(digits + 10)
    stored = _tower_values(ctx, min(n, 3) + 1)  # a_0 .. a_min(n,3), all < 4e6
    mid = lambda v: Enclosure.from_interval(v, digits).mid  # noqa: E731
    ln10 = ctx.log(10)
    if n <= 3:
        value = stored[n]
        prev = stored[n - 1] if n >= 1 else ctx.mpf(0)
        return TowerTerms(n, mid(value), mid(prev) if n else mpmath.mpf(0), 0, mid(-prev / ln10))
    if n == 4:
        return TowerTerms(4, None, mid(stored[3]), 1, mid(-stored[3] / ln10))
    return TowerTerms(n, None, None, n - 3, None)


def doubling_tower(n: int) -> int:
    """b_0 = 1, b_1 = 2, b_n = 2**b_{n-1}, exact for n <= 5."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > 5:
        raise OverflowError("b_6 = 2**(2**65536) is not representable")
    b = 1
    for _ in range(n):
        b = 2**b
    return b


def tower_dominates_doubling(n: int, digits: int = 30) -> bool:
    """Certify a_n > b_n by comparing natural logs (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = _iv_context(digits + 10)
    if n <= 3:
        a = _tower_values(ctx, n + 1)[n]
        return bool(a.a > doubling_tower(n))
    if n == 4:
        ln_a = _tower_values(ctx, 4)[3]
        ln_b = doubling_tower(3) * ctx.ln2
        return bool(ln_a.a > ln_b.b)
    # a_n > b_n follows from a_{n-1} > b_{n-1} * ln 2 once a_{n-1} > b_{n-1}
    return tower_dominates_doubling(n - 1, digits) and tower_dominates_doubling(4, digits)


def tower_tail_bound(n_start: int) -> mpmath.mpf:
    """Certified upper bound on log10 of ``sum_{n>=n_start} 1/b_n``.

    Since b_{n+1} >= 2 b_n the tail is below ``2/b_{n_start}``, whose
    log10 is ``(1 - b_{n_start-1}) * log10(2)``; returned rounded upward.
    """
    if n_start < 2:
        raise ValueError("n_start must be >= 2")
    exponent = doubling_tower(n_start - 1)  # raises past b_5
    ctx = _iv_context(40 + len(str(exponent)))
    v = (1 - ctx.mpf(exponent)) * ctx.log(2) / ctx.log(10)
    return _endpoints(v)[1]


def _tower_partial_interval(ctx, count: int):
    """Interval for a_0^-1 + ... + a_{count-1}^-1; a_n^-1 for n >= 4 enters
    only as a (0, 10**ceil(log10 a_n^-1)] bracket."""
    exact = _tower_values(ctx, min(count, 4))
    total = ctx.mpf(0)
    for a in exact:
        total += 1 / a
    if count > 4:
        rl10 = _endpoints(-exact[3] / ctx.log(10))[1]
        total += ctx.mpf([0, ctx.mpf(10) ** int(mpmath.ceil(rl10))])
    if count > 5:
        # deeper terms are dominated by the doubling-tower tail from n = 5
        total += ctx.mpf([0, ctx.mpf(10) ** tower_tail_bound(5)])
    return total


def tower_partial_sum(count: int, digits: int = 30) -> Enclosure:
    """Enclosure of the first ``count`` reciprocals of the exponential tower."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > 6:
        raise ValueError("terms past a_5 are only available through the tail bound")
    ctx = _iv_context(digits + 15)
    return Enclosure.from_interval(_tower_partial_interval(ctx, count), digits)


def tower_constant_Se(digits: int = 30) -> Enclosure:
    """Enclosure of the full sum of 1/a_n over n >= 0.

    Four terms are computed exactly (1, 1/e, e^-e, e^-e^e), a_4^-1 enters as
    a magnitude bracket, and everything from n = 5 on is bounded by the
    doubling tower: sum_{n>=5} 1/a_n < sum 1/b_n < 2/b_5.
    """
    if digits > MAX_SE_DIGITS:
        raise ValueError(f"digits must be <= {MAX_SE_DIGITS}")
    ctx = _iv_context(digits + 15)
    total = _tower_partial_interval(ctx, 5)
    total += ctx.mpf([0, ctx.mpf(10) ** tower_tail_bound(5)])
    return Enclosure.from_interval(total, digits)
