"""Upper bounds for the logarithmic-derivative error term.

The quantity being bounded is ``log+(T(R) * R / ((R - r) * r))`` with
``R = r + step(T(r))``.  Outside a variant's exceptional set,
``T(R) < threshold(T(r))`` and the bound follows by substitution; the
functions here evaluate both sides.  All logarithms are natural.

Functions accept machine floats or mpmath numbers and return the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import mp_context
from .lemma import (
    BelowFloorError,
    Variant,
    VariantSpec,
    _precise_shift,
    step_size,
    violation_indicator,
)

__all__ = [
    "eq4_term",
    "bound_borel",
    "bound_nevanlinna",
    "bound_hayman",
    "bound_hanliu",
    "bound_fa",
    "bound_for",
    "crossover_threshold",
    "OrderingEntry",
    "OrderingReport",
    "ordering_report",
    "expected_ordering",
    "BoundReport",
    "bound_report",
    "LARGE_T",
]

# "large T" regime for the asymptotic orderings
LARGE_T = 1e4
TIE_RTOL = 1e-12


class _F:
    mpf = float
    log = staticmethod(math.log)
    log1p = staticmethod(math.log1p)
    exp = staticmethod(math.exp)

    @staticmethod
    def power(x, y):
        try:
            return math.pow(x, y)
        except OverflowError:
            return math.inf


def _m(*xs):
    for x in xs:
        ctx = getattr(x, "context", None)
        if ctx is not None:
            return ctx
    return _F


def _log_plus(m, x):
    return m.log(x) if x > 1 else 0 * x


def _positive(name, x):
    if not x > 0:
        raise ValueError(f"{name} must be positive, got {x}")


def _s_ok(s):
    if not s > 1:
        raise ValueError(f"s must exceed 1, got {s}")


def eq4_term(T, r, R, digits: int | None = None):
    """``log+(T(R) R / ((R - r) r))``.

    With ``digits`` the difference ``R - r`` is formed exactly and T is
    evaluated on its precise path, so R may sit within 1e-60 of r.
    """
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    if digits is None:
        TR = T(R)
        if math.isinf(TR):
            return math.inf
        return max(math.log(TR * R / ((R - r) * r)), 0.0)
    import mpmath

    d = mpmath.fsub(R, r, exact=True)
    needed = digits + max(0, int(mpmath.ceil(mpmath.log10(abs(mpmath.mpf(R))) - mpmath.log10(d)))) + 5
    TR = T.evaluate(R, needed)
    ctx = mp_context()
    saved = ctx.prec
    try:
        ctx.dps = digits + 10
        if ctx.isinf(TR):
            return ctx.inf
        return _log_plus(ctx, TR * ctx.convert(R) / (ctx.convert(d) * ctx.convert(r)))
    finally:
        ctx.prec = saved


def bound_borel(t, r, s):
    """``s log+ t + log+ log+ t + log(1 + 1/(r log+ t))``; needs t >= e."""
    if t < math.e:
        raise ValueError("the Borel bound needs t >= e")
    _positive("r", r)
    _s_ok(s)
    m = _m(t, r)
    lt = _log_plus(m, t)
    return s * lt + _log_plus(m, lt) + m.log1p(1 / (r * lt))


def bound_nevanlinna(t, r, s):
    if t < 1:
        raise ValueError("the Nevanlinna bound needs t >= 1")
    _positive("r", r)
    _s_ok(s)
    m = _m(t, r)
    return (s + 1) * _log_plus(m, t) + m.log1p(1 / t) + m.log1p(1 / (r * m.power(t, s)))


def bound_hayman(t, r, s):
    if t < 1:
        raise ValueError("the Hayman bound needs t >= 1")
    _positive("r", r)
    _s_ok(s)
    m = _m(t, r)
    return 2 * _log_plus(m, t) + m.log(s) + m.log1p(1 / (r * t))


def bound_hanliu(t, r, s):
    if t < 1:
        raise ValueError("the Han-Liu bound needs t >= 1")
    _positive("r", r)
    _s_ok(s)
    m = _m(t, r)
    return 2 * _log_plus(m, t) + s * m.log1p(m.power(t, -1 / m.mpf(s))) + m.log1p(1 / (r * t))


def bound_fa(t_char, r, sigma):
    """``((sigma+1)/sigma) u + log(1 + 1/(r e^u))`` with ``u = t_char**sigma``."""
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    if t_char < 1:
        raise ValueError("the bound needs T(r) >= 1")
    _positive("r", r)
    m = _m(t_char, r)
    u = m.power(t_char, sigma)
    return (sigma + 1) / sigma * u + m.log1p(m.exp(-u) / r)


_BOUNDS = {
    Variant.BOREL: bound_borel,
    Variant.NEVANLINNA: bound_nevanlinna,
    Variant.HAYMAN: bound_hayman,
    Variant.HANLIU: bound_hanliu,
}


def bound_for(variant: VariantSpec, t, r, sigma: float | None = None):
    if variant.kind is Variant.FERNANDEZ_ARIAS:
        if sigma is None:
            raise ValueError("the Fernandez Arias bound needs sigma")
        return bound_fa(t, r, sigma)
    return _BOUNDS[variant.kind](t, r, variant.s)


def crossover_threshold(s: float) -> float:
    """T above which the Han-Liu middle term drops below Hayman's ``log s``:
    ``(1 + T**(-1/s))**s <= s  iff  T >= (1/(s**(1/s) - 1))**s``."""
    _s_ok(s)
    return (1 / math.expm1(math.log(s) / s)) ** s


# --------------------------------------------------------------------------
# orderings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderingEntry:
    variant: Variant
    value: float
    tied: bool


@dataclass(frozen=True)
class OrderingReport:
    s: float
    t: float
    r: float
    entries: tuple[OrderingEntry, ...]
    asymptotic: bool
    matches_expected: bool | None

    @property
    def order(self) -> tuple[Variant, ...]:
        return tuple(e.variant for e in self.entries)


def expected_ordering(s: float) -> tuple[Variant, ...]:
    """Ascending order of the four bounds for large T."""
    if 1 < s < 2:
        return (Variant.BOREL, Variant.HANLIU, Variant.HAYMAN, Variant.NEVANLINNA)
    _s_ok(s)
    return (Variant.HANLIU, Variant.HAYMAN, Variant.BOREL, Variant.NEVANLINNA)


def ordering_report(s: float, t: float, r: float) -> OrderingReport:
    """Evaluate the four s-dependent bounds and sort them ascending.

    Values within relative ``TIE_RTOL`` are flagged as tied.  The comparison
    with the large-T ordering is only made when ``t >= LARGE_T``; Borel is
    left out when ``t < e``.
    """
    values = {}
    for kind, fn in _BOUNDS.items():
        if kind is Variant.BOREL and t < math.e:
            continue
        values[kind] = fn(t, r, s)
    ranked = sorted(values.items(), key=lambda kv: kv[1])
    entries = []
    for i, (kind, v) in enumerate(ranked):
        neighbours = [ranked[k][1] for k in (i - 1, i + 1) if 0 <= k < len(ranked)]
        tied = any(abs(v - w) <= TIE_RTOL * max(abs(v), abs(w), 1.0) for w in neighbours)
        entries.append(OrderingEntry(kind, v, tied))
    asymptotic = t >= LARGE_T
    matches = None
    if asymptotic:
        order = tuple(e.variant for e in entries)
        matches = order == expected_ordering(s) and not any(e.tied for e in entries)
    return OrderingReport(s, t, r, tuple(entries), asymptotic, matches)


# --------------------------------------------------------------------------
# pointwise reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    variant: Variant
    r: float
    T_at_r: object
    R: object
    lhs_eq4: object
    bound_value: object
    dominated: bool
    in_exceptional_set: bool

    def __post_init__(self):
        if not self.R > self.r:
            raise ValueError("R must exceed r")
        if self.lhs_eq4 < 0:
            raise ValueError("log+ term cannot be negative")


def bound_report(T, variant: VariantSpec, r: float, sigma: float | None = None, digits: int = 30) -> BoundReport:
    """Both sides of the bound at one radius, on the precise path.

    For Fernandez Arias the lemma runs on ``U = T**sigma`` while the error
    term still uses T itself.  ``in_exceptional_set`` reports whether the
    variant's inequality is reversed at r; the bound is only claimed when
    it is not.
    """
    ctx = mp_context()
    saved = ctx.prec
    try:
        ctx.dps = digits
        t = T.evaluate(r, digits)
        if variant.kind is Variant.FERNANDEZ_ARIAS:
            if sigma is None:
                raise ValueError("the Fernandez Arias variant needs sigma")
            u = ctx.power(t, sigma)
        else:
            u = t
        if u < variant.floor:
            raise BelowFloorError(variant, u, r)
        step = step_size(variant, u)
        R, needed = _precise_shift(r, step, digits)
        TR = T.evaluate(R, needed)
        lemma_fn = T**sigma if variant.kind is Variant.FERNANDEZ_ARIAS else T
        violated = violation_indicator(lemma_fn, variant, r, digits)
        ctx.dps = needed + 10
        lhs = _log_plus(ctx, TR * ctx.convert(R) / (step * r)) if ctx.isfinite(TR) else ctx.inf
        ctx.dps = digits
        bound = bound_for(variant, t, r, sigma)
        # equality cases (T(R) at the threshold) are decided to working precision
        dominated = bool(bound >= lhs - abs(lhs) * ctx.mpf(10) ** (5 - digits))
        return BoundReport(
            variant=variant.kind,
            r=r,
            T_at_r=t,
            R=R,
            lhs_eq4=+lhs,
            bound_value=bound,
            dominated=dominated,
            in_exceptional_set=violated,
        )
    finally:
        ctx.prec = saved
