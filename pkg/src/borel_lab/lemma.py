"""Exceptional sets of the Borel-type growth lemmas.

Each variant compares ``T(r + step(T(r)))`` with ``threshold(T(r))``;
the exceptional set is where the comparison is reversed (``>=``).  The
scanner locates that set on a finite horizon, and ``build_cover`` replays
the inductive interval chain that bounds its measure.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Sequence

import mpmath

from .expr import EvaluationError, MonotoneReport, mp_context, validate_monotone
from .specfun import (
    Enclosure,
    _exact_mpf,
    _iv_context,
    enclose,
    gamma_enclosure,
    hurwitz_zeta,
    riemann_zeta,
    tower_constant_Se,
)

__all__ = [
    "Variant",
    "VariantSpec",
    "IntervalSet",
    "CoverStep",
    "CoverSequence",
    "BelowFloorError",
    "NotMonotoneError",
    "CoarseGridWarning",
    "ShiftUnderflowError",
    "step_size",
    "rhs_threshold",
    "violation_indicator",
    "scan_violations",
    "build_cover",
    "chain_bound",
    "measure",
    "measure_bound",
]

DEFAULT_GRID = 10_000
DEFAULT_TOL = 1e-12
# float path: equality within this relative slack counts as a reversal
EQUALITY_SLACK = 1e-12
# float comparisons closer than this (relative) are redone on the precise path
FLOAT_MARGIN = 1e-9
PRECISE_DIGITS = 30
MAX_PRECISE_DIGITS = 2000
MAX_SHIFT_DIGITS = 5000


class Variant(str, Enum):
    BOREL = "borel"
    NEVANLINNA = "nevanlinna"
    HAYMAN = "hayman"
    HANLIU = "hanliu"
    FERNANDEZ_ARIAS = "fernandez-arias"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        key = name.strip().lower().replace("_", "-").replace(" ", "-")
        aliases = {"han-liu": "hanliu", "fa": "fernandez-arias", "fernandezarias": "fernandez-arias"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {name!r}; choose one of {names}") from None


_FLOORS = {
    Variant.BOREL: math.e,
    Variant.NEVANLINNA: 1.0,
    Variant.HAYMAN: 1.0,
    Variant.HANLIU: 1.0,
    Variant.FERNANDEZ_ARIAS: 0.0,
}


@dataclass(frozen=True)
class VariantSpec:
    kind: Variant
    s: float | None = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Variant) else Variant.parse(str(self.kind))
        object.__setattr__(self, "kind", kind)
        if kind is Variant.FERNANDEZ_ARIAS:
            return
        if self.s is None or not self.s > 1:
            raise ValueError(f"{kind.value} needs a parameter s > 1, got {self.s}")
        object.__setattr__(self, "s", float(self.s))

    @classmethod
    def of(cls, name: str, s: float | None = None) -> "VariantSpec":
        return cls(Variant.parse(name), s)

    @property
    def floor(self) -> float:
        return _FLOORS[self.kind]

    def __str__(self):
        return self.kind.value if self.s is None else f"{self.kind.value}(s={self.s:g})"


class BelowFloorError(ValueError):
    def __init__(self, variant: VariantSpec, t, r=None):
        self.variant = variant
        self.t = t
        self.r = r
        where = f" at r={r}" if r is not None else ""
        super().__init__(f"T = {t}{where} is below the floor {variant.floor:g} required by {variant}")


class NotMonotoneError(ValueError):
    def __init__(self, report: MonotoneReport):
        self.report = report
        super().__init__(
            f"growth function is not increasing on the scanned range "
            f"(first decrease near r={report.first_violation})"
        )


class ShiftUnderflowError(ValueError):
    def __init__(self, r, step):
        self.r = r
        self.step = step
        super().__init__(
            f"step {mpmath.nstr(mpmath.mpf(step), 5)} at r={mpmath.nstr(mpmath.mpf(r), 15)} is below "
            f"10^-{MAX_SHIFT_DIGITS} relative to r; r + step cannot be formed"
        )


class CoarseGridWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# interval sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        items = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in items:
            if not lo <= hi:
                raise ValueError(f"bad interval [{lo}, {hi}]")
        for (_, hi), (lo, _) in zip(items, items[1:]):
            if not hi < lo:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", items)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "IntervalSet":
        """Sort and merge overlapping or touching intervals."""
        merged: list[list[float]] = []
        for lo, hi in sorted((float(a), float(b)) for a, b in pairs):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @property
    def total_length(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals)

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def contains_point(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def covers(self, other: "IntervalSet", slack: float = 0.0) -> bool:
        """True if every interval of ``other`` lies in one interval of self."""
        return all(
            any(lo - slack <= a and b <= hi + slack for lo, hi in self.intervals) for a, b in other
        )

    def clip(self, lo: float, hi: float) -> "IntervalSet":
        return IntervalSet.from_pairs((max(a, lo), min(b, hi)) for a, b in self if b >= lo and a <= hi)


def measure(intervals: IntervalSet) -> float:
    return intervals.total_length


# --------------------------------------------------------------------------
# variant formulas
# --------------------------------------------------------------------------


class _FloatMath:
    inf = math.inf
    mpf = float

    @staticmethod
    def exp(x):
        try:
            return math.exp(x)
        except OverflowError:
            return math.inf

    @staticmethod
    def log(x):
        return math.log(x)

    @staticmethod
    def power(x, y):
        try:
            return math.pow(x, y)
        except OverflowError:
            return math.inf


def _lib(x):
    ctx = getattr(x, "context", None)
    return ctx if ctx is not None else _FloatMath


def _check_floor(variant: VariantSpec, t, r=None):
    if t < variant.floor:
        raise BelowFloorError(variant, t, r)


def step_size(variant: VariantSpec, t):
    """Radius increment paired with the value ``t = T(r)``."""
    _check_floor(variant, t)
    m = _lib(t)
    kind = variant.kind
    if kind is Variant.BOREL:
        return 1 / m.log(t)
    if kind is Variant.NEVANLINNA:
        return 1 / m.power(t, variant.s)
    if kind in (Variant.HAYMAN, Variant.HANLIU):
        return 1 / t
    return m.exp(-t)


def rhs_threshold(variant: VariantSpec, t):
    """Value that ``T(r + step)`` must stay below outside the exceptional set."""
    _check_floor(variant, t)
    m = _lib(t)
    kind, s = variant.kind, variant.s
    if kind is Variant.BOREL:
        return m.power(t, s)
    if kind is Variant.NEVANLINNA:
        return t + 1
    if kind is Variant.HAYMAN:
        return s * t
    if kind is Variant.HANLIU:
        # 1/s at the working precision; a float exponent is off by ~1e-16 ln t
        return m.power(m.power(t, 1 / m.mpf(s)) + 1, s)
    return m.exp(t)


def _sample(T, r):
    try:
        return T(r)
    except EvaluationError as exc:
        if exc.r is None:
            exc.r = r
        raise


def _precise_shift(r, step, digits: int):
    """``r + step`` exactly representable, plus the digits needed to
    evaluate T there without losing the increment."""
    gap = max(0, int(mpmath.ceil(mpmath.log10(abs(r) + 1) - mpmath.log10(step)))) if step > 0 else 0
    if step <= 0 or gap > MAX_SHIFT_DIGITS:
        raise ShiftUnderflowError(r, step)
    r = _exact_mpf(r) if not isinstance(r, str) else mpmath.mpf(r)
    return mpmath.fadd(r, step, exact=True), digits + gap + 5


def violation_indicator(T, variant: VariantSpec, r, digits: int | None = None) -> bool:
    """True iff the variant's inequality is reversed at ``r``.

    With ``digits=None`` the machine-float path is tried first; equality
    within a relative ``EQUALITY_SLACK`` counts as reversed, so closed
    boundary points are not lost to rounding.  When floats cannot settle the
    comparison (the shift is below the resolution of r, or both sides agree
    to ``FLOAT_MARGIN``) and T has a precise path, the call is repeated
    there.  With ``digits`` set, T is evaluated at increasing precision until
    the two sides separate.

    When the step is so small that ``r + step`` needs more than
    ``MAX_SHIFT_DIGITS`` digits, only a float verdict of "not reversed" with
    a clear margin is returned (T is then taken as flat across the step);
    anything else raises ``ShiftUnderflowError``.
    """
    if digits is None:
        t = _sample(T, r)
        _check_floor(variant, t, r)
        step = step_size(variant, t)
        thr = rhs_threshold(variant, t)
        R = r + step
        lhs = _sample(T, R)
        settled = (
            math.isfinite(thr)
            and abs((R - r) - step) <= 1e-6 * step
            and abs(lhs - thr) > FLOAT_MARGIN * thr
        )
        if settled or not hasattr(T, "evaluate"):
            return lhs >= thr * (1 - EQUALITY_SLACK)
        try:
            return violation_indicator(T, variant, r, PRECISE_DIGITS)
        except ShiftUnderflowError:
            # increment beyond any precision: keep a clear float verdict
            if lhs < thr * (1 - FLOAT_MARGIN):
                return False
            raise
    ctx = mp_context()
    d = digits
    while True:
        t = T.evaluate(r, d)
        _check_floor(variant, t, r)
        saved = ctx.prec
        try:
            ctx.dps = d + 10
            step = step_size(variant, t)
            thr = rhs_threshold(variant, t)
        finally:
            ctx.prec = saved
        R, needed = _precise_shift(r, step, d)
        lhs = T.evaluate(R, needed)
        if ctx.isinf(lhs) or ctx.isinf(thr):
            return bool(lhs >= thr)
        try:
            ctx.dps = needed + 10
            margin = abs(lhs - thr)
            decided = margin > abs(thr) * ctx.mpf(10) ** (5 - d)
        finally:
            ctx.prec = saved
        if decided or d >= MAX_PRECISE_DIGITS:
            # an unresolved tie belongs to the closed exceptional set
            return bool(lhs >= thr) or not decided
        d = min(2 * d, MAX_PRECISE_DIGITS)


# --------------------------------------------------------------------------
# scanning
# --------------------------------------------------------------------------


def _bisect(pred: Callable[[float], bool], a: float, b: float, tol: float) -> tuple[float, float]:
    """Shrink [a, b] with pred(a) != pred(b) to width <= tol (or float limit)."""
    pa = pred(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if pred(m) == pa:
            a = m
        else:
            b = m
    return a, b


def _grid(r0: float, r_max: float, grid: int) -> list[float]:
    h = (r_max - r0) / (grid - 1)
    return [r0 + i * h for i in range(grid - 1)] + [r_max]


def scan_violations(
    T,
    variant: VariantSpec,
    r0: float,
    r_max: float,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
    check_monotone: bool = True,
) -> IntervalSet:
    """Closed intervals of [r0, r_max] where the inequality is reversed.

    The indicator is sampled on ``grid`` uniform points and every sign change
    is refined by bisection to width ``tol``; reported endpoints are the
    outer ends of the final brackets, so the result slightly over-covers.
    Violations narrower than the grid spacing can be missed; a
    ``CoarseGridWarning`` is issued when runs one grid cell wide appear.
    ``workers > 1`` splits the grid across threads with identical results.
    """
    if grid < 100:
        raise ValueError("grid must have at least 100 points")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not r0 < r_max:
        raise ValueError("need r0 < r_max")
    t0 = _sample(T, r0)
    _check_floor(variant, t0, r0)
    if check_monotone:
        report = validate_monotone(T, r0, r_max + step_size(variant, t0), grid)
        if not report.is_increasing:
            raise NotMonotoneError(report)

    xs = _grid(r0, r_max, grid)
    pred = lambda x: violation_indicator(T, variant, x)  # noqa: E731
    if workers > 1:
        size = -(-grid // workers)
        chunks = [xs[i : i + size] for i in range(0, grid, size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = [f for part in pool.map(lambda c: [pred(x) for x in c], chunks) for f in part]
    else:
        flags = [pred(x) for x in xs]

    pairs = []
    runs = _runs(flags)
    for i, j in runs:
        lo = r0 if i == 0 else _bisect(pred, xs[i - 1], xs[i], tol)[0]
        hi = r_max if j == grid - 1 else _bisect(pred, xs[j], xs[j + 1], tol)[1]
        pairs.append((lo, hi))

    narrow = [(i, j) for i, j in runs if i == j and 0 < i < grid - 1]
    gaps = [runs[k + 1][0] - runs[k][1] for k in range(len(runs) - 1)]
    if narrow or any(g <= 2 for g in gaps):
        warnings.warn(
            CoarseGridWarning(
                f"violation structure at grid resolution {(r_max - r0) / (grid - 1):.3g}; "
                "features narrower than one cell may be missed"
            ),
            stacklevel=2,
        )
    return IntervalSet.from_pairs(pairs)


def _runs(flags: Sequence[bool]) -> list[tuple[int, int]]:
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(flags) - 1))
    return runs


# --------------------------------------------------------------------------
# cover construction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverStep:
    r: float
    r_prime: float
    certified_length_bound: float
    threshold_value: float
    bracket_fallback: bool = False

    @property
    def length(self) -> float:
        return self.r_prime - self.r


@dataclass(frozen=True)
class CoverSequence:
    steps: tuple[CoverStep, ...]
    exhausted: bool
    r0: float
    r_max: float
    start_value: float
    chain_sum: float = field(init=False)

    def __post_init__(self):
        for a, b in zip(self.steps, self.steps[1:]):
            if not a.r_prime <= b.r:
                raise ValueError("cover steps must interleave r_j < r'_j <= r_{j+1}")
        for st in self.steps:
            if not st.r < st.r_prime:
                raise ValueError("cover steps must have r_j < r'_j")
        object.__setattr__(self, "chain_sum", math.fsum(st.certified_length_bound for st in self.steps))

    @property
    def intervals(self) -> IntervalSet:
        return IntervalSet.from_pairs((st.r, st.r_prime) for st in self.steps)

    @property
    def total_length(self) -> float:
        return math.fsum(st.length for st in self.steps)

    def __len__(self):
        return len(self.steps)


def chain_bound(variant: VariantSpec, start_value: float, j: int) -> float:
    """Certified bound on the j-th cover length (j >= 1) given T(r0).

    The chain is the induction of the lemma proofs seeded with the actual
    starting value instead of the bare floor: geometric for Borel/Hayman,
    shifted zeta terms for Nevanlinna/Han-Liu, and reciprocals of the
    exponential tower for Fernandez Arias.
    """
    if j < 1:
        raise ValueError("steps are numbered from 1")
    t0, s = start_value, variant.s
    kind = variant.kind
    if kind is Variant.BOREL:
        return 1.0 / (s ** (j - 1) * math.log(t0))
    if kind is Variant.HAYMAN:
        return 1.0 / (s ** (j - 1) * t0)
    if kind is Variant.NEVANLINNA:
        return (t0 + j - 1) ** -s
    if kind is Variant.HANLIU:
        return (t0 ** (1 / s) + j - 1) ** -s
    # A_0 = exp(t0), A_k = exp(A_{k-1}); bound is 1/A_{j-1}
    ctx = mp_context()
    a = ctx.exp(ctx.mpf(t0))
    for _ in range(j - 1):
        if a > 2**60:
            return 0.0  # below every representable step length
        a = ctx.exp(a)
    return float(1 / a)


def build_cover(
    T,
    variant: VariantSpec,
    r0: float,
    r_max: float,
    max_steps: int = 1000,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    violations: IntervalSet | None = None,
) -> CoverSequence:
    """Replay the inductive cover ``[r_j, r'_j]`` of the exceptional set.

    ``r_j`` is the leftmost violation at or after ``r'_{j-1}``; ``r'_j`` is
    the least r with ``T(r) >= threshold(T(r_j))``, located by bisection in
    ``[r_j, r_j + step(T(r_j))]``.  If rounding leaves that bracket without a
    crossing, ``r'_j`` falls back to the bracket end (flagged on the step).
    """
    if violations is None:
        violations = scan_violations(T, variant, r0, r_max, grid=grid, tol=tol)
    t0 = _sample(T, r0)
    _check_floor(variant, t0, r0)
    steps: list[CoverStep] = []
    prev = r0
    exhausted = False
    while True:
        start = next((max(lo, prev) for lo, hi in violations if hi >= prev), None)
        if start is None or start > r_max:
            exhausted = True
            break
        if len(steps) >= max_steps:
            break
        t = _sample(T, start)
        thr = rhs_threshold(variant, t)
        end = start + step_size(variant, t)
        fallback = False
        if _sample(T, end) >= thr:
            end = _bisect(lambda x: _sample(T, x) >= thr, start, end, tol)[1]
        else:
            fallback = True
        if end <= start:
            end = math.nextafter(start, math.inf)
        steps.append(
            CoverStep(
                r=start,
                r_prime=end,
                certified_length_bound=chain_bound(variant, t0, len(steps) + 1),
                threshold_value=float(thr),
                bracket_fallback=fallback,
            )
        )
        prev = end
    return CoverSequence(tuple(steps), exhausted, r0, r_max, float(t0))


# --------------------------------------------------------------------------
# theoretical measure bounds
# --------------------------------------------------------------------------


def measure_bound(variant: VariantSpec, start_T=None, digits: int = 30) -> Enclosure:
    """Upper bound on the exceptional-set measure for the variant.

    Geometric series s/(s-1) for Borel and Hayman, zeta(s) for Nevanlinna
    and Han-Liu, the tower constant for Fernandez Arias.  For Han-Liu a
    known starting value ``start_T = tau`` sharpens the bound to the Hurwitz
    value zeta(s, tau**(1/s)); ``start_T`` may be a number, decimal string,
    constant expression such as ``"(sqrt(2)+1)^2"``, or an Enclosure.
    """
    kind = variant.kind
    if kind in (Variant.BOREL, Variant.HAYMAN):
        return gamma_enclosure(variant.s, digits)
    if kind is Variant.FERNANDEZ_ARIAS:
        return tower_constant_Se(min(digits, 50))
    if kind is Variant.HANLIU and start_T is not None:
        ctx = _iv_context(digits + 15)
        tau = enclose(start_T, ctx)
        if not tau.a >= variant.floor:
            raise BelowFloorError(variant, start_T)
        a = ctx.exp(ctx.log(tau) / ctx.mpf(variant.s))
        return hurwitz_zeta(variant.s, Enclosure.from_interval(a, digits + 10), digits)
    return riemann_zeta(variant.s, digits)
