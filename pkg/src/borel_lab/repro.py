"""Certified checks of the reference numeric claims.

``example6_scenario`` rebuilds the fast-growth example: T(r) = e^{d(r-r0)}
with T(r0) = 1 and T(r0') = (sqrt 2 + 1)^2, the short set below the
crossover value, and the Hurwitz-bounded exceptional set above it.
``reproduce_all`` checks every reference constant against certified
enclosures and returns one entry per claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import __version__
from .bounds import crossover_threshold
from .expr import parse_growth
from .lemma import VariantSpec, _bisect, build_cover, scan_violations
from .specfun import (
    Enclosure,
    _iv_context,
    _to_fraction,
    gamma_enclosure,
    gamma_series,
    hurwitz_zeta,
    riemann_zeta,
    doubling_tower,
    tower_constant_Se,
    tower_dominates_doubling,
    tower_partial_sum,
    tower_tail_bound,
    zeta_gap_quadrature,
)

__all__ = [
    "ScenarioError",
    "Check",
    "ScenarioReport",
    "ReproEntry",
    "ReproReport",
    "example6_scenario",
    "reproduce_all",
    "TOOL_NAME",
]

TOOL_NAME = "borel-lab"

CROSSOVER_S2 = "(sqrt(2)+1)^2"
HURWITZ_SHIFT = "sqrt(2)+1"
ZETA_BELOW_GAMMA_GRID = (1.01, 1.1, 1.5, 2, 3, 5, 10, 50)
GAP_IDENTITY_GRID = (1.5, 2, 3, 5, 10)

# decimal claims under test
SE_OPEN = ("1.4338677391", "1.4338677392")
SE4_OPEN = ("1.43386773918", "1.43386773919")
TAIL_LOG10 = -19728
HURWITZ_CAP = "0.52"
GAP_CAP = "1.1334549375"
D_FLOOR = "1.5551982843"
D_ROUND = "1.556"
R0_PRIME_CAP = "2.134"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Check:
    id: str
    passed: bool
    lhs: str
    rhs: str


def _dec(x, digits: int = 20, rounding: str = "nearest") -> str:
    if isinstance(x, Enclosure):
        return x.hi_str(digits) if rounding == "up" else x.lo_str(digits)
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False) if hasattr(x, "_mpf_") else str(x)


@dataclass(frozen=True)
class ScenarioReport:
    r0: float
    r0_prime: float
    gap: float
    d: float
    E_doubleprime_measure: float
    E_prime_measure: float
    E_prime_bound: Enclosure
    total_bound: Enclosure
    cover_steps: int
    checks: tuple[Check, ...]
    growth: str

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "T": self.growth,
            "r0": repr(self.r0),
            "r0_prime": repr(self.r0_prime),
            "gap": repr(self.gap),
            "d": repr(self.d),
            "E_doubleprime_measure": repr(self.E_doubleprime_measure),
            "E_prime_measure": repr(self.E_prime_measure),
            "E_prime_bound": self.E_prime_bound.to_dict(),
            "total_bound": self.total_bound.to_dict(),
            "cover_steps": self.cover_steps,
            "checks": [
                {"id": c.id, "pass": c.passed, "lhs": c.lhs, "rhs": c.rhs} for c in self.checks
            ],
            "all_pass": self.all_pass,
        }


def _le(a, b) -> bool:
    """Exact ``a <= b`` for floats, decimal strings, or mpf."""
    return _frac(a) <= _frac(b)


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return _to_fraction(x)


def example6_scenario(
    r0: float = 1.0,
    gap=None,
    digits: int = 30,
    *,
    d=None,
    horizon: float = 10.0,
    grid: int = 10_000,
) -> ScenarioReport:
    """Rebuild the s = 2 fast-growth scenario.

    Give either ``gap = r0' - r0`` or the growth rate ``d`` (then
    ``gap = 2 ln(sqrt2 + 1)/d``); with neither, the largest admissible gap
    (the certified lower end of zeta(2) - zeta(2, sqrt2 + 1)) is used.
    A gap above that difference breaks the hypothesis and is rejected.
    """
    if not r0 > 0:
        raise ScenarioError("r0 must be positive")
    if gap is not None and d is not None:
        raise ScenarioError("give gap or d, not both")
    ctx = _iv_context(digits + 20)
    zeta2 = riemann_zeta(2, digits)
    zeta_shift = hurwitz_zeta(2, HURWITZ_SHIFT, digits)
    diff = zeta2 - zeta_shift
    log_term = 2 * ctx.log(ctx.sqrt(2) + 1)

    if d is not None:
        d_iv = ctx.mpf(str(d)) if isinstance(d, (str, float, int)) else ctx.mpf(d)
        gap_enc = Enclosure.from_interval(log_term / d_iv, digits)
        if not _le(gap_enc.hi, diff.lo):
            raise ScenarioError(
                f"d = {d} gives gap {gap_enc.hi_str(15)} above zeta(2) - zeta(2, sqrt2+1) "
                f"in [{diff.lo_str(15)}, {diff.hi_str(15)}]"
            )
        gap_value = gap_enc.hi
    else:
        gap_value = diff.lo if gap is None else gap
        if not _frac(str(gap_value) if isinstance(gap_value, float) else gap_value) > 0:
            raise ScenarioError("gap must be positive")
        if not _le(gap_value, diff.lo):
            raise ScenarioError(
                f"gap {gap_value} exceeds zeta(2) - zeta(2, sqrt2+1) in "
                f"[{diff.lo_str(15)}, {diff.hi_str(15)}]; the scenario needs gap <= that difference"
            )
    gap_iv = ctx.mpf(gap_value)
    d_enc = Enclosure.from_interval(log_term / gap_iv, digits)

    d_text = mpmath.nstr(d_enc.mid, 25, strip_zeros=False)
    growth = parse_growth(f"exp({d_text} * (r - {r0!r}))")
    gap_f = float(gap_value)
    r0_prime = r0 + gap_f
    crossover = crossover_threshold(2.0)
    variant = VariantSpec.of("hanliu", 2)

    # E'': where 1 <= T < crossover, i.e. [r0, r0') for this T
    lo, hi = _bisect(lambda x: growth(x) >= crossover, r0, r0 + 2 * gap_f, 1e-13)
    e_dd = hi - r0

    e_prime = scan_violations(growth, variant, r0_prime, r0_prime + horizon, grid=grid)
    cover = build_cover(growth, variant, r0_prime, r0_prime + horizon, violations=e_prime)
    total = Enclosure.from_interval(gap_iv + zeta_shift.to_interval(ctx), digits)

    checks = [
        Check("T_at_r0_is_1", abs(growth(r0) - 1.0) <= 1e-9, repr(growth(r0)), "1"),
        Check("T_at_r0prime_is_crossover", abs(growth(r0_prime) - crossover) <= 1e-9 * crossover,
              repr(growth(r0_prime)), repr(crossover)),
        Check("gap_admissible", _le(gap_value, diff.lo), _dec(gap_value), diff.lo_str()),
        Check("d_above_floor", d_enc.inside(lower=D_FLOOR), d_enc.lo_str(), D_FLOOR),
        Check("E_doubleprime_is_gap", abs(e_dd - gap_f) <= 1e-9, repr(e_dd), repr(gap_f)),
        Check("E_prime_within_hurwitz", _le(e_prime.total_length, zeta_shift.hi),
              repr(e_prime.total_length), zeta_shift.hi_str()),
        Check("cover_chain_within_hurwitz", _le(cover.chain_sum, zeta_shift.hi),
              repr(cover.chain_sum), zeta_shift.hi_str()),
        Check("E_tilde_within_zeta2", total.below(_frac(zeta2.hi)) and zeta2.below("2"),
              total.hi_str(), zeta2.hi_str()),
    ]
    return ScenarioReport(
        r0=float(r0),
        r0_prime=r0_prime,
        gap=gap_f,
        d=float(d_enc.mid),
        E_doubleprime_measure=e_dd,
        E_prime_measure=e_prime.total_length,
        E_prime_bound=zeta_shift,
        total_bound=zeta2,
        cover_steps=len(cover),
        checks=tuple(checks),
        growth=growth.text,
    )


# --------------------------------------------------------------------------
# full reproduction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReproEntry:
    id: str
    claim: str
    computed_lo: str
    computed_hi: str
    passed: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "claim": self.claim,
            "computed_lo": self.computed_lo,
            "computed_hi": self.computed_hi,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ReproReport:
    digits: int
    entries: tuple[ReproEntry, ...]
    all_pass: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "all_pass", all(e.passed for e in self.entries))

    def to_dict(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "digits": self.digits,
            "all_pass": self.all_pass,
            "entries": [e.to_dict() for e in self.entries],
        }


def _enc_entry(id_, claim, enc: Enclosure, passed: bool) -> ReproEntry:
    return ReproEntry(id_, claim, enc.lo_str(), enc.hi_str(), bool(passed))


def reproduce_all(digits: int = 30) -> ReproReport:
    """Check every reference constant; failures become entries, not errors."""
    if digits < 15:
        raise ValueError("digits must be >= 15")
    se_digits = min(digits, 50)
    ctx = _iv_context(digits + 20)
    entries: list[ReproEntry] = []

    se = tower_constant_Se(se_digits)
    entries.append(_enc_entry("Se_interval", "S_e in (1.4338677391, 1.4338677392)", se, se.inside(*SE_OPEN)))
    se4 = tower_partial_sum(5, se_digits)
    entries.append(
        _enc_entry("Se4_interval", "S_e(4) in (1.43386773918, 1.43386773919)", se4, se4.inside(*SE4_OPEN))
    )

    tail = tower_tail_bound(5)
    tail_s = mpmath.nstr(tail, 12)
    entries.append(ReproEntry("tail_bound", "S_e - S_e(4) < 2/b_5 = 2^-65535 < 10^-19728",
                              tail_s, tail_s, bool(tail <= TAIL_LOG10)))
    ok = [tower_dominates_doubling(n) for n in range(1, 5)]
    entries.append(ReproEntry("a_exceeds_b", "a_n > b_n for n = 1..4",
                              str(sum(ok)), str(len(ok)), all(ok)))
    b4 = doubling_tower(4)
    entries.append(ReproEntry("b4_exact", "b_4 = 2^16 = 65536", str(b4), str(b4), b4 == 65536))

    zeta2 = riemann_zeta(2, digits)
    pi2_6 = Enclosure.from_interval(ctx.pi**2 / 6, digits)
    consistent = zeta2.lo <= pi2_6.hi and pi2_6.lo <= zeta2.hi
    entries.append(_enc_entry("zeta2_pi2_6", "zeta(2) = pi^2/6 < 2", zeta2, consistent and zeta2.below("2")))

    zeta_shift = hurwitz_zeta(2, HURWITZ_SHIFT, digits)
    entries.append(_enc_entry("hurwitz_052", "zeta(2, sqrt2+1) <= 0.52", zeta_shift, zeta_shift.below(HURWITZ_CAP)))
    diff = zeta2 - zeta_shift
    entries.append(
        _enc_entry("zeta2_gap", "zeta(2) - zeta(2, sqrt2+1) < 1.1334549375", diff, diff.inside(upper=GAP_CAP))
    )

    log_term = 2 * ctx.log(ctx.sqrt(2) + 1)
    d_min = Enclosure.from_interval(log_term / diff.to_interval(ctx), digits)
    entries.append(
        _enc_entry("d_bound", "d = 2 ln(sqrt2+1)/(r0'-r0) > 1.5551982843 for every admissible gap",
                   d_min, d_min.inside(lower=D_FLOOR))
    )
    r0p = Enclosure.from_interval(1 + log_term / ctx.mpf(D_ROUND), digits)
    entries.append(_enc_entry("r0prime_2134", "d = 1.556 gives r0' <= 2.134", r0p, r0p.below(R0_PRIME_CAP)))
    gap_round = Enclosure.from_interval(log_term / ctx.mpf(D_ROUND), digits)
    entries.append(
        _enc_entry("d_1556_admissible", "d = 1.556 exceeds the floor and keeps r0'-r0 admissible",
                   gap_round, Fraction(D_ROUND) > Fraction(D_FLOOR) and _le(gap_round.hi, diff.lo))
    )

    his, ok = [], True
    for s in ZETA_BELOW_GAMMA_GRID:
        z = riemann_zeta(s, digits)
        ok = ok and _frac(z.hi) < Fraction(gamma_series(Fraction(str(s))))
        his.append(z.hi)
    entries.append(ReproEntry("zeta_below_gamma", "zeta(s) < s/(s-1) on s in " + ", ".join(map(str, ZETA_BELOW_GAMMA_GRID)),
                              _dec(min(his)), _dec(max(his)), ok))

    worst, ok = mpmath.mpf(0), True
    for s in GAP_IDENTITY_GRID:
        gap = zeta_gap_quadrature(s, digits)
        z = riemann_zeta(s, digits)
        gamma = gamma_enclosure(s, digits)
        with mpmath.workdps(digits + 20):
            err = abs(gap.mid - (gamma.mid - z.mid))
            slack = gap.width + z.width + gamma.width
        ok = ok and err <= slack and gap.lo > 0
        worst = max(worst, err)
    entries.append(ReproEntry("gap_identity", "s/(s-1) - zeta(s) = s int_1^inf (t-[t]) t^-(s+1) dt > 0",
                              "0", _dec(worst, 5), ok))

    scenario = example6_scenario(1.0, None, digits)
    entries.append(ReproEntry("example6_chain", "|E''| + zeta(2, sqrt2+1) <= zeta(2) = pi^2/6 < 2",
                              repr(scenario.E_doubleprime_measure), scenario.total_bound.hi_str(),
                              scenario.all_pass))

    cross = crossover_threshold(2.0)
    target = (math.sqrt(2) + 1) ** 2
    entries.append(ReproEntry("crossover_s2", "(1/(2^(1/2)-1))^2 = (sqrt2+1)^2",
                              repr(cross), repr(target), abs(cross - target) <= 1e-12 * target))
    g2 = gamma_enclosure(2, digits)
    entries.append(_enc_entry("hayman_measure_2", "gamma(2) = 2, the classical measure 2", g2, g2.lo == g2.hi == 2))
    return ReproReport(digits, tuple(entries))
