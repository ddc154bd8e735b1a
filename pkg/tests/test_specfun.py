import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borel_lab.specfun import (
    DomainError,
    Enclosure,
    doubling_tower,
    gamma_enclosure,
    gamma_series,
    hurwitz_zeta,
    riemann_zeta,
    tower_constant_Se,
    tower_dominates_doubling,
    tower_partial_sum,
    tower_tail_bound,
    tower_terms,
    zeta_gap_quadrature,
)

# independent oracles, evaluated once with mpmath at 70 digits or by brute force
PI2_6 = "1.644934066848226436472415166646025189218949901206798437735558229370007"
PI4_90 = "1.082323233711138191516003696541167902774750951918726907682976215444121"
PI2_6_MINUS_1 = "0.644934066848226436472415166646025189218949901206798437735558229370007"
ONE_AND_HALF_MINUS_ZETA3 = "0.2979430968404057146002618384885500092350137076595011182077284446581618"
TWO_MINUS_PI2_6 = "0.355065933151773563527584833353974810781050098793201562264441770629993"
HURWITZ_2_SILVER = "0.5114791294395424054028105339511174664407395478597350999537556431826256"
SE_FOUR_TERMS = "1.43386773918949380480762150583853460596790538176893403246841514838296"
SE_THREE_TERMS = "1.433867477016754858672313957758307292384388179284564270910310343264198"
E_MINUS_E_TO_E = "2.621727389461353075480802273135835172024e-7"


def test_gamma_series():
    assert gamma_series(2) == 2
    assert gamma_series(3) == 1.5
    assert 1 < gamma_series(1e6) < gamma_series(1e5)


def test_gamma_diverges_at_one():
    with pytest.raises(DomainError, match="linearly"):
        gamma_series(1)


def test_zeta_closed_forms():
    assert PI2_6 in riemann_zeta(2)
    assert PI4_90 in riemann_zeta(4)


def test_zeta_three_halves_against_brute_force():
    # 10^7 terms, tail bracketed by the integrals from N+1 and from N
    n = 10**7
    partial = math.fsum((np.arange(1, n + 1, dtype=np.float64) ** -1.5).tolist())
    lo, hi = partial + 2 / math.sqrt(n + 1), partial + 2 / math.sqrt(n)
    z = riemann_zeta(1.5, 20)
    slack = 1e-12  # float summation error of the partial sum
    assert lo - slack <= float(z.lo) and float(z.hi) <= hi + slack


def test_hurwitz_examples():
    assert hurwitz_zeta(2, 1).lo == pytest.approx(riemann_zeta(2).lo, rel=1e-28)
    silver = hurwitz_zeta(2, "sqrt(2)+1")
    assert HURWITZ_2_SILVER in silver
    assert silver.below("0.52")
    assert PI2_6_MINUS_1 in hurwitz_zeta(2, 2)


def test_hurwitz_against_brute_force():
    # 10^6 terms, tail in [1/(M+a), 1/(M+a-1)]
    a = math.sqrt(2) + 1
    m = 10**6
    partial = math.fsum(((np.arange(m, dtype=np.float64) + a) ** -2).tolist())
    z = hurwitz_zeta(2, a, 20)
    assert partial + 1 / (m + a) - 1e-12 <= float(z.lo)
    assert float(z.hi) <= partial + 1 / (m + a - 1) + 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        riemann_zeta(1)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 0)
    with pytest.raises(DomainError):
        zeta_gap_quadrature(0.5)


@pytest.mark.parametrize("digits", [15, 30, 50])
def test_enclosure_width_meets_target(digits):
    for s, a in [(2, 1), (1.5, 0.5), (3, "sqrt(2)+1"), (10, 7)]:
        z = hurwitz_zeta(s, a, digits)
        assert z.width <= mpmath.mpf(10) ** (-digits + 2)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.05, 12), st.floats(0.1, 20))
def test_recurrence(s, a):
    # zeta(s, a) = a^-s + zeta(s, a+1)
    lhs = hurwitz_zeta(s, a, 20)
    with mpmath.workdps(40):
        rhs = hurwitz_zeta(s, mpmath.fadd(a, 1, exact=True), 20) + Enclosure.point(mpmath.power(mpmath.mpf(a), -s), 20)
        assert lhs.lo <= rhs.hi + abs(rhs.hi) * mpmath.mpf(10) ** -30
        assert rhs.lo <= lhs.hi + abs(lhs.hi) * mpmath.mpf(10) ** -30


@settings(max_examples=25, deadline=None)
@given(st.floats(1.05, 12), st.floats(0.1, 20), st.floats(0.01, 5))
def test_decreasing_in_shift(s, a, da):
    assert hurwitz_zeta(s, mpmath.fadd(a, da, exact=True), 20).hi < hurwitz_zeta(s, a, 20).lo


def test_gap_quadrature_examples():
    assert TWO_MINUS_PI2_6 in zeta_gap_quadrature(2)
    assert ONE_AND_HALF_MINUS_ZETA3 in zeta_gap_quadrature(3)


@pytest.mark.parametrize("s", [1.01, 1.5, 2, 7, 40])
def test_gap_equals_gamma_minus_zeta(s):
    gap = zeta_gap_quadrature(s, 25)
    diff = gamma_enclosure(s, 25) - riemann_zeta(s, 25)
    assert gap.lo > 0
    assert gap.lo <= diff.hi and diff.lo <= gap.hi


def test_tower_constant():
    se = tower_constant_Se(12)
    assert se.inside("1.4338677391", "1.4338677392")
    assert SE_FOUR_TERMS in tower_constant_Se(30)
    assert SE_THREE_TERMS in tower_partial_sum(3)
    assert tower_partial_sum(5).inside("1.43386773918", "1.43386773919")


def test_tower_terms():
    assert tower_terms(3).reciprocal_log10 == pytest.approx(math.log10(float(E_MINUS_E_TO_E)))
    four = tower_terms(4)
    assert four.value is None
    assert four.log_value == pytest.approx(3814279.10476, rel=1e-11)
    assert four.reciprocal_log10 == pytest.approx(-1656520.37, abs=0.01)
    assert tower_terms(7).log_depth == 4


def test_doubling_tower_and_tail():
    assert doubling_tower(4) == 65536
    assert doubling_tower(5).bit_length() == 65537
    assert all(tower_dominates_doubling(n) for n in range(1, 6))
    bound = tower_tail_bound(5)
    assert bound <= -19728
    assert bound == pytest.approx(-65535 * math.log10(2), abs=1e-9)
    with pytest.raises(OverflowError):
        doubling_tower(6)


def test_enclosure_comparisons_are_exact():
    e = Enclosure.point(mpmath.mpf("0.1"), 30)
    # the binary 0.1 is above the decimal 0.1
    assert "0.1" not in e
    assert e.inside(lower="0.1")
    assert e.to_dict()["digits"] == 30
