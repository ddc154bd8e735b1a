import math
import warnings

import pytest

from borel_lab.expr import parse_growth
from borel_lab.lemma import (
    BelowFloorError,
    CoarseGridWarning,
    IntervalSet,
    NotMonotoneError,
    Variant,
    VariantSpec,
    build_cover,
    chain_bound,
    measure,
    measure_bound,
    rhs_threshold,
    scan_violations,
    step_size,
    violation_indicator,
)

LN_INV_LN2 = 0.3665129205816643  # ln(1/ln 2)

EXP = parse_growth("exp(r)")
HAYMAN2 = VariantSpec.of("hayman", 2)
HANLIU2 = VariantSpec.of("hanliu", 2)


def test_variant_parsing():
    assert Variant.parse("Han-Liu") is Variant.HANLIU
    assert Variant.parse("fa") is Variant.FERNANDEZ_ARIAS
    with pytest.raises(ValueError):
        Variant.parse("picard")
    with pytest.raises(ValueError):
        VariantSpec.of("hayman", 1)
    assert VariantSpec.of("fernandez-arias").s is None


def test_step_sizes():
    assert step_size(HAYMAN2, 1.0) == 1
    assert step_size(VariantSpec.of("nevanlinna", 2), 10.0) == pytest.approx(0.01)
    assert step_size(VariantSpec.of("fa"), 0.0) == 1


def test_thresholds():
    assert rhs_threshold(HANLIU2, 2.0) == pytest.approx((math.sqrt(2) + 1) ** 2)
    assert rhs_threshold(HAYMAN2, 2.0) == 4
    assert rhs_threshold(HANLIU2, 1.0) == 4


def test_below_floor_is_rejected():
    with pytest.raises(BelowFloorError):
        step_size(VariantSpec.of("borel", 2), 2.0)


def test_violation_indicator_examples():
    assert violation_indicator(EXP, HAYMAN2, 0.2)
    assert not violation_indicator(EXP, HAYMAN2, 1.0)
    assert not violation_indicator(EXP, HANLIU2, 0.0)


def test_precise_indicator_matches_float_away_from_boundary():
    for r in (0.1, 0.3, 0.4, 2.0):
        assert violation_indicator(EXP, HAYMAN2, r, digits=40) == violation_indicator(EXP, HAYMAN2, r)


def test_scan_hayman_closed_form():
    found = scan_violations(EXP, HAYMAN2, 0, 5)
    assert len(found) == 1
    lo, hi = found.intervals[0]
    assert lo == 0
    assert hi == pytest.approx(LN_INV_LN2, abs=1e-9)
    assert hi >= LN_INV_LN2 - 1e-15  # outer bracket end over-covers


def test_scan_hanliu_empty():
    assert not scan_violations(EXP, HANLIU2, 0, 5)


def test_scan_fa_identity_empty():
    assert not scan_violations(parse_growth("r"), VariantSpec.of("fa"), 1, 20)


def test_scan_rejects_decreasing():
    with pytest.raises(NotMonotoneError):
        scan_violations(parse_growth("exp(-r)+1"), HAYMAN2, 0, 5)


def test_threads_give_identical_sets():
    T = parse_growth("exp(r) + sqrt(r)")
    a = scan_violations(T, HAYMAN2, 0, 8, grid=20_000)
    b = scan_violations(T, HAYMAN2, 0, 8, grid=20_000, workers=4)
    assert a == b


def test_coarse_grid_warning_on_narrow_run():
    # a steep ramp near r = 3 gives a violation about 0.009 wide
    T = parse_growth("100 + r + 200*exp(-exp(-(r-3)*1000))")
    with pytest.warns(CoarseGridWarning):
        coarse = scan_violations(T, HAYMAN2, 1.495, 4.495, grid=101)
    with warnings.catch_warnings():
        warnings.simplefilter("error", CoarseGridWarning)
        fine = scan_violations(T, HAYMAN2, 1.495, 4.495)
    assert fine.covers(coarse, slack=1e-11) and coarse.covers(fine, slack=1e-11)


def test_cover_hayman_single_step():
    cov = build_cover(EXP, HAYMAN2, 0, 5)
    assert cov.exhausted and len(cov) == 1
    step = cov.steps[0]
    assert step.r == 0
    assert step.r_prime == pytest.approx(math.log(2), abs=1e-9)
    assert step.length <= step.certified_length_bound


def test_cover_borel_from_floor():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoarseGridWarning)
        found = scan_violations(EXP, VariantSpec.of("borel", 2), 1, 5)
        cov = build_cover(EXP, VariantSpec.of("borel", 2), 1, 5, violations=found)
    assert found.intervals[0][0] == 1 and found.total_length < 1e-9
    assert len(cov) == 1
    assert cov.steps[0].r_prime == pytest.approx(2.0, abs=1e-9)


def test_chain_bounds_reduce_to_floor_chain():
    assert chain_bound(HAYMAN2, 1.0, 3) == 0.25
    assert chain_bound(HANLIU2, 1.0, 2) == 0.25
    assert chain_bound(VariantSpec.of("nevanlinna", 2), 1.0, 3) == pytest.approx(1 / 9)
    assert chain_bound(VariantSpec.of("borel", 2), math.e, 2) == pytest.approx(0.5)
    assert chain_bound(VariantSpec.of("fa"), 0.0, 1) == 1
    assert chain_bound(VariantSpec.of("fa"), 0.0, 2) == pytest.approx(1 / math.e)
    assert chain_bound(VariantSpec.of("fa"), 0.0, 6) == 0.0


def test_interval_set_measure():
    assert measure(IntervalSet()) == 0
    assert measure(IntervalSet(((0, LN_INV_LN2),))) == LN_INV_LN2
    assert measure(IntervalSet.from_pairs([(3, 4.5), (1, 2)])) == 2.5
    assert IntervalSet.from_pairs([(0, 1), (1, 2)]).intervals == ((0, 2),)
    with pytest.raises(ValueError):
        IntervalSet(((0, 2), (1, 3)))


def test_measure_bounds():
    assert measure_bound(HAYMAN2).lo == 2
    silver = measure_bound(HANLIU2, "(sqrt(2)+1)^2")
    assert silver.below("0.52")
    assert measure_bound(VariantSpec.of("fa")).inside("1.4338677391", "1.4338677392")
