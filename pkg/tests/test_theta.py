import math
from fractions import Fraction

import pytest

from nctorus.theta import PrecisionExhausted, ThetaParam, parse_theta


def test_golden_convergents_are_fibonacci():
    th = ThetaParam.preset("golden")
    assert th.convergents_pq(6) == ((0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13))


def test_preset_values():
    assert ThetaParam.preset("golden").value == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    assert ThetaParam.preset("sqrt2").value == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


def test_unknown_preset_rejected():
    with pytest.raises(ValueError):
        ThetaParam.preset("e")


def test_cf_terms_validated():
    with pytest.raises(ValueError):
        ThetaParam.from_cf([])
    with pytest.raises(ValueError):
        ThetaParam.from_cf([1, 0, 2])


def test_sign_linear_exact():
    th = ThetaParam.preset("golden")
    # theta^2 = 1 - theta for the golden value: 1 - theta - theta^2 = 0, but
    # linear probes around it must still resolve
    assert th.sign_linear(-1, 2) > 0  # 2 theta > 1
    assert th.sign_linear(2, -3) > 0  # 3 theta < 2
    assert th.sign_linear(-2, 3) < 0
    assert th.sign_linear(0, 0) == 0
    # very tight probe: F_20 theta vs F_21 (consecutive Fibonacci)
    assert th.sign_linear(-10946, 17711) != 0


def test_sign_linear_accepts_fractions():
    th = ThetaParam.preset("sqrt2")
    assert th.sign_linear(Fraction(-2, 5), 1) > 0   # theta > 2/5
    assert th.sign_linear(Fraction(1, 2), -1) > 0   # theta < 1/2


def test_floor_linear():
    th = ThetaParam.preset("golden")
    for b in range(-30, 31):
        assert th.floor_linear(b) == math.floor(b * (math.sqrt(5) - 1) / 2)


def test_reflect_golden():
    th = ThetaParam.preset("golden")
    r = th.reflect()
    assert r.value == pytest.approx(1 - th.value, abs=1e-14)
    assert r.cf_terms[:3] == (2, 1, 1)


def test_reflect_sqrt2():
    th = ThetaParam.preset("sqrt2")
    r = th.reflect()
    assert r.value == pytest.approx(2 - math.sqrt(2), abs=1e-14)
    assert r.cf_terms[:4] == (1, 1, 2, 2)


def test_double_reflect_roundtrip():
    th = ThetaParam.preset("golden")
    rr = th.reflect().reflect()
    assert rr.cf_terms[:100] == th.cf_terms[:100]


def test_from_decimal_bounds_are_honest():
    th = ThetaParam.from_decimal("0.6180339887")
    assert th.sign_linear(-1, 2) > 0
    # a question finer than the supplied precision must fail loudly
    with pytest.raises(PrecisionExhausted):
        # 0.61803398870000000001-ish probe: needs ~1e-20 resolution
        th.sign_linear(Fraction(-6180339887_0000000001, 10**20), 1)


def test_from_decimal_rejects_out_of_range():
    with pytest.raises(ValueError):
        ThetaParam.from_decimal("1.5")


def test_parse_theta_forms():
    assert parse_theta("golden").name == "golden"
    assert parse_theta("cf:1,1,1,1,1,1,1,1").cf_terms == (1,) * 8
    assert parse_theta("0.4142").value == pytest.approx(0.4142, abs=1e-4)


def test_convergent_depth_errors():
    th = ThetaParam.from_cf([1, 1, 1])
    with pytest.raises(PrecisionExhausted):
        th.convergents_pq(10)
