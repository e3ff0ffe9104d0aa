"""Reproducible sampling, certified digit streams, tail estimates."""

import math
from fractions import Fraction

import pytest

from ecfrac.expansion import expand_rational
from ecfrac.montecarlo import (LOWER, UPPER, SampleConfig, TailRequest,
                               clopper_pearson, clt_report, default_bits,
                               estimate_event, ldp_slope, lln_report,
                               sample_dyadic, simulate_digits, tail_counts,
                               tail_threshold)


def test_default_bits_is_ceil():
    assert default_bits(1) == 3       # ceil(2.2)
    assert default_bits(3) == 20      # ceil(19.8)
    assert default_bits(10) == 220
    assert default_bits(40) == 3520


def test_sample_dyadic_range_and_determinism():
    config = SampleConfig(seed=123, trials=500, depth=2, bits=16)
    first = list(sample_dyadic(config))
    second = list(sample_dyadic(config))
    assert first == second
    assert len(first) == 500
    for x in first:
        assert 0 < x <= 1
        assert x.denominator & (x.denominator - 1) == 0  # power of two
        assert x.denominator <= 2**16
    assert len(set(first)) > 400  # 16-bit cells, few collisions


def test_different_seeds_differ():
    a = list(sample_dyadic(SampleConfig(seed=1, trials=50, depth=1, bits=32)))
    b = list(sample_dyadic(SampleConfig(seed=2, trials=50, depth=1, bits=32)))
    assert a != b


def test_workers_do_not_change_results():
    base = SampleConfig(seed=9, trials=300, depth=3, bits=64)
    parallel = SampleConfig(seed=9, trials=300, depth=3, bits=64, workers=4)
    event = lambda depth, e: e.digits[0] >= 2 if e.certified_count >= 1 else None
    assert estimate_event(base, event) == estimate_event(parallel, event)


def test_simulate_digits_certifies_true_prefix():
    # every point of the cell, in particular the endpoints, must share the
    # certified prefix
    for k in (0, 7, 100, 2**12 - 1):
        x = Fraction(k + 1, 2**12)
        cell = simulate_digits(x, bits=12, depth=6)
        for point in (x, min(x + Fraction(1, 2**12), Fraction(1))):
            full = expand_rational(point, max_digits=64)
            m = cell.certified_count
            assert full.digits[:m] == cell.digits[:m]


def _binom_cdf(n: int, p: Fraction, h: int) -> Fraction:
    q = 1 - p
    return sum(Fraction(math.comb(n, i)) * p**i * q**(n - i)
               for i in range(h + 1))


def test_clopper_pearson_against_exact_binomial():
    # defining property of the exact CI, checked in exact arithmetic:
    # P(Bin(n, hi) <= h) <= alpha/2 and P(Bin(n, lo) >= h) <= alpha/2
    alpha = Fraction(1, 100)
    for n, h in [(20, 7), (50, 1), (30, 29), (100, 50)]:
        lo, hi = clopper_pearson(h, n)
        assert 0 <= lo <= Fraction(h, n) <= hi <= 1
        if h < n:
            assert _binom_cdf(n, hi, h) <= alpha / 2
        if h > 0:
            assert 1 - _binom_cdf(n, lo, h - 1) <= alpha / 2


def test_clopper_pearson_edges():
    lo, hi = clopper_pearson(0, 40)
    assert lo == 0 and hi < Fraction(1, 4)
    lo, hi = clopper_pearson(40, 40)
    assert hi == 1 and lo > Fraction(3, 4)
    with pytest.raises(ValueError):
        clopper_pearson(5, 4)


def test_estimate_event_constant_events():
    config = SampleConfig(seed=4, trials=100, depth=1, bits=32)
    est = estimate_event(config, lambda depth, e: True)
    assert est.hits == est.trials == 100 and est.ci_hi == 1
    est = estimate_event(config, lambda depth, e: False)
    assert est.hits == 0 and est.ci_lo == 0


def test_estimate_event_uncertified_counted():
    config = SampleConfig(seed=4, trials=100, depth=1, bits=32)

    def flaky(depth, e, box=[0]):
        box[0] += 1
        return None if box[0] % 5 == 0 else True

    est = estimate_event(config, flaky)
    assert est.uncertified == 20
    assert est.trials == 80


def test_estimate_event_all_uncertified_raises():
    config = SampleConfig(seed=4, trials=10, depth=1, bits=32)
    with pytest.raises(RuntimeError):
        estimate_event(config, lambda depth, e: None)


def test_calibration_exact_value_in_ci():
    # P(b_1 >= 2) = P(x <= 1/2) = 1/2 exactly; the 99% CI must cover it in
    # at least 95 of 100 seeded runs
    exact = Fraction(1, 2)
    covered = 0
    for seed in range(100):
        config = SampleConfig(seed=seed, trials=200, depth=1, bits=64)
        est = estimate_event(
            config,
            lambda depth, e: e.digits[0] >= 2 if e.certified_count else None)
        covered += est.ci_lo <= exact <= est.ci_hi
    assert covered >= 95, covered


def test_monotone_events():
    # {b_n >= t} shrinks as t grows; on shared trials the hit counts must
    # be monotone, with no sampling noise caveat
    config = SampleConfig(seed=31, trials=400, depth=4)
    hits = []
    for t in (2, 3, 5, 9):
        est = estimate_event(
            config,
            lambda depth, e, t=t: e.digits[-1] >= t
            if e.certified_count == depth else None)
        hits.append(est.hits)
    assert hits == sorted(hits, reverse=True)


def test_tail_threshold_golden():
    # lower tail: digits <= floor(exp(n(1 - eps))); upper: > floor(exp(n(1 + eps)))
    assert tail_threshold(TailRequest(LOWER, Fraction(1, 2), 10)) == 148
    assert tail_threshold(TailRequest(UPPER, Fraction(1, 2), 10)) == 3269018
    assert tail_threshold(TailRequest(LOWER, Fraction(1), 4)) == 1  # exp(0)
    assert tail_threshold(TailRequest(UPPER, Fraction(1), 3)) == 404


def test_tail_request_validation():
    with pytest.raises(ValueError):
        TailRequest("sideways", Fraction(1, 2), 5)
    with pytest.raises(ValueError):
        TailRequest(LOWER, Fraction(-1, 2), 5)
    with pytest.raises(ValueError):
        TailRequest(LOWER, Fraction(1, 2), 0)
    TailRequest(LOWER, Fraction(0), 5)  # degenerate but well defined


def test_tail_counts_shared_pass():
    config = SampleConfig(seed=77, trials=2000, depth=8)
    requests = [TailRequest(LOWER, Fraction(1, 2), 4),
                TailRequest(LOWER, Fraction(1, 2), 8),
                TailRequest(UPPER, Fraction(1, 2), 4)]
    out = tail_counts(config, requests)
    assert set(out) == set(requests)
    # lower-tail probability decays with depth
    assert out[requests[0]].p_hat >= out[requests[1]].p_hat
    for est in out.values():
        assert est.trials + est.uncertified == 2000


def test_lln_mean_near_one():
    rep = lln_report(SampleConfig(seed=5, trials=300, depth=30))
    assert 0.9 < rep.mean < 1.1
    assert rep.certified + rep.uncertified == 300


def test_clt_ks_moderate():
    rep = clt_report(SampleConfig(seed=5, trials=150, depth=25))
    assert rep.ks < 0.25
    assert abs(rep.median) < 0.5
    assert len(rep.quantiles) == 5


def test_ldp_slope_shape():
    rep = ldp_slope(Fraction(1, 2), [5, 10], SampleConfig(seed=11, trials=2000, depth=10))
    assert [row.n for row in rep.rows] == [5, 10]
    assert rep.rows[0].estimate.p_hat > rep.rows[1].estimate.p_hat
    assert rep.slope > 0
    assert rep.slope_lo <= rep.slope <= rep.slope_hi


def test_sample_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(seed=-1, trials=10, depth=1)
    with pytest.raises(ValueError):
        SampleConfig(seed=1, trials=0, depth=1)
    with pytest.raises(ValueError):
        SampleConfig(seed=1, trials=10, depth=0)
    config = SampleConfig(seed=1, trials=10, depth=3)
    assert config.bits == default_bits(3)
