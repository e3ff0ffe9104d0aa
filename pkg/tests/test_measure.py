"""Lebesgue laws of the digit sequence: cylinders, marginals, moments."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecfrac.expansion import continuants
from ecfrac.measure import (ProbInterval, binet_q,
                            conditional_given_last, conditional_probability,
                            cylinder_measure, marginal_exact,
                            marginal_interval_dp, moment_interval,
                            prob_digit_one, series_bounds_check,
                            transition_bounds)
from ecfrac.numerics import ExtendedReal

# hand-computed golden measures: prod(b_i, i < n) / (Q_n (Q_n + Q_{n-1}))
GOLDEN_MEASURES = [
    ((1,), Fraction(1, 2)),
    ((2,), Fraction(1, 6)),       # 1/(2*3)
    ((1, 1), Fraction(1, 6)),     # Q = (1, 2): 1/(2*3)
    ((1, 2), Fraction(1, 12)),    # Q = (1, 3): 1/(3*4)
    ((2, 2), Fraction(1, 24)),    # Q = (2, 6): 2/(6*8)
    ((1, 2, 3), Fraction(1, 77)),  # Q = (1, 3, 11): 2/(11*14)
    ((2, 2, 3), Fraction(1, 154)),  # Q = (2, 6, 22): 4/(22*28)
]


def test_golden_cylinder_measures():
    for word, expected in GOLDEN_MEASURES:
        assert cylinder_measure(word) == expected, word


def test_first_digit_law():
    # P(b_1 = k) = 1/(k(k+1))
    for k in range(1, 30):
        assert cylinder_measure((k,)) == Fraction(1, k * (k + 1))


def test_cylinder_measure_rejects_bad_words():
    with pytest.raises(ValueError):
        cylinder_measure(())
    with pytest.raises(ValueError):
        cylinder_measure((3, 2))


@st.composite
def words(draw, max_len=6, max_digit=20):
    length = draw(st.integers(1, max_len))
    digits, prev = [], 1
    for _ in range(length):
        prev = draw(st.integers(prev, max_digit))
        digits.append(prev)
    return tuple(digits)


@given(words())
def test_conditional_probabilities_sum_below_one(w):
    # partial sums over the next digit stay below 1 and increase
    total = Fraction(0)
    for k in range(w[-1], w[-1] + 12):
        total += conditional_probability(w, k)
    assert 0 < total < 1


@given(words())
@settings(max_examples=60)
def test_transition_bounds_contain_single_history_conditional(w):
    j = w[-1]
    for k in (j, j + 1, j + 5):
        p = conditional_probability(w, k)
        assert transition_bounds(j, k).contains(p)


def test_conditional_given_last_depth_two_closed_form():
    # n = 2: P(b_2 = k | b_1 = j) = (j+1)/((k+1)(k+2)), exact
    for j in range(1, 8):
        for k in range(j, j + 8):
            assert conditional_given_last(2, j, k) == \
                Fraction(j + 1, (k + 1) * (k + 2))


def test_conditional_given_last_contained_in_transition_bounds():
    for n in (2, 3, 4):
        for j in (1, 2, 5):
            for k in (j, j + 3):
                p = conditional_given_last(n, j, k)
                assert transition_bounds(j, k).contains(p)


def test_marginal_exact_digit_one_matches_fibonacci():
    for n in range(1, 7):
        table = marginal_exact(n, 3)
        exact, _ = prob_digit_one(n)
        cell = table.entries[1]
        assert cell.lo == cell.hi == exact


def test_marginal_interval_contains_exact():
    for n in (1, 2, 3, 4):
        cap = 8
        exact = marginal_exact(n, cap)
        enclosed = marginal_interval_dp(n, cap)
        for k in range(1, cap + 1):
            assert enclosed.entries[k].contains(exact.entries[k].lo), (n, k)
        assert enclosed.tail.contains(exact.tail.lo)


def test_marginal_table_mass_bracket():
    table = marginal_interval_dp(6, 10)
    low = sum(cell.lo for cell in table.entries.values()) + table.tail.lo
    high = sum(cell.hi for cell in table.entries.values()) + table.tail.hi
    assert low <= 1 <= high


def test_prob_digit_one_sandwich():
    for n in range(1, 25):
        exact, sandwich = prob_digit_one(n)
        assert sandwich.lo <= exact <= sandwich.hi
        qs = continuants((1,) * n)
        q = qs[-1]
        assert sandwich.lo == Fraction(1, 2 * q * q)
        assert sandwich.hi == Fraction(1, q * q)


def test_binet_matches_integer_continuants():
    for n in range(1, 25):
        q = continuants((1,) * n)[-1]
        assert binet_q(n).contains(q)


def test_moment_theta_zero_is_exactly_one():
    enc = moment_interval(5, Fraction(0))
    assert enc.lo == enc.hi == 1


def test_moment_theta_at_least_one_is_infinite():
    result = moment_interval(3, Fraction(1))
    assert isinstance(result, ExtendedReal) and result.is_infinite
    result = moment_interval(3, Fraction(3, 2))
    assert isinstance(result, ExtendedReal) and result.is_infinite


def test_moment_depth_one_harmonic_oracle():
    # E(b_1^-1) = sum 1/(k^2 (k+1)) = pi^2/6 - 1
    enc = moment_interval(1, Fraction(-1), cap=60)
    oracle = Fraction(str(math.pi**2 / 6 - 1))
    assert enc.lo <= oracle <= enc.hi
    assert enc.hi - enc.lo < Fraction(1, 100)


def test_moment_depth_one_partial_sum_bracket():
    # exact partial sum is a certified lower bound at any cap
    theta = Fraction(1, 2)
    enc = moment_interval(1, theta, cap=40)
    partial = sum(Fraction(1, k * (k + 1)) * Fraction(math.isqrt(k * 10**12), 10**6)
                  for k in range(1, 41))
    # sqrt rounded down termwise, so partial is a true lower bound
    assert partial < enc.hi
    # tail terms sqrt(k)/(k(k+1)) < k^(-3/2), summing below int_40 x^(-3/2) dx
    tail_hi = Fraction(2 * 10**6, math.isqrt(40 * 10**12))
    assert enc.lo <= partial + tail_hi


def test_moment_monotone_in_theta():
    # b_n >= 1 makes E(b_n^theta) non-decreasing in theta
    thetas = [Fraction(-3), Fraction(-1), Fraction(0), Fraction(1, 2),
              Fraction(4, 5)]
    values = [moment_interval(4, t, cap=40) for t in thetas]
    for smaller, larger in zip(values, values[1:]):
        assert smaller.lo <= larger.hi


def test_moment_respects_cap_refinement():
    # larger caps can only tighten or keep the enclosure overlap
    theta = Fraction(1, 2)
    coarse = moment_interval(3, theta, cap=20)
    fine = moment_interval(3, theta, cap=80)
    assert fine.lo <= coarse.hi and coarse.lo <= fine.hi
    assert fine.hi - fine.lo <= coarse.hi - coarse.lo


def test_series_bounds_certified():
    for j in (2, 3, 10):
        for theta in (Fraction(-2), Fraction(-1, 2), Fraction(1, 2)):
            lower_ok, upper_ok = series_bounds_check(j, theta, terms=3000)
            assert lower_ok and upper_ok, (j, theta)


def test_prob_interval_validation():
    with pytest.raises(ValueError):
        ProbInterval(Fraction(1, 2), Fraction(1, 3))
    cell = ProbInterval(Fraction(1, 3), Fraction(1, 2))
    assert cell.contains(Fraction(2, 5))
    assert not cell.contains(Fraction(9, 10))
