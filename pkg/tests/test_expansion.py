"""Digit expansion, reconstruction, continuants, cylinder endpoints."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecfrac.expansion import (CertifiedExpansion, continuants,
                              cylinder_endpoints, expand_interval,
                              expand_rational, is_admissible, reconstruct)

# frozen oracles: greedy expansions computed by hand via d = floor(1/x),
# x -> (1/d)(1/x - d).  e.g. 5/19: 19/5 = 3.8 -> 3, remainder 4/15;
# 15/4 = 3.75 -> 3, remainder 1/4 -> 4.
GOLDEN_EXPANSIONS = [
    (Fraction(1, 2), (2,)),
    (Fraction(7, 10), (1, 2, 6)),
    (Fraction(1, 3), (3,)),
    (Fraction(2, 3), (1, 2)),
    (Fraction(3, 7), (2, 6)),
    (Fraction(1, 35), (35,)),
    (Fraction(5, 19), (3, 3, 4)),
    (Fraction(999, 1000), (1, 999)),
]


@st.composite
def words(draw, max_len=8, max_digit=30):
    """Non-decreasing admissible words."""
    length = draw(st.integers(1, max_len))
    digits = []
    prev = 1
    for _ in range(length):
        nxt = draw(st.integers(prev, max_digit))
        digits.append(nxt)
        prev = nxt
    return tuple(digits)


@st.composite
def canonical_words(draw, max_len=8, max_digit=30):
    """Words in the image of the greedy algorithm: last digit strictly
    exceeds its predecessor (or the word has length 1)."""
    length = draw(st.integers(1, max_len))
    if length == 1:
        return (draw(st.integers(1, max_digit)),)
    digits = []
    prev = 1
    for _ in range(length - 1):
        nxt = draw(st.integers(prev, max_digit - 1))
        digits.append(nxt)
        prev = nxt
    digits.append(draw(st.integers(prev + 1, max_digit)))
    return tuple(digits)


def test_golden_expansions():
    for x, expected in GOLDEN_EXPANSIONS:
        exp = expand_rational(x)
        assert exp.digits == expected, (x, exp.digits)
        assert not exp.truncated
        assert exp.certified_count == len(expected)


def test_reconstruct_golden():
    assert reconstruct((1, 2, 6)) == Fraction(7, 10)
    assert reconstruct((2,)) == Fraction(1, 2)
    assert reconstruct((2, 2)) == Fraction(1, 3)  # non-canonical spelling of (3,)


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=1,
                    max_denominator=10**6))
def test_value_round_trip(x):
    exp = expand_rational(x, max_digits=400)
    assert not exp.truncated
    assert reconstruct(exp.digits) == x


@given(canonical_words())
def test_word_round_trip_on_canonical_words(w):
    assert expand_rational(reconstruct(w), max_digits=200).digits == w


def test_noncanonical_word_does_not_round_trip():
    assert expand_rational(reconstruct((2, 2))).digits == (3,)


@given(words())
def test_digits_non_decreasing_and_admissible(w):
    assert is_admissible(w)
    exp = expand_rational(reconstruct(w), max_digits=200)
    assert all(a <= b for a, b in zip(exp.digits, exp.digits[1:]))


def test_inadmissible_rejected():
    assert not is_admissible((2, 1))
    assert not is_admissible((0,))
    assert not is_admissible((1, 3, 2))
    assert is_admissible(())  # the trivial prefix


def test_continuants_all_ones_are_fibonacci():
    fib = [1, 1]
    while len(fib) < 12:
        fib.append(fib[-1] + fib[-2])
    qs = continuants((1,) * 10)
    # Q_0 = 1, Q_1 = 1, Q_2 = 2, ... shifted Fibonacci
    assert list(qs[-10:]) == fib[:10] or list(qs)[-10:] == fib[1:11]


def test_continuants_recurrence():
    w = (2, 3, 3, 7)
    qs = continuants(w)
    # recurrence Q_n = b_n Q_{n-1} + b_{n-1} Q_{n-2} with Q_{-1} = 0, Q_0 = 1
    assert qs[0] == 1
    full = list(qs)
    for i in range(2, len(full)):
        assert full[i] == w[i - 1] * full[i - 1] + w[i - 2] * full[i - 2]


@given(words())
def test_cylinder_endpoints_bracket_reconstruction(w):
    lo, hi = cylinder_endpoints(w)
    assert lo < hi
    x = reconstruct(w)
    assert lo <= x <= hi


def test_truncation_reports_honestly():
    x = reconstruct((1,) * 10 + (2,))
    exp = expand_rational(x, max_digits=4)
    assert exp.truncated
    assert exp.digits == (1, 1, 1, 1)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1,
                    max_denominator=1000))
@settings(max_examples=60)
def test_expand_interval_agrees_on_points(x):
    cell = expand_interval(x, x, max_digits=100)
    full = expand_rational(x, max_digits=100)
    assert cell.digits[:cell.certified_count] == full.digits[:cell.certified_count]
    assert cell.certified_count == full.certified_count


def test_expand_interval_certifies_shared_prefix():
    # both endpoints start 1, 2, ... but diverge later
    lo, hi = Fraction(7, 10), Fraction(71, 100)
    cell = expand_interval(lo, hi, max_digits=50)
    for x in (lo, hi, Fraction(141, 200)):
        full = expand_rational(x, max_digits=50)
        k = cell.certified_count
        assert full.digits[:k] == cell.digits[:k]


def test_expand_interval_rejects_bad_bounds():
    with pytest.raises(ValueError):
        expand_interval(Fraction(0), Fraction(1, 2))
    with pytest.raises(ValueError):
        expand_interval(Fraction(1, 2), Fraction(3, 2))


def test_expansion_dataclass_fields():
    exp = expand_rational(Fraction(7, 10))
    assert isinstance(exp, CertifiedExpansion)
    assert exp.digits == (1, 2, 6)
    assert exp.certified_count == 3
    assert exp.truncated is False
