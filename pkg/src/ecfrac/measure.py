"""Cylinder probabilities, transition sandwich, marginals, moment enclosures.

Everything here is with respect to Lebesgue measure on (0,1].  The exact
objects are rationals: a cylinder of word (b_1..b_n) has measure

    prod(b_1..b_{n-1}) / (Q_n * (Q_n + Q_{n-1})),

and the one-step conditional probability given the full history is the
exact ratio Phi(j, k, y) = j(1+y)/((k+jy)(k+1+jy)) with y = Q_{n-1}/Q_n.
The digit chain is not Markov, but Phi is sandwiched uniformly in the
history:

    j/(k(k+2)) <= P(b_{n+1}=k | b_n=j, history) <= (j+1)/(k(k+1)).

The sandwich is what makes rigorous finite-state enclosures possible:
marginal distributions and fractional moments E(b_n^theta) are bounded by
dynamic programs over (depth, last digit <= cap) with all mass on digits
beyond the cap controlled by series/integral tail bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .expansion import continuants, is_admissible
from .numerics import (
    ExtendedReal,
    OutwardInterval,
    default_precision,
    interval_pow,
    interval_sqrt,
)
from .words import (
    DEFAULT_BUDGET,
    EXACT_LAST,
    LAST_AT_MOST,
    WordFamily,
    count_words,
    enumerate_words,
)


@dataclass(frozen=True)
class ProbInterval:
    """Exact rational enclosure [lo, hi] of a probability or expectation."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi):
            raise ValueError(f"invalid enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: Fraction) -> "ProbInterval":
        value = Fraction(value)
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value: Union[Fraction, int, "ProbInterval"]) -> bool:
        if isinstance(value, ProbInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class MarginalTable:
    """Distribution of b_n: per-digit enclosures up to a cap, plus the tail."""

    n: int
    cap: int
    entries: dict[int, ProbInterval]
    tail: ProbInterval

    def __post_init__(self):
        total_lo = sum((e.lo for e in self.entries.values()), self.tail.lo)
        total_hi = sum((e.hi for e in self.entries.values()), self.tail.hi)
        if not (total_lo <= 1 <= total_hi):
            raise ValueError(f"marginal table does not enclose a distribution: "
                             f"sum lo = {total_lo}, sum hi = {total_hi}")


def cylinder_measure(word: Sequence[int]) -> Fraction:
    """Exact Lebesgue measure of the cylinder of an admissible word."""
    w = tuple(word)
    if not w or not is_admissible(w):
        raise ValueError(f"cylinder_measure needs a nonempty admissible word, got {w}")
    qs = continuants(w)
    prod = 1
    for b in w[:-1]:
        prod *= b
    return Fraction(prod, qs[-1] * (qs[-1] + qs[-2]))


def phi_ratio(a: int, b: int, y: Fraction) -> Fraction:
    """The exact conditional ratio Phi(a, b, y) = a(1+y)/((b+ay)(b+1+ay))."""
    if not 1 <= a <= b:
        raise ValueError(f"phi_ratio needs 1 <= a <= b, got a={a}, b={b}")
    y = Fraction(y)
    if not 0 <= y < 1:
        raise ValueError(f"phi_ratio needs 0 <= y < 1, got y={y}")
    return a * (1 + y) / ((b + a * y) * (b + 1 + a * y))


def conditional_probability(prefix: Sequence[int], next_digit: int) -> Fraction:
    """P(b_{n+1} = next | the full history equals prefix), exact."""
    w = tuple(prefix)
    if not w:
        raise ValueError("prefix must be nonempty")
    if next_digit < w[-1]:
        raise ValueError(f"inadmissible extension: {next_digit} after {w[-1]}")
    return cylinder_measure(w + (next_digit,)) / cylinder_measure(w)


def conditional_given_last(n: int, j: int, k: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """P(b_n = k | b_{n-1} = j), exact, by summing over all histories.

    This is the history-summed quantity that differs from the single-history
    conditional (the chain is not Markov).
    """
    if n < 2:
        raise ValueError("conditional_given_last needs depth n >= 2")
    if not 1 <= j <= k:
        raise ValueError(f"need 1 <= j <= k, got j={j}, k={k}")
    numer = Fraction(0)
    denom = Fraction(0)
    for prefix in enumerate_words(WordFamily(n - 1, j, EXACT_LAST), budget):
        denom += cylinder_measure(prefix)
        numer += cylinder_measure(prefix + (k,))
    return numer / denom


def transition_bounds(j: int, k: int) -> ProbInterval:
    """The uniform sandwich for P(b_{n+1} = k | b_n = j), any history."""
    if not 1 <= j <= k:
        raise ValueError(f"transition_bounds needs 1 <= j <= k, got j={j}, k={k}")
    return ProbInterval(Fraction(j, k * (k + 2)), Fraction(j + 1, k * (k + 1)))


def marginal_exact(n: int, kmax: int, budget: int = DEFAULT_BUDGET) -> MarginalTable:
    """Exact P(b_n = k) for k <= kmax by full cylinder enumeration."""
    if n < 1 or kmax < 1:
        raise ValueError("marginal_exact needs n >= 1 and kmax >= 1")
    sums = {k: Fraction(0) for k in range(1, kmax + 1)}
    family = WordFamily(n, kmax, LAST_AT_MOST)
    visited = 0
    for w in enumerate_words(family, budget):
        sums[w[-1]] += cylinder_measure(w)
        visited += 1
    # Self-check: the enumeration must visit exactly the closed-form count.
    expected = count_words(family)
    if visited != expected:
        raise AssertionError(f"enumeration visited {visited} words, expected {expected}")
    entries = {k: ProbInterval.point(v) for k, v in sums.items()}
    tail = ProbInterval.point(1 - sum(sums.values()))
    return MarginalTable(n, kmax, entries, tail)


def marginal_interval_dp(n: int, cap: int) -> MarginalTable:
    """Sandwich-propagated enclosure of the law of b_n, tracking digits <= cap.

    Lower and upper vectors evolve by the two sandwich kernels; since digits
    never decrease, mass on digits > cap can never return to a tracked
    digit, so tracked entries receive no tail inflow and the tail itself is
    bounded by complementation.
    """
    if n < 1 or cap < 1:
        raise ValueError("marginal_interval_dp needs n >= 1 and cap >= 1")
    kk = range(1, cap + 1)
    lo = {k: Fraction(1, k * (k + 1)) for k in kk}
    up = dict(lo)
    for _ in range(n - 1):
        new_lo = {}
        new_up = {}
        for k in kk:
            new_lo[k] = sum(lo[j] * Fraction(j, k * (k + 2)) for j in range(1, k + 1))
            new_up[k] = sum(up[j] * Fraction(j + 1, k * (k + 1)) for j in range(1, k + 1))
        lo, up = new_lo, new_up
    entries = {k: ProbInterval(lo[k], min(up[k], Fraction(1))) for k in kk}
    sum_lo = sum(lo.values())
    sum_up = sum(up.values())
    tail = ProbInterval(max(Fraction(0), 1 - sum_up), 1 - sum_lo)
    return MarginalTable(n, cap, entries, tail)


def _fibonacci_continuants(n: int) -> tuple[int, int]:
    """(Q_{n-1}, Q_n) for the all-ones word: consecutive Fibonacci numbers."""
    q_prev, q = 0, 1  # Q_{-1}, Q_0
    for _ in range(n):
        q_prev, q = q, q + q_prev
    return q_prev, q


def binet_q(n: int, prec: int | None = None) -> OutwardInterval:
    """Enclosure of the all-ones continuant Q_n by the closed Binet form.

    Q_n = F_{n+1} = (phi^{n+1} - psi^{n+1})/sqrt(5) with psi = (1-sqrt5)/2.
    """
    prec = default_precision() if prec is None else prec
    sqrt5 = interval_sqrt(5, prec)
    phi = (sqrt5 + 1) / 2
    psi = (1 - sqrt5) / 2
    return (phi ** (n + 1) - psi ** (n + 1)) / sqrt5


def prob_digit_one(n: int) -> tuple[Fraction, ProbInterval]:
    """Exact P(b_n = 1) and the Fibonacci sandwich [1/(2 Q_n^2), 1/Q_n^2].

    Only the all-ones word has b_n = 1, so the exact value is its cylinder
    measure 1/(Q_n (Q_n + Q_{n-1})) with Fibonacci continuants.
    """
    if n < 1:
        raise ValueError("prob_digit_one needs n >= 1")
    q_prev, q = _fibonacci_continuants(n)
    exact = Fraction(1, q * (q + q_prev))
    sandwich = ProbInterval(Fraction(1, 2 * q * q), Fraction(1, q * q))
    return exact, sandwich


# ---------------------------------------------------------------------------
# Series bounds and fractional-moment enclosures
# ---------------------------------------------------------------------------


def _integral_tail(m: int, theta: Fraction, prec: int) -> tuple[OutwardInterval, OutwardInterval]:
    """Enclosures of int_m^inf x^(theta-2) dx and of sum_{k>=m} k^(theta-2).

    The summand is decreasing, so the sum lies between the integral and the
    integral plus the first term.
    """
    integral = interval_pow(m, theta - 1, prec) / (1 - theta)
    first = interval_pow(m, theta - 2, prec)
    return integral, integral + first


def s_upper_factor(j: int, theta: Fraction, prec: int | None = None) -> OutwardInterval:
    """The per-level factor (1+1/j) (1-1/j)^(theta-1) / (1-theta), j >= 2.

    Decreasing in j, so it bounds every deeper level once digits exceed j.
    """
    if j < 2:
        raise ValueError("s_upper_factor needs j >= 2")
    prec = default_precision() if prec is None else prec
    theta = Fraction(theta)
    lead = Fraction(j + 1, j)
    power = interval_pow(Fraction(j - 1, j), theta - 1, prec)
    return (lead * power) / (1 - theta)


def series_bounds_check(j: int, theta: Fraction, terms: int = 2000,
                        prec: int | None = None) -> tuple[bool, bool]:
    """Certify the two series inequalities behind the moment bounds.

    lower: sum_{k>=j} j/(k(k+2)) (k/j)^theta >= (j/(j+2)) / (1-theta)
    upper: sum_{k>=j} (j+1)/(k(k+1)) (k/j)^theta <= (1+1/j)(1-1/j)^(theta-1)/(1-theta)

    Both series are summed explicitly for `terms` terms and closed with
    integral tail enclosures; returns whether each inequality is certified
    as an interval statement.
    """
    if j < 2:
        raise ValueError("series_bounds_check needs j >= 2")
    theta = Fraction(theta)
    if theta >= 1:
        raise ValueError("series diverge for theta >= 1")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    prec = default_precision() if prec is None else prec

    m = j + terms
    lower_sum = OutwardInterval.from_value(0, prec)
    upper_sum = OutwardInterval.from_value(0, prec)
    for k in range(j, m):
        ratio_pow = interval_pow(Fraction(k, j), theta, prec)
        lower_sum = lower_sum + Fraction(j, k * (k + 2)) * ratio_pow
        upper_sum = upper_sum + Fraction(j + 1, k * (k + 1)) * ratio_pow

    integral, sum_bound = _integral_tail(m, theta, prec)
    j_pow = interval_pow(j, 1 - theta, prec)
    # lower tail terms: t_k = j^(1-theta) k^(theta-1)/(k+2) in
    # [k^(theta-2) * m/(m+2), k^(theta-2)] * j^(1-theta) for k >= m
    lower_tail_lo = j_pow * Fraction(m, m + 2) * integral
    lower_tail_hi = j_pow * sum_bound
    # upper tail terms: t_k = (j+1) j^(-theta) k^(theta-1)/(k+1)
    jneg_pow = interval_pow(j, -theta, prec) * (j + 1)
    upper_tail_lo = jneg_pow * Fraction(m, m + 1) * integral
    upper_tail_hi = jneg_pow * sum_bound

    lower_series = OutwardInterval.from_endpoints(
        (lower_sum + lower_tail_lo).lo, (lower_sum + lower_tail_hi).hi, prec)
    upper_series = OutwardInterval.from_endpoints(
        (upper_sum + upper_tail_lo).lo, (upper_sum + upper_tail_hi).hi, prec)

    lower_bound_value = Fraction(j, j + 2) / (1 - theta)
    upper_bound_value = s_upper_factor(j, theta, prec)

    lower_ok = lower_series.lo >= lower_bound_value
    upper_ok = upper_series.hi <= upper_bound_value.lo
    return lower_ok, upper_ok


def _phi_bounds(j: int, k: int, z_lo: Fraction, z_hi: Fraction) -> tuple[Fraction, Fraction]:
    """Range bounds of Phi over z in [z_lo, z_hi], via monotone pieces.

    Phi = (j+z)/((k+z)(k+1+z)): numerator increasing, denominator increasing.
    """
    lo = (j + z_lo) / ((k + z_hi) * (k + 1 + z_hi))
    hi = (j + z_hi) / ((k + z_lo) * (k + 1 + z_lo))
    return lo, hi


def moment_interval(n: int, theta: Fraction, cap: int = 60,
                    prec: int | None = None) -> ProbInterval | ExtendedReal:
    """Two-sided enclosure of E(b_n^theta) for theta < 1 (else +infinity).

    The enclosure is a dynamic program over (depth, last digit <= cap).
    Tracked states are refined beyond the uniform sandwich: the exact
    conditional is Phi = (j+z)/((k+z)(k+1+z)) where z = b_d Q_{d-1}/Q_d
    satisfies z_1 = 1 and z' = k/(k+z), so z stays in [1/2, 1] and is
    carried as a per-state interval (the all-ones state keeps z exact, so
    the Fibonacci decay of digit-1 mass survives the DP).  A word leaves
    the tracked region at most once (digits never decrease); each exiting
    cohort's remaining theta-weighted growth is bounded per level by

        lower: ((cap+1)/(cap+3)) / (1-theta)
        upper: (1+1/j)(1-1/j)^(theta-1)/(1-theta) at j = cap+1,

    with integral enclosures of sum_{k>cap} k^(theta-2) at the exit step
    itself.  theta = 0 returns the exact point [1,1].
    """
    if n < 1 or cap < 1:
        raise ValueError("moment_interval needs n >= 1 and cap >= 1")
    theta = Fraction(theta)
    if theta >= 1:
        return ExtendedReal.infinity()
    if theta == 0:
        return ProbInterval.point(Fraction(1))
    prec = default_precision() if prec is None else prec

    kk = range(1, cap + 1)
    mass_lo = {j: Fraction(1, j * (j + 1)) for j in kk}
    mass_up = dict(mass_lo)
    z_lo = {j: Fraction(1) for j in kk}
    z_hi = {j: Fraction(1) for j in kk}

    m = cap + 1
    integral, sum_bound = _integral_tail(m, theta, prec)
    # Exit-step series over k > cap: sum (j+1) k^(theta-1)/(k+1) and
    # sum j k^(theta-1)/(k+2), per unit of j-weighted mass.
    exit_up_per_j = sum_bound                              # times (j+1)
    exit_lo_per_j = Fraction(m, m + 2) * integral          # times j
    s_up = s_upper_factor(m, theta, prec)                  # per remaining level
    s_lo = Fraction(m, m + 2) / (1 - theta)
    s_lo_iv = OutwardInterval.from_value(s_lo, prec)

    zero = OutwardInterval.from_value(0, prec)
    tail_lo_total = zero
    tail_up_total = zero

    # Words whose very first digit already exceeds the cap:
    # P(b_1 = j) j^theta = j^(theta-1)/(j+1) in [k^(theta-2) m/(m+1), k^(theta-2)].
    first_lo = Fraction(m, m + 1) * integral
    first_hi = sum_bound
    tail_lo_total = tail_lo_total + first_lo * _int_pow_iv(s_lo_iv, n - 1)
    tail_up_total = tail_up_total + first_hi * _int_pow_iv(s_up, n - 1)

    for depth in range(1, n):
        remaining = n - depth - 1  # levels left after arriving beyond the cap
        exit_mass_lo = sum(mass_lo[j] * j for j in kk)
        exit_mass_up = sum(mass_up[j] * (j + 1) for j in kk)
        tail_lo_total = tail_lo_total + exit_mass_lo * exit_lo_per_j * _int_pow_iv(s_lo_iv, remaining)
        tail_up_total = tail_up_total + exit_mass_up * exit_up_per_j * _int_pow_iv(s_up, remaining)

        new_mass_lo = {}
        new_mass_up = {}
        new_z_lo = {}
        new_z_hi = {}
        for k in kk:
            acc_lo = Fraction(0)
            acc_up = Fraction(0)
            for j in range(1, k + 1):
                phi_lo, phi_hi = _phi_bounds(j, k, z_lo[j], z_hi[j])
                acc_lo += mass_lo[j] * phi_lo
                acc_up += mass_up[j] * phi_hi
            new_mass_lo[k] = acc_lo
            new_mass_up[k] = acc_up
            zmin = min(z_lo[j] for j in range(1, k + 1))
            zmax = max(z_hi[j] for j in range(1, k + 1))
            new_z_lo[k] = Fraction(k, k + zmax)
            new_z_hi[k] = Fraction(k, k + zmin)
        mass_lo, mass_up = new_mass_lo, new_mass_up
        z_lo, z_hi = new_z_lo, new_z_hi

    tracked_lo = zero
    tracked_hi = zero
    for j in kk:
        jpow = interval_pow(j, theta, prec)
        tracked_lo = tracked_lo + mass_lo[j] * jpow
        tracked_hi = tracked_hi + mass_up[j] * jpow

    lo = tracked_lo.lo + tail_lo_total.lo
    hi = tracked_hi.hi + tail_up_total.hi
    return ProbInterval(max(Fraction(0), lo), hi)


def _int_pow_iv(base: OutwardInterval, k: int) -> OutwardInterval:
    if k == 0:
        return OutwardInterval.from_value(1, base.precision)
    return base ** k
