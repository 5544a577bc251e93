"""Digit extraction, finite evaluation, convergents, futures and pasts."""

import math
import random
from fractions import Fraction

import pytest

from jagerlab import (
    EXACT,
    EXTENDED,
    HARDWARE,
    ConvergentState,
    DomainError,
    OrbitEnded,
    convergent_step,
    convergents,
    eval_finite,
    expand,
    future,
    gauss_step,
    past_direct,
    past_step,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def random_rational_k(rng):
    while True:
        k = Fraction(rng.randint(1, 24), rng.randint(1, 8))
        if 0 < k < 3:
            return k


def random_rational_x0(rng, max_den=20):
    while True:
        den = rng.randint(2, max_den)
        x0 = Fraction(rng.randint(1, den - 1), den)
        if 0 < x0 < 1:
            return x0


# -- gauss_step -----------------------------------------------------------


def test_gauss_step_terminates_at_half_for_k1():
    a, x = gauss_step(HARDWARE, 1, 0.5)
    assert a == 1 and x == 0.0


def test_gauss_step_golden_fixed_point():
    a, x = gauss_step(HARDWARE, 1, GOLDEN)
    assert a == 0
    assert abs(x - GOLDEN) < 1e-15


def test_gauss_step_hand_computed():
    a, x = gauss_step(HARDWARE, 0.5, 0.3)
    assert a == 1
    assert abs(x - 1 / 6) < 1e-15


def test_gauss_step_exact():
    a, x = gauss_step(EXACT, Fraction(1, 2), Fraction(3, 10))
    assert (a, x) == (1, Fraction(1, 6))


def test_gauss_step_domain_violations():
    with pytest.raises(DomainError):
        gauss_step(HARDWARE, 1, 0.0)
    with pytest.raises(DomainError):
        gauss_step(HARDWARE, 1, 1.5)
    with pytest.raises(DomainError):
        gauss_step(HARDWARE, -1, 0.5)


def test_gauss_step_range_property():
    rng = random.Random(1)
    for _ in range(500):
        k = rng.uniform(0.05, 5)
        x = rng.uniform(1e-6, 1)
        a, xn = gauss_step(HARDWARE, k, x)
        assert a >= 0
        assert 0 <= xn < 1


# -- expand ---------------------------------------------------------------


def test_expand_hand_example():
    e = expand(HARDWARE, 0.5, 0.3, 5)
    assert e.digits == (1, 2, 0, 0, 0)
    assert not e.terminated


def test_expand_terminating():
    e = expand(HARDWARE, 2, "2/3", 5)
    assert e.digits == (1,)
    assert e.terminated
    e = expand(EXACT, 2, Fraction(2, 3), 5)
    assert e.digits == (1,) and e.terminated


def test_expand_silver_fixed_point():
    e = expand(HARDWARE, 1, math.sqrt(2.0) - 1.0, 4)
    assert e.digits == (1, 1, 1, 1)


def test_expand_rejects_bad_x0():
    with pytest.raises(DomainError):
        expand(HARDWARE, 1, 0.0, 3)
    with pytest.raises(DomainError):
        expand(HARDWARE, 1, 1.0, 3)


def test_round_trip_error_decays():
    # reconstruction error shrinks to zero; monotonically so for k >= 1
    # (for k < 1 it still decays geometrically but may bounce locally,
    # e.g. k=1/4, x0=3/7)
    rng = random.Random(7)
    for _ in range(40):
        k = random_rational_k(rng)
        x0 = random_rational_x0(rng)
        e = expand(EXACT, k, x0, 12)
        errs = [
            abs(x0 - eval_finite(EXACT, k, e.digits[:n]))
            for n in range(1, len(e.digits) + 1)
        ]
        assert errs[-1] == 0 if e.terminated else errs[-1] < errs[0]
        if k >= 1:
            assert all(b <= a for a, b in zip(errs, errs[1:]))


# -- eval_finite ----------------------------------------------------------


def test_eval_finite_single_digit():
    assert eval_finite(EXACT, 2, [1]) == Fraction(2, 3)


def test_eval_finite_two_digits_k1():
    assert eval_finite(EXACT, 1, [1, 1]) == Fraction(2, 5)


def test_eval_finite_hand_example():
    assert eval_finite(EXACT, Fraction(1, 2), [1, 2]) == Fraction(5, 17)
    assert abs(eval_finite(HARDWARE, 0.5, [1, 2]) - 5 / 17) < 1e-15


# -- convergents ----------------------------------------------------------


def test_convergents_k1():
    states = convergents(EXACT, 1, [1, 1])
    assert (states[0].p_cur, states[0].q_cur) == (1, 2)
    assert (states[1].p_cur, states[1].q_cur) == (2, 5)


def test_base_determinant():
    k = Fraction(7, 3)
    s1 = convergent_step(EXACT, ConvergentState.initial(EXACT), 4, k)
    # p_0 q_1 - p_1 q_0 = -k
    assert Fraction(0) * s1.q_cur - s1.p_cur * Fraction(1) == -k


def test_convergents_match_hand_values():
    states = convergents(EXACT, Fraction(1, 2), [1, 2])
    assert (states[1].p_cur, states[1].q_cur) == (Fraction(5, 4), Fraction(17, 4))
    assert states[1].value == Fraction(5, 17)


def test_convergents_agree_with_eval_finite_exactly():
    rng = random.Random(3)
    for _ in range(50):
        k = random_rational_k(rng)
        digits = [rng.randint(0, 6) for _ in range(rng.randint(1, 20))]
        for n, state in enumerate(convergents(EXACT, k, digits), start=1):
            assert state.value == eval_finite(EXACT, k, digits[:n])


def test_determinant_identity_exact():
    rng = random.Random(9)
    for _ in range(50):
        k = random_rational_k(rng)
        digits = [rng.randint(0, 5) for _ in range(12)]
        state = ConvergentState.initial(EXACT)
        for n, a in enumerate(digits, start=1):
            state = convergent_step(EXACT, state, a, k)
            assert state.p_prev * state.q_cur - state.p_cur * state.q_prev == (-k) ** n


def test_convergent_positivity():
    rng = random.Random(13)
    for _ in range(30):
        k = random_rational_k(rng)
        digits = [rng.randint(0, 5) for _ in range(15)]
        for state in convergents(EXACT, k, digits):
            assert state.q_cur > 0


# -- future ---------------------------------------------------------------


def test_future_fixed_point():
    for n in (1, 5, 10):
        assert abs(future(HARDWARE, 1, GOLDEN, n) - GOLDEN) < 1e-9


def test_future_hand_example():
    assert abs(future(HARDWARE, 0.5, 0.3, 2) - 0.5) < 1e-12


def test_future_orbit_ended():
    with pytest.raises(OrbitEnded):
        future(HARDWARE, 2, "2/3", 1)
    with pytest.raises(OrbitEnded):
        future(EXACT, 2, Fraction(2, 3), 3)


def test_future_zero_is_identity():
    assert future(HARDWARE, 1.3, 0.41, 0) == 0.41


# -- pasts ----------------------------------------------------------------


def test_past_direct_first_step():
    assert past_direct(EXACT, 1, [0, 0, 0], 1) == Fraction(-1)


def test_past_direct_chain():
    assert past_direct(EXACT, 1, [0, 0], 2) == Fraction(-2)
    assert past_direct(EXACT, 1, [0, 0, 0], 3) == Fraction(-3, 2)


def test_past_step_matches_direct_chain():
    assert past_step(EXACT, 1, Fraction(-1), 0) == Fraction(-2)
    assert past_step(EXACT, 1, Fraction(-2), 0) == Fraction(-3, 2)


def test_past_step_fixed_point():
    # all-zero digits at k=1: y converges to -(1+golden)
    y = past_direct(HARDWARE, 1, [0], 1)
    for _ in range(80):
        y = past_step(HARDWARE, 1, y, 0)
    assert abs(y + (1 + GOLDEN)) < 1e-12


def test_past_step_agrees_with_past_direct():
    rng = random.Random(17)
    for _ in range(1000):
        k = rng.choice([0.3, 0.5, 1.0, 1.7, 2.5])
        digits = [rng.randint(0, 4) for _ in range(rng.randint(1, 30))]
        y = past_direct(HARDWARE, k, digits, 1)
        for n in range(2, len(digits) + 1):
            y = past_step(HARDWARE, k, y, digits[n - 1])
        assert abs(y - past_direct(HARDWARE, k, digits, len(digits))) < 1e-9


def test_past_stays_at_or_below_minus_k():
    rng = random.Random(23)
    for _ in range(200):
        k = rng.uniform(0.1, 3.0)
        digits = [rng.randint(0, 5) for _ in range(10)]
        for n in range(1, len(digits) + 1):
            assert past_direct(HARDWARE, k, digits, n) <= -k + 1e-12


def test_strip_membership_of_past_with_documented_edge():
    # y_n lies in (-k-a_n-1, -k-a_n] except the closed lower endpoint is
    # hit exactly at n=2 whenever a_1 = 0 (y_1 = -k makes y_2 = -k-a_2-1)
    rng = random.Random(29)
    for _ in range(60):
        k = random_rational_k(rng)
        digits = [rng.randint(0, 3) for _ in range(8)]
        for n in range(1, len(digits) + 1):
            y = past_direct(EXACT, k, digits, n)
            a = digits[n - 1]
            assert y <= -k - a
            if n == 2 and digits[0] == 0:
                assert y >= -k - a - 1
            else:
                assert y > -k - a - 1
