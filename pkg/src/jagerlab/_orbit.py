"""Shared orbit engine with automatic precision escalation.

One forward pass produces, per step n, the digit a_n, the remainder
(future) x_n, the past y_n, the convergent pair (p_n, q_n), the
approximation coefficient theta_n, and the coherence residual between
the folded image of (x_n, y_n) and (theta_{n-1}, theta_n).

Two numerical hazards drive the design:

* theta_n = |x0 - p_n/q_n| q_n^2 / k^(n+1) subtracts two nearby numbers;
  the cancellation grows like q_n^2 / k^n.
* the digit shift is expanding, so remainders x_n lose roughly the same
  number of bits to drift amplification.

Both losses are bounded by the same quantity, so the engine runs a cheap
float scout to guess the working precision, then iterates full passes in
gmpy2.mpfr, enlarging the precision until the realized requirement from
the actual digits is covered with comfortable headroom.  The exact
rational pass needs none of this.

Digits with a true fractional remainder below the snap tolerance are
treated as exact hits: the remainder becomes 0 and the orbit terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .scalar import DomainError

_HEADROOM = 45     # required spare bits between precision and realized need
_PAD = 96          # extra bits granted past the realized need on a retry
_MAX_PASSES = 8


@dataclass(frozen=True, slots=True)
class RawStep:
    n: int
    digit: int
    x: object          # remainder x_n; exactly 0 at a terminal step
    y: object          # past y_n <= -k
    p: object
    q: object
    theta: object      # theta_n >= 0, exactly 0 at a terminal step
    residual: float    # max-norm gap between folded (x_n,y_n) and theta pair
    terminal: bool


def _exact_pass(k: Fraction, x0: Fraction, n_max: int) -> list[RawStep]:
    x = x0
    pp, pc = Fraction(1), Fraction(0)
    qp, qc = Fraction(0), Fraction(1)
    y = None
    kpow = 1 / k                      # k^-(n+1) at step n
    th_prev = x0 / k
    steps = []
    for n in range(1, n_max + 1):
        t = k / x - k
        a = math.floor(t)
        xn = t - a
        ka = k + a
        pp, pc = pc, ka * pc + k * pp
        qp, qc = qc, ka * qc + k * qp
        y = -ka if y is None else -ka + k / y
        kpow = kpow / k
        theta = abs(x0 - pc / qc) * qc * qc * kpow
        d = xn - y
        u = 1 / d
        v = -(xn * y) / (k * d)
        residual = max(abs(float(u - th_prev)), abs(float(v - theta)))
        terminal = xn == 0
        steps.append(RawStep(n, a, xn, y, pc, qc, theta, residual, terminal))
        if terminal:
            break
        th_prev = theta
        x = xn
    return steps


def _scout_bits(k: float, x0: float, n_max: int, snap_eps: float) -> int:
    """Float pre-pass: rough bound on the bits eaten by cancellation/drift."""
    x = x0
    need = acc = 0.0
    l2k = math.log2(k)
    for n in range(1, n_max + 1):
        t = k / x - k
        if not (t >= 0) or not math.isfinite(t):
            break
        a = math.floor(t)
        if t - a > 1 - snap_eps * max(1.0, t):
            a += 1
        xn = t - a
        acc += 2 * math.log2(k + a + 1)
        need = max(need, acc - (n + 1) * l2k)
        if xn <= snap_eps * max(1.0, t):
            break
        x = xn
    return int(need) if need > 0 else 0


def _mpfr_pass(kq, x0q, n_max: int, snap_eps: float, prec: int):
    """One full pass at fixed precision; returns (steps, realized_need)."""
    with gmpy2.context(precision=prec):
        k = gmpy2.mpfr(kq)
        x0 = gmpy2.mpfr(x0q)
        one = gmpy2.mpfr(1)
        x = x0
        pp, pc = one, gmpy2.mpfr(0)
        qp, qc = gmpy2.mpfr(0), one
        y = None
        kpow = one / k
        th_prev = x0 / k
        kf = float(k)
        l2k = math.log2(kf)
        ex0 = gmpy2.get_exp(x0)
        acc = 0.0
        needed = 0.0
        steps = []
        for n in range(1, n_max + 1):
            t = k / x - k
            tf = float(t)
            if tf < 0 and tf < -snap_eps * max(1.0, abs(tf)):
                raise DomainError(f"digit extraction left the domain at step {n}")
            a = int(gmpy2.floor(t))
            if t - a > 1 - snap_eps * max(1.0, abs(tf)):
                a += 1
            a = max(a, 0)
            xn = t - a
            terminal = xn <= snap_eps * max(1.0, abs(tf))
            if terminal:
                xn = gmpy2.mpfr(0)
            ka = k + a
            pp, pc = pc, ka * pc + k * pp
            qp, qc = qc, ka * qc + k * qp
            y = -ka if y is None else -ka + k / y
            kpow = kpow / k
            diff = x0 - pc / qc
            if diff != 0:
                needed = max(needed, ex0 - gmpy2.get_exp(diff) + _HEADROOM)
            theta = gmpy2.mpfr(0) if terminal else abs(diff) * qc * qc * kpow
            acc += 2 * math.log2(kf + a + 1)
            needed = max(needed, acc - (n + 1) * l2k)
            d = xn - y
            u = one / d
            v = -(xn * y) / (k * d)
            residual = max(abs(float(u - th_prev)), abs(float(v - theta)))
            steps.append(RawStep(n, a, xn, y, pc, qc, theta, residual, terminal))
            if terminal:
                break
            th_prev = theta
            x = xn
    return steps, needed


def _as_mpq(value):
    """Exact rational lift of any accepted input value."""
    if isinstance(value, Fraction) or type(value) is gmpy2.mpq:
        return gmpy2.mpq(value)
    if type(value) is gmpy2.mpfr:
        return gmpy2.mpq(value)      # dyadic, exact
    return gmpy2.mpq(float(value))


def trace(k, x0, n_max: int, *, snap_eps: float = 1e-12,
          base_bits: int = 128, exact: bool = False) -> list[RawStep]:
    """Run the orbit of x0 under the digit shift for parameter k.

    Returns at most n_max steps; stops early (with the last step marked
    terminal) when a remainder hits zero.  In exact mode both inputs
    must be rational and every returned field is a Fraction.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if exact:
        kf, xf = Fraction(k), Fraction(x0)
        if not kf > 0:
            raise DomainError(f"parameter k must be positive, got {kf}")
        if not 0 < xf < 1:
            raise DomainError(f"x0 must lie in (0,1), got {xf}")
        return _exact_pass(kf, xf, n_max)

    kq, x0q = _as_mpq(k), _as_mpq(x0)
    if not kq > 0:
        raise DomainError(f"parameter k must be positive, got {float(kq)}")
    if not 0 < x0q < 1:
        raise DomainError(f"x0 must lie in (0,1), got {float(x0q)}")
    prec = max(base_bits, _scout_bits(float(kq), float(x0q), n_max, snap_eps) + _PAD)
    for _ in range(_MAX_PASSES):
        steps, needed = _mpfr_pass(kq, x0q, n_max, snap_eps, prec)
        if prec >= needed + _HEADROOM:
            return steps
        prec = int(needed) + _PAD
    raise RuntimeError(
        f"orbit precision did not stabilize below {prec} bits; "
        "the input is pathologically close to a terminating point"
    )
