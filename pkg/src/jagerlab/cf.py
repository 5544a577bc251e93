"""Parametric continued fractions: digits, convergents, futures and pasts.

For a parameter k > 0, every x0 in (0,1) expands as

    x0 = k / (k + a_1 + k / (k + a_2 + ...)),   a_n nonnegative integers.

The digit shift is x' = k/x - k - a with a = floor(k/x - k); a zero
remainder terminates the expansion.  Convergents follow the recurrences

    p_n = (k + a_n) p_{n-1} + k p_{n-2},   (p_-1, p_0) = (1, 0)
    q_n = (k + a_n) q_{n-1} + k q_{n-2},   (q_-1, q_0) = (0, 1)

which satisfy p_{n-1} q_n - p_n q_{n-1} = (-k)^n.  The "future" of an
orbit at time n is the remainder x_n; the "past" is

    y_n = -k - a_n - [a_{n-1}, ..., a_1]_k,     y_1 = -k - a_1,

always <= -k, and obeys the one-step recurrence y' = -k - a' + k/y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _orbit
from .scalar import EXTENDED, DomainError, Mode, NumericContext


class OrbitEnded(RuntimeError):
    """The expansion terminated before the requested index."""


#: default orbit depth per mode: hardware output is not worth pushing past
#: 30 steps, extended buys roughly twice the depth
DEFAULT_DEPTH = {Mode.HARDWARE: 30, Mode.EXTENDED: 60, Mode.EXACT: 30}


@dataclass(frozen=True)
class Expansion:
    """Digit string of one point: parameter, digits, termination flag."""

    k: object
    digits: tuple[int, ...]
    terminated: bool
    x0: object

    def __len__(self):
        return len(self.digits)


def gauss_step(ctx: NumericContext, k, x):
    """One application of the digit shift: returns (digit, next remainder).

    Requires x in (0, 1]; a returned remainder of exactly 0 marks
    termination.
    """
    k = ctx.convert(k)
    x = ctx.convert(x)
    if not k > 0:
        raise DomainError(f"parameter k must be positive, got {k}")
    if not 0 < x <= 1:
        raise DomainError(f"gauss_step needs x in (0,1], got {x}")
    with ctx.guard():
        t = k / x - k
        a = ctx.snap_floor(t)
        xn = t - a
        if ctx.mode is Mode.EXACT:
            if xn < 0:
                raise DomainError("exact digit extraction produced a negative remainder")
            return a, xn
        if xn <= ctx.tol.eps_snap * max(1.0, abs(float(t))):
            xn = ctx.convert(0)
    return a, xn


def expand(ctx: NumericContext, k, x0, n_max: int | None = None) -> Expansion:
    """Extract up to n_max digits of x0; flags exact termination."""
    if n_max is None:
        n_max = DEFAULT_DEPTH[ctx.mode]
    steps = _trace(ctx, k, x0, n_max)
    return Expansion(
        k=ctx.convert(k),
        digits=tuple(s.digit for s in steps),
        terminated=steps[-1].terminal,
        x0=ctx.convert(x0),
    )


def eval_finite(ctx: NumericContext, k, digits: Sequence[int]):
    """Value of the finite tower [a_1, ..., a_n]_k, innermost first."""
    if not digits:
        raise DomainError("eval_finite needs at least one digit")
    k = ctx.convert(k)
    with ctx.guard():
        t = ctx.convert(0)
        for a in reversed(list(digits)):
            if a < 0:
                raise DomainError(f"digits must be nonnegative, got {a}")
            t = k / (k + a + t)
    return t


@dataclass(frozen=True)
class ConvergentState:
    """Convergent pair at index n, plus the previous pair."""

    n: int
    p_prev: object
    p_cur: object
    q_prev: object
    q_cur: object

    @classmethod
    def initial(cls, ctx: NumericContext) -> "ConvergentState":
        one, zero = ctx.convert(1), ctx.convert(0)
        return cls(n=0, p_prev=one, p_cur=zero, q_prev=zero, q_cur=one)

    @property
    def value(self):
        return self.p_cur / self.q_cur


def convergent_step(ctx: NumericContext, state: ConvergentState, a: int, k) -> ConvergentState:
    """Advance the convergent recurrences by one digit."""
    if a < 0:
        raise DomainError(f"digits must be nonnegative, got {a}")
    k = ctx.convert(k)
    with ctx.guard():
        ka = k + a
        p = ka * state.p_cur + k * state.p_prev
        q = ka * state.q_cur + k * state.q_prev
    return ConvergentState(state.n + 1, state.p_cur, p, state.q_cur, q)


def convergents(ctx: NumericContext, k, digits: Sequence[int]) -> list[ConvergentState]:
    """Convergent states after each digit of the given string."""
    state = ConvergentState.initial(ctx)
    out = []
    for a in digits:
        state = convergent_step(ctx, state, a, k)
        out.append(state)
    return out


def future(ctx: NumericContext, k, x0, n: int):
    """The remainder x_n. Raises OrbitEnded if the expansion stops at or
    before step n (a terminal remainder is 0, not a point of (0,1))."""
    if n < 0:
        raise DomainError("future needs n >= 0")
    if n == 0:
        return ctx.convert(x0)
    steps = _trace(ctx, k, x0, n)
    if len(steps) < n or steps[n - 1].terminal:
        raise OrbitEnded(f"expansion terminated at step {len(steps)}")
    return _round(ctx, steps[n - 1].x)


def past_direct(ctx: NumericContext, k, digits: Sequence[int], n: int):
    """y_n from its definition: -k - a_n - [a_{n-1}, ..., a_1]_k."""
    if n < 1 or len(digits) < n:
        raise DomainError("past_direct needs 1 <= n <= len(digits)")
    k = ctx.convert(k)
    with ctx.guard():
        tail = eval_finite(ctx, k, list(digits[: n - 1])[::-1]) if n >= 2 else ctx.convert(0)
        return -k - digits[n - 1] - tail


def past_step(ctx: NumericContext, k, y, a: int):
    """One-step past recurrence y' = -k - a' + k/y, for y <= -k."""
    k = ctx.convert(k)
    y = ctx.convert(y)
    if a < 0:
        raise DomainError(f"digits must be nonnegative, got {a}")
    if not float(y) <= -float(k) * (1 - 1e-12):
        raise DomainError(f"past values satisfy y <= -k, got y={y}")
    with ctx.guard():
        return -k - a + k / y


# -- internal helpers ----------------------------------------------------


def _exact_input(ctx: NumericContext, value):
    """The exact numeric meaning of a user input.

    The mode fixes how results are presented, not which number the orbit
    is run on: 'num/den' strings mean the rational itself, and floats and
    mpfr values mean the dyadic rational they hold.  Exact mode validates
    through the context (rejecting floats) before the lift.
    """
    if ctx.mode is Mode.EXACT:
        return ctx.convert(value)
    if isinstance(value, str):
        body = value.strip()
        if "/" in body:
            from .scalar import parse_rational

            return parse_rational(body)
        return float(body)
    return value


def _trace(ctx: NumericContext, k, x0, n_max: int):
    steps = _orbit.trace(
        _exact_input(ctx, k), _exact_input(ctx, x0), n_max,
        snap_eps=ctx.tol.eps_snap,
        base_bits=max(ctx.bits, 128) if ctx.mode is not Mode.EXACT else 128,
        exact=ctx.mode is Mode.EXACT,
    )
    return steps


def _round(ctx: NumericContext, value):
    """Present an engine value in the context's output type."""
    if ctx.mode is Mode.EXACT:
        return value
    if ctx.mode is Mode.HARDWARE:
        return float(value)
    return ctx.convert(value)


# re-export for neighbours that already import cf
_ENGINE_ROUND = _round
_ENGINE_TRACE = _trace

# convenience context used in a few defaults
_DEFAULT_EXTENDED = EXTENDED
