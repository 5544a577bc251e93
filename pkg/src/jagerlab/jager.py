"""Approximation coefficients and the pairing with orbit states.

The quality of the n-th convergent is measured by

    theta_n = |x0 - p_n/q_n| * q_n^2 / k^(n+1),

with theta_0 = x0 / k.  The k-power normalizes the denominators so that
consecutive coefficients coincide with the folded image of the orbit
state: writing Psi_k(x, y) = (1/(x-y), -xy/(k(x-y))),

    Psi_k(x_n, y_n) = (theta_{n-1}, theta_n)

holds as an algebraic identity (exactly, in rational arithmetic).  The
residual of that identity is what the verification suite measures; theta
itself is always computed by the direct subtraction formula, never
through the identity, so the check stays two-sided.

Coefficients are bounded: theta_n in [0, 1/k), theta_{n-1} in (0, 1/k],
and 4k * theta_{n-1} * theta_n <= 1 with equality only on the fold.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import geometry
from .cf import OrbitEnded, _ENGINE_ROUND, _ENGINE_TRACE
from .scalar import DomainError, NumericContext


@dataclass(frozen=True)
class ApproximationCoefficient:
    n: int
    theta: object


@dataclass(frozen=True)
class DynamicPair:
    """Orbit state (x_n, y_n) at time n >= 1; x in (0,1), y <= -k."""

    n: int
    x: object
    y: object
    digit: int


@dataclass(frozen=True)
class JagerPoint:
    """Approximation pair (theta_{n-1}, theta_n) at time n >= 1.

    terminal marks the final pair of a terminating expansion (v == 0).
    """

    n: int
    u: object
    v: object
    terminal: bool = False


class Orbit:
    """One expansion evaluated once, with every per-step quantity cached.

    Steps are indexed from 1.  For a terminating expansion the final
    step has remainder exactly 0 and theta exactly 0.
    """

    def __init__(self, ctx: NumericContext, k, x0, n_max: int):
        self.ctx = ctx
        self.k = ctx.convert(k)      # presentation values
        self.x0 = ctx.convert(x0)
        self.n_max = n_max
        # the engine runs on the exact meaning of the inputs; the mode
        # only dictates how step values are presented
        self._raw = _ENGINE_TRACE(ctx, k, x0, n_max)

    def __len__(self):
        return len(self._raw)

    @property
    def terminated(self) -> bool:
        return self._raw[-1].terminal

    def _step(self, n: int):
        if n < 1:
            raise DomainError("orbit steps are indexed from 1")
        if n > len(self._raw):
            raise OrbitEnded(
                f"expansion terminated at step {len(self._raw)}, "
                f"no data at step {n}"
            )
        return self._raw[n - 1]

    def digit(self, n: int) -> int:
        return self._step(n).digit

    def theta(self, n: int):
        if n == 0:
            with self.ctx.guard():
                return _ENGINE_ROUND(self.ctx, self.x0 / self.k)
        return _ENGINE_ROUND(self.ctx, self._step(n).theta)

    def theta_sequence(self) -> list[ApproximationCoefficient]:
        out = [ApproximationCoefficient(0, self.theta(0))]
        out.extend(
            ApproximationCoefficient(s.n, _ENGINE_ROUND(self.ctx, s.theta))
            for s in self._raw
        )
        return out

    def dynamic_pair(self, n: int) -> DynamicPair:
        s = self._step(n)
        if s.terminal:
            raise OrbitEnded(f"expansion terminated at step {s.n}; x_{s.n} is 0")
        return DynamicPair(
            n=s.n,
            x=_ENGINE_ROUND(self.ctx, s.x),
            y=_ENGINE_ROUND(self.ctx, s.y),
            digit=s.digit,
        )

    def jager_point(self, n: int) -> JagerPoint:
        s = self._step(n)
        return JagerPoint(
            n=s.n,
            u=self.theta(n - 1),
            v=_ENGINE_ROUND(self.ctx, s.theta),
            terminal=s.terminal,
        )

    def residual(self, n: int) -> float:
        """Engine-precision gap between the folded orbit state and the pair."""
        return self._step(n).residual


def theta(ctx: NumericContext, k, x0, n: int) -> ApproximationCoefficient:
    """The n-th approximation coefficient. theta_0 = x0/k needs no orbit."""
    if n < 0:
        raise DomainError("theta needs n >= 0")
    if n == 0:
        k = ctx.convert(k)
        x0 = ctx.convert(x0)
        with ctx.guard():
            return ApproximationCoefficient(0, _ENGINE_ROUND(ctx, x0 / k))
    orbit = Orbit(ctx, k, x0, n)
    return ApproximationCoefficient(n, orbit.theta(n))


def theta_sequence(ctx: NumericContext, k, x0, n_max: int) -> list[ApproximationCoefficient]:
    """theta_0 .. theta_min(n_max, termination index) in one pass."""
    return Orbit(ctx, k, x0, n_max).theta_sequence()


def dynamic_pair(ctx: NumericContext, k, x0, n: int) -> DynamicPair:
    if n < 1:
        raise DomainError("dynamic pairs start at n = 1")
    return Orbit(ctx, k, x0, n).dynamic_pair(n)


def approximation_pair(ctx: NumericContext, k, x0, n: int) -> JagerPoint:
    if n < 1:
        raise DomainError("approximation pairs start at n = 1")
    return Orbit(ctx, k, x0, n).jager_point(n)


def correspondence_residual(ctx: NumericContext, k, x0, n: int) -> float:
    """Max-norm distance between Psi_k(x_n, y_n) and (theta_{n-1}, theta_n).

    Computed at the engine's working precision; stays below 1e-8 for
    n <= 40 whenever the inputs are meaningful at that depth.
    """
    if n < 1:
        raise DomainError("the correspondence starts at n = 1")
    return Orbit(ctx, k, x0, n).residual(n)


def hyperbola_gap(point: JagerPoint, k) -> float:
    """Signed slack of 4k*u*v <= 1 for one pair (negative means violated)."""
    return float(1 - 4 * float(k) * float(point.u) * float(point.v))


# geometry re-export so callers can map pairs without a second import
psi = geometry.psi
