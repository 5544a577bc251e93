"""Numeric foundation: precision modes, tolerance policy, snapped floor.

A "scalar" in this package is a plain number carried in one of three
arithmetic modes:

* hardware  - Python float (binary64 results),
* extended  - gmpy2.mpfr with a configurable mantissa (default 128 bits),
* exact     - fractions.Fraction, where arithmetic is exact and
              comparisons are decidable without any tolerance.

Instead of wrapping each value in an object, a :class:`NumericContext`
carries the mode plus the tolerance policy and converts, floors, and
compares values on demand.  The mode fixes how results are *presented*;
orbit computations are free to escalate their internal working precision
far beyond it whenever cancellation would otherwise destroy the answer
(see ``_orbit.py``).

The exact-rational mode exists as a test oracle.  It is allowed to be
slow; numerators and denominators grow geometrically with orbit depth.
"""

from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class Mode(enum.Enum):
    HARDWARE = "hw"
    EXTENDED = "ext"
    EXACT = "exact"


#: sensible absolute comparison tolerance per mode
_DEFAULT_EPS_COMPARE = {
    Mode.HARDWARE: 1e-9,
    Mode.EXTENDED: 1e-25,
    Mode.EXACT: 1e-30,  # unused: exact mode compares with ==
}


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerance knobs. All strictly positive; they are independent dials.

    eps_compare  - absolute tolerance for value comparisons
    eps_snap     - relative tolerance for snapping near-integers during
                   digit extraction, and for treating remainders as zero
    eps_boundary - dead-zone half-width for region membership; points
                   closer than this to a boundary are reported as
                   "boundary" instead of being guessed at
    """

    eps_compare: float = 1e-9
    eps_snap: float = 1e-12
    eps_boundary: float = 1e-9

    def __post_init__(self):
        for name in ("eps_compare", "eps_snap", "eps_boundary"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def for_mode(cls, mode: Mode) -> "TolerancePolicy":
        return cls(eps_compare=_DEFAULT_EPS_COMPARE[mode])


def parse_rational(text: str) -> Fraction:
    """Parse 'num/den' or a plain integer string into a Fraction."""
    body = text.strip()
    if "/" in body:
        num, _, den = body.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(body))


def snap_floor(t, eps_snap: float = 1e-12) -> int:
    """Floor with upward snapping for values just below an integer.

    Returns floor(t), except when t lies within eps_snap * max(1, |t|)
    below an integer m, in which case m is returned.  Exact rationals
    and ints are floored exactly, with no snapping.  Values below
    -eps_snap * max(1, |t|) indicate a broken digit-extraction state.
    """
    if isinstance(t, (int, Fraction)) or type(t) is gmpy2.mpq:
        if t < 0:
            raise DomainError(f"snap_floor: negative input {t}")
        return math.floor(t)
    tf = float(t)
    scale = max(1.0, abs(tf))
    if tf < -eps_snap * scale:
        raise DomainError(f"snap_floor: negative input {tf} beyond tolerance")
    f = int(gmpy2.floor(t)) if type(t) is gmpy2.mpfr else math.floor(tf)
    if t - f > 1 - eps_snap * scale:
        f += 1
    return max(f, 0)


@dataclass(frozen=True)
class NumericContext:
    """Arithmetic mode + tolerance policy, shared by all operations."""

    mode: Mode = Mode.HARDWARE
    bits: int = 128
    tol: TolerancePolicy = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.tol is None:
            object.__setattr__(self, "tol", TolerancePolicy.for_mode(self.mode))
        if self.mode is Mode.EXTENDED and self.bits < 53:
            raise ValueError("extended mode needs at least 53 mantissa bits")

    # -- conversion ----------------------------------------------------

    def convert(self, value):
        """Bring a value into this context's number type.

        Exact mode accepts ints, Fractions, and 'num/den' strings only;
        floats are rejected because the caller almost never means the
        exact binary rational behind a decimal literal.
        """
        if self.mode is Mode.EXACT:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, str):
                try:
                    return parse_rational(value)
                except ValueError as exc:
                    raise TypeError(
                        "exact mode takes int, Fraction, or 'num/den' input, "
                        f"got {value!r}"
                    ) from exc
            if type(value) is gmpy2.mpq:
                return Fraction(value.numerator, value.denominator)
            raise TypeError(
                "exact mode takes int, Fraction, or 'num/den' input, "
                f"not {type(value).__name__}"
            )
        if self.mode is Mode.EXTENDED:
            with self.guard():
                if isinstance(value, str):
                    if "/" in value:
                        return gmpy2.mpfr(gmpy2.mpq(parse_rational(value)))
                    return gmpy2.mpfr(value)
                if isinstance(value, Fraction):
                    return gmpy2.mpfr(gmpy2.mpq(value))
                return gmpy2.mpfr(value)
        # hardware
        if isinstance(value, str):
            if "/" in value:
                return float(parse_rational(value))
            return float(value)
        return float(value)

    def to_float(self, value) -> float:
        return float(value)

    def guard(self):
        """Context manager pinning gmpy2 precision in extended mode."""
        if self.mode is Mode.EXTENDED:
            return gmpy2.context(precision=self.bits)
        return contextlib.nullcontext()

    # -- comparisons ---------------------------------------------------

    def isclose(self, a, b, eps: float | None = None) -> bool:
        if self.mode is Mode.EXACT:
            return a == b
        if eps is None:
            eps = self.tol.eps_compare
        return abs(float(a) - float(b)) <= eps

    def snap_floor(self, t) -> int:
        return snap_floor(t, self.tol.eps_snap)


#: ready-made contexts for the common cases
HARDWARE = NumericContext(Mode.HARDWARE)
EXTENDED = NumericContext(Mode.EXTENDED)
EXACT = NumericContext(Mode.EXACT)
