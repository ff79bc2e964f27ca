"""Complex ball arithmetic on top of mpmath, used to certify root designations."""
from dataclasses import dataclass
from typing import Sequence, Union

import mpmath
from mpmath import mpc, mpf

Number = Union[int, mpf, mpc]


def to_mpc(value) -> mpc:
    """Convert ints, sympy rationals and mpmath numbers at the current precision."""
    if isinstance(value, (mpf, mpc)):
        return mpc(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return mpc(mpf(int(value.p)) / mpf(int(value.q)))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpc(mpf(int(value.numerator)) / mpf(int(value.denominator)))
    return mpc(value)


def _represents(value, center: mpc) -> bool:
    """True when the binary ``center`` equals the rational ``value`` with no rounding."""
    if isinstance(value, (mpf, mpc)):
        return True
    if hasattr(value, "p") and hasattr(value, "q"):
        numerator, denominator = int(value.p), int(value.q)
    elif hasattr(value, "numerator") and hasattr(value, "denominator"):
        numerator, denominator = int(value.numerator), int(value.denominator)
    else:
        return False
    if center.imag != 0:
        return False
    mantissa, exponent = mpf(center.real).man_exp
    if exponent >= 0:
        return numerator == mantissa * 2**exponent * denominator
    return numerator * 2 ** (-exponent) == mantissa * denominator


def _eps(value: mpc, bits: int) -> mpf:
    """One rounding unit at ``bits`` for a value of this magnitude."""
    return (abs(value) + mpf(2) ** -bits) * mpf(2) ** (-bits + 2)


@dataclass(frozen=True)
class Ball:
    """Closed disc ``center + radius`` in the complex plane."""

    center: mpc
    radius: mpf
    bits: int

    @classmethod
    def exact(cls, value, bits: int) -> "Ball":
        with mpmath.workprec(bits):
            center = to_mpc(value)
            radius = mpf(0) if _represents(value, center) else _eps(center, bits)
        return cls(center, radius, bits)

    def __add__(self, other: "Ball") -> "Ball":
        with mpmath.workprec(self.bits):
            center = self.center + other.center
            return Ball(center, self.radius + other.radius + _eps(center, self.bits), self.bits)

    def __sub__(self, other: "Ball") -> "Ball":
        with mpmath.workprec(self.bits):
            center = self.center - other.center
            return Ball(center, self.radius + other.radius + _eps(center, self.bits), self.bits)

    def __neg__(self) -> "Ball":
        return Ball(-self.center, self.radius, self.bits)

    def __mul__(self, other: "Ball") -> "Ball":
        with mpmath.workprec(self.bits):
            center = self.center * other.center
            radius = (
                abs(self.center) * other.radius
                + abs(other.center) * self.radius
                + self.radius * other.radius
                + _eps(center, self.bits)
            )
            return Ball(center, radius, self.bits)

    def __truediv__(self, other: "Ball") -> "Ball":
        with mpmath.workprec(self.bits):
            denominator = abs(other.center)
            if denominator <= other.radius:
                raise ZeroDivisionError("divisor ball contains zero")
            center = self.center / other.center
            radius = (self.radius * denominator + abs(self.center) * other.radius) / (
                denominator * (denominator - other.radius)
            )
            return Ball(center, radius + _eps(center, self.bits), self.bits)

    def contains_zero(self) -> bool:
        return abs(self.center) <= self.radius

    def overlaps(self, other: "Ball") -> bool:
        with mpmath.workprec(max(self.bits, other.bits)):
            return abs(self.center - other.center) <= self.radius + other.radius

    def abs_upper(self) -> mpf:
        return abs(self.center) + self.radius

    def abs_lower(self) -> mpf:
        return max(mpf(0), abs(self.center) - self.radius)


def horner(coefficients: Sequence[Number], z: Ball) -> Ball:
    """Evaluate a polynomial given by coefficients (highest first) on a ball."""
    result = Ball.exact(0, z.bits)
    for c in coefficients:
        result = result * z + Ball.exact(c, z.bits)
    return result
