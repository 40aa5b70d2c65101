"""Exact number handling.

Every coordinate and model parameter is carried as a :class:`Fraction`.
Floats are read through their shortest decimal representation, so ``0.7``
becomes ``7/10`` rather than the binary approximation of 0.7.
"""

import math
from fractions import Fraction
from numbers import Rational


def as_rational(value):
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    # numpy scalars and anything else with a sensible float()
    if hasattr(value, "item"):
        return as_rational(value.item())
    return Fraction(repr(float(value)))


def as_point(values):
    return tuple(as_rational(v) for v in values)


def format_rational(value):
    """Render a rational as a short exact string ("0.7", "-3", "1/3")."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def format_value(value):
    """Like :func:`format_rational` but passes non-rationals through unchanged."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return format_rational(value)
    return value


def ceil_div(a, b):
    return -((-a) // b)
