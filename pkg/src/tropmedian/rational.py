"""Exact rational parsing and formatting."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable


def to_rational(value) -> Fraction:
    """Convert ``value`` to a :class:`Fraction` without going through binary floats.

    Strings are parsed as exact decimal literals (``"0.1"``, ``"1e-3"``) or as
    ``"p/q"``. Python floats are converted through their shortest ``repr`` so
    that ``0.1`` becomes ``1/10`` rather than the nearest dyadic rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty numeric literal")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational literal: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def to_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in values)


def format_rational(q: Fraction) -> str:
    """Shortest exact decimal if ``q`` terminates in base ten, else ``"p/q"``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    whole, frac = divmod(scaled, 10**digits)
    frac_text = str(frac).rjust(digits, "0").rstrip("0")
    sign = "-" if q < 0 else ""
    return f"{sign}{whole}.{frac_text}"
