"""Exact level arithmetic and its JSON encoding."""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

_RATIO = re.compile(r"^\s*-?\d+\s*/\s*\d+\s*$")


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Floats convert exactly (their binary value, not their decimal repr),
    strings may be ``"p/q"`` or decimal literals.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.replace(" ", ""))
    if hasattr(value, "item"):  # numpy scalars
        return as_fraction(value.item())
    raise TypeError(f"cannot interpret {value!r} as a number")


def as_level(value) -> Fraction:
    level = as_fraction(value)
    if level <= 0:
        raise ValueError(f"levels must be strictly positive, got {value!r}")
    return level


def encode_number(value):
    """JSON form of an exact number.

    Integers and dyadic rationals that round-trip through a double are
    emitted as JSON numbers; anything else becomes a ``"p/q"`` string so
    that decoding is lossless.
    """
    value = as_fraction(value)
    if value.denominator == 1:
        return int(value)
    as_float = float(value)
    if Fraction(as_float) == value:
        return as_float
    return f"{value.numerator}/{value.denominator}"


def decode_number(value) -> Fraction:
    if isinstance(value, str) and not (_RATIO.match(value) or _is_decimal(value)):
        raise ValueError(f"not a number: {value!r}")
    return as_fraction(value)


def _is_decimal(text: str) -> bool:
    try:
        Fraction(text.strip())
    except ValueError:
        return False
    return True
