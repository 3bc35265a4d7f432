"""The coefficient field: exact rationals backed by :class:`fractions.Fraction`.

Fractions are always stored in lowest terms with a positive denominator, so
``Fraction`` already satisfies the canonical-form requirements. Serialized
rationals always use the ``p/q`` form; floats are rejected everywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm

from .errors import ParseError

_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?\Z")

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``-p`` or ``p/q`` into a Fraction."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if not _RATIONAL.match(text):
        raise ParseError(f"malformed rational {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def common_denominator(values) -> int:
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    return den


def bit_length(x: Fraction) -> int:
    """Larger of the numerator and denominator bit lengths."""
    return max(abs(x.numerator).bit_length(), x.denominator.bit_length())
