"""Exact rational parsing and rendering ("p/q" strings)."""
from fractions import Fraction


def parse_fraction(value):
    """Parse an int, a "p/q" string or a "p" string into a Fraction.

    Floats are rejected: every probability in this package is exact.
    """
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except ValueError:
            pass
        raise ValueError(f"not an exact rational: {value!r}")
    raise TypeError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def fmt(value):
    """Render a Fraction (or bool/int) as the canonical "p/q" string."""
    if isinstance(value, bool):
        return "1" if value else "0"
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def fmt_with_decimal(value, digits=6):
    q = Fraction(value)
    return f"{fmt(q)} (~{float(q):.{digits}g})"
