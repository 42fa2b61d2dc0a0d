"""Exact rational arithmetic used everywhere in the core.

gmpy2.mpq is roughly an order of magnitude faster than fractions.Fraction
for the dense eliminations done by the LP solver; the two types are
interchangeable (same hashing, comparisons and string form), so a plain
Fraction fallback keeps the package importable without gmpy2.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

ZERO = Rational(0)
ONE = Rational(1)


def rat(numerator, denominator=1) -> Rational:
    """Build an exact rational from ints, strings like "3/4", or rationals."""
    if denominator == 1:
        return Rational(numerator)
    return Rational(numerator) / Rational(denominator)


def parse_rational(text: str) -> Rational:
    """Parse a "p/q" (or bare "p") string; rejects floats and empty input."""
    if not isinstance(text, str) or not text.strip():
        raise ValueError(f"expected a rational string, got {text!r}")
    if "." in text or "e" in text.lower():
        raise ValueError(f"rationals must be exact p/q strings, got {text!r}")
    try:
        if "/" in text:
            num, den = text.split("/")
            return Rational(int(num.strip())) / Rational(int(den.strip()))
        return Rational(int(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}: {exc}") from None


def format_rational(value) -> str:
    """Canonical "p/q" form (bare "p" for integers); inverse of parse_rational."""
    return str(Rational(value))
