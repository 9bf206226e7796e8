"""Exact covering parameter ``k = p/q`` and the covering classification.

Only positive rationals are representable; there is deliberately no way to
build a covering parameter from a float.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonPositive, ParseError, ZeroDenominator

__all__ = [
    "CoveringParameter",
    "CoveringClass",
    "Classification",
    "make_covering_parameter",
    "classify",
    "parse_k",
]

_K_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def _require_int(value, name):
    # bool is an int subclass but never a meaningful numerator
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")


@dataclass(frozen=True)
class CoveringParameter:
    """Covering parameter ``k = p/q`` stored in lowest terms with p, q >= 1."""

    p: int
    q: int

    def __post_init__(self):
        _require_int(self.p, "p")
        _require_int(self.q, "q")
        if self.p < 1 or self.q < 1:
            raise NonPositive(f"k must be positive, got p={self.p}, q={self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not in lowest terms")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def is_integer(self) -> bool:
        return self.q == 1

    def __float__(self):
        return self.p / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


class CoveringClass(enum.Enum):
    STRICT_COVERING = "StrictCovering"
    GENERALIZED_COVERING = "GeneralizedCovering"
    FOOTBALL = "Football"


@dataclass(frozen=True)
class Classification:
    """Stored tag plus the football flag.

    ``tag`` is never ``FOOTBALL``; being a football (k < 1) is orthogonal to
    strictness and reported through ``is_football``.
    """

    tag: CoveringClass
    is_football: bool


def make_covering_parameter(p: int, q: int = 1) -> CoveringParameter:
    """Normalize ``p/q`` to lowest terms.

    >>> make_covering_parameter(6, 2)
    CoveringParameter(p=3, q=1)
    """
    _require_int(p, "p")
    _require_int(q, "q")
    if q == 0:
        raise ZeroDenominator("denominator of k must be nonzero")
    if p * q <= 0:
        raise NonPositive(f"k = {p}/{q} must be strictly positive")
    p, q = abs(p), abs(q)
    g = math.gcd(p, q)
    return CoveringParameter(p // g, q // g)


def classify(k: CoveringParameter) -> Classification:
    tag = CoveringClass.STRICT_COVERING if k.q == 1 else CoveringClass.GENERALIZED_COVERING
    return Classification(tag=tag, is_football=k.p < k.q)


def parse_k(text: str) -> CoveringParameter:
    """Parse ``"p/q"`` or an integer string such as ``"3"``."""
    if not isinstance(text, str):
        raise ParseError(text)
    match = _K_PATTERN.match(text)
    if match is None:
        raise ParseError(text)
    p = int(match.group(1))
    q = int(match.group(2)) if match.group(2) is not None else 1
    return make_covering_parameter(p, q)
