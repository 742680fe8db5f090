"""Shared pydantic base model and the exact rational field type."""

from abc import ABC
from decimal import Decimal
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, BeforeValidator, PlainSerializer
from pydantic.config import ConfigDict
from typing_extensions import Annotated


def parse_rational(value: Any) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ``Fraction``, ``int``, ``Decimal`` and strings in ``p/q``, integer or
    finite decimal notation. Floats are read through their shortest decimal
    representation, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational literal: {value!r}") from e
    raise ValueError(f"expected a rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Render ``value`` as ``p/q``, or ``p`` when it is an integer."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]

# Arbitrary-precision counts travel as decimal strings.
Count = Annotated[int, PlainSerializer(lambda value: str(value), return_type=str)]


class FreeProductsBaseModel(BaseModel, ABC):
    """Defines common configuration for models."""

    model_config = ConfigDict(
        populate_by_name=True,
        protected_namespaces=(),
        arbitrary_types_allowed=True,
        frozen=True,
        extra="forbid",
    )


def format_decimal(value: Fraction, precision: int) -> str:
    """Render ``value`` with ``precision`` digits after the point, truncated toward zero."""
    sign = "-" if value < 0 else ""
    scaled = abs(value.numerator) * 10**precision // value.denominator
    whole, frac = divmod(scaled, 10**precision)
    return f"{sign}{whole}.{frac:0{precision}d}"
