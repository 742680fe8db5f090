from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import fractions

from free_products.enumeration import CountTable, Family
from free_products.models import format_decimal, format_rational, parse_rational


def test_parse_rational_literals():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(" -7 ") == Fraction(-7)
    assert parse_rational("0.125") == Fraction(1, 8)
    assert parse_rational(0.1) == Fraction(1, 10)
    assert parse_rational(Decimal("2.5")) == Fraction(5, 2)
    assert parse_rational(5) == Fraction(5)


@pytest.mark.parametrize("value", [True, "abc", "1/0", None, [1]])
def test_parse_rational_rejects(value):
    with pytest.raises(ValueError):
        parse_rational(value)


def test_format_rational():
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-2, 6)) == "-1/3"


@given(fractions())
def test_format_rational_parses_back(value):
    assert parse_rational(format_rational(value)) == value


def test_format_decimal_truncates_toward_zero():
    assert format_decimal(Fraction(2, 3), 4) == "0.6666"
    assert format_decimal(Fraction(-1, 3), 3) == "-0.333"
    assert format_decimal(Fraction(2), 2) == "2.00"


def test_count_serializes_as_string():
    table = CountTable(family=Family.NC, n=4, count=14)

    assert table.model_dump(mode="json") == {
        "family": "nc",
        "n": 4,
        "k": None,
        "type_vector": None,
        "kreweras_type": None,
        "count": "14",
    }
