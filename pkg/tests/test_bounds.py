from fractions import Fraction

import pytest
from pydantic import ValidationError

from free_products.bounds import (
    E_LOWER,
    E_UPPER,
    BoundCertificate,
    certify,
    cumulant_bound,
    edge_table_csv,
    estimate_support_edge,
    rational_root,
    shifted_semicircle_edge_bracket,
    support_lower_bound,
    support_upper_bound,
)
from free_products.convolution import MeasureSpec, SpecKind, boxtimes_power
from free_products.exceptions import DomainError
from free_products.measures import LawKind, NamedLaw


def _free_poisson(order):
    return MeasureSpec(flavor=SpecKind.FREE, values=(Fraction(1),) * order, L=Fraction(4))


def test_e_bracket():
    assert E_LOWER < E_UPPER
    assert E_UPPER - E_LOWER == Fraction(1, 10**15)


def test_cumulant_bound():
    assert cumulant_bound(Fraction(2), 3) == 52**2
    assert cumulant_bound(Fraction(1), 1) == 1
    with pytest.raises(DomainError):
        cumulant_bound(Fraction(1, 2), 2)


def test_support_bounds():
    assert support_lower_bound(3, Fraction(1, 2)) == Fraction(5, 2)
    assert support_upper_bound(2, Fraction(4), nonneg_cumulants=True) == 12 * E_UPPER
    assert support_upper_bound(2, Fraction(4)) == 26 * 12 * E_UPPER
    with pytest.raises(DomainError):
        support_lower_bound(0, Fraction(1))
    with pytest.raises(DomainError):
        support_lower_bound(1, Fraction(-1))


def test_certify():
    certificate = certify(2, Fraction(4), Fraction(1), nonneg_cumulants=True)

    assert certificate.lower == 3
    assert certificate.upper == 12 * E_UPPER
    assert certificate.constant_tag == "e"
    dumped = certificate.model_dump(mode="json", by_alias=True)
    assert dumped["L"] == "4"
    assert dumped["lower"] == "3"

    assert certify(2, Fraction(4), Fraction(1)).constant_tag == "26e"


def test_certify_rejects_impossible_variance():
    with pytest.raises(DomainError):
        certify(2, Fraction(2), Fraction(3, 2))


def test_certificate_orders_bounds():
    with pytest.raises(ValidationError):
        BoundCertificate(
            k=1,
            L=Fraction(1),
            sigma2=Fraction(0),
            lower=Fraction(2),
            upper=Fraction(1),
            constant=Fraction(1),
            constant_tag="e",
            nonneg_cumulants=True,
        )


def test_rational_root():
    assert rational_root(Fraction(2), 2, 3) == Fraction(1414, 1000)
    assert rational_root(Fraction(2), 2, 3, round_up=True) == Fraction(1415, 1000)
    assert rational_root(Fraction(4), 2, 5, round_up=True) == 2
    assert rational_root(Fraction(27, 8), 3, 4) == Fraction(3, 2)
    assert rational_root(Fraction(0), 4, 2) == 0
    with pytest.raises(DomainError):
        rational_root(Fraction(-1), 3, 2)


@pytest.mark.parametrize(
    "k, low, high",
    [(1, Fraction(277, 100), Fraction(278, 100)), (2, Fraction(438, 100), Fraction(439, 100))],
)
def test_free_poisson_edge_estimates(k, low, high):
    estimates = estimate_support_edge(boxtimes_power(_free_poisson(12), k, 12))

    assert estimates == sorted(estimates)
    assert low <= estimates[-1] <= high
    assert estimates[-1] <= Fraction((k + 1) ** (k + 1), k**k)


def test_edge_estimates_need_positive_moments():
    semicircle = MeasureSpec(flavor=SpecKind.FREE, values=(Fraction(0), Fraction(1)))

    with pytest.raises(DomainError):
        estimate_support_edge(semicircle)


def test_shifted_semicircle_bracket():
    lower, upper = shifted_semicircle_edge_bracket(2, Fraction(1, 4))

    assert lower == E_LOWER / 4
    assert upper == 6 * E_UPPER
    with pytest.raises(DomainError):
        shifted_semicircle_edge_bracket(2, Fraction(1, 2))


def test_edge_table_csv():
    table = edge_table_csv([Fraction(1), Fraction(3, 2)], precision=2)

    assert table == "n,estimate,decimal\n1,1,1.00\n2,3/2,1.50\n"


def _bound_corpus():
    laws = [
        NamedLaw(kind=LawKind.FREE_POISSON).spec(8),
        NamedLaw(kind=LawKind.TWO_POINT, atoms=(Fraction(0), Fraction(4, 3))).spec(8),
        NamedLaw(kind=LawKind.TWO_POINT, atoms=(Fraction(0), Fraction(2))).spec(8),
        NamedLaw(kind=LawKind.SHIFTED_SEMICIRCLE, sigma2=Fraction(1, 4)).spec(8),
        NamedLaw(kind=LawKind.SHIFTED_SEMICIRCLE, sigma2=Fraction(1, 9)).spec(8),
    ]
    return laws + [boxtimes_power(law, k, 8) for law in laws for k in (2, 3)]


@pytest.mark.parametrize("spec", _bound_corpus())
def test_cumulant_bound_holds_on_corpus(spec):
    cumulants = spec.cumulants_to(8)

    assert cumulants[0] == 1
    for n in range(2, 9):
        assert abs(cumulants[n - 1]) < cumulant_bound(spec.support_bound, n)
