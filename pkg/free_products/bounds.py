"""Certified bounds on free cumulants and on the support edge of free products.

All bounds are exact rationals. Irrational quantities enter through one-sided
rational approximations chosen so that upper bounds stay upper bounds and
lower bounds stay lower bounds.
"""

import csv
import io
import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

from pydantic import Field, model_validator

from free_products.convolution import MeasureSpec
from free_products.exceptions import DomainError
from free_products.models import FreeProductsBaseModel, Rational, format_decimal, format_rational

_logger = logging.getLogger(__name__)

# e lies strictly between these; both are within 1e-15 of it.
E_LOWER = Fraction(2718281828459045, 10**15)
E_UPPER = Fraction(2718281828459046, 10**15)

CUMULANT_BOUND_CONSTANT = 26


class BoundCertificate(FreeProductsBaseModel):
    """Lower and upper bounds on the support edge of the k-fold free product of mean-1 laws on [0, L]."""

    k: int
    support_bound: Rational = Field(alias="L")
    sigma2: Rational
    lower: Rational
    upper: Rational
    constant: Rational
    constant_tag: str
    nonneg_cumulants: bool

    @model_validator(mode="after")
    def check_order(self) -> "BoundCertificate":
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        return self


def _check_support_bound(L: Fraction) -> None:
    if L < 1:
        raise DomainError(f"support bound L={L} is below 1; a mean-1 law on [0, L] needs L >= 1")


def _check_k(k: int) -> None:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")


def cumulant_bound(L: Fraction, n: int) -> Fraction:
    """(26L)^{n-1}, bounding |kappa_n| of a mean-1 law on [0, L]."""
    L = Fraction(L)
    _check_support_bound(L)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return (CUMULANT_BOUND_CONSTANT * L) ** (n - 1)


def support_lower_bound(k: int, sigma2: Fraction) -> Fraction:
    """k sigma^2 + 1 <= L_k."""
    _check_k(k)
    sigma2 = Fraction(sigma2)
    if sigma2 < 0:
        raise DomainError(f"variance must be >= 0, got {sigma2}")
    return k * sigma2 + 1


def support_upper_bound(k: int, L: Fraction, nonneg_cumulants: bool = False) -> Fraction:
    """C L (k+1) with C = 26e, or C = e when every free cumulant is non-negative.

    e is replaced by ``E_UPPER`` so the value is a certified upper bound.
    """
    _check_k(k)
    L = Fraction(L)
    _check_support_bound(L)
    return _constant(nonneg_cumulants)[0] * L * (k + 1)


def _constant(nonneg_cumulants: bool) -> Tuple[Fraction, str]:
    if nonneg_cumulants:
        return E_UPPER, "e"
    return CUMULANT_BOUND_CONSTANT * E_UPPER, "26e"


def certify(k: int, L: Fraction, sigma2: Fraction, nonneg_cumulants: bool = False) -> BoundCertificate:
    """Bundle the lower and upper support-edge bounds for the k-fold product.

    Raises
    ------
    DomainError
        If ``sigma2`` exceeds L - 1, the largest variance of a mean-1 law on [0, L].
    """
    L, sigma2 = Fraction(L), Fraction(sigma2)
    _check_support_bound(L)
    if sigma2 > L - 1:
        raise DomainError(f"variance {sigma2} exceeds L - 1 = {L - 1}, impossible for a mean-1 law on [0, {L}]")
    constant, tag = _constant(nonneg_cumulants)
    return BoundCertificate(
        k=k,
        L=L,
        sigma2=sigma2,
        lower=support_lower_bound(k, sigma2),
        upper=support_upper_bound(k, L, nonneg_cumulants),
        constant=constant,
        constant_tag=tag,
        nonneg_cumulants=nonneg_cumulants,
    )


def _integer_root(x: int, n: int) -> int:
    """Largest y >= 0 with y^n <= x."""
    lo, hi = 0, 1 << (x.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**n <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def rational_root(x: Fraction, n: int, precision: int, round_up: bool = False) -> Fraction:
    """x^{1/n} on the grid 10^{-precision}, rounded down (default) or up.

    Exact integer arithmetic: the result y / 10^p satisfies (y / 10^p)^n <= x when
    rounding down, and >= x when rounding up.
    """
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"cannot take a real root of the negative number {x}")
    if n < 1:
        raise DomainError(f"root degree must be >= 1, got {n}")
    scale = 10**precision
    target = x.numerator * scale**n
    y = _integer_root(target // x.denominator, n)
    if round_up and y**n * x.denominator < target:
        y += 1
    return Fraction(y, scale)


def estimate_support_edge(spec: MeasureSpec, precision: int = 12) -> List[Fraction]:
    """m_n^{1/n} for n = 1..N, each rounded down to ``precision`` digits.

    For a law on [0, L] the sequence is non-decreasing and every term is a lower
    bound on the right edge of the support.
    """
    moments = spec.moment_sequence()
    estimates = []
    for n, m in enumerate(moments.values, start=1):
        if m <= 0:
            raise DomainError(f"moment m_{n} = {m} is not positive; not a law on [0, inf) with mass off 0")
        estimates.append(rational_root(m, n, precision))
    _logger.debug(f"edge estimates for {spec.name or 'spec'}: {estimates}")
    return estimates


def shifted_semicircle_edge_bracket(k: int, sigma2: Fraction, precision: int = 12) -> Tuple[Fraction, Fraction]:
    """The bracket ((k-1) e sigma^2, (k+1) e (1 + 2 sigma)) for k shifted semicirculars.

    The lower end uses ``E_LOWER``; the upper end uses ``E_UPPER`` and sigma
    rounded up.
    """
    _check_k(k)
    sigma2 = Fraction(sigma2)
    if not 0 < sigma2 <= Fraction(1, 4):
        raise DomainError(f"shifted semicircle needs 0 < sigma^2 <= 1/4, got {sigma2}")
    sigma = rational_root(sigma2, 2, precision, round_up=True)
    return (k - 1) * E_LOWER * sigma2, (k + 1) * E_UPPER * (1 + 2 * sigma)


def edge_table_csv(estimates: Sequence[Fraction], precision: int = 12) -> str:
    """CSV table of (n, m_n^{1/n}) with exact and decimal columns."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "estimate", "decimal"])
    for n, value in enumerate(estimates, start=1):
        writer.writerow([n, format_rational(value), format_decimal(value, precision)])
    return buffer.getvalue()
