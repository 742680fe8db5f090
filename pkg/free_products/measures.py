"""Named laws and the closed-form computations built on them.

Covers powers of the free Poisson law, products of shifted semicirculars, the
eventual positivity of free cumulants of free powers, and the limit of
D_{1/k}((mu^{boxtimes k})^{boxplus k}) and of its Boolean counterpart.
"""

import logging
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Iterable, List, Optional, Tuple

from pydantic import model_validator

from free_products.bounds import rational_root
from free_products.convolution import (
    MeasureSpec,
    SpecKind,
    boxplus_k,
    boxtimes_power,
    dilate,
    pair_cumulants,
    uplus_k,
)
from free_products.cumulants import CumulantSequence, Flavor, MomentSequence
from free_products.enumeration import count_k_divisible, count_k_equal
from free_products.exceptions import DomainError, TruncationError
from free_products.models import FreeProductsBaseModel, Rational

_logger = logging.getLogger(__name__)

_QUARTER = Fraction(1, 4)


class LawKind(str, Enum):
    FREE_POISSON = "free-poisson"
    SHIFTED_SEMICIRCLE = "shifted-semicircle"
    POINT_MASS = "point-mass"
    TWO_POINT = "two-point"
    SAKUMA_H = "sakuma-h"
    SAKUMA_S = "sakuma-s"


class NamedLaw(FreeProductsBaseModel):
    """A law with a closed form, materialized as a MeasureSpec on demand.

    ``two-point`` takes two distinct ``atoms`` a < 1 <= b (or a <= 1 < b); the
    weights are forced so the mean is 1.
    """

    kind: LawKind
    sigma2: Optional[Rational] = None
    c: Optional[Rational] = None
    atoms: Optional[Tuple[Rational, Rational]] = None

    @model_validator(mode="after")
    def check_parameters(self) -> "NamedLaw":
        if self.kind is LawKind.SHIFTED_SEMICIRCLE:
            if self.sigma2 is None or not 0 < self.sigma2 <= _QUARTER:
                raise ValueError(f"shifted-semicircle needs 0 < sigma2 <= 1/4, got {self.sigma2}")
        if self.kind in (LawKind.SAKUMA_H, LawKind.SAKUMA_S):
            if self.sigma2 is None or self.sigma2 <= 0:
                raise ValueError(f"{self.kind.value} needs sigma2 > 0, got {self.sigma2}")
        if self.kind is LawKind.POINT_MASS and (self.c is None or self.c <= 0):
            raise ValueError(f"point-mass needs c > 0, got {self.c}")
        if self.kind is LawKind.TWO_POINT:
            if self.atoms is None:
                raise ValueError("two-point needs 'atoms'")
            a, b = sorted(self.atoms)
            if a == b or a < 0 or not a <= 1 <= b:
                raise ValueError(f"two-point atoms must be distinct, non-negative and straddle 1, got {self.atoms}")
        return self

    def weights(self) -> Tuple[Fraction, Fraction]:
        """Weights of the sorted atoms that put the mean at 1."""
        if self.atoms is None:
            raise DomainError(f"{self.kind.value} has no atoms")
        a, b = sorted(self.atoms)
        upper = (1 - a) / (b - a)
        return 1 - upper, upper

    def spec(self, order: int) -> MeasureSpec:
        """Materialize the first ``order`` moments or cumulants."""
        if order < 1:
            raise DomainError(f"order must be >= 1, got {order}")
        name = self.kind.value
        one = Fraction(1)
        if self.kind is LawKind.FREE_POISSON:
            return MeasureSpec(name=name, flavor=SpecKind.FREE, values=(one,) * order, L=Fraction(4), mean=one)
        if self.kind is LawKind.SHIFTED_SEMICIRCLE:
            assert self.sigma2 is not None
            values = ((one, self.sigma2) + (Fraction(0),) * order)[:order]
            edge = 1 + 2 * rational_root(self.sigma2, 2, 12, round_up=True)
            return MeasureSpec(name=name, flavor=SpecKind.FREE, values=values, L=edge, mean=one)
        if self.kind is LawKind.POINT_MASS:
            assert self.c is not None
            moments = tuple(self.c**n for n in range(1, order + 1))
            return MeasureSpec(name=name, flavor=SpecKind.MOMENTS, values=moments, L=self.c)
        if self.kind is LawKind.TWO_POINT:
            assert self.atoms is not None
            (a, b), (wa, wb) = sorted(self.atoms), self.weights()
            moments = tuple(wa * a**n + wb * b**n for n in range(1, order + 1))
            return MeasureSpec(name=name, flavor=SpecKind.MOMENTS, values=moments, L=b, mean=one)
        assert self.sigma2 is not None
        flavor = Flavor.FREE if self.kind is LawKind.SAKUMA_H else Flavor.BOOLEAN
        return MeasureSpec.of_cumulants(limit_law_cumulants(self.sigma2, order, flavor), name=name)


def free_poisson_power_cumulant(k: int, n: int) -> int:
    """kappa_n of the k-th free power of the free Poisson law: binom(kn, n) / ((k-1)n + 1)."""
    return count_k_equal(k, n)


def free_poisson_power_moment(k: int, n: int) -> int:
    """m_n of the k-th free power of the free Poisson law: binom((k+1)n, n) / (kn + 1)."""
    return count_k_divisible(k, n)


def free_poisson_power_edge(k: int) -> Fraction:
    """Right edge (k+1)^{k+1} / k^k of the support of the k-th free power."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return Fraction((k + 1) ** (k + 1), k**k)


def wigner_product_cumulant(k: int, n: int, sigma2: Fraction) -> Fraction:
    """kappa_n of a product of k free shifted semicirculars of variance ``sigma2``.

    k ((k-1)n)! sigma2^{n-1} / ((n-1)! ((k-2)n+2)!).
    """
    sigma2 = Fraction(sigma2)
    if k < 2 or n < 1:
        raise DomainError(f"needs k >= 2 and n >= 1, got k={k}, n={n}")
    if not 0 < sigma2 <= _QUARTER:
        raise DomainError(f"shifted semicircle needs 0 < sigma^2 <= 1/4, got {sigma2}")
    return Fraction(k * factorial((k - 1) * n), factorial(n - 1) * factorial((k - 2) * n + 2)) * sigma2 ** (n - 1)


def limit_cumulant(sigma2: Fraction, n: int) -> Fraction:
    """(sigma2 n)^{n-1} / n!, the n-th cumulant of the limit law."""
    return (Fraction(sigma2) * n) ** (n - 1) / factorial(n)


def _variance(spec: MeasureSpec) -> Fraction:
    m = spec.moment_sequence()
    return m[2] - m[1] ** 2


class PositivityRow(FreeProductsBaseModel):
    k: int
    cumulants: Tuple[Rational, ...]
    nonnegative: bool


class PositivityScan(FreeProductsBaseModel):
    """Free cumulants of mu^{boxtimes k} for k = 1..k_max and the first k where all are >= 0."""

    n: int
    k_max: int
    threshold: Optional[int]
    rows: Tuple[PositivityRow, ...]


def eventual_positivity_scan(spec: MeasureSpec, n: int, k_max: int) -> PositivityScan:
    """Scan k = 1..k_max for kappa_1..kappa_n(mu^{boxtimes k}) >= 0 with the iterated engine."""
    if spec.support_bound is None:
        raise DomainError("positivity scan needs a declared support bound L")
    if n < 2 or k_max < 1:
        raise DomainError(f"needs n >= 2 and k_max >= 1, got n={n}, k_max={k_max}")
    if _variance(spec) <= 0:
        raise DomainError("positivity scan needs a law with positive variance")
    base = spec.cumulants_to(n)
    current = base
    rows = []
    threshold = None
    for k in range(1, k_max + 1):
        if k > 1:
            current = pair_cumulants(current, base, n)
        nonnegative = all(v >= 0 for v in current)
        if nonnegative and threshold is None:
            threshold = k
            _logger.info(f"cumulants to order {n} are non-negative from k={k}")
        rows.append(PositivityRow(k=k, cumulants=current, nonnegative=nonnegative))
    return PositivityScan(n=n, k_max=k_max, threshold=threshold, rows=tuple(rows))


class LimitCheck(FreeProductsBaseModel):
    """Computed cumulant of the rescaled k-fold construction against its limit value."""

    k: int
    n: int
    flavor: Flavor
    computed: Rational
    target: Rational
    deviation: Rational


def _limit_variance(spec: MeasureSpec, n: int) -> Fraction:
    """Variance of a mean-1 ``spec`` known to order ``n``."""
    if spec.order < max(n, 2):
        raise TruncationError(max(n, 2), spec.order, what=spec.name or "measure spec")
    m = spec.moment_sequence()
    if m[1] != 1:
        raise DomainError(f"limit checks need mean 1, got {m[1]}")
    sigma2 = m[2] - m[1] ** 2
    if sigma2 <= 0:
        raise DomainError("limit checks need a law with positive variance")
    return sigma2


def _check(k: int, n: int, flavor: Flavor, computed: Fraction, sigma2: Fraction) -> LimitCheck:
    target = limit_cumulant(sigma2, n)
    deviation = abs(computed - target) / target
    return LimitCheck(k=k, n=n, flavor=flavor, computed=computed, target=target, deviation=deviation)


def _limit_check(spec: MeasureSpec, n: int, k: int, flavor: Flavor) -> LimitCheck:
    if k < 1 or n < 1:
        raise DomainError(f"needs n, k >= 1, got n={n}, k={k}")
    sigma2 = _limit_variance(spec, n)
    power = boxtimes_power(spec, k, n, flavor)
    summed = (boxplus_k if flavor is Flavor.FREE else uplus_k)([power] * k, n)
    rescaled = dilate(summed, Fraction(1, k))
    return _check(k, n, flavor, rescaled.cumulants_to(n, flavor)[n - 1], sigma2)


def sakuma_limit_check(spec: MeasureSpec, n: int, k: int) -> LimitCheck:
    """kappa_n(D_{1/k}((mu^{boxtimes k})^{boxplus k})) next to (sigma^2 n)^{n-1} / n!."""
    return _limit_check(spec, n, k, Flavor.FREE)


def sakuma_boolean_limit_check(spec: MeasureSpec, n: int, k: int) -> LimitCheck:
    """Boolean analogue with the Boolean additive convolution and Boolean cumulants."""
    return _limit_check(spec, n, k, Flavor.BOOLEAN)


def sakuma_limit_scan(spec: MeasureSpec, n: int, kgrid: Iterable[int], boolean: bool = False) -> List[LimitCheck]:
    """Fold mu once up to max(kgrid) and report a check at every grid point.

    The k-fold sum multiplies cumulants by k and the dilation by k^{-n}, so the
    computed value is k^{1-n} kappa_n(mu^{boxtimes k}).
    """
    grid = sorted(set(kgrid))
    if not grid or grid[0] < 1 or n < 1:
        raise DomainError(f"needs n >= 1 and a grid of positive k, got n={n}, kgrid={grid}")
    flavor = Flavor.BOOLEAN if boolean else Flavor.FREE
    sigma2 = _limit_variance(spec, n)
    base = spec.cumulants_to(n, flavor)
    current = base
    checks = []
    for k in range(1, grid[-1] + 1):
        if k > 1:
            current = pair_cumulants(current, base, n)
        if k in grid:
            checks.append(_check(k, n, flavor, current[n - 1] / Fraction(k) ** (n - 1), sigma2))
    return checks


def dilated_power_moments(spec: MeasureSpec, k: int, order: int) -> MomentSequence:
    """Moments of D_{1/k}(mu^{boxtimes k}); they tend to those of the point mass at 0."""
    power = boxtimes_power(spec, k, order)
    return dilate(power, Fraction(1, k)).moment_sequence()


def limit_law_cumulants(sigma2: Fraction, order: int, flavor: Flavor = Flavor.FREE) -> CumulantSequence:
    """Cumulants of the free (sakuma-h) or Boolean (sakuma-s) limit law."""
    return CumulantSequence(values=tuple(limit_cumulant(sigma2, n) for n in range(1, order + 1)), flavor=flavor)
