"""Free multiplicative and additive convolution engines over truncated sequences.

Two engines compute the cumulants of a product of k free variables:

* ``direct`` sums over the k-equal partitions of [kn] (cumulants) and the
  k-divisible partitions of [kn] (moments), evaluating the Kreweras complement
  of each partition split into its k residue classes, position j carrying
  variable ((j - 1) mod k) + 1;
* ``iterated`` folds the two-variable formula
  kappa_n(ab) = sum over NC(n) of kappa_p(a) kappa_Kr(p)(b), grouped by the
  (type, Kreweras type) table so it runs beyond the enumeration ceiling.

Both engines are exact and agree term by term.
"""

import logging
from enum import Enum
from fractions import Fraction
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import Field, model_validator

from free_products.cumulants import (
    CumulantSequence,
    Flavor,
    MomentSequence,
    convert,
    cumulants_from_moments,
    moments_from_cumulants,
)
from free_products.enumeration import iter_k_divisible, iter_k_equal, pair_type_table
from free_products.exceptions import DomainError, ResourceLimitError, TruncationError
from free_products.models import FreeProductsBaseModel, Rational
from free_products.partitions import NoncrossingPartition, decompose_kreweras

_logger = logging.getLogger(__name__)

DIRECT_CEILING = 12


class SpecKind(str, Enum):
    FREE = "free"
    BOOLEAN = "boolean"
    MOMENTS = "moments"


class Strategy(str, Enum):
    DIRECT = "direct"
    ITERATED = "iterated"


class MeasureSpec(FreeProductsBaseModel):
    """A compactly supported law given by a truncated moment or cumulant sequence.

    ``flavor`` says what ``values`` holds. ``moments`` may accompany a cumulant
    sequence, in which case the two must agree. ``support_bound`` is a declared
    L with support in [0, L].
    """

    name: Optional[str] = None
    flavor: SpecKind = SpecKind.MOMENTS
    values: Tuple[Rational, ...] = Field(min_length=1)
    moments: Optional[Tuple[Rational, ...]] = None
    support_bound: Optional[Rational] = Field(default=None, alias="L")
    mean: Optional[Rational] = None
    variance: Optional[Rational] = None

    @model_validator(mode="after")
    def check_consistency(self) -> "MeasureSpec":
        if self.support_bound is not None and self.support_bound <= 0:
            raise ValueError(f"support bound must be positive, got {self.support_bound}")
        if self.moments is not None:
            if self.flavor is SpecKind.MOMENTS:
                raise ValueError("'moments' accompanies a cumulant sequence only")
            if len(self.moments) != len(self.values):
                raise ValueError("'moments' and 'values' must have the same length")
            derived = moments_from_cumulants(CumulantSequence(values=self.values, flavor=Flavor(self.flavor.value)))
            if derived.values != self.moments:
                raise ValueError("'moments' are not consistent with the cumulants in 'values'")
        if self.mean is None and self.variance is None:
            return self
        m = self.moment_sequence()
        if self.mean is not None and self.mean != m[1]:
            raise ValueError(f"declared mean {self.mean} does not match m_1 = {m[1]}")
        if self.variance is not None and m.order >= 2 and self.variance != m[2] - m[1] ** 2:
            raise ValueError(f"declared variance {self.variance} does not match m_2 - m_1^2 = {m[2] - m[1] ** 2}")
        return self

    @classmethod
    def of_cumulants(cls, c: CumulantSequence, **extra: object) -> "MeasureSpec":
        return cls.model_validate({"flavor": SpecKind(c.flavor.value), "values": c.values, **extra})

    @classmethod
    def of_moments(cls, m: MomentSequence, **extra: object) -> "MeasureSpec":
        return cls.model_validate({"flavor": SpecKind.MOMENTS, "values": m.values, **extra})

    @property
    def order(self) -> int:
        return len(self.values)

    def moment_sequence(self) -> MomentSequence:
        if self.flavor is SpecKind.MOMENTS:
            return MomentSequence(values=self.values)
        if self.moments is not None:
            return MomentSequence(values=self.moments)
        return moments_from_cumulants(CumulantSequence(values=self.values, flavor=Flavor(self.flavor.value)))

    def cumulant_sequence(self, flavor: Flavor = Flavor.FREE) -> CumulantSequence:
        if self.flavor is SpecKind.MOMENTS:
            return cumulants_from_moments(self.moment_sequence(), flavor)
        return convert(CumulantSequence(values=self.values, flavor=Flavor(self.flavor.value)), flavor)

    def cumulants_to(self, order: int, flavor: Flavor = Flavor.FREE) -> Tuple[Fraction, ...]:
        """The first ``order`` cumulants of ``flavor``; raises TruncationError when short."""
        if order > self.order:
            raise TruncationError(order, self.order, what=self.name or "measure spec")
        return self.cumulant_sequence(flavor).truncate(order).values


def _check_order(order: int) -> None:
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")


def _product_bound(specs: Sequence[MeasureSpec]) -> Optional[Fraction]:
    bounds = [s.support_bound for s in specs]
    if any(b is None for b in bounds):
        return None
    return prod((b for b in bounds if b is not None), start=Fraction(1))


def pair_cumulants(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> Tuple[Fraction, ...]:
    """kappa_n(ab) for n <= order, free or Boolean alike, from the pair-type table."""
    out = []
    for n in range(1, order + 1):
        total = Fraction(0)
        for t, kr, count in pair_type_table(n):
            total += count * _type_product(a, t.r) * _type_product(b, kr.r)
        out.append(total)
    return tuple(out)


def _type_product(values: Sequence[Fraction], r: Sequence[int]) -> Fraction:
    return prod((values[i] ** mult for i, mult in enumerate(r) if mult), start=Fraction(1))


def boxtimes_pair(a: MeasureSpec, b: MeasureSpec, order: int, flavor: Flavor = Flavor.FREE) -> MeasureSpec:
    """Cumulants of the product of two free variables to ``order``.

    With ``flavor=boolean`` the same formula is evaluated on Boolean cumulants.
    """
    _check_order(order)
    values = pair_cumulants(a.cumulants_to(order, flavor), b.cumulants_to(order, flavor), order)
    return MeasureSpec.of_cumulants(CumulantSequence(values=values, flavor=flavor), L=_product_bound([a, b]))


def _partition_product(parts: Sequence[NoncrossingPartition], cumulants: Sequence[Sequence[Fraction]]) -> Fraction:
    value = Fraction(1)
    for part, kappa in zip(parts, cumulants):
        for block in part.blocks:
            value *= kappa[len(block) - 1]
            if not value:
                return value
    return value


def _check_direct(k: int, order: int, ceiling: Optional[int]) -> None:
    limit = DIRECT_CEILING if ceiling is None else ceiling
    if k * order > limit:
        raise ResourceLimitError(
            f"direct engine needs partitions of [{k * order}], above the ceiling {limit}; use strategy 'iterated'"
        )


def direct_cumulants(
    cumulants: Sequence[Sequence[Fraction]], order: int, ceiling: Optional[int] = None
) -> Tuple[Fraction, ...]:
    """kappa_n of the product: sum over p in NC_k(n) of the split Kreweras complement."""
    k = len(cumulants)
    _check_direct(k, order, ceiling)
    return tuple(
        sum(
            (_partition_product(decompose_kreweras(p, k), cumulants) for p in iter_k_equal(k, n, ceiling=k * order)),
            Fraction(0),
        )
        for n in range(1, order + 1)
    )


def direct_moments(
    cumulants: Sequence[Sequence[Fraction]], order: int, ceiling: Optional[int] = None
) -> Tuple[Fraction, ...]:
    """m_n of the product: the same sum over the k-divisible partitions NC^k(n)."""
    k = len(cumulants)
    _check_direct(k, order, ceiling)
    return tuple(
        sum(
            (
                _partition_product(decompose_kreweras(p, k), cumulants)
                for p in iter_k_divisible(k, n, ceiling=k * order)
            ),
            Fraction(0),
        )
        for n in range(1, order + 1)
    )


def _choose(strategy: Optional[Strategy], k: int, order: int, ceiling: Optional[int]) -> Strategy:
    if strategy is not None:
        return strategy
    limit = DIRECT_CEILING if ceiling is None else ceiling
    chosen = Strategy.DIRECT if k * order <= limit else Strategy.ITERATED
    _logger.info(f"k={k}, order={order}: using the {chosen.value} engine")
    return chosen


def _boxtimes(
    specs: Sequence[MeasureSpec],
    order: int,
    strategy: Optional[Strategy],
    ceiling: Optional[int],
    flavor: Flavor,
) -> MeasureSpec:
    if not specs:
        raise DomainError("at least one measure spec is required")
    _check_order(order)
    chosen = _choose(strategy, len(specs), order, ceiling)
    cumulants = [s.cumulants_to(order, flavor) for s in specs]
    bound = _product_bound(specs)
    if chosen is Strategy.DIRECT:
        values = direct_cumulants(cumulants, order, ceiling)
        extra: Dict[str, object] = {"L": bound}
        if flavor is Flavor.FREE:
            extra["moments"] = direct_moments(cumulants, order, ceiling)
        return MeasureSpec.of_cumulants(CumulantSequence(values=values, flavor=flavor), **extra)
    values = cumulants[0]
    for other in cumulants[1:]:
        values = pair_cumulants(values, other, order)
    return MeasureSpec.of_cumulants(CumulantSequence(values=tuple(values), flavor=flavor), L=bound)


def boxtimes_k(
    specs: Sequence[MeasureSpec],
    order: int,
    strategy: Optional[Strategy] = None,
    ceiling: Optional[int] = None,
) -> MeasureSpec:
    """Free cumulants of a_1 ... a_k for free a_i distributed as ``specs``.

    Parameters
    ----------
    specs
        The k laws, in product order.
    order
        Truncation order N.
    strategy
        ``direct`` or ``iterated``; by default direct when kN is within the ceiling.
    ceiling
        Largest kN the direct engine accepts; defaults to ``DIRECT_CEILING``.
    """
    return _boxtimes(specs, order, strategy, ceiling, Flavor.FREE)


def boxtimes_k_boolean(
    specs: Sequence[MeasureSpec],
    order: int,
    strategy: Optional[Strategy] = None,
    ceiling: Optional[int] = None,
) -> MeasureSpec:
    """Boolean cumulants of a_1 ... a_k; the free formula with Boolean cumulants throughout."""
    return _boxtimes(specs, order, strategy, ceiling, Flavor.BOOLEAN)


def boxtimes_power(spec: MeasureSpec, k: int, order: int, flavor: Flavor = Flavor.FREE) -> MeasureSpec:
    """mu^{boxtimes k} by repeated squaring with the pair engine."""
    if k < 1:
        raise DomainError(f"power must be >= 1, got {k}")
    _check_order(order)
    base = spec.cumulants_to(order, flavor)
    result: Optional[Tuple[Fraction, ...]] = None
    exponent = k
    while exponent:
        if exponent & 1:
            result = base if result is None else pair_cumulants(result, base, order)
        exponent >>= 1
        if exponent:
            base = pair_cumulants(base, base, order)
    assert result is not None
    bound = None if spec.support_bound is None else spec.support_bound**k
    return MeasureSpec.of_cumulants(CumulantSequence(values=result, flavor=flavor), L=bound)


def _additive(specs: Sequence[MeasureSpec], order: int, flavor: Flavor) -> MeasureSpec:
    if not specs:
        raise DomainError("at least one measure spec is required")
    _check_order(order)
    columns = [s.cumulants_to(order, flavor) for s in specs]
    values = tuple(sum(column, Fraction(0)) for column in zip(*columns))
    bounds = [s.support_bound for s in specs]
    bound = None if any(b is None for b in bounds) else sum((b for b in bounds if b is not None), Fraction(0))
    return MeasureSpec.of_cumulants(CumulantSequence(values=values, flavor=flavor), L=bound)


def boxplus_k(specs: Sequence[MeasureSpec], order: int) -> MeasureSpec:
    """Free additive convolution: free cumulants add."""
    return _additive(specs, order, Flavor.FREE)


def uplus_k(specs: Sequence[MeasureSpec], order: int) -> MeasureSpec:
    """Boolean additive convolution: Boolean cumulants add."""
    return _additive(specs, order, Flavor.BOOLEAN)


def dilate(spec: MeasureSpec, c: Fraction, order: Optional[int] = None) -> MeasureSpec:
    """Push ``spec`` forward under x -> cx; every moment and cumulant of order n scales by c^n."""
    c = Fraction(c)
    if c <= 0:
        raise DomainError(f"dilation factor must be positive, got {c}")
    n_max = spec.order if order is None else order
    _check_order(n_max)
    if n_max > spec.order:
        raise TruncationError(n_max, spec.order, what=spec.name or "measure spec")
    values = tuple(v * c ** (n + 1) for n, v in enumerate(spec.values[:n_max]))
    moments = None if spec.moments is None else tuple(v * c ** (n + 1) for n, v in enumerate(spec.moments[:n_max]))
    return MeasureSpec.model_validate(
        {
            "name": spec.name,
            "flavor": spec.flavor,
            "values": values,
            "moments": moments,
            "L": None if spec.support_bound is None else spec.support_bound * c,
        }
    )


def moments_of(spec: MeasureSpec) -> List[Fraction]:
    """Moments m_1..m_N of ``spec`` whatever its stored flavor."""
    return list(spec.moment_sequence().values)
