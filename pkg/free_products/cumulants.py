"""Moment and cumulant transforms, free and Boolean, in exact rational arithmetic."""

import logging
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import prod
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar

from pydantic import Field, model_validator

from free_products.enumeration import count_catalan, iter_nc
from free_products.exceptions import DomainError, TruncationError
from free_products.models import FreeProductsBaseModel, Rational
from free_products.partitions import NoncrossingPartition, join, kreweras, leq, one

_logger = logging.getLogger(__name__)


class Flavor(str, Enum):
    FREE = "free"
    BOOLEAN = "boolean"


_S = TypeVar("_S", bound="RationalSequence")


class RationalSequence(FreeProductsBaseModel):
    """Values indexed 1..N; index 0 is the implicit constant 1."""

    values: Tuple[Rational, ...] = Field(min_length=1)

    @property
    def order(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(1)
        if n < 0:
            raise DomainError(f"sequence index must be >= 0, got {n}")
        if n > self.order:
            raise TruncationError(n, self.order, what=type(self).__name__)
        return self.values[n - 1]

    def truncate(self: _S, order: int) -> _S:
        """Return the first ``order`` values."""
        if order < 1:
            raise DomainError(f"order must be >= 1, got {order}")
        if order > self.order:
            raise TruncationError(order, self.order, what=type(self).__name__)
        return self.model_copy(update={"values": self.values[:order]})


class MomentSequence(RationalSequence):
    """Moments m_1..m_N of a law (m_0 = 1)."""


class CumulantSequence(RationalSequence):
    """Free or Boolean cumulants kappa_1..kappa_N."""

    flavor: Flavor = Flavor.FREE


class FreeFamily(FreeProductsBaseModel):
    """k free variables, each given by its cumulant sequence; mixed cumulants vanish."""

    members: Tuple[CumulantSequence, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def check_members(self) -> "FreeFamily":
        flavors = {c.flavor for c in self.members}
        orders = {c.order for c in self.members}
        if len(flavors) > 1:
            raise ValueError(f"family members mix cumulant flavors: {sorted(f.value for f in flavors)}")
        if len(orders) > 1:
            raise ValueError(f"family members have different truncation orders: {sorted(orders)}")
        return self

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def order(self) -> int:
        return self.members[0].order

    @property
    def flavor(self) -> Flavor:
        return self.members[0].flavor


def cyclic_labels(k: int, size: int) -> Tuple[int, ...]:
    """Position j of [size] carries variable ((j - 1) mod k) + 1."""
    return tuple((j - 1) % k + 1 for j in range(1, size + 1))


def cumulant_on_partition(family: FreeFamily, p: NoncrossingPartition, labels: Sequence[int]) -> Fraction:
    """Multiplicative extension of the family's cumulants to ``p``.

    Each block contributes the cumulant of its variable, or 0 when the block
    carries more than one label.
    """
    if len(labels) != p.n:
        raise DomainError(f"{len(labels)} labels given for a partition of [{p.n}]")
    if any(not 1 <= label <= family.k for label in labels):
        raise DomainError(f"labels must lie in 1..{family.k}")
    value = Fraction(1)
    for block in p.blocks:
        variables = {labels[x - 1] for x in block}
        if len(variables) > 1:
            return Fraction(0)
        value *= family.members[variables.pop() - 1][len(block)]
        if not value:
            return value
    return value


def _power_coefficients(series: Sequence[Fraction], power: int, degree: int) -> List[Fraction]:
    """Coefficients 0..degree of ``series(x) ** power`` where series[0] is the constant term."""
    result = [Fraction(1)] + [Fraction(0)] * degree
    for _ in range(power):
        result = [
            sum((result[i] * series[d - i] for i in range(d + 1) if d - i < len(series)), Fraction(0))
            for d in range(degree + 1)
        ]
    return result


def _free_sum(kappa: Sequence[Fraction], moments: Sequence[Fraction], n: int, skip_top: bool) -> Fraction:
    # Sum over NC(n) grouped by the block of 1 of size s: kappa_s [x^{n-s}] M(x)^s.
    series = [Fraction(1)] + list(moments[: n - 1])
    top = n - 1 if skip_top else n
    return sum(
        (kappa[s - 1] * _power_coefficients(series, s, n - s)[n - s] for s in range(1, top + 1)),
        Fraction(0),
    )


def _require(flavor: Flavor, c: CumulantSequence) -> None:
    if c.flavor is not flavor:
        raise DomainError(f"expected {flavor.value} cumulants, got {c.flavor.value}")


def moments_from_free_cumulants(c: CumulantSequence) -> MomentSequence:
    """m_n = sum over NC(n) of the product of kappa_{|V|} over blocks V."""
    _require(Flavor.FREE, c)
    moments: List[Fraction] = []
    for n in range(1, c.order + 1):
        moments.append(_free_sum(c.values, moments, n, skip_top=False))
    return MomentSequence(values=tuple(moments))


def free_cumulants_from_moments(m: MomentSequence) -> CumulantSequence:
    """Inverse of :func:`moments_from_free_cumulants` by the triangular recursion."""
    kappa: List[Fraction] = []
    for n in range(1, m.order + 1):
        kappa.append(m[n] - _free_sum(kappa, m.values, n, skip_top=True))
    return CumulantSequence(values=tuple(kappa), flavor=Flavor.FREE)


def moments_from_boolean_cumulants(b: CumulantSequence) -> MomentSequence:
    """m_n = sum over interval partitions of [n], i.e. m_n = sum_j b_j m_{n-j}."""
    _require(Flavor.BOOLEAN, b)
    moments: List[Fraction] = [Fraction(1)]
    for n in range(1, b.order + 1):
        moments.append(sum((b.values[j - 1] * moments[n - j] for j in range(1, n + 1)), Fraction(0)))
    return MomentSequence(values=tuple(moments[1:]))


def boolean_cumulants_from_moments(m: MomentSequence) -> CumulantSequence:
    boolean: List[Fraction] = []
    for n in range(1, m.order + 1):
        boolean.append(m[n] - sum((boolean[j - 1] * m[n - j] for j in range(1, n)), Fraction(0)))
    return CumulantSequence(values=tuple(boolean), flavor=Flavor.BOOLEAN)


def moments_from_cumulants(c: CumulantSequence) -> MomentSequence:
    """Dispatch on the cumulant flavor."""
    if c.flavor is Flavor.BOOLEAN:
        return moments_from_boolean_cumulants(c)
    return moments_from_free_cumulants(c)


def cumulants_from_moments(m: MomentSequence, flavor: Flavor = Flavor.FREE) -> CumulantSequence:
    if flavor is Flavor.BOOLEAN:
        return boolean_cumulants_from_moments(m)
    return free_cumulants_from_moments(m)


def convert(c: CumulantSequence, flavor: Flavor) -> CumulantSequence:
    """Re-express cumulants in the other flavor through the moments."""
    if c.flavor is flavor:
        return c
    return cumulants_from_moments(moments_from_cumulants(c), flavor)


def mobius_to_top(p: NoncrossingPartition) -> int:
    """Mob[p, 1_n].

    The interval [p, 1_n] is isomorphic to the product of NC(|V|) over the blocks
    V of Kr(p), and Mob[0_j, 1_j] = (-1)^{j-1} C_{j-1}.
    """
    return prod(_mobius_full(len(block)) for block in kreweras(p).blocks)


def _mobius_full(j: int) -> int:
    return 1 if j == 1 else (-1) ** (j - 1) * count_catalan(j - 1)


@lru_cache(maxsize=16)
def mobius_table(n: int) -> Mapping[NoncrossingPartition, int]:
    """Mob[p, 1_n] for every p in NC(n) by zeta inversion on the enumerated lattice.

    The table is cached and returned as a read-only view.
    """
    lattice = sorted(iter_nc(n), key=lambda p: p.num_blocks)
    table: Dict[NoncrossingPartition, int] = {}
    for p in lattice:
        if p.num_blocks == 1:
            table[p] = 1
            continue
        table[p] = -sum(value for q, value in table.items() if leq(p, q))
    _logger.debug(f"built Mobius table for NC({n}) with {len(table)} entries")
    return MappingProxyType(table)


def _moment_on_partition(m: MomentSequence, p: NoncrossingPartition) -> Fraction:
    return prod((m[len(block)] for block in p.blocks), start=Fraction(1))


def free_cumulants_via_mobius(m: MomentSequence, ceiling: Optional[int] = None) -> CumulantSequence:
    """kappa_n = sum over NC(n) of m_p Mob[p, 1_n]; an enumeration-backed oracle."""
    kappa = []
    for n in range(1, m.order + 1):
        kappa.append(
            sum((_moment_on_partition(m, p) * mobius_to_top(p) for p in iter_nc(n, ceiling=ceiling)), Fraction(0))
        )
    return CumulantSequence(values=tuple(kappa), flavor=Flavor.FREE)


def is_interval_partition(p: NoncrossingPartition) -> bool:
    return all(block[-1] - block[0] + 1 == len(block) for block in p.blocks)


def products_as_arguments(
    family: FreeFamily,
    grouping: NoncrossingPartition,
    labels: Sequence[int],
    ceiling: Optional[int] = None,
) -> Fraction:
    """Free cumulant whose arguments are the products over the blocks of ``grouping``.

    Sums the family's cumulant functional over the p in NC(n) with
    p v grouping = 1_n.
    """
    if not is_interval_partition(grouping):
        raise DomainError(f"grouping {grouping} is not an interval partition")
    if family.flavor is not Flavor.FREE:
        raise DomainError("products as arguments needs free cumulants")
    top = one(grouping.n)
    return sum(
        (
            cumulant_on_partition(family, p, labels)
            for p in iter_nc(grouping.n, ceiling=ceiling)
            if join(p, grouping) == top
        ),
        Fraction(0),
    )
