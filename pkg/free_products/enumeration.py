"""Generators and closed-form counters for NC(n) and its k-constrained families.

Generation order
----------------
Every generator yields partitions in lexicographic order of their canonical
block tuples. A partition is built from its first block ``B`` (the block of 1)
followed by independent partitions of the gaps nested between consecutive
elements of ``B`` and of the tail after ``max(B)``. First blocks are visited in
depth-first preorder, so ``(1,)`` precedes ``(1, 2)`` precedes ``(1, 2, 3)``
precedes ``(1, 3)``; for a fixed first block the leftmost gap varies slowest.

Fixing the first block splits a family into disjoint shards: every partition
appears in exactly one ``iter_*(..., first_block=B)`` stream for ``B`` in
:func:`first_blocks`.
"""

import logging
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from free_products.exceptions import DomainError, ResourceLimitError
from free_products.models import Count, FreeProductsBaseModel
from free_products.partitions import Block, NoncrossingPartition, TypeVector, block_type, kreweras

_logger = logging.getLogger(__name__)

ENUMERATION_CEILING = 16
_CACHED_SEGMENT = 10

Blocks = Tuple[Block, ...]


class Family(str, Enum):
    NC = "nc"
    K_EQUAL = "k-equal"
    K_DIVISIBLE = "k-divisible"
    TYPE = "type"
    PAIR_TYPE = "pair-type"
    NC21 = "nc21"


class CountTable(FreeProductsBaseModel):
    """A count together with the family and parameters it belongs to."""

    family: Family
    n: int
    k: Optional[int] = None
    type_vector: Optional[Tuple[int, ...]] = None
    kreweras_type: Optional[Tuple[int, ...]] = None
    count: Count


def _check_positive(**params: int) -> None:
    for name, value in params.items():
        if value < 1:
            raise DomainError(f"'{name}' must be >= 1, got {value}")


def _check_ceiling(size: int, ceiling: Optional[int]) -> None:
    limit = ENUMERATION_CEILING if ceiling is None else ceiling
    if size > limit:
        raise ResourceLimitError(
            f"ground set of size {size} exceeds the enumeration ceiling {limit}; "
            "use the iterated engine or raise the ceiling with --unsafe-ceiling"
        )


def _exact_div(numerator: int, denominator: int) -> int:
    quotient, remainder = divmod(numerator, denominator)
    assert remainder == 0, f"{numerator} is not divisible by {denominator}"
    return quotient


def _first_blocks(m: int, k: int, equal: bool) -> Iterator[Block]:
    def extend(block: Block) -> Iterator[Block]:
        if (len(block) == k) if equal else (len(block) % k == 0):
            yield block
        if equal and len(block) >= k:
            return
        last = block[-1]
        for nxt in range(last + 1, m + 1):
            if (nxt - last - 1) % k == 0:
                yield from extend(block + (nxt,))

    yield from extend((1,))


def _gaps(first: Block, m: int) -> List[Tuple[int, int]]:
    """``(offset, length)`` of every nested gap of ``first`` and of the tail."""
    bounds = list(first) + [m + 1]
    return [(a, b - a - 1) for a, b in zip(bounds, bounds[1:]) if b - a > 1]


def _shift(blocks: Blocks, offset: int) -> Blocks:
    return tuple(tuple(x + offset for x in b) for b in blocks)


@lru_cache(maxsize=None)
def _cached_segment(m: int, k: int, equal: bool) -> Tuple[Blocks, ...]:
    return tuple(_generate_segment(m, k, equal))


def _segment(m: int, k: int, equal: bool) -> Iterator[Blocks]:
    if m <= _CACHED_SEGMENT:
        return iter(_cached_segment(m, k, equal))
    return _generate_segment(m, k, equal)


def _fill(gaps: Sequence[Tuple[int, int]], k: int, equal: bool) -> Iterator[Blocks]:
    if not gaps:
        yield ()
        return
    offset, length = gaps[0]
    for head in _segment(length, k, equal):
        shifted = _shift(head, offset)
        for rest in _fill(gaps[1:], k, equal):
            yield shifted + rest


def _generate_segment(m: int, k: int, equal: bool, first_block: Optional[Block] = None) -> Iterator[Blocks]:
    if m == 0:
        yield ()
        return
    firsts = _first_blocks(m, k, equal) if first_block is None else iter([first_block])
    for first in firsts:
        for rest in _fill(_gaps(first, m), k, equal):
            yield (first,) + rest


def _family_stream(
    size: int, k: int, equal: bool, first_block: Optional[Sequence[int]], ceiling: Optional[int]
) -> Iterator[NoncrossingPartition]:
    _check_ceiling(size, ceiling)
    shard: Optional[Block] = None
    if first_block is not None:
        shard = tuple(first_block)
        if shard not in set(_first_blocks(size, k, equal)):
            raise DomainError(f"{set(shard)} is not an admissible first block for this family on [{size}]")
    _logger.debug(f"enumerating family on [{size}] (k={k}, equal={equal}, shard={shard})")
    return (NoncrossingPartition._trusted(size, blocks) for blocks in _generate_segment(size, k, equal, shard))


def first_blocks(n: int, k: int = 1, family: Family = Family.NC) -> List[Block]:
    """Admissible blocks containing 1, one per shard, in generation order.

    ``n`` is the ground set size for :attr:`Family.NC` and the multiplier for the
    k-constrained families (ground set ``[kn]``).
    """
    _check_positive(n=n, k=k)
    if family is Family.NC:
        return list(_first_blocks(n, 1, False))
    if family in (Family.K_EQUAL, Family.NC21):
        return list(_first_blocks(k * n, k, True))
    if family is Family.K_DIVISIBLE:
        return list(_first_blocks(k * n, k, False))
    raise DomainError(f"family '{family.value}' has no generator")


def iter_nc(
    n: int, first_block: Optional[Sequence[int]] = None, ceiling: Optional[int] = None
) -> Iterator[NoncrossingPartition]:
    """Yield every element of NC(n) once, in lexicographic canonical order.

    Parameters
    ----------
    n
        Ground set size.
    first_block
        Restrict the stream to the shard whose block containing 1 is ``first_block``.
    ceiling
        Largest admissible ``n``; defaults to ``ENUMERATION_CEILING``.

    Raises
    ------
    ResourceLimitError
        If ``n`` exceeds the ceiling.
    """
    _check_positive(n=n)
    return _family_stream(n, 1, False, first_block, ceiling)


def iter_k_equal(
    k: int, n: int, first_block: Optional[Sequence[int]] = None, ceiling: Optional[int] = None
) -> Iterator[NoncrossingPartition]:
    """Yield NC_k(n): partitions of [kn] whose blocks all have exactly k elements."""
    _check_positive(k=k, n=n)
    return _family_stream(k * n, k, True, first_block, ceiling)


def iter_k_divisible(
    k: int, n: int, first_block: Optional[Sequence[int]] = None, ceiling: Optional[int] = None
) -> Iterator[NoncrossingPartition]:
    """Yield NC^k(n): partitions of [kn] whose block sizes are multiples of k."""
    _check_positive(k=k, n=n)
    return _family_stream(k * n, k, False, first_block, ceiling)


def iter_nc21(
    k: int, n: int, first_block: Optional[Sequence[int]] = None, ceiling: Optional[int] = None
) -> Iterator[NoncrossingPartition]:
    """Yield the k-equal partitions whose Kreweras complement has only pairs and singletons."""
    return (p for p in iter_k_equal(k, n, first_block, ceiling) if max(kreweras(p).block_sizes()) <= 2)


def count_catalan(n: int) -> int:
    """C_n = binom(2n, n) / (n + 1) = |NC(n)|."""
    _check_positive(n=n)
    return _exact_div(comb(2 * n, n), n + 1)


def count_k_equal(k: int, n: int) -> int:
    """|NC_k(n)| = binom(kn, n) / ((k-1)n + 1), the Fuss-Catalan number."""
    _check_positive(k=k, n=n)
    return _exact_div(comb(k * n, n), (k - 1) * n + 1)


def count_k_divisible(k: int, n: int) -> int:
    """|NC^k(n)| = binom((k+1)n, n) / (kn + 1)."""
    _check_positive(k=k, n=n)
    return _exact_div(comb((k + 1) * n, n), k * n + 1)


def count_nc21(k: int, n: int) -> int:
    """Number of k-equal partitions of [kn] whose complement has blocks of size at most 2.

    For k >= 2 the complement has n(k-2)+2 singletons and n-1 pairs, giving
    k((k-1)n)! / ((n(k-2)+2)! (n-1)!). For k = 1 the only partition is 0_n, whose
    complement 1_n qualifies exactly when n <= 2.
    """
    _check_positive(k=k, n=n)
    if k == 1:
        _logger.debug("count_nc21 with k=1 uses enumeration semantics")
        return 1 if n <= 2 else 0
    return _exact_div(k * factorial((k - 1) * n), factorial(n * (k - 2) + 2) * factorial(n - 1))


def count_type(t: TypeVector) -> int:
    """Number of p in NC(n) with r_i blocks of size i: n! / ((n+1-|p|)! r_1! ... r_n!)."""
    blocks = t.num_blocks
    return _exact_div(factorial(t.n), factorial(t.n + 1 - blocks) * prod(factorial(x) for x in t.r))


def count_pair_type(t: TypeVector, b: TypeVector) -> int:
    """Number of p in NC(n) of type ``t`` whose Kreweras complement has type ``b``.

    Returns 0 when the types live on different ground sets or their block counts
    do not add up to n + 1.
    """
    if t.n != b.n or t.num_blocks + b.num_blocks != t.n + 1:
        return 0
    numerator = t.n * factorial(t.num_blocks - 1) * factorial(b.num_blocks - 1)
    denominator = prod(factorial(x) for x in t.r) * prod(factorial(x) for x in b.r)
    return _exact_div(numerator, denominator)


def iter_type_vectors(n: int) -> Iterator[TypeVector]:
    """Yield the type vector of every integer partition of ``n``."""
    _check_positive(n=n)

    def parts(remaining: int, largest: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for size in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - size, size):
                yield (size,) + rest

    for sizes in parts(n, n):
        yield TypeVector.from_sizes(sizes, n)


@lru_cache(maxsize=64)
def pair_type_table(n: int) -> Tuple[Tuple[TypeVector, TypeVector, int], ...]:
    """Every feasible (type of p, type of Kr(p)) pair on [n] with its count.

    Computed from the closed form, so it is available far beyond the
    enumeration ceiling.
    """
    types = list(iter_type_vectors(n))
    table = []
    for t in types:
        for b in types:
            count = count_pair_type(t, b)
            if count:
                table.append((t, b, count))
    return tuple(table)


def nc21_ratio(k: int, n: int) -> Fraction:
    """|NC(k,n)_{2,1}| / |NC_k(n)| as an exact rational; tends to 1 as k grows."""
    return Fraction(count_nc21(k, n), count_k_equal(k, n))


def count_family(
    family: Family,
    n: int,
    k: int = 1,
    type_vector: Optional[TypeVector] = None,
    kreweras_type: Optional[TypeVector] = None,
) -> CountTable:
    """Dispatch to the closed-form counter of ``family`` and record the parameters."""
    if family is Family.NC:
        return CountTable(family=family, n=n, count=count_catalan(n))
    if family is Family.K_EQUAL:
        return CountTable(family=family, n=n, k=k, count=count_k_equal(k, n))
    if family is Family.K_DIVISIBLE:
        return CountTable(family=family, n=n, k=k, count=count_k_divisible(k, n))
    if family is Family.NC21:
        return CountTable(family=family, n=n, k=k, count=count_nc21(k, n))
    if type_vector is None:
        raise DomainError(f"family '{family.value}' needs a type vector")
    if family is Family.TYPE:
        return CountTable(family=family, n=type_vector.n, type_vector=type_vector.r, count=count_type(type_vector))
    if kreweras_type is None:
        raise DomainError("family 'pair-type' needs a Kreweras type vector")
    return CountTable(
        family=family,
        n=type_vector.n,
        type_vector=type_vector.r,
        kreweras_type=kreweras_type.r,
        count=count_pair_type(type_vector, kreweras_type),
    )


def group_by_pair_type(n: int, ceiling: Optional[int] = None) -> Dict[Tuple[TypeVector, TypeVector], int]:
    """Count NC(n) by (type, Kreweras type) through exhaustive enumeration."""
    groups: Dict[Tuple[TypeVector, TypeVector], int] = {}
    for p in iter_nc(n, ceiling=ceiling):
        key = (block_type(p), block_type(kreweras(p)))
        groups[key] = groups.get(key, 0) + 1
    return groups
