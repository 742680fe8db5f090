"""Non-crossing partitions of [n] and their lattice operations.

Partitions are immutable values in canonical form: elements of every block are
sorted ascending and blocks are sorted by their minimum, so two partitions are
equal exactly when they are structurally equal.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from free_products.exceptions import DomainError, StructuralError

_logger = logging.getLogger(__name__)

Block = Tuple[int, ...]

_TEXT_BLOCK = re.compile(r"\{([^{}]*)\}")


def _canonical(blocks: Iterable[Iterable[int]]) -> Tuple[Block, ...]:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


def _validate_set_partition(blocks: Iterable[Iterable[int]], n: Optional[int] = None) -> Tuple[int, Tuple[Block, ...]]:
    """Check that ``blocks`` partition ``{1..n}`` and return ``(n, canonical blocks)``."""
    materialized = [list(b) for b in blocks]
    seen: Dict[int, int] = {}
    for index, block in enumerate(materialized):
        if not block:
            raise StructuralError(f"block {index} is empty")
        for x in block:
            if isinstance(x, bool) or not isinstance(x, int):
                raise StructuralError(f"element {x!r} is not an integer")
            if x < 1:
                raise StructuralError(f"element {x} is outside the ground set (elements start at 1)")
            if x in seen:
                raise StructuralError(f"element {x} appears in blocks {seen[x]} and {index}")
            seen[x] = index
    size = len(seen) if n is None else n
    if size < 1:
        raise StructuralError("a partition needs a non-empty ground set")
    missing = [x for x in range(1, size + 1) if x not in seen]
    extra = sorted(x for x in seen if x > size)
    if missing or extra:
        raise StructuralError(f"blocks do not cover {{1,...,{size}}}: missing {missing}, unexpected {extra}")
    return size, _canonical(materialized)


def _labels(n: int, blocks: Sequence[Block]) -> List[int]:
    labels = [0] * (n + 1)
    for index, block in enumerate(blocks):
        for x in block:
            labels[x] = index
    return labels


def _has_crossing(n: int, blocks: Sequence[Block]) -> bool:
    # Scan left to right keeping the open blocks on a stack; revisiting a block
    # that is not on top means some block opened after it is still open.
    labels = _labels(n, blocks)
    last = {index: block[-1] for index, block in enumerate(blocks)}
    first = {index: block[0] for index, block in enumerate(blocks)}
    stack: List[int] = []
    for x in range(1, n + 1):
        b = labels[x]
        if x == first[b]:
            stack.append(b)
        elif not stack or stack[-1] != b:
            return True
        if x == last[b]:
            stack.pop()
    return False


def _blocks_cross(a: Block, b: Block) -> bool:
    runs = 0
    previous = None
    for _, tag in sorted([(x, 0) for x in a] + [(x, 1) for x in b]):
        if tag != previous:
            runs += 1
            previous = tag
    return runs >= 4


@dataclass(frozen=True)
class NoncrossingPartition:
    """A non-crossing partition of the ground set ``{1, ..., n}``.

    Construct through :meth:`from_blocks` or :func:`parse_partition`; direct
    construction validates as well and rejects non-canonical block order.
    """

    n: int
    blocks: Tuple[Block, ...]
    _index: Tuple[int, ...] = field(default=(), init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        size, canonical = _validate_set_partition(self.blocks, self.n)
        if canonical != tuple(tuple(b) for b in self.blocks):
            raise StructuralError("blocks must be in canonical order (sorted elements, blocks sorted by minimum)")
        if _has_crossing(size, canonical):
            raise StructuralError(f"partition {_format(canonical)} is crossing")
        object.__setattr__(self, "blocks", canonical)
        object.__setattr__(self, "_index", tuple(_labels(size, canonical)))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: Optional[int] = None) -> "NoncrossingPartition":
        """Validate ``blocks`` as a non-crossing partition and canonicalize them."""
        size, canonical = _validate_set_partition(blocks, n)
        if _has_crossing(size, canonical):
            raise StructuralError(f"partition {_format(canonical)} is crossing")
        return cls._trusted(size, canonical)

    @classmethod
    def _trusted(cls, n: int, blocks: Tuple[Block, ...]) -> "NoncrossingPartition":
        # Blocks already canonical and non-crossing; used by the generators.
        p = object.__new__(cls)
        object.__setattr__(p, "n", n)
        object.__setattr__(p, "blocks", blocks)
        object.__setattr__(p, "_index", tuple(_labels(n, blocks)))
        return p

    @property
    def num_blocks(self) -> int:
        """Number of blocks, written |p|."""
        return len(self.blocks)

    def block_of(self, x: int) -> Block:
        """Return the block containing ``x``."""
        if not 1 <= x <= self.n:
            raise DomainError(f"element {x} is outside {{1,...,{self.n}}}")
        return self.blocks[self._index[x]]

    def same_block(self, x: int, y: int) -> bool:
        return self._index[x] == self._index[y]

    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def to_json(self) -> List[List[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return _format(self.blocks)


def _format(blocks: Sequence[Block]) -> str:
    return "".join("{" + ",".join(str(x) for x in b) + "}" for b in blocks)


def format_partition(p: NoncrossingPartition, fmt: str = "text") -> str:
    """Render ``p`` as ``{1,8,12}{2,6,7}`` (``text``) or ``[[1,8,12],[2,6,7]]`` (``json``)."""
    if fmt == "text":
        return str(p)
    if fmt == "json":
        return json.dumps(p.to_json(), separators=(",", ":"))
    raise DomainError(f"unknown partition format '{fmt}'")


def parse_blocks(text: str) -> List[List[int]]:
    """Parse the text or JSON rendering of a set partition into raw blocks."""
    text = text.strip()
    if text.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise StructuralError(f"invalid partition JSON: {e.msg}") from e
        if not isinstance(raw, list) or not all(isinstance(b, list) for b in raw):
            raise StructuralError("partition JSON must be an array of arrays of integers")
        return [list(b) for b in raw]

    blocks: List[List[int]] = []
    position = 0
    for match in _TEXT_BLOCK.finditer(text):
        if text[position : match.start()].strip():
            raise StructuralError(f"unexpected characters in partition literal: {text!r}")
        body = match.group(1).strip()
        if not body:
            raise StructuralError("empty block '{}' in partition literal")
        try:
            blocks.append([int(x) for x in body.split(",")])
        except ValueError as e:
            raise StructuralError(f"non-integer element in block {{{body}}}") from e
        position = match.end()
    if not blocks or text[position:].strip():
        raise StructuralError(f"not a partition literal: {text!r}")
    return blocks


def parse_partition(text: str) -> NoncrossingPartition:
    """Parse ``{1,8,12}{2,6,7}...`` or ``[[1,8,12],...]`` into a partition."""
    return NoncrossingPartition.from_blocks(parse_blocks(text))


def is_noncrossing(blocks: Iterable[Iterable[int]], n: Optional[int] = None) -> bool:
    """Return whether the set partition ``blocks`` of ``{1..n}`` is non-crossing.

    ``n`` defaults to the number of elements in ``blocks``.

    Raises
    ------
    StructuralError
        If ``blocks`` is not a set partition of ``{1..n}`` (overlap, gap or empty block).
    """
    size, canonical = _validate_set_partition(blocks, n)
    return not _has_crossing(size, canonical)


def zero(n: int) -> NoncrossingPartition:
    """The minimum 0_n: all singletons."""
    return NoncrossingPartition._trusted(n, tuple((x,) for x in range(1, n + 1)))


def one(n: int) -> NoncrossingPartition:
    """The maximum 1_n: a single block."""
    return NoncrossingPartition._trusted(n, (tuple(range(1, n + 1)),))


def rho(k: int, n: int) -> NoncrossingPartition:
    """The interval partition of [kn] into n consecutive blocks of size k."""
    if k < 1 or n < 1:
        raise DomainError(f"rho needs k, n >= 1, got k={k}, n={n}")
    return NoncrossingPartition._trusted(k * n, tuple(tuple(range(j * k + 1, (j + 1) * k + 1)) for j in range(n)))


def _cycles_to_partition(n: int, perm: Sequence[int]) -> NoncrossingPartition:
    seen = [False] * (n + 1)
    blocks = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = perm[x]
        blocks.append(tuple(sorted(cycle)))
    return NoncrossingPartition._trusted(n, tuple(sorted(blocks)))


def kreweras(p: NoncrossingPartition) -> NoncrossingPartition:
    """Kreweras complement of ``p``.

    ``p`` sits on the odd points 1, 3, ..., 2n-1 and the complement on the even
    points, the point 2i standing between i and i+1. Equivalently, as
    permutations with increasing cycles, Kr(p) = p^{-1} o (1 2 ... n).
    """
    n = p.n
    pred = [0] * (n + 1)
    for block in p.blocks:
        for i, x in enumerate(block):
            pred[x] = block[i - 1]
    perm = [0] + [pred[j % n + 1] for j in range(1, n + 1)]
    return _cycles_to_partition(n, perm)


def rotate(p: NoncrossingPartition, shift: int) -> NoncrossingPartition:
    """Relabel every element ``i`` as ``i + shift`` modulo n (labels stay in 1..n)."""
    n = p.n
    return NoncrossingPartition._trusted(n, _canonical(((x - 1 + shift) % n + 1 for x in b) for b in p.blocks))


def _check_same_ground_set(p: NoncrossingPartition, q: NoncrossingPartition) -> None:
    if p.n != q.n:
        raise StructuralError(f"partitions live on different ground sets: n={p.n} and n={q.n}")


def leq(p: NoncrossingPartition, q: NoncrossingPartition) -> bool:
    """Reverse refinement order: every block of ``p`` lies inside a block of ``q``."""
    _check_same_ground_set(p, q)
    return all(len({q._index[x] for x in block}) == 1 for block in p.blocks)


def join(p: NoncrossingPartition, q: NoncrossingPartition) -> NoncrossingPartition:
    """Least upper bound of ``p`` and ``q`` in NC(n).

    Blocks of ``p`` and ``q`` are merged as in the full partition lattice and
    crossing blocks are then merged until none remain.
    """
    _check_same_ground_set(p, q)
    n = p.n
    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for block in p.blocks + q.blocks:
        for x in block[1:]:
            union(block[0], x)

    while True:
        groups: Dict[int, List[int]] = {}
        for x in range(1, n + 1):
            groups.setdefault(find(x), []).append(x)
        blocks = [tuple(g) for g in groups.values()]
        crossing = next(
            ((a, b) for i, a in enumerate(blocks) for b in blocks[i + 1 :] if _blocks_cross(a, b)),
            None,
        )
        if crossing is None:
            return NoncrossingPartition._trusted(n, _canonical(blocks))
        union(crossing[0][0], crossing[1][0])


def restrict(p: NoncrossingPartition, elements: Iterable[int]) -> NoncrossingPartition:
    """Restrict ``p`` to ``elements`` and relabel them order-isomorphically to 1..m."""
    subset = sorted(set(elements))
    if not subset:
        raise DomainError("cannot restrict to an empty set")
    position = {x: i + 1 for i, x in enumerate(subset)}
    blocks = []
    for block in p.blocks:
        kept = tuple(position[x] for x in block if x in position)
        if kept:
            blocks.append(kept)
    return NoncrossingPartition._trusted(len(subset), _canonical(blocks))


def _check_divisible(p: NoncrossingPartition, k: int) -> None:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if p.n % k:
        raise DomainError(f"ground set size {p.n} is not divisible by k={k}")


def is_k_divisible(p: NoncrossingPartition, k: int) -> bool:
    """All block sizes are multiples of ``k``."""
    _check_divisible(p, k)
    return all(len(b) % k == 0 for b in p.blocks)


def is_k_equal(p: NoncrossingPartition, k: int) -> bool:
    """All blocks have exactly ``k`` elements."""
    _check_divisible(p, k)
    return all(len(b) == k for b in p.blocks)


def is_k_preserving(p: NoncrossingPartition, k: int) -> bool:
    """Every block is contained in one residue class modulo ``k``."""
    _check_divisible(p, k)
    return all(len({x % k for x in b}) == 1 for b in p.blocks)


def is_k_completing(p: NoncrossingPartition, k: int) -> bool:
    """k-preserving and joining the interval partition rho_k^n to the full block."""
    if not is_k_preserving(p, k):
        return False
    return join(p, rho(k, p.n // k)).num_blocks == 1


def decompose_kreweras(p: NoncrossingPartition, k: int) -> List[NoncrossingPartition]:
    """Split Kr(p) of a k-divisible ``p`` into its k residue-class parts.

    The j-th entry is the restriction of Kr(p) to {j, j+k, j+2k, ...}, relabeled
    to 1..n.
    """
    if not is_k_divisible(p, k):
        raise DomainError(f"partition {p} is not {k}-divisible")
    complement = kreweras(p)
    return [restrict(complement, range(j, p.n + 1, k)) for j in range(1, k + 1)]


def _relabel(
    n: int, source: NoncrossingPartition, mapping: Mapping[int, int], extra: Iterable[Block] = ()
) -> NoncrossingPartition:
    grouped: Dict[int, List[int]] = {}
    for new, old in mapping.items():
        grouped.setdefault(source._index[old], []).append(new)
    blocks = [tuple(g) for g in grouped.values()] + list(extra)
    return NoncrossingPartition._trusted(n, _canonical(blocks))


def insert_dup(p: NoncrossingPartition, r: int, k: int) -> NoncrossingPartition:
    """Duplicate position ``r``, join the copies and put k-1 singletons between them.

    The result lives on [n+k]: positions up to r keep their relations, positions
    from r+k on are shifted copies (so r+k joins r), and r+1..r+k-1 are singletons.
    """
    if k < 1:
        raise DomainError(f"insertion size must be >= 1, got {k}")
    if not 1 <= r <= p.n:
        raise DomainError(f"position r={r} is outside 1..{p.n}")
    mapping = {m: m for m in range(1, r + 1)}
    mapping.update({m: m - k for m in range(r + k, p.n + k + 1)})
    singletons = [(m,) for m in range(r + 1, r + k)]
    return _relabel(p.n + k, p, mapping, singletons)


def insert_interval(p: NoncrossingPartition, r: int, k: int) -> NoncrossingPartition:
    """Insert the interval block {r, ..., r+k-1} before the old position r."""
    if k < 1:
        raise DomainError(f"insertion size must be >= 1, got {k}")
    if not 1 <= r <= p.n + 1:
        raise DomainError(f"position r={r} is outside 1..{p.n + 1}")
    mapping = {m: m for m in range(1, r)}
    mapping.update({m: m - k for m in range(r + k, p.n + k + 1)})
    return _relabel(p.n + k, p, mapping, [tuple(range(r, r + k))])


def _remove_positions(p: NoncrossingPartition, start: int, count: int) -> NoncrossingPartition:
    # Drop positions start..start+count-1 and close the gap.
    blocks = []
    for block in p.blocks:
        kept = tuple(x if x < start else x - count for x in block if not start <= x < start + count)
        if kept:
            blocks.append(kept)
    return NoncrossingPartition._trusted(p.n - count, _canonical(blocks))


@dataclass(frozen=True)
class InsertionFactorization:
    """A partition written as insertions applied to a base partition.

    ``descriptors`` are ``(r, q)`` pairs in application order; each stands for an
    insertion of size ``k * q`` at position ``r``. The base is 0_{base_size} for
    duplications and 1_{base_size} for interval insertions.
    """

    k: int
    base_size: int
    descriptors: Tuple[Tuple[int, int], ...]
    interval: bool = False

    def replay(self) -> NoncrossingPartition:
        """Apply the descriptors to the base and return the rebuilt partition."""
        p = one(self.base_size) if self.interval else zero(self.base_size)
        insert = insert_interval if self.interval else insert_dup
        for r, q in self.descriptors:
            p = insert(p, r, self.k * q)
        return p


def factor_k_preserving(p: NoncrossingPartition, k: int) -> InsertionFactorization:
    """Write a k-preserving ``p`` as duplications I_r^{kq} applied to 0_{q_0}.

    Repeatedly peels the pair r ~ r+sk with only singletons strictly between,
    taking the smallest such r, until only singletons remain.
    """
    if not is_k_preserving(p, k):
        raise DomainError(f"partition {p} is not {k}-preserving")
    peeled: List[Tuple[int, int]] = []
    current = p
    while True:
        found = None
        for r in range(1, current.n + 1):
            block = current.block_of(r)
            i = block.index(r)
            if i + 1 == len(block):
                continue
            nxt = block[i + 1]
            if all(len(current.block_of(x)) == 1 for x in range(r + 1, nxt)):
                found = (r, nxt - r)
                break
        if found is None:
            break
        r, gap = found
        peeled.append((r, gap // k))
        current = _remove_positions(current, r + 1, gap)
    _logger.debug(f"factored {p} into {len(peeled)} duplications over 0_{current.n}")
    return InsertionFactorization(k=k, base_size=current.n, descriptors=tuple(reversed(peeled)))


def factor_k_divisible(p: NoncrossingPartition, k: int) -> InsertionFactorization:
    """Write a k-divisible ``p`` as interval insertions applied to 1_{q_0}.

    Peels the leftmost interval block until a single block remains.
    """
    if not is_k_divisible(p, k):
        raise DomainError(f"partition {p} is not {k}-divisible")
    peeled: List[Tuple[int, int]] = []
    current = p
    while current.num_blocks > 1:
        block = next(b for b in current.blocks if b[-1] - b[0] + 1 == len(b))
        peeled.append((block[0], len(block) // k))
        current = _remove_positions(current, block[0], len(block))
    return InsertionFactorization(k=k, base_size=current.n, descriptors=tuple(reversed(peeled)), interval=True)


@dataclass(frozen=True)
class TypeVector:
    """Block-size multiplicities (r_1, ..., r_n) with r_1 + 2 r_2 + ... + n r_n = n."""

    n: int
    r: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"type vector needs n >= 1, got {self.n}")
        if len(self.r) != self.n:
            raise DomainError(f"type vector for n={self.n} needs {self.n} entries, got {len(self.r)}")
        if any(x < 0 for x in self.r):
            raise DomainError(f"multiplicities must be >= 0, got {self.r}")
        total = sum(i * x for i, x in enumerate(self.r, start=1))
        if total != self.n:
            raise DomainError(f"sum of i*r_i is {total}, expected {self.n}")

    @classmethod
    def from_sizes(cls, sizes: Iterable[int], n: Optional[int] = None) -> "TypeVector":
        """Build the type of a multiset of block sizes."""
        sizes = list(sizes)
        size = sum(sizes) if n is None else n
        if size < 1 or any(s < 1 or s > size for s in sizes):
            raise DomainError(f"block sizes {sizes} do not describe a partition of {size}")
        r = [0] * size
        for s in sizes:
            r[s - 1] += 1
        return cls(size, tuple(r))

    @property
    def num_blocks(self) -> int:
        return sum(self.r)

    def sizes(self) -> Tuple[int, ...]:
        """Block sizes in decreasing order."""
        return tuple(i for i in range(self.n, 0, -1) for _ in range(self.r[i - 1]))

    def __getitem__(self, i: int) -> int:
        """Multiplicity r_i of blocks of size ``i`` (1-based)."""
        return self.r[i - 1] if 1 <= i <= self.n else 0


def block_type(p: NoncrossingPartition) -> TypeVector:
    """Return the TypeVector counting the blocks of ``p`` by size."""
    return TypeVector.from_sizes(p.block_sizes(), p.n)
