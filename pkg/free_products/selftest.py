"""Cross-engine oracle suite run by ``free-products selftest``.

Every check compares two independent computations at desk-scale parameters.
Checks reach the engines through their modules so a patched function is seen
by the suite.
"""

import logging
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from free_products import bounds, convolution, cumulants, enumeration, measures, partitions
from free_products.models import FreeProductsBaseModel

_logger = logging.getLogger(__name__)

SAMPLE_PARTITION = "{1,8,12}{2,6,7}{3,4,5}{9,10,11}"
SAMPLE_COMPLEMENT = "{1,7}{2,5}{3}{4}{6}{8,11}{9}{10}{12}"

Check = Callable[[], Optional[str]]


class CheckResult(FreeProductsBaseModel):
    name: str
    passed: bool
    detail: str = ""


class SelftestReport(FreeProductsBaseModel):
    results: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]


def _family_pairs(limit: int) -> List[Tuple[int, int]]:
    return [(k, n) for k in range(2, limit + 1) for n in range(1, limit // k + 1)]


def check_catalan_count() -> Optional[str]:
    for n in range(1, 9):
        found = sum(1 for _ in enumeration.iter_nc(n))
        if found != enumeration.count_catalan(n):
            return f"NC({n}): enumerated {found}, closed form {enumeration.count_catalan(n)}"
    return None


def check_k_equal_count() -> Optional[str]:
    for k, n in _family_pairs(12):
        found = sum(1 for _ in enumeration.iter_k_equal(k, n))
        if found != enumeration.count_k_equal(k, n):
            return f"NC_{k}({n}): enumerated {found}, closed form {enumeration.count_k_equal(k, n)}"
    return None


def check_k_divisible_count() -> Optional[str]:
    for k, n in _family_pairs(12):
        found = sum(1 for _ in enumeration.iter_k_divisible(k, n))
        if found != enumeration.count_k_divisible(k, n):
            return f"NC^{k}({n}): enumerated {found}, closed form {enumeration.count_k_divisible(k, n)}"
    return None


def check_nc21_count() -> Optional[str]:
    for k, n in _family_pairs(12):
        found = sum(1 for _ in enumeration.iter_nc21(k, n))
        if found != enumeration.count_nc21(k, n):
            return f"NC({k},{n})_21: enumerated {found}, closed form {enumeration.count_nc21(k, n)}"
    return None


def check_type_counts() -> Optional[str]:
    for n in range(1, 7):
        grouped = enumeration.group_by_pair_type(n)
        table = {(t, b): c for t, b, c in enumeration.pair_type_table(n)}
        if grouped != table:
            return f"pair-type table of NC({n}) differs from enumeration"
        total = sum(enumeration.count_type(t) for t in enumeration.iter_type_vectors(n))
        if total != enumeration.count_catalan(n):
            return f"type counts of NC({n}) sum to {total}"
    return None


def check_kreweras() -> Optional[str]:
    sample = partitions.parse_partition(SAMPLE_PARTITION)
    if str(partitions.kreweras(sample)) != SAMPLE_COMPLEMENT:
        return f"Kr{SAMPLE_PARTITION} = {partitions.kreweras(sample)}"
    for n in range(1, 8):
        for p in enumeration.iter_nc(n):
            complement = partitions.kreweras(p)
            if p.num_blocks + complement.num_blocks != n + 1:
                return f"|p| + |Kr(p)| != n + 1 for p = {p}"
            if partitions.kreweras(complement) != partitions.rotate(p, -1):
                return f"Kr(Kr(p)) is not the rotation of p = {p}"
    return None


def check_insertions() -> Optional[str]:
    for n in range(1, 6):
        for p in enumeration.iter_nc(n):
            complement = partitions.kreweras(p)
            for k in (1, 2):
                for r in range(1, n + 1):
                    left = partitions.kreweras(partitions.insert_dup(p, r, k))
                    if left != partitions.insert_interval(complement, r, k):
                        return f"insertion relation fails for p = {p}, r = {r}, k = {k}"
    return None


def _sample_cumulants(k: int, order: int) -> List[Tuple[Fraction, ...]]:
    return [tuple(Fraction((-1) ** (i + j) * (i + 2 * j + 1), i + j + 2) for i in range(order)) for j in range(k)]


def check_direct_vs_iterated() -> Optional[str]:
    for k in (2, 3, 4):
        order = 12 // k
        sample = _sample_cumulants(k, order)
        direct = convolution.direct_cumulants(sample, order)
        iterated = sample[0]
        for other in sample[1:]:
            iterated = convolution.pair_cumulants(iterated, other, order)
        if direct != iterated:
            return f"k = {k}: direct {direct} != iterated {iterated}"
        moments = cumulants.moments_from_free_cumulants(cumulants.CumulantSequence(values=direct)).values
        if moments != convolution.direct_moments(sample, order):
            return f"k = {k}: moments of the direct cumulants differ from the k-divisible sum"
    return None


def check_free_poisson() -> Optional[str]:
    law = measures.NamedLaw(kind=measures.LawKind.FREE_POISSON).spec(4)
    for k in (1, 2, 3):
        product = convolution.boxtimes_k([law] * k, 4, strategy=convolution.Strategy.DIRECT)
        expected = tuple(Fraction(measures.free_poisson_power_cumulant(k, n)) for n in range(1, 5))
        if product.values != expected:
            return f"free Poisson power {k}: {product.values} != {expected}"
    return None


def check_wigner() -> Optional[str]:
    sigma2 = Fraction(1, 5)
    law = measures.NamedLaw(kind=measures.LawKind.SHIFTED_SEMICIRCLE, sigma2=sigma2).spec(6)
    for k in (2, 3):
        product = convolution.boxtimes_k([law] * k, 12 // k, strategy=convolution.Strategy.DIRECT)
        for n in range(1, 12 // k + 1):
            closed = measures.wigner_product_cumulant(k, n, sigma2)
            if closed != enumeration.count_nc21(k, n) * sigma2 ** (n - 1) or closed != product.values[n - 1]:
                return f"shifted semicircle product k = {k}, n = {n}"
    return None


def check_mobius() -> Optional[str]:
    m = cumulants.MomentSequence(values=tuple(Fraction(n * n + 1, n + 1) for n in range(1, 7)))
    if cumulants.free_cumulants_via_mobius(m) != cumulants.free_cumulants_from_moments(m):
        return "Mobius inversion and the triangular recursion disagree"
    for n in range(1, 7):
        table = cumulants.mobius_table(n)
        if any(cumulants.mobius_to_top(p) != value for p, value in table.items()):
            return f"product formula for Mob[p, 1_{n}] disagrees with zeta inversion"
    return None


def check_bounds() -> Optional[str]:
    law = measures.NamedLaw(kind=measures.LawKind.FREE_POISSON).spec(12)
    for k in (1, 2, 3):
        power = convolution.boxtimes_power(law, k, 12)
        edge = max(bounds.estimate_support_edge(power))
        lower = bounds.support_lower_bound(k, Fraction(1))
        upper = bounds.support_upper_bound(k, Fraction(4), nonneg_cumulants=True)
        if not lower <= edge <= measures.free_poisson_power_edge(k) <= upper:
            return f"support sandwich fails at k = {k}"
    return None


CHECKS: List[Tuple[str, Check]] = [
    ("catalan-count", check_catalan_count),
    ("k-equal-count", check_k_equal_count),
    ("k-divisible-count", check_k_divisible_count),
    ("nc21-count", check_nc21_count),
    ("type-counts", check_type_counts),
    ("kreweras", check_kreweras),
    ("insertions", check_insertions),
    ("direct-vs-iterated", check_direct_vs_iterated),
    ("free-poisson", check_free_poisson),
    ("shifted-semicircle", check_wigner),
    ("mobius", check_mobius),
    ("support-bounds", check_bounds),
]


def run_selftest(checks: Optional[List[Tuple[str, Check]]] = None) -> SelftestReport:
    """Run every check; exceptions count as failures."""
    results = []
    for name, check in CHECKS if checks is None else checks:
        try:
            detail = check()
        except Exception as e:
            detail = f"{type(e).__name__}: {e}"
        results.append(CheckResult(name=name, passed=detail is None, detail=detail or ""))
        _logger.info(f"selftest {name}: {'pass' if detail is None else 'FAIL'}")
    return SelftestReport(results=tuple(results))
