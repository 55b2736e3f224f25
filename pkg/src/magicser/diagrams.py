"""Wick-contraction diagram engine for the correction coefficients.

Expanding exp(sum_k (i^k/k!) V_k (beta m)^{-(k-2)/2}) inside a Gaussian
expectation produces the multiplicative correction series

    1 + K1/(beta m) + K2/m + K3/(beta m)^2 + ...

Each term is a multiset of vertex degrees with a rational coefficient;
its value is the full Wick sum: pair the k's in every possible way, each
pairing contributing a product of propagator entries contracted against
the symmetric vertex tensors.  All arithmetic is exact.

For d = 2 this reproduces K1 = -7/30, K2 = -1/2, K3 = 11/2520 with the
per-diagram values 205/72, -31/6, 22/15, 17/15, -29/105; for d = 3 it
gives K1 = -711/980.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .series import propagator, rescaled_vertex_correction, vertex_tensor

RAW_PATH_LIMIT = 10_000_000  # assignments x pairings bound for the oracle path


@dataclass(frozen=True)
class DiagramTerm:
    """One term of the expanded exponential.

    ``coefficient`` carries the i-powers, factorials, and the 1/n! from
    the exponential; ``order`` is the power of (beta m)^{-1/2}.
    """

    vertex_degrees: tuple[int, ...]
    coefficient: Fraction

    @property
    def order(self) -> int:
        return sum(k - 2 for k in self.vertex_degrees)


@dataclass(frozen=True)
class CorrectionCoefficients:
    K1: Fraction
    K2: Fraction
    K3: Fraction
    d: int
    scaling: str = "1 + K1/(beta*m) + K2/m + K3/(beta*m)^2"


def is_real_term(degrees) -> bool:
    """Terms with odd total degree carry an odd i-power (imaginary
    coefficient) and vanish by k -> -k symmetry; they are discarded."""
    return sum(degrees) % 2 == 0


def _term_coefficient(degrees) -> Fraction:
    total = sum(degrees)
    if total % 2:
        raise ValueError(f"odd-degree term {degrees} has imaginary coefficient")
    denom = 1
    for k, n in Counter(degrees).items():
        denom *= math.factorial(n) * math.factorial(k) ** n
    return Fraction((-1) ** (total // 2), denom)


def generate_terms(max_order: int) -> list[DiagramTerm]:
    """All real diagram terms at exactly order ``max_order`` in 1/(beta m).

    A vertex of degree k carries (beta m)^{-(k-2)/2}, so the degree
    multisets are the partitions of 2*max_order into parts (k-2) >= 1.
    Order 1: {3,3} and {4}; order 2: {3,3,3,3}, {3,3,4}, {3,5}, {4,4}, {6}.
    """
    if max_order not in (1, 2):
        raise ValueError(f"unsupported order {max_order!r} (only 1 and 2)")
    target = 2 * max_order
    multisets = []

    def extend(remaining, min_part, acc):
        if remaining == 0:
            multisets.append(tuple(acc))
            return
        for part in range(min_part, remaining + 1):
            extend(remaining - part, part, acc + [part + 2])

    extend(target, 1, [])
    terms = []
    for degrees in sorted(multisets):
        if not is_real_term(degrees):
            continue  # imaginary coefficient; checked discard
        terms.append(DiagramTerm(vertex_degrees=degrees,
                                 coefficient=_term_coefficient(degrees)))
    return terms


# ---------------------------------------------------------------------------
# pairings and Wick moments

def pairings(items):
    """Yield all perfect pairings of the given list; (2n-1)!! of them."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        pair = (first, items[i])
        for rest in pairings(items[1:i] + items[i + 1:]):
            yield [pair] + rest


def wick_moment(index_list, prop) -> Fraction:
    """Gaussian moment <k_{a1} ... k_{a2n}> for concrete axis indices:
    the sum over all perfect pairings of products of propagator entries."""
    idx = tuple(index_list)
    if len(idx) % 2:
        raise ValueError(f"odd number of indices ({len(idx)}); moment vanishes "
                         "and is not representable as a pairing sum")
    total = Fraction(0)
    for pairing in pairings(list(range(len(idx)))):
        prod = Fraction(1)
        for a, b in pairing:
            prod *= prop[idx[a]][idx[b]]
            if not prod:
                break
        total += prod
    return total


@lru_cache(maxsize=None)
def _dense_vertex(d: int, k: int):
    tensor = vertex_tensor(d, k)
    return {axes: tensor.get(axes) for axes in product(range(d), repeat=k)}


def _merge(tA, ownersA, tB, ownersB, pairs, prop):
    """Contract two dense tensors over the given (owner_u, owner_v) edges."""
    posA, posB = [], []
    usedA = [False] * len(ownersA)
    usedB = [False] * len(ownersB)
    for u, v in pairs:
        ia = next(i for i, o in enumerate(ownersA) if o == u and not usedA[i])
        usedA[ia] = True
        posA.append(ia)
        ib = next(i for i, o in enumerate(ownersB) if o == v and not usedB[i])
        usedB[ib] = True
        posB.append(ib)
    restA = [i for i in range(len(ownersA)) if not usedA[i]]
    restB = [i for i in range(len(ownersB)) if not usedB[i]]

    bucketA = defaultdict(lambda: defaultdict(Fraction))
    for axes, val in tA.items():
        bucketA[tuple(axes[i] for i in posA)][tuple(axes[i] for i in restA)] += val
    bucketB = defaultdict(lambda: defaultdict(Fraction))
    for axes, val in tB.items():
        bucketB[tuple(axes[i] for i in posB)][tuple(axes[i] for i in restB)] += val

    out = defaultdict(Fraction)
    for ca, restsA in bucketA.items():
        for cb, restsB in bucketB.items():
            w = Fraction(1)
            for x, y in zip(ca, cb):
                w *= prop[x][y]
                if not w:
                    break
            if not w:
                continue
            for ra, va in restsA.items():
                vw = va * w
                for rb, vb in restsB.items():
                    out[ra + rb] += vw * vb
    owners = [ownersA[i] for i in restA] + [ownersB[i] for i in restB]
    return dict(out), owners


@lru_cache(maxsize=None)
def _eval_topology(degrees, edges, d) -> Fraction:
    """Value of one contraction topology: ``edges`` is a sorted tuple of
    (vertex_u, vertex_v) pairs covering every slot exactly once."""
    prop = propagator(d)
    comp = {v: (dict(_dense_vertex(d, k)), [v] * k) for v, k in enumerate(degrees)}
    parent = list(range(len(degrees)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    remaining = Counter(edges)
    # self-loops first: the vertices are still fully symmetric there
    for (u, v), cnt in list(remaining.items()):
        if u == v:
            t, owners = comp[u]
            for _ in range(cnt):
                new = defaultdict(Fraction)
                for axes, val in t.items():
                    new[axes[2:]] += val * prop[axes[0]][axes[1]]
                t, owners = dict(new), owners[2:]
            comp[u] = (t, owners)
            del remaining[(u, v)]
    # then merge components pairwise, contracting all their mutual edges at once
    while remaining:
        u, v = next(iter(remaining))
        cu, cv = find(u), find(v)
        pairs = []
        for (a, b), cnt in list(remaining.items()):
            ca, cb = find(a), find(b)
            if {ca, cb} == {cu, cv}:
                pairs.extend([(a, b) if ca == cu else (b, a)] * cnt)
                del remaining[(a, b)]
        tA, ownersA = comp[cu]
        tB, ownersB = comp[cv]
        comp[cu] = _merge(tA, ownersA, tB, ownersB, pairs, prop)
        parent[cv] = cu
        comp.pop(cv, None)

    total = Fraction(1)
    for root in {find(v) for v in range(len(degrees))}:
        t, owners = comp[root]
        if owners:
            raise AssertionError("uncontracted slots left in topology")
        total *= t[()]
    return total


def _slot_owners(degrees):
    owners = []
    for v, k in enumerate(degrees):
        owners.extend([v] * k)
    return owners


def contract_by_topology(term: DiagramTerm, d: int):
    """Group the pairings of a term by edge multiset and evaluate each once.

    Returns a list of (edge_multiset, pairing_count, value) triples; the
    term's contraction is sum(count * value) over the list.
    """
    owners = _slot_owners(term.vertex_degrees)
    groups = Counter()
    for pairing in pairings(list(range(len(owners)))):
        key = tuple(sorted(tuple(sorted((owners[a], owners[b]))) for a, b in pairing))
        groups[key] += 1
    return [(key, cnt, _eval_topology(term.vertex_degrees, key, d))
            for key, cnt in sorted(groups.items())]


def contract_pairing(vertex_degrees, pairing, d: int) -> Fraction:
    """Value of a single explicit pairing of the concatenated vertex slots,
    summed over all index assignments (e.g. V_{abcd} Pi_ab Pi_cd = 24/5)."""
    owners = _slot_owners(vertex_degrees)
    key = tuple(sorted(tuple(sorted((owners[a], owners[b]))) for a, b in pairing))
    return _eval_topology(tuple(vertex_degrees), key, d)


def contract(term: DiagramTerm, d: int, raw: bool = False) -> Fraction:
    """coefficient x full Wick sum of the term over all index assignments.

    The default path groups pairings by topology; ``raw=True`` uses the
    brute-force loop over all d^(total slots) assignments as a self-check
    oracle (guarded by RAW_PATH_LIMIT).
    """
    if not 2 <= d <= 4:
        raise ValueError(f"dimension must be 2..4, got {d}")
    degrees = term.vertex_degrees
    if raw:
        slots = sum(degrees)
        npair = _double_factorial(slots - 1)
        if d ** slots * npair > RAW_PATH_LIMIT:
            raise ValueError("raw contraction path too large for this term")
        prop = propagator(d)
        dense = [_dense_vertex(d, k) for k in degrees]
        total = Fraction(0)
        for axes in product(range(d), repeat=slots):
            v = Fraction(1)
            pos = 0
            for tensor, k in zip(dense, degrees):
                v *= tensor[axes[pos:pos + k]]
                pos += k
            if v:
                total += v * wick_moment(axes, prop)
        return term.coefficient * total
    total = Fraction(0)
    for _, cnt, val in contract_by_topology(term, d):
        total += cnt * val
    return term.coefficient * total


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# correction coefficients

@lru_cache(maxsize=None)
def compute_K1(d: int) -> Fraction:
    """First-order coefficient: -7/30 at d=2, -711/980 at d=3."""
    return sum(contract(t, d) for t in generate_terms(1))


@lru_cache(maxsize=None)
def compute_K2(d: int) -> Fraction:
    """Coefficient of 1/m, from the beta-linear part of the rescaled vertex
    corrections: each order-1 term is weighted by the linear coefficient of
    the product of f~_k over its vertices (-3 for cubic^2, -5 for quartic
    at any d).  Gives -1/2 at d=2; d=3,4 values follow the same rule but
    are not quoted in the source tables.
    """
    total = Fraction(0)
    for term in generate_terms(1):
        lin = sum(rescaled_vertex_correction(k, 1).coefficient(1)
                  for k in term.vertex_degrees)
        total += contract(term, d) * lin
    return total


@lru_cache(maxsize=None)
def compute_K3(d: int) -> Fraction:
    """Second-order coefficient: 11/2520 at d=2 (as 205/72 - 31/6 + 22/15
    + 17/15 - 29/105 over the five order-2 diagram terms)."""
    return sum(contract(t, d) for t in generate_terms(2))


def correction_coefficients(d: int) -> CorrectionCoefficients:
    return CorrectionCoefficients(K1=compute_K1(d), K2=compute_K2(d),
                                  K3=compute_K3(d), d=d)


def correction_polynomial(spec, order: int):
    """Correction series in powers of 1/N for a problem spec.

    Substituting beta*m = N, m = N^alpha into
    1 + K1/(beta m) + K2/m + K3/(beta m)^2 gives powers (1, alpha, 2);
    the K2 term only reaches the truncation order when alpha <= order.
    Returns [(power, coefficient)] sorted by power, constant term included.
    """
    if order < 0 or order > 2:
        raise ValueError(f"order must be 0..2, got {order}")
    d = spec.degree + 1
    out = {0: Fraction(1)}
    if order >= 1:
        out[1] = compute_K1(d)
    if order >= 2:
        out[2] = out.get(2, Fraction(0)) + compute_K3(d)
    if spec.alpha <= order:
        out[spec.alpha] = out.get(spec.alpha, Fraction(0)) + compute_K2(d)
    return sorted(out.items())
