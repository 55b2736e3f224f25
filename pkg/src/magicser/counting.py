"""Exact series counting at desk scale.

Three independent methods:

* ``count_dp`` -- big-integer dynamic programming over items 1..m with a
  table indexed by (subset size, partial targets).  The target dimensions
  are bit-packed into Python integers so each item update is a handful of
  shift-and-add operations on large ints; results are exact.
* ``count_exhaustive`` -- brute-force enumeration of all A-subsets, kept
  deliberately simple; the oracle the DP is checked against.
* ``count_dft`` -- exact inverse discrete Fourier transform of the
  generating function over roots of unity (degree-1 queries), evaluated
  in fixed-point complex arithmetic with 128 fractional bits (well over
  30 significant decimal digits) and rounded to the nearest integer.

Counts are arbitrary-size nonnegative integers and serialize as decimal
strings at tool boundaries.
"""
from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from mpmath import mp

from .problem import ProblemSpec, check_feasibility, target_moments

# work cap = items x table cells; desk-scale bound with predictable failure
DEFAULT_WORK_CAPS = {1: 2_000_000_000, 2: 500_000_000, 3: 100_000_000}
DEFAULT_ENUM_CAP = 100_000_000
DEFAULT_DFT_MAX_M = 30
DFT_FRACTION_BITS = 128
DFT_ROUNDING_TOL = 1e-3


class ResourceLimitError(RuntimeError):
    """The configured state-space or enumeration cap would be exceeded."""


class PrecisionLossError(RuntimeError):
    """Numerical inversion could not be rounded unambiguously."""


@dataclass(frozen=True)
class CountQuery:
    """Count A-subsets of {1..m} with weighted sums hitting ``targets``:
    sum i, then optionally sum i(i-1)/2 and sum i(i-1)(i-2)/6."""

    m: int
    A: int
    targets: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.targets)


def _validate(query: CountQuery) -> None:
    if query.m < 0:
        raise ValueError(f"m must be >= 0, got {query.m}")
    if not 0 <= query.A <= query.m:
        raise ValueError(f"A must be in 0..m, got A={query.A}, m={query.m}")
    if not 1 <= len(query.targets) <= 3:
        raise ValueError(f"expected 1..3 targets, got {len(query.targets)}")
    if not all(isinstance(t, int) for t in query.targets):
        raise ValueError(f"targets must be integers, got {query.targets!r}")


def _weight(i: int, r: int) -> int:
    return math.comb(i, r)


def attainable_range(m: int, A: int, r: int) -> tuple[int, int]:
    """Min/max of sum_{i in S} C(i, r) over A-subsets S of {1..m}."""
    lo = math.comb(A + 1, r + 1)
    hi = math.comb(m + 1, r + 1) - math.comb(m - A + 1, r + 1)
    return lo, hi


def _out_of_range(query: CountQuery) -> bool:
    for r, t in enumerate(query.targets, start=1):
        lo, hi = attainable_range(query.m, query.A, r)
        if t < lo or t > hi:
            return True
    return False


def _cell_width(m: int, A: int) -> int:
    return math.comb(m, min(A, m // 2)).bit_length() + 1


def count_dp(query: CountQuery, *, work_cap: int | None = None,
             threads: int = 1) -> int:
    """Exact count by layered dynamic programming over items 1..m.

    The table covers sizes 0..A and target windows [0, target_r]; the work
    (items x cells) is bounded by ``work_cap`` (per-degree defaults in
    DEFAULT_WORK_CAPS).  With ``threads > 1`` the inner target range is
    partitioned across worker threads with a deterministic reduction; the
    result is bit-identical to the single-threaded run.
    """
    _validate(query)
    if _out_of_range(query):
        return 0
    m, A, targets = query.m, query.A, query.targets
    cells = (A + 1)
    for t in targets:
        cells *= t + 1
    work = m * cells
    cap = DEFAULT_WORK_CAPS[query.degree] if work_cap is None else work_cap
    if work > cap:
        raise ResourceLimitError(
            f"DP work {work} exceeds cap {cap} for query m={m}, A={A}, "
            f"targets={targets}")
    if A == 0:
        return 1 if all(t == 0 for t in targets) else 0
    if threads > 1:
        return _dp_threaded(m, A, targets, threads)
    if query.degree == 1:
        return _dp_packed_1d(m, A, targets[0])
    if query.degree == 2:
        return _dp_packed_2d(m, A, targets[0], targets[1])
    return _dp_packed_3d(m, A, targets[0], targets[1], targets[2])


def _dp_packed_1d(m: int, A: int, B: int) -> int:
    W = _cell_width(m, A)
    mask = (1 << (W * (B + 1))) - 1
    layers = [0] * (A + 1)
    layers[0] = 1
    for i in range(1, m + 1):
        if i > B:
            continue
        sh = W * i
        for a in range(min(A, i), 0, -1):
            src = layers[a - 1]
            if src:
                layers[a] += (src << sh) & mask
    return (layers[A] >> (W * B)) & ((1 << W) - 1)


def _dp_packed_2d(m: int, A: int, B1: int, B2: int) -> int:
    W = _cell_width(m, A)
    mask = (1 << (W * (B2 + 1))) - 1
    layers = [[0] * (B1 + 1) for _ in range(A + 1)]
    layers[0][0] = 1
    for i in range(1, m + 1):
        w2 = _weight(i, 2)
        if i > B1 or w2 > B2:
            continue
        sh = W * w2
        for a in range(min(A, i), 0, -1):
            src = layers[a - 1]
            dst = layers[a]
            for t1 in range(B1, i - 1, -1):
                v = src[t1 - i]
                if v:
                    dst[t1] += (v << sh) & mask
    return (layers[A][B1] >> (W * B2)) & ((1 << W) - 1)


def _dp_packed_3d(m: int, A: int, B1: int, B2: int, B3: int) -> int:
    W = _cell_width(m, A)
    mask = (1 << (W * (B3 + 1))) - 1
    layers = [[[0] * (B2 + 1) for _ in range(B1 + 1)] for _ in range(A + 1)]
    layers[0][0][0] = 1
    for i in range(1, m + 1):
        w2, w3 = _weight(i, 2), _weight(i, 3)
        if i > B1 or w2 > B2 or w3 > B3:
            continue
        sh = W * w3
        for a in range(min(A, i), 0, -1):
            src = layers[a - 1]
            dst = layers[a]
            for t1 in range(B1, i - 1, -1):
                srow = src[t1 - i]
                drow = dst[t1]
                for t2 in range(B2, w2 - 1, -1):
                    v = srow[t2 - w2]
                    if v:
                        drow[t2] += (v << sh) & mask
    return (layers[A][B1][B2] >> (W * B3)) & ((1 << W) - 1)


def _dp_threaded(m: int, A: int, targets: tuple[int, ...], threads: int) -> int:
    """Reference DP on plain integer cells with the first target range
    partitioned across worker threads (barrier per size layer)."""
    degree = len(targets)
    B1 = targets[0]

    def new_layer():
        if degree == 1:
            return [0] * (B1 + 1)
        if degree == 2:
            return [[0] * (targets[1] + 1) for _ in range(B1 + 1)]
        return [[[0] * (targets[2] + 1) for _ in range(targets[1] + 1)]
                for _ in range(B1 + 1)]

    layers = [new_layer() for _ in range(A + 1)]
    if degree == 1:
        layers[0][0] = 1
    elif degree == 2:
        layers[0][0][0] = 1
    else:
        layers[0][0][0][0] = 1

    nchunks = max(1, min(threads, B1 + 1))
    step = (B1 + 1 + nchunks - 1) // nchunks
    chunks = [(lo, min(lo + step, B1 + 1)) for lo in range(0, B1 + 1, step)]

    def update(src, dst, i, w2, w3, lo, hi):
        for t1 in range(max(lo, i), hi):
            s1 = src[t1 - i]
            if degree == 1:
                if s1:
                    dst[t1] += s1
                continue
            d1 = dst[t1]
            if degree == 2:
                for t2 in range(w2, targets[1] + 1):
                    v = s1[t2 - w2]
                    if v:
                        d1[t2] += v
                continue
            for t2 in range(w2, targets[1] + 1):
                s2 = s1[t2 - w2]
                d2 = d1[t2]
                for t3 in range(w3, targets[2] + 1):
                    v = s2[t3 - w3]
                    if v:
                        d2[t3] += v

    with ThreadPoolExecutor(max_workers=nchunks) as pool:
        for i in range(1, m + 1):
            w2 = _weight(i, 2) if degree >= 2 else 0
            w3 = _weight(i, 3) if degree >= 3 else 0
            if i > B1 or (degree >= 2 and w2 > targets[1]) \
                    or (degree >= 3 and w3 > targets[2]):
                continue
            for a in range(min(A, i), 0, -1):
                src, dst = layers[a - 1], layers[a]
                list(pool.map(lambda c: update(src, dst, i, w2, w3, *c), chunks))

    cell = layers[A][B1]
    if degree >= 2:
        cell = cell[targets[1]]
    if degree >= 3:
        cell = cell[targets[2]]
    return cell


def count_exhaustive(query: CountQuery, *, max_enum: int = DEFAULT_ENUM_CAP) -> int:
    """Brute-force oracle: enumerate all A-subsets and count the hits."""
    _validate(query)
    total = math.comb(query.m, query.A)
    if total > max_enum:
        raise ResourceLimitError(
            f"C({query.m}, {query.A}) = {total} exceeds enumeration cap {max_enum}")
    m, A, targets = query.m, query.A, query.targets
    degree = len(targets)
    w2 = [_weight(i, 2) for i in range(m + 1)]
    w3 = [_weight(i, 3) for i in range(m + 1)]
    count = 0
    for combo in combinations(range(1, m + 1), A):
        if sum(combo) != targets[0]:
            continue
        if degree >= 2 and sum(w2[i] for i in combo) != targets[1]:
            continue
        if degree >= 3 and sum(w3[i] for i in combo) != targets[2]:
            continue
        count += 1
    return count


# ---------------------------------------------------------------------------
# exact DFT inversion (degree 1)

_dft_cache: dict[tuple[int, int], dict] = {}  # keyed by (m, fbits)
_dft_lock = threading.Lock()


def _root_table(M: int, fbits: int):
    one = 1 << fbits
    out = []
    with mp.workdps(60):
        for k in range(M):
            ang = 2 * mp.pi * k / M
            out.append((int(mp.nint(mp.cos(ang) * one)),
                        int(mp.nint(mp.sin(ang) * one))))
    return out


def _dft_tables(m: int, fbits: int):
    with _dft_lock:
        entry = _dft_cache.get((m, fbits))
    if entry is not None:
        return entry
    M1, M2 = m + 1, m * (m + 1) // 2 + 1
    one = 1 << fbits
    half = 1 << (fbits - 1)
    pow1 = _root_table(M1, fbits)
    pow2 = _root_table(M2, fbits)
    # transform of the generating function prod_j ((1-b) + b e^{i z_j}) at
    # b = 1/2, folded with the 2^m prefactor of the probability identity:
    # P[r][s] = prod_{j=1..m} (1 + w1^r w2^{js})
    P = []
    for r in range(M1):
        ar, ai = pow1[r]
        fact = [(one + ((ar * br - ai * bi + half) >> fbits),
                 (ar * bi + ai * br + half) >> fbits) for br, bi in pow2]
        row = []
        for s in range(M2):
            pr, pi_ = one, 0
            idx = 0
            for _ in range(m):
                idx += s
                if idx >= M2:
                    idx -= M2
                br, bi = fact[idx]
                pr, pi_ = ((pr * br - pi_ * bi + half) >> fbits,
                           (pr * bi + pi_ * br + half) >> fbits)
            row.append((pr, pi_))
        P.append(row)
    entry = {"M1": M1, "M2": M2, "pow1": pow1, "pow2": pow2, "P": P, "G": {}}
    with _dft_lock:
        _dft_cache[(m, fbits)] = entry
    return entry


def _dft_size_row(entry, A: int, fbits: int):
    row = entry["G"].get(A)
    if row is not None:
        return row
    M1, M2 = entry["M1"], entry["M2"]
    pow1, P = entry["pow1"], entry["P"]
    half = 1 << (fbits - 1)
    row = []
    for s in range(M2):
        re = im = 0
        for r in range(M1):
            cr, ci = pow1[(-A * r) % M1]
            ar, ai = P[r][s]
            re += ar * cr - ai * ci
            im += ar * ci + ai * cr
        row.append(((re + half) >> fbits, (im + half) >> fbits))
    with _dft_lock:
        entry["G"][A] = row
    return row


def count_dft(m: int, A: int, B: int, *, max_m: int = DEFAULT_DFT_MAX_M,
              fbits: int = DFT_FRACTION_BITS,
              tol: float = DFT_ROUNDING_TOL) -> int:
    """Exact count via the finite double sum over roots of unity.

    The size phase runs on an (m+1)-point grid, the sum phase on an
    (m(m+1)/2 + 1)-point grid, so the inversion is exact up to the fixed
    point rounding; the result must land within ``tol`` of an integer.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 <= A <= m:
        raise ValueError(f"A must be in 0..m, got {A}")
    if m > max_m:
        raise ResourceLimitError(f"m = {m} exceeds the DFT cap {max_m}")
    total_sum = m * (m + 1) // 2
    if B < 0 or B > total_sum:
        return 0
    entry = _dft_tables(m, fbits)
    M1, M2 = entry["M1"], entry["M2"]
    pow2 = entry["pow2"]
    row = _dft_size_row(entry, A, fbits)
    re = im = 0
    for s in range(M2):
        cr, ci = pow2[(-B * s) % M2]
        ar, ai = row[s]
        re += ar * cr - ai * ci
        im += ar * ci + ai * cr
    den = (M1 * M2) << (2 * fbits)
    value = Fraction(re, den)
    residue = abs(Fraction(im, den))
    nearest = round(value)
    gap = abs(value - nearest)
    if gap > tol or residue > tol:
        raise PrecisionLossError(
            f"DFT inversion ambiguous for (m={m}, A={A}, B={B}): "
            f"gap {float(gap):.3g}, imaginary residue {float(residue):.3g}")
    return max(int(nearest), 0)


# ---------------------------------------------------------------------------

def count_series(spec: ProblemSpec, *, method: str = "dp",
                 work_cap: int | None = None, threads: int = 1) -> int:
    """Exact number of series for a problem spec; 0 when infeasible."""
    if not check_feasibility(spec).feasible:
        return 0
    targets = target_moments(spec).as_integers()
    query = CountQuery(m=spec.m, A=targets[0], targets=targets[1:])
    if method == "dp":
        return count_dp(query, work_cap=work_cap, threads=threads)
    if method == "exhaustive":
        return count_exhaustive(query)
    if method == "dft":
        if query.degree != 1:
            raise ValueError("the DFT method supports degree-1 queries only")
        return count_dft(query.m, query.A, query.targets[0])
    raise ValueError(f"unknown method {method!r}")


def dp_work(spec: ProblemSpec) -> int:
    """Items x cells estimate used to decide whether a DP run is affordable."""
    targets = target_moments(spec)
    if not targets.is_integral():
        return 0
    work = spec.m * (int(targets.mu[0]) + 1)
    for t in targets.mu[1:]:
        work *= int(t) + 1
    return work


@lru_cache(maxsize=8)
def _distribution_layers(m: int):
    top = m * (m + 1) // 2
    W = math.comb(m, m // 2).bit_length() + 1
    layers = [0] * (m + 1)
    layers[0] = 1
    for i in range(1, m + 1):
        sh = W * i
        for a in range(min(m, i), 0, -1):
            if layers[a - 1]:
                layers[a] += layers[a - 1] << sh
    return W, top, tuple(layers)


def sum_distribution(m: int, A: int) -> list[int]:
    """Counts of A-subsets of {1..m} by sum, for all sums 0..m(m+1)/2."""
    if not 0 <= A <= m:
        raise ValueError(f"A must be in 0..m, got {A}")
    W, top, layers = _distribution_layers(m)
    row = layers[A]
    cell = (1 << W) - 1
    return [(row >> (W * b)) & cell for b in range(top + 1)]
