"""Exact-rational infrastructure for the correction-coefficient machinery.

Vertex-correction polynomials f_k(beta), rescaled covariance matrices,
their inverses (propagators), and the normalized symmetric vertex
tensors.  Everything here is exact: coefficients are ``Fraction``s and
the tests are exact-equality tests.

The vertex correction f_k(beta) is defined through the cumulant
expansion of a single Bernoulli(beta) factor: the coefficient of
(iz)^k / k! in the z-series of log(1 - beta*(1 - e^{iz})) equals
beta * f_k(beta).  The first two are f_3 = 1 - 3b + 2b^2 and
f_4 = 1 - 7b + 12b^2 - 6b^3, and f_k(0) = 1, f_k(1) = 0 for all k >= 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

Rational = Fraction  # exact rational scalar used throughout the engine


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (Fraction(0),)


@dataclass(frozen=True)
class BetaPoly:
    """Polynomial in beta with exact rational coefficients, ascending powers."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def of(*coeffs) -> "BetaPoly":
        return BetaPoly(_trim(Fraction(c) for c in coeffs))

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, beta) -> Fraction:
        beta = Fraction(beta)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * beta + c
        return acc

    def truncated(self, order: int) -> "BetaPoly":
        return BetaPoly(_trim(self.coeffs[: order + 1]))

    def __mul__(self, other: "BetaPoly") -> "BetaPoly":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return BetaPoly(_trim(out))


# ---------------------------------------------------------------------------
# power series in z with beta-polynomial coefficients

def _poly_mul(a, b, zmax):
    out = [[Fraction(0)] for _ in range(zmax + 1)]
    for i, pa in enumerate(a):
        if i > zmax:
            break
        for j, pb in enumerate(b):
            if i + j > zmax:
                break
            tgt = out[i + j]
            for da, ca in enumerate(pa):
                if ca:
                    for db, cb in enumerate(pb):
                        need = da + db + 1
                        if len(tgt) < need:
                            tgt.extend([Fraction(0)] * (need - len(tgt)))
                        tgt[da + db] += ca * cb
    return out


@lru_cache(maxsize=None)
def _log_factor_series(zmax: int):
    """z-series of log(1 + beta*(e^z - 1)) to order zmax; entry n is the
    beta-polynomial multiplying z^n (as a coefficient list)."""
    # x = beta * (e^z - 1), no constant term
    x = [[Fraction(0)]] + [[Fraction(0), Fraction(1, math.factorial(n))]
                           for n in range(1, zmax + 1)]
    out = [[Fraction(0)] for _ in range(zmax + 1)]
    power = [[Fraction(1)]] + [[Fraction(0)] for _ in range(zmax)]
    for j in range(1, zmax + 1):
        power = _poly_mul(power, x, zmax)
        sign = Fraction((-1) ** (j + 1), j)
        for n in range(zmax + 1):
            pj = power[n]
            tgt = out[n]
            if len(tgt) < len(pj):
                tgt.extend([Fraction(0)] * (len(pj) - len(tgt)))
            for d, c in enumerate(pj):
                tgt[d] += sign * c
    return tuple(tuple(poly) for poly in out)


def vertex_correction(k: int) -> BetaPoly:
    """f_k(beta): the degree-k cumulant polynomial of the Bernoulli factor.

    Defined by [z^k/k!] log(1 - beta*(1 - e^{iz})) = beta * f_k(beta)
    after substituting w = iz; computed by exact series composition.
    """
    if k < 3:
        raise ValueError(f"vertex corrections start at k = 3, got {k}")
    poly = _log_factor_series(k)[k]
    scaled = [c * math.factorial(k) for c in poly]
    if scaled[0] != 0:
        raise AssertionError("log series coefficient must vanish at beta = 0")
    return BetaPoly(_trim(scaled[1:]))  # divide by the overall beta factor


def _binomial_coeffs(exponent: Fraction, order: int):
    """Coefficients of (1 - b)^exponent as a beta-series to b^order."""
    out = [Fraction(1)]
    c = Fraction(1)
    for j in range(1, order + 1):
        c = c * (exponent - (j - 1)) / j
        out.append(c * (-1) ** j)
    return out


def rescaled_vertex_correction(k: int, order: int) -> BetaPoly:
    """f~_k(beta) = (1-beta)^(-k/2) * f_k(beta), truncated at beta^order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    fk = vertex_correction(k)
    pre = BetaPoly(tuple(_binomial_coeffs(Fraction(-k, 2), order)))
    return (pre * fk).truncated(order)


# ---------------------------------------------------------------------------
# covariance matrices and propagators

@dataclass(frozen=True)
class CovMatrix:
    entries: tuple[tuple[Fraction, ...], ...]
    kind: str  # "exact-2d" or "leading-order"

    @property
    def d(self) -> int:
        return len(self.entries)

    def det(self) -> Fraction:
        return _det(self.entries)


@dataclass(frozen=True)
class PropagatorMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def _det(rows) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for i in range(n):
        piv = None
        for j in range(i, n):
            if m[j][i] != 0:
                piv = j
                break
        if piv is None:
            return Fraction(0)
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        for j in range(i + 1, n):
            f = m[j][i] / m[i][i]
            if f:
                for kk in range(i, n):
                    m[j][kk] -= f * m[i][kk]
    return det


def _inverse(rows):
    n = len(rows)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for i in range(n):
        piv = next((j for j in range(i, n) if m[j][i] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
        p = m[i][i]
        m[i] = [x / p for x in m[i]]
        for j in range(n):
            if j != i and m[j][i]:
                f = m[j][i]
                m[j] = [a - f * b for a, b in zip(m[j], m[i])]
    return tuple(tuple(row[n:]) for row in m)


def mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
                 for i in range(n))


def identity(d: int):
    return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def covariance_exact_2d(m: int) -> CovMatrix:
    """Rescaled 2-D covariance, exact in m:
    [[1, (1+1/m)/2], [(1+1/m)/2, (1/3)(1+1/m)(1+1/(2m))]]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    h = Fraction(1, m)
    off = (1 + h) / 2
    yy = Fraction(1, 3) * (1 + h) * (1 + Fraction(1, 2 * m))
    return CovMatrix(entries=((Fraction(1), off), (off, yy)), kind="exact-2d")


@lru_cache(maxsize=None)
def covariance_leading(d: int) -> CovMatrix:
    """Leading-order rescaled covariance: entry (a, b) = 1/(a! b! (a+b+1))."""
    if not 2 <= d <= 4:
        raise ValueError(f"dimension must be 2..4, got {d}")
    rows = tuple(
        tuple(Fraction(1, math.factorial(a) * math.factorial(b) * (a + b + 1))
              for b in range(d))
        for a in range(d))
    return CovMatrix(entries=rows, kind="leading-order")


@lru_cache(maxsize=None)
def propagator(d: int) -> PropagatorMatrix:
    """Exact inverse of the leading-order covariance; [[4,-6],[-6,12]] at d=2."""
    return PropagatorMatrix(entries=_inverse(covariance_leading(d).entries))


def covariance_raw(m: int, beta, d: int):
    """Unrescaled covariance of the weighted Bernoulli sums, exact and by
    direct summation: entry (a, b) = beta(1-beta) * sum_j C(j,a) C(j,b)."""
    beta = Fraction(beta)
    pref = beta * (1 - beta)
    rows = []
    for a in range(d):
        row = []
        for b in range(d):
            s = sum(math.comb(j, a) * math.comb(j, b) for j in range(1, m + 1))
            row.append(pref * s)
        rows.append(tuple(row))
    return tuple(rows)


# ---------------------------------------------------------------------------
# symmetric vertex tensors

@dataclass(frozen=True)
class SymTensor:
    """Fully symmetric tensor keyed on sorted index tuples."""

    d: int
    rank: int
    values: dict

    def get(self, indices) -> Fraction:
        key = tuple(sorted(indices))
        if len(key) != self.rank:
            raise ValueError(f"expected {self.rank} indices, got {len(key)}")
        return self.values[key]

    def __getitem__(self, indices) -> Fraction:
        return self.get(indices)


@lru_cache(maxsize=None)
def vertex_tensor(d: int, k: int) -> SymTensor:
    """Normalized degree-k vertex in d dimensions.

    For an index multiset with n_r copies of axis r the component is
    prod_r (1/r!)^{n_r} * 1/(1 + sum_r r*n_r): 1/(1+n_y) at d=2 and
    (1/2)^{n_z}/(1+n_y+2n_z) at d=3, extrapolated the same way to d=4.
    """
    if not 2 <= d <= 4:
        raise ValueError(f"dimension must be 2..4, got {d}")
    if k < 3:
        raise ValueError(f"vertex rank must be >= 3, got {k}")
    values = {}
    for key in combinations_with_replacement(range(d), k):
        num = Fraction(1)
        s = 0
        for r in key:
            num /= math.factorial(r)
            s += r
        values[key] = num / (1 + s)
    return SymTensor(d=d, rank=k, values=values)
