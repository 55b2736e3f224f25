"""High-precision evaluation of the asymptotic count formulas.

The estimate for the number of degree-p series of order N splits into a
leading constant (rational x sqrt(rational x pi^a x e^b)), a growth term
(N^(alpha-1) e)^N / N^power, and a correction series in 1/N.  Everything
is evaluated in log10 space with mpmath so that the huge magnitudes
(10^3424 at N=1000) never materialize, and results are returned as
sign/mantissa/exponent triples.

The canonical correction coefficients (3/5, 31/420, -11/15, 157/126,
-7/30, -1249/2520, 11/2520, 1787/2940, -1201/980) are hardcoded as the
runtime path; ``compose_series`` re-derives every one of them exactly by
multiplying the prefactor series, the Gaussian-peak expansion, and the
diagram correction polynomial, and the acceptance tests check rational
equality between the two paths.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from . import diagrams
from .problem import ProblemSpec, check_feasibility
from .series import covariance_leading

DEFAULT_DIGITS = 13
MIN_PREFACTOR_PRECISION = 30


class FeasibilityWarning(UserWarning):
    """The requested order admits no series; the smooth formula is returned."""


# ---------------------------------------------------------------------------
# scientific numbers

@dataclass(frozen=True)
class SciNumber:
    """sign * d.ddd... * 10^exp10; mantissa stored as a digit string."""

    sign: int
    mantissa: str
    exp10: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0, or 1, got {self.sign}")
        if self.sign and not ("1" <= self.mantissa[0] <= "9"):
            raise ValueError(f"mantissa must start with 1..9: {self.mantissa!r}")

    @property
    def digits(self) -> int:
        return len(self.mantissa)

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        body = self.mantissa[0]
        if len(self.mantissa) > 1:
            body += "." + self.mantissa[1:]
        s = "-" if self.sign < 0 else ""
        return f"{s}{body}e{self.exp10:+d}"

    @staticmethod
    def parse(text: str) -> "SciNumber":
        text = text.strip()
        if text == "0":
            return SciNumber(0, "0", 0)
        sign = 1
        if text.startswith("-"):
            sign, text = -1, text[1:]
        mant, _, exp = text.partition("e")
        head, _, tail = mant.partition(".")
        if len(head) != 1:
            raise ValueError(f"mantissa must be d.ddd..., got {mant!r}")
        return SciNumber(sign, head + tail, int(exp))

    def as_fraction(self) -> Fraction:
        if self.sign == 0:
            return Fraction(0)
        scale = self.exp10 - (len(self.mantissa) - 1)
        val = Fraction(int(self.mantissa))
        val = val * 10 ** scale if scale >= 0 else val / 10 ** (-scale)
        return self.sign * val

    def log10(self) -> float:
        if self.sign == 0:
            raise ValueError("log10 of zero")
        return math.log10(int(self.mantissa)) - (len(self.mantissa) - 1) + self.exp10


def _sci_from_log10(lg, digits: int, sign: int = 1) -> SciNumber:
    exp10 = int(mp.floor(lg))
    mant = mp.mpf(10) ** (lg - exp10)
    scaled = int(mp.nint(mant * 10 ** (digits - 1)))
    if scaled >= 10 ** digits:  # mantissa rounded up to 10.00...
        scaled //= 10
        exp10 += 1
    return SciNumber(sign=sign, mantissa=str(scaled).rjust(digits, "0"), exp10=exp10)


# ---------------------------------------------------------------------------
# formula descriptors

@dataclass(frozen=True)
class LeadingConstant:
    """q * sqrt(r * pi^pi_power * e^e_power) with q, r rational."""

    q: Fraction
    r: Fraction
    pi_power: int
    e_power: int

    def log10(self):
        val = mp.log10(mp.mpf(self.q.numerator)) - mp.log10(self.q.denominator)
        inner = (mp.log10(mp.mpf(self.r.numerator)) - mp.log10(self.r.denominator)
                 + self.pi_power * mp.log10(mp.pi) + self.e_power * mp.log10(mp.e))
        return val + inner / 2


@dataclass(frozen=True)
class AsymptoticFormula:
    """constant x (N^(alpha-1) e)^N / N^power x (1 + sum c_k / N^k)."""

    alpha: int
    degree: int
    constant: LeadingConstant
    power: Fraction
    corrections: tuple[tuple[int, Fraction], ...]  # (k, c_k), includes (0, 1)

    def coefficient_list(self, order: int | None = None):
        top = max(k for k, _ in self.corrections) if order is None else order
        lookup = dict(self.corrections)
        return [lookup.get(k, Fraction(0)) for k in range(top + 1)]

    def evaluate(self, N: int, precision: int | None = None,
                 digits: int = DEFAULT_DIGITS) -> SciNumber:
        if N < 2:
            raise ValueError(f"N must be >= 2, got {N}")
        dps = _resolve_precision(self.alpha, N, precision, digits)
        with mp.workdps(dps):
            lgN = mp.log10(N)
            series = mp.mpf(0)
            for k, c in self.corrections:
                series += mp.mpf(c.numerator) / c.denominator / mp.mpf(N) ** k
            lg = (N * ((self.alpha - 1) * lgN + mp.log10(mp.e))
                  - mp.mpf(self.power.numerator) / self.power.denominator * lgN
                  + self.constant.log10() + mp.log10(series))
            return _sci_from_log10(lg, digits)


def _required_precision(alpha: int, N: int) -> int:
    scale = int(N * alpha * max(1.0, math.log10(max(N, 2))))
    return max(50, 20 + len(str(scale)))


def _resolve_precision(alpha: int, N: int, precision: int | None,
                       digits: int) -> int:
    auto = _required_precision(alpha, N) + digits
    if precision is None:
        return auto
    floor_needed = 20 + len(str(int(N * (alpha - 1) * max(1.0, math.log10(max(N, 2)))) + N))
    if precision < floor_needed:
        raise ValueError(
            f"precision {precision} too low for N={N}, alpha={alpha}; "
            f"need at least {floor_needed} significant digits")
    return max(precision, 2 * digits)


# ---------------------------------------------------------------------------
# prefactor

def prefactor_exact(m: int, beta, precision: int = 50,
                    digits: int | None = None) -> SciNumber:
    """beta^(-beta m) (1-beta)^(-(1-beta) m), evaluated through logarithms."""
    beta = Fraction(beta)
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if precision < MIN_PREFACTOR_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PREFACTOR_PRECISION}")
    digits = precision if digits is None else digits
    with mp.workdps(precision + 15):
        lb = mp.log10(mp.mpf(beta.numerator)) - mp.log10(beta.denominator)
        omb = 1 - beta
        lob = mp.log10(mp.mpf(omb.numerator)) - mp.log10(omb.denominator)
        bm = mp.mpf(beta.numerator) * m / beta.denominator
        lg = -bm * lb - (m - bm) * lob
        return _sci_from_log10(lg, digits)


def _prefactor_exponent_tail(alpha: int, order: int):
    """Exponent of the prefactor under m = N^alpha, beta = N^(1-alpha):
    N + c_0 + sum_{k>=1} c_k N^-k.  Returns (c_0, {k: c_k})."""
    coeffs: dict[int, Fraction] = {}
    j = 1
    while True:
        e1 = alpha - j * (alpha - 1)   # from +N^alpha * beta^j / j
        e2 = 1 - j * (alpha - 1)       # from -N * beta^j / j
        if e1 < -order and e2 < -order:
            break
        if -order <= e1 <= 0:
            coeffs[-e1] = coeffs.get(-e1, Fraction(0)) + Fraction(1, j)
        if -order <= e2 <= 0:
            coeffs[-e2] = coeffs.get(-e2, Fraction(0)) - Fraction(1, j)
        j += 1
    c0 = coeffs.pop(0, Fraction(0))
    return c0, coeffs


def _series_mul(a: dict, b: dict, order: int) -> dict:
    out: dict[int, Fraction] = {}
    for i, ca in a.items():
        if not ca:
            continue
        for j, cb in b.items():
            if i + j <= order and cb:
                out[i + j] = out.get(i + j, Fraction(0)) + ca * cb
    return out


def _series_exp(tail: dict, order: int) -> dict:
    out = {0: Fraction(1)}
    power = {0: Fraction(1)}
    for n in range(1, order + 1):
        power = _series_mul(power, tail, order)
        fact = Fraction(1, math.factorial(n))
        for k, v in power.items():
            out[k] = out.get(k, Fraction(0)) + v * fact
    return out


def prefactor_series(alpha: int, order: int) -> list[Fraction]:
    """Exact 1/N coefficients of the prefactor divided by (N^(alpha-1) e)^N
    and its constant: (1, -1/6, -5/72) for alpha=2, (1, -1/2, 1/8) for 3."""
    if alpha < 2:
        raise ValueError(f"alpha must be >= 2, got {alpha}")
    _, tail = _prefactor_exponent_tail(alpha, order)
    series = _series_exp(tail, order)
    return [series.get(k, Fraction(0)) for k in range(order + 1)]


def prefactor_constant_e_power(alpha: int) -> Fraction:
    """Power of e in the prefactor's leading constant: -1/2 for alpha=2
    (the 1/sqrt(e)), 0 for alpha >= 3."""
    c0, _ = _prefactor_exponent_tail(alpha, 0)
    return c0


# ---------------------------------------------------------------------------
# Gaussian peak probability

def _binomial_series(exponent: Fraction, step: int, order: int) -> dict:
    """(1 - N^-step)^exponent as {power: coefficient} up to N^-order."""
    out = {0: Fraction(1)}
    c = Fraction(1)
    j = 1
    while j * step <= order:
        c = c * (exponent - (j - 1)) / j
        out[j * step] = c * (-1) ** j
        j += 1
    return out


def _gaussian_peak_series(alpha: int, degree: int, order: int) -> dict:
    """1/N expansion of the Gaussian peak probability divided by its
    leading term.  Degree 1 uses the exact 2-D determinant; degrees 2 and
    3 keep the determinant at leading order in m but exact in beta."""
    if degree == 1:
        a = _binomial_series(Fraction(-1), alpha - 1, order)
        b = _binomial_series(Fraction(-1, 2), 2 * alpha, order)
        return _series_mul(a, b, order)
    d = degree + 1
    return _binomial_series(Fraction(-d, 2), alpha - 1, order)


def _square_free_split(n: int) -> tuple[int, int]:
    """n = square * free with free square-free; returns (sqrt(square), free)."""
    root, free, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        root *= p ** (e // 2)
        if e % 2:
            free *= p
        p += 1 if p == 2 else 2
    return root, free * n


def _normalize_constant(r: Fraction, pi_power: int, e_power: int) -> LeadingConstant:
    num_root, num_free = _square_free_split(r.numerator)
    den_root, den_free = _square_free_split(r.denominator)
    q = Fraction(num_root, den_root * den_free)
    return LeadingConstant(q=q, r=Fraction(num_free * den_free),
                           pi_power=pi_power, e_power=e_power)


def _gaussian_leading_constant(degree: int) -> tuple[Fraction, int]:
    """(r, pi_power): the Gaussian peak constant is sqrt(r * pi^pi_power),
    r = 1/(2^d det(leading covariance)): sqrt(3)/pi, 6 sqrt(30)/pi^(3/2),
    720 sqrt(105)/pi^2 for degrees 1, 2, 3."""
    d = degree + 1
    det = covariance_leading(d).det()
    return 1 / (det * 2 ** d), -d


def _power_of_N(alpha: int, degree: int) -> Fraction:
    if degree == 1:
        return Fraction(alpha + 1)
    if degree == 2:
        return Fraction(6 * alpha + 3, 2)
    return Fraction(6 * alpha + 2)


def gaussian_central_probability(spec: ProblemSpec, precision: int = 50,
                                 digits: int | None = None) -> SciNumber:
    """Gaussian peak probability of hitting all targets simultaneously.

    Degree 1 uses the exact closed form (1/(pi b(1-b)m)) sqrt(3/(m^2-1));
    degrees 2 and 3 use (2 pi)^(-d/2) / sqrt(det), with the covariance
    determinant at leading order in m and exact in beta.
    """
    m, beta = spec.m, spec.beta
    if spec.degree == 1 and m < 2:
        raise ValueError("degenerate covariance: degree 1 needs m >= 2")
    digits = min(precision, 20) if digits is None else digits
    with mp.workdps(precision + 15):
        lb = (mp.log10(mp.mpf(beta.numerator)) - mp.log10(beta.denominator))
        omb = 1 - beta
        lob = mp.log10(mp.mpf(omb.numerator)) - mp.log10(omb.denominator)
        if spec.degree == 1:
            lg = (-mp.log10(mp.pi) - lb - lob - mp.log10(m)
                  + (mp.log10(3) - mp.log10(mp.mpf(m) ** 2 - 1)) / 2)
        else:
            d = spec.dimension
            det = covariance_leading(d).det()
            lg_det = (mp.log10(mp.mpf(det.numerator)) - mp.log10(det.denominator)
                      + d * (lb + lob) + d * d * mp.log10(m))
            lg = -(d * mp.log10(2 * mp.pi) + lg_det) / 2
        return _sci_from_log10(lg, digits)


# ---------------------------------------------------------------------------
# composed and canonical formulas

def compose_series(alpha: int, degree: int, order: int) -> AsymptoticFormula:
    """Multiply prefactor x Gaussian x diagram corrections as exact
    1/N series; independently re-derives the canonical coefficients."""
    _check_order(degree, order)
    if alpha < 2:
        raise ValueError(f"alpha must be >= 2, got {alpha}")
    pref = {k: c for k, c in enumerate(prefactor_series(alpha, order))}
    gauss = _gaussian_peak_series(alpha, degree, order)
    spec = ProblemSpec(alpha=alpha, N=2, degree=degree)  # N unused here
    corr = dict(diagrams.correction_polynomial(spec, order))
    total = _series_mul(_series_mul(pref, gauss, order), corr, order)
    r, pi_pow = _gaussian_leading_constant(degree)
    c0 = prefactor_constant_e_power(alpha)
    e_pow = int(2 * c0)  # c0 is 0 or -1/2, folded inside the square root
    constant = _normalize_constant(r, pi_pow, e_pow)
    corrections = tuple(sorted((k, c) for k, c in total.items() if c))
    return AsymptoticFormula(alpha=alpha, degree=degree, constant=constant,
                             power=_power_of_N(alpha, degree),
                             corrections=corrections)


def gaussian_series(alpha: int, degree: int, order: int) -> list[Fraction]:
    """1/N coefficients of the assembled Gaussian-era estimate (prefactor x
    Gaussian peak, no diagram corrections): (1, 5/6, 55/72) for squares,
    (1, -1/2, 9/8) for cubes.  These subleading terms are systematically
    wrong, which is what the correction series repairs."""
    pref = {k: c for k, c in enumerate(prefactor_series(alpha, order))}
    gauss = _gaussian_peak_series(alpha, degree, order)
    total = _series_mul(pref, gauss, order)
    return [total.get(k, Fraction(0)) for k in range(order + 1)]


def _check_order(degree: int, order: int) -> None:
    limits = {1: 2, 2: 1, 3: 0}
    if degree not in limits:
        raise ValueError(f"degree must be 1..3, got {degree}")
    if not 0 <= order <= limits[degree]:
        raise ValueError(
            f"correction order {order} unsupported for degree {degree} "
            f"(max {limits[degree]})")


_CANONICAL: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {
    # (degree, alpha) -> full correction list at the maximum supported order
    (1, 2): ((0, Fraction(1)), (1, Fraction(3, 5)), (2, Fraction(31, 420))),
    (1, 3): ((0, Fraction(1)), (1, Fraction(-11, 15)), (2, Fraction(157, 126))),
    (1, 4): ((0, Fraction(1)), (1, Fraction(-7, 30)), (2, Fraction(-1249, 2520))),
    (1, -1): ((0, Fraction(1)), (1, Fraction(-7, 30)), (2, Fraction(11, 2520))),
    (2, 2): ((0, Fraction(1)), (1, Fraction(1787, 2940))),
    (2, 3): ((0, Fraction(1)), (1, Fraction(-1201, 980))),
    (3, 2): ((0, Fraction(1)),),
}


@lru_cache(maxsize=None)
def canonical_formula(alpha: int, degree: int, order: int) -> AsymptoticFormula:
    """The hardcoded runtime formula; falls back to compose_series for
    (alpha, degree) combinations without a canonical table entry."""
    _check_order(degree, order)
    key = (degree, alpha)
    if key not in _CANONICAL and degree == 1 and alpha >= 5:
        key = (1, -1)
    if key not in _CANONICAL:
        return compose_series(alpha, degree, order)
    corrections = tuple((k, c) for k, c in _CANONICAL[key] if k <= order)
    r, pi_pow = _gaussian_leading_constant(degree)
    e_pow = int(2 * prefactor_constant_e_power(alpha))
    constant = _normalize_constant(r, pi_pow, e_pow)
    return AsymptoticFormula(alpha=alpha, degree=degree, constant=constant,
                             power=_power_of_N(alpha, degree),
                             corrections=corrections)


def corrected_estimate(spec: ProblemSpec, correction_order: int,
                       precision: int | None = None,
                       digits: int = DEFAULT_DIGITS) -> SciNumber:
    """Evaluate the assembled estimate at high precision.

    correction_order 0 is the Gaussian-era leading formula; orders 1 and 2
    add the correction terms.  Infeasible specs (e.g. trimagic with
    N = 2 mod 4) still evaluate -- the formula is smooth in N -- but a
    FeasibilityWarning is emitted since the true count is 0.
    """
    if spec.N < 2:
        raise ValueError(f"N must be >= 2, got {spec.N}")
    _check_order(spec.degree, correction_order)
    if not check_feasibility(spec).feasible:
        warnings.warn(
            f"spec (alpha={spec.alpha}, N={spec.N}, degree={spec.degree}) "
            "is infeasible: the exact count is 0", FeasibilityWarning,
            stacklevel=2)
    formula = canonical_formula(spec.alpha, spec.degree, correction_order)
    return formula.evaluate(spec.N, precision=precision, digits=digits)


def bottomley(N: int, corrected: bool = False, precision: int | None = None,
              digits: int = DEFAULT_DIGITS) -> SciNumber:
    """The empirical square-series formula
    (1/pi) sqrt(3/e) (Ne)^N / (N^3 - 3/5 N^2 + c N), c = 2/7, with the
    derived refinement c = 2/7 + 1/2100 when ``corrected`` is set."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    c = Fraction(2, 7) + (Fraction(1, 2100) if corrected else 0)
    dps = _resolve_precision(2, N, precision, digits)
    with mp.workdps(dps):
        denom = (mp.mpf(N) ** 3 - mp.mpf(3) / 5 * mp.mpf(N) ** 2
                 + mp.mpf(c.numerator) / c.denominator * N)
        lg = (N * (mp.log10(N) + mp.log10(mp.e)) - mp.log10(denom)
              - mp.log10(mp.pi) + (mp.log10(3) - mp.log10(mp.e)) / 2)
        return _sci_from_log10(lg, digits)
