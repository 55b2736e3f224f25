"""Problem instances: which hypercube, which multimagic degree.

A degree-p series of order N for an alpha-dimensional hypercube is an
N-element subset of {1..N^alpha} whose weighted sums hit the "magic"
targets exactly.  This module maps (alpha, N, degree) onto the Bernoulli
sampling model used by every other module: each of 1..m is included with
probability beta, where m = N^alpha and beta = 1/N^(alpha-1), and the
targets are the exact expected values of the weighted sums.

Weights are the binomial forms w_r(i) = C(i, r), i.e. 1, i, i(i-1)/2,
i(i-1)(i-2)/6.  Counts are identical to the power-sum convention
(sum i, sum i^2, sum i^3) because the linear map between the two target
vectors is integer-invertible; ``TargetVector.power_sums`` reports the
other convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

MAX_DEGREE = 3

_WEIGHT_NAMES = ("size", "sum", "square-weight", "cube-weight")


@dataclass(frozen=True)
class ProblemSpec:
    """One counting problem: alpha-cube of order N, multimagic degree 1..3."""

    alpha: int
    N: int
    degree: int

    @property
    def m(self) -> int:
        return self.N ** self.alpha

    @property
    def beta(self) -> Fraction:
        return Fraction(1, self.N ** (self.alpha - 1))

    @property
    def dimension(self) -> int:
        """Dimension d of the moment/covariance problem (= degree + 1)."""
        return self.degree + 1


@dataclass(frozen=True)
class SamplingModel:
    """Bernoulli inclusion model: each of 1..m kept with probability beta."""

    m: int
    beta: Fraction


@dataclass(frozen=True)
class TargetVector:
    """Exact rational targets (mu_x, mu_y[, mu_z[, mu_w]])."""

    mu: tuple[Fraction, ...]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.mu)

    def as_integers(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError(f"non-integral targets: {self.mu}")
        return tuple(int(c) for c in self.mu)

    def power_sums(self) -> tuple[Fraction, ...]:
        """Targets in the (size, sum i, sum i^2, sum i^3) convention."""
        mu = self.mu
        out = [mu[0], mu[1]]
        if len(mu) >= 3:
            out.append(2 * mu[2] + mu[1])          # i^2 = 2*C(i,2) + i
        if len(mu) >= 4:
            out.append(6 * mu[3] + 6 * mu[2] + mu[1])  # i^3 = 6*C(i,3) + 6*C(i,2) + i
        return tuple(out)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reason: str = ""


def make_problem(alpha: int, N: int, degree: int) -> ProblemSpec:
    """Build a validated problem spec with m = N^alpha, beta = 1/N^(alpha-1)."""
    if not isinstance(alpha, int) or alpha < 2:
        raise ValueError(f"alpha must be an integer >= 2, got {alpha!r}")
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N!r}")
    if degree not in (1, 2, 3):
        raise ValueError(f"degree must be 1, 2, or 3, got {degree!r}")
    return ProblemSpec(alpha=alpha, N=N, degree=degree)


def sampling_model(spec: ProblemSpec) -> SamplingModel:
    return SamplingModel(m=spec.m, beta=spec.beta)


def weight(i: int, r: int) -> int:
    """Weight of element i on axis r: C(i, r).  w_0=1, w_1=i, w_2=i(i-1)/2, ..."""
    return math.comb(i, r)


def target_moments(spec: ProblemSpec) -> TargetVector:
    """Exact targets mu_r = beta * sum_{i=1..m} C(i, r), r = 0..degree.

    The r >= 1 sums collapse to C(m+1, r+1); the r = 0 sum is m.  For
    degree 1 the second component is the magic constant: N(N^2+1)/2 for
    squares, N(N^3+1)/2 for cubes.
    """
    m, beta = spec.m, spec.beta
    mu = [beta * m]
    for r in range(1, spec.degree + 1):
        mu.append(beta * math.comb(m + 1, r + 1))
    return TargetVector(mu=tuple(mu))


def check_feasibility(spec: ProblemSpec) -> Feasibility:
    """A spec is infeasible exactly when some target is not an integer.

    For trimagic squares (degree 3, alpha 2) this happens precisely for
    N = 2 (mod 4): the cube-weight target picks up an odd factor of 1/2.
    Infeasible specs have exact count 0.
    """
    bad = [(name, c) for name, c in zip(_WEIGHT_NAMES, target_moments(spec).mu)
           if c.denominator != 1]
    if not bad:
        return Feasibility(feasible=True)
    reasons = "; ".join(f"{name} target {c} is not an integer" for name, c in bad)
    return Feasibility(feasible=False, reason=reasons)
