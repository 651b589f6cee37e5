"""Closed-form constants for the log-weighted exponential-integrability problem.

Everything here is exact arithmetic on top of a handful of special values:
the unit-sphere area, a binomial coefficient (kept in integer arithmetic),
the critical exponent/coefficient pair, and the digamma-based concentration
bound.  All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

EULER_GAMMA = 0.57721566490153286060651209008240243

# Bernoulli-number coefficients B_{2m}/(2m) for the asymptotic digamma series.
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
)
_DIGAMMA_SHIFT = 10.0


class Weight(Enum):
    """Radial log-weight selector: W0 is (ln 1/r)^(beta*n/2), W1 is (ln e/r)^(beta*n/2)."""

    W0 = "w0"
    W1 = "w1"


@dataclass(frozen=True)
class Params:
    """Dimension/weight parameter bundle.

    ``beta`` is accepted as any real here; operations that require a specific
    range (for instance beta < 1 for the critical constants) police it
    themselves, because the Hardy-type results are meaningful outside [0, 1).
    """

    n: int
    k: int
    beta: float
    weight: Weight = Weight.W0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be an even integer >= 2, got {self.n!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        if not isinstance(self.weight, Weight):
            raise ValueError(f"weight must be a Weight enum member, got {self.weight!r}")

    @property
    def is_borderline(self) -> bool:
        return self.n == 2 * self.k


@dataclass(frozen=True)
class SharpConstants:
    """The four named constants of the borderline problem.

    c_n          normalization of the radial Dirichlet-type norm
    alpha_n      un-weighted critical coefficient n * c_n^(2/n)
    gamma_crit   critical exponent (n+2)/(n(1-beta))
    alpha_crit   weighted critical coefficient n * [c_n^(2/n) (1-beta)]^(1/(1-beta))
    """

    c_n: float
    alpha_n: float
    gamma_crit: float
    alpha_crit: float


def surface_area(n: int) -> float:
    """Area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def norm_constant(n: int, k: int) -> float:
    """c_n = (omega_{n-1} / k) * binom(n-1, k-1), binomial kept exact."""
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return surface_area(n) / k * math.comb(n - 1, k - 1)


def critical_exponent(n: int, beta: float) -> float:
    """gamma = (n+2)/(n(1-beta)); requires beta < 1."""
    if beta >= 1.0:
        raise ValueError(f"critical exponent requires beta < 1, got beta={beta}")
    return (n + 2) / (n * (1.0 - beta))


def critical_coefficient(n: int, k: int, beta: float) -> float:
    """alpha_crit = n * [c_n^(2/n) * (1-beta)]^(1/(1-beta)); requires beta < 1."""
    if beta >= 1.0:
        raise ValueError(f"critical coefficient requires beta < 1, got beta={beta}")
    return n * (norm_constant(n, k) ** (2.0 / n) * (1.0 - beta)) ** (1.0 / (1.0 - beta))


def compute_constants(p: Params) -> SharpConstants:
    """All four sharp constants for a borderline (n = 2k) parameter set.

    Rejects n != 2k (the critical pair is only defined on the borderline)
    and beta >= 1 (where gamma_crit/alpha_crit degenerate).
    """
    if not p.is_borderline:
        raise ValueError(f"critical constants need n = 2k, got n={p.n}, k={p.k}")
    c_n = norm_constant(p.n, p.k)
    return SharpConstants(
        c_n=c_n,
        alpha_n=p.n * c_n ** (2.0 / p.n),
        gamma_crit=critical_exponent(p.n, p.beta),
        alpha_crit=critical_coefficient(p.n, p.k, p.beta),
    )


def digamma(x: float) -> float:
    """Digamma function for x > 0 via upward recurrence plus asymptotic series.

    The argument is shifted above 10 with psi(x) = psi(x+1) - 1/x, then the
    de Moivre series ln x - 1/(2x) - sum B_{2m}/(2m x^{2m}) is applied; the
    first neglected term is below 1e-13 at x = 10.
    """
    if x <= 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < _DIGAMMA_SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for coeff in _DIGAMMA_SERIES:
        series += coeff * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def digamma_bound(n: int) -> float:
    """Concentration-level ceiling (1/n)(1 + exp(psi(n/2 + 1) + euler_gamma))."""
    if n < 2 or n % 2 != 0:
        raise ValueError(f"n must be an even integer >= 2, got {n}")
    return (1.0 + math.exp(digamma(n / 2.0 + 1.0) + EULER_GAMMA)) / n


def weight_in_log(p: Params, tau):
    """Weight evaluated in the log-radius variable tau = ln(1/r).

    W0: tau^(beta*n/2);  W1: (1+tau)^(beta*n/2).  Vectorized over tau.
    """
    e = p.beta * p.n / 2.0
    if p.weight is Weight.W0:
        return tau**e
    return (1.0 + tau) ** e
