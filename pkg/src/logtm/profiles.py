"""Radial profile model in the log-radius variable.

A profile is a function v on (0, 1] with v(1) = 0, stored in the variable
tau = ln(1/r) (so tau = 0 is the boundary and tau -> inf is the origin).
Profiles follow the cone orientation of the admissible space: values are
non-positive and |v| is non-decreasing in tau.  All functionals use |v|, so
the sign convention never leaks into results.

Closed-form members of the four extremal families carry exact analytic
derivatives; sampled profiles are piecewise linear in tau with derivatives by
centered differences at nodes.  Norms of sampled profiles are evaluated
exactly for the piecewise-linear interpolant (cell slopes against exact
weight moments), which is also the discretization the optimizer uses.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from logtm.constants import (
    Params,
    Weight,
    critical_coefficient,
    critical_exponent,
    norm_constant,
    weight_in_log,
)
from logtm.quadrature import (
    DivergentIntegral,
    adaptive_interval,
    power_singular_zero,
    tail_ladder,
)


class Family(Enum):
    MOSER_W0 = "moser-w0"
    MOSER_W1 = "moser-w1"
    DEXP = "dexp"
    TRUNC_LOG = "trunc-log"


class ProfileKind(Enum):
    CLOSED_FORM = "closed_form"
    SAMPLED = "sampled"


class RadialProfile:
    """Common protocol: values/derivatives in tau, breakpoints, plateau info."""

    kind = ProfileKind.CLOSED_FORM

    def value_t(self, t):
        raise NotImplementedError

    def deriv_t(self, t):
        raise NotImplementedError

    def segment_points_t(self) -> tuple[float, ...]:
        """Interior tau points where quadrature panels must split."""
        return ()

    def kink_points_t(self) -> tuple[float, ...]:
        """tau points where the derivative jumps (smoothing targets)."""
        return self.segment_points_t()

    def native_grid_t(self):
        """Grid backing a sampled (or sampled-derived) profile, else None."""
        return None

    def plateau_start_t(self):
        """tau beyond which the profile is exactly constant, or None."""
        return None

    def plateau_value(self):
        p = self.plateau_start_t()
        if p is None:
            return None
        return float(np.asarray(self.value_t(np.array([p])))[0])

    # local power laws at tau -> 0+, used to peel singular quadrature weights
    def deriv_zero_power(self) -> float:
        return 0.0

    def value_zero_power(self) -> float:
        return 1.0

    def value_r(self, r):
        return self.value_t(-np.log(r))

    def deriv_r(self, r):
        # dv/dr = -(1/r) dv/dtau
        return -self.deriv_t(-np.log(r)) / r


class _FamilyProfile(RadialProfile):
    def __init__(self, family: Family, params: Params, index):
        self.family = family
        self.params = params
        self.index = index


class MoserW0Profile(_FamilyProfile):
    """Plateau-and-power family saturating the W0 norm at value 1."""

    def __init__(self, params: Params, ell: int):
        super().__init__(Family.MOSER_W0, params, ell)
        n, k, beta = params.n, params.k, params.beta
        self.gamma = critical_exponent(n, beta)
        self.alpha_crit = critical_coefficient(n, k, beta)
        self.amp = (ell / self.alpha_crit) ** (1.0 / self.gamma)
        self.bp = ell / n
        self.ell = ell

    def value_t(self, t):
        t = np.asarray(t, dtype=float)
        n, beta = self.params.n, self.params.beta
        inner = np.minimum(n * t / self.ell, 1.0)
        return -self.amp * inner ** (1.0 - beta)

    def deriv_t(self, t):
        t = np.asarray(t, dtype=float)
        n, beta = self.params.n, self.params.beta
        with np.errstate(divide="ignore", over="ignore"):
            slope = (
                -self.amp * (1.0 - beta) * (n / self.ell) * (n * t / self.ell) ** (-beta)
            )
        return np.where(t < self.bp, slope, 0.0)

    def segment_points_t(self):
        return (self.bp,)

    def plateau_start_t(self):
        return self.bp

    def deriv_zero_power(self):
        return -self.params.beta

    def value_zero_power(self):
        return 1.0 - self.params.beta


class MoserW1Profile(_FamilyProfile):
    """Shifted-log variant with unit W1 norm, defined for ell > n."""

    def __init__(self, params: Params, ell: int):
        super().__init__(Family.MOSER_W1, params, ell)
        n, k, beta = params.n, params.k, params.beta
        self.gamma = critical_exponent(n, beta)
        self.alpha_crit = critical_coefficient(n, k, beta)
        self.dpow = ell ** (1.0 - beta)
        self.npow = n ** (1.0 - beta)
        self.amp = (ell / self.alpha_crit) ** (1.0 / self.gamma) * (
            self.dpow / (self.dpow - self.npow)
        ) ** (1.0 / (k + 1))
        self.bp = ell / n - 1.0
        self.ell = ell

    def value_t(self, t):
        t = np.asarray(t, dtype=float)
        n, beta = self.params.n, self.params.beta
        arg = np.minimum(1.0 + t, self.ell / n)
        return -self.amp * ((n * arg) ** (1.0 - beta) - self.npow) / self.dpow

    def deriv_t(self, t):
        t = np.asarray(t, dtype=float)
        n, beta = self.params.n, self.params.beta
        slope = -self.amp * (1.0 - beta) * n ** (1.0 - beta) * (1.0 + t) ** (-beta) / self.dpow
        return np.where(t < self.bp, slope, 0.0)

    def segment_points_t(self):
        return (self.bp,)

    def plateau_start_t(self):
        return self.bp


class DExpProfile(_FamilyProfile):
    """Double-log family with unit W1 norm at beta = 1."""

    def __init__(self, params: Params, ell: int):
        super().__init__(Family.DEXP, params, ell)
        c_n = norm_constant(params.n, params.k)
        self.amp = (c_n * math.log(1.0 + ell)) ** (-1.0 / (params.k + 1))
        self.bp = float(ell)
        self.ell = ell

    def value_t(self, t):
        t = np.asarray(t, dtype=float)
        return -self.amp * np.log1p(np.minimum(t, self.bp))

    def deriv_t(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < self.bp, -self.amp / (1.0 + t), 0.0)

    def segment_points_t(self):
        return (self.bp,)

    def plateau_start_t(self):
        return self.bp


class TruncLogProfile(_FamilyProfile):
    """Truncated sublinear-power family; unbounded, no plateau."""

    def __init__(self, params: Params, eta: float):
        super().__init__(Family.TRUNC_LOG, params, eta)
        self.gamma = critical_exponent(params.n, params.beta)
        self.pw = 1.0 / self.gamma - eta
        self.bp = 1.0 / params.n
        self.eta = eta

    def value_t(self, t):
        t = np.asarray(t, dtype=float)
        n = self.params.n
        return np.where(t <= self.bp, -n * t, -np.maximum(n * t, 1.0) ** self.pw)

    def deriv_t(self, t):
        t = np.asarray(t, dtype=float)
        n = self.params.n
        with np.errstate(divide="ignore", over="ignore"):
            outer = -self.pw * n * np.maximum(n * t, 1e-300) ** (self.pw - 1.0)
        return np.where(t <= self.bp, -float(n), outer)

    def segment_points_t(self):
        return (self.bp,)


class SampledProfile(RadialProfile):
    """Piecewise-linear profile on a strictly increasing tau grid.

    The boundary condition pins t[0] = 0, v[0] = 0; beyond the last node the
    profile continues as a constant (plateau).
    """

    kind = ProfileKind.SAMPLED

    def __init__(self, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("t and v must be 1-d arrays of equal length")
        if len(t) < 16:
            raise ValueError("sampled profiles need at least 16 points")
        if not np.all(np.diff(t) > 0):
            raise ValueError("t must be strictly increasing")
        if t[0] != 0.0 or v[0] != 0.0:
            raise ValueError("boundary condition requires t[0] = 0 and v[0] = 0")
        self.t = t
        self.v = v

    def value_t(self, t):
        return np.interp(np.asarray(t, dtype=float), self.t, self.v)

    def deriv_t(self, t):
        # centered second-order differences at nodes, one-sided at the ends,
        # sampled back to the query points
        g = np.gradient(self.v, self.t)
        return np.interp(np.asarray(t, dtype=float), self.t, g)

    def cell_slopes(self):
        return np.diff(self.v) / np.diff(self.t)

    def native_grid_t(self):
        return self.t

    def plateau_start_t(self):
        return float(self.t[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "v"])
        for ti, vi in zip(self.t, self.v):
            writer.writerow([f"{ti:.17g}", f"{vi:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledProfile":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["t", "v"]:
            raise ValueError("sampled-profile CSV must start with header 't,v'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1])


class MappedProfile(RadialProfile):
    """Pointwise power map coeff * v |v|^excess with exact chain-rule derivative.

    With excess = 0 this is plain scalar rescaling.  Used by the exponent
    change-of-variables and for normalizing closed forms.
    """

    def __init__(self, base: RadialProfile, coeff: float, excess: float = 0.0):
        if excess < 0:
            raise ValueError("power excess must be >= 0")
        self.base = base
        self.coeff = coeff
        self.excess = excess
        self.kind = base.kind

    def value_t(self, t):
        b = np.asarray(self.base.value_t(t), dtype=float)
        if self.excess == 0.0:
            return self.coeff * b
        return self.coeff * np.sign(b) * np.abs(b) ** (1.0 + self.excess)

    def deriv_t(self, t):
        db = np.asarray(self.base.deriv_t(t), dtype=float)
        if self.excess == 0.0:
            return self.coeff * db
        b = np.abs(np.asarray(self.base.value_t(t), dtype=float))
        return self.coeff * (1.0 + self.excess) * b**self.excess * db

    def segment_points_t(self):
        return self.base.segment_points_t()

    def kink_points_t(self):
        return self.base.kink_points_t()

    def native_grid_t(self):
        return self.base.native_grid_t()

    def plateau_start_t(self):
        return self.base.plateau_start_t()

    def deriv_zero_power(self):
        return self.base.deriv_zero_power() + self.excess * self.base.value_zero_power()

    def value_zero_power(self):
        return self.base.value_zero_power() * (1.0 + self.excess)


def make_family(family: Family, params: Params, index) -> RadialProfile:
    """Closed-form family constructor with family/weight compatibility checks."""
    if not params.is_borderline:
        raise ValueError(f"extremal families require n = 2k, got n={params.n}, k={params.k}")
    if family in (Family.MOSER_W0, Family.MOSER_W1, Family.TRUNC_LOG):
        if not 0.0 <= params.beta < 1.0:
            raise ValueError(f"{family.value} requires beta in [0,1), got {params.beta}")
    if family is Family.MOSER_W0:
        if params.weight is not Weight.W0:
            raise ValueError("moser-w0 is a W0-weight family")
        ell = _check_ell(index, 1)
        return MoserW0Profile(params, ell)
    if family is Family.MOSER_W1:
        if params.weight is not Weight.W1:
            raise ValueError("moser-w1 is a W1-weight family")
        ell = _check_ell(index, params.n + 1)
        return MoserW1Profile(params, ell)
    if family is Family.DEXP:
        if params.weight is not Weight.W1 or params.beta != 1.0:
            raise ValueError("dexp requires the W1 weight at beta = 1")
        ell = _check_ell(index, 1)
        return DExpProfile(params, ell)
    if family is Family.TRUNC_LOG:
        eta = float(index)
        gamma = critical_exponent(params.n, params.beta)
        if not 0.0 < eta < 1.0 / gamma:
            raise ValueError(f"trunc-log needs eta in (0, {1.0 / gamma:.4g}), got {eta}")
        return TruncLogProfile(params, eta)
    raise ValueError(f"unknown family {family!r}")


def _check_ell(index, minimum: int) -> int:
    ell = int(index)
    if ell != index or ell < minimum:
        raise ValueError(f"family index must be an integer >= {minimum}, got {index!r}")
    return ell


# ----------------------------------------------------------------------------
# norms and functionals


def weighted_norm(v: RadialProfile, p: Params, rel_tol: float = 1e-9) -> float:
    """Weighted Dirichlet-type norm (c_n int r^(n-k) |v'|^(k+1) w dr)^(1/(k+1)).

    Sampled profiles are integrated exactly for the piecewise-linear
    interpolant; closed forms go through adaptive quadrature with panels split
    at the family breakpoints.  Divergent instances raise DivergentIntegral.
    """
    c_n = norm_constant(p.n, p.k)
    kp1 = p.k + 1
    if isinstance(v, SampledProfile):
        slopes = np.abs(v.cell_slopes()) ** kp1
        moments = _cell_weight_moments(v.t, p)
        return float(c_n * np.dot(slopes, moments)) ** (1.0 / kp1)

    decay = p.n - 2 * p.k
    grid = v.native_grid_t()
    if grid is not None:
        # grid-backed derived profile: per-cell Gauss panels split at the
        # native nodes (the derivative is smooth within each cell)
        def cell_integrand(t):
            return (
                np.exp(-decay * t)
                * weight_in_log(p, t)
                * np.abs(np.asarray(v.deriv_t(t), dtype=float)) ** kp1
            )

        total = c_n * _cellwise_integral(cell_integrand, grid)
        return max(total, 0.0) ** (1.0 / kp1)

    def integrand(t):
        return c_n * np.exp(-decay * t) * weight_in_log(p, t) * np.abs(v.deriv_t(t)) ** kp1

    s = v.deriv_zero_power() * kp1 + (p.beta * p.n / 2.0 if p.weight is Weight.W0 else 0.0)
    total, hints = 0.0, sorted(v.segment_points_t())
    first = min(hints[0] if hints else 1.0, 1.0)
    if s != 0.0:

        def peeled(t):
            return integrand(t) / t**s

        val, _, _ = power_singular_zero(peeled, s, first, rel_tol)
    else:
        val, _, _ = adaptive_interval(integrand, 0.0, first, rel_tol)
    total += val
    last = first
    for h in hints:
        if h > last:
            val, _, _ = adaptive_interval(integrand, last, h, rel_tol * max(total, 1e-300))
            total += val
            last = h
    plateau = v.plateau_start_t()
    if plateau is None:
        val, _, _ = tail_ladder(integrand, last, rel_tol)
        total += val
    elif plateau > last:
        val, _, _ = adaptive_interval(integrand, last, plateau, rel_tol * max(total, 1e-300))
        total += val
    return total ** (1.0 / kp1)


def _cell_weight_moments(t, p: Params):
    """Exact integrals of e^(-(n-2k)tau) w(tau) over the grid cells."""
    e = p.beta * p.n / 2.0
    decay = p.n - 2 * p.k
    if decay == 0:
        if p.weight is Weight.W0:
            if e == -1.0:
                raise DivergentIntegral("weight exponent -1 is non-integrable at tau=0")
            prim = t ** (e + 1.0) / (e + 1.0)
        else:
            prim = (1.0 + t) ** (e + 1.0) / (e + 1.0)
        return np.diff(prim)
    # non-borderline: fall back to per-cell Gauss panels
    xg, wg = np.polynomial.legendre.leggauss(8)
    a, b = t[:-1], t[1:]
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    tt = mid[:, None] + half[:, None] * xg[None, :]
    vals = np.exp(-decay * tt) * weight_in_log(p, tt)
    return half * (vals @ wg)


def moser_functional(
    v: RadialProfile, alpha: float, gamma: float, n: int, rel_tol: float = 1e-9
) -> float:
    """Exponential functional int_0^1 r^(n-1) exp(alpha |v|^gamma) dr.

    Divergence is a legitimate outcome and is reported as math.inf.
    """
    if alpha <= 0 or gamma <= 1:
        raise ValueError(f"need alpha > 0 and gamma > 1, got alpha={alpha}, gamma={gamma}")
    return _exp_functional(v, n, rel_tol, lambda m: alpha * m**gamma)


def double_exp_functional(v: RadialProfile, a: float, n: int, rel_tol: float = 1e-9) -> float:
    """Double-exponential functional int_0^1 r^(n-1) exp(a e^(c_n^(2/n)|v|^((n+2)/n))) dr."""
    if a <= 0:
        raise ValueError(f"need a > 0, got {a}")
    if n % 2 != 0:
        raise ValueError("double-exponential regime needs k = n/2, so n even")
    c_pow = norm_constant(n, n // 2) ** (2.0 / n)

    def exponent(m):
        return a * np.exp(c_pow * m ** ((n + 2.0) / n))

    return _exp_functional(v, n, rel_tol, exponent)


def _exp_functional(v: RadialProfile, n: int, rel_tol: float, exponent_of_mag) -> float:
    def integrand(t):
        t = np.asarray(t, dtype=float)
        m = np.abs(v.value_t(t))
        return np.exp(exponent_of_mag(m) - n * t)

    grid = v.native_grid_t() if not isinstance(v, SampledProfile) else v.t
    if grid is not None:
        total = _cellwise_integral(integrand, grid)
        covered = float(grid[-1])
    else:
        total, covered = 0.0, 0.0
        for h in sorted(v.segment_points_t()):
            if h > covered:
                val, _, _ = adaptive_interval(integrand, covered, h, rel_tol * max(total, 1.0))
                total += val
                covered = h
    if not math.isfinite(total):
        return math.inf

    plateau = v.plateau_start_t()
    if plateau is not None:
        if plateau > covered:
            val, _, _ = adaptive_interval(integrand, covered, plateau, rel_tol * max(total, 1.0))
            total += val
            covered = plateau
        mag = abs(v.plateau_value())
        tail = math.exp(float(np.asarray(exponent_of_mag(np.array([mag])))[0]) - n * covered) / n
        total += tail
    else:
        try:
            val, _, _ = tail_ladder(integrand, covered, rel_tol)
        except DivergentIntegral:
            return math.inf
        total += val
    return total if math.isfinite(total) else math.inf


def _cellwise_integral(g, t):
    xg, wg = np.polynomial.legendre.leggauss(8)
    a, b = t[:-1], t[1:]
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    tt = mid[:, None] + half[:, None] * xg[None, :]
    with np.errstate(over="ignore"):
        vals = g(tt.ravel()).reshape(tt.shape)
    return float(np.dot(half, vals @ wg))


# ----------------------------------------------------------------------------
# radial pointwise bounds


@dataclass(frozen=True)
class RadialBoundReport:
    max_ratio: float
    worst_r: float
    norm: float


def radial_bound_check(v: RadialProfile, p: Params, grid_size: int = 512) -> RadialBoundReport:
    """Max over an r-grid of |v(r)| / bound(r) for the pointwise radial bound.

    The bound is the closed-form norm-weighted envelope; the contract for
    unit-norm profiles is a ratio <= 1 + 1e-6, saturated by the W0 plateau
    family exactly at its breakpoint.
    """
    nrm = weighted_norm(v, p)
    if nrm == 0.0:
        return RadialBoundReport(max_ratio=0.0, worst_r=1.0, norm=0.0)
    span = max([1.0, *(2.0 * b for b in v.segment_points_t())])
    if v.plateau_start_t() is not None:
        span = max(span, 1.5 * v.plateau_start_t())
    if isinstance(v, SampledProfile):
        span = float(v.t[-1])
    taus = np.geomspace(1e-6, span, grid_size)
    taus = np.unique(np.concatenate((taus, [b for b in v.segment_points_t() if b <= span])))
    mags = np.abs(v.value_t(taus))
    bounds = _radial_envelope(taus, p) * nrm
    ratio = mags / bounds
    i = int(np.argmax(ratio))
    return RadialBoundReport(
        max_ratio=float(ratio[i]), worst_r=float(np.exp(-taus[i])), norm=nrm
    )


def _radial_envelope(taus, p: Params):
    n, k, beta = p.n, p.k, p.beta
    c_n = norm_constant(n, k)
    frac = n / (n + 2.0)
    if p.weight is Weight.W0:
        if beta >= 1.0:
            raise ValueError("W0 envelope requires beta < 1")
        return taus ** ((1.0 - beta) * frac) / (
            c_n ** (2.0 / (n + 2.0)) * (1.0 - beta) ** frac
        )
    if beta == 1.0:
        return np.log1p(taus) ** frac / c_n ** (2.0 / (n + 2.0))
    return np.abs((1.0 + taus) ** (1.0 - beta) - 1.0) ** frac / (
        c_n ** (2.0 / (n + 2.0)) * abs(1.0 - beta) ** frac
    )


# ----------------------------------------------------------------------------
# transport to the half-line variable


@dataclass(frozen=True)
class TransportPair:
    v: RadialProfile
    psi: "TransportedProfile"
    alpha_ratio: float


class TransportedProfile:
    """psi(t) = K |v(r)| under t = n ln(1/r); non-negative, psi(0) = 0."""

    def __init__(self, v: RadialProfile, p: Params):
        n, k, beta = p.n, p.k, p.beta
        frac = n / (n + 2.0)
        self.scale = (
            norm_constant(n, k) ** (2.0 / (n + 2.0))
            * n ** (frac * (1.0 - beta))
            * (1.0 - beta) ** frac
        )
        self.v = v
        self.n = n

    def value(self, t):
        return self.scale * np.abs(self.v.value_t(np.asarray(t, dtype=float) / self.n))

    def deriv(self, t):
        # profiles are non-positive with |v| non-decreasing, so d|v|/dtau = -v'
        return -self.scale * self.v.deriv_t(np.asarray(t, dtype=float) / self.n) / self.n

    def segment_points(self):
        return tuple(self.n * b for b in self.v.segment_points_t())

    def plateau_start(self):
        p = self.v.plateau_start_t()
        return None if p is None else self.n * p


@dataclass(frozen=True)
class TransportReport:
    norm_lhs: float
    norm_rhs: float
    norm_residual: float
    functional_lhs: float
    functional_rhs_halfline: float
    measured_factor: float
    functional_residual: float
    psi_power_max_gap: float


def transport(v: RadialProfile, p: Params, alpha: float) -> TransportPair:
    """Pair a profile with its half-line transport; W0 weight, beta in [0,1)."""
    if p.weight is not Weight.W0 or not 0.0 <= p.beta < 1.0:
        raise ValueError("transport is defined for the W0 weight with beta in [0,1)")
    alpha_ratio = alpha / critical_coefficient(p.n, p.k, p.beta)
    return TransportPair(v=v, psi=TransportedProfile(v, p), alpha_ratio=alpha_ratio)


def verify_transport(tp: TransportPair, p: Params, rel_tol: float = 1e-9) -> TransportReport:
    """Independent quadratures of both sides of the transport identities.

    The functional identity is normalized by the measured factor: the r-side
    integral equals (1/n) times the half-line integral, and the residual is
    reported against that convention.  The norm identity carries no factor.
    """
    n, k, beta = p.n, p.k, p.beta
    gamma = critical_exponent(n, beta)
    kp1 = k + 1
    psi = tp.psi

    norm_lhs = weighted_norm(tp.v, p, rel_tol) ** kp1

    def norm_integrand(t):
        return t ** (beta * n / 2.0) * np.abs(psi.deriv(t)) ** kp1

    def func_integrand(t):
        return np.exp(tp.alpha_ratio * psi.value(t) ** gamma - t)

    grid = tp.v.native_grid_t()
    plateau = psi.plateau_start()
    if grid is not None:
        # grid-backed profile: transport the piecewise-linear semantics
        # exactly; the half-line grid is the native one scaled by n
        t_grid = n * np.asarray(grid, dtype=float)
        slopes = np.abs(np.diff(psi.value(t_grid))) / np.diff(t_grid)
        e = beta * n / 2.0
        moments = (t_grid[1:] ** (e + 1.0) - t_grid[:-1] ** (e + 1.0)) / (e + 1.0)
        rhs = float(np.dot(slopes**kp1, moments))
        total = _cellwise_integral(func_integrand, t_grid)
        mag = float(psi.value(np.array([t_grid[-1]]))[0])
        total += math.exp(tp.alpha_ratio * mag**gamma - t_grid[-1])
    else:
        pieces = sorted(psi.segment_points())
        if plateau is not None and (not pieces or plateau > pieces[-1]):
            pieces.append(plateau)

        first = min(pieces[0] if pieces else 1.0, 1.0)
        s_pow = tp.v.deriv_zero_power() * kp1 + beta * n / 2.0
        if s_pow != 0.0:
            val, _, _ = power_singular_zero(
                lambda t: norm_integrand(t) / t**s_pow, s_pow, first, rel_tol
            )
        else:
            val, _, _ = adaptive_interval(norm_integrand, 0.0, first, rel_tol)
        rhs = val
        covered = first
        for h in pieces:
            if h > covered:
                v2, _, _ = adaptive_interval(
                    norm_integrand, covered, h, rel_tol * max(rhs, 1e-300)
                )
                rhs += v2
                covered = h
        if plateau is None:
            v2, _, _ = tail_ladder(norm_integrand, covered, rel_tol)
            rhs += v2

        total, covered = 0.0, 0.0
        for h in pieces:
            if h > covered:
                v2, _, _ = adaptive_interval(
                    func_integrand, covered, h, rel_tol * max(total, 1.0)
                )
                total += v2
                covered = h
        if plateau is not None:
            mag = float(psi.value(np.array([plateau]))[0])
            total += math.exp(tp.alpha_ratio * mag**gamma - covered)
        else:
            v2, _, _ = tail_ladder(func_integrand, covered, rel_tol)
            total += v2

    norm_rhs = rhs / (1.0 - beta) ** (n / 2.0)
    functional_lhs = moser_functional(
        tp.v, tp.alpha_ratio * critical_coefficient(n, k, beta), gamma, n, rel_tol
    )
    functional_rhs = total

    span = max(plateau or 0.0, *(psi.segment_points() or (1.0,)), 50.0)
    check_grid = np.geomspace(1e-8, span, 2048)
    gap = float(np.max(psi.value(check_grid) ** gamma - check_grid))

    return TransportReport(
        norm_lhs=norm_lhs,
        norm_rhs=norm_rhs,
        norm_residual=abs(norm_lhs - norm_rhs),
        functional_lhs=functional_lhs,
        functional_rhs_halfline=functional_rhs,
        measured_factor=functional_lhs / functional_rhs,
        functional_residual=abs(functional_lhs - functional_rhs / n),
        psi_power_max_gap=gap,
    )


# ----------------------------------------------------------------------------
# serialization


def profile_to_json_dict(v: RadialProfile) -> dict:
    if isinstance(v, _FamilyProfile):
        return {
            "family": v.family.value,
            "index": v.index,
            "params": {
                "n": v.params.n,
                "k": v.params.k,
                "beta": v.params.beta,
                "weight": v.params.weight.value,
            },
        }
    raise TypeError("only closed-form family profiles serialize to JSON; use CSV for sampled")


def profile_from_json_dict(d: dict) -> RadialProfile:
    p = d["params"]
    params = Params(int(p["n"]), int(p["k"]), float(p["beta"]), Weight(p["weight"]))
    return make_family(Family(d["family"]), params, d["index"])
