"""Weighted singular quadrature on (0,1) and (0,inf), plus incomplete gammas.

Every integral over (0,1) with an r^a (log 1/r)^b weight is pushed through the
substitution t = ln(1/r), which turns the r = 0 endpoint into exponential
decay on (0, inf) and the r = 1 endpoint into a second exponential-decay
half-line after one more log substitution.  Both half-lines are handled by the
same truncation ladder: windows double until the tail estimate drops below
tolerance, and a non-integrable instance is recognized by window increments
that refuse to shrink.

Within a window, panels are order-32 Gauss-Legendre with dyadic adaptive
splitting driven by a whole-versus-halves error estimate.  Panel order and
summation order are fixed, so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

GL_ORDER = 32
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)

_LADDER_START = 32.0
_MAX_DOUBLINGS = 24
_MAX_PANEL_DEPTH = 48


class DivergentIntegral(ArithmeticError):
    """Raised when an integral is recognized as non-integrable."""


class LogKind(Enum):
    LOG_ONE_OVER_R = "log(1/r)"
    LOG_E_OVER_R = "log(e/r)"


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    panels_used: int

    def __post_init__(self):
        if self.abs_error_estimate < 0 or self.panels_used < 1:
            raise ValueError("malformed QuadResult")


@dataclass(frozen=True)
class WeightedIntegrand:
    """Integral of f(r) * r^a * (log factor)^b over ``support`` within (0,1).

    ``f`` must accept numpy arrays.  Integrability is the caller's problem:
    a divergent instance raises DivergentIntegral, it is never hidden.
    """

    f: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    logkind: LogKind = LogKind.LOG_ONE_OVER_R
    support: tuple[float, float] = (0.0, 1.0)


# ----------------------------------------------------------------------------
# panel machinery


def _gl_panel(g, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        # overflow is allowed to surface as inf: the ladder reads it as divergence
        return half * float(np.dot(_GL_W, g(mid + half * _GL_X)))


def adaptive_interval(g, a: float, b: float, tol: float, max_depth: int = _MAX_PANEL_DEPTH):
    """Adaptive GL-32 integral of g over [a, b] with absolute tolerance tol.

    Returns (value, error_estimate, panels_used).  Worst-error panel is split
    first; panels are re-summed left-to-right pairwise for determinism.
    """
    if not b > a:
        return 0.0, 0.0, 1
    whole = _gl_panel(g, a, b)
    # (left_endpoint, right_endpoint, value, err, depth)
    mid = 0.5 * (a + b)
    l, r = _gl_panel(g, a, mid), _gl_panel(g, mid, b)
    if math.isnan(l) or math.isnan(r):
        raise DivergentIntegral(f"integrand produced non-finite values on [{a:g}, {b:g}]")
    err = abs(whole - (l + r))
    segs = [(a, mid, l, err / 2, 1), (mid, b, r, err / 2, 1)]
    panels = 3
    while True:
        total_err = sum(s[3] for s in segs)
        # the absolute target, or full relative accuracy against the running
        # sum (protects callers whose scale guess undershoots wildly)
        if total_err <= max(tol, 1e-11 * abs(sum(s[2] for s in segs))) or len(segs) > 4000:
            break
        # split the worst panel (ties broken by position for determinism)
        worst = max(range(len(segs)), key=lambda i: (segs[i][3], -segs[i][0]))
        a0, b0, v0, _, d0 = segs[worst]
        if d0 >= max_depth or (b0 - a0) <= abs(a0) * 1e-15 + 1e-300:
            # cannot refine further; freeze this panel's error
            segs[worst] = (a0, b0, v0, 0.0, d0)
            continue
        m0 = 0.5 * (a0 + b0)
        lv, rv = _gl_panel(g, a0, m0), _gl_panel(g, m0, b0)
        if math.isnan(lv) or math.isnan(rv):
            raise DivergentIntegral(
                f"integrand produced non-finite values on [{a0:g}, {b0:g}]"
            )
        e0 = abs(v0 - (lv + rv))
        segs[worst : worst + 1] = [(a0, m0, lv, e0 / 2, d0 + 1), (m0, b0, rv, e0 / 2, d0 + 1)]
        panels += 2
    segs.sort(key=lambda s: s[0])
    value = _pairwise_sum([s[2] for s in segs])
    return value, max(total_err, 1e-18 * abs(value)), panels


def _pairwise_sum(vals):
    vals = list(vals)
    if not vals:
        return 0.0
    while len(vals) > 1:
        vals = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)] + (
            [vals[-1]] if len(vals) % 2 else []
        )
    return vals[0]


def tail_ladder(g, t0: float, rel_tol: float, t_start: float = _LADDER_START):
    """Integral of g over [t0, inf) by window doubling.

    Convergence: last window increment and the endpoint tail estimate
    |g(T)|*T both fall below rel_tol * |total|.  Divergence: increments stay
    significant and refuse to decrease across three successive doublings
    (covers slow power growth; the factor >= 1.5 blow-up case is subsumed).
    """
    T = t_start
    while T <= t0 * 2:
        T *= 2
    value, err, panels = adaptive_interval(g, t0, T, rel_tol)
    increments = []
    for _ in range(_MAX_DOUBLINGS):
        scale = max(abs(value), 1e-300)
        tail_probe = abs(float(g(np.array([T]))[0])) * T
        if tail_probe <= rel_tol * scale and (
            not increments or abs(increments[-1]) <= rel_tol * scale
        ):
            return value, err + tail_probe, panels
        inc, e2, p2 = adaptive_interval(g, T, 2 * T, rel_tol * scale)
        increments.append(inc)
        value += inc
        err += e2
        panels += p2
        T *= 2
        if not math.isfinite(value):
            raise DivergentIntegral("integrand overflow during truncation ladder")
        if len(increments) >= 3:
            a1, a2, a3 = increments[-3:]
            growing = a3 >= a2 * (1 - 1e-9) and a2 >= a1 * (1 - 1e-9)
            significant = a1 > rel_tol * max(abs(value), 1e-300)
            if growing and significant and a1 > 0:
                raise DivergentIntegral(
                    f"partial integrals keep growing at truncation T={T:g}"
                )
    # ladder exhausted without a divergence signature: report honestly
    tail_probe = abs(float(g(np.array([T]))[0])) * T
    last = abs(increments[-1]) if increments else 0.0
    return value, err + tail_probe + last, panels


def power_singular_zero(S, p: float, upper: float, rel_tol: float):
    """Integral of tau^p * S(tau) over (0, upper] with S smooth at 0.

    Uses tau = exp(-y); the weight becomes exp(-(p+1)y) analytically, so no
    underflow occurs and p <= -1 is detected as divergence by the ladder.
    S is evaluated no deeper than tau = upper * e^-120: by the smoothness
    contract it is constant there, and the floor keeps power-law factors
    inside S representable in double precision.
    """
    if upper <= 0:
        return 0.0, 0.0, 1

    def h(y):
        tau = np.exp(np.maximum(-y, -120.0))
        return S(tau * upper) * np.exp(-(p + 1.0) * y)

    v, e, n = tail_ladder(h, 0.0, rel_tol, t_start=_LADDER_START)
    scale = upper ** (p + 1.0)
    return v * scale, e * scale, n


# ----------------------------------------------------------------------------
# the public weighted integral


def integrate_weighted(w: WeightedIntegrand, rel_tol: float) -> QuadResult:
    """Adaptive integral of f(r) r^a (log)^b dr over the support interval.

    Raises DivergentIntegral for non-integrable instances.  Accuracy target is
    max(rel_tol * |value|, 1e-15) on integrands that are bounded on compact
    subsets of (0,1).
    """
    if not (1e-14 < rel_tol < 1e-2):
        raise ValueError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")
    lo, hi = w.support
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"support must satisfy 0 <= lo < hi <= 1, got {w.support}")
    f, a, b = w.f, w.a, w.b
    log_one = w.logkind is LogKind.LOG_ONE_OVER_R

    def G(t):
        lam = t if log_one else 1.0 + t
        return f(np.exp(-t)) * np.exp(-(a + 1.0) * t) * lam**b

    t_lo = -math.log(hi) if hi < 1.0 else 0.0
    t_hi = math.inf if lo == 0.0 else -math.log(lo)

    value, err, panels = 0.0, 0.0, 0
    start = t_lo
    if t_lo == 0.0:
        # r = 1 endpoint: one more log substitution, t = exp(-y)
        split = min(1.0, t_hi)

        def h(y):
            t = np.exp(-y)
            r = np.exp(-t)
            if log_one:
                weight = np.exp(-(b + 1.0) * y)
            else:
                weight = (1.0 + t) ** b * np.exp(-y)
            return f(r) * np.exp(-(a + 1.0) * t) * weight

        v1, e1, p1 = tail_ladder(h, math.log(1.0 / split), rel_tol)
        value += v1
        err += e1
        panels += p1
        start = split

    if t_hi > start:
        if math.isinf(t_hi):
            v2, e2, p2 = tail_ladder(G, start, rel_tol)
        else:
            v2, e2, p2 = adaptive_interval(
                G, start, t_hi, rel_tol * max(abs(value), 1.0) * 0.5
            )
            # re-run with a scale-aware tolerance if the first pass dominated
            if abs(v2) > 2.0 * max(abs(value), 1.0):
                v2, e2, p2 = adaptive_interval(G, start, t_hi, rel_tol * abs(v2) * 0.5)
        value += v2
        err += e2
        panels += p2

    return QuadResult(value=value, abs_error_estimate=err, panels_used=max(panels, 1))


# ----------------------------------------------------------------------------
# incomplete gamma family (section-2 asymptotics helpers)


def _gamma_upper_cf(eta: float, y: float) -> float:
    # Legendre continued fraction, modified Lentz
    tiny = 1e-300
    b = y + 1.0 - eta
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, 600):
        an = -i * (i - eta)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-y + eta * math.log(y)) * h


def _e1_small(y: float) -> float:
    # E1(y) = -gamma - ln y - sum_{k>=1} (-y)^k / (k k!), for 0 < y <= 2
    s = -0.57721566490153286060651209008240243 - math.log(y)
    term = 1.0
    for k in range(1, 200):
        term *= -y / k
        s -= term / k
        if abs(term / k) < 1e-18 * max(abs(s), 1.0):
            break
    return s


def gamma_upper(eta: float, y: float) -> float:
    """Upper incomplete gamma: integral of t^(eta-1) e^(-t) over (y, inf).

    Accepts any real eta for y > 0; y = 0 requires eta > 0 (else divergent).
    """
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if y == 0.0:
        if eta <= 0:
            raise ValueError("gamma_upper(eta, 0) diverges for eta <= 0")
        return math.gamma(eta)
    if y >= max(2.0, eta + 2.0):
        return _gamma_upper_cf(eta, y)
    if eta > 0:
        return math.gamma(eta) - gamma_lower(eta, y)
    if eta == math.floor(eta):
        # non-positive integer eta: start from E1 and recurse down
        g = _e1_small(y) if y <= 2.0 else _gamma_upper_cf(0.0, y)
        s = 0.0
        for _ in range(int(-eta)):
            s -= 1.0
            g = (g - y**s * math.exp(-y)) / s
        return g
    # negative non-integer eta, small y: gamma(eta) minus the lower power series
    # sum_k (-y)^k / (k! (eta + k)), which extends gamma_lower below eta = 0
    s = 0.0
    c = 1.0  # (-y)^k / k!
    k = 0
    while k < 400:
        s += c / (eta + k)
        k += 1
        c *= -y / k
        if abs(c / (eta + k)) < 1e-18 * max(abs(s), 1.0):
            s += c / (eta + k)
            break
    return math.gamma(eta) - y**eta * s


def gamma_lower(eta: float, y: float) -> float:
    """Lower incomplete gamma: integral of t^(eta-1) e^(-t) over (0, y); eta > 0."""
    if eta <= 0:
        raise ValueError(f"gamma_lower requires eta > 0, got {eta}")
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if y == 0.0:
        return 0.0
    if y > eta + 1.0:
        return math.gamma(eta) - _gamma_upper_cf(eta, y)
    # Kummer-style series: y^eta e^-y sum_k y^k / (eta (eta+1) ... (eta+k))
    s = 1.0 / eta
    term = s
    k = 0
    while k < 10000:
        k += 1
        term *= y / (eta + k)
        s += term
        if term < 1e-18 * s:
            break
    return math.exp(eta * math.log(y) - y) * s


def h_exp(eta: float, y: float) -> float:
    """Integral of t^(eta-1) e^(+t) over (0, y); eta > 0, y >= 0.

    All series terms are positive, so the sum is cancellation-free; terms are
    assembled in log space to dodge intermediate overflow.
    """
    if eta <= 0:
        raise ValueError(f"h_exp requires eta > 0, got {eta}")
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if y == 0.0:
        return 0.0
    ln_y = math.log(y)
    total = 0.0
    k = 0
    while k < 100000:
        ln_term = (eta + k) * ln_y - math.lgamma(k + 1) - math.log(eta + k)
        term = math.exp(ln_term)
        total += term
        if k > y and term < 1e-18 * total:
            break
        k += 1
    return total
