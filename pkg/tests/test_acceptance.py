"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the
summary lines in a passing run).  Tolerances are pinned here, not deferred.
"""

import math

import numpy as np
import pytest

from conftest import random_unit_profile
from logtm.admissibility import check_admissible
from logtm.constants import (
    Params,
    Weight,
    critical_coefficient,
    critical_exponent,
    digamma_bound,
)
from logtm.hardy import (
    Classification,
    HardyLogKind,
    HardyQuery,
    HessianHardyQuery,
    decide,
    decide_hessian,
    numeric_criterion,
)
from logtm.optimizer import MaximizerProblem, beta_change, maximize
from logtm.profiles import (
    Family,
    SampledProfile,
    double_exp_functional,
    make_family,
    moser_functional,
    radial_bound_check,
    transport,
    verify_transport,
    weighted_norm,
)


def _report(num, name, detail=""):
    print(f"ACCEPTANCE {num:02d} {name}: PASS  {detail}")


def w0(n, beta):
    return Params(n, n // 2, beta, Weight.W0)


def w1(n, beta):
    return Params(n, n // 2, beta, Weight.W1)


def test_criterion_01_constants():
    """alpha_crit closed forms at 1e-12 relative accuracy."""
    from logtm.constants import compute_constants

    c2 = compute_constants(Params(2, 1, 0.0))
    c4 = compute_constants(Params(4, 2, 0.0))
    assert abs(c2.alpha_crit / (4 * math.pi) - 1) <= 1e-12
    assert abs(c4.alpha_crit / (4 * math.sqrt(3.0) * math.pi) - 1) <= 1e-12
    _report(1, "constants", f"alpha_crit(2)={c2.alpha_crit:.12f}")


def test_criterion_02_unit_norm_families():
    """All three explicit families sit on the unit sphere to 1e-7."""
    worst = 0.0
    for n in (2, 4, 6):
        for beta in (0.0, 0.25, 0.5, 0.75):
            p0, p1 = w0(n, beta), w1(n, beta)
            for ell in range(1, 21):
                worst = max(worst, abs(weighted_norm(make_family(Family.MOSER_W0, p0, ell), p0) - 1))
            for ell in range(n + 1, n + 11):
                worst = max(worst, abs(weighted_norm(make_family(Family.MOSER_W1, p1, ell), p1) - 1))
        pd = w1(n, 1.0)
        for ell in range(1, 21):
            worst = max(worst, abs(weighted_norm(make_family(Family.DEXP, pd, ell), pd) - 1))
    assert worst <= 1e-7, worst
    _report(2, "unit-norm families", f"worst deviation {worst:.2e}")


def test_criterion_03_critical_uniform_bound():
    """Random unit-sphere profiles: finite at critical, 1/(1-abar) below it."""
    rng = np.random.default_rng(31415)
    worst_crit, worst_sub = 0.0, 0.0
    for i in range(100):
        n = 2
        beta = (0.0, 0.25, 0.5)[i % 3]
        p = w0(n, beta)
        v = random_unit_profile(rng, p)
        gamma = critical_exponent(n, beta)
        alpha = critical_coefficient(n, n // 2, beta)
        at_crit = moser_functional(v, alpha, gamma, n)
        assert math.isfinite(at_crit)
        assert at_crit < 10.0 * digamma_bound(n)
        worst_crit = max(worst_crit, at_crit)
        sub = moser_functional(v, 0.9 * alpha, gamma, n)
        assert sub <= (1.0 / n) / (1.0 - 0.9) + 1e-3
        worst_sub = max(worst_sub, sub)
    _report(3, "critical uniform bound", f"max J_crit={worst_crit:.4f} max J_0.9={worst_sub:.4f}")


def test_criterion_04_sharpness_blowup():
    """Supercritical coefficient: growth along the families above the floors."""
    n, k, beta = 2, 1, 0.25
    gamma = critical_exponent(n, beta)
    alpha = 1.05 * critical_coefficient(n, k, beta)

    p0 = w0(n, beta)
    prev = 0.0
    for ell in range(1, 31):
        J = moser_functional(make_family(Family.MOSER_W0, p0, ell), alpha, gamma, n)
        assert J > prev, f"W0 not increasing at ell={ell}"
        assert J >= math.exp(0.05 * ell) / n, f"W0 below floor at ell={ell}"
        prev = J

    # the shifted-log family starts its blow-up once 1.05 * D_ell > 1; floors
    # hold everywhere, strict growth on a 30-index window past the threshold
    p1 = w1(n, beta)

    def shrink(ell):
        return ((ell ** (1 - beta) - n ** (1 - beta)) / ell ** (1 - beta)) ** (
            k * gamma / (k + 1)
        )

    for ell in range(n + 1, n + 31):
        J = moser_functional(make_family(Family.MOSER_W1, p1, ell), alpha, gamma, n)
        floor = math.exp(n) / n * math.exp(ell * (1.05 * shrink(ell) - 1.0))
        assert J >= floor, f"W1 below floor at ell={ell}"
    thr = next(ell for ell in range(n + 1, 10_000) if 1.05 * shrink(ell) > 1.0)
    prev = 0.0
    for ell in range(thr, thr + 31):
        J = moser_functional(make_family(Family.MOSER_W1, p1, ell), alpha, gamma, n)
        floor = math.exp(n) / n * math.exp(ell * (1.05 * shrink(ell) - 1.0))
        assert J > prev and J >= floor, f"W1 tail not growing at ell={ell}"
        prev = J

    pd = w1(n, 1.0)
    a = 1.05 * n
    prev = 0.0
    for ell in range(1, 31):
        J = double_exp_functional(make_family(Family.DEXP, pd, ell), a, n)
        assert J > prev, f"DEXP not increasing at ell={ell}"
        assert J >= math.exp(a) / n * math.exp(ell * (a - n)), f"DEXP below floor at ell={ell}"
        prev = J
    _report(4, "sharpness blow-up", f"W1 threshold ell={thr}")


def test_criterion_05_supercritical_divergence():
    """Exponent 5 percent above critical on the truncated family diverges."""
    for n, beta in ((2, 0.0), (2, 0.25), (4, 0.0)):
        gamma = critical_exponent(n, beta)
        eps = 0.05 * gamma
        eta = eps / gamma / (2.0 * (eps + gamma))  # keeps the defect positive
        v = make_family(Family.TRUNC_LOG, w1(n, beta), eta)
        val = moser_functional(v, 1.0, gamma + eps, n)
        assert math.isinf(val), (n, beta)
    _report(5, "supercritical divergence", "all scanned pairs diverge")


def test_criterion_06_hardy_cross_validation():
    """decide() vs numeric_criterion() on the 200-tuple grid; routing identity."""
    rng = np.random.default_rng(987654321)
    kinds = [HardyLogKind.LOG_R_OVER_T, HardyLogKind.LOG_ER_OVER_T]
    agree = disagree = undecided = 0
    for i in range(200):
        q = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        hq = HardyQuery(
            lhs_power=float(rng.uniform(-0.9, 3.0)),
            theta=float(rng.uniform(-3.0, 1.0)),
            nu=float(rng.uniform(-1.0, q + 1.0)),
            mu=float(rng.uniform(-2.0, q)),
            p=float(rng.choice([1.0, 1.5, 2.0, 3.0])),
            q=q,
            logkind=kinds[i % 2],
        )
        cls = numeric_criterion(hq)
        if cls is Classification.UNDECIDED:
            undecided += 1
            continue
        expected = Classification.FINITE if decide(hq).holds else Classification.INFINITE
        if cls is expected:
            agree += 1
        else:
            disagree += 1
    assert disagree == 0, f"{disagree} disagreements"
    assert undecided < 0.15 * 200, f"undecided rate {undecided/200:.1%}"

    rng2 = np.random.default_rng(24680)
    for i in range(500):
        hhq = HessianHardyQuery(
            alpha=float(rng2.uniform(-0.9, 3.0)),
            beta=float(rng2.uniform(-1.0, 2.0)),
            n=float(rng2.uniform(-2.0, 8.0)),
            k=float(rng2.choice([0.0, 0.5, 1.0, 2.0, 3.0])),
            p=float(rng2.choice([1.0, 1.5, 2.0, 3.0])),
            weight=Weight.W0 if i % 2 == 0 else Weight.W1,
        )
        assert decide_hessian(hhq).holds == decide(hhq.to_hardy_query()).holds, hhq
    _report(6, "hardy cross-validation", f"agree={agree} undecided={undecided}/200")


def test_criterion_07_radial_bounds():
    """Pointwise envelope ratio <= 1 + 1e-6, saturated by the plateau family."""
    worst = 0.0
    for n in (2, 4):
        for beta in (0.0, 0.5):
            p0 = w0(n, beta)
            for ell in (1, 3, 10, 20):
                rep = radial_bound_check(make_family(Family.MOSER_W0, p0, ell), p0)
                worst = max(worst, rep.max_ratio)
                assert rep.max_ratio <= 1.0 + 1e-6
            p1 = w1(n, beta)
            for ell in (n + 1, n + 8):
                rep = radial_bound_check(make_family(Family.MOSER_W1, p1, ell), p1)
                assert rep.max_ratio <= 1.0 + 1e-6
        pd = w1(n, 1.0)
        for ell in (2, 9):
            rep = radial_bound_check(make_family(Family.DEXP, pd, ell), pd)
            assert rep.max_ratio <= 1.0 + 1e-6
    rng = np.random.default_rng(777)
    for i in range(30):
        beta = (0.0, 0.25, 0.5)[i % 3]
        p = w0(2, beta)
        rep = radial_bound_check(random_unit_profile(rng, p), p)
        assert rep.max_ratio <= 1.0 + 1e-6
    # the plateau family saturates its bound at the breakpoint
    sat = radial_bound_check(make_family(Family.MOSER_W0, w0(2, 0.0), 3), w0(2, 0.0))
    assert sat.max_ratio >= 1.0 - 1e-4
    _report(7, "radial bounds", f"saturation ratio {sat.max_ratio:.8f}")


@pytest.fixture(scope="module")
def maximizer_sweep():
    reports = {}
    for beta in (0.0, 0.05, 0.1, 0.2):
        prob = MaximizerProblem(params=w0(2, beta))
        reports[beta] = maximize(prob, seed=11)
    return reports


def test_criterion_08_maximizer_suite(maximizer_sweep):
    """n=2 maximizer: value, residual, structure, beta-monotone values."""
    rep0 = maximizer_sweep[0.0]
    floor = (1.0 + math.e) / 2.0
    assert rep0.converged
    assert rep0.value > floor, f"{rep0.value} vs {floor}"
    for beta, rep in maximizer_sweep.items():
        assert rep.converged, f"beta={beta} not converged"
        assert abs(rep.norm - 1.0) <= 1e-8
        assert rep.el_residual <= 1e-4, f"beta={beta} residual {rep.el_residual}"
        assert rep.monotone_decreasing, f"beta={beta} not monotone"
        assert rep.admissible, f"beta={beta} maximizer not admissible"
        v = rep.profile
        mid = 0.5 * (v.t[:-1] + v.t[1:])
        dvdr = np.abs(np.diff(v.v) / np.diff(v.t)) * np.exp(mid)
        assert np.all(dvdr[-3:] < 0.01 * np.max(dvdr)), f"beta={beta} derivative at origin"
    betas = sorted(maximizer_sweep)
    values = [maximizer_sweep[b].value for b in betas]
    for lo, hi in zip(betas[:-1], betas[1:]):
        assert maximizer_sweep[hi].value <= maximizer_sweep[lo].value + 1e-4
    # continuity at beta = 0: gaps to the beta = 0 value shrink monotonically
    gaps = [rep0.value - maximizer_sweep[b].value for b in betas[1:]]
    assert all(a < b + 1e-9 for a, b in zip(gaps, gaps[1:])), gaps
    _report(8, "maximizer suite", "values " + " ".join(f"{v:.6f}" for v in values))


def test_criterion_09_beta_change_contraction():
    """Exponent-change contraction and functional invariance on 50 triples."""
    rng = np.random.default_rng(99)
    n = 2
    for _ in range(50):
        bf = float(rng.uniform(0.15, 0.85))
        bt = float(rng.uniform(0.0, bf - 0.1))
        p_from = Params(n, 1, bf, Weight.W0)
        v = random_unit_profile(rng, p_from)
        z = beta_change(v, bf, bt, p_from)
        lhs = weighted_norm(z, Params(n, 1, bt, Weight.W0)) ** (1.0 / (1.0 - bt))
        rhs = weighted_norm(v, p_from) ** (1.0 / (1.0 - bf))
        assert lhs <= rhs + 1e-6
        jv = moser_functional(v, critical_coefficient(n, 1, bf), critical_exponent(n, bf), n)
        jz = moser_functional(z, critical_coefficient(n, 1, bt), critical_exponent(n, bt), n)
        assert abs(jz - jv) <= 1e-6 * max(1.0, abs(jv))
    _report(9, "beta-change contraction", "50 random triples")


def test_criterion_10_transport_identity():
    """Half-line transport: the 1/n factor pins down; psi^gamma <= t gridwise."""
    factors = []
    count = 0
    rng = np.random.default_rng(55)
    for n in (2, 4):
        p = w0(n, 0.0 if n == 4 else 0.25)
        for ell in (1, 2, 4, 7, 12):
            v = make_family(Family.MOSER_W0, p, ell)
            tp = transport(v, p, 0.9 * critical_coefficient(n, n // 2, p.beta))
            rep = verify_transport(tp, p)
            assert rep.norm_residual <= 1e-6 * max(1.0, rep.norm_lhs)
            assert rep.functional_residual <= 1e-6 * max(1.0, rep.functional_lhs)
            assert rep.psi_power_max_gap <= 1e-8
            factors.append(rep.measured_factor * n)
            count += 1
    for i in range(10):
        beta = (0.0, 0.25)[i % 2]
        p = w0(2, beta)
        v = random_unit_profile(rng, p)
        tp = transport(v, p, 0.8 * critical_coefficient(2, 1, beta))
        rep = verify_transport(tp, p)
        assert rep.norm_residual <= 1e-6 * max(1.0, rep.norm_lhs)
        assert rep.functional_residual <= 1e-6 * max(1.0, rep.functional_lhs)
        assert rep.psi_power_max_gap <= 1e-8
        factors.append(rep.measured_factor * 2)
        count += 1
    # the measured factor is 1/n across every profile, never 1
    assert count == 20
    assert max(abs(f - 1.0) for f in factors) <= 1e-6
    _report(10, "transport identity", f"n*factor within {max(abs(f-1) for f in factors):.2e} of 1")
