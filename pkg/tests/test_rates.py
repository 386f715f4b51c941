"""Large-deviation machinery tests: log-MGF, Legendre transform, valley
costs, tilt roots, and the regime-dependent decay predictions.

Oracles, in order of appearance:

* closed forms of the three-atom benchmark law (conditioned drift is
  +-ln 3 with equal weight, safe mass 0.8): log-MGF ln(5/3) at t = 1,
  Legendre value ln 2 at the support edge, tilt roots ln2/ln3, optimal
  valley cost 2 ln2/ln3;
* a dense grid search sup over t in [0, 50] step 1e-4 for Legendre
  values away from the edge;
* an exact binomial tail (integer arithmetic) as the finite-m rate in
  the i.i.d.-sum tail theorem, compared at m = 200;
* the independent coarse-to-fine grid minimizer of the valley cost,
  compared against the root-based formula on randomized laws.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from rwre_survival import (
    EmptyConditioning,
    UnclassifiedRegime,
    ValidationError,
    construct_law,
    intermediate_exponents,
    legendre,
    limit_quantities,
    log_mgf,
    optimal_valley_cost,
    predicted_decay,
    rate_report,
    tail_explog,
    tail_exppow,
    tail_geo,
    tilt_root,
    valley_cost,
    valley_cost_minimum,
)
from conftest import random_ue_law

LN2 = math.log(2.0)
LN3 = math.log(3.0)


# ---------------------------------------------------------------------------
# log-MGF


def test_log_mgf_two_atom_closed_form(law_a):
    """Conditioned on zero holding, E rho^1 = (3 + 1/3)/2 = 5/3."""
    assert log_mgf(law_a, math.inf, 1.0, sign=1) == pytest.approx(
        math.log(5.0 / 3.0), abs=1e-14
    )


def test_log_mgf_zero_t_is_zero(law_a, holding_only_law):
    assert log_mgf(law_a, math.inf, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert log_mgf(holding_only_law, 1.0, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_log_mgf_mirror_symmetry(law_a):
    """The benchmark law is invariant under swapping the drift atoms."""
    for t in (0.3, 1.0, 2.5, 7.0):
        assert log_mgf(law_a, math.inf, t, sign=1) == pytest.approx(
            log_mgf(law_a, math.inf, t, sign=-1), abs=1e-13
        )


def test_log_mgf_convex_in_t(law_a):
    """Second differences of t -> log-MGF are nonnegative."""
    rng = np.random.default_rng(3)
    laws = [law_a] + [random_ue_law(rng, holding_atoms=1) for _ in range(3)]
    ts = np.linspace(0.0, 6.0, 121)
    for law in laws:
        vals = np.array([log_mgf(law, math.inf, float(t)) for t in ts])
        second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
        assert second.min() > -1e-10


def test_log_mgf_empty_conditioning(holding_only_law):
    with pytest.raises(EmptyConditioning):
        log_mgf(holding_only_law, math.inf, 1.0)


# ---------------------------------------------------------------------------
# Legendre transform


def test_legendre_at_conditional_mean_is_zero(law_a):
    assert legendre(law_a, math.inf, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_legendre_below_mean_is_zero(law_a):
    assert legendre(law_a, math.inf, -2.0) == 0.0


def test_legendre_at_support_edge(law_a):
    """sup_t (t ln3 - ln((3^t + 3^-t)/2)) -> ln 2 as t -> inf."""
    assert legendre(law_a, math.inf, LN3) == pytest.approx(LN2, abs=1e-12)


def test_legendre_beyond_support_is_infinite(law_a):
    assert math.isinf(legendre(law_a, math.inf, LN3 + 0.1))


def _legendre_grid_oracle(law, k, x, sign=1):
    """Dense grid search over t in [0, 50] with step 1e-4.

    Recomputes the log-MGF directly from the atoms (vectorized over the
    whole grid), so the oracle shares no code with the implementation.
    """
    cutoff = 0.0 if math.isinf(k) else 1.0 / k
    kept = [a for a in law.atoms if a.w_zero <= cutoff]
    drifts = np.array([sign * math.log(a.w_minus / a.w_plus) for a in kept])
    weights = np.array([a.weight for a in kept])
    weights = weights / weights.sum()
    ts = np.arange(0.0, 50.0 + 1e-4, 1e-4)
    # ln sum_i w_i exp(t d_i), stabilized by the row max
    expo = ts[:, None] * drifts[None, :] + np.log(weights)[None, :]
    peak = expo.max(axis=1)
    lmgf = peak + np.log(np.exp(expo - peak[:, None]).sum(axis=1))
    return float(np.max(ts * x - lmgf))


def test_legendre_matches_grid_search(law_a):
    x = 0.5 * LN3
    oracle = _legendre_grid_oracle(law_a, math.inf, x)
    assert legendre(law_a, math.inf, x) == pytest.approx(oracle, abs=1e-6)


def test_legendre_matches_grid_search_random_laws():
    rng = np.random.default_rng(41)
    for _ in range(3):
        law = random_ue_law(rng, holding_atoms=1)
        # interior target: halfway between conditional mean and max drift
        drifts = []
        weights = []
        for a in law.atoms:
            if a.w_zero == 0.0:
                drifts.append(math.log(a.w_minus / a.w_plus))
                weights.append(a.weight)
        mean = sum(d * w for d, w in zip(drifts, weights)) / sum(weights)
        x = 0.5 * (mean + max(drifts))
        oracle = _legendre_grid_oracle(law, math.inf, x)
        assert legendre(law, math.inf, x) == pytest.approx(oracle, abs=1e-6)


def test_legendre_monotone_above_mean(law_a):
    xs = np.linspace(0.0, LN3, 40)
    vals = [legendre(law_a, math.inf, float(x)) for x in xs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# exact i.i.d.-sum tail (Cramér consistency)


def test_binomial_tail_matches_legendre_rate(law_a):
    """-(1/m) ln P(S_m >= x m) vs the Legendre value at m = 200.

    Conditioned on zero holding, each step of S_m is +-ln3 with
    probability 1/2, so S_m >= 0.5 ln3 m iff the number of + steps is
    >= 3m/4.  The binomial tail is summed in exact integer arithmetic.
    """
    m = 200
    x = 0.5 * LN3
    # S_m = (2 B - m) ln3 >= x m  <=>  B >= 3m/4
    threshold = 3 * m // 4
    numerator = sum(math.comb(m, b) for b in range(threshold, m + 1))
    log_p = math.log(numerator) - m * LN2  # P = numerator / 2^m
    empirical_rate = -log_p / m
    analytic = legendre(law_a, math.inf, x)
    assert abs(empirical_rate - analytic) / analytic < 0.10


# ---------------------------------------------------------------------------
# valley cost and tilt roots


def test_valley_cost_closed_form(law_a):
    """At b1 = b2 = 1/ln3 the per-side supremum hits the support edge."""
    expect = 2.0 * math.log(2.5) / LN3  # 2 (ln2 - ln 0.8) / ln3
    got = valley_cost(law_a, math.inf, 1.0 / LN3, 1.0 / LN3, 1.0)
    assert got == pytest.approx(expect, abs=1e-10)


def test_valley_cost_degenerate_depth(law_a):
    """As h -> 0 only the safe-interval cost -(b1+b2) ln 0.8 remains."""
    b1, b2 = 0.7, 1.3
    expect = -(b1 + b2) * math.log(0.8)
    got = valley_cost(law_a, math.inf, b1, b2, 1e-12)
    assert got == pytest.approx(expect, rel=1e-6)


def test_valley_cost_dominates_optimum(law_a):
    """The root-based optimum is a lower bound over a 20 x 20 b-grid."""
    best = optimal_valley_cost(law_a, math.inf, 1.0)
    bs = np.geomspace(0.2, 5.0, 20)
    for b1 in bs:
        for b2 in bs:
            assert valley_cost(law_a, math.inf, float(b1), float(b2), 1.0) >= (
                best - 1e-10
            )


def test_tilt_root_closed_form(law_a):
    """(3^t + 3^-t)/2 = 1/0.8 solves to 3^t = 2, i.e. t = ln2/ln3."""
    for sign in (1, -1):
        root = tilt_root(law_a, math.inf, sign=sign)
        assert not root.degenerate
        assert root.t == pytest.approx(LN2 / LN3, abs=1e-10)


def test_tilt_root_degenerate_without_holding():
    law = construct_law(tail_geo(0.5), 1.0, 1, 120)
    # remove holding by conditioning at k = 1 (cutoff 1 keeps every atom,
    # and the law's total safe mass is 1), so the root degenerates to 0
    root = tilt_root(law, 1.0, sign=1)
    assert root.degenerate
    assert root.t == 0.0


def test_optimal_valley_cost_closed_form(law_a):
    assert optimal_valley_cost(law_a, math.inf, 1.0) == pytest.approx(
        2.0 * LN2 / LN3, abs=1e-10
    )


def test_optimal_valley_cost_linear_in_h(law_a):
    one = optimal_valley_cost(law_a, math.inf, 1.0)
    two = optimal_valley_cost(law_a, math.inf, 2.0)
    assert two == pytest.approx(2.0 * one, rel=1e-14)


def test_two_route_identity(law_a):
    """Root formula equals the independent grid infimum within 1e-4."""
    rng = np.random.default_rng(2024)
    laws = [law_a] + [random_ue_law(rng, holding_atoms=1) for _ in range(5)]
    for law in laws:
        direct = optimal_valley_cost(law, math.inf, 1.0)
        grid = valley_cost_minimum(law, math.inf, 1.0)
        assert abs(direct - grid.value) <= 1e-4
        assert grid.b1 > 0 and grid.b2 > 0


def test_cutoff_stabilization(law_a):
    """The cost is constant in the cutoff once 1/k clears every positive
    holding atom (here the only one is 0.5, so from k = 2 on)."""
    values = [optimal_valley_cost(law_a, k, 1.0) for k in (3.0, 10.0, 100.0, math.inf)]
    for v in values[1:]:
        assert v == pytest.approx(values[0], abs=1e-12)


# ---------------------------------------------------------------------------
# intermediate exponents


@pytest.fixture(scope="module")
def explog_law():
    return construct_law(tail_explog(1.0, 1.0), 1.0, 2, 10**4)


def test_intermediate_exponents_infimum(explog_law):
    """C attains h*D at the admissible corner (h/eps-, h/eps+)."""
    lim = limit_quantities(explog_law, 10**4)
    h = 1.0
    corner = intermediate_exponents(
        explog_law, h, h / lim.eps_minus, h / lim.eps_plus, limits=lim
    )
    assert corner.c_total == pytest.approx(h * corner.d_coeff, abs=1e-9)


def test_intermediate_exponents_monotone_in_b(explog_law):
    lim = limit_quantities(explog_law, 10**4)
    h = 1.0
    b_lo1 = h / lim.eps_minus
    b_lo2 = h / lim.eps_plus
    prev = None
    for scale in (1.0, 1.5, 2.5, 4.0):
        cur = intermediate_exponents(
            explog_law, h, scale * b_lo1, scale * b_lo2, limits=lim
        )
        if prev is not None:
            assert cur.c_minus >= prev.c_minus - 1e-12
            assert cur.c_plus >= prev.c_plus - 1e-12
        prev = cur


def test_intermediate_exponents_rejects_narrow_b(explog_law):
    lim = limit_quantities(explog_law, 10**4)
    with pytest.raises(ValidationError):
        intermediate_exponents(
            explog_law, 1.0, 0.5 / lim.eps_minus, 1.0 / lim.eps_plus, limits=lim
        )


# ---------------------------------------------------------------------------
# decay prediction


def test_predicted_decay_polynomial(law_a):
    pred = predicted_decay(law_a)
    assert pred.kind == "polynomial"
    assert pred.exponent == pytest.approx(2.0 * LN2 / LN3, abs=1e-10)


def test_predicted_decay_intermediate(explog_law):
    pred = predicted_decay(explog_law)
    assert pred.kind == "intermediate"
    kappa = pred.kappa
    assert 0.9 <= kappa <= 1.1
    assert pred.log_power == pytest.approx(1.0 + kappa, abs=1e-12)
    lo, hi = pred.bracket
    assert 0.0 < lo <= hi
    # the bracket shape: lo/hi = kappa^kappa / (1+kappa)^(1+kappa)
    assert lo / hi == pytest.approx(
        kappa**kappa / (1.0 + kappa) ** (1.0 + kappa), rel=1e-12
    )


def test_predicted_decay_stretched():
    law = construct_law(tail_exppow(1.0, 0.5), 1.0, 2, 4000)
    pred = predicted_decay(law, n_max=4000)
    assert pred.kind == "stretched"
    kappa = pred.kappa
    assert 0.45 <= kappa <= 0.55
    lo, hi = pred.bracket
    assert hi == pytest.approx(kappa, abs=1e-12)
    assert lo == pytest.approx(kappa / (1.0 + 5.0 * kappa), abs=1e-12)


def test_predicted_decay_unclassified(holding_only_law):
    with pytest.raises(UnclassifiedRegime):
        predicted_decay(holding_only_law)


def test_rate_report_is_json_ready(law_a):
    report = rate_report(law_a)
    text = json.dumps(report)
    back = json.loads(text)
    assert back["regime"]["kind"] == "polynomial"
    poly = back["polynomial"]
    assert poly["exponent"] == pytest.approx(2.0 * LN2 / LN3, abs=1e-10)
    assert poly["grid_discrepancy"] <= 1e-4
    assert len(poly["k_grid"]) >= 4
