"""Annealed-curve tests: environment averaging, exhaustive enumeration
against the path-sum oracle, exponent fitting on synthetic curves, and
the CSV round trip.

Oracles: exhaustive environment enumeration x exhaustive path sums for
the small-horizon annealed values; synthetic curves generated from the
exact functional forms for the fitter (which must then recover the
planted parameters to near machine precision).
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from rwre_survival import (
    Atom,
    DegenerateCurve,
    InsufficientData,
    KillingWalkSpec,
    SiteLaw,
    SurvivalCurve,
    ValidationError,
    annealed_survival,
    annealed_survival_exact,
    compare_prediction,
    enumerate_environments,
    enumerate_paths,
    fit_exponent,
    read_curve_csv,
    write_curve_csv,
)
from conftest import random_ue_law

LN2 = math.log(2.0)
LN3 = math.log(3.0)
D_BENCH = 2.0 * LN2 / LN3


def _synthetic_curve(grid, p, stderr=None, r=0.5):
    grid = np.asarray(grid, dtype=np.int64)
    p = np.asarray(p, dtype=np.float64)
    if stderr is None:
        stderr = np.zeros_like(p)
    else:
        stderr = np.asarray(stderr, dtype=np.float64)
    return SurvivalCurve(
        grid=grid,
        p=p,
        stderr=stderr,
        lower=p.copy(),
        upper=p.copy(),
        law_digest=None,
        seed=None,
        n_envs=0,
        r=r,
        w_cap=int(grid[-1]),
    )


# ---------------------------------------------------------------------------
# annealed averaging


def test_annealed_survival_is_deterministic(law_a):
    a = annealed_survival(law_a, 0.5, [4, 8, 16], 30, seed=9, w_cap=16)
    b = annealed_survival(law_a, 0.5, [4, 8, 16], 30, seed=9, w_cap=16)
    assert np.array_equal(a.p, b.p)
    assert np.array_equal(a.stderr, b.stderr)


def test_annealed_survival_worker_invariance(law_a):
    one = annealed_survival(law_a, 0.5, [4, 8, 16], 30, seed=9, w_cap=16, threads=1)
    four = annealed_survival(law_a, 0.5, [4, 8, 16], 30, seed=9, w_cap=16, threads=4)
    assert np.array_equal(one.p, four.p)
    assert np.array_equal(one.stderr, four.stderr)
    assert np.array_equal(one.lower, four.lower)
    assert np.array_equal(one.upper, four.upper)


def test_annealed_survival_seed_matters(law_a):
    a = annealed_survival(law_a, 0.5, [8, 16], 30, seed=1, w_cap=16)
    b = annealed_survival(law_a, 0.5, [8, 16], 30, seed=2, w_cap=16)
    assert not np.array_equal(a.p, b.p)


def test_annealed_survival_records_metadata(law_a):
    c = annealed_survival(law_a, 0.25, [4, 8], 12, seed=3, w_cap=8)
    assert c.law_digest == law_a.digest()
    assert c.seed == 3 and c.n_envs == 12 and c.r == 0.25 and c.w_cap == 8
    assert np.all(c.lower <= c.p) and np.all(c.p <= c.upper)
    assert np.all(c.bracket_width >= 0.0)


def test_annealed_survival_covering_cap_is_exact(law_a):
    """w_cap >= n_max makes every environment bracket collapse."""
    c = annealed_survival(law_a, 0.5, [4, 8, 16], 25, seed=4, w_cap=16)
    assert np.all(c.bracket_width == 0.0)


def test_annealed_survival_monotone_in_n(law_a):
    c = annealed_survival(law_a, 0.5, [2, 4, 8, 16, 32], 40, seed=6, w_cap=32)
    assert np.all(np.diff(c.p) < 0.0)


def test_annealed_no_killing_is_flat(law_a):
    c = annealed_survival(law_a, 0.0, [2, 8], 10, seed=1, w_cap=8)
    assert np.all(c.p == 1.0) and np.all(c.stderr == 0.0)


def test_annealed_no_holding_law_is_flat():
    rng = np.random.default_rng(12)
    law = random_ue_law(rng, holding_atoms=0)
    c = annealed_survival(law, 1.0, [2, 8], 10, seed=1, w_cap=8)
    assert np.all(c.p == 1.0)


def test_annealed_grid_must_increase(law_a):
    with pytest.raises(ValidationError):
        annealed_survival(law_a, 0.5, [8, 4], 5, seed=1)
    with pytest.raises(ValidationError):
        annealed_survival_exact(law_a, 0.5, [3, 3])


def test_exhaustive_matches_environment_path_oracle(law_a):
    """Average over all environments of all path sums, to 1e-12."""
    for r in (1.0, 0.6):
        grid = [1, 2, 3, 4]
        exact = annealed_survival_exact(law_a, r, grid)
        for pos, n in enumerate(grid):
            lo = -max(n - 1, 1)
            hi = max(n - 1, 1)
            total = 0.0
            for weight, env in enumerate_environments(law_a, lo, hi):
                spec = KillingWalkSpec(
                    env=env, r=r, start=0, horizon=n, policy="bracket"
                )
                total += weight * enumerate_paths(spec)
            assert abs(exact.p[pos] - total) <= 1e-12
        assert np.all(exact.stderr == 0.0)


# ---------------------------------------------------------------------------
# fitting synthetic curves


def test_fit_polynomial_recovers_planted_decay():
    grid = [2**k for k in range(3, 11)]
    coeff, d = 1.7, 1.31
    p = [coeff * n**-d for n in grid]
    fit = fit_exponent(_synthetic_curve(grid, p), "polynomial")
    assert fit.slope == pytest.approx(-d, abs=1e-12)
    assert fit.coeff == pytest.approx(coeff, rel=1e-10)
    assert fit.n_points == len(grid)
    assert fit.rms < 1e-12


def test_fit_intermediate_recovers_planted_kappa():
    grid = [2**k for k in range(3, 14)]
    c, kappa = 0.8, 1.0
    p = [math.exp(-c * math.log(n) ** (1 + kappa)) for n in grid]
    fit = fit_exponent(_synthetic_curve(grid, p), "intermediate")
    assert fit.kappa == pytest.approx(kappa, abs=1e-10)
    assert fit.coeff == pytest.approx(c, rel=1e-8)


def test_fit_stretched_recovers_planted_kappa():
    grid = [2**k for k in range(3, 14)]
    c, kappa = 0.05, 0.5
    p = [math.exp(-c * n**kappa) for n in grid]
    fit = fit_exponent(_synthetic_curve(grid, p), "stretched")
    assert fit.kappa == pytest.approx(kappa, abs=1e-10)
    assert fit.coeff == pytest.approx(c, rel=1e-8)


def test_fit_weights_follow_reported_errors():
    """A corrupted point with a huge error bar barely moves the fit."""
    grid = [2**k for k in range(3, 11)]
    d = 1.0
    p = np.array([n**-d for n in grid])
    stderr = np.full(len(grid), 1e-6)
    clean = fit_exponent(_synthetic_curve(grid, p, stderr), "polynomial")
    p2 = p.copy()
    p2[-1] *= 1.5
    stderr2 = stderr.copy()
    stderr2[-1] = 0.4 * p2[-1]  # large but below the discard cutoff
    noisy = fit_exponent(_synthetic_curve(grid, p2, stderr2), "polynomial")
    assert noisy.slope == pytest.approx(clean.slope, abs=5e-3)


def test_fit_drops_unusable_points():
    grid = [4, 8, 16, 32, 64, 128]
    p = [n**-1.0 for n in grid]
    p[2] = 0.0  # dead point: no log coordinate
    fit = fit_exponent(_synthetic_curve(grid, p), "polynomial")
    assert fit.n_points == 5
    assert fit.slope == pytest.approx(-1.0, abs=1e-10)


def test_fit_requires_four_points():
    grid = [4, 8, 16]
    p = [n**-1.0 for n in grid]
    with pytest.raises(InsufficientData):
        fit_exponent(_synthetic_curve(grid, p), "polynomial")


def test_fit_rejects_flat_curve():
    grid = [4, 8, 16, 32]
    with pytest.raises(DegenerateCurve):
        fit_exponent(_synthetic_curve(grid, [1.0] * 4), "polynomial")
    with pytest.raises(DegenerateCurve):
        fit_exponent(_synthetic_curve(grid, [0.0] * 4), "polynomial")


def test_fit_rejects_unknown_regime():
    grid = [4, 8, 16, 32]
    p = [n**-1.0 for n in grid]
    with pytest.raises(ValidationError):
        fit_exponent(_synthetic_curve(grid, p), "exponential")


def test_fit_intermediate_skips_n_one():
    """n = 1 has ln ln n = -inf and must be excluded, not propagated."""
    grid = [1, 4, 8, 16, 32, 64]
    p = [math.exp(-math.log(n) ** 2) if n > 1 else 1.0 for n in grid]
    fit = fit_exponent(_synthetic_curve(grid, p), "intermediate")
    assert fit.kappa == pytest.approx(1.0, abs=1e-10)


def test_compare_prediction_passes_on_planted_curve(law_a):
    grid = [2**k for k in range(4, 12)]
    p = [n**-D_BENCH for n in grid]
    report = compare_prediction(law_a, _synthetic_curve(grid, p))
    assert report["regime"] == "polynomial"
    assert report["pass"] is True
    assert report["fitted"] == pytest.approx(D_BENCH, abs=1e-10)
    lo, hi = report["bracket"]
    assert lo <= report["fitted"] <= hi


def test_compare_prediction_fails_on_wrong_decay(law_a):
    grid = [2**k for k in range(4, 12)]
    p = [n**-5.0 for n in grid]  # far outside the +-50% band
    report = compare_prediction(law_a, _synthetic_curve(grid, p))
    assert report["pass"] is False


# ---------------------------------------------------------------------------
# CSV round trip


def test_curve_csv_round_trip(law_a):
    curve = annealed_survival(law_a, 0.5, [4, 8, 16, 32], 20, seed=13, w_cap=16)
    text = write_curve_csv(curve)
    back = read_curve_csv(text)
    assert np.array_equal(back.grid, curve.grid)
    assert np.array_equal(back.p, curve.p)
    assert np.array_equal(back.stderr, curve.stderr)
    assert np.array_equal(back.lower, curve.lower)
    assert np.array_equal(back.upper, curve.upper)
    assert back.law_digest == curve.law_digest
    assert back.seed == curve.seed
    assert back.n_envs == curve.n_envs
    assert back.r == curve.r
    assert back.w_cap == curve.w_cap
    assert write_curve_csv(back) == text


def test_curve_csv_header_shape(law_a):
    curve = annealed_survival(law_a, 0.5, [4, 8], 5, seed=2, w_cap=8)
    text = write_curve_csv(curve)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == "n,p,stderr,lower,upper"
    assert len(lines) == 3


def test_read_curve_rejects_garbage():
    with pytest.raises(ValidationError):
        read_curve_csv("not,a,curve\n1,2\n")
