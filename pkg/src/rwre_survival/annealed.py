"""Annealed survival curves and regime fits.

The annealed survival probability averages the quenched one over
environments.  `annealed_survival` estimates it by Monte Carlo over
sampled environments — each environment is solved exactly by the DP, so
the only noise is environmental — while `annealed_survival_exact`
enumerates every atom assignment on a small window and is used as an
oracle.

`fit_exponent` turns a survival curve into the empirical counterpart of
the regime limits by weighted least squares in regime-specific
coordinates:

    polynomial        ln p      against ln n      (slope -> -exponent)
    intermediate      ln(-ln p) against ln ln n   (slope -> 1 + kappa)
    stretched         ln(-ln p) against ln n      (slope -> kappa bracket)

and `compare_prediction` wires a fitted curve against the analytic
prediction of `predicted_decay`.

`srw_exit_check` verifies the classical exit-time rate of the symmetric
simple random walk: on the interval [-l, l] the survival tail decays at
rate ln cos(pi / (2 l)) per step, so (l^2 / n) ln P(exit > n) approaches
-pi^2 / 8.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .environment import Environment, enumerate_environments, sample_window
from .errors import (
    DegenerateCurve,
    InsufficientData,
    MalformedLaw,
    ValidationError,
)
from .law import LimitQuantities, Regime, SiteLaw, limit_quantities
from .rates import predicted_decay
from .streams import derive_seed
from .walk import KillingWalkSpec, hitting_time_tail, quenched_survival_dp

__all__ = [
    "SurvivalCurve",
    "annealed_survival",
    "annealed_survival_exact",
    "FitResult",
    "fit_exponent",
    "compare_prediction",
    "srw_exit_check",
    "write_curve_csv",
    "read_curve_csv",
]


@dataclass(frozen=True)
class SurvivalCurve:
    """Estimated annealed survival P(tau > n) on a grid of horizons.

    `lower` and `upper` are the means of the per-environment truncation
    bounds; `p` is their midpoint and `stderr` the environmental sampling
    error of the midpoint (zero in exhaustive mode).  Provenance fields
    make any curve reproducible: same (law, r, seed, n_envs, w_cap) give
    byte-identical curves.
    """

    grid: np.ndarray
    p: np.ndarray
    stderr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    law_digest: str | None = None
    seed: int | None = None
    n_envs: int | None = None
    r: float | None = None
    w_cap: int | None = None

    @property
    def bracket_width(self) -> float:
        """Largest truncation-bracket gap across the grid."""
        return float(np.max(self.upper - self.lower))


def _check_grid(n_grid) -> np.ndarray:
    grid = np.asarray(n_grid, dtype=np.int64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("horizon grid must be a nonempty 1-d sequence")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValidationError("horizon grid must be strictly increasing and nonnegative")
    return grid


def annealed_survival(
    law: SiteLaw,
    r: float,
    n_grid,
    n_envs: int,
    seed: int,
    w_cap: int = 8192,
    threads: int | None = None,
) -> SurvivalCurve:
    """Monte Carlo annealed survival curve over sampled environments.

    Environment i is sampled on the window [-W, W], W = min(max grid,
    w_cap), with the derived seed derive_seed(seed, i), and solved
    exactly by the quenched DP (bracketed if the window truncates the
    reachable range).  Results are slotted by environment index before
    averaging, so the curve is a pure function of the arguments —
    independent of thread count and completion order.

    Parameters
    ----------
    law : SiteLaw
    r : float
        Killing probability in [0, 1].
    n_grid : sequence of int
        Strictly increasing horizons.
    n_envs : int
        Number of environments, at least 2.
    seed : int
        Mandatory base seed.
    w_cap : int
        Window half-width cap; windows never exceed [-w_cap, w_cap].
    threads : int, optional
        Worker threads (default: machine parallelism).  The DP kernels
        release the GIL, so environments run genuinely concurrently.

    Returns
    -------
    SurvivalCurve
    """
    grid = _check_grid(n_grid)
    if n_envs < 2:
        raise ValidationError(f"need at least 2 environments, got {n_envs}")
    n_max = int(grid[-1])
    w = min(n_max, int(w_cap))
    policy = "strict" if w >= n_max else "bracket"
    lowers = np.empty((n_envs, grid.size))
    uppers = np.empty((n_envs, grid.size))

    def solve(i: int) -> tuple[np.ndarray, np.ndarray]:
        env = sample_window(law, derive_seed(seed, i), -w, w)
        res = quenched_survival_dp(
            KillingWalkSpec(env, r, 0, n_max, policy=policy)
        )
        return res.lower[grid], res.upper[grid]

    workers = threads if threads is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, n_envs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, (lo, up) in enumerate(pool.map(solve, range(n_envs))):
            lowers[i] = lo
            uppers[i] = up
    mids = 0.5 * (lowers + uppers)
    return SurvivalCurve(
        grid=grid,
        p=mids.mean(axis=0),
        stderr=mids.std(axis=0, ddof=1) / math.sqrt(n_envs),
        lower=lowers.mean(axis=0),
        upper=uppers.mean(axis=0),
        law_digest=law.digest(),
        seed=seed,
        n_envs=n_envs,
        r=r,
        w_cap=w,
    )


_MAX_EXHAUSTIVE = 10**6


def annealed_survival_exact(law: SiteLaw, r: float, n_grid) -> SurvivalCurve:
    """Exhaustive annealed survival: exact average over all environments.

    Enumerates every atom assignment on the window [-n_max, n_max] (the
    full reachable range) and weights each exact quenched curve by its
    probability.  Only feasible for tiny horizons.

    Raises
    ------
    ValidationError
        If the enumeration would exceed 10^6 environments.
    """
    grid = _check_grid(n_grid)
    n_max = int(grid[-1])
    count = len(law.atoms) ** (2 * n_max + 1)
    if count > _MAX_EXHAUSTIVE:
        raise ValidationError(
            f"{count} environments to enumerate exceeds the cap of {_MAX_EXHAUSTIVE}"
        )
    acc = np.zeros(grid.size)
    total_prob = 0.0
    for prob, env in enumerate_environments(law, -n_max, n_max):
        res = quenched_survival_dp(KillingWalkSpec(env, r, 0, n_max, policy="strict"))
        acc += prob * res.lower[grid]
        total_prob += prob
    p = acc / total_prob  # total_prob = 1 up to rounding
    zeros = np.zeros(grid.size)
    return SurvivalCurve(
        grid=grid, p=p, stderr=zeros, lower=p, upper=p,
        law_digest=law.digest(), seed=None, n_envs=count, r=r, w_cap=n_max,
    )


@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares fit of a survival curve in regime coordinates.

    `slope`/`intercept` describe y = slope * x + intercept in the
    coordinates named by `coordinates`; half-widths are 95% confidence
    half-intervals; `rms` is the unweighted residual root mean square.
    `coeff` = exp(intercept) is the amplitude in the fit coordinates
    (polynomial prefactor, or the constant multiplying ln^(1+kappa) n /
    n^kappa); `kappa` is the shape parameter implied by the slope
    (intermediate: slope - 1; stretched: slope; polynomial: none).
    """

    regime: str
    slope: float
    intercept: float
    slope_halfwidth: float
    intercept_halfwidth: float
    rms: float
    coordinates: str
    n_points: int
    kappa: float | None = None
    coeff: float | None = None


def _fit_coordinates(
    regime: str, grid: np.ndarray, p: np.ndarray, stderr: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, str]:
    """Map curve points into fit coordinates with delta-method sigmas."""
    n = grid.astype(np.float64)
    if regime == "polynomial":
        usable = (p > 0.0) & (n >= 1.0)
        x = np.log(n[usable])
        y = np.log(p[usable])
        sig = stderr[usable] / p[usable]
        return x, y, sig, "ln p ~ ln n"
    if regime == "intermediate":
        usable = (p > 0.0) & (p < 1.0) & (n >= 2.0)
        x = np.log(np.log(n[usable]))
        y = np.log(-np.log(p[usable]))
        sig = stderr[usable] / (p[usable] * (-np.log(p[usable])))
        return x, y, sig, "ln(-ln p) ~ ln ln n"
    if regime == "stretched":
        usable = (p > 0.0) & (p < 1.0) & (n >= 1.0)
        x = np.log(n[usable])
        y = np.log(-np.log(p[usable]))
        sig = stderr[usable] / (p[usable] * (-np.log(p[usable])))
        return x, y, sig, "ln(-ln p) ~ ln n"
    raise ValidationError(f"no fit coordinates for regime {regime!r}")


def fit_exponent(curve: SurvivalCurve, regime: str | Regime) -> FitResult:
    """Fit the regime's exponent coordinates to a survival curve.

    Points with p outside the coordinate domain or with relative error
    stderr/p >= 0.5 are dropped; at least 4 must remain.  Exact curves
    (all stderr zero) fall back to ordinary least squares.

    Raises
    ------
    DegenerateCurve
        If every point has p = 0 or p = 1.
    InsufficientData
        If fewer than 4 usable points remain.
    """
    kind = regime.kind if isinstance(regime, Regime) else str(regime)
    p, stderr, grid = curve.p, curve.stderr, curve.grid
    if np.all((p <= 0.0) | (p >= 1.0)):
        raise DegenerateCurve("survival probabilities are all 0 or 1")
    rel_ok = np.where(p > 0.0, stderr < 0.5 * p, False)
    x, y, sig, coords = _fit_coordinates(
        kind, grid[rel_ok], p[rel_ok], stderr[rel_ok]
    )
    if x.size < 4:
        raise InsufficientData(
            f"only {x.size} usable points for the {kind} fit (need 4)"
        )
    if np.all(sig == 0.0):
        weights = np.ones_like(sig)
        exact_sigma = False
    else:
        floor = sig[sig > 0.0].min()
        weights = 1.0 / np.maximum(sig, floor)
        exact_sigma = True
    a = np.column_stack([x, np.ones_like(x)]) * weights[:, None]
    b = y * weights
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    slope, intercept = float(sol[0]), float(sol[1])
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    cov = np.linalg.inv(a.T @ a)
    if not exact_sigma:
        dof = x.size - 2
        cov = cov * float(np.sum((resid * weights) ** 2) / dof)
    slope_hw = 1.96 * math.sqrt(max(cov[0, 0], 0.0))
    intercept_hw = 1.96 * math.sqrt(max(cov[1, 1], 0.0))
    kappa = None
    coeff = math.exp(intercept)
    if kind == "intermediate":
        kappa = slope - 1.0
    elif kind == "stretched":
        kappa = slope
    return FitResult(
        regime=kind, slope=slope, intercept=intercept,
        slope_halfwidth=slope_hw, intercept_halfwidth=intercept_hw,
        rms=rms, coordinates=coords, n_points=int(x.size),
        kappa=kappa, coeff=coeff,
    )


# Calibrated acceptance band for the polynomial regime: the exponent
# limit converges only logarithmically, so a fitted slope at desk scale
# is accepted within +-50% of the predicted exponent.
_POLY_BAND = 0.5


def compare_prediction(
    law: SiteLaw,
    curve: SurvivalCurve,
    regime: Regime | None = None,
    limits: LimitQuantities | None = None,
    n_max: float = 10**6,
) -> dict:
    """Verdict comparing a fitted curve against the analytic prediction.

    Returns a JSON-ready dict {regime, predicted, fitted, bracket, pass,
    fit} where `fitted` is the regime's fitted quantity (polynomial:
    exponent magnitude; intermediate: coefficient; stretched: kappa
    slope) and `bracket` the acceptance interval it must fall into.
    """
    lim = limits if limits is not None else limit_quantities(law, n_max)
    reg = regime if regime is not None else lim.regime
    pred = predicted_decay(law, reg, limits=lim)
    fit = fit_exponent(curve, reg.kind)
    if pred.kind == "polynomial":
        predicted = pred.exponent
        fitted = -fit.slope
        bracket = [(1.0 - _POLY_BAND) * predicted, (1.0 + _POLY_BAND) * predicted]
        passed = fit.slope < 0.0 and bracket[0] <= fitted <= bracket[1]
    elif pred.kind == "intermediate":
        predicted = list(pred.bracket)
        fitted = fit.coeff
        bracket = list(pred.bracket)
        passed = bracket[0] <= fitted <= bracket[1]
    else:
        predicted = list(pred.bracket)
        fitted = fit.kappa
        bracket = list(pred.bracket)
        passed = bracket[0] <= fitted <= bracket[1]
    return {
        "regime": pred.kind,
        "predicted": predicted,
        "fitted": fitted,
        "bracket": bracket,
        "pass": bool(passed),
        "fit": {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "slope_halfwidth": fit.slope_halfwidth,
            "rms": fit.rms,
            "coordinates": fit.coordinates,
            "n_points": fit.n_points,
        },
    }


def srw_exit_check(l: int, n: int) -> float:
    """Exit-time rate check for the symmetric simple random walk.

    Computes (l^2 / n) * ln P(exit time of [-l, l] >= n) for the
    holding-free symmetric walk started at 0.  As n / l^2 grows this
    approaches -pi^2 / 8 ~= -1.2337.

    Parameters
    ----------
    l : int
        Interval half-width, at least 1 (at least 4 for a meaningful
        comparison against the limit).
    n : int
        Horizon; n = 0 returns 0 (ln of the empty-event probability 1).
    """
    if l < 1:
        raise ValidationError(f"half-width l must be >= 1, got {l}")
    if n < 0:
        raise ValidationError(f"horizon must be nonnegative, got {n}")
    if n == 0:
        return 0.0
    triples = np.tile([0.5, 0.0, 0.5], (2 * l + 1, 1))
    env = Environment(-l, l, triples)
    tail = hitting_time_tail(env, -l, l, 0, n - 1)
    return float(l * l / n * math.log(tail[n - 1]))


# ---------------------------------------------------------------------------
# CSV serialization: `# key=value` provenance comments, a header line,
# then one row per grid point at full precision.

_CSV_HEADER = "n,p,stderr,lower,upper"


def write_curve_csv(curve: SurvivalCurve) -> str:
    """Serialize a survival curve to CSV text (deterministic bytes)."""
    out = io.StringIO()
    meta = {
        "law_digest": curve.law_digest,
        "seed": curve.seed,
        "n_envs": curve.n_envs,
        "r": curve.r,
        "w_cap": curve.w_cap,
    }
    for key, value in meta.items():
        if value is not None:
            text = "%.17g" % value if isinstance(value, float) else str(value)
            out.write(f"# {key}={text}\n")
    out.write(_CSV_HEADER + "\n")
    for i in range(curve.grid.size):
        out.write(
            "%d,%.17g,%.17g,%.17g,%.17g\n"
            % (curve.grid[i], curve.p[i], curve.stderr[i],
               curve.lower[i], curve.upper[i])
        )
    return out.getvalue()


def read_curve_csv(text: str) -> SurvivalCurve:
    """Parse a survival curve from `write_curve_csv` output."""
    meta: dict[str, str] = {}
    rows: list[tuple[float, ...]] = []
    saw_header = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if not saw_header:
            if line != _CSV_HEADER:
                raise MalformedLaw(f"expected header {_CSV_HEADER!r}, got {raw!r}")
            saw_header = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise MalformedLaw(f"expected 5 columns, got {len(parts)}: {raw!r}")
        rows.append(tuple(float(v) for v in parts))
    if not saw_header or not rows:
        raise MalformedLaw("curve CSV has no header or no rows")
    data = np.array(rows)
    return SurvivalCurve(
        grid=data[:, 0].astype(np.int64),
        p=data[:, 1],
        stderr=data[:, 2],
        lower=data[:, 3],
        upper=data[:, 4],
        law_digest=meta.get("law_digest"),
        seed=int(meta["seed"]) if "seed" in meta else None,
        n_envs=int(meta["n_envs"]) if "n_envs" in meta else None,
        r=float(meta["r"]) if "r" in meta else None,
        w_cap=int(meta["w_cap"]) if "w_cap" in meta else None,
    )
