"""Exact quenched computations for the killed walk.

Quenched means the environment is fixed: one window of site triples.
The walk steps right/holds/left with the site's probabilities, and every
holding step kills it with probability r.  The killing is integrated out
analytically — a holding step contributes a survival factor (1 - r) — so
`quenched_survival_dp` is exact up to floating-point rounding; the
Bernoulli kill variable itself is simulated only in `mc_walk`, which
exists to validate the DP.

Window truncation is handled by rigorous bracketing: a walk that leaves
the window is treated as dead (lower bound) or as surviving forever
(upper bound).  Both bounds coincide with the exact value once the window
covers the reachable range [start - horizon, start + horizon].

`hitting_time_tail` computes P(exit time of an interval > t) for the
killing-free walk absorbed at both interval endpoints; deep potential
valleys make this exit time exponentially large in the valley depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import Environment
from .errors import (
    HorizonTooLarge,
    NumericalError,
    OutOfWindow,
    ValidationError,
    WindowTooSmall,
)
from .kernels import hitting_kernel, survival_kernel
from .streams import derive_seeds, uniform_at, uniform_for_seeds

__all__ = [
    "KillingWalkSpec",
    "SurvivalBracket",
    "quenched_survival_dp",
    "hitting_time_tail",
    "median_exit_time",
    "collapse_holding",
    "SURVIVED",
    "MCEstimate",
    "mc_walk",
    "mc_survival",
    "enumerate_paths",
]

# Sentinel returned by mc_walk when the replica outlives the horizon.
SURVIVED = math.inf


@dataclass(frozen=True)
class KillingWalkSpec:
    """A killed quenched walk: environment, killing probability, start, horizon.

    Parameters
    ----------
    env : Environment
    r : float
        Killing probability per holding step, in [0, 1].
    start : int
        Start site (absolute coordinates).
    horizon : int
        Number of steps, nonnegative.
    policy : str
        "strict" demands that the window cover the reachable range
        [start - horizon, start + horizon], making every computation
        exact; "bracket" accepts any window and yields rigorous
        lower/upper bounds instead.

    Raises
    ------
    WindowTooSmall
        Under the strict policy when the window does not cover the
        reachable range.
    """

    env: Environment
    r: float
    start: int
    horizon: int
    policy: str = "strict"

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValidationError(f"killing probability must be in [0, 1], got {self.r}")
        if not self.env.lo <= self.start <= self.env.hi:
            raise OutOfWindow(
                f"start {self.start} outside window [{self.env.lo}, {self.env.hi}]"
            )
        if self.horizon < 0:
            raise ValidationError(f"horizon must be nonnegative, got {self.horizon}")
        if self.policy not in ("strict", "bracket"):
            raise ValidationError(f"unknown window policy {self.policy!r}")
        if self.policy == "strict" and not self.covers_reachable:
            raise WindowTooSmall(
                f"window [{self.env.lo}, {self.env.hi}] does not cover "
                f"[{self.start - self.horizon}, {self.start + self.horizon}]; "
                "use policy='bracket' to accept truncation bounds"
            )

    @property
    def covers_reachable(self) -> bool:
        """True when the window contains [start - horizon, start + horizon]."""
        return (
            self.start - self.horizon >= self.env.lo
            and self.start + self.horizon <= self.env.hi
        )


@dataclass(frozen=True)
class SurvivalBracket:
    """Survival curve bounds s[0..n]; equal (and exact) when `exact`.

    lower treats any escape from the window as immediate death, upper as
    permanent survival, so lower <= true survival <= upper pointwise.
    """

    lower: np.ndarray
    upper: np.ndarray
    exact: bool

    @property
    def mid(self) -> np.ndarray:
        """Midpoint estimate (equals both bounds when exact)."""
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        """Largest gap between the bounds."""
        return float(np.max(self.upper - self.lower))


def _columns(env: Environment) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = env.triples
    return (
        np.ascontiguousarray(t[:, 0]),
        np.ascontiguousarray(t[:, 1]),
        np.ascontiguousarray(t[:, 2]),
    )


def quenched_survival_dp(spec: KillingWalkSpec) -> SurvivalBracket:
    """Exact (or bracketed) survival curve P(tau > t) for t = 0..horizon.

    The recursion integrates the killing analytically: holding steps
    survive with factor (1 - r).  The returned curve is nonincreasing
    and starts at 1.
    """
    wp, w0, wm = _columns(spec.env)
    w0k = w0 * (1.0 - spec.r)
    i0 = spec.env.index(spec.start)
    if spec.covers_reachable:
        s = survival_kernel(wp, w0k, wm, i0, spec.horizon, 0.0)
        return SurvivalBracket(lower=s, upper=s, exact=True)
    lo = survival_kernel(wp, w0k, wm, i0, spec.horizon, 0.0)
    hi = survival_kernel(wp, w0k, wm, i0, spec.horizon, 1.0)
    return SurvivalBracket(lower=lo, upper=hi, exact=False)


def _interior(env: Environment, a: int, c: int, start: int):
    if not (env.lo <= a and c <= env.hi):
        raise OutOfWindow(f"interval [{a}, {c}] outside window [{env.lo}, {env.hi}]")
    if a >= c:
        raise ValidationError(f"interval endpoints must satisfy a < c, got [{a}, {c}]")
    if not a <= start <= c:
        raise OutOfWindow(f"start {start} outside interval [{a}, {c}]")
    wp, w0, wm = _columns(env.subwindow(a + 1, c - 1)) if c - a >= 2 else (None,) * 3
    return wp, w0, wm


def hitting_time_tail(
    env: Environment, a: int, c: int, start: int, n: int
) -> np.ndarray:
    """P(exit time of the interval (a, c) > t) for t = 0..n, killing-free.

    Both endpoints a and c absorb the walk; the tail records the
    probability that neither has been hit yet.  A start on the boundary
    is absorbed at time 0, so its tail is identically 0.
    """
    if n < 0:
        raise ValidationError(f"horizon must be nonnegative, got {n}")
    wp, w0, wm = _interior(env, a, c, start)
    out = np.zeros(n + 1, dtype=np.float64)
    if start == a or start == c:
        return out
    out[0] = 1.0
    if n == 0:
        return out
    state = np.ones(c - a - 1, dtype=np.float64)
    out[1:] = hitting_kernel(wp, w0, wm, state, start - (a + 1), n)
    return out


def median_exit_time(
    env: Environment, a: int, c: int, start: int, t_max: int = 10**8
) -> int:
    """Smallest t with P(exit time of (a, c) > t) <= 1/2.

    Advances the absorbed recursion in doubling chunks, so no horizon
    needs to be known in advance.

    Raises
    ------
    NumericalError
        If the median exceeds `t_max` steps.
    """
    wp, w0, wm = _interior(env, a, c, start)
    if start == a or start == c:
        return 0
    state = np.ones(c - a - 1, dtype=np.float64)
    idx = start - (a + 1)
    done = 0
    chunk = 64
    while done < t_max:
        steps = min(chunk, t_max - done)
        tail = hitting_kernel(wp, w0, wm, state, idx, steps)
        below = np.nonzero(tail <= 0.5)[0]
        if below.size:
            return done + int(below[0]) + 1
        done += steps
        chunk *= 2
    raise NumericalError(f"median exit time exceeds the cap of {t_max} steps")


def collapse_holding(env: Environment) -> Environment:
    """Remove holding: renormalize each site onto its two jump moves.

    Each triple (w_plus, w_zero, w_minus) maps to
    (w_plus / (w_plus + w_minus), 0, w_minus / (w_plus + w_minus)), so
    the drift statistic rho — and with it the whole potential landscape —
    is unchanged.  Idempotent.
    """
    t = env.triples
    move = t[:, 0] + t[:, 2]
    collapsed = np.column_stack(
        [t[:, 0] / move, np.zeros(env.n_sites), t[:, 2] / move]
    )
    return Environment(env.lo, env.hi, collapsed, seed=env.seed, law_digest=None)


def mc_walk(spec: KillingWalkSpec, seed: int) -> float:
    """Simulate one replica; return its extinction step, or SURVIVED.

    Step t (1-based) consumes the uniform at address 2(t-1) for the move
    (right if below w_plus, hold if below w_plus + w_zero, else left) and
    the uniform at address 2(t-1)+1 for the kill check on holds.  The
    whole trajectory is a pure function of (spec, seed).
    """
    if not spec.covers_reachable:
        raise WindowTooSmall("Monte Carlo needs the full reachable range in window")
    x = spec.start
    for t in range(1, spec.horizon + 1):
        wp, w0, _ = spec.env.site(x)
        u = uniform_at(seed, 2 * (t - 1))
        if u < wp:
            x += 1
        elif u < wp + w0:
            if uniform_at(seed, 2 * (t - 1) + 1) < spec.r:
                return float(t)
        else:
            x -= 1
    return SURVIVED


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo survival estimate with its binomial standard error."""

    p: float
    stderr: float
    survived: int
    replicas: int


def mc_survival(spec: KillingWalkSpec, seed: int, replicas: int) -> MCEstimate:
    """Estimate P(tau > horizon) over independent seeded replicas.

    Replica i follows exactly the trajectory of
    mc_walk(spec, derive_seed(seed, i)); the batch is evaluated with
    vectorized counter-based draws, so the estimate is independent of
    batching and worker count.
    """
    if replicas < 1:
        raise ValidationError(f"need at least one replica, got {replicas}")
    if not spec.covers_reachable:
        raise WindowTooSmall("Monte Carlo needs the full reachable range in window")
    seeds = derive_seeds(seed, np.arange(replicas))
    t3 = spec.env.triples
    wp_col, w0_col = t3[:, 0], t3[:, 1]
    x = np.full(replicas, spec.env.index(spec.start), dtype=np.int64)
    alive = np.ones(replicas, dtype=bool)
    for t in range(spec.horizon):
        u = uniform_for_seeds(seeds, 2 * t)
        p_up = wp_col[x]
        p_stay = w0_col[x]
        up = u < p_up
        hold = ~up & (u < p_up + p_stay)
        if spec.r > 0.0:
            kill = uniform_for_seeds(seeds, 2 * t + 1) < spec.r
            alive &= ~(hold & kill)
        x += up.astype(np.int64) - (~up & ~hold).astype(np.int64)
    survived = int(alive.sum())
    p = survived / replicas
    return MCEstimate(
        p=p,
        stderr=math.sqrt(p * (1.0 - p) / replicas),
        survived=survived,
        replicas=replicas,
    )


_MAX_ENUM_HORIZON = 14


def enumerate_paths(spec: KillingWalkSpec, chunk: int = 1 << 19) -> float:
    """Exhaustive 3^horizon path sum for P(tau > horizon).

    Every step sequence (right/hold/left per step) contributes the
    product of its step probabilities with holds weighted by (1 - r);
    partial sums are accumulated with compensated summation.  This is the
    oracle against which the DP is checked, so it shares no code with it.

    Raises
    ------
    HorizonTooLarge
        If horizon exceeds 14 (3^14 is about 4.8 million paths).
    """
    n = spec.horizon
    if n > _MAX_ENUM_HORIZON:
        raise HorizonTooLarge(f"horizon {n} exceeds {_MAX_ENUM_HORIZON}")
    if n == 0:
        return 1.0
    env = spec.env
    if not (env.lo <= spec.start - (n - 1) and spec.start + (n - 1) <= env.hi):
        raise WindowTooSmall(
            "path enumeration visits sites up to horizon - 1 from the start"
        )
    weighted = env.triples.copy()
    weighted[:, 1] *= 1.0 - spec.r
    i0 = env.index(spec.start)
    partials: list[float] = []
    total_paths = 3**n
    for first in range(0, total_paths, chunk):
        codes = np.arange(first, min(first + chunk, total_paths), dtype=np.int64)
        pos = np.full(codes.shape[0], i0, dtype=np.int64)
        w = np.ones(codes.shape[0], dtype=np.float64)
        for _ in range(n):
            digit = codes % 3
            codes //= 3
            w *= weighted[pos, digit]
            pos += (digit == 0).astype(np.int64) - (digit == 2).astype(np.int64)
        partials.append(math.fsum(w))
    return math.fsum(partials)
