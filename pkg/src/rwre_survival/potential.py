"""Potential landscape of an environment and its trap geometry.

The potential accumulates the per-site drift statistics ln rho_i into a
random landscape V.  With floor(x) the integer cell of x,

    V(x) = sum_{i=0}^{floor(x)} ln rho_i          floor(x) > 0
    V(x) = 0                                      floor(x) = 0
    V(x) = -sum_{i=floor(x)}^{-1} ln rho_i        floor(x) < 0

Note the i = 0 term enters every positive cell, so V jumps by
ln rho_0 + ln rho_1 between cell 0 and cell 1; V is constant on each
unit cell [k, k+1).  The walk drifts downhill in V, so survival under
killing on holding steps is governed by deep V-valleys whose interior is
free of dangerous holding sites; `detect_valley` and `scan_valleys`
locate such configurations at scale n, where widths are measured in
units of ln n and depths against h ln n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import Environment
from .errors import OutOfWindow, ValidationError

__all__ = [
    "potential_values",
    "potential",
    "BarrierHeights",
    "barrier_heights",
    "barrier_heights_brute",
    "ValleyDescriptor",
    "detect_valley",
    "scan_valleys",
]

# Nudge added inside floor() when a real-valued width lands on the integer
# grid, so w/ln(n) * ln(n) maps back to exactly w sites.
_GRID_NUDGE = 1e-9


def potential_values(env: Environment) -> np.ndarray:
    """Potential at every integer site of the window, row i for site lo+i.

    Requires the window to contain site 0 (the potential's anchor).
    """
    cached = env.__dict__.get("_potential_cache")
    if cached is not None:
        return cached
    if not env.lo <= 0 <= env.hi:
        raise OutOfWindow(
            f"potential needs site 0 inside the window, got [{env.lo}, {env.hi}]"
        )
    lr = env.log_rho()
    i0 = -env.lo
    v = np.empty(env.n_sites)
    v[i0] = 0.0
    right = np.cumsum(lr[i0:])
    v[i0 + 1 :] = right[1:]
    if i0 > 0:
        v[:i0] = -np.cumsum(lr[:i0][::-1])[::-1]
    object.__setattr__(env, "_potential_cache", v)
    return v


def potential(env: Environment, x: float) -> float:
    """Potential V(x); floor(x) must lie inside the window."""
    k = math.floor(x)
    v = potential_values(env)
    return float(v[env.index(k)])


@dataclass(frozen=True)
class BarrierHeights:
    """Directional barrier heights of V over an interval.

    `h_plus` is the largest uphill run seen left to right (the barrier
    felt by the walk escaping rightward), `h_minus` its mirror for
    leftward escape, and `h` the smaller of the two: the height that
    actually confines the walk.
    """

    h_plus: float
    h_minus: float

    @property
    def h(self) -> float:
        return min(self.h_plus, self.h_minus)


def _cell_range(env: Environment, a: float, c: float) -> np.ndarray:
    if not a < c:
        raise ValidationError(f"need a < c, got a={a}, c={c}")
    ka, kc = math.floor(a), math.floor(c)
    v = potential_values(env)
    return v[env.index(ka) : env.index(kc) + 1]


def barrier_heights(env: Environment, a: float, c: float) -> BarrierHeights:
    """Barrier heights of V over [a, c] by a single streaming pass.

    h_plus = max over pairs x <= y in [a, c] of V(y) - V(x) (maximal
    rise), h_minus the maximal drop; both reduce the minimax barrier
    definition max_b (extreme over [b, c] minus extreme over [a, b]) to
    running extrema.
    """
    vals = _cell_range(env, a, c)
    run_min = vals[0]
    run_max = vals[0]
    rise = 0.0
    drop = 0.0
    for v in vals[1:]:
        if v - run_min > rise:
            rise = v - run_min
        if run_max - v > drop:
            drop = run_max - v
        if v < run_min:
            run_min = v
        if v > run_max:
            run_max = v
    return BarrierHeights(h_plus=float(rise), h_minus=float(drop))


def barrier_heights_brute(env: Environment, a: float, c: float) -> BarrierHeights:
    """Quadratic reference evaluator for `barrier_heights` (kept as an
    independent oracle; prefer `barrier_heights` for real work)."""
    vals = _cell_range(env, a, c)
    m = len(vals)
    h_plus = 0.0
    h_minus = 0.0
    for b in range(m):
        left_min = vals[: b + 1].min()
        left_max = vals[: b + 1].max()
        right_max = vals[b:].max()
        right_min = vals[b:].min()
        h_plus = max(h_plus, float(right_max - left_min))
        h_minus = max(h_minus, float(left_max - right_min))
    return BarrierHeights(h_plus=h_plus, h_minus=h_minus)


@dataclass(frozen=True)
class ValleyDescriptor:
    """Outcome of a valley test at scale n.

    The tested interval is [left, right] = [center + floor(-b1 ln n),
    center + floor(b2 ln n)].  `safe` means every site in it has holding
    probability at most 1/k (k = inf demands exactly 0); `center_is_min`
    means V(center) attains the interval minimum (ties allowed);
    `wall_left`/`wall_right` are the endpoint elevations above the
    center, tested against the depth demand h ln n.  `holds` is the
    conjunction; such a configuration traps the walk for roughly n^h
    steps while killing is throttled to rate 1/k.
    """

    center: int
    b1: float
    b2: float
    h: float
    n: float
    k: float
    left: int
    right: int
    safe: bool
    center_is_min: bool
    wall_left: float
    wall_right: float
    holds: bool


def detect_valley(
    env: Environment,
    x: int,
    b1: float,
    b2: float,
    h: float,
    n: float,
    k: float,
) -> ValleyDescriptor:
    """Test whether site x centers a depth-h, holding-safe valley.

    Parameters
    ----------
    env : Environment
    x : int
        Candidate valley center.
    b1, b2 : float
        Left and right widths in units of ln n (positive).
    h : float
        Depth demand in units of ln n (positive).
    n : float
        Scale, n >= 2.
    k : float
        Holding-safety cutoff: sites qualify when w_zero <= 1/k;
        k = math.inf demands w_zero == 0.

    Returns
    -------
    ValleyDescriptor
    """
    if not n >= 2:
        raise ValidationError(f"scale must satisfy n >= 2, got {n}")
    if b1 <= 0 or b2 <= 0 or h <= 0:
        raise ValidationError("widths b1, b2 and depth h must be positive")
    if not k >= 1:
        raise ValidationError(f"safety cutoff must satisfy k >= 1, got {k}")
    ln_n = math.log(n)
    left = x + math.floor(-b1 * ln_n + _GRID_NUDGE)
    right = x + math.floor(b2 * ln_n + _GRID_NUDGE)
    if left < env.lo or right > env.hi:
        raise OutOfWindow(
            f"valley interval [{left}, {right}] outside window [{env.lo}, {env.hi}]"
        )
    cutoff = 0.0 if math.isinf(k) else 1.0 / k
    i, j = env.index(left), env.index(right)
    safe = bool(np.all(env.triples[i : j + 1, 1] <= cutoff))
    v = potential_values(env)
    segment = v[i : j + 1]
    vx = v[env.index(x)]
    center_is_min = bool(vx <= segment.min() + 1e-12)
    wall_left = float(v[i] - vx)
    wall_right = float(v[j] - vx)
    depth = h * ln_n - 1e-12  # same tie tolerance as the center test
    holds = safe and center_is_min and wall_left >= depth and wall_right >= depth
    return ValleyDescriptor(
        center=int(x), b1=float(b1), b2=float(b2), h=float(h), n=float(n),
        k=float(k), left=int(left), right=int(right), safe=safe,
        center_is_min=center_is_min, wall_left=wall_left,
        wall_right=wall_right, holds=holds,
    )


def scan_valleys(env: Environment, n: float, k: float, h: float) -> list[ValleyDescriptor]:
    """Enumerate all valleys of the window at scale n.

    Widths run over whole numbers of sites (converted to b = sites/ln n),
    centers over every site whose interval fits in the window.  Returns
    only descriptors with holds=True, ordered by (center, left width,
    right width); each is re-verifiable via `detect_valley`.
    """
    if not n >= 2:
        raise ValidationError(f"scale must satisfy n >= 2, got {n}")
    ln_n = math.log(n)
    cutoff = 0.0 if math.isinf(k) else 1.0 / k
    v = potential_values(env)
    safe_site = env.triples[:, 1] <= cutoff
    depth = h * ln_n - 1e-12  # same tie tolerance as detect_valley
    found: list[ValleyDescriptor] = []
    for x in range(env.lo, env.hi + 1):
        ix = env.index(x)
        vx = v[ix]
        max_w1 = x - env.lo
        max_w2 = env.hi - x
        for w1 in range(1, max_w1 + 1):
            i = ix - w1
            if not safe_site[i : ix + 1].all():
                break  # wider left intervals only add more unsafe sites
            if v[i] - vx < depth:
                continue
            if v[i : ix + 1].min() < vx - 1e-12:
                continue
            for w2 in range(1, max_w2 + 1):
                j = ix + w2
                if not safe_site[ix : j + 1].all():
                    break
                if v[j] - vx < depth:
                    continue
                if v[ix : j + 1].min() < vx - 1e-12:
                    continue
                found.append(
                    ValleyDescriptor(
                        center=x, b1=w1 / ln_n, b2=w2 / ln_n, h=float(h),
                        n=float(n), k=float(k), left=x - w1, right=x + w2,
                        safe=True, center_is_min=True,
                        wall_left=float(v[i] - vx), wall_right=float(v[j] - vx),
                        holds=True,
                    )
                )
    return found
