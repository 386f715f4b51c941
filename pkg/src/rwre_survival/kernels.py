"""Compiled dynamic-programming kernels.

Both kernels advance one-step linear recursions over a window of sites.
They are compiled with numba (nogil), so independent environments can run
concurrently under a thread pool, and they stay cached across processes.

`survival_kernel` computes the killed-walk survival curve at one site.
Writing f_t(x) for the probability of surviving t more steps started at
x (holding steps survive with factor (1 - r)), the recursion is

    f_t(x) = w_plus(x) f_{t-1}(x+1) + w_minus(x) f_{t-1}(x-1)
             + w_zero(x) (1 - r) f_{t-1}(x),      f_0 = 1.

Only the cone of cells that can influence the start site within the
remaining steps is updated, so the cost is O(sum_t min(window, 2t)).
References that fall off the window edge read a constant virtual value:
0 treats escape as death (lower bound on the true survival), 1 treats
escape as permanent survival (upper bound).  When the window covers the
full reachable range [start - n, start + n], no reference leaves it and
either run is exact.

`hitting_kernel` advances the absorbed-walk recursion on a fixed interior
(both interval endpoints absorbing, no killing) and can be called in
chunks: the state array carries the interior probabilities between calls,
so open-ended iteration (e.g. hunting for a median exit time) needs no
horizon up front.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["survival_kernel", "hitting_kernel", "warm_up"]


@njit(cache=True, nogil=True)
def survival_kernel(w_plus, w_zero_kill, w_minus, i0, n, vb):
    """Survival probabilities s[0..n] at array index i0.

    Parameters
    ----------
    w_plus, w_zero_kill, w_minus : float64[:]
        Per-site step probabilities; w_zero_kill is w_zero * (1 - r).
    i0 : int
        Array index of the start site.
    n : int
        Horizon (number of steps).
    vb : float
        Virtual value read when a reference leaves the window
        (0.0 = escape dies, 1.0 = escape survives).

    Returns
    -------
    float64[:]
        s[t] = survival probability over t steps, t = 0..n.
    """
    m = w_plus.shape[0]
    f = np.ones(m, dtype=np.float64)
    g = np.empty(m, dtype=np.float64)
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = 1.0
    for t in range(1, n + 1):
        lo = i0 - (n - t)
        hi = i0 + (n - t)
        if lo < 0:
            lo = 0
        if hi > m - 1:
            hi = m - 1
        for x in range(lo, hi + 1):
            up = f[x + 1] if x + 1 < m else vb
            dn = f[x - 1] if x - 1 >= 0 else vb
            g[x] = w_plus[x] * up + w_minus[x] * dn + w_zero_kill[x] * f[x]
        f, g = g, f
        out[t] = f[i0]
    return out


@njit(cache=True, nogil=True)
def hitting_kernel(w_plus, w_zero, w_minus, state, start, steps):
    """Advance the absorbed-interval recursion `steps` steps in place.

    Parameters
    ----------
    w_plus, w_zero, w_minus : float64[:]
        Step probabilities of the interior sites (both neighbours of the
        interior are absorbing: references off either end read 0).
    state : float64[:]
        Interior not-yet-absorbed probabilities; mutated in place so a
        follow-up call continues where this one stopped.
    start : int
        Interior array index whose tail value is recorded.
    steps : int
        Number of steps to advance.

    Returns
    -------
    float64[:]
        tail[j] = state value at `start` after j+1 further steps.
    """
    m = state.shape[0]
    out = np.empty(steps, dtype=np.float64)
    h = np.empty(m, dtype=np.float64)
    for t in range(steps):
        for x in range(m):
            up = state[x + 1] if x + 1 < m else 0.0
            dn = state[x - 1] if x - 1 >= 0 else 0.0
            h[x] = w_plus[x] * up + w_minus[x] * dn + w_zero[x] * state[x]
        for x in range(m):
            state[x] = h[x]
        out[t] = state[start]
    return out


def warm_up() -> None:
    """Force JIT compilation of both kernels on tiny inputs.

    Call once before timing-sensitive runs so compilation latency does
    not pollute measured runtimes.
    """
    w = np.full(3, 1.0 / 3.0)
    survival_kernel(w, w, w, 1, 2, 0.0)
    survival_kernel(w, w, w, 1, 2, 1.0)
    state = np.ones(3)
    hitting_kernel(w, w, w, state, 1, 2)
