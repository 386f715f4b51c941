"""Counter-based uniform random streams.

Every draw is a pure function of (seed, coordinates), so a value at site x
or at (replica, step) never depends on how many other values were drawn,
in which order, or on how work was split across workers.  Enlarging a
sampled window, re-chunking a Monte Carlo batch, or changing the thread
count therefore reproduces previously seen values bit for bit.

The generator is the splitmix64 finalizer applied to a running key.  Each
coordinate folds into the key via a distinct odd multiplier before the
finalizer scrambles it; the top 53 bits become a uniform in [0, 1).
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream_key", "uniform_at", "derive_seed", "derive_seeds", "uniform_for_seeds"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_COORD = np.uint64(0xD6E8FEB86659FD93)
_INV_2_53 = float(2.0**-53)


def _mix64(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    # splitmix64 finalizer; uint64 arithmetic wraps mod 2**64 by design.
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, *coords: int) -> int:
    """Collapse a seed and integer coordinates into a 64-bit stream key.

    Parameters
    ----------
    seed : int
        Base seed; any Python integer (reduced mod 2**64).
    *coords : int
        Stream coordinates, e.g. an environment index or a replica index.

    Returns
    -------
    int
        Key usable as the ``seed`` of a further stream.
    """
    with np.errstate(over="ignore"):
        k = _mix64(np.uint64(seed % (1 << 64)) + _GAMMA)
        for c in coords:
            k = _mix64((k + np.uint64(c % (1 << 64)) * _COORD) + _GAMMA)
    return int(k)


def uniform_at(seed: int, index: np.ndarray | int) -> np.ndarray | float:
    """Uniform [0, 1) draws addressed by integer index.

    Parameters
    ----------
    seed : int
        Stream key; see `stream_key`.
    index : int or ndarray of int
        Addresses of the requested draws.  Negative indices are valid
        (they wrap into distinct uint64 counters).

    Returns
    -------
    float or ndarray of float
        One uniform per index, independent of any other index.
    """
    idx = np.asarray(index, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        k = np.uint64(stream_key(seed))
        z = _mix64(k + idx * _COORD + _GAMMA)
    u = (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
    if np.isscalar(index) or np.ndim(index) == 0:
        return float(u)
    return u


def derive_seed(seed: int, *coords: int) -> int:
    """Deterministic child seed for a substream (alias of `stream_key`)."""
    return stream_key(seed, *coords)


def derive_seeds(seed: int, coords: np.ndarray) -> np.ndarray:
    """Vectorized `derive_seed` over one coordinate axis.

    Element i equals derive_seed(seed, coords[i]); returned as uint64 for
    direct use with `uniform_for_seeds`.
    """
    c = np.asarray(coords, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        base = np.uint64(stream_key(seed))
        return _mix64(base + c * _COORD + _GAMMA)


def uniform_for_seeds(seeds: np.ndarray, index: np.ndarray | int) -> np.ndarray:
    """Element-wise `uniform_at`: one draw per (seed, index) pair.

    Parameters
    ----------
    seeds : ndarray of uint64/int
        One stream seed per element (e.g. from `derive_seeds`).
    index : int or ndarray of int
        Common draw address, or one address per seed (broadcast).

    Returns
    -------
    ndarray of float
        uniform_for_seeds(seeds, i)[j] == uniform_at(int(seeds[j]), i).
    """
    s = np.asarray(seeds, dtype=np.uint64)
    idx = np.asarray(index, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        k = _mix64(s + _GAMMA)
        z = _mix64(k + idx * _COORD + _GAMMA)
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
