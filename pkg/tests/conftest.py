"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from rwre_survival import Atom, SiteLaw
from rwre_survival.kernels import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Compile (or load from cache) the numba kernels once per session.

    Keeps the runtime budgets asserted in test_acceptance.py about the
    algorithms rather than about JIT compilation.
    """
    warm_up()


@pytest.fixture(scope="session")
def law_a() -> SiteLaw:
    """Three-atom benchmark law with drift ratio 3 and one holding atom.

    Two drift atoms (weight 0.4 each, holding 0) with rho = 1/3 and
    rho = 3, plus one symmetric holding atom (weight 0.2, holding 0.5).
    Its closed forms: tilt roots ln2/ln3 on both sides, optimal valley
    cost 2*ln2/ln3 at h = 1.
    """
    return SiteLaw(
        atoms=(
            Atom(w_plus=0.75, w_zero=0.0, w_minus=0.25, weight=0.4),
            Atom(w_plus=0.25, w_zero=0.0, w_minus=0.75, weight=0.4),
            Atom(w_plus=0.25, w_zero=0.5, w_minus=0.25, weight=0.2),
        )
    )


@pytest.fixture(scope="session")
def holding_only_law() -> SiteLaw:
    """Single-atom law whose only atom holds with probability 0.5."""
    return SiteLaw(atoms=(Atom(w_plus=0.25, w_zero=0.5, w_minus=0.25, weight=1.0),))


def random_ue_law(rng: np.random.Generator, holding_atoms: int = 1) -> SiteLaw:
    """Random discrete uniformly elliptic law with drift on both sides.

    Two no-holding drift atoms (one uphill, one downhill) plus
    `holding_atoms` atoms with strictly positive holding probability.
    All jump probabilities stay at least 0.1, all weights at least 0.1.
    """
    u = rng.uniform(0.55, 0.8)
    atoms = [
        (1.0 - u, 0.0, u),  # rho > 1
        (u, 0.0, 1.0 - u),  # rho < 1
    ]
    for _ in range(holding_atoms):
        w0 = rng.uniform(0.2, 0.6)
        split = rng.uniform(0.3, 0.7)
        atoms.append(((1.0 - w0) * split, w0, (1.0 - w0) * (1.0 - split)))
    raw = rng.uniform(0.1, 1.0, size=len(atoms))
    weights = raw / raw.sum()
    return SiteLaw(
        atoms=tuple(
            Atom(w_plus=a[0], w_zero=a[1], w_minus=a[2], weight=float(w))
            for a, w in zip(atoms, weights)
        )
    )
