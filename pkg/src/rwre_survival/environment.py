"""Sampled environments: windows of i.i.d. site triples.

An environment is a finite window [lo, hi] of integer sites, each
carrying a step triple (w_plus, w_zero, w_minus) drawn i.i.d. from a
`SiteLaw`.  Sampling is addressed per site through a counter-based
stream, so the triple at site x depends only on (seed, x): enlarging a
window re-produces previously sampled sites exactly.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import MalformedLaw, OutOfWindow, ValidationError
from .law import SiteLaw
from .streams import uniform_at

__all__ = ["Environment", "sample_window", "parse_environment", "format_environment",
           "enumerate_environments", "valley_environment"]


@dataclass(frozen=True)
class Environment:
    """Window of site triples on the integer interval [lo, hi].

    `triples` has shape (hi - lo + 1, 3) with columns (w_plus, w_zero,
    w_minus); row i describes site lo + i.  `seed` and `law_digest` are
    optional provenance for sampled windows.
    """

    lo: int
    hi: int
    triples: np.ndarray = field(repr=False)
    seed: int | None = None
    law_digest: str | None = None

    def __post_init__(self) -> None:
        if self.hi < self.lo:
            raise ValidationError(f"empty window [{self.lo}, {self.hi}]")
        t = np.asarray(self.triples, dtype=np.float64)
        if t.shape != (self.hi - self.lo + 1, 3):
            raise ValidationError(
                f"triples shape {t.shape} does not match window [{self.lo}, {self.hi}]"
            )
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-12):
            raise ValidationError("site triples must be probability vectors")
        object.__setattr__(self, "triples", t)

    @property
    def n_sites(self) -> int:
        return self.hi - self.lo + 1

    def index(self, x: int) -> int:
        """Array row of site x; raises OutOfWindow outside [lo, hi]."""
        if not self.lo <= x <= self.hi:
            raise OutOfWindow(f"site {x} outside window [{self.lo}, {self.hi}]")
        return int(x) - self.lo

    def site(self, x: int) -> tuple[float, float, float]:
        """Step triple (w_plus, w_zero, w_minus) at site x."""
        row = self.triples[self.index(x)]
        return (float(row[0]), float(row[1]), float(row[2]))

    def log_rho(self) -> np.ndarray:
        """ln(w_minus / w_plus) per site, row i for site lo + i."""
        cached = self.__dict__.get("_log_rho_cache")
        if cached is None:
            cached = np.log(self.triples[:, 2] / self.triples[:, 0])
            object.__setattr__(self, "_log_rho_cache", cached)
        return cached

    def subwindow(self, lo: int, hi: int) -> "Environment":
        """Restriction to [lo, hi] (must lie inside the current window)."""
        i, j = self.index(lo), self.index(hi)
        return Environment(lo, hi, self.triples[i : j + 1].copy(),
                           seed=self.seed, law_digest=self.law_digest)


def sample_window(law: SiteLaw, seed: int, lo: int, hi: int) -> Environment:
    """Sample an i.i.d. environment on [lo, hi].

    The atom chosen at site x is a pure function of (seed, x): windows
    sampled with the same seed agree on their overlap regardless of
    their extent.

    Parameters
    ----------
    law : SiteLaw
    seed : int
        Stream seed; mandatory (no wall-clock default anywhere).
    lo, hi : int
        Window bounds, lo <= hi.

    Returns
    -------
    Environment
    """
    if hi < lo:
        raise ValidationError(f"need lo <= hi, got [{lo}, {hi}]")
    cum = np.cumsum([a.weight for a in law.atoms])
    cum[-1] = 1.0  # guard the top edge against rounding
    table = np.array([a.triple() for a in law.atoms])
    sites = np.arange(lo, hi + 1, dtype=np.int64)
    u = uniform_at(seed, sites)
    picks = np.searchsorted(cum, u, side="right")
    return Environment(lo, hi, table[picks], seed=seed, law_digest=law.digest())


def valley_environment(
    half_width: int,
    depth: float,
    holding: float = 0.0,
    wall_sites: int | None = None,
) -> Environment:
    """Deterministic symmetric potential valley on [-half_width, half_width].

    Sites right of the center push the walk back left and vice versa, so
    the potential rises from 0 at the center cell to `depth` over the
    first `wall_sites` sites on each side and stays flat beyond.  With
    the default wall_sites = half_width the rise is linear across the
    whole window; small wall_sites concentrate it next to the center, so
    the full depth is the barrier any escape must climb.  Every site gets
    the same holding probability.

    Parameters
    ----------
    half_width : int
        Positive half-width of the window.
    depth : float
        Potential height of both valley walls, positive.
    holding : float
        Common holding probability in [0, 1), 0 for a holding-free
        valley.
    wall_sites : int, optional
        Number of sites over which each wall rises, between 1 and
        half_width (default half_width).

    Returns
    -------
    Environment
    """
    if half_width < 1:
        raise ValidationError(f"half_width must be >= 1, got {half_width}")
    if depth <= 0:
        raise ValidationError(f"depth must be positive, got {depth}")
    if not 0.0 <= holding < 1.0:
        raise ValidationError(f"holding must be in [0, 1), got {holding}")
    w = half_width if wall_sites is None else int(wall_sites)
    if not 1 <= w <= half_width:
        raise ValidationError(
            f"wall_sites must be in [1, {half_width}], got {wall_sites}"
        )
    sites = np.arange(-half_width, half_width + 1)
    slope = depth / w
    on_wall = (np.abs(sites) >= 1) & (np.abs(sites) <= w)
    log_rho = np.where(on_wall, np.sign(sites) * slope, 0.0)
    move = 1.0 - holding
    w_plus = move / (1.0 + np.exp(log_rho))
    w_minus = move - w_plus
    triples = np.column_stack([w_plus, np.full(sites.shape, holding), w_minus])
    return Environment(-half_width, half_width, triples)


def enumerate_environments(law: SiteLaw, lo: int, hi: int) -> Iterator[tuple[float, Environment]]:
    """Yield every atom assignment on [lo, hi] with its probability.

    Exhausts all len(atoms)**(hi - lo + 1) environments; meant for small
    windows where exact annealed averages are wanted.
    """
    n_sites = hi - lo + 1
    table = np.array([a.triple() for a in law.atoms])
    weights = np.array([a.weight for a in law.atoms])
    for combo in itertools.product(range(len(law.atoms)), repeat=n_sites):
        picks = np.array(combo, dtype=np.int64)
        prob = float(np.prod(weights[picks]))
        yield prob, Environment(lo, hi, table[picks], law_digest=law.digest())


# ---------------------------------------------------------------------------
# Plain-text serialization: "offset <lo>" header then one "w_plus w_zero
# w_minus" line per site in window order.

_OFFSET_RE = re.compile(r"^offset\s+(-?\d+)$")


def parse_environment(text: str) -> Environment:
    """Parse an environment from its plain-text serialization."""
    lo: int | None = None
    rows: list[tuple[float, float, float]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if lo is None:
            m = _OFFSET_RE.match(line)
            if not m:
                raise MalformedLaw(f"expected 'offset <lo>' header, got {raw!r}")
            lo = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != 3:
            raise MalformedLaw(f"expected 3 columns, got {len(parts)}: {raw!r}")
        try:
            rows.append(tuple(float(p) for p in parts))  # type: ignore[arg-type]
        except ValueError as exc:
            raise MalformedLaw(f"non-numeric entry in line {raw!r}") from exc
    if lo is None or not rows:
        raise MalformedLaw("environment text has no header or no sites")
    return Environment(lo, lo + len(rows) - 1, np.array(rows))


def format_environment(env: Environment, comment: str | None = None) -> str:
    """Serialize an environment to the format accepted by `parse_environment`."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"offset {env.lo}")
    for row in env.triples:
        lines.append("%.17g %.17g %.17g" % (row[0], row[1], row[2]))
    return "\n".join(lines) + "\n"
