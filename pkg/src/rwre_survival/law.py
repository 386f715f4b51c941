"""Discrete site laws and their tail statistics.

A site law is a finite i.i.d. law for the per-site step triple
(w_plus, w_zero, w_minus): the probabilities of stepping right, holding,
and stepping left.  The drift statistic of a site is

    rho = w_minus / w_plus,

so ln rho > 0 means the site pushes the walk left.  Everything downstream
(potential landscape, decay exponents, survival regimes) is controlled by
the joint tails of ln rho and the holding probability w_zero:

    p_n^+  = P(ln rho > 0  and w_zero <= 1/n)
    p_n^-  = P(ln rho < 0  and w_zero <= 1/n)
    p_n^0  = P(ln rho = 0  and w_zero <= 1/n)

together with the extreme drift magnitudes on the conditioned sets.  The
asymptotics of min(p_n^+, p_n^-) classify the survival regime:

    polynomial     min p_n stabilizes at a positive constant
    intermediate   -ln min p_n ~ coeff * (ln n)^kappa
    stretched      -ln min p_n ~ coeff * n^kappa
    unclassified   min p_n hits zero at a finite n
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EllipticityViolation,
    InvalidSequence,
    MalformedLaw,
    ValidationError,
)

__all__ = [
    "Atom",
    "SiteLaw",
    "TailQuantities",
    "Regime",
    "LimitQuantities",
    "ellipticity_floor",
    "validate_ue",
    "tail_quantities",
    "limit_quantities",
    "construct_law",
    "tail_pow",
    "tail_geo",
    "tail_explog",
    "tail_exppow",
    "tail_family",
    "parse_law",
    "format_law",
    "parse_construct_line",
]

# Atoms whose |ln rho| falls below this are treated as driftless.
NEUTRAL_TOL = 1e-12
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Atom:
    """One atom of a site law: a step triple and its probability weight."""

    w_plus: float
    w_zero: float
    w_minus: float
    weight: float

    def triple(self) -> tuple[float, float, float]:
        return (self.w_plus, self.w_zero, self.w_minus)


@dataclass(frozen=True)
class SiteLaw:
    """Finite i.i.d. site law, validated on construction.

    Raises
    ------
    MalformedLaw
        If any triple or the weights fail normalization, or any
        probability is negative.
    EllipticityViolation
        If some atom has w_plus = 0 or w_minus = 0 (the walk must be
        uniformly elliptic: jump probabilities bounded away from zero).
    """

    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise MalformedLaw("law has no atoms")
        for a in self.atoms:
            parts = (a.w_plus, a.w_zero, a.w_minus, a.weight)
            if any(p < 0 for p in parts) or any(not math.isfinite(p) for p in parts):
                raise MalformedLaw(f"negative or non-finite entry in atom {a}")
            if a.weight <= 0:
                raise MalformedLaw(f"atom weight must be positive, got {a.weight}")
            if abs(a.w_plus + a.w_zero + a.w_minus - 1.0) > _SUM_TOL:
                raise MalformedLaw(f"step triple of {a} does not sum to 1")
        if abs(math.fsum(a.weight for a in self.atoms) - 1.0) > _SUM_TOL:
            raise MalformedLaw("atom weights do not sum to 1")
        for a in self.atoms:
            if min(a.w_plus, a.w_minus) <= 0.0:
                raise EllipticityViolation(
                    f"atom {a.triple()} has a vanishing jump probability"
                )

    # Cached column views used by the vectorized tail computations.
    @property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cached = self.__dict__.get("_arrays_cache")
        if cached is None:
            w0 = np.array([a.w_zero for a in self.atoms])
            wt = np.array([a.weight for a in self.atoms])
            lr = np.log(
                np.array([a.w_minus for a in self.atoms])
                / np.array([a.w_plus for a in self.atoms])
            )
            cached = (w0, wt, lr)
            object.__setattr__(self, "_arrays_cache", cached)
        return cached

    @property
    def ellipticity_floor(self) -> float:
        """Smallest jump probability over all atoms (positive by validation)."""
        return min(min(a.w_plus, a.w_minus) for a in self.atoms)

    @property
    def holding_floor(self) -> float:
        """Smallest holding probability over all atoms."""
        return min(a.w_zero for a in self.atoms)

    def log_rho(self) -> np.ndarray:
        """ln(w_minus / w_plus) per atom, in atom order."""
        return self._arrays[2].copy()

    def digest(self) -> str:
        """Stable content hash of the law (used for run provenance)."""
        text = "\n".join(
            "%.17g %.17g %.17g %.17g" % (a.w_plus, a.w_zero, a.w_minus, a.weight)
            for a in self.atoms
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def ellipticity_floor(law: SiteLaw) -> float:
    """Uniform ellipticity constant of the law.

    Returns
    -------
    float
        min over atoms of min(w_plus, w_minus); guaranteed positive for
        any validated `SiteLaw`.
    """
    return law.ellipticity_floor


def validate_ue(law: SiteLaw | Iterable) -> float:
    """Validate a site law and return its uniform-ellipticity floor.

    Accepts a built `SiteLaw` (already validated) or raw atom rows
    (w_plus, w_zero, w_minus, weight), which are validated here by
    construction.

    Returns
    -------
    float
        The largest valid ellipticity floor: min over atoms of
        min(w_plus, w_minus).

    Raises
    ------
    MalformedLaw
        If triples or weights fail normalization.
    EllipticityViolation
        If any atom has a vanishing jump probability.
    """
    if not isinstance(law, SiteLaw):
        law = SiteLaw(tuple(Atom(*row) for row in law))
    return law.ellipticity_floor


@dataclass(frozen=True)
class TailQuantities:
    """Sign/holding tail statistics of a law at cutoff 1/n.

    All quantities condition on {w_zero <= 1/n}.  `p_plus`, `p_minus` and
    `p_zero` are unconditional probabilities of that event intersected
    with {ln rho > 0}, {ln rho < 0} and {ln rho = 0}.  `eps_plus` is the
    largest value of ln rho among conditioned atoms with ln rho > 0, and
    `delta_plus` the smallest value of ln rho among conditioned atoms
    with ln rho >= 0 (so a driftless atom pins it at 0); the minus-side
    fields mirror this for -ln rho.  Extremes over an empty atom set are
    NaN.  `empty` flags that no atom at all passes the cutoff.
    """

    n: float
    p_plus: float
    p_minus: float
    p_zero: float
    p_safe: float
    eps_plus: float
    eps_minus: float
    delta_plus: float
    delta_minus: float
    empty: bool


def tail_quantities(law: SiteLaw, n: float) -> TailQuantities:
    """Compute `TailQuantities` for the holding cutoff w_zero <= 1/n.

    Parameters
    ----------
    law : SiteLaw
    n : float
        Cutoff scale, n >= 1.  math.inf is allowed and selects atoms
        with w_zero == 0.

    Returns
    -------
    TailQuantities
    """
    if not n >= 1:
        raise ValidationError(f"cutoff scale must satisfy n >= 1, got {n}")
    w0, wt, lr = law._arrays
    cutoff = 0.0 if math.isinf(n) else 1.0 / n
    safe = w0 <= cutoff
    pos = safe & (lr > NEUTRAL_TOL)
    neg = safe & (lr < -NEUTRAL_TOL)
    neu = safe & (np.abs(lr) <= NEUTRAL_TOL)

    def _sum(mask: np.ndarray) -> float:
        return float(wt[mask].sum())

    def _max(values: np.ndarray, mask: np.ndarray) -> float:
        return float(values[mask].max()) if mask.any() else math.nan

    # Smallest nonnegative drift magnitude; neutral atoms clamp it to 0.
    def _min_nonneg(values: np.ndarray, mask: np.ndarray) -> float:
        keep = mask & (values >= -NEUTRAL_TOL)
        if not keep.any():
            return math.nan
        return float(np.maximum(values[keep], 0.0).min())

    return TailQuantities(
        n=float(n),
        p_plus=_sum(pos),
        p_minus=_sum(neg),
        p_zero=_sum(neu),
        p_safe=_sum(safe),
        eps_plus=_max(lr, pos),
        eps_minus=_max(-lr, neg),
        delta_plus=_min_nonneg(lr, safe),
        delta_minus=_min_nonneg(-lr, safe),
        empty=not bool(safe.any()),
    )


@dataclass(frozen=True)
class Regime:
    """Survival decay regime of a law.

    kind is one of "polynomial", "intermediate", "stretched",
    "unclassified".  For the two decaying regimes `kappa` is the fitted
    tail exponent and `coeff` the fitted coefficient of the leading term
    of -ln min(p_n^+, p_n^-) (in (ln n)^kappa, resp. n^kappa units).
    """

    kind: str
    kappa: float | None = None
    coeff: float | None = None


@dataclass(frozen=True)
class LimitQuantities:
    """Large-n limits of the tail quantities, with a regime call.

    a_plus = lim ln p_n^- / ln p_n^+ and a0_plus = lim ln p_n^0 / ln p_n^+
    (the minus-side fields swap numerator and denominator), evaluated at
    the top of the grid with the conventions 1/0 = inf, ln 0 = -inf.
    `unstable` lists fields whose value still moved by more than 0.1%
    over the last decade of the grid.
    """

    n_max: float
    eps_plus: float
    eps_minus: float
    delta_plus: float
    delta_minus: float
    a_plus: float
    a_minus: float
    a0_plus: float
    a0_minus: float
    min_p_limit: float
    regime: Regime
    unstable: tuple[str, ...]
    grid: np.ndarray = field(repr=False)
    min_p_series: np.ndarray = field(repr=False)
    fit_diagnostics: dict | None = field(default=None, repr=False)


def _log_ratio(num_p: float, den_p: float) -> float:
    """ln(num_p)/ln(den_p) under the conventions ln 0 = -inf, 1/0 = inf."""
    if num_p == den_p:
        return 1.0
    ln_num = math.log(num_p) if num_p > 0 else -math.inf
    ln_den = math.log(den_p) if den_p > 0 else -math.inf
    if ln_den == 0.0:
        return math.inf if ln_num != 0.0 else 1.0
    if math.isinf(ln_num) and math.isinf(ln_den):
        return 1.0
    return ln_num / ln_den


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Plain least squares line fit; returns (slope, intercept, rms)."""
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2)))


def limit_quantities(law: SiteLaw, n_max: float = 10**6) -> LimitQuantities:
    """Evaluate tail quantities on a geometric n-grid and classify the law.

    Parameters
    ----------
    law : SiteLaw
    n_max : float
        Top of the grid, n_max >= 100.  For laws built by `construct_law`
        keep n_max at or below the construction's truncation index N:
        beyond it the discrete tails hit zero by truncation and the law
        is (correctly, but unhelpfully) reported unclassified.

    Returns
    -------
    LimitQuantities
    """
    if not n_max >= 100:
        raise ValidationError(f"n_max must be >= 100, got {n_max}")
    decades = math.log10(n_max)
    npts = max(48, int(round(24 * decades)))
    grid = np.unique(np.rint(np.geomspace(1.0, float(n_max), npts)).astype(np.int64))
    tails = [tail_quantities(law, int(n)) for n in grid]
    p_plus = np.array([t.p_plus for t in tails])
    p_minus = np.array([t.p_minus for t in tails])
    p_zero = np.array([t.p_zero for t in tails])
    min_p = np.minimum(p_plus, p_minus)

    last = tails[-1]
    series = {
        "eps_plus": np.array([t.eps_plus for t in tails]),
        "eps_minus": np.array([t.eps_minus for t in tails]),
        "delta_plus": np.array([t.delta_plus for t in tails]),
        "delta_minus": np.array([t.delta_minus for t in tails]),
        "min_p": min_p,
    }
    decade_mask = grid >= grid[-1] / 10
    unstable: list[str] = []
    for name, vals in series.items():
        tail_vals = vals[decade_mask]
        if np.isnan(tail_vals).any():
            if not np.isnan(tail_vals).all():
                unstable.append(name)
            continue
        scale = np.max(np.abs(tail_vals))
        if scale > 0 and (np.max(tail_vals) - np.min(tail_vals)) / scale > 1e-3:
            unstable.append(name)

    diagnostics: dict | None = None
    if np.any(min_p == 0.0):
        regime = Regime(kind="unclassified")
    elif "min_p" not in unstable:
        regime = Regime(kind="polynomial", coeff=float(min_p[-1]))
    else:
        # Fit the double-log tail over the top two decades (n >= 3 so that
        # ln ln n is defined), in both candidate coordinate systems.
        window = (grid >= max(3, grid[-1] / 100)) & (min_p > 0) & (min_p < 1)
        x_n = np.log(grid[window].astype(float))
        y = np.log(-np.log(min_p[window]))
        ki, bi, ri = _ols(np.log(x_n), y)
        ks, bs, rs = _ols(x_n, y)
        diagnostics = {
            "intermediate": {"kappa": ki, "coeff": math.exp(bi), "rms": ri},
            "stretched": {"kappa": ks, "coeff": math.exp(bs), "rms": rs},
        }
        if ri <= rs:
            regime = Regime(kind="intermediate", kappa=ki, coeff=math.exp(bi))
        else:
            regime = Regime(kind="stretched", kappa=ks, coeff=math.exp(bs))

    return LimitQuantities(
        n_max=float(n_max),
        eps_plus=last.eps_plus,
        eps_minus=last.eps_minus,
        delta_plus=last.delta_plus,
        delta_minus=last.delta_minus,
        a_plus=_log_ratio(p_minus[-1], p_plus[-1]),
        a_minus=_log_ratio(p_plus[-1], p_minus[-1]),
        a0_plus=_log_ratio(p_zero[-1], p_plus[-1]),
        a0_minus=_log_ratio(p_zero[-1], p_minus[-1]),
        min_p_limit=float(min_p[-1]),
        regime=regime,
        unstable=tuple(unstable),
        grid=grid,
        min_p_series=min_p,
        fit_diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Constructed laws with prescribed sign tails.


def _drift_pair(hold: float, eps: float) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """Mirrored step triples with holding probability `hold` and drift
    ratio w_minus/w_plus equal to (1+eps)^{-1} resp. (1+eps)."""
    move = 1.0 - hold
    heavy = move * (1.0 + eps) / (2.0 + eps)
    light = move / (2.0 + eps)
    return (heavy, hold, light), (light, hold, heavy)


def construct_law(
    q: Callable[[int], float] | Sequence[float],
    eps: float,
    n0: int,
    n_max: int,
) -> SiteLaw:
    """Build a law whose sign tails follow a prescribed sequence.

    For each n in [n0, n_max] the law carries a mirrored pair of atoms
    with holding probability 1/n and drift magnitude |ln rho| =
    ln(1 + eps), weighted so that for every m in [n0, n_max]

        p_m^+ = p_m^- = q(m) / (2 q(n0)).

    The tail mass beyond the truncation index n_max is folded into the
    last atom pair.  For n0 = 1 a literal holding probability of 1/1
    would leave no jump mass, so the n = 1 pair uses holding probability
    2/3 instead (any value in (1/2, 1) preserves every tail identity).

    Parameters
    ----------
    q : callable or sequence
        Positive nonincreasing target sequence.  A callable is evaluated
        at the integers n0..n_max+1; a sequence must cover those indices
        (index 0 is q(n0)).
    eps : float
        Drift strength, eps > 0.
    n0 : int
        First index of the sequence, n0 >= 1.
    n_max : int
        Truncation index N >= n0.

    Returns
    -------
    SiteLaw

    Raises
    ------
    InvalidSequence
        If the evaluated sequence is not positive and nonincreasing.
    """
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    if n0 < 1 or n_max < n0:
        raise ValidationError(f"need 1 <= n0 <= n_max, got n0={n0}, N={n_max}")
    ns = list(range(n0, n_max + 2))
    if callable(q):
        qs = [float(q(n)) for n in ns]
    else:
        qs = [float(v) for v in q[: len(ns)]]
        if len(qs) < len(ns):
            raise InvalidSequence("sequence shorter than n_max - n0 + 2 values")
    if any(v <= 0 or not math.isfinite(v) for v in qs):
        raise InvalidSequence("target sequence must be positive and finite")
    if any(b > a for a, b in zip(qs, qs[1:])):
        raise InvalidSequence("target sequence must be nonincreasing")

    c = qs[0]
    atoms: list[Atom] = []
    for i, n in enumerate(ns[:-1]):
        w = (qs[i] - qs[i + 1]) / (2.0 * c)
        if n == n_max:
            w += qs[i + 1] / (2.0 * c)
        if w <= 0.0:
            continue
        hold = 2.0 / 3.0 if n == 1 else 1.0 / n
        left, right = _drift_pair(hold, eps)
        atoms.append(Atom(*left, w))
        atoms.append(Atom(*right, w))
    return SiteLaw(tuple(atoms))


def tail_pow(a: float) -> Callable[[int], float]:
    """q(n) = n^(-a), a > 0."""
    if a <= 0:
        raise ValidationError("pow family needs a > 0")
    return lambda n: float(n) ** (-a)


def tail_geo(b: float) -> Callable[[int], float]:
    """q(n) = b^n, 0 < b < 1."""
    if not 0 < b < 1:
        raise ValidationError("geo family needs 0 < b < 1")
    return lambda n: b ** float(n)


def tail_explog(c: float, kappa: float) -> Callable[[int], float]:
    """q(n) = exp(-c (ln n)^kappa), c > 0, kappa > 0."""
    if c <= 0 or kappa <= 0:
        raise ValidationError("explog family needs c > 0 and kappa > 0")
    return lambda n: math.exp(-c * math.log(n) ** kappa)


def tail_exppow(c: float, kappa: float) -> Callable[[int], float]:
    """q(n) = exp(-c n^kappa), c > 0, 0 < kappa < 1."""
    if c <= 0 or not 0 < kappa < 1:
        raise ValidationError("exppow family needs c > 0 and 0 < kappa < 1")
    return lambda n: math.exp(-c * float(n) ** kappa)


def tail_family(expr: str) -> Callable[[int], float]:
    """Parse a tail-family expression like "pow:1.5" or "explog:1,1".

    Supported families: pow:<a>, geo:<b>, explog:<c,kappa>,
    exppow:<c,kappa>.
    """
    name, _, argtext = expr.partition(":")
    try:
        args = [float(v) for v in argtext.split(",")] if argtext else []
    except ValueError as exc:
        raise ValidationError(f"bad tail-family arguments in {expr!r}") from exc
    families: dict[str, tuple[int, Callable[..., Callable[[int], float]]]] = {
        "pow": (1, tail_pow),
        "geo": (1, tail_geo),
        "explog": (2, tail_explog),
        "exppow": (2, tail_exppow),
    }
    if name not in families:
        raise ValidationError(f"unknown tail family {name!r}")
    arity, builder = families[name]
    if len(args) != arity:
        raise ValidationError(f"family {name} takes {arity} argument(s), got {len(args)}")
    return builder(*args)


# ---------------------------------------------------------------------------
# Plain-text law files.
#
# One atom per line "w_plus w_zero w_minus weight"; '#' starts a comment;
# blank lines are skipped.  Alternatively a single directive line
# "construct q=<family> eps=<float> n0=<int> N=<int>" builds the law via
# `construct_law`.

_CONSTRUCT_RE = re.compile(r"^construct\s+(.*)$")


def parse_construct_line(line: str) -> SiteLaw:
    """Build a law from a "construct q=... eps=... n0=... N=..." line."""
    m = _CONSTRUCT_RE.match(line.strip())
    if not m:
        raise MalformedLaw(f"not a construct directive: {line!r}")
    fields: dict[str, str] = {}
    for token in m.group(1).split():
        key, sep, value = token.partition("=")
        if not sep:
            raise MalformedLaw(f"bad construct token {token!r}")
        fields[key] = value
    missing = {"q", "eps", "n0", "N"} - set(fields)
    if missing:
        raise MalformedLaw(f"construct directive missing {sorted(missing)}")
    try:
        eps = float(fields["eps"])
        n0 = int(fields["n0"])
        n_max = int(fields["N"])
    except ValueError as exc:
        raise MalformedLaw(f"bad construct parameters in {line!r}") from exc
    return construct_law(tail_family(fields["q"]), eps, n0, n_max)


def parse_law(text: str) -> SiteLaw:
    """Parse a law from its plain-text serialization."""
    atoms: list[Atom] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("construct"):
            if atoms:
                raise MalformedLaw("construct directive mixed with atom lines")
            return parse_construct_line(line)
        parts = line.split()
        if len(parts) != 4:
            raise MalformedLaw(f"expected 4 columns, got {len(parts)}: {raw!r}")
        try:
            wp, w0, wm, wt = (float(p) for p in parts)
        except ValueError as exc:
            raise MalformedLaw(f"non-numeric entry in line {raw!r}") from exc
        atoms.append(Atom(wp, w0, wm, wt))
    if not atoms:
        raise MalformedLaw("no atoms found")
    return SiteLaw(tuple(atoms))


def format_law(law: SiteLaw, comment: str | None = None) -> str:
    """Serialize a law to the plain-text format accepted by `parse_law`."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("# w_plus w_zero w_minus weight")
    for a in law.atoms:
        lines.append("%.17g %.17g %.17g %.17g" % (a.w_plus, a.w_zero, a.w_minus, a.weight))
    return "\n".join(lines) + "\n"
