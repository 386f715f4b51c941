"""Command-line front-end for reproducible survival experiments.

Subcommands
-----------
validate           check a law file; print its ellipticity floor and regime
construct          build a law file from a tail-sequence family
rates              emit the decay-exponent report as JSON
simulate-quenched  survival curve for one environment file (CSV)
simulate-annealed  environment-averaged survival curve (CSV)
fit                fit regime coordinates to a curve CSV (JSON)
srw-check          simple-random-walk exit-rate check against -pi^2/8
compare            fitted curve vs analytic prediction (JSON verdict)
run                full pipeline from a key=value config file

Exit codes: 0 success, 2 validation failure (bad inputs, malformed
files), 3 numerical failure (fits impossible, checks failed).

Every stochastic subcommand requires an explicit --seed; nothing falls
back to wall-clock entropy, so identical invocations produce
byte-identical artifacts (the run manifest's timestamp field is the one
documented exception).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .annealed import (
    annealed_survival,
    annealed_survival_exact,
    compare_prediction,
    fit_exponent,
    read_curve_csv,
    srw_exit_check,
    write_curve_csv,
)
from .environment import parse_environment
from .errors import NumericalError, ValidationError
from .law import (
    SiteLaw,
    construct_law,
    format_law,
    limit_quantities,
    parse_construct_line,
    parse_law,
    tail_family,
)
from .rates import rate_report
from .walk import KillingWalkSpec, quenched_survival_dp

__all__ = ["main"]


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    """Write an artifact to a file, or stdout when out is None or '-'."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc}") from exc


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


_GRID_POW2_RE = re.compile(r"^2\^(\d+)\.\.2\^(\d+)$")


def _parse_grid(spec: str) -> list[int]:
    """Horizon grid: '2^7..2^13' (powers of two) or '128,256,512'."""
    m = _GRID_POW2_RE.match(spec.strip())
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if b < a:
            raise ValidationError(f"empty power grid {spec!r}")
        return [2**k for k in range(a, b + 1)]
    try:
        return [int(part) for part in spec.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse grid {spec!r}") from exc


def _load_law(path: str) -> SiteLaw:
    return parse_law(_read_text(path))


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_validate(args: argparse.Namespace) -> int:
    law = _load_law(args.law)
    lim = limit_quantities(law, args.n_max)
    print(f"atoms = {len(law.atoms)}")
    print(f"ellipticity_floor = {law.ellipticity_floor!r}")
    print(f"holding_floor = {law.holding_floor!r}")
    print(f"regime = {lim.regime.kind}")
    if lim.regime.kappa is not None:
        print(f"kappa = {lim.regime.kappa!r}")
    if lim.regime.coeff is not None:
        print(f"coeff = {lim.regime.coeff!r}")
    print(f"min_p = {lim.min_p_limit!r}")
    return 0


def _cmd_construct(args: argparse.Namespace) -> int:
    law = construct_law(tail_family(args.q), args.eps, args.n0, args.N)
    comment = f"construct q={args.q} eps={args.eps!r} n0={args.n0} N={args.N}"
    _emit(format_law(law, comment=comment), args.out)
    return 0


def _cmd_rates(args: argparse.Namespace) -> int:
    law = _load_law(args.law)
    report = rate_report(law, h=args.h, k=args.k, n_max=args.n_max)
    _emit(_json(report), args.out)
    return 0


def _cmd_simulate_quenched(args: argparse.Namespace) -> int:
    env = parse_environment(_read_text(args.env))
    spec = KillingWalkSpec(env, args.r, args.start, args.n, policy=args.policy)
    res = quenched_survival_dp(spec)
    lines = ["t,survival_lower,survival_upper"]
    for t in range(args.n + 1):
        lines.append("%d,%.17g,%.17g" % (t, res.lower[t], res.upper[t]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate_annealed(args: argparse.Namespace) -> int:
    law = _load_law(args.law)
    grid = _parse_grid(args.grid)
    if args.exhaustive:
        curve = annealed_survival_exact(law, args.r, grid)
    else:
        if args.seed is None:
            raise ValidationError("--seed is required (no wall-clock default)")
        curve = annealed_survival(
            law, args.r, grid, args.envs, args.seed,
            w_cap=args.w_cap, threads=args.threads,
        )
    _emit(write_curve_csv(curve), args.out)
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    curve = read_curve_csv(_read_text(args.curve))
    fit = fit_exponent(curve, args.regime)
    _emit(_json(asdict(fit)), args.out)
    return 0


def _cmd_srw_check(args: argparse.Namespace) -> int:
    value = srw_exit_check(args.l, args.n)
    target = -math.pi**2 / 8.0
    rel = abs(value - target) / abs(target)
    print(f"value = {value!r}")
    print(f"target = {target!r}")
    print(f"relative_error = {rel!r}")
    print(f"within_5pct = {'true' if rel <= 0.05 else 'false'}")
    return 0 if rel <= 0.05 else 3


def _cmd_compare(args: argparse.Namespace) -> int:
    law = _load_law(args.law)
    curve = read_curve_csv(_read_text(args.curve))
    verdict = compare_prediction(law, curve, n_max=args.n_max)
    _emit(_json(verdict), args.out)
    return 0


# ---------------------------------------------------------------------------
# run: config-driven pipeline

# Keys that identify an experiment (hashed into the manifest); execution
# mechanics like thread count or output directory are deliberately
# excluded so they cannot change the recorded identity.
_CONFIG_KEYS = ("law", "construct", "r", "grid", "envs", "seed",
                "w_cap", "h", "k", "n_max")
_EXEC_KEYS = ("threads", "out_dir")


def _parse_config_file(path: str) -> dict[str, str]:
    config: dict[str, str] = {}
    for raw in _read_text(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS + _EXEC_KEYS:
            raise ValidationError(f"unknown config key {key!r}")
        config[key] = value.strip()
    return config


def _effective_config(args: argparse.Namespace) -> dict[str, str]:
    config = _parse_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS + _EXEC_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = str(value)
    return config


def _require(config: dict[str, str], key: str) -> str:
    if key not in config:
        raise ValidationError(f"missing required config key {key!r}")
    return config[key]


def _cmd_run(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    if ("law" in config) == ("construct" in config):
        raise ValidationError("config needs exactly one of 'law' or 'construct'")
    out_dir = Path(_require(config, "out_dir"))
    r = float(_require(config, "r"))
    grid = _parse_grid(_require(config, "grid"))
    envs = int(_require(config, "envs"))
    seed = int(_require(config, "seed"))
    w_cap = int(config.get("w_cap", "8192"))
    h = float(config.get("h", "1"))
    k = float(config.get("k", "inf"))
    n_max = float(config.get("n_max", "1000000"))
    threads = int(config["threads"]) if "threads" in config else None

    if "law" in config:
        law = _load_law(config["law"])
    else:
        law = parse_construct_line("construct " + config["construct"])

    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []

    def save(name: str, text: str) -> None:
        (out_dir / name).write_text(text)
        artifacts.append(name)

    save("law.txt", format_law(law))
    save("rates.json", _json(rate_report(law, h=h, k=k, n_max=n_max)))
    curve = annealed_survival(law, r, grid, envs, seed, w_cap=w_cap, threads=threads)
    save("curve.csv", write_curve_csv(curve))
    lim = limit_quantities(law, n_max)
    fit = fit_exponent(curve, lim.regime.kind)
    save("fit.json", _json(asdict(fit)))
    save("compare.json", _json(compare_prediction(law, curve, limits=lim)))

    hashed = {key: config[key] for key in _CONFIG_KEYS if key in config}
    canonical = "\n".join(f"{key}={hashed[key]}" for key in sorted(hashed))
    manifest = {
        "tool": "rwre-survival",
        "version": __version__,
        "config": hashed,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": seed,
        "law_digest": law.digest(),
        "artifacts": artifacts,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(_json(manifest))
    print(f"wrote {len(artifacts) + 1} artifacts to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwre-survival",
        description="Survival analysis of killed random walks in random environments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a law file, print floor and regime")
    p.add_argument("--law", required=True, help="law file path")
    p.add_argument("--n-max", type=float, default=1e6, dest="n_max")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("construct", help="build a law file from a tail family")
    p.add_argument("--q", required=True,
                   help="tail family, e.g. pow:1.5 geo:0.5 explog:1,1 exppow:1,0.5")
    p.add_argument("--eps", type=float, required=True, help="drift size (rho = 1 + eps)")
    p.add_argument("--n0", type=int, required=True, help="first tail index")
    p.add_argument("--N", type=int, required=True, help="truncation index")
    p.add_argument("--out", default=None, help="output law file (default stdout)")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("rates", help="emit the decay-exponent JSON report")
    p.add_argument("--law", required=True)
    p.add_argument("--h", type=float, default=1.0, help="valley depth in ln n units")
    p.add_argument("--k", type=float, default=math.inf,
                   help="holding-safety cutoff (w_zero <= 1/k); default inf")
    p.add_argument("--n-max", type=float, default=1e6, dest="n_max")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("simulate-quenched", help="survival curve for one environment")
    p.add_argument("--env", required=True, help="environment file path")
    p.add_argument("--r", type=float, required=True, help="killing probability")
    p.add_argument("--n", type=int, required=True, help="horizon")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--policy", choices=("strict", "bracket"), default="strict")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate_quenched)

    p = sub.add_parser("simulate-annealed", help="environment-averaged survival curve")
    p.add_argument("--law", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--grid", default="2^7..2^13",
                   help="horizon grid: '2^7..2^13' or comma list")
    p.add_argument("--envs", type=int, default=500, help="number of environments")
    p.add_argument("--seed", type=int, default=None, help="base seed (required)")
    p.add_argument("--w-cap", type=int, default=8192, dest="w_cap")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate all environments exactly (tiny horizons only)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate_annealed)

    p = sub.add_parser("fit", help="fit regime coordinates to a curve CSV")
    p.add_argument("--curve", required=True, help="curve CSV path")
    p.add_argument("--regime", required=True,
                   choices=("polynomial", "intermediate", "stretched"))
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("srw-check", help="simple-random-walk exit-rate check")
    p.add_argument("--l", type=int, required=True, help="interval half-width")
    p.add_argument("--n", type=int, required=True, help="horizon")
    p.set_defaults(func=_cmd_srw_check)

    p = sub.add_parser("compare", help="fitted curve vs analytic prediction")
    p.add_argument("--law", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--n-max", type=float, default=1e6, dest="n_max")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("run", help="full pipeline from a key=value config")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--law", default=None)
    p.add_argument("--construct", default=None,
                   help="construct spec, e.g. 'q=pow:1.5 eps=1 n0=2 N=100000'")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--grid", default=None)
    p.add_argument("--envs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--w-cap", type=int, default=None, dest="w_cap")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--n-max", type=float, default=None, dest="n_max")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-dir", default=None, dest="out_dir")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
