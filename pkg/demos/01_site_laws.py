"""Site laws: validation, tail statistics, and regime classification.

A site law assigns to every lattice site an i.i.d. triple
(w_plus, w_zero, w_minus): the probabilities of stepping right, holding,
and stepping left.  Everything downstream — potential landscapes, decay
exponents, survival curves — is a functional of this law, so this demo
starts the tour by building laws three ways and reading off their
headline statistics.
"""

import math

from rwre_survival import (
    Atom,
    SiteLaw,
    construct_law,
    format_law,
    limit_quantities,
    tail_explog,
    tail_exppow,
    tail_geo,
    tail_quantities,
    validate_ue,
)


def show(law: SiteLaw, name: str, n_max: float = 10**4) -> None:
    print(f"--- {name} ---")
    print(f"atoms: {len(law.atoms)}")
    print(f"uniform ellipticity floor: {validate_ue(law):.6f}")
    for n in (1, 3, 10):
        tq = tail_quantities(law, n)
        print(
            f"  n={n:>3}: p+ = {tq.p_plus:.6f}  p- = {tq.p_minus:.6f}  "
            f"p0 = {tq.p_zero:.6f}  safe mass = {tq.p_safe:.6f}"
        )
    lim = limit_quantities(law, n_max)
    reg = lim.regime
    extra = ""
    if reg.kappa is not None:
        extra += f", kappa = {reg.kappa:.4f}"
    if reg.coeff is not None:
        extra += f", coeff = {reg.coeff:.4f}"
    print(f"classified regime: {reg.kind}{extra}")
    print()


def main() -> None:
    # 1. Hand-written benchmark law: two drift atoms (ratio 3, no
    # holding) and one symmetric holding atom.  Drift tails are constant
    # in n, so the survival decay is polynomial.
    bench = SiteLaw(
        atoms=(
            Atom(w_plus=0.75, w_zero=0.0, w_minus=0.25, weight=0.4),
            Atom(w_plus=0.25, w_zero=0.0, w_minus=0.75, weight=0.4),
            Atom(w_plus=0.25, w_zero=0.5, w_minus=0.25, weight=0.2),
        )
    )
    show(bench, "benchmark three-atom law")

    # 2. Tail-driven construction: prescribe how fast the mass of
    # low-holding drift atoms decays and get a law realizing exactly
    # that tail (up to the fixed normalization 1 / (2 q(n0))).
    explog = construct_law(tail_explog(1.0, 1.0), 1.0, 2, 10**4)
    show(explog, "constructed, q(n) = exp(-ln n)  [intermediate decay]")

    stretched = construct_law(tail_exppow(1.0, 0.5), 1.0, 2, 4000)
    show(stretched, "constructed, q(n) = exp(-sqrt n)  [stretched decay]", 4000)

    # 3. Geometric tails sit at the boundary of the stretched family and
    # have fully explicit limit statistics: all four drift-tail slopes
    # equal ln 2 and both balance ratios equal 1.
    geo = construct_law(tail_geo(0.5), 1.0, 1, 150)
    lim = limit_quantities(geo, 150)
    print("--- geometric tail, closed-form limit statistics ---")
    print(f"eps+  = {lim.eps_plus:.12f}   (ln 2 = {math.log(2):.12f})")
    print(f"delta- = {lim.delta_minus:.12f}")
    print(f"a+ = {lim.a_plus:.6f}, a- = {lim.a_minus:.6f}")
    print()

    # 4. Round-trip text format used by the command-line tools.
    text = format_law(bench, comment="benchmark three-atom law")
    print("--- law file format (w+ w0 w- weight) ---")
    print(text)


if __name__ == "__main__":
    main()
