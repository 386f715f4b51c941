"""The simple-walk exit constant -pi^2/8.

For the symmetric simple random walk on [-l, l], the probability of
staying inside for n steps decays like exp(-(pi^2/8) n / l^2): the decay
rate is the principal eigenvalue of the interval's transition operator.
The scaled statistic (l^2/n) ln P(exit > n) must therefore approach
-pi^2/8 as both l and n/l^2 grow.

This limit doubles as an end-to-end numerical check of the hitting-time
recursion: a million-step tridiagonal evolution whose output must match
a spectral constant to a fraction of a percent.

The pairs below keep ln P above the double-precision floor of roughly
-744; past that the survival probability underflows and the statistic
goes quietly wrong, so pick l and n with (pi^2/8) n / l^2 < 700.
"""

import math
import time

from rwre_survival import srw_exit_check

TARGET = -(math.pi**2) / 8.0


def main() -> None:
    print(f"target: -pi^2/8 = {TARGET:.6f}")
    print()
    print("  l      n        (l^2/n) ln P(exit > n)   rel. error   seconds")
    for l, n in (
        (5, 10**3),
        (10, 10**4),
        (20, 10**5),
        (50, 10**6),
        (64, 2 * 10**6),
    ):
        t0 = time.perf_counter()
        value = srw_exit_check(l, n)
        dt = time.perf_counter() - t0
        rel = abs(value - TARGET) / abs(TARGET)
        print(f"  {l:>3}  {n:>8}   {value:>+.6f}               {rel:>8.2%}   {dt:6.2f}")
    print()
    print("the discreteness bias shrinks like 1/l^2 as the interval widens,")
    print("until the O(l^2/n) start-up offset takes over at a few basis points")


if __name__ == "__main__":
    main()
