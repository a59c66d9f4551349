#!/usr/bin/env python3
"""The distribution of d_k(n, A) / d_k(n): a beta law in the mean.

Pointwise the ratio is erratic, but its average over n <= x converges to
the regularized incomplete beta function I_A(1 - 1/k, 1/k); for k = 2 this
is the arcsine law (2/pi) arcsin(sqrt(A)).  The empirical mean below is an
exact rational: the numerators are grouped by the value of d_k(n) before
any division happens.
"""

import mpmath as mp

from divcorr import bareikis_cdf, empirical_distribution

mp.mp.dps = 30

x = 10**6
print(f"empirical mean of d_2(n, A)/d_2(n) over n <= {x} vs the beta law:\n")
print("    A        empirical        limit law")
for Astr in ("1/4", "1/3", "1/2", "2/3", "3/4"):
    dist = empirical_distribution(2, Astr, x)
    law = bareikis_cdf(2, Astr)
    print(f"  {Astr:>4}   {float(dist.mean):.8f}   {mp.nstr(law, 9)}")

print("\nk = 3, A = 1/2 (beta law, no longer arcsine):")
dist3 = empirical_distribution(3, "1/2", x)
print(f"  empirical {float(dist3.mean):.8f}   limit {mp.nstr(bareikis_cdf(3, '1/2'), 9)}")

print("\nclosed arcsine values at k = 2:")
for Astr, label in (("1/4", "1/3"), ("1/2", "1/2"), ("3/4", "2/3")):
    print(f"  I_{Astr}(1/2, 1/2) = {mp.nstr(bareikis_cdf(2, Astr), 12)}  (= {label})")

half = empirical_distribution(2, "1/2", x)
print(f"\nexact mean at A = 1/2: {half.mean.numerator}/{half.mean.denominator}")
print("(divisor symmetry pins the pointwise ratio at 1/2 there, so the")
print(" spread is better seen at A = 1/4)")

quarter = empirical_distribution(2, "1/4", x)
print("\nhistogram of d_2(n, 1/4)/d_2(n) (20 bins on [0, 1]):")
peak = max(c for _, _, c in quarter.histogram)
for lo, hi, count in quarter.histogram:
    bar = "#" * max(1, int(40 * count / peak)) if count else ""
    print(f"  [{lo:.2f}, {hi:.2f})  {count:>8}  {bar}")
