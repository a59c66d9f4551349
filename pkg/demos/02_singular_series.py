#!/usr/bin/env python3
"""Singular series: the arithmetic constants of shifted divisor sums.

The correlation sum of d_k(n+h) d_l(n) grows like

    C_{k,l} f_{k,l}(h) / ((k-1)! (l-1)!) * x log^(k+l-2) x,

where C_{k,l} is an Euler product over all primes and f_{k,l}(h) a finite
product over primes dividing the shift.  The Euler products here are
truncated at a modest prime cutoff and finished with exact prime-zeta
tail sums, so the constants come out to full working precision.
"""

import mpmath as mp

from divcorr import (
    conjecture_leading,
    corollary_lower_bound,
    evaluate_singular_series,
    sigma_minus1_exact,
    singular_constant,
    singular_shift_factor,
    theta_exponent,
)

mp.mp.dps = 40

C22, bound = singular_constant(2, 2)
print("C_{2,2}      =", mp.nstr(C22, 30))
print("6/pi^2       =", mp.nstr(6 / mp.pi**2, 30))
print("tail bound   =", mp.nstr(bound, 3), " (prime-zeta corrected)")

# The shift factor is an exact rational; for k = l = 2 it is the divisor
# sum sigma_{-1}(h) on the nose.
for h in (2, 6, 12, 49):
    f = singular_shift_factor(h, 2, 2)
    assert f == sigma_minus1_exact(h)
    print(f"f_{{2,2}}({h:2d}) = {f}  = sigma_-1({h})")

# Higher orders: constants shrink, the structure stays.
for (k, l) in ((3, 3), (4, 2)):
    C, _ = singular_constant(k, l)
    print(f"C_{{{k},{l}}}      =", mp.nstr(C, 25))

# Conjectured leading constants and the proven lower bounds they dominate.
print("\nleading constants and proven lower bounds (normalized by x log^(k+l-2) x):")
for (h, k, l) in ((1, 2, 2), (6, 2, 2), (1, 3, 3)):
    lead = conjecture_leading(h, k, l)
    low = corollary_lower_bound(h, k, l)
    print(f"  h={h} k={k} l={l}: leading {mp.nstr(lead, 12)}, "
          f"lower bound {mp.nstr(low, 12)} "
          f"(theta_{k} = {theta_exponent(k, 0)})")

# A full record: constants, truncated Dirichlet partials, and tail data,
# exportable as JSON for downstream tooling.
record = evaluate_singular_series(6, 2, 2, Q=20000, P=10**4)
print("\nJSON record for (h, k, l) = (6, 2, 2):")
print(record.to_json(digits=16)[:220], "...")
