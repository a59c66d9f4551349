"""Exact integer layer: factorization, sieves, partial divisor functions."""

import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divcorr.arith import (
    DivisorTable,
    FactoredInteger,
    RationalExponent,
    divisor_count_array,
    dk_of_factored,
    dk_partial,
    dk_prime_power,
    factorize,
    introot,
    introot_ceil,
    sieve_dk,
    sigma_minus1_exact,
    sigma_minus1_moments,
    spf_array,
)
from divcorr.errors import ResourceBudgetError


def brute_dk(n: int, k: int) -> int:
    """Ordered k-factorizations of n by direct recursion (test oracle)."""
    if k == 1:
        return 1
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += brute_dk(n // d, k - 1)
    return total


def test_introot_exact():
    assert introot(0, 3) == 0
    assert introot(26, 3) == 2
    assert introot(27, 3) == 3
    assert introot(10**18, 2) == 10**9
    big = (3**41) ** 5
    assert introot(big, 5) == 3**41
    assert introot(big - 1, 5) == 3**41 - 1
    assert introot_ceil(big, 5) == 3**41
    assert introot_ceil(big + 1, 5) == 3**41 + 1


def test_factorize_examples():
    assert factorize(1).factors == ()
    assert factorize(12).factors == ((2, 2), (3, 1))
    assert factorize(2**40).factors == ((2, 40),)
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(10, bound=5)


def test_factored_integer_invariants():
    with pytest.raises(ValueError):
        FactoredInteger(12, ((3, 1), (2, 2)))  # primes must increase
    with pytest.raises(ValueError):
        FactoredInteger(12, ((2, 1), (3, 1)))  # product mismatch
    fi = factorize(360)
    assert fi.divisors()[:6] == [1, 2, 3, 4, 5, 6]
    assert len(fi.divisors()) == 24


def test_dk_prime_power_examples():
    assert dk_prime_power(2, 3) == 4
    assert dk_prime_power(3, 2) == 6
    assert dk_prime_power(1, 5) == 1
    with pytest.raises(ValueError):
        dk_prime_power(0, 1)


def test_sieve_examples():
    t2 = sieve_dk(2, 1, 100)
    assert t2.dk(12) == 6
    t3 = sieve_dk(3, 1, 10)
    assert t3.dk(4) == 6
    t4 = sieve_dk(4, 1, 30)
    assert t4.dk(30) == brute_dk(30, 4) == 64


def test_sieve_against_brute_small():
    for k in (1, 2, 3, 5):
        table = sieve_dk(k, 1, 60)
        for n in range(1, 61):
            assert table.dk(n) == brute_dk(n, k), (k, n)


def test_divisor_count_array_matches_sieve():
    for k in (1, 2, 3, 4):
        arr = divisor_count_array(500, k)
        table = sieve_dk(k, 1, 500)
        assert np.array_equal(arr[1:], table.values)


def test_segmented_sieve_matches_plain():
    full = sieve_dk(3, 1, 5000)
    seg = sieve_dk(3, 1, 5000, segment_size=700)
    assert np.array_equal(full.values, seg.values)
    assert np.array_equal(full.spf, seg.spf)
    window = sieve_dk(3, 2001, 2500)
    assert np.array_equal(window.values, full.values[2000:2500])


def test_sieve_threads_bit_identical():
    one = sieve_dk(2, 1, 20000, segment_size=3000, threads=1)
    four = sieve_dk(2, 1, 20000, segment_size=3000, threads=4)
    assert np.array_equal(one.values, four.values)
    assert np.array_equal(one.spf, four.spf)


def test_high_window_segment():
    """Segmented sieving far from the origin stays exact (spot check at 1e9)."""
    lo, hi = 10**9 - 50, 10**9 + 50
    t = sieve_dk(3, lo, hi)
    for n in (lo, lo + 17, 10**9, hi):
        assert t.dk(n) == dk_of_factored(3, factorize(n)), n
    assert t.dk(10**9) == 3025  # 2^9 * 5^9: C(11,2)^2


def test_sieve_budget():
    with pytest.raises(ResourceBudgetError):
        sieve_dk(2, 1, 10**9 + 1)


def test_dump_load_roundtrip(tmp_path):
    table = sieve_dk(3, 1, 1000)
    path = tmp_path / "t.divtab"
    table.dump(path)
    back = DivisorTable.load(path)
    assert back.k == 3 and back.lo == 1 and back.hi == 1000
    assert np.array_equal(back.values, table.values)
    assert np.array_equal(back.spf, table.spf)
    # header is the documented little-endian layout
    raw = path.read_bytes()
    assert raw[:4] == b"DKTB"
    assert raw[24] == 8  # element width byte (after magic, k, lo, hi)
    with pytest.raises(ValueError):
        bad = tmp_path / "bad.divtab"
        bad.write_bytes(b"XXXX" + raw[4:])
        DivisorTable.load(bad)


def test_rational_exponent():
    A = RationalExponent.parse("2/3")
    assert (A.a, A.b) == (2, 3)
    assert str(A) == "2/3"
    with pytest.raises(ValueError):
        RationalExponent(2, 4)  # not reduced
    with pytest.raises(ValueError):
        RationalExponent(4, 3)  # above 1
    with pytest.raises(ValueError):
        RationalExponent.parse("5/4")
    # boundary is decided by q^b <= n^a, inclusively
    half = RationalExponent(1, 2)
    assert half.divisor_cutoff(16) == 4
    assert half.divisor_cutoff(15) == 3
    assert half.first_n_admitting(4) == 16


def test_dk_partial_examples():
    table = sieve_dk(2, 1, 1000)
    half = RationalExponent(1, 2)
    assert dk_partial(12, 2, half, table) == 3
    assert dk_partial(12, 3, half, table) == 5
    one = RationalExponent(1, 1)
    for n in (1, 12, 360, 997):
        assert dk_partial(n, 2, one, table) == table.dk(n)
    zero = RationalExponent(0, 1)
    assert dk_partial(720, 4, zero) == 1


def test_convolution_identity_exhaustive():
    """sum_{d|n} d_{k-1}(d) = d_k(n) for n <= 10^4, k <= 5 (spot k by value)."""
    N = 10**4
    for k in (2, 3, 5):
        dk = divisor_count_array(N, k)
        dkm1 = divisor_count_array(N, k - 1)
        conv = np.zeros(N + 1, dtype=np.int64)
        for q in range(1, N + 1):
            conv[q::q] += dkm1[q]
        assert np.array_equal(conv[1:], dk[1:]), k


def test_square_pairing_identity():
    """d_2(n) = 2 d_2(n, 1/2) - [n is a square] for n <= 10^4."""
    N = 10**4
    table = sieve_dk(2, 1, N)
    half = RationalExponent(1, 2)
    for n in range(1, N + 1):
        square = 1 if math.isqrt(n) ** 2 == n else 0
        assert table.dk(n) == 2 * dk_partial(n, 2, half, table) - square, n


def test_partial_monotone_in_A():
    table = sieve_dk(2, 1, 2000)
    grid = [RationalExponent.parse(s) for s in ("0", "1/4", "1/3", "1/2", "2/3", "3/4", "1")]
    for n in (2, 36, 360, 1024, 1999):
        for k in (2, 3):
            vals = [dk_partial(n, k, A, table) for A in grid]
            assert vals == sorted(vals), (n, k, vals)


def test_multiplicativity_spot():
    table = sieve_dk(3, 1, 10**6)
    rng = np.random.default_rng(12345)
    pairs = 0
    while pairs < 200:
        m = int(rng.integers(2, 1000))
        n = int(rng.integers(2, 1000))
        if math.gcd(m, n) == 1:
            assert table.dk(m * n) == table.dk(m) * table.dk(n)
            pairs += 1


def test_prime_power_limit():
    """d_k(p^a, A) = d_k(p^floor(aA)) and the ratio tends to A^(k-1)."""
    half = RationalExponent(1, 2)
    k = 3
    for alpha in range(1, 40):
        n = 2**alpha
        val = dk_partial(n, k, half)
        assert val == dk_prime_power(k, alpha // 2), alpha
        # exact closed form of the ratio: (m+1)(m+2) / ((a+1)(a+2)), m = floor(a/2)
        m = alpha // 2
        assert val * 2 == (m + 1) * (m + 2)
        if alpha >= 20:
            ratio = val / dk_prime_power(k, alpha)
            assert abs(ratio - 0.25) <= 3 / alpha, alpha


def test_prime_power_table_match():
    table = sieve_dk(4, 1, 3000)
    for p in (2, 3, 5, 7):
        alpha = 1
        while p**alpha <= 3000:
            assert table.dk(p**alpha) == dk_prime_power(4, alpha)
            alpha += 1


def test_sigma_moments():
    s0, s1, s2 = sigma_minus1_moments(1)
    assert s0 == 1 and s1 == 0 and s2 == 0
    s0, s1, s2 = sigma_minus1_moments(6)
    assert s0 == 2
    s0, s1, s2 = sigma_minus1_moments(2)
    assert s0 == mp.mpf(3) / 2
    assert abs(s1 - mp.log(2) / 2) < mp.mpf(10) ** -35
    assert abs(s2 - mp.log(2) ** 2 / 2) < mp.mpf(10) ** -35
    assert sigma_minus1_exact(12) == Fraction(28, 12)


def test_spf_array():
    spf = spf_array(100)
    assert spf[1] == 1 and spf[2] == 2 and spf[91] == 7 and spf[97] == 97


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_roundtrip(n):
    fi = factorize(n)
    prod = 1
    for p, e in fi.factors:
        prod *= p**e
    assert prod == n


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=5000), st.integers(min_value=1, max_value=4),
       st.integers(min_value=0, max_value=6))
def test_partial_divisor_definition(n, k, anum):
    """dk_partial equals the literal divisor scan with exact boundary."""
    A = RationalExponent.parse(Fraction(anum, 6))
    cutoff = A.divisor_cutoff(n)
    fi = factorize(n)
    expected = 0
    for q in fi.divisors():
        if q <= cutoff:
            expected += dk_of_factored(k - 1, factorize(q)) if k > 1 else (1 if q == 1 else 0)
    assert dk_partial(n, k, A) == expected
