"""Exact integer arithmetic for generalized divisor functions.

Everything in this module is exact: d_k(n) values are integers produced by
sieves or multiplicative evaluation, and the partial divisor function

    d_k(n, A) = sum of d_{k-1}(q) over divisors q | n with q <= n^A

decides the boundary test q <= n^A by the integer comparison q^b <= n^a
for A = a/b in lowest terms.  No floating point enters any membership test.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd, isqrt

import mpmath as mp
import numpy as np

from .errors import ResourceBudgetError

# Largest integer accepted by factorize(); trial division only, so callers
# stay in desk-scale ranges in practice.
FACTORIZE_BOUND = 2**63 - 1

# Soft cap on table cells (values + spf arrays together), int64 cells.
MAX_TABLE_CELLS = 2 * 10**8

_TABLE_MAGIC = b"DKTB"


def introot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer, exactly."""
    if n < 0:
        raise ValueError("introot requires n >= 0")
    if k < 1:
        raise ValueError("introot requires k >= 1")
    if n == 0:
        return 0
    if k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def introot_ceil(n: int, k: int) -> int:
    """Smallest integer r with r^k >= n (n >= 0)."""
    r = introot(n, k)
    return r if r**k == n else r + 1


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its canonical prime factorization."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must be (prime, exponent>=1), primes increasing")
            prod *= p**e
            last = p
        if prod != self.value or self.value < 1:
            raise ValueError("factor list does not multiply to value")

    def exponent_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def divisors(self) -> list[int]:
        """All divisors, sorted ascending."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)

    def divisors_factored(self) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
        """(divisor, factorization) pairs, unsorted."""
        out = [(1, ())]
        for p, e in self.factors:
            nxt = []
            for d, fac in out:
                nxt.append((d, fac))
                pe = 1
                for i in range(1, e + 1):
                    pe *= p
                    nxt.append((d * pe, fac + ((p, i),)))
            out = nxt
        return out


def factorize(n: int, bound: int = FACTORIZE_BOUND) -> FactoredInteger:
    """Canonical factorization by trial division (range-bounded by design)."""
    if not 1 <= n <= bound:
        raise ValueError(f"factorize: n={n} outside [1, {bound}]")
    m = n
    factors = []
    for p in (2, 3):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    p = 5
    step = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        factors.append((m, 1))
    return FactoredInteger(n, tuple(factors))


def dk_prime_power(k: int, alpha: int) -> int:
    """d_k(p^alpha) = C(alpha+k-1, k-1), independent of the prime p."""
    if k < 1 or alpha < 0:
        raise ValueError("dk_prime_power requires k >= 1, alpha >= 0")
    return comb(alpha + k - 1, k - 1)


def dk_of_factored(k: int, fi: FactoredInteger | tuple) -> int:
    """d_k(n) from a factorization, by multiplicativity."""
    factors = fi.factors if isinstance(fi, FactoredInteger) else fi
    out = 1
    for _, e in factors:
        out *= dk_prime_power(k, e)
    return out


def euler_phi_prime_power(p: int, e: int) -> int:
    """Euler's totient at p^e."""
    if e == 0:
        return 1
    return p ** (e - 1) * (p - 1)


@dataclass(frozen=True)
class RationalExponent:
    """A rational A = a/b in [0, 1]; the exponent in partial divisor cutoffs."""

    a: int
    b: int

    def __post_init__(self):
        if self.b <= 0 or self.a < 0 or self.a > self.b:
            raise ValueError("RationalExponent requires 0 <= a/b <= 1 with b > 0")
        if gcd(self.a, self.b) != 1:
            raise ValueError("RationalExponent requires gcd(a, b) = 1")

    @classmethod
    def parse(cls, text) -> "RationalExponent":
        """Accept 'a/b', an integer string, an int, or a Fraction."""
        if isinstance(text, RationalExponent):
            return text
        if isinstance(text, int):
            f = Fraction(text)
        elif isinstance(text, Fraction):
            f = text
        else:
            s = str(text).strip()
            if "/" in s:
                num, den = s.split("/")
                f = Fraction(int(num), int(den))
            else:
                f = Fraction(int(s))
        return cls(f.numerator, f.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __float__(self):
        return self.a / self.b

    def __str__(self):
        return f"{self.a}/{self.b}"

    def mpf(self) -> mp.mpf:
        return mp.mpf(self.a) / self.b

    def divisor_cutoff(self, n: int) -> int:
        """Largest integer T with T^b <= n^a; q <= n^A is exactly q <= T."""
        if self.a == 0:
            return 1
        if self.a == self.b:
            return n
        return introot(n**self.a, self.b)

    def first_n_admitting(self, q: int) -> int:
        """Smallest n with q <= n^A, i.e. n^a >= q^b (requires a > 0)."""
        if self.a == 0:
            raise ValueError("A = 0 admits only q = 1")
        return introot_ceil(q**self.b, self.a)


def spf_array(n: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..n (spf[1] = 1, spf[p] = p)."""
    if n < 1:
        raise ValueError("spf_array requires n >= 1")
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, isqrt(n) + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    unset = spf == 0
    spf[unset] = np.arange(n + 1, dtype=np.int64)[unset]
    spf[0] = 0
    if n >= 1:
        spf[1] = 1
    return spf


def primes_up_to(n: int) -> np.ndarray:
    """Primes <= n as an int64 array (simple boolean sieve)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


def divisor_count_array(x: int, k: int) -> np.ndarray:
    """Array of d_k(n) for 0 <= n <= x (index 0 is 0), exact int64.

    Built by iterated Dirichlet convolution with the constant function 1;
    the q-loop is split so large q are handled by vectorized scatter-adds
    instead of millions of short slices.
    """
    if x < 1 or k < 0:
        raise ValueError("divisor_count_array requires x >= 1, k >= 0")
    _budget_check(x + 1)
    if k == 0:
        out = np.zeros(x + 1, dtype=np.int64)
        out[1] = 1
        return out
    out = np.ones(x + 1, dtype=np.int64)
    out[0] = 0
    for _ in range(k - 1):
        prev = out
        out = np.zeros(x + 1, dtype=np.int64)
        q_split = min(x, max(isqrt(x), 1024))
        for q in range(1, q_split + 1):
            out[q::q] += prev[q]
        for m in range(1, x // q_split + 1):
            q_hi = x // m
            if q_hi <= q_split:
                break
            qs = np.arange(q_split + 1, q_hi + 1, dtype=np.int64)
            out[qs * m] += prev[q_split + 1 : q_hi + 1]
    return out


def _budget_check(cells: int):
    if cells > MAX_TABLE_CELLS:
        raise ResourceBudgetError(
            f"table of {cells} cells exceeds budget of {MAX_TABLE_CELLS}"
        )


def _sieve_segment(k: int, lo: int, hi: int, primes: np.ndarray):
    """Exact d_k values and smallest prime factors on [lo, hi] by divide-out.

    primes must cover every prime <= sqrt(hi).
    """
    size = hi - lo + 1
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    val = np.ones(size, dtype=np.int64)
    spf = np.zeros(size, dtype=np.int64)
    max_e = hi.bit_length() + 1
    binom = np.array([dk_prime_power(k, a) for a in range(max_e)], dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        first = lo + ((-lo) % p)
        if first > hi:
            continue
        idx = np.arange(first - lo, size, p, dtype=np.int64)
        sub = spf[idx]
        spf[idx[sub == 0]] = p
        rem[idx] //= p
        e = np.ones(idx.size, dtype=np.int64)
        pos = np.arange(idx.size, dtype=np.int64)
        while True:
            div = rem[idx[pos]] % p == 0
            if not div.any():
                break
            pos = pos[div]
            rem[idx[pos]] //= p
            e[pos] += 1
        val[idx] *= binom[e]
    left = rem > 1
    val[left] *= k
    unset = (spf == 0) & left
    spf[unset] = rem[unset]
    if lo <= 1 <= hi:
        spf[1 - lo] = 1
        val[1 - lo] = 1
    if lo == 0:
        spf[0] = 0
        val[0] = 0
    return val, spf


@dataclass
class DivisorTable:
    """Sieved d_k(n) values and smallest prime factors on [lo, hi]."""

    k: int
    lo: int
    hi: int
    values: np.ndarray
    spf: np.ndarray

    def index(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"n={n} outside table range [{self.lo}, {self.hi}]")
        return n - self.lo

    def dk(self, n: int) -> int:
        return int(self.values[self.index(n)])

    def __getitem__(self, n: int) -> int:
        return self.dk(n)

    def spf_of(self, n: int) -> int:
        return int(self.spf[self.index(n)])

    def factor(self, n: int) -> FactoredInteger:
        """Factor n via the stored smallest-prime chain when possible."""
        if self.lo == 1 and self.lo <= n <= self.hi:
            m = n
            factors = []
            while m > 1:
                p = int(self.spf[m - self.lo])
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                factors.append((p, e))
            factors.sort()
            return FactoredInteger(n, tuple(factors))
        return factorize(n)

    def dump(self, path):
        """Binary dump: (magic, k, lo, hi, element width) + little-endian values."""
        header = struct.pack("<4sIqqB", _TABLE_MAGIC, self.k, self.lo, self.hi, 8)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.values.astype("<i8").tobytes())

    @classmethod
    def load(cls, path) -> "DivisorTable":
        """Load a dumped table; the spf array is resieved on demand."""
        with open(path, "rb") as fh:
            header = fh.read(struct.calcsize("<4sIqqB"))
            magic, k, lo, hi, width = struct.unpack("<4sIqqB", header)
            if magic != _TABLE_MAGIC:
                raise ValueError(f"{path}: not a divisor-table dump")
            if width != 8:
                raise ValueError(f"{path}: unsupported element width {width}")
            data = fh.read((hi - lo + 1) * 8)
        values = np.frombuffer(data, dtype="<i8").astype(np.int64)
        if values.size != hi - lo + 1:
            raise ValueError(f"{path}: truncated value array")
        primes = primes_up_to(isqrt(hi))
        _, spf = _sieve_segment(k, lo, hi, primes)
        return cls(k=k, lo=lo, hi=hi, values=values, spf=spf)


def sieve_dk(k: int, lo: int, hi: int, segment_size: int = 1 << 21,
             threads: int = 1) -> DivisorTable:
    """Build a DivisorTable on [lo, hi].

    Segments are independent and written to fixed offsets, so the result is
    bit-identical for any thread count.
    """
    if not 1 <= lo <= hi:
        raise ValueError("sieve_dk requires 1 <= lo <= hi")
    if k < 1:
        raise ValueError("sieve_dk requires k >= 1")
    _budget_check(2 * (hi - lo + 1))
    primes = primes_up_to(isqrt(hi))
    size = hi - lo + 1
    values = np.empty(size, dtype=np.int64)
    spf = np.empty(size, dtype=np.int64)
    spans = [(s, min(s + segment_size - 1, hi)) for s in range(lo, hi + 1, segment_size)]

    def work(span):
        s, e = span
        v, f = _sieve_segment(k, s, e, primes)
        values[s - lo : e - lo + 1] = v
        spf[s - lo : e - lo + 1] = f

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    else:
        for span in spans:
            work(span)
    return DivisorTable(k=k, lo=lo, hi=hi, values=values, spf=spf)


def dk_partial(n: int, k: int, A: RationalExponent, table: DivisorTable | None = None) -> int:
    """Partial divisor function d_k(n, A); exact rational boundary rule.

    The divisor bound is the largest integer T with T^b <= n^a, so the
    boundary q = n^A is included, matching the defining inequality.
    """
    if n < 1 or k < 1:
        raise ValueError("dk_partial requires n >= 1, k >= 1")
    A = RationalExponent.parse(A)
    if A.a == 0:
        return 1
    fi = table.factor(n) if table is not None else factorize(n)
    cutoff = A.divisor_cutoff(n)
    total = 0
    for q, fac in fi.divisors_factored():
        if q <= cutoff:
            total += dk_of_factored(k - 1, fac) if k > 1 else (1 if q == 1 else 0)
    return total


def sigma_minus1_moments(h: int) -> tuple[mp.mpf, mp.mpf, mp.mpf]:
    """(sum 1/d, sum log(d)/d, sum log^2(d)/d) over divisors d | h.

    The zeroth moment is assembled exactly as a rational before conversion.
    """
    if h < 1:
        raise ValueError("sigma_minus1_moments requires h >= 1")
    divs = factorize(h).divisors()
    s0 = Fraction(0)
    s1 = mp.mpf(0)
    s2 = mp.mpf(0)
    for d in divs:
        s0 += Fraction(1, d)
        if d > 1:
            ld = mp.log(d)
            s1 += ld / d
            s2 += ld * ld / d
    return mp.mpf(s0.numerator) / s0.denominator, s1, s2


def sigma_minus1_exact(h: int) -> Fraction:
    """sum of 1/d over d | h, as an exact rational."""
    total = Fraction(0)
    for d in factorize(h).divisors():
        total += Fraction(1, d)
    return total
