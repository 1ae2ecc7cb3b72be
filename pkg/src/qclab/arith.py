"""Elementary exact integer arithmetic shared by the whole package.

Everything here is pure and total on its stated domain: Kronecker symbols,
deterministic primality for the ranges we sweep, factorization by trial
division, squarefree tests, and a divisor-sum sieve.  No floating point
anywhere; ``math.isqrt`` is the only square-root primitive used.
"""

from __future__ import annotations

import math
from functools import lru_cache

__all__ = [
    "kronecker",
    "is_prime",
    "primes_up_to",
    "factorize",
    "is_squarefree",
    "squarefree_kernel",
    "sigma1_table",
    "is_square",
    "xgcd",
]


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), total for n != 0.

    Agrees with the Legendre symbol for odd prime n and is completely
    multiplicative in both arguments.  (a|1) = 1 is the empty product.
    """
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol with quadratic reciprocity.
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in _MR_BASES:
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit by a plain Eratosthenes sieve."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, flag in enumerate(sieve) if flag]


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |n| as a sorted tuple of (prime, exponent)."""
    n = abs(n)
    if n <= 1:
        return ()
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n))


def squarefree_kernel(n: int) -> int:
    """Largest squarefree divisor with the same odd-exponent support, signed.

    squarefree_kernel(n) * (a square) == n.
    """
    if n == 0:
        raise ValueError("squarefree kernel of 0 undefined")
    k = -1 if n < 0 else 1
    for p, e in factorize(n):
        if e % 2 == 1:
            k *= p
    return k


def sigma1_table(limit: int) -> list[int]:
    """sigma1_table(L)[k] = sum of divisors of k for 0 <= k <= L (entry 0 is 0)."""
    table = [0] * (limit + 1)
    for d in range(1, limit + 1):
        for multiple in range(d, limit + 1, d):
            table[multiple] += d
    return table


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0 when a or b != 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0
