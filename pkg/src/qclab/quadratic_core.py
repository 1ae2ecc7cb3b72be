"""Exact arithmetic of real and imaginary quadratic fields.

For a squarefree integer m, the field Q(sqrt(m)) has fundamental
discriminant m (m = 1 mod 4) or 4m.  This module computes, with no
floating point anywhere:

* class numbers h(m): by counting reduced positive-definite forms for
  m < 0, and cycles of reduced indefinite forms for m > 1 (the cycle
  count is the narrow class number h+; h = h+ or h+/2 according to the
  norm of the fundamental unit);

* fundamental units: from the continued-fraction expansion of sqrt(m),
  or of (1 + sqrt(m))/2 when m = 1 mod 4, with all arithmetic on exact
  integer state (P, Q);

* the zeta value zeta_F(-1) for real fields: through the generalized
  Bernoulli number B_{2,chi} of the quadratic character chi of conductor
  |disc|, namely zeta_F(-1) = B_{2,chi}/24 with
  B_{2,chi} = (1/disc) * sum_{a<disc} chi(a) a^2.  An independent
  divisor-sum evaluation (zeta_minus1_siegel) is provided as an oracle:
  (1/60) * sum over b^2 < disc, b^2 = disc mod 4, of sigma1((disc-b^2)/4).

* the unit index varpi = [O_F^x : Z[sqrt(p)]^x] in {1, 3} for primes
  p = 1 mod 4, together with the class number h_A of the index-2 order.

All operations are pure; results are memoized in a module-level table
whose writes are serialized by a lock (reads are unlocked).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .arith import is_prime, is_squarefree, kronecker, sigma1_table
from .forms import (
    indefinite_cycle_count,
    reduced_definite_count,
    reduced_definite_count_by_reduction,
)

__all__ = [
    "Disc",
    "ClassInvariants",
    "OrderData",
    "kronecker",
    "class_number_imag",
    "class_number_imag_oracle",
    "class_number_real",
    "fundamental_unit",
    "unit_in_zsqrt",
    "zeta_minus1",
    "zeta_minus1_siegel",
    "zeta_minus1_bulk",
    "fundamental_discriminants",
    "varpi_h_A",
    "class_invariants",
    "h_field",
    "memo_export",
    "memo_preload",
]


@dataclass(frozen=True)
class Disc:
    """A squarefree integer m and the fundamental discriminant of Q(sqrt m)."""

    m: int
    disc: int

    @classmethod
    def of(cls, m: int) -> "Disc":
        if m in (0, 1) or not is_squarefree(m):
            raise ValueError(f"m must be squarefree and != 0, 1: {m}")
        disc = m if m % 4 == 1 else 4 * m
        return cls(m=m, disc=disc)


# fundamental unit as (x, y, denom, norm): (x + y*sqrt(m))/denom, denom in {1, 2}
Unit = tuple[int, int, int, int]


@dataclass(frozen=True)
class ClassInvariants:
    """Cached arithmetic of one quadratic field."""

    disc: Disc
    h: int
    h_plus: int | None = None          # real fields only
    fund_unit: Unit | None = None      # real fields only
    zeta_minus1: Fraction | None = None  # real fields only


@dataclass(frozen=True)
class OrderData:
    """Unit index and class number of the order Z[sqrt(p)], p = 1 mod 4."""

    disc: Disc
    varpi: int
    h_A: int


_lock = threading.Lock()
_H_MEMO: dict[int, int] = {}            # m -> h(Q(sqrt m))
_HPLUS_MEMO: dict[int, int] = {}        # m (> 1) -> narrow class number
_UNIT_MEMO: dict[int, Unit] = {}        # m (> 1) -> fundamental unit
_ZETA_MEMO: dict[int, Fraction] = {}    # m (> 1) -> zeta_F(-1)


# ---------------------------------------------------------------------------
# Class numbers
# ---------------------------------------------------------------------------

def class_number_imag(m: int) -> int:
    """h(Q(sqrt m)) for squarefree m < 0, by reduced-form enumeration."""
    if m >= 0:
        raise ValueError(f"m must be negative: {m}")
    if not is_squarefree(m):
        raise ValueError(f"m must be squarefree: {m}")
    h = _H_MEMO.get(m)
    if h is None:
        h = reduced_definite_count(Disc.of(m).disc)
        with _lock:
            _H_MEMO[m] = h
    return h


def class_number_imag_oracle(m: int) -> int:
    """Second, independent count for h(Q(sqrt m)), m < 0 (see forms module)."""
    if m >= 0 or not is_squarefree(m):
        raise ValueError(f"m must be negative squarefree: {m}")
    return reduced_definite_count_by_reduction(Disc.of(m).disc)


def class_number_real(m: int) -> tuple[int, int]:
    """(h, h+) for Q(sqrt m), m > 1 squarefree.

    h+ is the cycle count of reduced indefinite forms of the fundamental
    discriminant; h = h+ when the fundamental unit has norm -1 and h+/2
    otherwise.
    """
    d = Disc.of(m)
    if m < 0:
        raise ValueError(f"m must be > 1: {m}")
    norm = fundamental_unit(m)[3]
    h_plus = _HPLUS_MEMO.get(m)
    if h_plus is None:
        h = _H_MEMO.get(m)
        if h is not None:  # cache hit: h+ is determined by h and the unit norm
            h_plus = h if norm == -1 else 2 * h
        else:
            h_plus = indefinite_cycle_count(d.disc)
        with _lock:
            _HPLUS_MEMO[m] = h_plus
    if norm == -1:
        h = h_plus
    else:
        if h_plus % 2:
            raise ArithmeticError(f"odd narrow class number with norm +1 unit at m={m}")
        h = h_plus // 2
    with _lock:
        _H_MEMO[m] = h
    return h, h_plus


def h_field(m: int) -> int:
    """Class number of Q(sqrt m) for squarefree m (either sign)."""
    if m in _H_MEMO:
        return _H_MEMO[m]
    if m < 0:
        return class_number_imag(m)
    return class_number_real(m)[0]


# ---------------------------------------------------------------------------
# Fundamental units
# ---------------------------------------------------------------------------

def fundamental_unit(m: int) -> Unit:
    """Smallest unit > 1 of the maximal order of Q(sqrt m), m > 1 squarefree.

    Expands the continued fraction of sqrt(m) (or (1+sqrt(m))/2 when
    m = 1 mod 4) on exact integer state; the unit is read off the
    convergent matrix of the first primitive period.
    """
    if m <= 1 or not is_squarefree(m):
        raise ValueError(f"m must be squarefree > 1: {m}")
    unit = _UNIT_MEMO.get(m)
    if unit is not None:
        return unit

    s = math.isqrt(m)
    if m % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    seen: dict[tuple[int, int], int] = {}
    partials: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(partials)
        a = (P + s) // Q
        partials.append(a)
        P = a * Q - P
        Q = (m - P * P) // Q
    start = seen[(P, Q)]
    # Convergent matrix over one primitive period: alpha = (A alpha + B)/(C alpha + D)
    A, B, C, D = 1, 0, 0, 1
    for a in partials[start:]:
        A, B, C, D = A * a + B, A, C * a + D, C
    # The repeated complete quotient is alpha = (P + sqrt m)/Q with the exit state,
    # and eps = C*alpha + D is the fundamental unit.
    num_x = C * P + D * Q
    num_y = C
    den = Q
    g = math.gcd(math.gcd(num_x, num_y), den)
    x, y, den = num_x // g, num_y // g, den // g
    if den not in (1, 2) or (den == 2 and (m % 4 != 1 or x % 2 == 0 or y % 2 == 0)):
        raise ArithmeticError(f"continued fraction produced a non-integral unit at m={m}")
    norm_num = x * x - m * y * y
    if norm_num != den * den and norm_num != -den * den:
        raise ArithmeticError(f"continued fraction unit has |norm| != 1 at m={m}")
    if x < 1 or y < 1:
        raise ArithmeticError(f"continued fraction unit is not > 1 at m={m}")
    unit = (x, y, den, norm_num // (den * den))
    with _lock:
        _UNIT_MEMO[m] = unit
    return unit


def unit_in_zsqrt(m: int) -> bool:
    """Whether the fundamental unit of Q(sqrt m) lies in Z[sqrt m]."""
    return fundamental_unit(m)[2] == 1


# ---------------------------------------------------------------------------
# zeta_F(-1)
# ---------------------------------------------------------------------------

_SIGMA1: list[int] = []


def _sigma1(n: int) -> int:
    global _SIGMA1
    if n >= len(_SIGMA1):
        _SIGMA1 = sigma1_table(max(n, 2 * len(_SIGMA1), 1 << 10))
    return _SIGMA1[n]


def _spf_table(limit: int) -> list[int]:
    """Smallest-prime-factor table for 0..limit-1."""
    spf = list(range(limit))
    for p in range(2, math.isqrt(limit - 1) + 1):
        if spf[p] == p:
            for n in range(p * p, limit, p):
                if spf[n] == n:
                    spf[n] = p
    return spf


def zeta_minus1(m: int) -> Fraction:
    """zeta_F(-1) for F = Q(sqrt m), m > 1 squarefree, as an exact rational.

    Evaluates B_{2,chi}/24 where chi(a) = kronecker(disc, a); chi is
    filled in multiplicatively from its values at primes.
    """
    d = Disc.of(m)
    if m < 0:
        raise ValueError(f"m must be > 1: {m}")
    z = _ZETA_MEMO.get(m)
    if z is not None:
        return z
    D = d.disc
    spf = _spf_table(D)
    chi = [0] * D
    chi[1 % D] = 1
    for n in range(2, D):
        p = spf[n]
        if p == n:
            chi[n] = kronecker(D, n)
        else:
            chi[n] = chi[p] * chi[n // p]
    S = sum(chi[a] * a * a for a in range(1, D))
    z = Fraction(S, 24 * D)
    with _lock:
        _ZETA_MEMO[m] = z
    return z


def zeta_minus1_siegel(m: int) -> Fraction:
    """Independent oracle for zeta_F(-1): the divisor-sum evaluation.

    (1/60) * sum of sigma1((disc - b^2)/4) over all integers b with
    b^2 < disc and b^2 = disc mod 4.
    """
    d = Disc.of(m)
    if m < 0:
        raise ValueError(f"m must be > 1: {m}")
    D = d.disc
    _sigma1(D // 4)  # ensure table is large enough
    total = 0
    for b in range(D % 2, math.isqrt(D - 1) + 1, 2):
        term = _SIGMA1[(D - b * b) // 4]
        total += term if b == 0 else 2 * term
    return Fraction(total, 60)


def _prime_discriminants(D: int) -> list[int]:
    """Factor a fundamental discriminant into prime discriminants."""
    from .arith import factorize

    parts = []
    odd = 1
    for q, e in factorize(D):
        if q == 2:
            continue
        assert e == 1
        qs = q if q % 4 == 1 else -q
        parts.append(qs)
        odd *= qs
    two_part = D // odd
    if two_part != 1:
        parts.append(two_part)
    assert two_part in (1, -4, 8, -8) and math.prod(parts) == D
    return parts


_CHAR_TABLES: dict[int, "object"] = {}


def _char_table(Dq: int):
    import numpy as np

    table = _CHAR_TABLES.get(Dq)
    if table is None:
        # residues divisible by the conductor get character value 0
        table = np.array(
            [0] + [kronecker(Dq, a) for a in range(1, abs(Dq))], dtype=np.int64
        )
        with _lock:
            _CHAR_TABLES[Dq] = table
    return table


def zeta_minus1_bulk(D: int) -> Fraction:
    """Vectorized B_{2,chi}/24 for a fundamental discriminant D > 0.

    Same Bernoulli-sum definition as zeta_minus1, evaluated with the
    character assembled from prime-discriminant factor tables; used for
    large verification sweeps.  Exact: the accumulation fits in int64
    for D < 10^6 and the result is returned as a Fraction.
    """
    import numpy as np

    if D <= 0 or D >= 10**6:
        raise ValueError(f"unsupported discriminant: {D}")
    a = np.arange(D, dtype=np.int64)
    chi = np.ones(D, dtype=np.int64)
    for Dq in _prime_discriminants(D):
        chi *= _char_table(Dq)[a % abs(Dq)]
    S = int(np.sum(chi * a * a, dtype=np.int64))
    return Fraction(S, 24 * D)


def fundamental_discriminants(limit: int) -> list[int]:
    """All real fundamental discriminants 1 < D < limit, ascending."""
    sq_free = bytearray([1]) * limit
    for q in range(2, math.isqrt(limit - 1) + 1):
        sq_free[q * q :: q * q] = bytearray(len(sq_free[q * q :: q * q]))
    out = []
    for D in range(5, limit):
        if D % 4 == 1:
            if sq_free[D]:
                out.append(D)
        elif D % 4 == 0:
            q = D // 4
            if q % 4 in (2, 3) and sq_free[q]:
                out.append(D)
    return out


# ---------------------------------------------------------------------------
# The index-2 order Z[sqrt p]
# ---------------------------------------------------------------------------

def varpi_h_A(p: int) -> tuple[int, int]:
    """(varpi, h_A) for prime p = 1 mod 4.

    varpi = [O_F^x : Z[sqrt p]^x] is 1 when the fundamental unit lies in
    Z[sqrt p] and 3 otherwise.  h_A = h(F) for p = 1 mod 8, and
    3 h(F)/varpi for p = 5 mod 8.
    """
    if not is_prime(p) or p % 4 != 1:
        raise ValueError(f"p must be a prime = 1 mod 4: {p}")
    varpi = 1 if unit_in_zsqrt(p) else 3
    h = h_field(p)
    if p % 8 == 1:
        h_A = h
    else:
        if (3 * h) % varpi:
            raise ArithmeticError(f"3 h(F) not divisible by varpi at p={p}")
        h_A = 3 * h // varpi
    return varpi, h_A


def order_data(p: int) -> OrderData:
    varpi, h_A = varpi_h_A(p)
    return OrderData(disc=Disc.of(p), varpi=varpi, h_A=h_A)


# ---------------------------------------------------------------------------
# Aggregate record and memo-table import/export (for the persistent cache)
# ---------------------------------------------------------------------------

def class_invariants(m: int) -> ClassInvariants:
    """Full invariant record for Q(sqrt m); imaginary fields carry h only."""
    d = Disc.of(m)
    if m < 0:
        return ClassInvariants(disc=d, h=class_number_imag(m))
    h, h_plus = class_number_real(m)
    return ClassInvariants(
        disc=d,
        h=h,
        h_plus=h_plus,
        fund_unit=fundamental_unit(m),
        zeta_minus1=zeta_minus1(m),
    )


def memo_export() -> tuple[dict[int, int], dict[int, Unit]]:
    """Snapshot of the (class number, unit) memo tables, keyed by m."""
    with _lock:
        return dict(_H_MEMO), dict(_UNIT_MEMO)


def memo_preload(h_entries: dict[int, int], unit_entries: dict[int, Unit]) -> None:
    """Seed the memo tables (e.g. from the persistent cache)."""
    with _lock:
        _H_MEMO.update(h_entries)
        _UNIT_MEMO.update(unit_entries)
