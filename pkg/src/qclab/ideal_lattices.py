"""Hermite-normal-form arithmetic of ideals in quadratic orders.

A quadratic order is Z[theta] with theta = (1+sqrt(m))/2 (maximal order,
m = 1 mod 4), or theta = sqrt(m) (maximal order otherwise, and the
index-2 order Z[sqrt(m)] when m = 1 mod 4).  Only conductor indices
1 and 2 are supported.

Every fractional ideal of such an order has a unique presentation

    I  =  scale * ( Z*a  +  Z*(b + theta) ),    a > 0,  0 <= b < a,

with scale a positive rational; this is the HNF stored by QuadLattice.
Products are computed by taking the four pairwise products of basis
elements and re-normalizing, so HNF equality is an exact ideal equality
test.

Principality testing maps an ideal to its norm form
(a, 2b + tr(theta), N(b+theta)/a) and walks the rho-cycle of that
indefinite form: the ideal has a generator of norm +N(I) (resp. -N(I))
exactly when the cycle attains leading coefficient +1 (resp. -1).  The
cycle is a complete set of representatives for the form class modulo
the (possibly huge) unit group, so the search is finite and the negative
verdict is definitive.  The witness matrix gives back an explicit
generator, which is verified against the ideal before being returned.

The lattice a(d) = 4Z + (1+sqrt(d))Z of the order Z[sqrt(d)], d = 5
mod 8, generates the kernel of the ideal-class extension map to the
maximal order; its principality is equivalent to the fundamental unit
NOT lying in Z[sqrt(d)], and the kernel has order 3 or 1 accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import factorize, is_squarefree, xgcd
from .forms import pm_one_witnesses
from .quadratic_core import unit_in_zsqrt

__all__ = [
    "QuadOrder",
    "QuadLattice",
    "Generator",
    "make_lattice",
    "unit_ideal",
    "principal_ideal",
    "ideal_mul",
    "ideal_norm",
    "conjugate",
    "is_invertible",
    "is_principal",
    "capitulation_ideal",
    "capitulation_kernel_order",
    "ramified_prime_lattices",
    "dyadic_prime_lattices",
]


@dataclass(frozen=True)
class QuadOrder:
    """The order Z + f*O_F of Q(sqrt m); f in {1, 2}, f = 2 only for m = 1 mod 4."""

    m: int
    conductor_index: int = 1

    def __post_init__(self):
        if not is_squarefree(self.m) or self.m in (0, 1):
            raise ValueError(f"m must be squarefree, != 0, 1: {self.m}")
        if self.conductor_index not in (1, 2):
            raise ValueError("only conductor indices 1 and 2 are supported")
        if self.conductor_index == 2 and self.m % 4 != 1:
            raise ValueError("conductor index 2 requires m = 1 mod 4")

    @property
    def half_integral(self) -> bool:
        """True when theta = (1 + sqrt m)/2."""
        return self.conductor_index == 1 and self.m % 4 == 1

    @property
    def theta_trace(self) -> int:
        return 1 if self.half_integral else 0

    @property
    def theta_norm(self) -> int:
        # theta satisfies theta^2 - t*theta + n = 0
        return (1 - self.m) // 4 if self.half_integral else -self.m

    @property
    def discriminant(self) -> int:
        return self.m if self.half_integral else 4 * self.m


@dataclass(frozen=True)
class QuadLattice:
    """HNF presentation scale * (Z*a + Z*(b + theta)) of a fractional ideal."""

    order: QuadOrder
    a: int
    b: int
    scale: Fraction

    def __post_init__(self):
        if self.a <= 0 or not (0 <= self.b < self.a) or self.scale <= 0:
            raise ValueError("invalid HNF data")
        t, n = self.order.theta_trace, self.order.theta_norm
        if (self.b * self.b + t * self.b + n) % self.a:
            raise ValueError("lattice is not an ideal of its order")


@dataclass(frozen=True)
class Generator:
    """Field element (x + y*sqrt(m)) / den."""

    m: int
    x: int
    y: int
    den: int

    def norm(self) -> Fraction:
        return Fraction(self.x * self.x - self.m * self.y * self.y, self.den * self.den)

    def is_totally_positive(self) -> bool:
        return _sign_quad(self.x, self.y, self.m) > 0 and _sign_quad(self.x, -self.y, self.m) > 0

    def __str__(self) -> str:
        s = f"{self.x} + {self.y}*sqrt({self.m})" if self.y >= 0 else \
            f"{self.x} - {-self.y}*sqrt({self.m})"
        return f"({s})/{self.den}" if self.den != 1 else s


def _sign_quad(u: int, v: int, m: int) -> int:
    """Exact sign of u + v*sqrt(m) for m > 0."""
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    if u > 0 and v > 0:
        return 1
    if u < 0 and v < 0:
        return -1
    return ((v > 0) - (v < 0)) if v * v * m > u * u else ((u > 0) - (u < 0))


# ---------------------------------------------------------------------------
# Construction and HNF normalization
# ---------------------------------------------------------------------------

def make_lattice(order: QuadOrder, gens: list[tuple[Fraction, Fraction]]) -> QuadLattice:
    """HNF of the Z-span of generators given as (u, v) = u + v*theta."""
    gens = [(Fraction(u), Fraction(v)) for u, v in gens]
    if all(u == 0 and v == 0 for u, v in gens):
        raise ValueError("zero lattice")
    lcm = 1
    for u, v in gens:
        lcm = lcm * u.denominator // math.gcd(lcm, u.denominator)
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    rows = [(int(u * lcm), int(v * lcm)) for u, v in gens]

    # gcd of theta-coordinates, with a combination achieving it
    g, gu = 0, 0
    for u, v in rows:
        if v:
            # extended gcd accumulation; track the 1-coordinate of the combination
            g, s, t = xgcd(g, v)
            gu = s * gu + t * u
    if g == 0:
        raise ValueError("generators do not span a full lattice")
    # reduce every generator to theta-coordinate 0 and gcd the 1-coordinates
    A = 0
    for u, v in rows:
        A = math.gcd(A, u - (v // g) * gu)
    if A == 0:
        raise ValueError("generators do not span a full lattice")
    # lattice = (1/lcm) * ( Z*A + Z*(gu + g*theta) ); ideal-ness forces g | A, g | gu
    if A % g or gu % g:
        raise ValueError("lattice is not an ideal of its order")
    a = A // g
    b = (gu // g) % a
    return QuadLattice(order=order, a=a, b=b, scale=Fraction(g, lcm))


def unit_ideal(order: QuadOrder) -> QuadLattice:
    return QuadLattice(order=order, a=1, b=0, scale=Fraction(1))


def principal_ideal(order: QuadOrder, u: Fraction, v: Fraction) -> QuadLattice:
    """The ideal (u + v*theta) * order."""
    u, v = Fraction(u), Fraction(v)
    t, n = order.theta_trace, order.theta_norm
    # theta * (u + v theta) = -n v + (u + t v) theta
    return make_lattice(order, [(u, v), (-n * v, u + t * v)])


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def ideal_mul(I: QuadLattice, J: QuadLattice) -> QuadLattice:
    """Product ideal, as the HNF of the pairwise basis products."""
    if I.order != J.order:
        raise ValueError("ideal product requires a common order")
    t, n = I.order.theta_trace, I.order.theta_norm
    ai, bi, aj, bj = I.a, I.b, J.a, J.b
    gens = [
        (Fraction(ai * aj), Fraction(0)),
        (Fraction(ai * bj), Fraction(ai)),
        (Fraction(aj * bi), Fraction(aj)),
        # (bi + theta)(bj + theta) with theta^2 = t*theta - n
        (Fraction(bi * bj - n), Fraction(bi + bj + t)),
    ]
    prod = make_lattice(I.order, gens)
    return QuadLattice(
        order=prod.order, a=prod.a, b=prod.b, scale=prod.scale * I.scale * J.scale
    )


def ideal_norm(I: QuadLattice) -> Fraction:
    """Index-based norm: [O : I] extended multiplicatively to scales."""
    return Fraction(I.a) * I.scale * I.scale


def conjugate(I: QuadLattice) -> QuadLattice:
    """Image of the ideal under sqrt(m) -> -sqrt(m)."""
    t = I.order.theta_trace
    # conj(b + theta) = (b + t) - theta
    conj = make_lattice(I.order, [(Fraction(I.a), Fraction(0)), (Fraction(I.b + t), Fraction(-1))])
    return QuadLattice(order=conj.order, a=conj.a, b=conj.b, scale=conj.scale * I.scale)


def is_invertible(I: QuadLattice) -> bool:
    """Whether I * conj(I) = N(I) * O (locally principal / proper ideal test)."""
    prod = ideal_mul(I, conjugate(I))
    n = ideal_norm(I)
    return prod.a == 1 and prod.b == 0 and prod.scale == n


# ---------------------------------------------------------------------------
# Principality
# ---------------------------------------------------------------------------

def is_principal(
    I: QuadLattice, mode: str = "wide"
) -> tuple[bool, Generator | None]:
    """Decide whether I is principal; return a verified generator if so.

    mode 'wide' accepts any generator; mode 'totally_positive' requires a
    generator that is positive in both real embeddings (equivalently, a
    generator of norm +N(I)).  The decision walks the rho-cycle of the
    norm form of I, which enumerates the candidate generators up to
    multiplication by units, so a miss is a proof of non-principality.
    """
    if mode not in ("wide", "totally_positive"):
        raise ValueError(f"unknown mode: {mode}")
    order = I.order
    if order.m < 0:
        raise ValueError("principality search implemented for real orders only")
    if not is_invertible(I):
        raise ValueError("is_principal requires a proper (invertible) ideal")
    t, n = order.theta_trace, order.theta_norm
    a, b = I.a, I.b
    form = (a, 2 * b + t, (b * b + t * b + n) // a)
    witnesses = pm_one_witnesses(form, order.discriminant)
    wanted = (1,) if mode == "totally_positive" else (1, -1)
    for value in wanted:
        if value in witnesses:
            x, y = witnesses[value]
            gen = _witness_to_generator(I, x, y)
            _verify_generator(I, gen, value)
            if mode == "totally_positive" and not gen.is_totally_positive():
                gen = Generator(m=gen.m, x=-gen.x, y=-gen.y, den=gen.den)
                assert gen.is_totally_positive()
            return True, gen
    return False, None


def _witness_to_generator(I: QuadLattice, x: int, y: int) -> Generator:
    """Map a norm-form witness (x, y) to the element scale*(a*x + (b+theta)*y)."""
    order = I.order
    u = I.a * x + I.b * y  # coefficient of 1 over basis (1, theta)
    v = y
    # convert to (1, sqrt m)/den coordinates
    if order.half_integral:
        num_x, num_y, den = 2 * u + v, v, 2
    else:
        num_x, num_y, den = u, v, 1
    sc = I.scale
    num_x *= sc.numerator
    num_y *= sc.numerator
    den *= sc.denominator
    g = math.gcd(math.gcd(num_x, num_y), den)
    return Generator(m=order.m, x=num_x // g, y=num_y // g, den=den // g)


def _verify_generator(I: QuadLattice, gen: Generator, value: int) -> None:
    if gen.norm() != value * ideal_norm(I):
        raise ArithmeticError("generator fails its norm check")
    # (gen) * O must equal I as lattices
    order = I.order
    if order.half_integral:
        # x + y*sqrt(m) = (x - y) + 2y*theta, all over den
        u = Fraction(gen.x - gen.y, gen.den)
        v = Fraction(2 * gen.y, gen.den)
    else:
        u = Fraction(gen.x, gen.den)
        v = Fraction(gen.y, gen.den)
    if principal_ideal(order, u, v) != I:
        raise ArithmeticError("generator does not generate the ideal")


# ---------------------------------------------------------------------------
# The capitulating ideal of Z[sqrt d], d = 5 mod 8
# ---------------------------------------------------------------------------

def capitulation_ideal(d: int) -> QuadLattice:
    """The ideal 4Z + (1 + sqrt d)Z of Z[sqrt d], for squarefree d = 5 mod 8."""
    if d % 8 != 5 or not is_squarefree(d):
        raise ValueError(f"d must be squarefree and = 5 mod 8: {d}")
    return QuadLattice(order=QuadOrder(d, conductor_index=2), a=4, b=1, scale=Fraction(1))


def capitulation_kernel_order(d: int) -> int:
    """Order (1 or 3) of the kernel of extension to the maximal order.

    The kernel of Pic(Z[sqrt d]) -> Pic(O_F) is generated by the class of
    capitulation_ideal(d); that class is nontrivial (of order 3) exactly
    when the fundamental unit lies in Z[sqrt d].
    """
    if d % 8 != 5 or not is_squarefree(d):
        raise ValueError(f"d must be squarefree and = 5 mod 8: {d}")
    return 3 if unit_in_zsqrt(d) else 1


# ---------------------------------------------------------------------------
# Ramified primes of the maximal order (for 2-torsion computations)
# ---------------------------------------------------------------------------

def dyadic_prime_lattices(m: int) -> list[QuadLattice]:
    """The primes of O_F above 2, as ideals of the maximal order of Q(sqrt m).

    m = 1 mod 8: 2 splits into (2, theta) and (2, 1 + theta); m = 5 mod 8:
    2 is inert (the ideal 2*O_F); otherwise 2 ramifies.
    """
    order = QuadOrder(m, conductor_index=1)
    if m % 8 == 1:
        return [
            QuadLattice(order=order, a=2, b=0, scale=Fraction(1)),
            QuadLattice(order=order, a=2, b=1, scale=Fraction(1)),
        ]
    if m % 8 == 5:
        return [QuadLattice(order=order, a=1, b=0, scale=Fraction(2))]
    if m % 2 == 0:
        return [QuadLattice(order=order, a=2, b=0, scale=Fraction(1))]
    return [QuadLattice(order=order, a=2, b=1, scale=Fraction(1))]  # m = 3 mod 4


def ramified_prime_lattices(m: int) -> list[tuple[int, QuadLattice]]:
    """The primes of O_F dividing the discriminant, as (residue char, lattice)."""
    order = QuadOrder(m, conductor_index=1)
    out = []
    if not order.half_integral:
        # dyadic ramified prime of disc 4m
        if m % 2 == 0:
            out.append((2, QuadLattice(order=order, a=2, b=0, scale=Fraction(1))))
        else:  # m = 3 mod 4
            out.append((2, QuadLattice(order=order, a=2, b=1, scale=Fraction(1))))
    for q, _ in factorize(m):
        if q == 2:
            continue
        b = (q - 1) // 2 if order.half_integral else 0
        out.append((q, QuadLattice(order=order, a=q, b=b, scale=Fraction(1))))
    return sorted(out, key=lambda pair: pair[0])
