"""Exact rank-4 lattice arithmetic in biquadratic CM fields.

K = Q(sqrt(d), sqrt(-m)) with d > 1 and m > 0 squarefree.  Elements are
4-tuples of rationals over the ambient basis

    (1, w1, w2, w3) = (1, sqrt(d), sqrt(-m), sqrt(d)*sqrt(-m)),

with w1^2 = d, w2^2 = -m, w3 = w1*w2.  Full Z-lattices are stored as an
integer HNF basis over a common denominator, which makes membership,
equality, sums and products exact.

The maximal order is computed, not looked up: starting from the span of
the integral generators of the three quadratic subfields, the lattice is
closed under multiplication and then saturated prime by prime until its
discriminant (the determinant of the trace form) equals the
conductor-discriminant target disc(K) = D1 * D2 * D3, the product of the
three quadratic subfield discriminants.  Integrality of a candidate
element is decided by the integrality of its characteristic polynomial
(Faddeev-LeVerrier, exact rationals).

On top of this the module computes the CM involution, the purely
imaginary part J of O_K (and its eta-twisted analogue inside F(sqrt -1)),
the minimal orders O_F + J and O_F + f*O_K, relative conductors, and the
enumeration of intermediate orders - everything the capitulation
machinery needs from the quartic side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import factorize, is_squarefree, squarefree_kernel, xgcd

Elt = tuple[Fraction, Fraction, Fraction, Fraction]

ZERO = (Fraction(0), Fraction(0), Fraction(0), Fraction(0))
ONE = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class BiquadField:
    """K = Q(sqrt d, sqrt -m); d > 1, m > 0, both squarefree."""

    d: int
    m: int

    def __post_init__(self):
        if self.d <= 1 or not is_squarefree(self.d):
            raise ValueError(f"d must be squarefree > 1: {self.d}")
        if self.m <= 0 or not is_squarefree(self.m):
            raise ValueError(f"m must be squarefree > 0: {self.m}")

    @property
    def third_subfield_m(self) -> int:
        """Squarefree kernel of -d*m (the third quadratic subfield)."""
        return squarefree_kernel(-self.d * self.m)

    def mul(self, x: Elt, y: Elt) -> Elt:
        a0, a1, a2, a3 = x
        b0, b1, b2, b3 = y
        d, m = self.d, self.m
        return (
            a0 * b0 + d * a1 * b1 - m * a2 * b2 - d * m * a3 * b3,
            a0 * b1 + a1 * b0 - m * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 + d * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        )

    @staticmethod
    def conj(x: Elt) -> Elt:
        """The CM involution: fixes F = Q(sqrt d), negates sqrt(-m)."""
        return (x[0], x[1], -x[2], -x[3])

    @staticmethod
    def trace_q(x: Elt) -> Fraction:
        """Absolute trace Tr_{K/Q}."""
        return 4 * x[0]

    def charpoly(self, x: Elt) -> list[Fraction]:
        """Characteristic polynomial of multiplication by x (monic, degree 4)."""
        basis = [ONE,
                 (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
                 (Fraction(0), Fraction(0), Fraction(1), Fraction(0)),
                 (Fraction(0), Fraction(0), Fraction(0), Fraction(1))]
        cols = [self.mul(x, b) for b in basis]
        M = [[cols[j][i] for j in range(4)] for i in range(4)]
        return _charpoly4(M)

    def is_integral(self, x: Elt) -> bool:
        return all(c.denominator == 1 for c in self.charpoly(x))


def _mat_mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def _charpoly4(M) -> list[Fraction]:
    """Faddeev-LeVerrier: [1, c1, c2, c3, c4] with p(t) = t^4 + c1 t^3 + ... + c4."""
    I = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    coeffs = [Fraction(1)]
    N = I
    for k in range(1, 5):
        N = _mat_mul(M, N)
        ck = -sum(N[i][i] for i in range(4)) / k
        coeffs.append(ck)
        if k < 4:
            N = [[N[i][j] + (ck if i == j else 0) for j in range(4)] for i in range(4)]
    return coeffs


# ---------------------------------------------------------------------------
# Integer HNF lattices of rank 4
# ---------------------------------------------------------------------------

def _hnf4(rows: list[list[int]]) -> list[list[int]]:
    """Row HNF (upper triangular, positive pivots, reduced above) of full rank 4."""
    work = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []
    for col in range(4):
        pivot = None
        rest = []
        for r in work:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = xgcd(pivot[col], r[col])
            u, v = pivot[col] // g, r[col] // g
            # [[s, t], [v, -u]] is unimodular (s*u + t*v = 1), so the span is kept
            new_pivot = [s * a + t * b for a, b in zip(pivot, r)]
            reduced = [v * a - u * b for a, b in zip(pivot, r)]
            pivot = new_pivot
            if any(reduced):
                rest.append(reduced)
        if pivot is None:
            raise ValueError("lattice is not of full rank")
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        work = rest
    for i in range(3, -1, -1):  # reduce entries above each pivot
        for j in range(i - 1, -1, -1):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


@dataclass(frozen=True)
class Lattice4:
    """Full-rank Z-lattice: rows of ``basis`` over ``den`` in ambient coordinates."""

    field: BiquadField
    den: int
    basis: tuple[tuple[int, int, int, int], ...]

    @classmethod
    def from_elements(cls, field: BiquadField, elems: list[Elt]) -> "Lattice4":
        den = 1
        for e in elems:
            for c in e:
                den = den * c.denominator // math.gcd(den, c.denominator)
        rows = [[int(c * den) for c in e] for e in elems]
        hnf = _hnf4(rows)
        g = den
        for r in hnf:
            for x in r:
                g = math.gcd(g, x)
        return cls(field=field, den=den // g,
                   basis=tuple(tuple(x // g for x in r) for r in hnf))

    def elements(self) -> list[Elt]:
        return [tuple(Fraction(x, self.den) for x in row) for row in self.basis]

    def contains(self, x: Elt) -> bool:
        v = [c * self.den for c in x]
        for i in range(3, -1, -1):
            piv = self.basis[i][i]
            q = v[i] / piv
            if q.denominator != 1:
                return False
            q = int(q)
            v = [a - q * b for a, b in zip(v, self.basis[i])]
        return all(a == 0 for a in v)

    def subset_of(self, other: "Lattice4") -> bool:
        return all(other.contains(e) for e in self.elements())

    def sum(self, other: "Lattice4") -> "Lattice4":
        return Lattice4.from_elements(self.field, self.elements() + other.elements())

    def product(self, other: "Lattice4") -> "Lattice4":
        f = self.field
        gens = [f.mul(a, b) for a in self.elements() for b in other.elements()]
        return Lattice4.from_elements(f, gens)

    def index_in(self, other: "Lattice4") -> int:
        """[other : self] for self a sublattice of other."""
        det_self = _det4(self.basis) / Fraction(self.den) ** 4
        det_other = _det4(other.basis) / Fraction(other.den) ** 4
        r = det_self / det_other
        if r.denominator != 1:
            raise ValueError("not commensurable as expected")
        return abs(int(r))

    def disc(self) -> int:
        """Determinant of the trace form on a basis (an integer for orders)."""
        f = self.field
        es = self.elements()
        gram = [[f.trace_q(f.mul(es[i], es[j])) for j in range(4)] for i in range(4)]
        dd = _det4_frac(gram)
        if dd.denominator != 1:
            raise ArithmeticError("non-integral trace-form determinant")
        return int(dd)


def _det4(rows) -> Fraction:
    return _det4_frac([[Fraction(x) for x in r] for r in rows])


def _det4_frac(M) -> Fraction:
    # cofactor expansion is fine at this size
    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    total = Fraction(0)
    sign = 1
    for j in range(4):
        minor = [[M[i][k] for k in range(4) if k != j] for i in range(1, 4)]
        total += sign * M[0][j] * det3(minor)
        sign = -sign
    return total


# ---------------------------------------------------------------------------
# Maximal order
# ---------------------------------------------------------------------------

def _subfield_generator(msub: int, which: int) -> Elt:
    """Integral generator of the quadratic subfield, in ambient coordinates.

    which = 1: Q(sqrt d) uses w1;  2: Q(sqrt -m) uses w2;  3: the third
    subfield Q(sqrt msub) whose root is w3/g for -d*m = g^2 * msub.
    """
    half = Fraction(1, 2) if msub % 4 == 1 else Fraction(0)
    coeff = Fraction(1, 2) if msub % 4 == 1 else Fraction(1)
    e = [half, Fraction(0), Fraction(0), Fraction(0)]
    e[which] = coeff
    return tuple(e)


def _ring_closure(field: BiquadField, lat: Lattice4) -> Lattice4:
    while True:
        es = lat.elements()
        extra = []
        for i in range(4):
            for j in range(i, 4):
                p = field.mul(es[i], es[j])
                if not lat.contains(p):
                    extra.append(p)
        if not extra:
            return lat
        lat = Lattice4.from_elements(field, es + extra)


@lru_cache(maxsize=None)
def maximal_order(d: int, m: int) -> Lattice4:
    """O_K for K = Q(sqrt d, sqrt -m), verified against disc(K) = D1*D2*D3."""
    field = BiquadField(d, m)
    from .quadratic_core import Disc

    d3 = field.third_subfield_m
    target = Disc.of(d).disc * Disc.of(-m).disc * Disc.of(d3).disc
    g1 = _subfield_generator(d, 1)
    g2 = _subfield_generator(-m, 2)
    # scale w3 down to the square root of the third subfield's radicand
    sq = -d * m // d3
    g = math.isqrt(sq)
    assert g * g == sq
    g3raw = _subfield_generator(d3, 3)
    g3 = tuple(c / g if i == 3 else c for i, c in enumerate(g3raw))
    lat = Lattice4.from_elements(field, [ONE, g1, g2, g3, field.mul(g1, g2),
                                         field.mul(g1, g3), field.mul(g2, g3)])
    lat = _ring_closure(field, lat)
    while True:
        disc = lat.disc()
        if disc == target:
            return lat
        ratio = disc // target
        if disc != target * ratio:
            raise ArithmeticError(f"disc {disc} not a multiple of target {target}")
        s = math.isqrt(ratio)
        if s * s != ratio:
            raise ArithmeticError("index squared is not a perfect square")
        ell = factorize(s)[0][0]
        es = lat.elements()
        found = []
        for mask in range(1, ell ** 4):
            coeffs = []
            mm = mask
            for _ in range(4):
                coeffs.append(mm % ell)
                mm //= ell
            x = ZERO
            for c, e in zip(coeffs, es):
                if c:
                    x = tuple(a + c * b for a, b in zip(x, e))
            x = tuple(a / ell for a in x)
            if field.is_integral(x) and not lat.contains(x):
                found.append(x)
        if not found:
            raise ArithmeticError(f"saturation at {ell} found no enlargement")
        lat = _ring_closure(field, Lattice4.from_elements(field, es + found))


# ---------------------------------------------------------------------------
# CM structure: the purely imaginary part and the minimal orders
# ---------------------------------------------------------------------------

def _kernel_sublattice(lat: Lattice4, op) -> list[Elt]:
    """Z-basis of {z in lat : op(z) = 0}, for op linear with op(lat) in lat."""
    field = lat.field
    es = lat.elements()
    # integer matrix of op on the lattice basis
    cols = []
    for e in es:
        img = op(e)
        coords = _coords_in(lat, img)
        cols.append(coords)
    # rows of M: op(e_j) = sum_i M[j][i] e_i;  kernel of x -> x @ M
    M = cols
    kernel_rows = _int_row_kernel(M)
    out = []
    for row in kernel_rows:
        x = ZERO
        for c, e in zip(row, es):
            if c:
                x = tuple(a + c * b for a, b in zip(x, e))
        out.append(x)
    return out


def _coords_in(lat: Lattice4, x: Elt) -> list[int]:
    v = [c * lat.den for c in x]
    coords = [0, 0, 0, 0]
    for i in range(3, -1, -1):
        piv = lat.basis[i][i]
        q = v[i] / piv
        if q.denominator != 1:
            raise ValueError("element not in lattice")
        coords[i] = int(q)
        v = [a - coords[i] * b for a, b in zip(v, lat.basis[i])]
    if any(v):
        raise ValueError("element not in lattice")
    return coords


def _int_row_kernel(M: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^4 : x @ M = 0} via row elimination with transformation."""
    n = 4
    A = [row[:] for row in M]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    piv_row = 0
    for col in range(n):
        while True:
            nz = [i for i in range(piv_row, n) if A[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(A[i][col]))
            i0 = nz[0]
            for i in nz[1:]:
                q = A[i][col] // A[i0][col]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[i0])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[i0])]
        nz = [i for i in range(piv_row, n) if A[i][col]]
        if nz:
            i0 = nz[0]
            A[piv_row], A[i0] = A[i0], A[piv_row]
            U[piv_row], U[i0] = U[i0], U[piv_row]
            piv_row += 1
    return [U[i] for i in range(n) if not any(A[i])]


# ---------------------------------------------------------------------------
# CM structure of O_K
# ---------------------------------------------------------------------------

def omega_f(d: int) -> Elt:
    """Integral generator of O_F inside K (ambient coordinates)."""
    return _subfield_generator(d, 1)


def two_power_root_of_unity(d: int) -> Elt:
    """eta = zeta_{2^n} with n maximal for K = Q(sqrt d, sqrt -1).

    n = 3 exactly when d = 2 (then K = Q(zeta_8) and eta = (w1 + w3)/2);
    otherwise n = 2 and eta = sqrt(-1) itself.
    """
    if d == 2:
        return (Fraction(0), Fraction(1, 2), Fraction(0), Fraction(1, 2))
    return (Fraction(0), Fraction(0), Fraction(1), Fraction(0))


def imaginary_module_gens(d: int, m: int) -> list[Elt]:
    """Z-basis of J = {z in O_K : conj(z) = -z}, or of the eta-twisted
    module {z : conj(z) = eta*z} when K = F(sqrt -1) (m = 1)."""
    OK = maximal_order(d, m)
    field = OK.field
    if m == 1:
        eta = two_power_root_of_unity(d)

        def op(z: Elt) -> Elt:
            ez = field.mul(eta, z)
            return tuple(a - b for a, b in zip(field.conj(z), ez))
    else:

        def op(z: Elt) -> Elt:
            return tuple(a + b for a, b in zip(field.conj(z), z))

    gens = _kernel_sublattice(OK, op)
    if len(gens) != 2:
        raise ArithmeticError(f"imaginary module has unexpected rank {len(gens)}")
    return gens


@lru_cache(maxsize=None)
def minimal_capitulating_order(d: int, m: int) -> Lattice4:
    """The order O_F + J (with J as in imaginary_module_gens).

    Every order of K containing O_F whose class-extension kernel from
    O_F is nontrivial contains this one, so its conductor bounds the
    admissible conductors from below.
    """
    OK = maximal_order(d, m)
    gens = [ONE, omega_f(d)] + imaginary_module_gens(d, m)
    B0 = Lattice4.from_elements(OK.field, gens)
    closed = _ring_closure(OK.field, B0)
    if closed.basis != B0.basis or closed.den != B0.den:
        raise ArithmeticError("O_F + J is not multiplicatively closed")
    if not B0.subset_of(OK):
        raise ArithmeticError("O_F + J is not contained in O_K")
    return B0


def _f_ideal_elements(lat) -> list[Elt]:
    """Convert a QuadLattice over the maximal real order into K-elements."""
    d = lat.order.m
    if lat.order.conductor_index != 1:
        raise ValueError("expected an ideal of the maximal order of F")
    th = omega_f(d) if lat.order.half_integral else (
        Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    sc = Fraction(lat.scale)
    g1 = (sc * lat.a, Fraction(0), Fraction(0), Fraction(0))
    g2 = (sc * (lat.b + th[0]), sc * th[1], sc * th[2], sc * th[3])
    return [g1, g2]


def order_with_conductor(d: int, m: int, f_ideal) -> Lattice4:
    """The order O_F + f*O_K for an O_F-ideal f (given as a QuadLattice)."""
    OK = maximal_order(d, m)
    field = OK.field
    gens = [ONE, omega_f(d)]
    for g in _f_ideal_elements(f_ideal):
        for beta in OK.elements():
            gens.append(field.mul(g, beta))
    return Lattice4.from_elements(field, gens)


def conductor_valuations(d: int, m: int, B: Lattice4) -> list[int]:
    """Valuations of the relative conductor {x in O_F : x*O_K <= B} at the
    dyadic primes of F, listed in the order of dyadic_prime_lattices(d).

    Only orders with 2*O_K <= B are supported (true for every order this
    package constructs), so the conductor divides (2) and is dyadic.
    """
    from .ideal_lattices import dyadic_prime_lattices, ideal_mul, unit_ideal, QuadOrder

    OK = maximal_order(d, m)
    field = OK.field
    primes = dyadic_prime_lattices(d)
    caps = [2 if p.order.m % 4 in (2, 3) else 1 for p in primes]

    def multiplies_in(f_lat) -> bool:
        for g in _f_ideal_elements(f_lat):
            for beta in OK.elements():
                if not B.contains(field.mul(g, beta)):
                    return False
        return True

    def ideal_power_product(exps: list[int]):
        acc = unit_ideal(QuadOrder(d, conductor_index=1))
        for p, e in zip(primes, exps):
            for _ in range(e):
                acc = ideal_mul(acc, p)
        return acc

    if not multiplies_in(ideal_power_product(caps)):
        raise ArithmeticError("conductor does not divide (2); unsupported order")
    vals = []
    for i in range(len(primes)):
        exps = list(caps)
        v = caps[i]
        while v > 0:
            exps[i] = v - 1
            if multiplies_in(ideal_power_product(exps)):
                v -= 1
            else:
                break
        vals.append(v)
    # exactness: the product with the found valuations must itself multiply in
    if not multiplies_in(ideal_power_product(vals)):
        raise ArithmeticError("conductor valuation search is inconsistent")
    return vals


# ---------------------------------------------------------------------------
# Intermediate orders
# ---------------------------------------------------------------------------

def intermediate_orders_count(d: int, m: int, B: Lattice4) -> int:
    """Number of orders L with B <= L <= O_K, by explicit enumeration.

    Enumerates all subgroups of the finite quotient O_K/B and keeps the
    pullback lattices that are closed under multiplication.
    """
    OK = maximal_order(d, m)
    field = OK.field
    index = B.index_in(OK)
    if index == 1:
        return 1
    if index > 64:
        raise ValueError(f"quotient too large to enumerate: {index}")
    R = [_coords_in(OK, e) for e in B.elements()]
    H = _hnf4(R)
    diag = [H[i][i] for i in range(4)]

    def reduce_vec(v: list[int]) -> tuple[int, ...]:
        v = list(v)
        for i in range(3, -1, -1):
            q = v[i] // H[i][i]
            if q:
                v = [a - q * b for a, b in zip(v, H[i])]
        return tuple(v)

    reps: list[tuple[int, ...]] = []
    for r0 in range(diag[0]):
        for r1 in range(diag[1]):
            for r2 in range(diag[2]):
                for r3 in range(diag[3]):
                    reps.append((r0, r1, r2, r3))
    assert len(reps) == index
    idx = {r: i for i, r in enumerate(reps)}
    add = [[idx[reduce_vec([a + b for a, b in zip(x, y)])] for y in reps] for x in reps]

    n = len(reps)
    zero = idx[(0, 0, 0, 0)]
    count = 0
    ok_basis = OK.elements()

    def coset_lift(r: tuple[int, ...]) -> Elt:
        x = ZERO
        for c, e in zip(r, ok_basis):
            if c:
                x = tuple(a + c * b for a, b in zip(x, e))
        return x

    # enumerate subsets containing 0, closed under addition
    others = [i for i in range(n) if i != zero]
    for mask in range(1 << len(others)):
        members = {zero}
        for bit, i in enumerate(others):
            if mask >> bit & 1:
                members.add(i)
        if not all(add[i][j] in members for i in members for j in members):
            continue
        lattice = Lattice4.from_elements(
            field, B.elements() + [coset_lift(reps[i]) for i in members if i != zero]
        )
        closed = _ring_closure(field, lattice)
        if closed.basis == lattice.basis and closed.den == lattice.den:
            count += 1
    return count


def index2_proper_order(d: int) -> Lattice4:
    """The index-2 suborder Z + Z sqrt(d) + Z (sqrt d + sqrt -3)/2
    + Z (1 + sqrt d)(1 + sqrt -3)/4 of O_K, K = Q(sqrt d, sqrt -3).

    Defined for squarefree d = 5 mod 8 with 3 not dividing d.  It is a
    proper order over Z[sqrt d] (it does not contain (1 + sqrt d)/2) and
    is not stable under the CM involution.
    """
    if d % 8 != 5 or d % 3 == 0 or not is_squarefree(d):
        raise ValueError(f"d must be squarefree, 5 mod 8, prime to 3: {d}")
    field = BiquadField(d, 3)
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    gens = [
        ONE,
        (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
        (Fraction(0), h, h, Fraction(0)),
        (q, q, q, q),
    ]
    return Lattice4.from_elements(field, gens)
