"""Binary quadratic forms with exact integer arithmetic.

Two independent engines live here:

* definite forms (discriminant D < 0): counting reduced positive-definite
  forms (a, b, c) with b^2 - 4ac = D, |b| <= a <= c, and b >= 0 whenever
  |b| = a or a = c.  A second routine counts classes by reducing a
  redundant covering set of forms with the classical reduction algorithm,
  so the two totals can be compared as an internal cross-check.

* indefinite forms (D > 0, nonsquare): the reduction operator rho, full
  enumeration of reduced forms, cycle counting (= narrow class number of
  the order of discriminant D), and a representation test for +-1 that
  returns an explicit integer witness (x, y).  The witness is tracked
  through the reduction/cycle walk by accumulating the SL2(Z) coordinate
  transforms, so callers can reconstruct explicit ideal generators.

Conventions: a form is the integer triple (a, b, c) standing for
a*x^2 + b*x*y + c*y^2, and rho acts by (a, b, c) -> (c, r, (r^2-D)/4c)
with r = -b mod 2|c| chosen in the classical reduction window.
"""

from __future__ import annotations

import math

Form = tuple[int, int, int]

__all__ = [
    "reduced_definite_count",
    "reduced_definite_count_by_reduction",
    "indefinite_is_reduced",
    "indefinite_reduced_forms",
    "indefinite_cycle_count",
    "pm_one_witnesses",
]


# ---------------------------------------------------------------------------
# Definite forms (D < 0)
# ---------------------------------------------------------------------------

def reduced_definite_count(D: int) -> int:
    """Number of reduced positive-definite forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"not a negative discriminant: {D}")
    count = 0
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue  # boundary forms are counted with b >= 0 only
            count += 1
    return count


def _reduce_definite(a: int, b: int, c: int) -> Form:
    """Classical reduction loop for a positive-definite form."""
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            r = (a - b) // (2 * a)  # translate b into (-a, a]
            b, c = b + 2 * r * a, a * r * r + b * r + c
            continue
        break
    if b < 0 and (a == c or b == -a):
        b = -b
    return (a, b, c)


def reduced_definite_count_by_reduction(D: int) -> int:
    """Independent class count: reduce a covering set of forms, count distinct.

    Every class of discriminant D contains a form with leading coefficient
    a <= sqrt(|D|/3); enumerating all forms with such a and any residue
    b mod 2a, then reducing each one, therefore reaches every class.
    """
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"not a negative discriminant: {D}")
    seen = set()
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-2 * a, 2 * a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            seen.add(_reduce_definite(a, b, num // (4 * a)))
    return len(seen)


# ---------------------------------------------------------------------------
# Indefinite forms (D > 0 nonsquare)
# ---------------------------------------------------------------------------

def _check_indefinite_disc(D: int) -> int:
    if D <= 0 or D % 4 not in (0, 1):
        raise ValueError(f"not a positive discriminant: {D}")
    s = math.isqrt(D)
    if s * s == D:
        raise ValueError(f"square discriminant unsupported: {D}")
    return s


def indefinite_is_reduced(form: Form, D: int) -> bool:
    """Reduced means 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b."""
    a, b, c = form
    if b <= 0 or b * b >= D:
        return False
    t = 2 * abs(a)
    if (t + b) ** 2 <= D:  # sqrt(D) - b >= 2|a|
        return False
    if t > b and (t - b) ** 2 >= D:  # 2|a| >= sqrt(D) + b
        return False
    return True


def _rho(form: Form, D: int, s: int) -> tuple[Form, int]:
    """One rho step; returns the next form and the translation t.

    The new middle coefficient r is the unique residue of -b mod 2|c| with
    bound - 2|c| < r <= bound, where bound = |c| if |c| > sqrt(D) (so that
    |r| <= |c|) and bound = floor(sqrt(D)) otherwise.
    """
    a, b, c = form
    ac = abs(c)
    bound = ac if ac > s else s
    r = (-b) % (2 * ac)
    r += ((bound - r) // (2 * ac)) * (2 * ac)
    t = (r + b) // (2 * c)
    c2 = (r * r - D) // (4 * c)
    return (c, r, c2), t


def indefinite_reduced_forms(D: int) -> list[Form]:
    """All reduced forms of discriminant D, enumerated b-first."""
    s = _check_indefinite_disc(D)
    forms = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        M = (D - b * b) // 4  # = -a*c > 0
        hi = (s + b) // 2 + 1  # |a| window is ((sqrt(D)-b)/2, (sqrt(D)+b)/2)
        for aa in range(1, hi + 1):
            if M % aa:
                continue
            for a in (aa, -aa):
                c = -M // a
                if indefinite_is_reduced((a, b, c), D):
                    forms.append((a, b, c))
    return forms


def _cycle(start: Form, D: int, s: int):
    """Yield the forms of the rho-cycle through the reduced form ``start``."""
    f = start
    while True:
        yield f
        f, _ = _rho(f, D, s)
        if f == start:
            return


def indefinite_cycle_count(D: int) -> int:
    """Number of rho-cycles of reduced forms = narrow class number of disc D."""
    s = _check_indefinite_disc(D)
    remaining = set(indefinite_reduced_forms(D))
    cycles = 0
    while remaining:
        start = next(iter(remaining))
        cycles += 1
        for f in _cycle(start, D, s):
            remaining.discard(f)
    return cycles


_MAX_REDUCE_STEPS = 100000


def pm_one_witnesses(form: Form, D: int) -> dict[int, tuple[int, int]]:
    """Search the class of ``form`` for representations of +1 and -1.

    Returns a dict mapping each attained value v in {+1, -1} to a witness
    (x, y) with form(x, y) = v.  An indefinite form properly represents v
    exactly when some form in its rho-cycle has leading coefficient v, and
    every representation of +-1 is proper, so walking the cycle once
    decides both values.  This is the decision core of ideal principality.

    The witness is exact: the accumulated transform M satisfies
    form(M @ e1) = (leading coefficient of the current form).
    """
    s = _check_indefinite_disc(D)
    a, b, c = form
    if b * b - 4 * a * c != D:
        raise ValueError("form does not have the stated discriminant")
    # Accumulated right-multiplications: current = form o M, so a witness
    # for the current leading coefficient is the first column of M.
    m11, m12, m21, m22 = 1, 0, 0, 1
    witnesses: dict[int, tuple[int, int]] = {}

    def record(g: Form) -> None:
        if g[0] in (1, -1) and g[0] not in witnesses:
            witnesses[g[0]] = (m11, m21)

    f = form
    record(f)
    steps = 0
    while not indefinite_is_reduced(f, D):
        f, t = _rho(f, D, s)
        # rho is composition with [[0, -1], [1, t]] on the right.
        m11, m12 = m12, -m11 + t * m12
        m21, m22 = m22, -m21 + t * m22
        record(f)
        steps += 1
        if steps > _MAX_REDUCE_STEPS:
            raise RuntimeError("reduction did not terminate")
    start = f
    while True:
        f, t = _rho(f, D, s)
        m11, m12 = m12, -m11 + t * m12
        m21, m22 = m22, -m21 + t * m22
        if f == start:
            break
        record(f)
        steps += 1
        if steps > _MAX_REDUCE_STEPS:
            raise RuntimeError("cycle walk did not terminate")
    return witnesses
