"""Exact arithmetic in the real quadratic field Q(sqrt(D)).

Numbers are stored as p + q*sqrt(D) with exact rational p, q.  All
comparisons are decided with integer arithmetic only (no floating point
anywhere), so geometric predicates built on top of this module are exact.

Also provides the order O_D = Z[(e + sqrt(D))/2] membership tests and the
reduction-mod-O_D helpers (`decompose_wrt`, `fr`) used by the torsion-type
invariants.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


class QFieldError(ValueError):
    """Invalid construction or mixed-discriminant arithmetic."""


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def check_discriminant(D: int) -> int:
    """A valid (not necessarily fundamental) real discriminant: D > 0, D = 0, 1 mod 4."""
    if not isinstance(D, int) or D <= 0 or D % 4 not in (0, 1):
        raise QFieldError(f"not a valid discriminant: {D!r}")
    return D


class QuadExpr:
    """An element p + q*sqrt(D) of Q(sqrt(D)), with p, q exact rationals.

    If D is a perfect square, sqrt(D) is folded into the rational part at
    construction time, so q == 0 and the value is rational.
    """

    __slots__ = ("D", "p", "q")

    def __init__(self, D: int, p: Rat = 0, q: Rat = 0):
        check_discriminant(D)
        p = Fraction(p)
        q = Fraction(q)
        if q and is_square(D):
            p += q * math.isqrt(D)
            q = Fraction(0)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("QuadExpr is immutable")

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> "QuadExpr":
        if isinstance(other, QuadExpr):
            if other.D != self.D and other.q and self.q:
                raise QFieldError(f"mixed discriminants {self.D} and {other.D}")
            if other.D != self.D:
                # at least one side is rational; re-tag it
                if not other.q:
                    return QuadExpr(self.D, other.p)
                return other
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExpr(self.D, other)
        return NotImplemented

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        D = self.D if self.q or not o.q else o.D
        return QuadExpr(D, self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QuadExpr(self.D, -self.p, -self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        D = self.D if self.q or not o.q else o.D
        return QuadExpr(
            D, self.p * o.p + self.q * o.q * D, self.p * o.q + self.q * o.p
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExpr":
        norm = self.p * self.p - self.q * self.q * self.D
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(D))")
        return QuadExpr(self.D, self.p / norm, -self.q / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o * self.inverse()

    # -- exact sign and order ---------------------------------------------

    def sign(self) -> int:
        """Exact sign in {-1, 0, 1}, decided with integer arithmetic only."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return 1 if q > 0 else -1
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # p and q have opposite signs: compare p^2 with q^2 * D
        lhs = p * p
        rhs = q * q * self.D
        if p > 0:  # q < 0
            return (lhs > rhs) - (lhs < rhs)
        return (rhs > lhs) - (rhs < lhs)

    def is_rational(self) -> bool:
        return self.q == 0

    def __bool__(self):
        return bool(self.p or self.q)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except QFieldError:
            return False
        if o is NotImplemented:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def _diff_sign(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return None
        return (self - o).sign()

    def __lt__(self, other):
        sg = self._diff_sign(other)
        return NotImplemented if sg is None else sg < 0

    def __le__(self, other):
        sg = self._diff_sign(other)
        return NotImplemented if sg is None else sg <= 0

    def __gt__(self, other):
        sg = self._diff_sign(other)
        return NotImplemented if sg is None else sg > 0

    def __ge__(self, other):
        sg = self._diff_sign(other)
        return NotImplemented if sg is None else sg >= 0

    def __hash__(self):
        return hash((self.p, self.q, self.D if self.q else 0))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __floor__(self):
        """Exact integer floor (float only seeds the search)."""
        if self.q == 0:
            return math.floor(self.p)
        n = math.floor(float(self))
        while self - (n + 1) >= 0:
            n += 1
        while self - n < 0:
            n -= 1
        return n

    def __float__(self):
        # convenience only -- never used in predicates
        return float(self.p) + float(self.q) * math.sqrt(self.D)

    def __repr__(self):
        return f"QuadExpr({self.D}, {self.p}, {self.q})"

    def __str__(self):
        return encode(self)


def qe(D: int, p: Rat = 0, q: Rat = 0) -> QuadExpr:
    return QuadExpr(D, p, q)


def sqrtD(D: int) -> QuadExpr:
    return QuadExpr(D, 0, 1)


def lambda_of(D: int, e: int) -> QuadExpr:
    """The positive root lambda = (e + sqrt(D))/2 of x^2 - e x - (D - e^2)/4."""
    check_discriminant(D)
    if (D - e * e) % 4 != 0:
        raise QFieldError(f"e={e} has wrong parity for D={D}")
    lam = QuadExpr(D, Fraction(e, 2), Fraction(1, 2))
    if lam.sign() <= 0:
        raise QFieldError(f"lambda({D},{e}) is not positive")
    return lam


# -- text encoding ---------------------------------------------------------

_RAT = r"-?\d+/\d+"
_ENC_RE = re.compile(rf"^({_RAT})\+({_RAT})\*sqrt\((\d+)\)$")


def encode(x: QuadExpr) -> str:
    """Canonical text form "p+q*sqrt(D)" with p, q as "num/den" rationals."""
    p, q = x.p, x.q
    return f"{p.numerator}/{p.denominator}+{q.numerator}/{q.denominator}*sqrt({x.D})"


def decode(text: str, D: int | None = None) -> QuadExpr:
    """Parse the canonical form; also accepts a bare rational ("3", "1/2")."""
    text = text.strip()
    m = _ENC_RE.match(text)
    if m:
        p = Fraction(m.group(1))
        q = Fraction(m.group(2))
        d = int(m.group(3))
        if D is not None and d != D and q != 0:
            raise QFieldError(f"expected discriminant {D}, found {d}")
        return QuadExpr(d, p, q)
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise QFieldError(f"cannot parse field element: {text!r}") from exc
    if D is None:
        raise QFieldError(f"bare rational {text!r} needs a discriminant context")
    return QuadExpr(D, r)


# -- orders and reduction ---------------------------------------------------


def in_order(x: QuadExpr, D: int) -> bool:
    """Membership in O_D = Z[(e + sqrt(D))/2], e of the same parity as D.

    Writing x = (m + n*sqrt(D))/2, membership holds iff m, n are integers
    with m = n*D (mod 2).
    """
    check_discriminant(D)
    if x.q and x.D != D:
        raise QFieldError(f"element of Q(sqrt({x.D})) tested against O_{D}")
    m = 2 * x.p
    n = 2 * x.q
    if m.denominator != 1 or n.denominator != 1:
        return False
    return (m.numerator - n.numerator * D) % 2 == 0


def decompose_wrt(x: QuadExpr, rho: QuadExpr) -> tuple[Fraction, Fraction]:
    """Write x = A + B*rho with A, B rational; requires rho irrational."""
    if rho.q == 0:
        raise QFieldError("decompose_wrt needs an irrational basis element")
    if x.q and x.D != rho.D:
        raise QFieldError("decompose_wrt: mismatched discriminants")
    B = x.q / rho.q
    A = x.p - B * rho.p
    return A, B


def fr(x: QuadExpr, rho: QuadExpr) -> Fraction:
    """Fractional part of the rational part of x written in the basis (1, rho).

    This is the reduction used by the torsion-type invariants: fr(x) is
    invariant under translation of x by elements of Z + Z*rho.
    """
    A, _ = decompose_wrt(x, rho)
    return A - math.floor(A)


def conductor(D: int) -> int:
    """Largest f with f^2 | D (for the odd discriminants used by the spin map)."""
    check_discriminant(D)
    if D % 8 != 1:
        raise QFieldError(f"conductor is only used for D = 1 mod 8 (got {D})")
    f = 1
    for g in range(1, math.isqrt(D) + 1):
        if D % (g * g) == 0:
            f = g
    return f
