"""Splitting prototypes for the two loci and their combinatorial invariants.

A genus-2 splitting prototype is a tuple (a, b, c, e) with

    D = e^2 + 4bc,  0 <= a < gcd(b, c),  c + e < b,  b, c > 0,
    gcd(a, b, c, e) = 1,

and a genus-3 (Prym) prototype satisfies the analogous conditions with
D = e^2 + 8bc and 2c + e < b.  Reduced prototypes have a = 0, c = 1 and are
indexed by e alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qfield import check_discriminant, conductor, lambda_of


class PrototypeError(ValueError):
    pass


@dataclass(frozen=True)
class Prototype:
    """A splitting prototype (a, b, c, e) for discriminant D in one locus."""

    locus: str  # "h2" or "prym"
    a: int
    b: int
    c: int
    e: int

    def __post_init__(self):
        if self.locus not in ("h2", "prym"):
            raise PrototypeError(f"unknown locus {self.locus!r}")

    @property
    def D(self) -> int:
        k = 4 if self.locus == "h2" else 8
        return self.e * self.e + k * self.b * self.c

    def is_reduced(self) -> bool:
        return self.a == 0 and self.c == 1


def validate(p: Prototype) -> Prototype:
    """Check all prototype constraints; raises PrototypeError with the reason."""
    a, b, c, e = p.a, p.b, p.c, p.e
    if b <= 0 or c <= 0:
        raise PrototypeError(f"{p}: b, c must be positive")
    bound = c + e if p.locus == "h2" else 2 * c + e
    if not bound < b:
        raise PrototypeError(f"{p}: requires {'c' if p.locus == 'h2' else '2c'}+e < b")
    if not 0 <= a < math.gcd(b, c):
        raise PrototypeError(f"{p}: requires 0 <= a < gcd(b, c)")
    if math.gcd(math.gcd(a, b), math.gcd(c, e)) != 1:
        raise PrototypeError(f"{p}: gcd(a, b, c, e) must be 1")
    check_discriminant(p.D)
    if p.D < 5:
        raise PrototypeError(f"{p}: discriminant {p.D} too small")
    return p


def enumerate_h2(D: int) -> list[Prototype]:
    """All genus-2 splitting prototypes of discriminant D, sorted."""
    check_discriminant(D)
    out = []
    emax = math.isqrt(D)
    for e in range(-emax, emax + 1):
        rem = D - e * e
        if rem <= 0 or rem % 4:
            continue
        bc = rem // 4
        for c in range(1, bc + 1):
            if bc % c:
                continue
            b = bc // c
            for a in range(0, math.gcd(b, c)):
                p = Prototype("h2", a, b, c, e)
                try:
                    validate(p)
                except PrototypeError:
                    continue
                out.append(p)
    return sorted(out, key=lambda p: (p.e, p.b, p.c, p.a))


def enumerate_prym_reduced(D: int) -> list[Prototype]:
    """Reduced Prym prototypes (0, (D - e^2)/8, 1, e) for e in S_D."""
    return [Prototype("prym", 0, (D - e * e) // 8, 1, e) for e in reduced_prym(D)]


def reduced_h2(D: int) -> list[int]:
    """R_D: values of e indexing the reduced genus-2 prototypes.

    e = D (mod 2), e^2 < D and (e + 2)^2 < D.
    """
    check_discriminant(D)
    out = []
    for e in range(-math.isqrt(D) - 2, math.isqrt(D) + 2):
        if (e - D) % 2:
            continue
        if e * e < D and (e + 2) ** 2 < D:
            out.append(e)
    return out


def reduced_prym(D: int) -> list[int]:
    """S_D: values of e with e^2 = D (mod 8), e^2 < D and (e + 4)^2 < D."""
    check_discriminant(D)
    out = []
    for e in range(-math.isqrt(D) - 4, math.isqrt(D) + 4):
        if (e * e - D) % 8:
            continue
        if e * e < D and (e + 4) ** 2 < D:
            out.append(e)
    return out


def spin(p: Prototype) -> int:
    """Spin invariant of a genus-2 prototype; defined for odd D = 1 mod 8.

    parity of (e - f)/2 + (c + 1)(a + b + ab), f the conductor of O_D.
    """
    if p.locus != "h2":
        raise PrototypeError("spin is a genus-2 invariant")
    D = p.D
    if D % 8 != 1:
        raise PrototypeError(f"spin undefined for D={D} (needs D = 1 mod 8)")
    f = conductor(D)
    if (p.e - f) % 2:
        raise PrototypeError(f"{p}: e and the conductor have different parities")
    return ((p.e - f) // 2 + (p.c + 1) * (p.a + p.b + p.a * p.b)) % 2


def spin_reduced(D: int, e: int) -> int:
    """Spin of the reduced prototype (0, b, 1, e): parity of (e - f)/2."""
    return spin(Prototype("h2", 0, (D - e * e) // 4, 1, e))


def h2_components(D: int) -> list[tuple[str, list[int]]]:
    """Connected-component labels with their reduced e-values, for W_D.

    For D = 1 mod 8 and D > 9 the locus has two components separated by
    spin; otherwise it is connected.
    """
    es = reduced_h2(D)
    if not es:
        return []
    if D % 8 == 1 and D > 9:
        comp0 = [e for e in es if spin_reduced(D, e) == 0]
        comp1 = [e for e in es if spin_reduced(D, e) == 1]
        return [("spin0", comp0), ("spin1", comp1)]
    return [("all", es)]


def prym_component(model: str, e: int, D: int) -> str:
    """Canonical component label of the Prym surface A^model_D(e).

    For even D the locus is connected.  For odd D there are two
    components: A+(e) ~ A+(e') iff e = e' (mod 4), and A+(e) ~ A-(e')
    iff e = -e' (mod 4); the label is the class of e for the + model.
    """
    if model not in ("+", "-"):
        raise PrototypeError(f"unknown Prym model {model!r}")
    check_discriminant(D)
    if D % 2 == 0:
        return "all"
    r = e % 4 if model == "+" else (-e) % 4
    return f"class{r}"


def prym_components(D: int) -> list[tuple[str, list[tuple[str, int]]]]:
    """Component labels with their (model, e) reduced members."""
    es = reduced_prym(D)
    members = [("+", e) for e in es] + [("-", e) for e in es]
    if not members:
        return []
    if D % 2 == 0:
        return [("all", members)]
    out = {}
    for model, e in members:
        out.setdefault(prym_component(model, e, D), []).append((model, e))
    return sorted(out.items())


def lambda_root(p: Prototype):
    """lambda = (e + sqrt(D))/2, the core length parameter of the prototype."""
    return lambda_of(p.D, p.e)
