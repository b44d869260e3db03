"""Torsion-type invariants of marked points.

On a two-cylinder model surface whose periods lie in a real quadratic order,
the displacement of each marked point from the cone point projects to a
2-torsion point of a torus once we only keep the fractional part of the
rational part of its coordinates (with respect to a fixed generator rho of
the order).  The distribution of marked points over the four 2-torsion
points -- the number of integral points plus the unordered counts of the
types h, v, c -- is an invariant of the affine action, and it bounds the
permutation group induced on the marked points from above.
"""

import itertools
from fractions import Fraction

from .groups import Perm, verify_dih5_maximality
from .qfield import QFieldError, decompose_wrt, is_square, qe, sqrtD
from .surface import SurfaceError

TYPE_OF_FR = {
    (Fraction(0), Fraction(0)): "0",
    (Fraction(1, 2), Fraction(0)): "h",
    (Fraction(0), Fraction(1, 2)): "v",
    (Fraction(1, 2), Fraction(1, 2)): "c",
}

HALF = Fraction(1, 2)


class InvariantError(ValueError):
    """Invalid basis or non-2-torsion data."""


def develop(s):
    """Plane position of each rectangle's lower-left corner.

    Rectangles are developed along a breadth-first spanning tree of the
    gluing graph starting at rectangle 0 (deterministic: gluings are taken
    in listed order).  On a translation surface any two developments of the
    same rectangle differ by a period, which is all the torsion types need.
    """
    ana = s.analysis()
    zero = s.zero()
    origins = {0: (zero, zero)}
    queue = [0]
    while queue:
        rect = queue.pop(0)
        ox, oy = origins[rect]
        for g in s.gluings:
            for side, other in ((g.a, g.b), (g.b, g.a)):
                if side.rect != rect or other.rect in origins:
                    continue
                _, ax, ay = s.side_point(side, zero)
                _, bx, by = s.side_point(other, zero)
                origins[other.rect] = (ox + ax - bx, oy + ay - by)
                queue.append(other.rect)
    if len(origins) != len(s.rectangles):
        raise SurfaceError("gluing graph is disconnected")
    del ana  # analysis only validates the surface first
    return origins


def marked_displacements(s):
    """Displacement vector of each marked point from the cone point.

    Returns {name: (dx, dy)} computed in a fixed development of the
    rectangle complex; well defined modulo the period lattice.
    """
    ana = s.analysis()
    singular = [
        cls for cls, sing in zip(ana.vertex_classes, ana.singular) if sing
    ]
    if len(singular) != 1:
        raise SurfaceError("surface must have a unique cone point")
    origins = develop(s)
    rect, x, y = min(singular[0], key=lambda p: (p[0],))
    ox, oy = origins[rect]
    zx, zy = ox + x, oy + y
    out = {}
    for name, rect, x, y in s.marked_points:
        ox, oy = origins[rect]
        out[name] = (ox + x - zx, oy + y - zy)
    return out


def canonical_basis_h2(D):
    """The generator choice (d, rho) with O_D = Z[rho], rho = (sqrt(D)-d)/2.

    Exists iff D is a quadratic residue mod 8; d is fixed per residue class
    (0, 2, 1 for D = 0, 4, 1 mod 8) so that outputs are reproducible.
    """
    table = {0: 0, 4: 2, 1: 1}
    if D % 8 not in table:
        raise InvariantError(f"D = {D} is not a quadratic residue mod 8")
    d = table[D % 8]
    return d, qe(D, Fraction(-d, 2), HALF)


def canonical_basis_prym(D):
    """The generator choice (d, rho) with D = d^2 mod 16 (d = 0 or 2)."""
    table = {0: 0, 4: 2}
    if D % 16 not in table:
        raise InvariantError(f"D = {D} is not an even quadratic residue mod 16")
    d = table[D % 16]
    return d, qe(D, Fraction(-d, 2), HALF)


def _fr_pair(x, rho):
    """(frac of rational part of x, its rho-coefficient) -- both wrt rho."""
    p, q = decompose_wrt(x, rho)
    return p % 1, q


def _two_torsion(frx, fry):
    try:
        return TYPE_OF_FR[(frx, fry)]
    except KeyError:
        raise InvariantError(
            f"marked point does not project to 2-torsion: fr = ({frx}, {fry})"
        )


def torsion_types_h2(s, d=None):
    """Type (0, h, v or c) of each marked point, genus-2 convention.

    Both coordinates are reduced with respect to rho = (sqrt(D)-d)/2.  For
    square D this is the literal square-tiled projection (coordinates are
    rational; reduce mod 1).
    """
    D = s.D
    if is_square(D):
        disp = marked_displacements(s)
        out = {}
        for name, (dx, dy) in disp.items():
            if dx.q or dy.q:
                raise InvariantError("square discriminant with irrational periods")
            out[name] = _two_torsion(dx.p % 1, dy.p % 1)
        return out
    if d is None:
        d, rho = canonical_basis_h2(D)
    else:
        if (D - d * d) % 8:
            raise InvariantError(f"basis d = {d} invalid for D = {D}")
        rho = qe(D, Fraction(-d, 2), HALF)
    disp = marked_displacements(s)
    out = {}
    for name, (dx, dy) in disp.items():
        out[name] = _two_torsion(_fr_pair(dx, rho)[0], _fr_pair(dy, rho)[0])
    return out


def torsion_types_prym(s, d=None):
    """Type of each marked point, genus-3 convention.

    On the rescaled genus-3 model, marked-point displacements have x parts
    in Z[rho/2] and y parts in (1/2)Z[rho], where rho = (sqrt(D)-d)/2 and
    D = d^2 (mod 16).  The x coordinate is therefore reduced with respect
    to rho/2 and the y coordinate with respect to rho.  For square D this
    is the literal square-tiled projection.
    """
    D = s.D
    if is_square(D):
        disp = marked_displacements(s)
        out = {}
        for name, (dx, dy) in disp.items():
            if dx.q or dy.q:
                raise InvariantError("square discriminant with irrational periods")
            out[name] = _two_torsion(dx.p % 1, dy.p % 1)
        return out
    if d is None:
        d, rho = canonical_basis_prym(D)
    else:
        if D % 2 or (D - d * d) % 16:
            raise InvariantError(f"basis d = {d} invalid for D = {D}")
        rho = qe(D, Fraction(-d, 2), HALF)
    disp = marked_displacements(s)
    out = {}
    for name, (dx, dy) in disp.items():
        frx = _fr_pair(dx, rho / 2)[0]
        fry = _fr_pair(dy, rho)[0]
        out[name] = _two_torsion(frx, fry)
    return out


def hlk(types):
    """(number of integral points, sorted counts of types h, v, c)."""
    vals = list(types.values())
    counts = sorted((vals.count(t) for t in "hvc"), reverse=True)
    return vals.count("0"), counts


def upper_bound_group(types):
    """All permutations compatible with the torsion types.

    An admissible permutation must preserve the set of integral points and
    act on the types h, v, c as a well-defined bijection (every point of
    one type goes to points of a single type).
    """
    names = sorted(types)
    n = len(names)
    if n > 5:
        raise InvariantError("upper_bound_group expects at most 5 points")
    type_list = [types[nm] for nm in names]
    group = set()
    for images in itertools.permutations(range(1, n + 1)):
        induced = {}
        ok = True
        for i, j in enumerate(images):
            t0, t1 = type_list[i], type_list[j - 1]
            if induced.setdefault(t0, t1) != t1 or (t0 == "0") != (t1 == "0"):
                ok = False
                break
        if ok and len(set(induced.values())) == len(induced):
            group.add(Perm(images))
    return frozenset(group)


def d5_constraint_upper_bound(group):
    """Upper bound for an order-10 dihedral twist group in the residual case.

    The torsion-type machinery needs D to be a square mod 8, so in the
    remaining residue class the upper bound comes from a stabilizer
    constraint instead: an affine map fixing the central 2-torsion class
    must preserve the half-period pairing, so the point stabilizer is
    pinned and no group strictly between Dih5 and Sym_5 is admissible.
    Returns "Dih5"; raises if the constraint argument does not close.
    """
    if not verify_dih5_maximality(group):
        raise InvariantError("stabilizer constraint does not pin the group")
    return "Dih5"


def prym_parity_class(D):
    """Expected permutation group on the three Prym fixed points.

    "Sym2" when D is even and a quadratic residue mod 16, else "Sym3".
    """
    if D < 8 or D % 8 not in (0, 4, 1):
        raise InvariantError(f"no genus-3 locus for D = {D}")
    if D % 2 == 0 and D % 16 in (0, 4):
        return "Sym2"
    return "Sym3"
