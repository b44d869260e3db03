"""Translation surfaces as glued rectangle complexes.

A surface is a finite list of axis-parallel rectangles together with a
list of gluings.  Each gluing identifies a sub-segment of one rectangle
edge with an equal-length sub-segment of an *opposite* edge (bottom with
top, left with right) by a translation.  Every edge must be covered
exactly once by gluing segments.

All coordinates live in a fixed real quadratic field Q(sqrt(D)) and all
predicates are exact.  The module provides:

  * structural validation (edge coverage, cone angles, genus, stratum);
  * the symmetric one- and two-torus constructions used throughout
    (``make_P``/``make_L`` for genus two, ``make_Aplus``/``make_Aminus``/
    ``make_Z`` for the genus-three Prym family);
  * search for point-reflection involutions and their fixed points,
    which is how the Weierstrass / Prym fixed points are marked;
  * JSON persistence with bit-exact round trips.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .prototypes import Prototype, validate as validate_prototype
from .qfield import QuadExpr, check_discriminant, decode, encode, lambda_of, qe

EDGES = ("bottom", "top", "left", "right")
OPPOSITE = {"bottom": "top", "top": "bottom", "left": "right", "right": "left"}


class SurfaceError(ValueError):
    """Malformed surface data or failed structural check."""


@dataclass(frozen=True)
class Side:
    """A sub-segment of one rectangle edge: params t in [0, length]."""

    rect: int
    edge: str
    offset: QuadExpr
    length: QuadExpr


@dataclass(frozen=True)
class Gluing:
    """Identifies a.point(t) with b.point(t); edges must be opposite."""

    a: Side
    b: Side


def _pkey(point):
    rect, x, y = point
    return (rect, x.p, x.q, y.p, y.q)


class FlatSurface:
    def __init__(self, D, rectangles, gluings, marked_points=None):
        self.D = check_discriminant(D)
        self.rectangles = list(rectangles)  # [(width, height)] as QuadExpr
        self.gluings = list(gluings)
        # [(name, rect, x, y)] -- canonical representatives of regular points
        self.marked_points = list(marked_points or [])
        self._analysis = None

    # -- elementary geometry ------------------------------------------------

    def zero(self):
        return qe(self.D)

    def edge_length(self, rect, edge):
        w, h = self.rectangles[rect]
        return w if edge in ("bottom", "top") else h

    def side_point(self, side, t):
        """Coordinates (rect, x, y) of the point at parameter t on a side."""
        w, h = self.rectangles[side.rect]
        u = side.offset + t
        if side.edge == "bottom":
            return (side.rect, u, self.zero())
        if side.edge == "top":
            return (side.rect, u, h)
        if side.edge == "left":
            return (side.rect, self.zero(), u)
        return (side.rect, w, u)

    def point_edges(self, point):
        rect, x, y = point
        w, h = self.rectangles[rect]
        out = []
        if y == 0:
            out.append("bottom")
        if y == h:
            out.append("top")
        if x == 0:
            out.append("left")
        if x == w:
            out.append("right")
        return out

    @staticmethod
    def edge_param(point, edge):
        rect, x, y = point
        return x if edge in ("bottom", "top") else y

    # -- identification classes ---------------------------------------------

    def point_class(self, point):
        """All boundary points identified with `point` (itself if interior)."""
        if not self.point_edges(point):
            return frozenset([point])
        ana = self.analysis()
        seen = {point}
        stack = [point]
        while stack:
            p = stack.pop()
            for edge in self.point_edges(p):
                u = self.edge_param(p, edge)
                for side in ana.edge_sides[(p[0], edge)]:
                    if side.offset <= u <= side.offset + side.length:
                        q = self.side_point(ana.partner[side], u - side.offset)
                        if q not in seen:
                            seen.add(q)
                            stack.append(q)
        return frozenset(seen)

    def canonical_point(self, point):
        return min(self.point_class(point), key=_pkey)

    def marked_point(self, name):
        for nm, rect, x, y in self.marked_points:
            if nm == name:
                return (rect, x, y)
        raise SurfaceError(f"no marked point named {name!r}")

    # -- validation ----------------------------------------------------------

    def analysis(self):
        if self._analysis is None:
            _Analysis(self)  # registers itself on the surface
        return self._analysis

    def validate(self):
        """Run all structural checks; return a summary report dict."""
        ana = self.analysis()
        return {
            "rectangles": len(self.rectangles),
            "area": ana.area,
            "genus": ana.genus,
            "stratum": ana.stratum,
            "cone_angle_turns": sorted(
                Fraction(u, 4) for u, s in zip(ana.units, ana.singular) if s
            ),
            "marked_points": [nm for nm, *_ in self.marked_points],
        }


class _Analysis:
    """Combinatorial structure computed once per surface."""

    def __init__(self, s):
        self.surface = s
        self.partner = {}
        self.edge_sides = {(r, e): [] for r in range(len(s.rectangles)) for e in EDGES}
        for g in s.gluings:
            for side, other in ((g.a, g.b), (g.b, g.a)):
                if side.edge not in EDGES or OPPOSITE[side.edge] != other.edge:
                    raise SurfaceError(f"gluing joins non-opposite edges: {g}")
                if side.length != other.length or side.length <= 0:
                    raise SurfaceError(f"gluing sides have bad lengths: {g}")
                if not (0 <= side.offset and side.offset + side.length <= s.edge_length(side.rect, side.edge)):
                    raise SurfaceError(f"side outside its edge: {side}")
                if side in self.partner:
                    raise SurfaceError(f"side glued twice: {side}")
                self.partner[side] = other
                self.edge_sides[(side.rect, side.edge)].append(side)
        s._analysis = self  # register before point_class re-enters analysis()
        for (rect, edge), sides in self.edge_sides.items():
            sides.sort(key=lambda sd: sd.offset)
            pos = s.zero()
            for sd in sides:
                if sd.offset != pos:
                    raise SurfaceError(f"edge {edge} of rect {rect} has a gap/overlap at {pos}")
                pos = sd.offset + sd.length
            if pos != s.edge_length(rect, edge):
                raise SurfaceError(f"edge {edge} of rect {rect} not fully glued")

        # Vertex classes: closure of all gluing-segment endpoints.
        endpoints = set()
        for side in self.partner:
            endpoints.add(s.side_point(side, 0))
            endpoints.add(s.side_point(side, side.length))
        self.vertex_classes = []
        seen = set()
        for p in sorted(endpoints, key=_pkey):
            if p in seen:
                continue
            cls = s.point_class(p)
            seen |= cls
            self.vertex_classes.append(cls)
        self.units = []  # total angle in quarter turns per class
        for cls in self.vertex_classes:
            u = 0
            for p in cls:
                ne = len(s.point_edges(p))
                if ne == 2:
                    u += 1
                elif ne == 1:
                    u += 2
                else:
                    raise SurfaceError(f"interior point in vertex class: {p}")
            if u % 4 or u < 4:
                raise SurfaceError(f"cone angle {u}*pi/2 is not a multiple of 2*pi")
            self.units.append(u)
        self.singular = [u > 4 for u in self.units]
        self.stratum = sorted((u // 4 - 1 for u in self.units if u > 4), reverse=True)
        excess = sum(u - 4 for u in self.units)
        if excess % 8:
            raise SurfaceError("cone angles violate Gauss-Bonnet")
        self.genus = (excess + 8) // 8
        self.area = sum((w * h for w, h in s.rectangles), s.zero())

        for nm, rect, x, y in s.marked_points:
            w, h = s.rectangles[rect]
            if not (0 <= x <= w and 0 <= y <= h):
                raise SurfaceError(f"marked point {nm} outside its rectangle")
        marked = {s.canonical_point((r, x, y)) for _, r, x, y in s.marked_points}
        for cls, sing in zip(self.vertex_classes, self.singular):
            if sing and marked & cls:
                raise SurfaceError("marked point sits at a cone point")

    def class_of(self, point):
        cls = self.surface.point_class(point)
        for vc in self.vertex_classes:
            if cls & vc:
                return vc
        return cls


# -- gluing helpers ------------------------------------------------------------


def _mod(x, m):
    return x - math.floor(x / m) * m


def _glue_wrapped(gluings, rect_a, edge_a, start_a, rect_b, edge_b, start_b, length, len_a, len_b):
    """Glue [start_a, start_a+length) mod len_a to [start_b, ...) mod len_b.

    Splits the interval wherever either copy wraps around its edge.
    """
    start_a = _mod(start_a, len_a)
    start_b = _mod(start_b, len_b)
    breaks = {length * 0, length}
    for start, mod in ((start_a, len_a), (start_b, len_b)):
        k = 1
        while mod * k - start < length:
            if mod * k - start > 0:
                breaks.add(mod * k - start)
            k += 1
    cuts = sorted(breaks)
    for u1, u2 in zip(cuts, cuts[1:]):
        gluings.append(
            Gluing(
                Side(rect_a, edge_a, _mod(start_a + u1, len_a), u2 - u1),
                Side(rect_b, edge_b, _mod(start_b + u1, len_b), u2 - u1),
            )
        )


def _glue_torus_rest(gluings, rect, width, slits, shift, zero):
    """Self-glue the bottom-minus-slits of a torus block to its top, shifted.

    `slits` is a list of (start, length) intervals (mod width) on the bottom
    edge that are already glued elsewhere; the complement is glued to the top
    edge translated by `shift` (mod width).
    """
    slits = [(_mod(st, width), ln) for st, ln in slits]
    slits.sort(key=lambda p: p[0])
    total = sum((ln for _, ln in slits), zero)
    if total > width:
        raise SurfaceError("slits overlap on the torus block")
    for i, (st, ln) in enumerate(slits):
        nxt = slits[(i + 1) % len(slits)][0] + (width if i + 1 == len(slits) else 0)
        if st + ln > nxt:
            raise SurfaceError("slits overlap on the torus block")
        gap = nxt - (st + ln)
        if gap > 0:
            _glue_wrapped(
                gluings, rect, "bottom", st + ln, rect, "top", st + ln + shift,
                gap, width, width,
            )


# -- involutions ----------------------------------------------------------------


def _reflect_side(s, matching, side):
    """Image of a side under the point reflection (x,y) -> (w-x, h-y)."""
    target = matching[side.rect]
    w = s.edge_length(side.rect, side.edge)
    return Side(target, OPPOSITE[side.edge], w - side.offset - side.length, side.length)


def _rect_matchings(s):
    dims = s.rectangles
    def rec(rem):
        if not rem:
            yield {}
            return
        r = rem[0]
        for r2 in rem:
            if dims[r] == dims[r2]:
                rest = [x for x in rem if x not in (r, r2)]
                for m in rec(rest):
                    m = dict(m)
                    m[r] = r2
                    m[r2] = r
                    yield m
    yield from rec(list(range(len(dims))))


def _matching_preserves_gluings(s, matching):
    ana = s.analysis()
    for g in s.gluings:
        pa = _reflect_side(s, matching, g.a)
        pb = _reflect_side(s, matching, g.b)
        # need pa.point(u) ~ pb.point(u) for all u (u = length - t)
        breaks = {s.zero(), g.a.length}
        for img in (pa, pb):
            for sd in ana.edge_sides[(img.rect, img.edge)]:
                for v in (sd.offset, sd.offset + sd.length):
                    u = v - img.offset
                    if 0 < u < g.a.length:
                        breaks.add(u)
        cuts = sorted(breaks)
        for u1, u2 in zip(cuts, cuts[1:]):
            um = (u1 + u2) / 2
            if s.canonical_point(s.side_point(pa, um)) != s.canonical_point(s.side_point(pb, um)):
                return False
    return True


def find_involutions(s):
    """All point-reflection involutions (as rectangle matchings)."""
    return [m for m in _rect_matchings(s) if _matching_preserves_gluings(s, m)]


def involution_fixed_classes(s, matching):
    """Regular fixed points of the involution, as identification classes."""
    ana = s.analysis()
    singular = [cls for cls, sing in zip(ana.vertex_classes, ana.singular) if sing]
    found = []
    for r, (w, h) in enumerate(s.rectangles):
        if matching[r] == r:
            found.append(frozenset([(r, w / 2, h / 2)]))
    for side in ana.partner:
        img = _reflect_side(s, matching, side)
        for tgt in (side, ana.partner[side]):
            if (img.rect, img.edge) != (tgt.rect, tgt.edge):
                continue
            t2 = img.offset + side.length - tgt.offset
            t = t2 / 2
            if 0 <= t <= side.length:
                found.append(ana.class_of(s.side_point(side, t)))
    for cls, sing in zip(ana.vertex_classes, ana.singular):
        if sing:
            continue
        rect, x, y = next(iter(cls))
        w, h = s.rectangles[rect]
        if (matching[rect], w - x, h - y) in cls:
            found.append(cls)
    out = []
    for cls in found:
        if cls in out or any(cls & sc for sc in singular):
            continue
        out.append(cls)
    return sorted(out, key=lambda cls: _pkey(min(cls, key=_pkey)))


def _mark_fixed_points(s, expected):
    """Find the unique involution with `expected` regular fixed points; mark them."""
    hits = []
    for m in find_involutions(s):
        cls = involution_fixed_classes(s, m)
        if len(cls) == expected:
            hits.append(cls)
    if len(hits) != 1:
        raise SurfaceError(
            f"expected a unique involution with {expected} regular fixed points, found {len(hits)}"
        )
    s.marked_points = [
        (f"p{i + 1}",) + min(cls, key=_pkey) for i, cls in enumerate(hits[0])
    ]
    s._analysis = None  # marked points participate in validation


def mark_fixed_points(s, expected):
    """Mark the involution-fixed regular points with default names p1..pn.

    Unlike the named constructors this assigns no cylinder roles, so it
    also works on surfaces whose core-point structure is ambiguous (any
    choice of names gives the same permutation cycle types).
    """
    _mark_fixed_points(s, expected)
    return s


def _name_by_cylinder_roles(s, locus):
    """Rename marked fixed points by their role in the h/v cylinder cores.

    The two-point cylinder cores determine the names intrinsically: in genus
    two, one horizontal pair lies entirely inside the union of the vertical
    pairs (its points are w1, w2) and one vertical pair lies inside the union
    of the horizontal pairs (w1, w3); the leftovers are w4 (vertical) and
    w5 (horizontal).  In the Prym family there is a single horizontal pair
    {w1, w2} and a single vertical pair {w1, w3}.
    """
    from .cylinders import decompose

    hdec = decompose(s, (1, 0))
    vdec = decompose(s, (0, 1))
    hp = [frozenset(c.core_marked) for c in hdec.cylinders if len(c.core_marked) == 2]
    vp = [frozenset(c.core_marked) for c in vdec.cylinders if len(c.core_marked) == 2]
    rename = {}
    if locus == "h2":
        if len(hp) != 2 or len(vp) != 2:
            raise SurfaceError("unexpected core-point structure for a genus-two surface")
        hu = hp[0] | hp[1]
        vu = vp[0] | vp[1]
        (lh,) = [p for p in hp if p <= vu]
        (sh,) = [p for p in hp if not p <= vu]
        (lv,) = [q for q in vp if q <= hu]
        (sv,) = [q for q in vp if not q <= hu]
        (w1,) = lh & lv
        (w2,) = lh - {w1}
        (w3,) = sh & lv
        (w4,) = sv - lh
        (w5,) = sh - lv
        rename = {w1: "w1", w2: "w2", w3: "w3", w4: "w4", w5: "w5"}
    else:
        if len(hp) != 1 or len(vp) != 1:
            raise SurfaceError("unexpected core-point structure for a Prym surface")
        (w1,) = hp[0] & vp[0]
        (w2,) = hp[0] - {w1}
        (w3,) = vp[0] - {w1}
        rename = {w1: "w1", w2: "w2", w3: "w3"}
    if len(rename) != len(s.marked_points):
        raise SurfaceError("could not name every fixed point from cylinder roles")
    s.marked_points = sorted(
        ((rename[nm], rect, x, y) for nm, rect, x, y in s.marked_points),
        key=lambda mp: mp[0],
    )
    s._analysis = None


# -- constructors ---------------------------------------------------------------


def make_P(a, b, c, e, named=True):
    """Two-rectangle genus-two surface for the prototype (a, b, c, e).

    A b-by-c torus block and a lambda-by-lambda square joined along a slit
    of length lambda, with the slit centred so that the surface admits a
    point-reflection (hyperelliptic) involution.
    """
    proto = validate_prototype(Prototype("h2", a, b, c, e))
    D = proto.D
    lam = lambda_of(D, e)
    B, C, A = qe(D, b), qe(D, c), qe(D, a)
    zero = qe(D)
    gl = [
        Gluing(Side(0, "left", zero, C), Side(0, "right", zero, C)),
        Gluing(Side(1, "left", zero, lam), Side(1, "right", zero, lam)),
    ]
    x0 = _mod((B - A - lam) / 2, B)
    _glue_wrapped(gl, 0, "bottom", x0, 1, "top", zero, lam, B, lam)
    _glue_wrapped(gl, 1, "bottom", zero, 0, "top", x0 + A, lam, lam, B)
    _glue_torus_rest(gl, 0, B, [(x0, lam)], A, zero)
    s = FlatSurface(D, [(B, C), (lam, lam)], gl)
    s.validate()
    if named:
        _mark_fixed_points(s, 5)
        _name_by_cylinder_roles(s, "h2")
    return s


def make_L(e, D, named=True):
    """Reduced genus-two surface in L-shaped normalisation.

    Same surface as make_P(0, (D - e^2)/4, 1, e) rescaled horizontally by
    1/lambda, so the square block becomes a 1-by-lambda column.
    """
    if (D - e * e) % 4:
        raise SurfaceError(f"(D - e^2) must be divisible by 4: D={D}, e={e}")
    b = (D - e * e) // 4
    s = make_P(0, b, 1, e, named=named)
    lam = lambda_of(D, e)
    return apply_diag(s, qe(D, 1) / lam, qe(D, 1))


def make_Aplus(a, b, c, e, named=True):
    """Three-rectangle Prym surface: two b-by-c torus blocks joined through
    a lambda-by-lambda square, positioned symmetrically so that the surface
    admits an involution swapping the two blocks."""
    proto = validate_prototype(Prototype("prym", a, b, c, e))
    D = proto.D
    lam = lambda_of(D, e)
    B, C, A = qe(D, b), qe(D, c), qe(D, a)
    zero = qe(D)
    gl = [
        Gluing(Side(0, "left", zero, C), Side(0, "right", zero, C)),
        Gluing(Side(1, "left", zero, C), Side(1, "right", zero, C)),
        Gluing(Side(2, "left", zero, lam), Side(2, "right", zero, lam)),
    ]
    _glue_wrapped(gl, 0, "bottom", zero, 2, "top", zero, lam, B, lam)
    _glue_wrapped(gl, 2, "bottom", zero, 1, "top", B - lam, lam, lam, B)
    _glue_wrapped(gl, 1, "bottom", B - lam - A, 0, "top", A, lam, B, B)
    _glue_torus_rest(gl, 0, B, [(zero, lam)], A, zero)
    _glue_torus_rest(gl, 1, B, [(B - lam - A, lam)], A, zero)
    s = FlatSurface(D, [(B, C), (B, C), (lam, lam)], gl)
    s.validate()
    if named:
        _mark_fixed_points(s, 3)
        _name_by_cylinder_roles(s, "prym")
    return s


def make_Aminus(a, b, c, e, named=True):
    """Three-rectangle Prym surface: one b-by-c torus block carrying two
    (lambda/2)-square handles, positioned symmetrically so that the surface
    admits an involution swapping the two squares."""
    proto = validate_prototype(Prototype("prym", a, b, c, e))
    D = proto.D
    lam = lambda_of(D, e)
    mu = lam / 2
    B, C, A = qe(D, b), qe(D, c), qe(D, a)
    zero = qe(D)
    gl = [
        Gluing(Side(0, "left", zero, C), Side(0, "right", zero, C)),
        Gluing(Side(1, "left", zero, mu), Side(1, "right", zero, mu)),
        Gluing(Side(2, "left", zero, mu), Side(2, "right", zero, mu)),
    ]
    s1 = zero
    s2 = _mod(B - mu - A, B)
    _glue_wrapped(gl, 0, "bottom", s1, 1, "top", zero, mu, B, mu)
    _glue_wrapped(gl, 0, "bottom", s2, 2, "top", zero, mu, B, mu)
    _glue_wrapped(gl, 1, "bottom", zero, 0, "top", s1 + A, mu, mu, B)
    _glue_wrapped(gl, 2, "bottom", zero, 0, "top", s2 + A, mu, mu, B)
    _glue_torus_rest(gl, 0, B, [(s1, mu), (s2, mu)], A, zero)
    s = FlatSurface(D, [(B, C), (mu, mu), (mu, mu)], gl)
    s.validate()
    if named:
        _mark_fixed_points(s, 3)
        _name_by_cylinder_roles(s, "prym")
    return s


def make_Z(e, D, named=True):
    """Reduced Prym surface in the normalisation with unit-width handles.

    Same surface as make_Aminus(0, (D - e^2)/8, 1, e) rescaled horizontally
    by 2/lambda.
    """
    if (D - e * e) % 8:
        raise SurfaceError(f"(D - e^2) must be divisible by 8: D={D}, e={e}")
    b = (D - e * e) // 8
    s = make_Aminus(0, b, 1, e, named=named)
    lam = lambda_of(D, e)
    return apply_diag(s, qe(D, 2) / lam, qe(D, 1))


def apply_diag(s, sx, sy):
    """Apply the linear map diag(sx, sy), sx, sy > 0; returns a new surface."""
    if sx <= 0 or sy <= 0:
        raise SurfaceError("diagonal scaling factors must be positive")

    def fx(v):
        return v * sx

    def fy(v):
        return v * sy

    def scale_side(side):
        f = fx if side.edge in ("bottom", "top") else fy
        return Side(side.rect, side.edge, f(side.offset), f(side.length))

    return FlatSurface(
        s.D,
        [(fx(w), fy(h)) for w, h in s.rectangles],
        [Gluing(scale_side(g.a), scale_side(g.b)) for g in s.gluings],
        [(nm, rect, fx(x), fy(y)) for nm, rect, x, y in s.marked_points],
    )


# -- persistence ------------------------------------------------------------------


def to_json_dict(s):
    return {
        "version": 1,
        "D": s.D,
        "rectangles": [[encode(w), encode(h)] for w, h in s.rectangles],
        "gluings": [
            [
                [g.a.rect, g.a.edge, encode(g.a.offset), encode(g.a.length)],
                [g.b.rect, g.b.edge, encode(g.b.offset), encode(g.b.length)],
            ]
            for g in s.gluings
        ],
        "marked_points": [
            [nm, rect, encode(x), encode(y)] for nm, rect, x, y in s.marked_points
        ],
    }


def from_json_dict(data):
    if data.get("version") != 1:
        raise SurfaceError(f"unsupported surface file version: {data.get('version')!r}")
    D = data["D"]

    def side(item):
        rect, edge, off, ln = item
        return Side(rect, edge, decode(off, D), decode(ln, D))

    return FlatSurface(
        D,
        [(decode(w, D), decode(h, D)) for w, h in data["rectangles"]],
        [Gluing(side(a), side(b)) for a, b in data["gluings"]],
        [(nm, rect, decode(x, D), decode(y, D)) for nm, rect, x, y in data.get("marked_points", [])],
    )


def save_surface(s, path):
    with open(path, "w") as fh:
        json.dump(to_json_dict(s), fh, indent=1)
        fh.write("\n")


def load_surface(path):
    with open(path) as fh:
        s = from_json_dict(json.load(fh))
    s.validate()
    return s
