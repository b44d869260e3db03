"""Cylinder decompositions and twist permutations on marked points.

Given a rectangle surface and a direction (u, v), this module computes the
cylinder decomposition of the directional flow by exact arithmetic: the
circumference, height and modulus of every cylinder, and the position of
every marked point (on a cylinder core, on a boundary circle, or strictly
inside but off the core).  From that data it builds the permutation that
the core-twisting parabolic induces on the marked points.

The tracing never hits a vertex: coordinates are augmented with two
infinitesimals eta1 >> eta2.  Closed leaves adjacent to a cylinder
boundary are traced at perpendicular offset eta1 from the boundary circle,
and every trace start is nudged by eta2 along the flow.  A crossing
parameter could only collide with a gluing-segment endpoint if its
infinitesimal part vanished, and the offsets are chosen so it never does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .groups import Perm
from .qfield import QuadExpr, qe


class TraceError(Exception):
    """Base class for tracing/decomposition failures."""


class NotPeriodic(TraceError):
    """Crossing budget exhausted: the direction is (apparently) not periodic."""


class OffCorePoint(TraceError):
    """A marked point is strictly inside a cylinder but not on its core."""


class UnmatchedImage(TraceError):
    """The twist moves a marked point to an unmarked position."""


class NotParabolic(TraceError):
    """Cylinder moduli have irrational ratios: no core-twisting parabolic."""


# -- infinitesimal-augmented coordinates -----------------------------------------


class Eps:
    """main + e1*eta1 + e2*eta2 with eta1 >> eta2 infinitesimal, lexicographic."""

    __slots__ = ("main", "e1", "e2")

    def __init__(self, main, e1=None, e2=None):
        zero = qe(main.D)
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "e1", zero if e1 is None else e1)
        object.__setattr__(self, "e2", zero if e2 is None else e2)

    def __setattr__(self, *a):
        raise AttributeError("Eps is immutable")

    def _coerce(self, other):
        if isinstance(other, Eps):
            return other
        if isinstance(other, QuadExpr):
            return Eps(other)
        if isinstance(other, (int, Fraction)):
            return Eps(qe(self.main.D, other))
        return None

    @property
    def is_exact(self):
        return not self.e1 and not self.e2

    def __add__(self, other):
        o = self._coerce(other)
        return Eps(self.main + o.main, self.e1 + o.e1, self.e2 + o.e2)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Eps(self.main - o.main, self.e1 - o.e1, self.e2 - o.e2)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Eps(-self.main, -self.e1, -self.e2)

    def __mul__(self, other):  # exact scalar only
        if isinstance(other, Eps):
            raise TypeError("cannot multiply two infinitesimal-augmented numbers")
        return Eps(self.main * other, self.e1 * other, self.e2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):  # exact scalar only
        if isinstance(other, Eps):
            raise TypeError("cannot divide by an infinitesimal-augmented number")
        return Eps(self.main / other, self.e1 / other, self.e2 / other)

    def _cmp(self, other):
        o = self._coerce(other)
        for a, b in ((self.main, o.main), (self.e1, o.e1), (self.e2, o.e2)):
            sg = (a - b).sign()
            if sg:
                return sg
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = self._coerce(other)
        return o is not None and self._cmp(o) == 0

    def __hash__(self):
        return hash((self.main, self.e1, self.e2))

    def sort_key(self):
        return (
            self.main.p, self.main.q, self.e1.p, self.e1.q, self.e2.p, self.e2.q,
        )

    def __repr__(self):
        return f"Eps({self.main}, {self.e1}, {self.e2})"


def _state_key(state):
    rect, x, y = state
    return (rect,) + x.sort_key() + y.sort_key()


# -- tracer ------------------------------------------------------------------------


@dataclass
class _Leaf:
    key: tuple  # minimal crossing state, identifies the leaf
    sign: int  # the adjacent cylinder lies on the (sign * n)-side
    states: dict  # crossing state -> Eps time since the key epoch state
    flights: list  # (state, exit time) straight segments, one per crossing
    period: QuadExpr  # circumference in flow-time units
    start_state: tuple  # first crossing state of this particular trace
    t_pre: Eps  # flow time from the trace start point to start_state


class _Budget:
    def __init__(self, n):
        self.left = n

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise NotPeriodic("crossing budget exhausted")


class _Tracer:
    def __init__(self, s, u, v):
        self.s = s
        self.ana = s.analysis()
        self.u = u
        self.v = v
        self.zero = qe(s.D)

    def eps_point(self, rect, x, y, sign):
        """(x, y) + eta2 * d + sign * eta1 * n, n = (-v, u)."""
        return (
            rect,
            Eps(x, -self.v * sign, self.u),
            Eps(y, self.u * sign, self.v),
        )

    def _cross(self, state, edge, pos, budget):
        budget.spend()
        rect = state[0]
        for side in self.ana.edge_sides[(rect, edge)]:
            if side.offset < pos < side.offset + side.length:
                other = self.ana.partner[side]
                t = pos - side.offset
                w2, h2 = self.s.rectangles[other.rect]
                if other.edge == "bottom":
                    return (other.rect, other.offset + t, Eps(self.zero))
                if other.edge == "top":
                    return (other.rect, other.offset + t, Eps(h2))
                if other.edge == "left":
                    return (other.rect, Eps(self.zero), other.offset + t)
                return (other.rect, Eps(w2), other.offset + t)
        raise TraceError(f"crossing lands on a gluing-segment endpoint: {edge} at {pos!r}")

    def normalize(self, state, budget):
        """Push a nudged point back into a rectangle chart."""
        while True:
            rect, x, y = state
            w, h = self.s.rectangles[rect]
            if x < 0:
                state = self._cross(state, "left", y, budget)
            elif x > w:
                state = self._cross(state, "right", y, budget)
            elif y < 0:
                state = self._cross(state, "bottom", x, budget)
            elif y > h:
                state = self._cross(state, "top", x, budget)
            else:
                return state

    def flight(self, state, dx, dy):
        """Exit data (t_exit, edge, crossing param) for the straight flight."""
        rect, x, y = state
        w, h = self.s.rectangles[rect]
        tx = ty = None
        if dx > 0:
            tx = (Eps(w) - x) / dx
        elif dx < 0:
            tx = (Eps(self.zero) - x) / dx
        if dy > 0:
            ty = (Eps(h) - y) / dy
        elif dy < 0:
            ty = (Eps(self.zero) - y) / dy
        if tx is not None and (ty is None or tx < ty):
            t, edge = tx, ("right" if dx > 0 else "left")
            pos = y + t * dy if dy else y
        elif ty is not None and (tx is None or ty < tx):
            t, edge = ty, ("top" if dy > 0 else "bottom")
            pos = x + t * dx if dx else x
        else:
            raise TraceError("flight exits exactly through a rectangle corner")
        if not t > 0:
            raise TraceError("non-positive flight time")
        return t, edge, pos

    def step(self, state, dx, dy, budget):
        t, edge, pos = self.flight(state, dx, dy)
        return self._cross(state, edge, pos, budget), t

    def trace_leaf(self, start, sign, budget):
        """Trace the closed leaf through `start` in direction (u, v)."""
        start = self.normalize(start, budget)
        s0, t_pre = self.step(start, self.u, self.v, budget)
        states = {s0: Eps(self.zero)}
        flights = []
        state, elapsed = s0, Eps(self.zero)
        while True:
            t, edge, pos = self.flight(state, self.u, self.v)
            flights.append((state, t))
            state = self._cross(state, edge, pos, budget)
            elapsed = elapsed + t
            if state == s0:
                break
            if state in states:
                raise TraceError("leaf revisits a crossing without closing")
            states[state] = elapsed
        if not (elapsed.is_exact and elapsed.main > 0):
            raise TraceError("leaf period is not exact and positive")
        key = min(states, key=_state_key)
        epoch = states[key]
        period = elapsed.main
        states = {
            st: _mod_time(tm - epoch, period) for st, tm in states.items()
        }
        return _Leaf(key, sign, states, flights, period, s0, t_pre)

    def ray_first_hit(self, start, nx, ny, chords, budget, skip_zero):
        """First intersection of the ray start + s*(nx, ny), s > 0, with a
        recorded leaf chord.  Returns (leaf key, s) with s Eps-valued."""
        state = self.normalize(start, budget)
        total = Eps(self.zero)
        cross_nd = nx * self.v - ny * self.u  # n x d
        while True:
            t_exit, edge, pos = self.flight(state, nx, ny)
            rect, x, y = state
            best = None
            for leaf_key, (crect, cx, cy), ct_exit in chords.get(rect, ()):
                rx, ry = cx - x, cy - y  # c - q
                s_loc = (rx * self.v - ry * self.u) / cross_nd
                if not (0 <= s_loc <= t_exit):
                    continue
                if skip_zero and not (total + s_loc) > 0:
                    continue
                t_ch = (rx * ny - ry * nx) / cross_nd  # solves q + s*n = c + t*d
                if not (0 <= t_ch <= ct_exit):
                    continue
                if best is None or s_loc < best[1]:
                    best = (leaf_key, s_loc)
            if best is not None:
                return best[0], total + best[1]
            state = self._cross(state, edge, pos, budget)
            total = total + t_exit


def _mod_time(t, period):
    k = math.floor(t.main / period)
    t = t - period * k
    if t < 0:
        t = t + period
    elif t >= period:
        t = t - period
    return t


# -- decomposition ------------------------------------------------------------------


@dataclass
class Cylinder:
    width: QuadExpr  # circumference, in flow-time units
    height: QuadExpr  # in perpendicular-time units; flat area = w*h*(u^2+v^2)
    leaf_keys: tuple
    core_marked: list = field(default_factory=list)
    core_pos: dict = field(default_factory=dict)  # name -> position mod width

    @property
    def modulus(self):
        return self.width / self.height


@dataclass
class Decomposition:
    direction: tuple  # (u, v) as QuadExpr
    cylinders: list
    marked_status: dict  # name -> ("core"|"boundary"|"offcore", cylinder index or None)

    @property
    def moduli(self):
        return [c.modulus for c in self.cylinders]


def _coerce_direction(s, direction):
    u, v = direction
    def conv(x):
        if isinstance(x, QuadExpr):
            if not x.is_rational() and x.D != s.D:
                raise TraceError(f"direction component from the wrong field: {x!r}")
            return x if x.D == s.D else qe(s.D, x.p)
        return qe(s.D, x)
    u, v = conv(u), conv(v)
    if u < 0 or v < 0 or (not u and not v):
        raise TraceError("direction must be nonzero with nonnegative components")
    return u, v


def decompose(s, direction, max_crossings=100000):
    """Cylinder decomposition of `s` in the given direction.

    Raises NotPeriodic if the crossing budget is exhausted before every
    boundary leaf closes up (in particular for non-periodic directions).
    """
    u, v = _coerce_direction(s, direction)
    tr = _Tracer(s, u, v)
    ana = s.analysis()
    budget = _Budget(max_crossings)

    # Boundary-adjacent leaves: one for each side of each outgoing germ at a
    # cone point.  A germ is started from the unique class member whose
    # inward sector contains the (infinitesimal) offset vector
    # eta2*d + sign*eta1*n, so every start already has in-range coordinates.
    zero = qe(s.D)
    leaves = {}
    for cls, sing in zip(ana.vertex_classes, ana.singular):
        if not sing:
            continue
        for rect, x, y in cls:
            w, h = s.rectangles[rect]
            for sign in (1, -1):
                wx = Eps(zero, -v * sign, u)
                wy = Eps(zero, u * sign, v)
                if (x == 0 and not wx > 0) or (x == w and not wx < 0):
                    continue
                if (y == 0 and not wy > 0) or (y == h and not wy < 0):
                    continue
                leaf = tr.trace_leaf(tr.eps_point(rect, x, y, sign), sign, budget)
                if leaf.key not in leaves:
                    leaves[leaf.key] = leaf
                elif leaves[leaf.key].sign != sign:
                    raise TraceError("inconsistent boundary side for a leaf")

    # Index every leaf flight by rectangle for ray intersection tests.
    chords = {}
    for leaf in leaves.values():
        for (rect, x, y), t_exit in leaf.flights:
            chords.setdefault(rect, []).append((leaf.key, (rect, x, y), t_exit))

    def ray(start, sign, skip_zero):
        nx, ny = -v * sign, u * sign
        return tr.ray_first_hit(start, nx, ny, chords, budget, skip_zero)

    # Pair the two boundary leaves of each cylinder by a perpendicular ray.
    paired = {}
    cylinders = []
    for key, leaf in leaves.items():
        if key in paired:
            continue
        (state0, t_exit0) = leaf.flights[0]
        rect0, x0, y0 = state0
        # mid-flight start, nudged by eta2 along the flow so the ray's
        # crossing parameters keep a nonzero infinitesimal part
        nudge = Eps(qe(s.D), qe(s.D), qe(s.D, 1))
        mid = (
            rect0,
            x0 + (t_exit0 / 2 + nudge) * u,
            y0 + (t_exit0 / 2 + nudge) * v,
        )
        other_key, s_hit = ray(mid, leaf.sign, skip_zero=True)
        other = leaves[other_key]
        height = s_hit.main
        if other_key == key or other_key in paired or height <= 0:
            raise TraceError("cylinder boundary pairing failed")
        if other.period != leaf.period:
            raise TraceError("paired leaves have different periods")
        paired[key] = other_key
        paired[other_key] = key
        cylinders.append(Cylinder(leaf.period, height, (key, other_key)))

    total = sum((c.width * c.height for c in cylinders), qe(s.D)) * (u * u + v * v)
    if total != ana.area:
        raise TraceError("cylinder areas do not add up to the surface area")

    order = sorted(range(len(cylinders)),
                   key=lambda i: (cylinders[i].width, cylinders[i].height,
                                  cylinders[i].leaf_keys[0]))
    cylinders = [cylinders[i] for i in order]
    cyl_of_leaf = {k: i for i, c in enumerate(cylinders) for k in c.leaf_keys}

    def offset_rep(point, sign):
        """Class representative whose sector contains eta2*d + sign*eta1*n."""
        for rect, x, y in s.point_class(point):
            w, h = s.rectangles[rect]
            wx = Eps(zero, -v * sign, u)
            wy = Eps(zero, u * sign, v)
            if (x == 0 and not wx > 0) or (x == w and not wx < 0):
                continue
            if (y == 0 and not wy > 0) or (y == h and not wy < 0):
                continue
            return tr.eps_point(rect, x, y, sign)
        raise TraceError(f"no chart contains the offset of {point}")

    # Classify the marked points.
    status = {}
    core_ref = {}  # cylinder index -> reference leaf for core positions
    for name, rect, mx, my in s.marked_points:
        start = offset_rep((rect, mx, my), 1)
        mleaf = tr.trace_leaf(start, 1, budget)
        if mleaf.key in leaves:
            status[name] = ("boundary", None)
            continue
        up_key, s_up = ray(start, 1, skip_zero=False)
        down_key, s_down = ray(start, -1, skip_zero=False)
        ci = cyl_of_leaf[up_key]
        if cyl_of_leaf[down_key] != ci:
            raise TraceError("perpendicular rays from a marked point disagree")
        cyl = cylinders[ci]
        if s_up.main + s_down.main != cyl.height:
            raise TraceError("marked point heights do not span the cylinder")
        if s_up.main != s_down.main:
            status[name] = ("offcore", ci)
            continue
        status[name] = ("core", ci)
        ref = core_ref.setdefault(ci, mleaf)
        if mleaf.start_state not in ref.states:
            raise TraceError("core leaf mismatch between marked points")
        # position along the core relative to the reference trace; only
        # differences between two marked points are exact, so rebase below
        cyl.core_marked.append(name)
        cyl.core_pos[name] = ref.states[mleaf.start_state] - mleaf.t_pre

    for cyl in cylinders:
        if not cyl.core_marked:
            continue
        base = cyl.core_pos[cyl.core_marked[0]]
        for name in cyl.core_marked:
            rel = cyl.core_pos[name] - base
            if not rel.is_exact:
                raise TraceError("core separation has a non-exact part")
            cyl.core_pos[name] = _mod_time(Eps(rel.main), cyl.width).main
        cyl.core_marked.sort()
    return Decomposition((u, v), cylinders, status)


# -- twists --------------------------------------------------------------------------


def twist_exponents(dec):
    """Smallest positive integers (k_i) with k_i * modulus_i all equal.

    These are the numbers of Dehn twists the primitive core-twisting
    parabolic applies to each cylinder.  Raises NotParabolic if some
    modulus ratio is irrational.
    """
    mods = dec.moduli
    ratios = []
    for m in mods:
        r = mods[0] / m
        if not r.is_rational():
            raise NotParabolic(f"irrational modulus ratio: {r}")
        ratios.append(Fraction(r.p))
    lcm = math.lcm(*(r.denominator for r in ratios))
    ks = [int(r * lcm) for r in ratios]
    g = math.gcd(*ks)
    return [k // g for k in ks]


def twist_permutation(s, direction, max_crossings=100000, dec=None):
    """Permutation induced on the marked points by the core-twisting parabolic.

    Marked points on boundary circles are fixed; a k-fold twist translates a
    cylinder core by k*width/2, so core points with an even exponent are
    fixed and core points with an odd exponent must be exchanged with the
    marked point half a circumference away.
    """
    if dec is None:
        dec = decompose(s, direction, max_crossings)
    ks = twist_exponents(dec)
    names = sorted(nm for nm, *_ in s.marked_points)
    index = {nm: i + 1 for i, nm in enumerate(names)}
    images = {}
    for name, (kind, ci) in dec.marked_status.items():
        if kind == "offcore":
            raise OffCorePoint(f"{name} is strictly inside a cylinder, off the core")
        if kind == "boundary" or ks[ci] % 2 == 0:
            images[name] = name
            continue
        cyl = dec.cylinders[ci]
        target = _mod_time(Eps(cyl.core_pos[name] + cyl.width / 2), cyl.width).main
        hit = [nm for nm in cyl.core_marked if cyl.core_pos[nm] == target]
        if not hit:
            raise UnmatchedImage(f"{name} twists to an unmarked point")
        images[name] = hit[0]
    return Perm(tuple(index[images[nm]] for nm in names))


def search_directions(s, candidates, max_crossings=100000):
    """Twist permutations in every candidate direction that works out.

    Tries decompose + twist_permutation for each (u, v) in candidates and
    returns the successful (direction, permutation) pairs.  Candidates whose
    direction is not periodic, or whose decomposition fails for any other
    reason, are skipped silently.
    """
    results = []
    for direction in candidates:
        try:
            dec = decompose(s, direction, max_crossings)
            perm = twist_permutation(s, direction, max_crossings, dec)
        except TraceError:
            continue
        results.append((direction, perm))
    return results
