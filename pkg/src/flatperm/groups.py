"""Permutations on small labeled point sets and subgroup bookkeeping.

Permutation groups here are tiny (subgroups of Sym_5), so everything is
done by explicit closure.  Groups are identified up to isomorphism by
their order together with the multiset of element orders, which separates
all the isomorphism classes that occur in this project (trivial, Sym_2,
Sym_3, Dih_4, Dih_5, Dih_6 and the ambient Sym_n overgroups).
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class Perm:
    """A permutation of {1..n} stored as a tuple of images (1-based)."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise GroupError(f"not a permutation of 1..{n}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        """(self * other)(i) = self(other(i))."""
        if self.n != other.n:
            raise GroupError("permutation degree mismatch")
        return Perm(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Perm":
        img = [0] * self.n
        for i in range(1, self.n + 1):
            img[self(i) - 1] = i
        return Perm(tuple(img))

    def is_identity(self) -> bool:
        return all(self(i) == i for i in range(1, self.n + 1))

    def order(self) -> int:
        k, p = 1, self
        while not p.is_identity():
            p = p * self
            k += 1
        return k

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point, sorted."""
        seen: set[int] = set()
        out = []
        for i in range(1, self.n + 1):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self(i)
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return sorted(out)

    def cycle_type(self) -> tuple[int, ...]:
        """Lengths of nontrivial cycles, sorted descending."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def __str__(self):
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(i) for i in c) + ")" for c in cycs)

    def __repr__(self):
        return f"Perm[{self}]"


def identity(n: int) -> Perm:
    return Perm(tuple(range(1, n + 1)))


def from_cycles(n: int, cycles: list[tuple[int, ...]]) -> Perm:
    img = list(range(1, n + 1))
    for cyc in cycles:
        if len(set(cyc)) != len(cyc):
            raise GroupError(f"repeated point in cycle {cyc}")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not 1 <= a <= n:
                raise GroupError(f"point {a} out of range 1..{n}")
            img[a - 1] = b
    return Perm(tuple(img))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int) -> Perm:
    """Parse cycle notation, e.g. "(1 2)(3 5)"; "()" is the identity."""
    text = text.strip()
    if text == "()" or text == "":
        return identity(n)
    chunks = _CYCLE_RE.findall(text)
    if "".join(f"({c})" for c in chunks).replace(" ", "") != text.replace(" ", ""):
        raise GroupError(f"malformed cycle notation: {text!r}")
    cycles = []
    for chunk in chunks:
        pts = tuple(int(t) for t in chunk.split())
        if len(pts) >= 2:
            cycles.append(pts)
    return from_cycles(n, cycles)


def generate(gens: list[Perm]) -> frozenset[Perm]:
    """Closure of the generators (with identity) under composition."""
    if not gens:
        raise GroupError("need at least one generator (or an explicit identity)")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise GroupError("generators act on different point sets")
    elems = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = g * h
                if p not in elems:
                    elems.add(p)
                    nxt.append(p)
        frontier = nxt
    return frozenset(elems)


# -- isomorphism classes ----------------------------------------------------

# (order, sorted element-order multiset) -> name, for every class we must
# distinguish.  These fingerprints separate the dihedral groups from the
# cyclic and other groups of the same order on <= 6 points.
_FINGERPRINTS = {
    (1, (1,)): "trivial",
    (2, (1, 2)): "Sym2",
    (6, (1, 2, 2, 2, 3, 3)): "Sym3",
    (8, (1, 2, 2, 2, 2, 2, 4, 4)): "Dih4",
    (10, (1, 2, 2, 2, 2, 2, 5, 5, 5, 5)): "Dih5",
    (12, (1, 2, 2, 2, 2, 2, 2, 2, 3, 3, 6, 6)): "Dih6",
}


def iso_class(group: frozenset[Perm]) -> str:
    """Isomorphism class name, or "other(order=N)" if not one we track."""
    orders = tuple(sorted(g.order() for g in group))
    name = _FINGERPRINTS.get((len(group), orders))
    if name is not None:
        return name
    return f"other(order={len(group)})"


def subgroups_between(
    lower: frozenset[Perm], upper: frozenset[Perm]
) -> list[frozenset[Perm]]:
    """All subgroups H with lower <= H <= upper.

    Found by augmenting `lower` with subsets of `upper` of size <= 2 and
    closing; for the tiny upper groups here (order <= 12 inside Sym_5),
    every intermediate subgroup is generated by `lower` plus at most two
    extra elements, so this enumeration is exhaustive.
    """
    if not lower <= upper:
        raise GroupError("lower is not contained in upper")
    extra = sorted(upper - lower, key=lambda p: p.images)
    found = {lower}
    for k in (1, 2):
        for combo in itertools.combinations(extra, k):
            h = generate(sorted(lower, key=lambda p: p.images) + list(combo))
            if h <= upper:
                found.add(h)
    return sorted(found, key=lambda h: (len(h), sorted(p.images for p in h)))


def force_classification(
    upper: frozenset[Perm],
    lower: frozenset[Perm],
    facts: set[tuple[int, ...]],
) -> str | None:
    """Conclude the iso class of the true group G with lower <= G <= upper.

    `facts` are conjugation-invariant cycle types known to occur in G
    (coming from other surfaces in the same component).  Returns the common
    iso class of all candidates consistent with the facts, or None if the
    candidates disagree.  Raises if no candidate realizes the facts.
    """
    candidates = []
    for h in subgroups_between(lower, upper):
        types = {g.cycle_type() for g in h}
        if all(f in types for f in facts):
            candidates.append(h)
    if not candidates:
        raise GroupError("no subgroup between lower and upper realizes the facts")
    classes = {iso_class(h) for h in candidates}
    if len(classes) == 1:
        return classes.pop()
    return None


def _sym(n: int) -> frozenset[Perm]:
    return frozenset(Perm(p) for p in itertools.permutations(range(1, n + 1)))


def verify_dih5_maximality(lower: frozenset[Perm]) -> bool:
    """Check the stabilizer-constraint argument that pins `lower` of order 10.

    `lower` must be dihedral of order 10 on 5 points.  Let s be the unique
    involution in `lower` fixing point 1; the constraint satisfied by the
    true group G is: every element of G fixing point 1 preserves each of
    the two transposition blocks of s (so the stabilizer of 1 in G lies in
    the four-group generated by those two transpositions).  We verify that
    `lower` itself satisfies the constraint and that every strictly larger
    subgroup of Sym_5 containing `lower` violates it -- hence G = lower.
    """
    if iso_class(lower) != "Dih5":
        raise GroupError("verify_dih5_maximality expects a Dih5 group")
    n = next(iter(lower)).n
    if n != 5:
        raise GroupError("verify_dih5_maximality expects an action on 5 points")
    stab1 = [g for g in lower if g(1) == 1 and not g.is_identity()]
    if len(stab1) != 1 or stab1[0].order() != 2:
        raise GroupError("unexpected point-1 stabilizer in Dih5")
    blocks = [frozenset(c) for c in stab1[0].cycles()]
    if sorted(len(b) for b in blocks) != [2, 2]:
        raise GroupError("unexpected involution shape in Dih5")

    def satisfies(h: frozenset[Perm]) -> bool:
        for g in h:
            if g(1) != 1:
                continue
            for b in blocks:
                if frozenset(g(i) for i in b) != b:
                    return False
        return True

    if not satisfies(lower):
        return False
    sym5 = _sym(5)
    lower_sorted = sorted(lower, key=lambda p: p.images)
    for g in sorted(sym5 - lower, key=lambda p: p.images):
        h = generate(lower_sorted + [g])
        if len(h) > len(lower) and satisfies(h):
            return False
    return True
