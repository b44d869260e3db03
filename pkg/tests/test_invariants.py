"""Torsion types of the marked points, the counting invariant built from
them, and the permutation upper bounds they induce."""

import pytest
from hypothesis import given, settings, strategies as st

from flatperm.groups import generate, iso_class, parse_perm
from flatperm.invariants import (
    InvariantError,
    canonical_basis_h2,
    canonical_basis_prym,
    d5_constraint_upper_bound,
    hlk,
    marked_displacements,
    prym_parity_class,
    torsion_types_h2,
    torsion_types_prym,
    upper_bound_group,
)
from flatperm.prototypes import reduced_h2, reduced_prym, spin_reduced
from flatperm.qfield import qe
from flatperm.surface import make_Aminus, make_Aplus, make_L, make_Z


def test_canonical_bases():
    for D, d in ((16, 0), (24, 0), (12, 2), (20, 2), (17, 1), (33, 1)):
        got_d, rho = canonical_basis_h2(D)
        assert got_d == d
        assert 2 * rho + d == qe(D, 0, 1)
    with pytest.raises(InvariantError):
        canonical_basis_h2(13)  # 5 mod 8: no basis
    for D, d in ((16, 0), (32, 0), (20, 2), (36, 2)):
        got_d, _ = canonical_basis_prym(D)
        assert got_d == d
    with pytest.raises(InvariantError):
        canonical_basis_prym(17)
    with pytest.raises(InvariantError):
        canonical_basis_prym(24)  # 8 mod 16: not a residue


def test_marked_displacements_contains_all_points():
    s = make_L(-1, 17)
    disp = marked_displacements(s)
    assert sorted(disp) == ["w1", "w2", "w3", "w4", "w5"]


def test_torsion_types_frozen_examples():
    assert torsion_types_h2(make_L(-1, 17)) == {
        "w1": "c",
        "w2": "v",
        "w3": "h",
        "w4": "0",
        "w5": "0",
    }
    assert hlk(torsion_types_h2(make_L(-1, 17))) == (2, [1, 1, 1])
    # the other spin component has the complementary distribution
    assert hlk(torsion_types_h2(make_L(-3, 17))) == (0, [3, 1, 1])
    assert hlk(torsion_types_h2(make_L(1, 17))) == (0, [3, 1, 1])


def test_square_discriminant_types():
    # arithmetic case: coordinates reduce mod the integer lattice directly
    for e, expect in ((-1, (2, [1, 1, 1])), (1, (0, [3, 1, 1]))):
        t = torsion_types_h2(make_L(e, 25))
        assert hlk(t) == expect


def test_h2_counting_invariant_tables():
    # square-tiled surfaces, even side
    assert hlk(torsion_types_h2(make_L(0, 16))) == (1, [2, 2, 0])
    assert hlk(torsion_types_h2(make_L(-2, 16))) == (1, [2, 2, 0])
    assert hlk(torsion_types_h2(make_L(0, 36))) == (1, [2, 2, 0])
    # even non-square discriminants behave like the square of the same class
    for D in (12, 20, 24, 28, 32, 40, 44, 48):
        for e in reduced_h2(D):
            assert hlk(torsion_types_h2(make_L(e, D))) == (1, [2, 2, 0])


@given(st.sampled_from([D for D in range(9, 120) if D % 8 == 1 and D > 9]))
@settings(max_examples=12, deadline=None)
def test_h2_counting_invariant_tracks_spin(D):
    for e in reduced_h2(D):
        expect = (0, [3, 1, 1]) if spin_reduced(D, e) == 0 else (2, [1, 1, 1])
        assert hlk(torsion_types_h2(make_L(e, D))) == expect


def test_no_basis_for_nonresidue_discriminants():
    with pytest.raises(InvariantError):
        torsion_types_h2(make_L(-1, 13))


def test_prym_torsion_types():
    assert hlk(torsion_types_prym(make_Aplus(0, 2, 1, -2))) == (3, [0, 0, 0])
    # the mod-16 basis exists exactly for D = 0, 4 mod 16
    for D in (16, 20, 32, 36, 48):
        for e in reduced_prym(D):
            for make in (make_Aplus, make_Aminus):
                types = torsion_types_prym(make(0, (D - e * e) // 8, 1, e))
                n0, counts = hlk(types)
                assert n0 + sum(counts) == 3
    with pytest.raises(InvariantError):
        torsion_types_prym(make_Z(-3, 17))  # odd D: no mod-16 basis


def test_upper_bound_group_respects_types():
    types = {"w1": "c", "w2": "v", "w3": "h", "w4": "0", "w5": "0"}
    g = upper_bound_group(types)
    assert iso_class(g) == "Dih6" and len(g) == 12
    for p in g:
        # integral points only go to integral points
        assert {p(4), p(5)} == {4, 5}
    # all-distinct types pin everything except the type swap structure
    assert len(upper_bound_group({"w1": "0", "w2": "h", "w3": "v"})) == 2
    assert len(upper_bound_group({"w1": "0", "w2": "0", "w3": "0"})) == 6
    with pytest.raises(InvariantError):
        upper_bound_group({f"w{i}": "0" for i in range(1, 7)})


def test_realized_twists_lie_in_upper_bound():
    from flatperm.cylinders import twist_permutation

    for D in (16, 17, 20, 24, 33):
        for e in reduced_h2(D):
            s = make_L(e, D)
            g = upper_bound_group(torsion_types_h2(s))
            assert twist_permutation(s, (1, 0)) in g
            assert twist_permutation(s, (0, 1)) in g


def test_d5_constraint_route():
    dih5 = generate([parse_perm("(1 2 3 4 5)", 5), parse_perm("(2 5)(3 4)", 5)])
    assert d5_constraint_upper_bound(dih5) == "Dih5"
    sym3 = generate([parse_perm("(1 2)", 5), parse_perm("(1 3)", 5)])
    with pytest.raises(Exception):
        d5_constraint_upper_bound(sym3)


def test_prym_parity_class():
    assert prym_parity_class(20) == "Sym2"
    assert prym_parity_class(16) == "Sym2"
    assert prym_parity_class(36) == "Sym2"
    assert prym_parity_class(8) == "Sym3"
    assert prym_parity_class(12) == "Sym3"
    assert prym_parity_class(24) == "Sym3"
    assert prym_parity_class(17) == "Sym3"
    assert prym_parity_class(41) == "Sym3"
    with pytest.raises(InvariantError):
        prym_parity_class(13)
    with pytest.raises(InvariantError):
        prym_parity_class(5)
