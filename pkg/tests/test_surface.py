"""Model surfaces: construction postconditions, point symmetry, fixed-point
marking, scaling and serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from flatperm.prototypes import enumerate_prym_reduced, reduced_h2, reduced_prym
from flatperm.qfield import qe
from flatperm.surface import (
    FlatSurface,
    Gluing,
    Side,
    SurfaceError,
    apply_diag,
    find_involutions,
    from_json_dict,
    involution_fixed_classes,
    load_surface,
    make_Aminus,
    make_Aplus,
    make_L,
    make_P,
    make_Z,
    mark_fixed_points,
    save_surface,
    to_json_dict,
)

SMALL_D_H2 = [9, 12, 13, 16, 17, 20, 21, 25, 33]
SMALL_D_PRYM = [12, 16, 17, 24, 25, 32, 33, 41, 48]


def test_genus2_models_postconditions():
    for D in SMALL_D_H2:
        for e in reduced_h2(D):
            s = make_L(e, D)
            info = s.validate()
            assert info["genus"] == 2
            assert info["stratum"] == [2]
            assert info["cone_angle_turns"] == [Fraction(3)]
            assert info["marked_points"] == ["w1", "w2", "w3", "w4", "w5"]
            assert info["area"] == qe(D, 0, 1)  # normalized to sqrt(D)


def test_genus3_models_postconditions():
    for D in SMALL_D_PRYM:
        for p in enumerate_prym_reduced(D):
            for make in (make_Aplus, make_Aminus):
                s = make(p.a, p.b, p.c, p.e)
                info = s.validate()
                assert info["genus"] == 3
                assert info["stratum"] == [4]
                assert info["cone_angle_turns"] == [Fraction(5)]
                assert info["marked_points"] == ["w1", "w2", "w3"]
        for e in reduced_prym(D):
            info = make_Z(e, D).validate()
            assert info["genus"] == 3 and info["stratum"] == [4]
            assert info["marked_points"] == ["w1", "w2", "w3"]


def test_nonreduced_prototype_surface():
    s = make_P(0, 2, 2, -1)  # D = 17, c = 2
    info = s.validate()
    assert info["genus"] == 2 and info["stratum"] == [2]
    assert len(info["marked_points"]) == 5


def test_point_symmetry_and_fixed_point_counts():
    s = make_L(-1, 17)
    fixed_counts = sorted(
        len(involution_fixed_classes(s, m)) for m in find_involutions(s)
    )
    # exactly one point symmetry with 5 regular fixed points
    assert fixed_counts.count(5) == 1
    z = make_Z(-3, 17)
    fixed_counts = sorted(
        len(involution_fixed_classes(z, m)) for m in find_involutions(z)
    )
    assert fixed_counts.count(3) == 1


def test_mark_fixed_points_names_and_count():
    s = make_P(0, 2, 2, -1, named=False)
    assert not s.marked_points
    mark_fixed_points(s, 5)
    assert len(s.marked_points) == 5
    assert sorted(nm for nm, *_ in s.marked_points) == [f"p{i}" for i in range(1, 6)]
    with pytest.raises(SurfaceError):
        mark_fixed_points(make_L(-1, 17, named=False), 3)


def test_apply_diag_scales_area():
    s = make_L(-1, 17)
    area = s.validate()["area"]
    t = apply_diag(s, 2, Fraction(1, 3))
    info = t.validate()
    assert info["area"] == area * 2 * Fraction(1, 3)
    assert info["genus"] == 2 and info["stratum"] == [2]
    assert len(t.marked_points) == len(s.marked_points)


@given(st.sampled_from([(e, D) for D in SMALL_D_H2 for e in reduced_h2(D)]))
@settings(max_examples=15, deadline=None)
def test_apply_diag_commutes_with_fixed_points(eD):
    e, D = eD
    s = make_L(e, D)
    t = apply_diag(s, 3, 2)
    scaled = {
        (nm, rect, x * 3, y * 2) for nm, rect, x, y in s.marked_points
    }
    assert {(nm, rect, x, y) for nm, rect, x, y in t.marked_points} == scaled


def test_json_roundtrip(tmp_path):
    for s in (make_L(-1, 17), make_Z(-3, 17), make_Aminus(0, 3, 1, -1)):
        t = from_json_dict(to_json_dict(s))
        assert t.D == s.D
        assert t.rectangles == s.rectangles
        assert t.marked_points == s.marked_points
        assert t.validate() == s.validate()
        path = tmp_path / "s.json"
        save_surface(s, path)
        u = load_surface(path)
        assert u.validate() == s.validate() and u.marked_points == s.marked_points


def test_invalid_gluings_rejected():
    w = qe(17, 1)
    rects = [(w, w)]
    # top edge never glued
    gl = [Gluing(Side(0, "left", qe(17), w), Side(0, "right", qe(17), w))]
    with pytest.raises(SurfaceError):
        FlatSurface(17, rects, gl).validate()


def test_bad_prototype_parameters_raise():
    with pytest.raises(Exception):
        make_L(0, 17)  # wrong parity for D
    with pytest.raises(Exception):
        make_Aplus(0, 1, 1, 0)  # degenerate: 2c + e < b fails
