import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from kissing.sphgeom import (
    CONSTANTS, Collinear, DegenerateTriangle, GeometryError, NotATriangle,
    NotEmbeddable, NotRealizable, OutOfRange, SelfIntersecting, UNBOUNDED, arc_to_chord,
    arcs_cross, azim, chord_to_arc, circumradius, dih, heron_area, lfun,
    solid_angle_polygon, spherical_angle, triangle_area_from_chords,
)

SOL0 = 3 * math.acos(1 / 3) - math.pi
SQUARE = (4 * math.pi - 8 * SOL0) / 6


def test_constants():
    assert CONSTANTS.sol0 == pytest.approx(0.5512855984325308, abs=1e-15)
    assert CONSTANTS.total == pytest.approx(4 * math.pi - 20 * SOL0)
    assert CONSTANTS.total < CONSTANTS.tgt
    assert CONSTANTS.as_dict()["total_below_tgt"] is True


def test_lfun_endpoints():
    assert lfun(1.0) == pytest.approx(1.0)
    assert lfun(CONSTANTS.h0) == 0.0


def test_chord_to_arc_values():
    assert chord_to_arc(2.52) == pytest.approx(1.363106, abs=1e-6)
    assert chord_to_arc(2.0) == pytest.approx(math.pi / 3)
    assert chord_to_arc(4.0) == pytest.approx(math.pi)
    with pytest.raises(OutOfRange):
        chord_to_arc(4.0001)
    with pytest.raises(OutOfRange):
        arc_to_chord(-0.1)


@given(st.floats(0, 4))
def test_chord_arc_round_trip(c):
    assert arc_to_chord(chord_to_arc(c)) == pytest.approx(c, abs=1e-12)


def test_spherical_angle_equilateral():
    a = math.pi / 3
    assert spherical_angle(a, a, a) == pytest.approx(math.acos(1 / 3), abs=1e-14)


def test_spherical_angle_degenerate():
    with pytest.raises(DegenerateTriangle):
        spherical_angle(1.0, 0.0, 1.0)
    with pytest.raises(DegenerateTriangle):
        spherical_angle(2.5, 1.0, 1.0)


def test_dih_regular_simplex():
    assert dih(2, 2, 2, 2, 2, 2) == pytest.approx(math.acos(1 / 3), abs=1e-14)


def test_dih_degenerate():
    with pytest.raises(NotEmbeddable):
        dih(2, 2, 2, 4.0, 4.0, 4.0)


def test_triangle_areas():
    assert triangle_area_from_chords(2, 2, 2) == pytest.approx(SOL0, abs=1e-12)
    assert triangle_area_from_chords(2, 2, math.sqrt(8)) == pytest.approx(SQUARE / 2, abs=1e-12)
    with pytest.raises(NotRealizable):
        triangle_area_from_chords(2, 2, 5)
    with pytest.raises(NotRealizable):
        triangle_area_from_chords(0.5, 0.5, 3.9)


def _spherical_angles(c1, c2, c3):
    a, b, c = (chord_to_arc(x) for x in (c1, c2, c3))
    return (spherical_angle(a, b, c), spherical_angle(b, a, c), spherical_angle(c, a, b))


chords = st.floats(2.0, 2 * 1.26)


@given(chords, chords, chords)
def test_area_matches_girard(c1, c2, c3):
    excess = sum(_spherical_angles(c1, c2, c3)) - math.pi
    # radius-2 sphere: the solid angle equals the excess
    assert triangle_area_from_chords(c1, c2, c3) == pytest.approx(excess, abs=1e-9)


@given(chords, chords, chords, st.floats(0, 0.3))
def test_area_monotone_on_contact_range(c1, c2, c3, d):
    c1b = min(c1 + d, 2 * 1.26)
    assert triangle_area_from_chords(c1b, c2, c3) >= triangle_area_from_chords(c1, c2, c3) - 1e-12


def test_circumradius_values():
    assert circumradius(2, 2, 2) == pytest.approx(2 / math.sqrt(3), abs=1e-15)
    assert circumradius(2, 2, math.sqrt(8)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert circumradius(3, 3, 3.27) == pytest.approx(9 / math.sqrt(36 - 3.27 ** 2), rel=1e-12)
    assert circumradius(1, 1, 2) == UNBOUNDED
    with pytest.raises(NotATriangle):
        circumradius(1, 1, 3)


@given(st.floats(0.5, 4), st.floats(0.5, 4), st.floats(0.5, 4))
def test_circumradius_against_heron(a, b, c):
    area = heron_area(a, b, c)
    assume(area > 1e-3)
    assert circumradius(a, b, c) == pytest.approx(a * b * c / (4 * area), rel=1e-9)


def _square_on_sphere():
    r = math.sqrt(2)
    return [(r, 0, r), (0, r, r), (-r, 0, r), (0, -r, r)]


def test_square_solid_angle():
    sq = _square_on_sphere()
    assert solid_angle_polygon(sq) == pytest.approx(SQUARE, abs=1e-12)
    assert SQUARE == pytest.approx(1.3593476, abs=1e-7)
    assert SQUARE - 2 * SOL0 == pytest.approx(0.256776, abs=1e-6)


def test_polygon_orientation_complements():
    sq = _square_on_sphere()
    assert solid_angle_polygon(sq[::-1]) == pytest.approx(4 * math.pi - SQUARE, abs=1e-12)


def test_polygon_errors():
    with pytest.raises(GeometryError):
        solid_angle_polygon([(0, 0, 2), (2, 0, 0)])
    bow = [(1, 1, 1.4), (-1, -1, 1.4), (1, -1, 1.4), (-1, 1, 1.4)]
    with pytest.raises(SelfIntersecting):
        solid_angle_polygon(bow)


def test_arcs_cross():
    assert arcs_cross((1, 0, 0), (0, 1, 0), (1, 1, -1), (1, 1, 1))
    assert not arcs_cross((1, 0, 0), (0, 1, 0), (0, 1, 0), (0, 0, 1))
    # overlapping pieces of the same great circle
    assert arcs_cross((1, 0, 0), (0, 1, 0), (1, 0.2, 0), (0.2, 1, 0))


def test_azim_basics():
    v = (0, 0, 2)
    assert azim(v, (1, 0, 0), (1, 0, 0)) == 0.0
    assert azim(v, (1, 0, 0), (0, 1, 0)) == pytest.approx(math.pi / 2)
    assert azim(v, (1, 0, 0), (0, -1, 0)) == pytest.approx(3 * math.pi / 2)
    with pytest.raises(Collinear):
        azim(v, (0, 0, 1), (1, 0, 0))


def _random_dirs(seed, count):
    rng = np.random.default_rng(seed)
    return [rng.normal(size=3) for _ in range(count)]


@given(st.integers(0, 10**6))
def test_azim_additive_and_antisymmetric(seed):
    v, u, w, x = _random_dirs(seed, 4)
    for a, b in ((u, w), (w, x), (u, x)):
        pa = a - np.dot(a, v) / np.dot(v, v) * v
        assume(np.linalg.norm(pa) > 1e-3)
    uw, wu = azim(v, u, w), azim(v, w, u)
    assume(min(uw, wu) > 1e-9)
    assert (uw + wu) == pytest.approx(2 * math.pi, abs=1e-9)
    total = (azim(v, u, w) + azim(v, w, x)) % (2 * math.pi)
    assert math.isclose(total, azim(v, u, x), abs_tol=1e-9) or \
        math.isclose(abs(total - azim(v, u, x)), 2 * math.pi, abs_tol=1e-9)


@given(st.integers(0, 10**6), st.floats(0.1, 5))
def test_azim_scale_invariant(seed, s):
    v, u, w = _random_dirs(seed, 3)
    a = azim(v, u, w)
    b = azim(s * v, s * u, w)
    assert math.isclose(a, b, abs_tol=1e-9) or math.isclose(abs(a - b), 2 * math.pi, abs_tol=1e-9)


realizable = st.floats(1.6, 3.3)


@given(realizable, realizable, realizable)
def test_dih_matches_spherical_angle(y4, y5, y6):
    try:
        expect = spherical_angle(chord_to_arc(y4), chord_to_arc(y6), chord_to_arc(y5))
    except DegenerateTriangle:
        return
    a, b, c = (chord_to_arc(x) for x in (y4, y5, y6))
    assume(a + b > c + 1e-6 and a + c > b + 1e-6 and b + c > a + 1e-6)
    assert dih(2, 2, 2, y4, y5, y6) == pytest.approx(expect, abs=1e-9)


@given(chords, chords, chords)
def test_area_symmetric(a, b, c):
    ref = triangle_area_from_chords(a, b, c)
    for p in ((b, a, c), (c, b, a), (a, c, b)):
        assert triangle_area_from_chords(*p) == pytest.approx(ref, abs=1e-14)


def test_chord_to_arc_increasing():
    xs = np.linspace(0, 4, 1001)
    ys = [chord_to_arc(x) for x in xs]
    assert all(b > a for a, b in zip(ys, ys[1:]))
