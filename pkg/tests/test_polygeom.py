#!/usr/bin/env python3

from fractions import Fraction

import pytest

from coordination_core.fields.cyclotomic import CycloInt, PlanePoint, Space
from coordination_core.fields.quadfield import FieldMismatchError, QuadRat
from coordination_core.geometry.polygeom import (
    WINDOW_INRADIUS,
    ConvexPolygon,
    HalfPlane,
    Location,
    RegionSet,
    area,
    clip,
    covers,
    intersect,
    locate,
    make_window,
    subtract,
    union_area,
)


def point(x, y, d=2) -> PlanePoint:
    return PlanePoint.rational(Fraction(x), Fraction(y), d)


def square(x0, y0, size, d=2) -> ConvexPolygon:
    x0, y0, size = Fraction(x0), Fraction(y0), Fraction(size)
    corners = [(x0, y0), (x0 + size, y0), (x0 + size, y0 + size), (x0, y0 + size)]
    return ConvexPolygon([point(x, y, d) for x, y in corners])


def test_square_area_and_validation():
    unit = square(0, 0, 1)
    unit.validate()
    assert area(unit) == 1
    clockwise = ConvexPolygon(list(reversed(unit.vertices)))
    with pytest.raises(ValueError):
        clockwise.validate()
    with pytest.raises(ValueError):
        ConvexPolygon([])


def test_clip():
    unit = square(0, 0, 1)
    left_half = HalfPlane(point(1, 0), QuadRat(1, 0, 2, 2))  # x <= 1/2
    assert area(clip(unit, left_half)) == QuadRat(1, 0, 2, 2)
    assert clip(unit, HalfPlane(point(1, 0), QuadRat(2, 0, 1, 2))) is unit
    assert not clip(unit, HalfPlane(point(1, 0), QuadRat(0, 0, 1, 2)))


def test_intersect():
    overlap = intersect(square(0, 0, 2), square(1, 1, 2))
    assert area(overlap) == 1
    assert not intersect(square(0, 0, 1), square(5, 5, 1))
    # Touching along an edge has zero area.
    assert not intersect(square(0, 0, 1), square(1, 0, 1))
    with pytest.raises(FieldMismatchError):
        intersect(square(0, 0, 1), square(0, 0, 1, d=3))


def test_locate():
    unit = square(0, 0, 1)
    assert locate(point(Fraction(1, 2), Fraction(1, 2)), unit) is Location.INSIDE
    assert locate(point(1, Fraction(1, 3)), unit) is Location.BOUNDARY
    assert locate(point(2, 0), unit) is Location.OUTSIDE


def test_covers():
    assert covers(square(0, 0, 2), square(0, 0, 1))
    assert covers(square(0, 0, 1), square(0, 0, 1))
    assert not covers(square(0, 0, 1), square(0, 0, 2))
    assert not covers(square(0, 0, 2), square(1, 1, 2))
    assert covers(square(0, 0, 1), ConvexPolygon.empty(2))


def test_subtract_pieces_are_disjoint():
    big = square(0, 0, 3)
    hole = square(1, 1, 1)
    pieces = subtract(big, hole)
    assert sum((area(piece) for piece in pieces), QuadRat(0, 0, 1, 2)) == 8
    for i, first in enumerate(pieces):
        for second in pieces[i + 1:]:
            assert not intersect(first, second)
    unit = square(0, 0, 1)
    assert subtract(unit, square(5, 5, 1))[0] is unit
    assert subtract(square(0, 0, 1), square(-1, -1, 3)) == []


@pytest.mark.parametrize("method", ["inclusion-exclusion", "decomposition", "auto"])
def test_union_area(method):
    pieces = [square(0, 0, 2), square(1, 1, 2), square(1, 0, 2), square(0, 0, 2)]
    # The 3x3 square without its top-left unit corner.
    assert union_area(pieces, method=method) == 8


def test_union_area_methods_agree_on_windows():
    window = make_window(8)
    pieces = [
        window.translate(CycloInt.xi_power(k, 8).embed(Space.INTERNAL).scale(QuadRat(1, 0, 2, 2)))
        for k in range(8)
    ]
    exact = union_area(pieces, method="inclusion-exclusion")
    assert union_area(pieces, method="decomposition") == exact
    assert (exact - area(window)).sign() > 0


def test_union_area_edge_cases():
    assert union_area([], d=3) == 0
    with pytest.raises(ValueError):
        union_area([])
    with pytest.raises(ValueError):
        union_area([square(0, 0, 1)], method="monte-carlo")


@pytest.mark.parametrize("n, expected_area", [(8, QuadRat(2, 2, 1, 2)), (12, QuadRat(6, 3, 1, 3))])
def test_window(n, expected_area):
    window = make_window(n)
    window.validate()
    assert len(window) == n
    assert area(window) == expected_area
    # Every edge has length 1.
    for a, b in zip(window.vertices, window.vertices[1:] + window.vertices[:1]):
        assert (b - a).norm_sq() == 1
    inradius = WINDOW_INRADIUS[n]
    assert locate(PlanePoint(inradius, QuadRat(0, 0, 1, inradius.d)), window) is Location.BOUNDARY
    assert locate(PlanePoint.origin(inradius.d), window) is Location.INSIDE


def test_window_halfplanes_match_vertices():
    window = make_window(12)
    rebuilt = ConvexPolygon(window.vertices)
    for vertex in window.vertices:
        assert locate(vertex, rebuilt) is Location.BOUNDARY
        assert locate(vertex, window) is Location.BOUNDARY
    assert area(intersect(window, rebuilt)) == area(window)


def test_window_shift():
    shift = point(Fraction(1, 7), Fraction(1, 13))
    window = make_window(8, shift)
    assert locate(shift, window) is Location.INSIDE
    assert area(window) == area(make_window(8))
    with pytest.raises(FieldMismatchError):
        make_window(12, shift)
    with pytest.raises(ValueError):
        make_window(10)


def test_scaled_and_negated():
    window = make_window(8)
    assert area(window.scaled(QuadRat(2, 0, 1, 2))) == area(window) * 4
    assert window.negated().canonical_key() == window.canonical_key()
    with pytest.raises(ValueError):
        window.scaled(QuadRat(-1, 0, 1, 2))


def test_dict_form_and_svg():
    unit = square(0, 0, 1)
    assert ConvexPolygon.from_dict(unit.to_dict()).canonical_key() == unit.canonical_key()
    assert unit.to_svg_path(2) == "M0.00 0.00 L1.00 0.00 L1.00 -1.00 L0.00 -1.00 Z"
    assert ConvexPolygon.empty(2).to_svg_path() == ""


def test_region_set():
    regions = RegionSet(2)
    assert regions.add(square(0, 0, 1))
    assert not regions.add(square(0, 0, 1))
    assert regions.add(square(0, 0, 2))
    assert len(regions) == 1
    assert regions.add(square(1, 1, 2))
    assert regions.area() == 7


def test_region_set_insert_reports_displaced_pieces():
    small, large = square(0, 0, 1), square(0, 0, 2)
    regions = RegionSet(2, [small, square(3, 3, 1)])
    assert regions.insert(square(0, 0, 1)) is None
    displaced = regions.insert(large)
    assert displaced == [small]
    assert len(regions) == 2 and large in regions.pieces
    assert regions.insert(ConvexPolygon.empty(2)) is None
