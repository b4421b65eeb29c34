"""Exact convex polygons over Q(sqrt(d)): windows, clipping, areas and unions."""

import logging
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from coordination_core.fields.cyclotomic import CycloInt, PlanePoint, Space
from coordination_core.fields.quadfield import FieldMismatchError, QuadRat

log = logging.getLogger(__name__)

# Beyond this many pieces union_area switches from inclusion-exclusion to a
# disjoint decomposition.
INCLUSION_EXCLUSION_LIMIT = 12
_BBOX_SLACK = 1e-9

WINDOW_INRADIUS = {
    8: QuadRat(1, 1, 2, 2),  # (1+sqrt2)/2
    12: QuadRat(2, 1, 2, 3),  # (2+sqrt3)/2
}


class Location(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class HalfPlane:
    """The closed set {w : normal . w <= offset}."""

    __slots__ = ("normal", "offset")

    def __init__(self, normal: PlanePoint, offset: QuadRat):
        if not normal.x and not normal.y:
            raise ValueError("HalfPlane normal must be nonzero.")
        self.normal = normal
        self.offset = offset

    def value(self, w: PlanePoint) -> QuadRat:
        """normal . w - offset; nonpositive exactly on the half-plane."""
        return self.normal.x * w.x + self.normal.y * w.y - self.offset

    def flipped(self) -> "HalfPlane":
        """Closure of the complement."""
        return HalfPlane(-self.normal, -self.offset)

    def translated(self, t: PlanePoint) -> "HalfPlane":
        return HalfPlane(self.normal, self.offset + self.normal.dot(t))

    def __repr__(self) -> str:
        return f"HalfPlane({self.normal!r} . w <= {self.offset})"


class ConvexPolygon:
    """Counter-clockwise, strictly convex vertex list; no vertices means empty.

    :param vertices: the vertices in counter-clockwise order.
    :param d: discriminant of the coordinates; required only for an empty polygon.
    """

    __slots__ = ("vertices", "d", "_halfplanes", "_bbox")

    def __init__(self, vertices: Sequence[PlanePoint] = (), d: Optional[int] = None):
        vertices = tuple(vertices)
        if vertices:
            d = vertices[0].d
            if any(v.d != d for v in vertices):
                raise FieldMismatchError("Polygon vertices must share one field.")
        elif d is None:
            raise ValueError("An empty polygon needs an explicit discriminant.")
        self.vertices = vertices
        self.d = d
        self._halfplanes = None
        self._bbox = None

    @classmethod
    def empty(cls, d: int) -> "ConvexPolygon":
        return cls((), d)

    def __bool__(self) -> bool:
        return len(self.vertices) >= 3

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon({len(self.vertices)} vertices, d={self.d})"

    def validate(self):
        """Raise ValueError unless the polygon is empty or strictly convex and CCW."""
        count = len(self.vertices)
        if count == 0:
            return
        if count < 3:
            raise ValueError("A nonempty polygon needs at least 3 vertices.")
        for i in range(count):
            a, b, c = self.vertices[i - 2], self.vertices[i - 1], self.vertices[i]
            if (b - a).cross(c - b).sign() <= 0:
                raise ValueError(f"Polygon is not strictly convex at vertex {i - 1}.")

    def halfplanes(self) -> Tuple[HalfPlane, ...]:
        """Facet half-planes whose intersection is the polygon."""
        if self._halfplanes is None:
            planes = []
            count = len(self.vertices)
            for i in range(count):
                a, b = self.vertices[i], self.vertices[(i + 1) % count]
                # interior lies left of a->b
                normal = PlanePoint(b.y - a.y, a.x - b.x)
                planes.append(HalfPlane(normal, normal.dot(a)))
            self._halfplanes = tuple(planes)
        return self._halfplanes

    def translate(self, t: PlanePoint) -> "ConvexPolygon":
        moved = ConvexPolygon([v + t for v in self.vertices], self.d)
        if self._halfplanes is not None:
            moved._halfplanes = tuple(h.translated(t) for h in self._halfplanes)
        return moved

    def scaled(self, factor: QuadRat) -> "ConvexPolygon":
        """Homothety about the origin by a positive factor."""
        if factor.sign() <= 0:
            raise ValueError("Scale factor must be positive.")
        return ConvexPolygon([v.scale(factor) for v in self.vertices], self.d)

    def negated(self) -> "ConvexPolygon":
        """Point reflection through the origin (keeps counter-clockwise order)."""
        return ConvexPolygon([-v for v in self.vertices], self.d)

    def canonical_key(self) -> Tuple:
        """Key equal for polygons with the same vertex cycle."""
        if not self:
            return ()
        keys = [v.key() for v in self.vertices]
        start = keys.index(min(keys))
        return tuple(keys[start:] + keys[:start])

    def float_vertices(self) -> List[Tuple[float, float]]:
        return [v.to_floats() for v in self.vertices]

    def float_bbox(self) -> Tuple[float, float, float, float]:
        if self._bbox is None:
            points = self.float_vertices()
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            self._bbox = (min(xs), min(ys), max(xs), max(ys))
        return self._bbox

    def area(self) -> QuadRat:
        return area(self)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "vertices": [[v.x.to_dict(), v.y.to_dict()] for v in self.vertices],
        }

    @classmethod
    def from_dict(cls, entries: dict) -> "ConvexPolygon":
        vertices = [
            PlanePoint(QuadRat.from_dict(x), QuadRat.from_dict(y)) for x, y in entries["vertices"]
        ]
        return cls(vertices, entries["d"])

    def to_svg_path(self, decimals: int = 6) -> str:
        if not self:
            return ""
        commands = []
        for index, (x, y) in enumerate(self.float_vertices()):
            # svg y axis points down
            commands.append(f"{'M' if index == 0 else 'L'}{x:.{decimals}f} {0.0 - y:.{decimals}f}")
        return " ".join(commands) + " Z"


def _bboxes_disjoint(first: ConvexPolygon, second: ConvexPolygon) -> bool:
    ax0, ay0, ax1, ay1 = first.float_bbox()
    bx0, by0, bx1, by1 = second.float_bbox()
    return (
        ax1 < bx0 - _BBOX_SLACK
        or bx1 < ax0 - _BBOX_SLACK
        or ay1 < by0 - _BBOX_SLACK
        or by1 < ay0 - _BBOX_SLACK
    )


def make_window(n: int, shift: Optional[PlanePoint] = None) -> ConvexPolygon:
    """Regular n-gon of edge length 1 with facet normals along the n-th roots of unity.

    :param n: 8 for the octagon in Q(sqrt2), 12 for the dodecagon in Q(sqrt3).
    :param shift: translation of the center; the origin when omitted.
    """
    if n not in WINDOW_INRADIUS:
        raise ValueError(f"Windows exist for n in {sorted(WINDOW_INRADIUS)}, not {n}.")
    inradius = WINDOW_INRADIUS[n]
    units = [CycloInt.xi_power(k, n).embed(Space.PHYSICAL) for k in range(n)]
    d = units[0].d
    if shift is not None and shift.d != d:
        raise FieldMismatchError(f"Window shift must lie in Q(sqrt{d}).")
    # vertex k sits between the facets with normals u_k and u_{k+1}
    factor = inradius / (1 + units[1].x)
    vertices = [(units[k] + units[(k + 1) % n]).scale(factor) for k in range(n)]
    window = ConvexPolygon(vertices, d)
    window._halfplanes = tuple(HalfPlane(u, inradius) for u in units[1:] + units[:1])
    if shift is not None and (shift.x or shift.y):
        window = window.translate(shift)
    return window


def clip(polygon: ConvexPolygon, halfplane: HalfPlane) -> ConvexPolygon:
    """polygon intersected with a closed half-plane; zero-area results are empty."""
    if not polygon:
        return polygon
    values = [halfplane.value(v) for v in polygon.vertices]
    signs = [value.sign() for value in values]
    if all(s <= 0 for s in signs):
        return polygon
    if all(s >= 0 for s in signs):
        return ConvexPolygon.empty(polygon.d)
    output = []
    count = len(values)
    for i in range(count):
        j = (i + 1) % count
        current, sign_current = polygon.vertices[i], signs[i]
        if sign_current <= 0:
            output.append(current)
        if sign_current * signs[j] < 0:
            nxt = polygon.vertices[j]
            t = values[i] / (values[i] - values[j])
            output.append(current + (nxt - current).scale(t))
    if len(output) < 3:
        return ConvexPolygon.empty(polygon.d)
    return ConvexPolygon(output, polygon.d)


def intersect(first: ConvexPolygon, second: ConvexPolygon) -> ConvexPolygon:
    if first.d != second.d:
        raise FieldMismatchError("Cannot intersect polygons from different fields.")
    if not first or not second or _bboxes_disjoint(first, second):
        return ConvexPolygon.empty(first.d)
    result = first
    for halfplane in second.halfplanes():
        result = clip(result, halfplane)
        if not result:
            break
    return result


def area(polygon: ConvexPolygon) -> QuadRat:
    """Shoelace area; 0 for the empty polygon."""
    if not polygon:
        return QuadRat(0, 0, 1, polygon.d)
    origin = polygon.vertices[0]
    total = QuadRat(0, 0, 1, polygon.d)
    for i in range(1, len(polygon.vertices) - 1):
        total = total + (polygon.vertices[i] - origin).cross(polygon.vertices[i + 1] - origin)
    return total / 2


def locate(w: PlanePoint, polygon: ConvexPolygon) -> Location:
    if not polygon:
        return Location.OUTSIDE
    on_boundary = False
    for halfplane in polygon.halfplanes():
        s = halfplane.value(w).sign()
        if s > 0:
            return Location.OUTSIDE
        if s == 0:
            on_boundary = True
    return Location.BOUNDARY if on_boundary else Location.INSIDE


def covers(outer: ConvexPolygon, inner: ConvexPolygon) -> bool:
    """True when inner is a subset of outer (convexity reduces this to the vertices)."""
    if not inner:
        return True
    if not outer:
        return False
    ox0, oy0, ox1, oy1 = outer.float_bbox()
    ix0, iy0, ix1, iy1 = inner.float_bbox()
    if ix0 < ox0 - _BBOX_SLACK or iy0 < oy0 - _BBOX_SLACK or ix1 > ox1 + _BBOX_SLACK or iy1 > oy1 + _BBOX_SLACK:
        return False
    return all(locate(v, outer) is not Location.OUTSIDE for v in inner.vertices)


def subtract(polygon: ConvexPolygon, hole: ConvexPolygon) -> List[ConvexPolygon]:
    """polygon minus hole as a list of convex pieces with disjoint interiors."""
    if not polygon:
        return []
    if not hole or _bboxes_disjoint(polygon, hole):
        return [polygon]
    pieces = []
    rest = polygon
    for halfplane in hole.halfplanes():
        outside = clip(rest, halfplane.flipped())
        if outside:
            pieces.append(outside)
        rest = clip(rest, halfplane)
        if not rest:
            break
    return pieces


def _unique_pieces(pieces: Iterable[ConvexPolygon]) -> List[ConvexPolygon]:
    seen = {}
    for piece in pieces:
        if piece:
            seen.setdefault(piece.canonical_key(), piece)
    return list(seen.values())


def _inclusion_exclusion_area(pieces: List[ConvexPolygon], d: int) -> QuadRat:
    total = QuadRat(0, 0, 1, d)

    def expand(start: int, current: ConvexPolygon, sign: int):
        nonlocal total
        for j in range(start, len(pieces)):
            overlap = intersect(current, pieces[j])
            # every superset of an empty intersection is empty too
            if overlap:
                total = total + area(overlap) * sign
                expand(j + 1, overlap, -sign)

    for i, piece in enumerate(pieces):
        total = total + area(piece)
        expand(i + 1, piece, -1)
    return total


def _disjoint_decomposition_area(pieces: List[ConvexPolygon], d: int) -> QuadRat:
    disjoint: List[ConvexPolygon] = []
    for piece in pieces:
        fragments = [piece]
        for existing in disjoint:
            fragments = [rest for fragment in fragments for rest in subtract(fragment, existing)]
            if not fragments:
                break
        disjoint.extend(fragments)
    total = QuadRat(0, 0, 1, d)
    for fragment in disjoint:
        total = total + area(fragment)
    return total


def union_area(pieces: Sequence[ConvexPolygon], d: Optional[int] = None, method: str = "auto") -> QuadRat:
    """Exact area of a union of convex pieces.

    :param pieces: the pieces, possibly overlapping or repeated.
    :param d: discriminant, needed only when there are no pieces.
    :param method: 'inclusion-exclusion', 'decomposition' or 'auto'.
    """
    if d is None:
        if not pieces:
            raise ValueError("union_area of no pieces needs an explicit discriminant.")
        d = pieces[0].d
    if any(piece.d != d for piece in pieces):
        raise FieldMismatchError("union_area pieces must share one field.")
    unique = _unique_pieces(pieces)
    # largest first, so covered pieces are found against big ones
    unique.sort(key=lambda piece: -float(area(piece)))
    kept = [piece for i, piece in enumerate(unique) if not any(covers(other, piece) for other in unique[:i])]
    if method == "auto":
        method = "inclusion-exclusion" if len(kept) <= INCLUSION_EXCLUSION_LIMIT else "decomposition"
    log.debug(f"union_area of {len(kept)} pieces by {method}")
    if method == "inclusion-exclusion":
        return _inclusion_exclusion_area(kept, d)
    if method == "decomposition":
        return _disjoint_decomposition_area(kept, d)
    raise ValueError(f"Unknown union_area method {method!r}.")


class RegionSet:
    """A union of convex pieces, kept free of duplicates and covered pieces."""

    __slots__ = ("pieces", "d")

    def __init__(self, d: int, pieces: Iterable[ConvexPolygon] = ()):
        self.d = d
        self.pieces: List[ConvexPolygon] = []
        for piece in pieces:
            self.add(piece)

    def __len__(self) -> int:
        return len(self.pieces)

    def __bool__(self) -> bool:
        return bool(self.pieces)

    def covers(self, piece: ConvexPolygon) -> bool:
        return any(covers(existing, piece) for existing in self.pieces)

    def insert(self, piece: ConvexPolygon) -> Optional[List[ConvexPolygon]]:
        """Add a piece unless one piece already covers it.

        :returns: None when the piece was rejected, else the pieces it displaced.
        """
        if not piece or self.covers(piece):
            return None
        kept, displaced = [], []
        for existing in self.pieces:
            (displaced if covers(piece, existing) else kept).append(existing)
        self.pieces = kept + [piece]
        return displaced

    def add(self, piece: ConvexPolygon) -> bool:
        """Add a piece; returns False when it adds no area the set does not have as one piece."""
        return self.insert(piece) is not None

    def area(self, method: str = "auto") -> QuadRat:
        return union_area(self.pieces, self.d, method)
