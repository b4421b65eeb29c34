"""Model sets {x in Z[xi_n] : x* in window + shift} and the support of their autocorrelation."""

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from coordination_core.fields.cyclotomic import (
    CycloInt,
    PlanePoint,
    Space,
    float_embedding_matrix,
    get_ring,
)
from coordination_core.fields.quadfield import QuadRat
from coordination_core.geometry.polygeom import ConvexPolygon, Location, area, locate, make_window

log = logging.getLogger(__name__)

TILING_NAMES = ("ammann-beenker", "shield")
DEFAULT_SHIFT = (Fraction(1, 7), Fraction(1, 13))
# covolume of the Minkowski lattice {(x, x*)}: sqrt|disc| / 4
LATTICE_COVOLUME = {8: 4, 12: 3}
FLOAT_TOLERANCE = 1e-9
SEED_BOX = 2

Radius = Union[QuadRat, int, Fraction]
ShiftSpec = Sequence[Union[Fraction, int, str]]


class BoundaryHit(RuntimeError):
    """A lattice point projects onto the window boundary; the model set is not generic."""

    def __init__(self, z: CycloInt):
        super().__init__(
            f"Internal image of z = ({z}) lies on the window boundary. "
            f"Choose another window shift."
        )
        self.z = z


class SeedNotFoundError(RuntimeError):
    """No vertex near the origin to start the patch growth from."""


class SupportEnumerationError(RuntimeError):
    """Growth of the autocorrelation support disagrees with the lattice box oracle."""


def _rational_point(shift: ShiftSpec, d: int) -> PlanePoint:
    if len(shift) != 2:
        raise ValueError(f"A shift has two coordinates, got {shift!r}.")
    x, y = (Fraction(value) for value in shift)
    return PlanePoint.rational(x, y, d)


def as_radius(radius: Radius, d: int) -> QuadRat:
    if not isinstance(radius, QuadRat):
        radius = QuadRat.from_fraction(radius, d)
    if radius.sign() <= 0:
        raise ValueError(f"Radius must be positive, got {radius}.")
    return radius


def polygon_circumradius(polygon: ConvexPolygon) -> float:
    return max(math.hypot(x, y) for x, y in polygon.float_vertices())


@lru_cache(maxsize=None)
def box_constant(n: int) -> float:
    """Max row sum of the inverse float embedding: bounds |a_j| by c * max(|x|, |x*|)."""
    inverse = np.linalg.inv(float_embedding_matrix(n))
    return float(np.abs(inverse).sum(axis=1).max())


def box_bound(n: int, radius: float, internal_radius: float) -> int:
    return math.ceil(box_constant(n) * (radius + internal_radius))


class LatticeFilter:
    """Exact test of z* against a polygon, optionally also |z|^2 <= radius^2.

    Floating point decides every point farther than FLOAT_TOLERANCE from the
    polygon boundary and the circle; the rest are decided exactly.

    :param n: ring of the tested points.
    :param polygon: internal-space polygon z* must lie strictly inside.
    :param radius: physical radius bound; unbounded when None.
    :param on_boundary: 'raise' turns z* on the polygon boundary into
        BoundaryHit, 'exclude' drops such points.
    """

    def __init__(
        self,
        n: int,
        polygon: ConvexPolygon,
        radius: Optional[QuadRat] = None,
        on_boundary: str = "raise",
    ):
        if on_boundary not in ("raise", "exclude"):
            raise ValueError(f"on_boundary must be 'raise' or 'exclude', not {on_boundary!r}.")
        self.n = n
        self.polygon = polygon
        self.radius = radius
        self.on_boundary = on_boundary
        self.matrix = float_embedding_matrix(n)
        facets = []
        for halfplane in polygon.halfplanes():
            nx, ny = float(halfplane.normal.x), float(halfplane.normal.y)
            length = math.hypot(nx, ny)
            facets.append((nx / length, ny / length, float(halfplane.offset) / length))
        self._facets = facets
        self.normals = np.array([(nx, ny) for nx, ny, _ in facets])
        self.offsets = np.array([offset for _, _, offset in facets])
        if radius is None:
            self.radius_sq = None
            self._radius_sq = math.inf
            self._norm_tolerance = 0.0
        else:
            self.radius_sq = radius * radius
            self._radius_sq = float(self.radius_sq)
            self._norm_tolerance = FLOAT_TOLERANCE * max(1.0, self._radius_sq)

    def with_radius(self, radius: Optional[QuadRat]) -> "LatticeFilter":
        return LatticeFilter(self.n, self.polygon, radius, self.on_boundary)

    def exact(self, z: CycloInt) -> bool:
        if self.radius_sq is not None and (z.norm_sq() - self.radius_sq).sign() > 0:
            return False
        location = locate(z.embed(Space.INTERNAL), self.polygon)
        if location is Location.BOUNDARY:
            if self.on_boundary == "raise":
                raise BoundaryHit(z)
            return False
        return location is Location.INSIDE

    def test(self, z: CycloInt) -> bool:
        x, y, xs, ys = z.embed_floats()
        near_circle = False
        if self.radius_sq is not None:
            norm = x * x + y * y
            if norm > self._radius_sq + self._norm_tolerance:
                return False
            near_circle = norm >= self._radius_sq - self._norm_tolerance
        worst = max(nx * xs + ny * ys - offset for nx, ny, offset in self._facets)
        if worst > FLOAT_TOLERANCE:
            return False
        if worst < -FLOAT_TOLERANCE and not near_circle:
            return True
        return self.exact(z)

    def select(self, coords: np.ndarray) -> np.ndarray:
        """Rows of an (N, 4) coordinate array that pass the test."""
        if not len(coords):
            return coords
        floats = coords @ self.matrix.T
        worst = (floats[:, 2:4] @ self.normals.T - self.offsets).max(axis=1)
        rejected = worst > FLOAT_TOLERANCE
        unsure = ~rejected & (worst >= -FLOAT_TOLERANCE)
        if self.radius_sq is not None:
            norm = floats[:, 0] ** 2 + floats[:, 1] ** 2
            rejected |= norm > self._radius_sq + self._norm_tolerance
            unsure |= norm >= self._radius_sq - self._norm_tolerance
            unsure &= ~rejected
        keep = ~rejected & ~unsure
        for index in np.flatnonzero(unsure):
            keep[index] = self.exact(CycloInt(coords[index].tolist(), self.n))
        return coords[keep]


@dataclass(frozen=True)
class TilingConfig:
    """Everything that pins down one tiling.

    :param name: 'ammann-beenker' or 'shield'.
    :param n: 8 or 12.
    :param window: centered regular n-gon of edge length 1.
    :param shift: internal-space translation of the window, rational coordinates.
    :param edge_vectors: differences between adjacent vertices.
    """

    name: str
    n: int
    window: ConvexPolygon
    shift: PlanePoint
    edge_vectors: Tuple[CycloInt, ...]

    def __post_init__(self):
        if self.shift.d != get_ring(self.n).d:
            raise ValueError(f"Shift must lie in Q(sqrt{get_ring(self.n).d}) for n={self.n}.")
        if not (self.shift.x.is_rational and self.shift.y.is_rational):
            raise ValueError("The window shift must have rational coordinates.")

    @classmethod
    def ammann_beenker(cls, shift: ShiftSpec = DEFAULT_SHIFT) -> "TilingConfig":
        edges = tuple(CycloInt.xi_power(j, 8) for j in range(8))
        return cls("ammann-beenker", 8, make_window(8), _rational_point(shift, 2), edges)

    @classmethod
    def shield(cls, shift: ShiftSpec = DEFAULT_SHIFT) -> "TilingConfig":
        base = CycloInt((1, -1, 0, 0), 12)
        edges = tuple(base.rotate(j) for j in range(12))
        return cls("shield", 12, make_window(12), _rational_point(shift, 3), edges)

    @classmethod
    def from_name(cls, name: str, shift: Optional[ShiftSpec] = None) -> "TilingConfig":
        if name not in TILING_NAMES:
            raise ValueError(f"Unknown tiling {name!r}; expected one of {TILING_NAMES}.")
        factory = cls.ammann_beenker if name == "ammann-beenker" else cls.shield
        return factory() if shift is None else factory(shift)

    @property
    def d(self) -> int:
        return get_ring(self.n).d

    @cached_property
    def shifted_window(self) -> ConvexPolygon:
        return self.window.translate(self.shift)

    @cached_property
    def support_window(self) -> ConvexPolygon:
        """Omega - Omega, which is 2 Omega for a centrally symmetric window."""
        return self.window.scaled(QuadRat(2, 0, 1, self.d))

    @cached_property
    def window_area(self) -> QuadRat:
        return area(self.window)

    @cached_property
    def edge_norm_sq(self) -> QuadRat:
        return self.edge_vectors[0].norm_sq()

    @cached_property
    def edge_length(self) -> float:
        return math.sqrt(float(self.edge_norm_sq))

    @cached_property
    def density(self) -> QuadRat:
        """Vertices per unit area of the physical plane."""
        return self.window_area / LATTICE_COVOLUME[self.n]

    @cached_property
    def window_filter(self) -> LatticeFilter:
        return LatticeFilter(self.n, self.shifted_window, on_boundary="raise")

    @cached_property
    def support_filter(self) -> LatticeFilter:
        return LatticeFilter(self.n, self.support_window, on_boundary="exclude")

    def describe(self) -> Dict[str, object]:
        return {
            "tiling": self.name,
            "n": self.n,
            "shift": [str(self.shift.x), str(self.shift.y)],
            "edge_norm_sq": str(self.edge_norm_sq),
        }


def contains(cfg: TilingConfig, x: CycloInt) -> bool:
    """True iff x* lies strictly inside the shifted window.

    :raises BoundaryHit: x* lies on the window boundary.
    """
    if x.n != cfg.n:
        raise ValueError(f"Vertex from Z[xi_{x.n}] tested against an n={cfg.n} tiling.")
    return cfg.window_filter.test(x)


def in_support(cfg: TilingConfig, z: CycloInt) -> bool:
    """True iff z* lies strictly inside the doubled window, i.e. nu(z) > 0."""
    return cfg.support_filter.test(z)


@dataclass
class Patch:
    """Vertices of a tiling within a disk and the edges between them."""

    config: TilingConfig
    radius: QuadRat
    vertices: List[CycloInt]
    adjacency: List[List[int]]

    @cached_property
    def index(self) -> Dict[CycloInt, int]:
        return {vertex: i for i, vertex in enumerate(self.vertices)}

    @cached_property
    def positions(self) -> np.ndarray:
        """Physical float coordinates, shape (N, 2)."""
        if not self.vertices:
            return np.zeros((0, 2))
        coords = np.array([vertex.coords for vertex in self.vertices], dtype=np.int64)
        return coords @ float_embedding_matrix(self.config.n)[:2].T

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, neighbors in enumerate(self.adjacency) for j in neighbors if i < j]

    def degrees(self) -> List[int]:
        return [len(neighbors) for neighbors in self.adjacency]

    def min_distance_sq(self) -> Optional[QuadRat]:
        """Smallest exact squared distance between two vertices."""
        if len(self.vertices) < 2:
            return None
        positions = self.positions
        order = np.argsort(positions[:, 0], kind="stable")
        best_float = math.inf
        candidates = []
        for rank, i in enumerate(order):
            for j in order[rank + 1:]:
                dx = positions[j, 0] - positions[i, 0]
                if dx * dx > best_float + FLOAT_TOLERANCE:
                    break
                dist = dx * dx + (positions[j, 1] - positions[i, 1]) ** 2
                if dist <= best_float + FLOAT_TOLERANCE:
                    best_float = min(best_float, dist)
                    candidates.append((dist, i, j))
        closest = [
            (self.vertices[i] - self.vertices[j]).norm_sq()
            for dist, i, j in candidates
            if dist <= best_float + FLOAT_TOLERANCE
        ]
        return min(closest)

    def statistics(self) -> Dict[str, float]:
        degrees = self.degrees()
        vertex_count = len(self.vertices)
        radius = float(self.radius)
        return {
            "vertices": vertex_count,
            "edges": len(self.edges()),
            "mean_degree": sum(degrees) / vertex_count if vertex_count else 0.0,
            "min_degree": min(degrees, default=0),
            "max_degree": max(degrees, default=0),
            "density": vertex_count / (math.pi * radius * radius),
            "expected_density": float(self.config.density),
        }

    def to_dict(self) -> Dict[str, object]:
        return {
            **self.config.describe(),
            "radius": self.radius.to_dict(),
            "vertices": [list(vertex.coords) for vertex in self.vertices],
            "edges": [list(edge) for edge in self.edges()],
        }


def _find_seed(cfg: TilingConfig, reach: float) -> CycloInt:
    candidates = [CycloInt(coords, cfg.n) for coords in product(range(-SEED_BOX, SEED_BOX + 1), repeat=4)]
    candidates.sort(key=lambda z: (float(z.norm_sq()), z.coords))
    for z in candidates:
        x, y, _, _ = z.embed_floats()
        if math.hypot(x, y) > reach:
            break
        if contains(cfg, z):
            return z
    raise SeedNotFoundError(f"No {cfg.name} vertex within distance {reach:.3f} of the origin.")


def _grow(start: CycloInt, steps: Sequence[CycloInt], accept, reach_sq: float) -> List[CycloInt]:
    """Breadth-first growth over accepted points within a float disk."""
    matrix = float_embedding_matrix(start.n)
    seen = {start}
    found = [start]
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for step in steps:
            candidate = current + step
            if candidate in seen:
                continue
            seen.add(candidate)
            a0, a1, a2, a3 = candidate.coords
            x = matrix[0, 0] * a0 + matrix[0, 1] * a1 + matrix[0, 2] * a2 + matrix[0, 3] * a3
            y = matrix[1, 0] * a0 + matrix[1, 1] * a1 + matrix[1, 2] * a2 + matrix[1, 3] * a3
            if x * x + y * y > reach_sq:
                continue
            if accept(candidate):
                found.append(candidate)
                queue.append(candidate)
    return found


def _within(points: Sequence[CycloInt], radius: QuadRat) -> List[CycloInt]:
    radius_sq = radius * radius
    limit = float(radius_sq)
    tolerance = FLOAT_TOLERANCE * max(1.0, limit)
    kept = []
    for z in points:
        x, y, _, _ = z.embed_floats()
        norm = x * x + y * y
        if norm < limit - tolerance or (norm <= limit + tolerance and (z.norm_sq() - radius_sq).sign() <= 0):
            kept.append(z)
    return sorted(kept, key=lambda z: z.coords)


def enumerate_patch(cfg: TilingConfig, radius: Radius, margin_edges: float = 3) -> Patch:
    """All vertices with |x| <= radius, grown breadth-first from a vertex near the origin.

    :param margin_edges: the growth disk exceeds radius by this many edge lengths.
    :raises BoundaryHit: a visited lattice point projects onto the window boundary.
    :raises SeedNotFoundError: no vertex near the origin.
    """
    radius = as_radius(radius, cfg.d)
    reach = float(radius) + margin_edges * cfg.edge_length
    seed = _find_seed(cfg, reach)
    grown = _grow(seed, cfg.edge_vectors, lambda z: contains(cfg, z), reach * reach)
    vertices = _within(grown, radius)
    index = {vertex: i for i, vertex in enumerate(vertices)}
    adjacency = []
    for vertex in vertices:
        neighbors = [index[vertex + edge] for edge in cfg.edge_vectors if vertex + edge in index]
        adjacency.append(sorted(neighbors))
    log.info(f"{cfg.name} patch of radius {radius}: {len(vertices)} vertices, grown from {len(grown)}")
    return Patch(cfg, radius, vertices, adjacency)


def _box_blocks(bound: int) -> Iterator[np.ndarray]:
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    rest = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    for first in axis:
        block = np.empty((len(rest), 4), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        yield block


def box_oracle(lattice_filter: LatticeFilter) -> List[CycloInt]:
    """Brute force over the coordinate box that provably holds every accepted point."""
    if lattice_filter.radius is None:
        raise ValueError("The box oracle needs a radius bound.")
    bound = box_bound(
        lattice_filter.n, float(lattice_filter.radius), polygon_circumradius(lattice_filter.polygon)
    )
    points = []
    for block in _box_blocks(bound):
        points.extend(CycloInt(row, lattice_filter.n) for row in lattice_filter.select(block).tolist())
    return sorted(points, key=lambda z: z.coords)


def scan_lattice(lattice_filter: LatticeFilter) -> Iterator[np.ndarray]:
    """Stream every accepted point as (M, 4) coordinate blocks.

    Loops over one outer coordinate; the second outer coordinate is
    vectorised and the two inner coordinates, which move z* along the axes
    with unit steps, only range over the polygon's bounding box.
    """
    if lattice_filter.radius is None:
        raise ValueError("A lattice scan needs a radius bound.")
    n = lattice_filter.n
    ring = get_ring(n)
    (i0, i1), (o0, o1) = ring.inner, ring.outer
    internal = lattice_filter.matrix[2:4]
    s0, s1 = internal[0, i0], internal[1, i1]
    x_low, y_low, x_high, y_high = lattice_filter.polygon.float_bbox()
    bound = box_bound(n, float(lattice_filter.radius), polygon_circumradius(lattice_filter.polygon))
    outer = np.arange(-bound, bound + 1, dtype=np.int64)
    width0 = int(math.ceil((x_high - x_low) / abs(s0))) + 2
    width1 = int(math.ceil((y_high - y_low) / abs(s1))) + 2
    steps0, steps1 = np.meshgrid(np.arange(width0), np.arange(width1), indexing="ij")
    steps0, steps1 = steps0.ravel(), steps1.ravel()
    for first in outer:
        ox = internal[0, o0] * first + internal[0, o1] * outer
        oy = internal[1, o0] * first + internal[1, o1] * outer
        # s0 * a_i0 + ox must fall inside [x_low, x_high], likewise for a_i1
        low0 = np.ceil(np.minimum((x_low - ox) / s0, (x_high - ox) / s0) - FLOAT_TOLERANCE)
        low1 = np.ceil(np.minimum((y_low - oy) / s1, (y_high - oy) / s1) - FLOAT_TOLERANCE)
        block = np.empty((len(outer) * len(steps0), 4), dtype=np.int64)
        block[:, o0] = first
        block[:, o1] = np.repeat(outer, len(steps0))
        block[:, i0] = (low0.astype(np.int64)[:, None] + steps0[None, :]).ravel()
        block[:, i1] = (low1.astype(np.int64)[:, None] + steps1[None, :]).ravel()
        selected = lattice_filter.select(block)
        if len(selected):
            yield selected


def scan_points(lattice_filter: LatticeFilter) -> List[CycloInt]:
    points = [
        CycloInt(row, lattice_filter.n) for block in scan_lattice(lattice_filter) for row in block.tolist()
    ]
    return sorted(points, key=lambda z: z.coords)


def enumerate_support(
    cfg: TilingConfig,
    radius: Radius,
    validation_edges: float = 4,
    steps: Optional[Sequence[CycloInt]] = None,
) -> List[CycloInt]:
    """All z with |z| <= radius and z* strictly inside 2 Omega, sorted by coordinates.

    Grown breadth-first from 0 over edge-vector steps inside the doubled window;
    the result is checked against the box oracle within validation_edges edge
    lengths. On a mismatch the step set is widened once by every support vector
    of norm_sq <= 4.

    :raises SupportEnumerationError: growth still misses points after widening.
    """
    radius = as_radius(radius, cfg.d)
    zero = CycloInt.zero(cfg.n)
    validation_radius = min(float(radius), validation_edges * cfg.edge_length)
    check_radius = QuadRat.from_fraction(Fraction(validation_radius).limit_denominator(1000), cfg.d)
    oracle = box_oracle(cfg.support_filter.with_radius(check_radius))
    reach = float(radius) + max(3 * cfg.edge_length, polygon_circumradius(cfg.support_window))
    step_set = list(steps) if steps is not None else list(cfg.edge_vectors)
    for attempt in range(2):
        grown = _grow(zero, step_set, lambda z: in_support(cfg, z), reach * reach)
        if _within(grown, check_radius) == oracle:
            support = _within(grown, radius)
            log.info(f"{cfg.name} support of radius {radius}: {len(support)} difference vectors")
            return support
        if attempt == 0:
            log.warning(
                f"{cfg.name} support growth missed lattice points within {validation_radius:.3f}; "
                f"widening the step set"
            )
            four = QuadRat(4, 0, 1, cfg.d)
            step_set = list(cfg.edge_vectors) + [
                z for z in box_oracle(cfg.support_filter.with_radius(QuadRat(2, 0, 1, cfg.d)))
                if z and (z.norm_sq() - four).sign() <= 0
            ]
    raise SupportEnumerationError(
        f"{cfg.name} support growth disagrees with the box oracle within {validation_radius:.3f} "
        f"even with the widened step set."
    )
