"""Autocorrelation coefficients, shelling numbers and graph-distance resolved pair frequencies."""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from coordination_core.fields.cyclotomic import Coords, CycloInt, Space
from coordination_core.fields.quadfield import QuadRat
from coordination_core.geometry.polygeom import (
    ConvexPolygon,
    RegionSet,
    area,
    intersect,
    make_window,
    union_area,
)
from coordination_core.tilings.modelset import TilingConfig, as_radius, enumerate_support, in_support

log = logging.getLogger(__name__)


class NoCoexistingPairsError(ValueError):
    """nu(z) = 0: no two vertices of the tiling differ by z."""


@lru_cache(maxsize=None)
def centered_window(n: int) -> ConvexPolygon:
    return make_window(n)


@lru_cache(maxsize=None)
def centered_window_area(n: int) -> QuadRat:
    return area(centered_window(n))


def overlap_frequency(z: CycloInt) -> QuadRat:
    """area(W & (W - z*)) / area(W) for the centered window, without any caching."""
    window = centered_window(z.n)
    overlap = intersect(window, window.translate(-z.embed(Space.INTERNAL)))
    return area(overlap) / centered_window_area(z.n)


@lru_cache(maxsize=1 << 18)
def nu_of_representative(n: int, coords: Coords) -> QuadRat:
    """nu for an orbit representative; the cache is shared by the whole orbit."""
    return overlap_frequency(CycloInt(coords, n))


def nu(cfg: TilingConfig, z: CycloInt) -> QuadRat:
    """Frequency per vertex of vertex pairs (x, x + z): area(W & (W - z*)) / area(W).

    Independent of the window shift.
    """
    if z.n != cfg.n:
        raise ValueError(f"Difference vector from Z[xi_{z.n}] used with an n={cfg.n} tiling.")
    return nu_of_representative(cfg.n, z.orbit_representative().coords)


def nu_batch(n: int, representatives: List[Coords]) -> List[QuadRat]:
    """nu for a shard of orbit representatives (worker entry point)."""
    return [nu_of_representative(n, tuple(coords)) for coords in representatives]


def grid_nu(cfg: TilingConfig, z: CycloInt, resolution: int = 2000, rows_per_chunk: int = 100) -> float:
    """Midpoint-rule estimate of nu(z) on a resolution x resolution grid over the window."""
    window = cfg.window
    facets = [(float(h.normal.x), float(h.normal.y), float(h.offset)) for h in window.halfplanes()]
    normals = np.array([facet[:2] for facet in facets])
    offsets = np.array([facet[2] for facet in facets])
    _, _, zx, zy = z.embed_floats()
    x_low, y_low, x_high, y_high = window.float_bbox()
    xs = x_low + (np.arange(resolution) + 0.5) * (x_high - x_low) / resolution
    ys = y_low + (np.arange(resolution) + 0.5) * (y_high - y_low) / resolution
    in_window = 0
    in_both = 0
    for start in range(0, resolution, rows_per_chunk):
        gx, gy = np.meshgrid(xs, ys[start:start + rows_per_chunk], indexing="xy")
        points = np.stack([gx.ravel(), gy.ravel()], axis=1)
        inside = (points @ normals.T - offsets).max(axis=1) <= 0
        moved = points + np.array([zx, zy])
        inside_moved = (moved @ normals.T - offsets).max(axis=1) <= 0
        in_window += int(inside.sum())
        in_both += int((inside & inside_moved).sum())
    return in_both / in_window


def orbit_groups(points: Iterable[CycloInt]) -> Dict[Coords, List[CycloInt]]:
    """Points grouped by the coordinates of their dihedral orbit representative."""
    groups: Dict[Coords, List[CycloInt]] = {}
    for z in points:
        groups.setdefault(z.orbit_representative().coords, []).append(z)
    return groups


@dataclass
class ShellEntry:
    """One circular shell: all support vectors of one exact squared length."""

    r_sq: QuadRat
    value: QuadRat
    orbit_count: int
    symmetry_orbits: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "r_sq": self.r_sq.to_dict(),
            "value": self.value.to_dict(),
            "value_float": float(self.value),
            "orbit_count": self.orbit_count,
            "symmetry_orbits": self.symmetry_orbits,
        }


def shelling(cfg: TilingConfig, max_norm: QuadRat) -> List[ShellEntry]:
    """Averaged shelling numbers s(r) for every shell with r^2 <= max_norm, ascending.

    :param max_norm: upper bound on the squared shell radius.
    """
    max_norm = as_radius(max_norm, cfg.d)
    radius = math.isqrt(math.ceil(float(max_norm))) + 1
    support = enumerate_support(cfg, radius)
    shells: Dict[QuadRat, List[CycloInt]] = {}
    for z in support:
        if not z:
            continue
        r_sq = z.norm_sq()
        if (r_sq - max_norm).sign() <= 0:
            shells.setdefault(r_sq, []).append(z)
    entries = []
    for r_sq in sorted(shells):
        groups = orbit_groups(shells[r_sq])
        value = QuadRat(0, 0, 1, cfg.d)
        for representative, members in groups.items():
            value = value + nu_of_representative(cfg.n, representative) * len(members)
        entries.append(ShellEntry(r_sq, value, len(shells[r_sq]), len(groups)))
    log.info(f"{cfg.name}: {len(entries)} shells with r^2 <= {max_norm}")
    return entries


@dataclass
class ReachProfile:
    """cumulative[k] is the frequency of pairs (x, x + z) at graph distance <= k."""

    z: CycloInt
    cumulative: List[QuadRat] = field(default_factory=list)

    @property
    def k_max(self) -> int:
        return len(self.cumulative) - 1

    def at_distance(self, k: int) -> QuadRat:
        """Frequency of pairs at graph distance exactly k."""
        if k == 0:
            return self.cumulative[0]
        return self.cumulative[k] - self.cumulative[k - 1]

    def is_monotone(self) -> bool:
        return all((b - a).sign() >= 0 for a, b in zip(self.cumulative, self.cumulative[1:]))

    def first_full(self, total: QuadRat) -> Optional[int]:
        """Smallest k with F_k = total, or None within k_max."""
        for k, value in enumerate(self.cumulative):
            if value == total:
                return k
        return None


class ReachExplorer:
    """Dynamic program over edge paths from the origin.

    A path with partial sums p_1, ..., p_t reaches p_t from exactly the
    vertices x whose window coordinate lies in W & (W - p_1*) & ... & (W - p_t*).
    States at one endpoint keep a list of such convex pieces. A new piece is
    dropped when a piece reached at the same endpoint no later covers it,
    since every extension of it is covered as well.

    :param cfg: the tiling.
    :param k_max: longest path length explored.
    :param target: when given, endpoints that cannot reach it in the remaining
        steps are pruned.
    """

    def __init__(self, cfg: TilingConfig, k_max: int, target: Optional[CycloInt] = None):
        if k_max < 1:
            raise ValueError(f"k_max must be at least 1, got {k_max}.")
        self.log = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.cfg = cfg
        self.k_max = k_max
        self.target = target
        self.window = centered_window(cfg.n)
        self.known: Dict[Coords, RegionSet] = {}
        self.arrivals: Dict[Coords, List[Tuple[int, ConvexPolygon]]] = {}
        self._translated: Dict[Coords, Optional[ConvexPolygon]] = {}
        self._explored = False

    def _translated_window(self, q: Coords) -> Optional[ConvexPolygon]:
        if q not in self._translated:
            z = CycloInt(q, self.cfg.n)
            self._translated[q] = (
                self.window.translate(-z.embed(Space.INTERNAL)) if in_support(self.cfg, z) else None
            )
        return self._translated[q]

    def _too_far(self, q: Coords, remaining: int) -> bool:
        if self.target is None:
            return False
        x, y, _, _ = (self.target - CycloInt(q, self.cfg.n)).embed_floats()
        return math.hypot(x, y) > remaining * self.cfg.edge_length + 1e-9

    def _offer(self, q: Coords, piece: ConvexPolygon, step: int, frontier: Dict[Coords, List[ConvexPolygon]]):
        displaced = self.known.setdefault(q, RegionSet(self.cfg.d)).insert(piece)
        if displaced is None:
            return
        if displaced:
            covered_ids = {id(old) for old in displaced}
            if q in frontier:
                frontier[q] = [old for old in frontier[q] if id(old) not in covered_ids]
            self.arrivals[q] = [
                (when, old) for when, old in self.arrivals[q] if when < step or id(old) not in covered_ids
            ]
        frontier.setdefault(q, []).append(piece)
        self.arrivals.setdefault(q, []).append((step, piece))

    def explore(self) -> "ReachExplorer":
        if self._explored:
            return self
        origin = (0, 0, 0, 0)
        self.known[origin] = RegionSet(self.cfg.d, [self.window])
        self.arrivals[origin] = [(0, self.window)]
        frontier = {origin: [self.window]}
        for step in range(1, self.k_max + 1):
            following: Dict[Coords, List[ConvexPolygon]] = {}
            for p, pieces in frontier.items():
                base = CycloInt(p, self.cfg.n)
                for edge in self.cfg.edge_vectors:
                    q = (base + edge).coords
                    if self._too_far(q, self.k_max - step):
                        continue
                    translated = self._translated_window(q)
                    if translated is None:
                        continue
                    for piece in pieces:
                        overlap = intersect(piece, translated)
                        if overlap:
                            self._offer(q, overlap, step, following)
            frontier = {q: pieces for q, pieces in following.items() if pieces}
            self.log.debug(
                f"step {step}: {len(frontier)} endpoints, "
                f"{sum(len(pieces) for pieces in frontier.values())} pieces"
            )
        self._explored = True
        return self

    def endpoints(self) -> List[Coords]:
        return sorted(self.arrivals)

    def arrivals_at(self, z: CycloInt) -> List[Tuple[int, ConvexPolygon]]:
        self.explore()
        return list(self.arrivals.get(z.coords, []))

    def profile(self, z: CycloInt) -> ReachProfile:
        return ReachProfile(z, cumulative_frequencies(self.cfg.n, self.k_max, self.arrivals_at(z)))


def cumulative_frequencies(n: int, k_max: int, arrivals: List[Tuple[int, ConvexPolygon]]) -> List[QuadRat]:
    """F_0, ..., F_kmax from the pieces reaching one endpoint, tagged with their step."""
    whole = centered_window_area(n)
    current = QuadRat(0, 0, 1, whole.d)
    cumulative = []
    for k in range(k_max + 1):
        if any(when == k for when, _ in arrivals):
            pieces = [piece for when, piece in arrivals if when <= k]
            current = union_area(pieces, whole.d) / whole
        cumulative.append(current)
    return cumulative


def reach(cfg: TilingConfig, z: CycloInt, k_max: int) -> ReachProfile:
    """Cumulative frequencies F_0(z), ..., F_kmax(z) of pairs joined by edge paths.

    :raises NoCoexistingPairsError: nu(z) = 0.
    """
    if not in_support(cfg, z):
        raise NoCoexistingPairsError(f"nu({z}) = 0 on the {cfg.name} tiling; no pairs to connect.")
    return ReachExplorer(cfg, k_max, target=z).explore().profile(z)


def profiles_batch(n: int, k_max: int, shard: List[List[Tuple[int, ConvexPolygon]]]) -> List[List[QuadRat]]:
    """cumulative_frequencies for a shard of endpoints (worker entry point)."""
    return [cumulative_frequencies(n, k_max, arrivals) for arrivals in shard]
