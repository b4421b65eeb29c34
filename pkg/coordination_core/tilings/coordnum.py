"""Averaged coordination numbers s_c(k) by three independent methods."""

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from coordination_core.fields.cyclotomic import Coords, CycloInt, decode_key, orbit_keys
from coordination_core.fields.quadfield import QuadRat
from coordination_core.processes.shard_worker import map_shards
from coordination_core.tilings.frequencies import (
    ReachExplorer,
    ReachProfile,
    nu_batch,
    orbit_groups,
    profiles_batch,
)
from coordination_core.tilings.modelset import (
    LatticeFilter,
    Patch,
    TilingConfig,
    enumerate_support,
    scan_lattice,
)

log = logging.getLogger(__name__)
results_log = logging.getLogger(f"{__name__}.results")

METHODS = ("l1", "regions", "bfs")
# Reach-region runs beyond these path lengths are slow, not wrong.
REGIONS_SCOPE = {"ammann-beenker": 6, "shield": 4}

Profiles = Tuple[Dict[Coords, List[CycloInt]], Dict[Coords, ReachProfile]]


class NoEligibleCentersError(RuntimeError):
    """No patch vertex is far enough from the patch boundary to act as a BFS center."""


@dataclass
class CoordEntry:
    """s_c(k) with its split over circular shells, ascending in r_sq."""

    k: int
    s_c: QuadRat
    contributions: List[Tuple[QuadRat, QuadRat]] = field(default_factory=list)
    method: str = "l1"

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            **{key: value for key, value in self.s_c.to_dict().items() if key != "d"},
            "d": self.s_c.d,
            "float": float(self.s_c),
            "decimal": self.s_c.to_decimal(3),
            "method": self.method,
            "contributions": [
                {"r_sq": r_sq.to_dict(), "part": part.to_dict()} for r_sq, part in self.contributions
            ],
        }


def _entries(
    parts: Dict[int, Dict[QuadRat, QuadRat]], k_max: int, d: int, method: str
) -> List[CoordEntry]:
    entries = []
    for k in range(1, k_max + 1):
        shells = parts.get(k, {})
        total = QuadRat(0, 0, 1, d)
        contributions = []
        for r_sq in sorted(shells):
            if shells[r_sq]:
                contributions.append((r_sq, shells[r_sq]))
                total = total + shells[r_sq]
        entries.append(CoordEntry(k, total, contributions, method))
        results_log.info(
            f"s_c({k}) = {total} ~ {total.to_decimal(3)} [{method}]",
            extra={"tags": ["results"], "k": k, "s_c": total.to_dict(), "method": method},
        )
    return entries


def _add(parts: Dict[int, Dict[QuadRat, QuadRat]], k: int, r_sq: QuadRat, value: QuadRat):
    shells = parts.setdefault(k, {})
    shells[r_sq] = shells[r_sq] + value if r_sq in shells else value


def coordination_l1(k_max: int, workers: int = 1, cfg: Optional[TilingConfig] = None) -> List[CoordEntry]:
    """Ammann-Beenker s_c(k) for k <= k_max: sum of nu(z) over support z with l1_norm(z) = k.

    The four edge directions are a Z-basis, so every path from 0 to z has at
    least l1_norm(z) steps, and the tiling always offers one with exactly that
    many. The support is streamed from a lattice scan and reduced to orbit
    counts, so only one nu per orbit is ever computed.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}.")
    cfg = cfg or TilingConfig.ammann_beenker()
    if cfg.n != 8:
        raise ValueError("The L1 method only applies to the Ammann-Beenker tiling.")
    support = LatticeFilter(8, cfg.support_window, QuadRat(k_max, 0, 1, 2), on_boundary="exclude")
    orbit_sizes: Counter = Counter()
    for block in scan_lattice(support):
        steps = np.abs(block).sum(axis=1)
        block = block[(steps >= 1) & (steps <= k_max)]
        keys, counts = np.unique(orbit_keys(block, 8), return_counts=True)
        orbit_sizes.update(dict(zip(keys.tolist(), counts.tolist())))
    representatives = [decode_key(key) for key in sorted(orbit_sizes)]
    log.info(f"L1 method to k={k_max}: {sum(orbit_sizes.values())} vectors in {len(representatives)} orbits")
    values = map_shards(nu_batch, (8,), representatives, workers)
    parts: Dict[int, Dict[QuadRat, QuadRat]] = {}
    for key, coords, value in zip(sorted(orbit_sizes), representatives, values):
        z = CycloInt(coords, 8)
        _add(parts, z.l1_norm(), z.norm_sq(), value * orbit_sizes[key])
    return _entries(parts, k_max, 2, "l1")


def regions_profiles(cfg: TilingConfig, k_max: int, workers: int = 1) -> Profiles:
    """Reach profiles of every orbit reachable within k_max steps, with the orbit members."""
    explorer = ReachExplorer(cfg, k_max).explore()
    endpoints = [CycloInt(coords, cfg.n) for coords in explorer.endpoints() if any(coords)]
    groups = orbit_groups(endpoints)
    representatives = sorted(groups)
    log.info(f"{cfg.name} reach regions to k={k_max}: {len(endpoints)} endpoints in {len(groups)} orbits")
    shard_input = [explorer.arrivals_at(CycloInt(coords, cfg.n)) for coords in representatives]
    cumulative = map_shards(profiles_batch, (cfg.n, k_max), shard_input, workers)
    profiles = {
        coords: ReachProfile(CycloInt(coords, cfg.n), values)
        for coords, values in zip(representatives, cumulative)
    }
    return groups, profiles


def coordination_regions(
    cfg: TilingConfig, k_max: int, workers: int = 1, profiles: Optional[Profiles] = None
) -> List[CoordEntry]:
    """s_c(k) = sum over z of F_k(z) - F_{k-1}(z), from exact reach regions.

    :param profiles: output of regions_profiles for the same k_max, to reuse a run.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}.")
    if k_max > REGIONS_SCOPE[cfg.name]:
        log.warning(f"Reach regions beyond k={REGIONS_SCOPE[cfg.name]} on {cfg.name} grow quickly.")
    groups, profiles = profiles or regions_profiles(cfg, k_max, workers)
    parts: Dict[int, Dict[QuadRat, QuadRat]] = {}
    for coords, profile in profiles.items():
        size = len(groups[coords])
        r_sq = profile.z.norm_sq()
        for k in range(1, k_max + 1):
            part = profile.at_distance(k)
            if part:
                _add(parts, k, r_sq, part * size)
    return _entries(parts, k_max, cfg.d, "regions")


def bfs_batch(adjacency: List[List[int]], k_max: int, centers: List[int]) -> List[List[int]]:
    """Vertex counts at graph distance 0..k_max from each center (worker entry point)."""
    counts = []
    for center in centers:
        distance = {center: 0}
        per_k = [0] * (k_max + 1)
        per_k[0] = 1
        queue = deque([center])
        while queue:
            vertex = queue.popleft()
            step = distance[vertex] + 1
            if step > k_max:
                continue
            for neighbor in adjacency[vertex]:
                if neighbor not in distance:
                    distance[neighbor] = step
                    per_k[step] += 1
                    queue.append(neighbor)
        counts.append(per_k)
    return counts


@dataclass
class BfsResult:
    """Empirical mean number of vertices at graph distance k from a center."""

    tiling: str
    radius: QuadRat
    centers: int
    means: List[float]

    @property
    def rows(self) -> List[Tuple[int, float]]:
        return [(k, mean) for k, mean in enumerate(self.means) if k > 0]

    def to_dict(self) -> Dict[str, object]:
        return {
            "tiling": self.tiling,
            "radius": self.radius.to_dict(),
            "centers": self.centers,
            "rows": [{"k": k, "mean": mean} for k, mean in self.rows],
        }


def coordination_bfs(
    patch: Patch, k_max: int, min_margin: Optional[Union[QuadRat, float]] = None, workers: int = 1
) -> BfsResult:
    """Mean coordination counts over every vertex deep enough inside the patch.

    :param min_margin: extra distance to the patch boundary beyond k_max edge
        lengths; 3 edge lengths when omitted.
    :raises NoEligibleCentersError: the patch is too small for k_max.
    """
    cfg = patch.config
    margin = 3 * cfg.edge_length if min_margin is None else float(min_margin)
    reach = k_max * cfg.edge_length + margin
    limit = float(patch.radius) - reach
    distances = np.hypot(patch.positions[:, 0], patch.positions[:, 1])
    centers = np.flatnonzero(distances <= limit).tolist() if limit > 0 else []
    if not centers:
        raise NoEligibleCentersError(
            f"No vertex of the radius {float(patch.radius):.3f} patch lies {reach:.3f} inside its boundary."
        )
    counts = map_shards(bfs_batch, (patch.adjacency, k_max), centers, workers)
    means = (np.array(counts, dtype=np.float64).sum(axis=0) / len(centers)).tolist()
    log.info(f"BFS over {len(centers)} centers of a {cfg.name} patch, k <= {k_max}")
    for k, mean in enumerate(means[1:], start=1):
        results_log.info(
            f"empirical s_c({k}) = {mean:.4f}",
            extra={"tags": ["results"], "k": k, "mean": mean, "centers": len(centers), "method": "bfs"},
        )
    return BfsResult(cfg.name, patch.radius, len(centers), means)


@dataclass
class ShellViolation:
    r_sq: QuadRat
    kind: str
    z: CycloInt
    detail: str
    parts: Dict[int, QuadRat] = field(default_factory=dict)


@dataclass
class SharedShell:
    """A circular shell whose orbits sit at different graph distances."""

    r_sq: QuadRat
    distances: Dict[Coords, int]


@dataclass
class ShellReport:
    tiling: str
    k_max: int
    shells_checked: int
    violations: List[ShellViolation] = field(default_factory=list)
    unresolved: List[QuadRat] = field(default_factory=list)
    shared: List[SharedShell] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {
            "tiling": self.tiling,
            "k_max": self.k_max,
            "shells_checked": self.shells_checked,
            "ok": self.ok,
            "violations": [
                {
                    "r_sq": violation.r_sq.to_dict(),
                    "kind": violation.kind,
                    "z": list(violation.z.coords),
                    "detail": violation.detail,
                    "parts": {str(k): part.to_dict() for k, part in violation.parts.items()},
                }
                for violation in self.violations
            ],
            "unresolved": [r_sq.to_dict() for r_sq in self.unresolved],
            "shared": [
                {
                    "r_sq": shell.r_sq.to_dict(),
                    "orbits": [{"z": list(coords), "k": k} for coords, k in sorted(shell.distances.items())],
                }
                for shell in self.shared
            ],
        }


def verify_complete_shells(
    cfg: TilingConfig, k_max: int, workers: int = 1, profiles: Optional[Profiles] = None
) -> ShellReport:
    """Check that every shelling orbit within reach lies in a single coordination shell.

    On Ammann-Beenker it also checks that l1_norm is constant on each orbit and
    that pairs at difference z are joined after exactly l1_norm(z) steps.
    Violations are report content. An orbit whose pairs are not all joined
    within k_max steps leaves its circular shell unresolved. Circular shells
    holding orbits at different distances are listed as shared, which is not
    a violation.
    """
    groups, profiles = profiles or regions_profiles(cfg, k_max, workers)
    support = enumerate_support(cfg, math.ceil(k_max * cfg.edge_length) + 1)
    shells: Dict[QuadRat, List[CycloInt]] = {}
    for z in support:
        if z and float(z.norm_sq()) <= (k_max * cfg.edge_length) ** 2 + 1e-9:
            shells.setdefault(z.norm_sq(), []).append(z)
    report = ShellReport(cfg.name, k_max, len(shells))
    zero = QuadRat(0, 0, 1, cfg.d)
    for r_sq in sorted(shells):
        members = orbit_groups(shells[r_sq])
        distances: Dict[Coords, int] = {}
        resolved = True
        split = False
        for coords, orbit in sorted(members.items()):
            representative = CycloInt(coords, cfg.n)
            if cfg.n == 8:
                step_counts = sorted({z.l1_norm() for z in orbit})
                if len(step_counts) > 1:
                    report.violations.append(ShellViolation(
                        r_sq, "l1-not-constant", representative,
                        f"l1 norms {step_counts} on one orbit", {},
                    ))
                distances[coords] = step_counts[0]
            profile = profiles.get(coords)
            if profile is None:
                resolved = False
                continue
            parts: Dict[int, QuadRat] = {}
            for k in range(1, k_max + 1):
                part = profile.at_distance(k)
                if part:
                    parts[k] = parts.get(k, zero) + part * len(orbit)
            total = nu_batch(cfg.n, [coords])[0]
            if profile.cumulative[-1] != total:
                resolved = False
            elif cfg.n != 8 and len(parts) == 1:
                distances[coords] = next(iter(parts))
            if len(parts) > 1:
                split = True
                detail = ", ".join(f"k={k}: {part}" for k, part in sorted(parts.items()))
                report.violations.append(ShellViolation(
                    r_sq, "split", representative, f"orbit of {representative} at r^2={r_sq} spans {detail}",
                    dict(sorted(parts.items())),
                ))
            if cfg.n == 8:
                steps = distances[coords]
                if steps <= k_max and (
                    profile.cumulative[steps] != total or (steps > 0 and profile.cumulative[steps - 1])
                ):
                    report.violations.append(ShellViolation(
                        r_sq, "path-length", representative,
                        f"pairs at z are not all joined after exactly {steps} steps", {},
                    ))
        if len(set(distances.values())) > 1:
            report.shared.append(SharedShell(r_sq, distances))
            log.info(f"{cfg.name} shell r^2={r_sq} is shared by orbits at k={sorted(set(distances.values()))}")
        if not resolved and not split:
            report.unresolved.append(r_sq)
    for violation in report.violations:
        log.warning(f"{cfg.name} shell r^2={violation.r_sq}: {violation.kind}: {violation.detail}")
    return report


def delta_series(entries: Sequence[CoordEntry]) -> List[Tuple[int, QuadRat]]:
    """(k, s_c(k+1) - s_c(k)) for consecutive entries."""
    for first, second in zip(entries, entries[1:]):
        if second.k != first.k + 1:
            raise ValueError(f"Entries must be contiguous in k; {first.k} is followed by {second.k}.")
    return [(first.k, second.s_c - first.s_c) for first, second in zip(entries, entries[1:])]
