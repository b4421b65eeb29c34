"""Property suite cross-checking every pipeline against the others and the oracles."""

import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Tuple

from coordination_core.fields.cyclotomic import CycloInt
from coordination_core.fields.quadfield import QuadRat
from coordination_core.reference_values import (
    AMMANN_BEENKER,
    SHIELD,
    ammann_beenker_value,
    shield_contributions,
    shield_value,
)
from coordination_core.tilings.coordnum import (
    CoordEntry,
    Profiles,
    coordination_bfs,
    coordination_l1,
    coordination_regions,
    delta_series,
    regions_profiles,
    verify_complete_shells,
)
from coordination_core.tilings.frequencies import grid_nu, nu, orbit_groups, overlap_frequency
from coordination_core.tilings.modelset import (
    TilingConfig,
    as_radius,
    box_oracle,
    enumerate_patch,
    enumerate_support,
    scan_points,
)


class VerificationError(AssertionError):
    """At least one property of the suite does not hold."""


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


class VerificationSuite:
    """Run every cross-check; report each, raise once at the end.

    :param run_cfg: a RunConfig; its verify_specs and tolerances set the scope.
    :param workers: worker processes for the parallel maps.
    """

    def __init__(self, run_cfg, workers: int = 1):
        self.log = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.results_log = logging.getLogger(f"{__name__}.{self.__class__.__name__}.results")
        self.run_cfg = run_cfg
        self.specs = run_cfg.verify_specs
        self.tolerances = run_cfg.tolerances
        self.workers = workers
        self.shift = run_cfg.shift_fractions
        self.results: List[CheckResult] = []
        self._l1: Optional[List[CoordEntry]] = None
        self._shield: Optional[List[CoordEntry]] = None
        self._profiles: Dict[Tuple[str, int], Profiles] = {}

    def tiling(self, name: str) -> TilingConfig:
        return TilingConfig.from_name(name, self.shift)

    def profiles(self, name: str, k_max: int) -> Profiles:
        """Reach profiles, computed once per tiling and path length."""
        if (name, k_max) not in self._profiles:
            self._profiles[(name, k_max)] = regions_profiles(self.tiling(name), k_max, self.workers)
        return self._profiles[(name, k_max)]

    def _record(self, name: str, passed: bool, detail: str):
        result = CheckResult(name, bool(passed), detail)
        self.results.append(result)
        level = logging.INFO if passed else logging.ERROR
        self.log.log(level, f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        self.results_log.info(f"{name}: {passed}", extra={"tags": ["results"], **asdict(result)})

    def _check(self, name: str, check: Callable[[], str]):
        """A check returns its detail string or raises AssertionError.

        Any other exception also fails the check, and the suite carries on.
        """
        try:
            self._record(name, True, check())
        except AssertionError as error:
            self._record(name, False, str(error))
        except MemoryError:
            raise
        except Exception as error:
            self.log.debug(f"{name} raised", exc_info=True)
            self._record(name, False, f"{type(error).__name__}: {error}")

    @property
    def l1_entries(self) -> List[CoordEntry]:
        if self._l1 is None:
            self._l1 = coordination_l1(self.specs["k_max_l1"], self.workers, self.tiling("ammann-beenker"))
        return self._l1

    @property
    def shield_entries(self) -> List[CoordEntry]:
        if self._shield is None:
            k_max = self.specs["k_max_shield"]
            self._shield = coordination_regions(
                self.tiling("shield"), k_max, self.workers, self.profiles("shield", k_max)
            )
        return self._shield

    def _support_sample(self, cfg: TilingConfig) -> List[CycloInt]:
        """One vector per orbit within grid_radius, closest first."""
        support = enumerate_support(cfg, self.specs["grid_radius"])
        representatives = [CycloInt(coords, cfg.n) for coords in orbit_groups(support)]
        representatives.sort(key=lambda z: (float(z.norm_sq()), z.coords))
        return representatives[: self.specs["grid_samples"]]

    def check_nu_properties(self, cfg: TilingConfig) -> str:
        zero = CycloInt.zero(cfg.n)
        assert overlap_frequency(zero) == 1, "nu(0) != 1"
        sample = self._support_sample(cfg)
        xi = CycloInt.xi_power(1, cfg.n)
        for z in sample:
            value = overlap_frequency(z)
            assert 0 < value.sign() or z == zero, f"nu({z}) = {value} not positive on the support"
            assert (value - 1).sign() <= 0, f"nu({z}) = {value} exceeds 1"
            for image, label in ((-z, "-z"), (xi * z, "xi z"), (z.conjugate(), "conj z")):
                assert overlap_frequency(image) == value, f"nu({label}) != nu(z) for z = {z}"
        return f"{len(sample)} orbits: nu(0)=1, 0<=nu<=1, nu(-z)=nu(xi z)=nu(conj z)=nu(z)"

    def check_grid_oracle(self, cfg: TilingConfig) -> str:
        resolution = self.tolerances["grid_resolution"]
        limit = self.tolerances["grid_absolute"]
        worst = 0.0
        sample = self._support_sample(cfg)
        for z in sample:
            error = abs(float(nu(cfg, z)) - grid_nu(cfg, z, resolution))
            worst = max(worst, error)
            assert error < limit, f"nu({z}) differs from grid integration by {error:.2e}"
        return f"{len(sample)} vectors, worst deviation {worst:.2e} < {limit}"

    def check_patch_oracle(self, cfg: TilingConfig) -> str:
        radius = as_radius(self.specs["oracle_radius"], cfg.d)
        margin = self.run_cfg.patch_margin_edges
        patch = enumerate_patch(cfg, radius, margin)
        brute = box_oracle(cfg.window_filter.with_radius(radius))
        assert patch.vertices == brute, (
            f"growth found {len(patch.vertices)} vertices, the box oracle {len(brute)}"
        )
        doubled = enumerate_patch(cfg, radius, 2 * margin)
        assert doubled.vertices == patch.vertices, "doubling the growth margin changed the patch"
        assert all(
            i in patch.adjacency[j] for i, neighbors in enumerate(patch.adjacency) for j in neighbors
        ), "adjacency is not symmetric"
        closest = patch.min_distance_sq()
        expected = QuadRat(2, -1, 1, cfg.d)
        assert closest == expected, f"closest vertices at r^2 = {closest}, expected {expected}"
        stats = patch.statistics()
        ratio = stats["density"] / stats["expected_density"]
        assert 0.5 < ratio < 2, f"vertex density off by factor {ratio:.3f}"
        return f"R={radius}: {len(brute)} vertices, min r^2 {closest}, density ratio {ratio:.3f}"

    def check_support_oracle(self, cfg: TilingConfig) -> str:
        radius = as_radius(self.specs["oracle_radius"], cfg.d)
        grown = enumerate_support(cfg, radius, self.run_cfg.support_validation_edges)
        bounded = cfg.support_filter.with_radius(radius)
        brute = box_oracle(bounded)
        scanned = scan_points(bounded)
        assert grown == brute, f"growth found {len(grown)} vectors, the box oracle {len(brute)}"
        assert scanned == brute, f"lattice scan found {len(scanned)} vectors, the box oracle {len(brute)}"
        members = set(grown)
        assert all(-z in members for z in grown), "support is not closed under negation"
        return f"R={radius}: {len(grown)} vectors from growth, scan and box oracle"

    def check_reach_profiles(self, cfg: TilingConfig, k_max: int) -> str:
        _, profiles = self.profiles(cfg.name, k_max)
        for profile in profiles.values():
            total = nu(cfg, profile.z)
            assert profile.is_monotone(), f"F_k({profile.z}) decreases"
            assert (profile.cumulative[-1] - total).sign() <= 0, f"F_k({profile.z}) exceeds nu"
        for edge in cfg.edge_vectors:
            profile = profiles[edge.orbit_representative().coords]
            assert profile.cumulative[1] == nu(cfg, edge), f"F_1({edge}) != nu({edge})"
        return f"{len(profiles)} orbits monotone and bounded by nu up to k={k_max}"

    def check_method_agreement(self) -> str:
        k_max = self.specs["k_max_cross"]
        regions = coordination_regions(
            self.tiling("ammann-beenker"), k_max, self.workers, self.profiles("ammann-beenker", k_max)
        )
        for exact, via_regions in zip(self.l1_entries[:k_max], regions):
            assert exact.s_c == via_regions.s_c, (
                f"k={exact.k}: l1 gives {exact.s_c}, regions give {via_regions.s_c}"
            )
            assert exact.contributions == via_regions.contributions, f"k={exact.k}: shell split differs"
        return f"l1 and regions agree exactly for k <= {k_max}"

    def check_complete_shells(self) -> str:
        k_max = self.specs["k_max_shells"]
        report = verify_complete_shells(
            self.tiling("ammann-beenker"), k_max, self.workers, self.profiles("ammann-beenker", k_max)
        )
        assert report.ok, "; ".join(v.detail for v in report.violations)
        k_shield = self.specs["k_max_shield"]
        control = verify_complete_shells(
            self.tiling("shield"), k_shield, self.workers, self.profiles("shield", k_shield)
        )
        one = QuadRat(1, 0, 1, 3)
        split = [v for v in control.violations if v.kind == "split" and v.r_sq == one]
        assert split, "the shield shell r^2=1 was not reported as split"
        expected = {2: QuadRat(14, -4, 1, 3), 3: QuadRat(-6, 4, 1, 3)}
        assert split[0].parts == expected, f"shield r^2=1 split as {split[0].parts}"
        return (
            f"{report.shells_checked} ammann-beenker shells complete, {len(report.shared)} shared by orbits; "
            f"shield r^2=1 splits as {split[0].detail}"
        )

    def check_integrality(self) -> str:
        for entry in self.l1_entries + self.shield_entries:
            assert entry.s_c.is_integral, f"s_c({entry.k}) = {entry.s_c} [{entry.method}] is not integral"
            parts = sum((part for _, part in entry.contributions), QuadRat(0, 0, 1, entry.s_c.d))
            assert parts == entry.s_c, f"contributions of s_c({entry.k}) do not add up"
        return f"{len(self.l1_entries) + len(self.shield_entries)} values in Z[sqrt d]"

    def check_reference_tables(self) -> str:
        for entry in self.l1_entries:
            if entry.k in AMMANN_BEENKER:
                expected = ammann_beenker_value(entry.k)
                assert entry.s_c == expected, f"ammann-beenker s_c({entry.k}) = {entry.s_c}, expected {expected}"
        for entry in self.shield_entries:
            if entry.k in SHIELD:
                assert entry.s_c == shield_value(entry.k), f"shield s_c({entry.k}) = {entry.s_c}"
                assert dict(entry.contributions) == shield_contributions(entry.k), (
                    f"shield s_c({entry.k}) shell split differs"
                )
        deltas = delta_series(self.l1_entries[: min(40, len(self.l1_entries))])
        falling = [k for k, delta in deltas if delta.sign() <= 0]
        assert not falling, f"s_c does not increase after k = {falling}"
        return f"{len(self.l1_entries)} ammann-beenker and {len(self.shield_entries)} shield values match"

    def check_bfs_agreement(self, name: str, exact: List[CoordEntry]) -> str:
        cfg = self.tiling(name)
        suffix = "ab" if name == "ammann-beenker" else "shield"
        k_max = self.specs[f"bfs_k_max_{suffix}"]
        patch = enumerate_patch(cfg, self.specs[f"bfs_radius_{suffix}"], self.run_cfg.patch_margin_edges)
        result = coordination_bfs(patch, k_max, self.run_cfg.min_margin, self.workers)
        limit = self.run_cfg.bfs_tolerance(name)
        worst = 0.0
        for (k, mean), entry in zip(result.rows, exact):
            deviation = abs(mean - float(entry.s_c)) / float(entry.s_c)
            worst = max(worst, deviation)
            assert deviation < limit, f"k={k}: empirical {mean:.4f}, exact {float(entry.s_c):.4f}"
        return f"{result.centers} centers, worst relative deviation {worst:.4f} < {limit}"

    def run(self) -> List[CheckResult]:
        """Run all checks.

        :raises VerificationError: any check failed.
        """
        tilings = [self.tiling(name) for name in ("ammann-beenker", "shield")]
        for cfg in tilings:
            self._check(f"nu properties ({cfg.name})", lambda: self.check_nu_properties(cfg))
            self._check(f"grid oracle ({cfg.name})", lambda: self.check_grid_oracle(cfg))
            self._check(f"patch oracle ({cfg.name})", lambda: self.check_patch_oracle(cfg))
            self._check(f"support oracle ({cfg.name})", lambda: self.check_support_oracle(cfg))
        self._check("reach profiles (ammann-beenker)",
                    lambda: self.check_reach_profiles(tilings[0], self.specs["k_max_cross"]))
        self._check("reach profiles (shield)",
                    lambda: self.check_reach_profiles(tilings[1], self.specs["k_max_shield"]))
        self._check("l1 / regions agreement", self.check_method_agreement)
        self._check("complete shells", self.check_complete_shells)
        self._check("integrality", self.check_integrality)
        self._check("reference tables", self.check_reference_tables)
        self._check("bfs agreement (ammann-beenker)",
                    lambda: self.check_bfs_agreement("ammann-beenker", self.l1_entries))
        self._check("bfs agreement (shield)", lambda: self.check_bfs_agreement("shield", self.shield_entries))
        failed = [result.name for result in self.results if not result.passed]
        if failed:
            raise VerificationError(f"{len(failed)} checks failed: {', '.join(failed)}")
        return self.results

    def as_dicts(self) -> List[Dict[str, object]]:
        return [asdict(result) for result in self.results]
