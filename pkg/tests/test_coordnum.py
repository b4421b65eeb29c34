#!/usr/bin/env python3

import pytest

from coordination_core.fields.quadfield import QuadRat
from coordination_core.processes.shard_worker import map_shards, split
from coordination_core.reference_values import (
    AMMANN_BEENKER,
    ammann_beenker_value,
    shield_contributions,
    shield_value,
)
from coordination_core.tilings.coordnum import (
    CoordEntry,
    NoEligibleCentersError,
    bfs_batch,
    coordination_bfs,
    coordination_l1,
    coordination_regions,
    delta_series,
    regions_profiles,
    verify_complete_shells,
)
from coordination_core.tilings.frequencies import nu_batch
from coordination_core.tilings.modelset import TilingConfig, enumerate_patch

AB = TilingConfig.ammann_beenker()
SHIELD = TilingConfig.shield()


def test_l1_first_values():
    entries = coordination_l1(10)
    assert [entry.s_c for entry in entries] == [ammann_beenker_value(k) for k in range(1, 11)]
    assert entries[6].s_c.to_decimal(3) == "33.304"
    assert all(entry.method == "l1" for entry in entries)


@pytest.mark.slow
def test_l1_full_table():
    entries = coordination_l1(40, workers=4)
    assert len(entries) == len(AMMANN_BEENKER)
    for entry in entries:
        assert entry.s_c == ammann_beenker_value(entry.k)
        assert entry.s_c.is_integral
    assert all(delta.sign() > 0 for _, delta in delta_series(entries))


def test_l1_contributions_add_up():
    for entry in coordination_l1(6):
        total = sum((part for _, part in entry.contributions), QuadRat(0, 0, 1, 2))
        assert total == entry.s_c
        shells = [r_sq for r_sq, _ in entry.contributions]
        assert shells == sorted(shells)


def test_l1_arguments():
    with pytest.raises(ValueError):
        coordination_l1(0)
    with pytest.raises(ValueError):
        coordination_l1(3, cfg=SHIELD)


def test_regions_agree_with_l1():
    regions = coordination_regions(AB, 4)
    for via_l1, via_regions in zip(coordination_l1(4), regions):
        assert via_regions.s_c == via_l1.s_c
        assert via_regions.contributions == via_l1.contributions
        assert via_regions.method == "regions"


def test_shield_regions_to_three():
    entries = coordination_regions(SHIELD, 3)
    for entry in entries:
        assert entry.s_c == shield_value(entry.k)
        assert dict(entry.contributions) == shield_contributions(entry.k)


@pytest.mark.slow
def test_shield_regions_to_four():
    entries = coordination_regions(SHIELD, 4, workers=4)
    assert entries[-1].s_c == QuadRat(-46, 38, 1, 3)
    assert dict(entries[-1].contributions)[QuadRat(3, 0, 1, 3)] == QuadRat(-12, 16, 3, 3)
    for entry in entries:
        assert dict(entry.contributions) == shield_contributions(entry.k)


def test_shared_profiles_give_the_same_entries():
    profiles = regions_profiles(SHIELD, 2)
    assert coordination_regions(SHIELD, 2, profiles=profiles) == coordination_regions(SHIELD, 2)


def test_complete_shells_on_ammann_beenker():
    report = verify_complete_shells(AB, 4)
    assert report.ok, report.to_dict()
    assert report.shells_checked > 0


@pytest.mark.slow
def test_complete_orbits_on_ammann_beenker_to_six():
    report = verify_complete_shells(AB, 6)
    assert report.ok, report.to_dict()
    # orbits of -3-3xi (l1 = 6) and -3-2xi-2xi^2-xi^3 (l1 = 8) share one circular shell
    shared = {shell.r_sq: sorted(shell.distances.values()) for shell in report.shared}
    assert shared[QuadRat(18, 9, 1, 2)] == [6, 8]
    assert QuadRat(18, 9, 1, 2) in report.unresolved
    assert report.to_dict()["shared"]


def test_shield_unit_shell_is_split():
    report = verify_complete_shells(SHIELD, 3)
    assert not report.ok
    split_shells = [violation for violation in report.violations if violation.kind == "split"]
    assert [violation.r_sq for violation in split_shells] == [QuadRat(1, 0, 1, 3)]
    assert split_shells[0].parts == {2: QuadRat(14, -4, 1, 3), 3: QuadRat(-6, 4, 1, 3)}
    assert report.to_dict()["violations"][0]["parts"]["2"] == {"p": 14, "q": -4, "r": 1, "d": 3}


def test_bfs_batch_on_a_path():
    adjacency = [[1], [0, 2], [1, 3], [2]]
    assert bfs_batch(adjacency, 2, [0, 1]) == [[1, 1, 1], [1, 2, 1]]


def test_bfs_on_a_patch():
    patch = enumerate_patch(AB, 25)
    result = coordination_bfs(patch, 3)
    assert result.centers > 100
    for (k, mean), exact in zip(result.rows, coordination_l1(3)):
        assert mean == pytest.approx(float(exact.s_c), rel=0.05)
    assert result.to_dict()["rows"][0]["k"] == 1


@pytest.mark.slow
@pytest.mark.parametrize("cfg, radius, k_max, tolerance, exact", [
    (AB, 80, 8, 0.02, lambda k: ammann_beenker_value(k)),
    (SHIELD, 40, 4, 0.05, lambda k: shield_value(k)),
], ids=["ammann-beenker", "shield"])
def test_bfs_acceptance(cfg, radius, k_max, tolerance, exact):
    result = coordination_bfs(enumerate_patch(cfg, radius), k_max, workers=4)
    if cfg is AB:
        assert result.centers >= 2000
    for k, mean in result.rows:
        assert mean == pytest.approx(float(exact(k)), rel=tolerance)


def test_bfs_needs_deep_centers():
    with pytest.raises(NoEligibleCentersError):
        coordination_bfs(enumerate_patch(AB, 3), 4)


def test_delta_series():
    entries = [CoordEntry(k, ammann_beenker_value(k)) for k in (1, 2, 3)]
    assert delta_series(entries) == [(1, QuadRat(28, -16, 1, 2)), (2, QuadRat(-40, 32, 1, 2))]
    with pytest.raises(ValueError):
        delta_series([entries[0], entries[2]])


def test_entries_serialize():
    document = coordination_l1(1)[0].to_dict()
    assert (document["k"], document["p"], document["q"], document["r"]) == (1, 4, 0, 1)
    assert document["contributions"][0]["r_sq"] == {"p": 1, "q": 0, "r": 1, "d": 2}


def test_parallel_map_matches_serial():
    representatives = [(a, b, 0, 0) for a in range(4) for b in range(5)]
    assert map_shards(nu_batch, (8,), representatives, 2) == nu_batch(8, representatives)
    assert split(list(range(5)), 2) == [[0, 1, 2], [3, 4]]


def test_worker_failure_is_reported():
    with pytest.raises(RuntimeError):
        map_shards(bfs_batch, ([[1], [0]], 1), list(range(20)), 2)
