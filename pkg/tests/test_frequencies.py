#!/usr/bin/env python3

import pytest

from coordination_core.fields.cyclotomic import CycloInt
from coordination_core.fields.quadfield import QuadRat
from coordination_core.tilings.frequencies import (
    NoCoexistingPairsError,
    ReachExplorer,
    ReachProfile,
    cumulative_frequencies,
    grid_nu,
    nu,
    nu_batch,
    orbit_groups,
    overlap_frequency,
    reach,
    shelling,
)
from coordination_core.tilings.modelset import TilingConfig, enumerate_support

AB = TilingConfig.ammann_beenker()
SHIELD = TilingConfig.shield()


def test_nu_of_zero_and_edges():
    assert nu(AB, CycloInt.zero(8)) == 1
    assert nu(SHIELD, CycloInt.zero(12)) == 1
    # Four edges per Ammann-Beenker vertex on average, spread over eight directions.
    assert all(nu(AB, edge) == QuadRat(1, 0, 2, 2) for edge in AB.edge_vectors)
    assert all(nu(SHIELD, edge) == QuadRat(4, -1, 6, 3) for edge in SHIELD.edge_vectors)


@pytest.mark.parametrize("cfg", [AB, SHIELD], ids=lambda cfg: cfg.name)
def test_nu_symmetries(cfg):
    xi = CycloInt.xi_power(1, cfg.n)
    for z in enumerate_support(cfg, 2):
        value = overlap_frequency(z)
        assert 0 < value.sign()
        assert (value - 1).sign() <= 0
        assert overlap_frequency(-z) == value
        assert overlap_frequency(xi * z) == value
        assert overlap_frequency(z.conjugate()) == value


def test_nu_does_not_depend_on_shift():
    moved = TilingConfig.ammann_beenker(("1/3", "2/5"))
    z = CycloInt((1, 1, 0, 0), 8)
    assert nu(moved, z) == nu(AB, z)


def test_nu_outside_support_is_zero():
    assert nu(AB, CycloInt((9, 0, 0, 0), 8)) == 0
    with pytest.raises(ValueError):
        nu(AB, CycloInt((1, 0, 0, 0), 12))


def test_nu_batch():
    representatives = [(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0)]
    assert nu_batch(8, representatives) == [nu(AB, CycloInt(coords, 8)) for coords in representatives]


@pytest.mark.parametrize("cfg", [AB, SHIELD], ids=lambda cfg: cfg.name)
def test_grid_integration_agrees(cfg):
    for z in [cfg.edge_vectors[0], cfg.edge_vectors[0] + cfg.edge_vectors[1], CycloInt.from_int(1, cfg.n)]:
        assert grid_nu(cfg, z, resolution=400) == pytest.approx(float(nu(cfg, z)), abs=1e-2)


def test_orbit_groups():
    points = [CycloInt.xi_power(j, 8) for j in range(8)] + [CycloInt((1, 1, 0, 0), 8)]
    groups = orbit_groups(points)
    assert len(groups) == 2
    assert sorted(len(members) for members in groups.values()) == [1, 8]


def test_ammann_beenker_unit_shell():
    entries = shelling(AB, QuadRat(1, 0, 1, 2))
    assert [entry.r_sq for entry in entries] == [QuadRat(2, -1, 1, 2), QuadRat(1, 0, 1, 2)]
    assert entries[-1].value == 4
    assert entries[-1].orbit_count == 8
    assert entries[-1].symmetry_orbits == 1


def test_shield_short_shells():
    entries = shelling(SHIELD, QuadRat(1, 0, 1, 3))
    assert [(entry.r_sq, entry.value) for entry in entries] == [
        (QuadRat(2, -1, 1, 3), QuadRat(8, -2, 1, 3)),
        (QuadRat(4, -2, 1, 3), QuadRat(2, 0, 1, 3)),
        (QuadRat(6, -3, 1, 3), QuadRat(4, -2, 1, 3)),
        (QuadRat(1, 0, 1, 3), QuadRat(8, 0, 1, 3)),
    ]
    assert entries[0].to_dict()["value"] == {"p": 8, "q": -2, "r": 1, "d": 3}


def test_reach_of_an_edge():
    profile = reach(AB, CycloInt.from_int(1, 8), 2)
    assert profile.cumulative == [0, QuadRat(1, 0, 2, 2), QuadRat(1, 0, 2, 2)]
    assert profile.first_full(QuadRat(1, 0, 2, 2)) == 1
    assert profile.is_monotone()


def test_reach_after_exactly_l1_steps():
    z = CycloInt((1, 1, 0, 0), 8)
    profile = reach(AB, z, 3)
    assert profile.cumulative[1] == 0
    assert profile.cumulative[2] == nu(AB, z)
    assert profile.at_distance(2) == nu(AB, z)
    assert profile.at_distance(3) == 0


def test_shield_unit_vector_splits_over_two_distances():
    profile = reach(SHIELD, CycloInt.from_int(1, 12), 3)
    assert profile.cumulative[1] == 0
    assert profile.cumulative[2] == QuadRat(7, -2, 6, 3)
    assert profile.cumulative[3] == QuadRat(2, 0, 3, 3) == nu(SHIELD, CycloInt.from_int(1, 12))


def test_reach_needs_coexisting_pairs():
    with pytest.raises(NoCoexistingPairsError):
        reach(AB, CycloInt((9, 0, 0, 0), 8), 2)
    with pytest.raises(ValueError):
        ReachExplorer(AB, 0)


def test_explorer_profiles_match_targeted_reach():
    explorer = ReachExplorer(AB, 3).explore()
    for coords in [(1, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (2, 0, 0, 0)]:
        z = CycloInt(coords, 8)
        assert explorer.profile(z).cumulative == reach(AB, z, 3).cumulative
    assert (0, 0, 0, 0) in explorer.endpoints()


def test_cumulative_frequencies_without_arrivals():
    assert cumulative_frequencies(8, 2, []) == [0, 0, 0]
    assert ReachProfile(CycloInt.zero(8), [QuadRat(1, 0, 1, 2)]).k_max == 0
