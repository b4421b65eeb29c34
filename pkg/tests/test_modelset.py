#!/usr/bin/env python3

import logging
from fractions import Fraction

import numpy as np
import pytest
from mock import patch

from coordination_core.fields.cyclotomic import CycloInt
from coordination_core.fields.quadfield import QuadRat
from coordination_core.tilings.modelset import (
    BoundaryHit,
    LatticeFilter,
    SupportEnumerationError,
    TilingConfig,
    box_oracle,
    contains,
    enumerate_patch,
    enumerate_support,
    in_support,
    scan_lattice,
    scan_points,
)

TILINGS = [TilingConfig.ammann_beenker(), TilingConfig.shield()]


def test_tiling_constants():
    ab, shield = TILINGS
    assert ab.density == QuadRat(1, 1, 2, 2)
    assert shield.density == QuadRat(2, 1, 1, 3)
    assert ab.edge_norm_sq == 1
    assert shield.edge_norm_sq == QuadRat(2, -1, 1, 3)
    assert len(ab.edge_vectors) == 8 and len(shield.edge_vectors) == 12
    assert all(edge.norm_sq() == shield.edge_norm_sq for edge in shield.edge_vectors)
    assert ab.describe()["shift"] == ["1/7", "1/13"]


def test_from_name():
    cfg = TilingConfig.from_name("shield", ("1/5", "2/9"))
    assert cfg.n == 12
    assert cfg.shift.x == QuadRat(1, 0, 5, 3)
    with pytest.raises(ValueError):
        TilingConfig.from_name("penrose")
    with pytest.raises(ValueError):
        TilingConfig.ammann_beenker(("1/7",))


def test_contains_and_boundary_hit():
    cfg = TilingConfig.ammann_beenker(("1/2", "0"))
    z = CycloInt((1, 0, 1, 1), 8)
    with pytest.raises(BoundaryHit) as caught:
        contains(cfg, z)
    assert caught.value.z == z
    assert not contains(TilingConfig.ammann_beenker(), CycloInt((40, 0, 0, 0), 8))
    with pytest.raises(ValueError):
        contains(cfg, CycloInt((1, 0, 0, 0), 12))


def test_support_membership():
    for cfg in TILINGS:
        assert in_support(cfg, CycloInt.zero(cfg.n))
        assert all(in_support(cfg, edge) for edge in cfg.edge_vectors)
        assert not in_support(cfg, CycloInt((30, 0, 0, 0), cfg.n))


def test_lattice_filter_arguments():
    cfg = TILINGS[0]
    with pytest.raises(ValueError):
        LatticeFilter(8, cfg.window, on_boundary="ignore")
    with pytest.raises(ValueError):
        list(scan_lattice(cfg.support_filter))
    with pytest.raises(ValueError):
        box_oracle(cfg.support_filter)


@pytest.mark.parametrize("cfg", TILINGS, ids=lambda cfg: cfg.name)
def test_select_agrees_with_single_point_test(cfg):
    rng = np.random.default_rng(11)
    block = rng.integers(-4, 5, size=(500, 4))
    bounded = cfg.support_filter.with_radius(QuadRat(3, 0, 1, cfg.d))
    selected = {tuple(row) for row in bounded.select(block).tolist()}
    expected = {tuple(row) for row in block.tolist() if bounded.test(CycloInt(row, cfg.n))}
    assert selected == expected


@pytest.mark.parametrize("cfg, radius", [(TILINGS[0], 6), (TILINGS[1], 3)], ids=["ammann-beenker", "shield"])
def test_patch_matches_box_oracle(cfg, radius):
    patch = enumerate_patch(cfg, radius)
    assert patch.vertices == box_oracle(cfg.window_filter.with_radius(QuadRat(radius, 0, 1, cfg.d)))
    assert all(i in patch.adjacency[j] for i, neighbors in enumerate(patch.adjacency) for j in neighbors)
    assert patch.min_distance_sq() == QuadRat(2, -1, 1, cfg.d)
    assert all(float(vertex.norm_sq()) <= radius * radius + 1e-9 for vertex in patch.vertices)


def interior_degrees(patch, radius):
    """Degrees of the vertices whose every neighbour lies inside the patch disk."""
    distances = np.hypot(patch.positions[:, 0], patch.positions[:, 1])
    return [degree for degree, distance in zip(patch.degrees(), distances) if distance <= radius - 1]


def test_patch_statistics():
    patch = enumerate_patch(TILINGS[0], 10)
    stats = patch.statistics()
    assert stats["vertices"] == len(patch.vertices)
    assert 1 <= stats["min_degree"] and stats["max_degree"] <= 8
    assert 0.8 < stats["density"] / stats["expected_density"] < 1.25
    assert stats["edges"] == sum(patch.degrees()) // 2
    assert patch.positions.shape == (len(patch.vertices), 2)
    document = patch.to_dict()
    assert len(document["vertices"]) == len(patch.vertices)
    assert document["tiling"] == "ammann-beenker"


@pytest.mark.parametrize("cfg, highest", [(TILINGS[0], 8), (TILINGS[1], 6)], ids=["ammann-beenker", "shield"])
def test_interior_degrees(cfg, highest):
    degrees = interior_degrees(enumerate_patch(cfg, 10), 10)
    assert len(degrees) > 50
    assert 3 <= min(degrees) and max(degrees) <= highest


def test_patch_depends_on_shift():
    default = enumerate_patch(TILINGS[0], 5)
    moved = enumerate_patch(TilingConfig.ammann_beenker((Fraction(1, 3), Fraction(1, 11))), 5)
    assert default.vertices != moved.vertices


@pytest.mark.parametrize("cfg", TILINGS, ids=lambda cfg: cfg.name)
def test_support_growth_scan_and_oracle_agree(cfg):
    radius = QuadRat(4, 0, 1, cfg.d)
    bounded = cfg.support_filter.with_radius(radius)
    grown = enumerate_support(cfg, radius)
    assert grown == box_oracle(bounded)
    assert grown == scan_points(bounded)
    members = set(grown)
    assert all(-z in members for z in grown)
    assert all(z.rotate(1) in members for z in grown)


def test_support_growth_with_explicit_steps():
    cfg = TILINGS[0]
    steps = [CycloInt.xi_power(j, 8) for j in range(8)]
    assert enumerate_support(cfg, 3, steps=steps) == enumerate_support(cfg, 3)


def test_support_growth_widens_a_deficient_step_set(caplog):
    cfg = TILINGS[0]
    steps = [CycloInt.xi_power(0, 8), CycloInt.xi_power(1, 8)]
    with caplog.at_level(logging.WARNING, logger="coordination_core.tilings.modelset"):
        grown = enumerate_support(cfg, 3, steps=steps)
    assert grown == box_oracle(cfg.support_filter.with_radius(QuadRat(3, 0, 1, 2)))
    assert any("widening the step set" in record.getMessage() for record in caplog.records)


def test_support_growth_gives_up_after_widening():
    cfg = TILINGS[0]
    with patch("coordination_core.tilings.modelset._grow", side_effect=lambda start, *args: [start]):
        with pytest.raises(SupportEnumerationError):
            enumerate_support(cfg, 2)
