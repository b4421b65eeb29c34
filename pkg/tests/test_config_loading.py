#!/usr/bin/env python3

import filecmp
from argparse import Namespace
from fractions import Fraction
from pathlib import Path

import pytest

from coordination_core.config_base import RUN_CONFIG_TEMPLATE, Config, RunConfig
from coordination_core.fields.cyclotomic import CycloInt
from coordination_core.fields.quadfield import QuadRat

CONFIG_DIR = Path(__file__).parent.resolve() / "test_configs"


def test_load_from_yaml():
    Config(str(CONFIG_DIR / "config.yaml"))


def test_load_from_toml():
    Config(str(CONFIG_DIR / "config.toml"))


def test_missing_file():
    with pytest.raises(ValueError):
        Config(str(CONFIG_DIR / "does_not_exist.toml"))


def test_save_valid_filetypes(tmp_path):
    """Ensure we can
        (1) load a yaml and save a yaml and
        (2) load a toml and save a toml"""
    for ext in ["yaml", "toml"]:
        new_config_path = tmp_path / f"config_output.{ext}"
        cfg = Config(str(CONFIG_DIR / f"config.{ext}"))
        cfg.save(str(new_config_path))
        assert new_config_path.exists()


def test_load_toml_saveas_yaml(tmp_path):
    """Load a toml. Save it as a yaml."""
    new_config_path = tmp_path / "config_output.yaml"
    cfg = Config(str(CONFIG_DIR / "config.toml"))
    cfg.save(str(new_config_path))
    assert RunConfig(str(new_config_path)).k_max == 40


def test_save_wrong_filetype(tmp_path):
    """Try to save a file with the wrong file extension."""
    cfg = Config(str(CONFIG_DIR / "config.yaml"))
    with pytest.raises(ValueError):
        cfg.save(str(tmp_path / "config_output.toast"))


def test_save_refuses_overwrite(tmp_path):
    target = tmp_path / "config.toml"
    cfg = Config(str(CONFIG_DIR / "config.toml"))
    cfg.save(target)
    with pytest.raises(FileExistsError):
        cfg.save(target, overwrite=False)


def test_preserve_yaml_order_and_comments(tmp_path):
    """Load a valid yaml file with comments in it. Save it to a new file.
       Diff both files to make sure comments were preserved."""
    config_path = CONFIG_DIR / "config.yaml"
    new_config_path = tmp_path / "config_output.yaml"
    cfg = Config(str(config_path))
    cfg.save(str(new_config_path))
    assert filecmp.cmp(str(config_path), str(new_config_path), shallow=False)


def test_in_memory_config():
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    assert cfg.path is None
    with pytest.raises(ValueError):
        cfg.save()
    with pytest.raises(ValueError):
        Config()


def test_run_config_member_access_from_toml():
    cfg = RunConfig(str(CONFIG_DIR / "config.toml"))
    cfg.sanity_check()
    assert cfg.tiling == "ammann-beenker"
    assert cfg.n == 8 and cfg.discriminant == 2
    assert cfg.radius == QuadRat(10, 0, 1, 2)
    assert cfg.shift_fractions == (Fraction(1, 7), Fraction(1, 13))
    assert cfg.difference_vector == CycloInt.zero(8)
    assert cfg.output_path is None
    assert cfg.threads == 1
    assert cfg.bfs_tolerance("shield") == 0.05
    assert cfg.tiling_config.name == "ammann-beenker"


def test_run_config_member_access_from_yaml():
    cfg = RunConfig(str(CONFIG_DIR / "config.yaml"))
    cfg.sanity_check()
    assert cfg.command == "verify"
    assert cfg.difference_vector == CycloInt((1, 0, 0, 0), 12)
    assert cfg.verify_specs["k_max_shield"] == 3
    assert cfg.min_margin == pytest.approx(3 * cfg.tiling_config.edge_length)


def test_setters_write_through():
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    cfg.tiling = "shield"
    cfg.radius = "1+sqrt(3)"
    cfg.shift = "1/5, 1/9"
    cfg.k_max = "4"
    assert cfg.run_specs["tiling"] == "shield"
    assert cfg.radius == QuadRat(1, 1, 1, 3)
    assert cfg.tiling_specs["shift"] == ["1/5", "1/9"]
    assert cfg.k_max == 4


def test_default_output_formats():
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    assert cfg.output_format == "csv"
    cfg.command = "nu"
    assert cfg.output_format == "text"
    cfg.command = "render"
    assert cfg.output_format == "svg"


def test_from_arguments_overrides_only_given_flags():
    args = Namespace(config=str(CONFIG_DIR / "config.toml"), command="nu", tiling="shield", method=None,
                     k_max=None, radius=None, output_format=None, output_path=None, threads=None,
                     log_path=None, shift=None, z="0,1,0,0", save_config=False)
    cfg = RunConfig.from_arguments(args)
    assert cfg.command == "nu" and cfg.tiling == "shield"
    assert cfg.k_max == 40
    assert cfg.difference_vector == CycloInt((0, 1, 0, 0), 12)


@pytest.mark.parametrize("field, value", [
    ("tiling", "penrose"),
    ("command", "plot"),
    ("method", "monte-carlo"),
    ("k_max", 0),
    ("radius", "-2"),
    ("shift", "1/7"),
    ("z", "1,2"),
    ("output_format", "png"),
])
def test_sanity_check_failures(field, value):
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    setattr(cfg, field, value)
    with pytest.raises(AssertionError):
        cfg.sanity_check()


def test_sanity_check_combinations():
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    cfg.tiling = "shield"
    with pytest.raises(AssertionError):
        cfg.sanity_check()  # l1 on shield
    cfg.method = "regions"
    cfg.sanity_check()
    cfg.command = "fig2"
    with pytest.raises(AssertionError):
        cfg.sanity_check()
    cfg.tiling = "ammann-beenker"
    cfg.command = "shelling"
    cfg.output_format = "svg"
    with pytest.raises(AssertionError):
        cfg.sanity_check()


def test_all_errors_reported_together():
    cfg = RunConfig(config_template=RUN_CONFIG_TEMPLATE, create=True)
    cfg.tiling = "penrose"
    cfg.k_max = -1
    with pytest.raises(AssertionError) as caught:
        cfg.sanity_check()
    assert "penrose" in str(caught.value) and "k_max" in str(caught.value)
