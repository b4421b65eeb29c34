"""Coordination run: one command from a RunConfig to its output file."""

import logging
import math
import sys
from contextlib import contextmanager
from logging import FileHandler, Formatter, Logger
from pathlib import Path
from typing import Dict, Optional, Union

from psutil import virtual_memory
from pygit2 import GitError, Repository

from coordination_core import exporters
from coordination_core.config_base import RunConfig
from coordination_core.fields.quadfield import QuadRat
from coordination_core.geometry.polygeom import WINDOW_INRADIUS
from coordination_core.operations.results_log import ResultsFilter, ResultsFormatter
from coordination_core.tilings.coordnum import (
    coordination_bfs,
    coordination_l1,
    coordination_regions,
    delta_series,
)
from coordination_core.tilings.frequencies import nu, shelling
from coordination_core.tilings.modelset import Patch, enumerate_patch
from coordination_core.verification import VerificationSuite

# Coordinates, adjacency lists and index entries of one patch vertex.
BYTES_PER_VERTEX = 2048


class CoordinationRun:

    def __init__(self, run_cfg: RunConfig):
        """Check the config and prepare a run of its command.

        :param run_cfg: the run configuration; its sanity check must pass.
        """
        self.log = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.results_log = logging.getLogger(f"{__name__}.{self.__class__.__name__}.results")
        self.cfg = run_cfg
        self.cfg.sanity_check()
        self.tiling = self.cfg.tiling_config

    def log_git_hashes(self):
        """Log the branch and commit of the checkout holding this package."""
        package_path = Path(__file__).parent
        try:
            repo = Repository(str(package_path))  # will search parent directories
            self.log.debug(f"coordination_core on branch {repo.head.name} at {repo.head.target}")
            if repo.status(untracked_files="no"):
                self.log.error("coordination_core has uncommitted changes.")
        except GitError:
            self.log.error("Could not record git hash of coordination_core.")

    @contextmanager
    def log_to_file(
        self,
        filepath: Path,
        logger: Logger = None,
        formatter_class: type = Formatter,
        filter_class: Union[type, None] = None,
    ):
        """Log to a file for the duration of a run.

        :param filepath: file name (pathlike) to write the records to.
        :param logger: a particular logger to log to file. If unspecified,
            the root logger will be used.
        :param formatter_class: the formatter class type to instantiate.
        :param filter_class: the filter class type to instantiate.
        """
        log_handler = FileHandler(filepath, "w")
        log_handler.setLevel(logging.DEBUG)
        fmt = "%(asctime)s.%(msecs)03d %(levelname)s %(name)s: %(message)s"
        datefmt = "%Y-%m-%d,%H:%M:%S"
        log_handler.setFormatter(formatter_class(fmt, datefmt))
        if filter_class:
            log_handler.addFilter(filter_class())
        if logger is None:
            logger = logging.getLogger()
        try:
            logger.addHandler(log_handler)
            yield
        finally:
            log_handler.close()
            logger.removeHandler(log_handler)

    def _check_system_memory_resources(self, radius: QuadRat):
        """Make sure there is enough memory to hold a patch of this radius.

        :raises MemoryError:
        """
        expected_vertices = float(self.tiling.density) * math.pi * float(radius) ** 2
        required_gigabytes = expected_vertices * BYTES_PER_VERTEX / 1024**3
        free_gigabytes = virtual_memory()[1] / 1024**3
        self.log.debug(
            f"Patch of radius {radius}: ~{expected_vertices:.0f} vertices, "
            f"~{required_gigabytes:.3f}[GB] of {free_gigabytes:.3f}[GB] available."
        )
        if free_gigabytes < required_gigabytes:
            raise MemoryError(
                f"A patch of radius {radius} needs ~{required_gigabytes:.1f}[GB] "
                f"but only {free_gigabytes:.1f}[GB] are available."
            )

    def _patch(self, radius: QuadRat) -> Patch:
        self._check_system_memory_resources(radius)
        patch = enumerate_patch(self.tiling, radius, self.cfg.patch_margin_edges)
        stats = patch.statistics()
        self.log.info(
            f"{self.tiling.name} patch R={radius}: {stats['vertices']} vertices, "
            f"mean degree {stats['mean_degree']:.4f}, density {stats['density']:.4f} "
            f"(expected {stats['expected_density']:.4f})"
        )
        return patch

    def meta(self) -> Dict[str, object]:
        return {
            "tiling": self.tiling.name,
            "shift": [str(value) for value in self.cfg.shift_fractions],
            "command": self.cfg.command,
        }

    def window(self) -> str:
        polygon = self.tiling.shifted_window
        fmt = self.cfg.output_format
        if fmt == "svg":
            return exporters.window_svg(polygon, self.tiling.name)
        if fmt == "json":
            meta = {
                **self.meta(),
                "area": self.tiling.window_area.to_dict(),
                "inradius": WINDOW_INRADIUS[self.tiling.n].to_dict(),
                "density": self.tiling.density.to_dict(),
            }
            return exporters.window_json(polygon, meta)
        return exporters.window_csv(polygon)

    def patch(self) -> str:
        patch = self._patch(self.cfg.radius)
        fmt = self.cfg.output_format
        if fmt == "svg":
            return exporters.patch_svg(patch)
        if fmt == "json":
            return exporters.patch_json(patch)
        return exporters.patch_csv(patch)

    def render(self) -> str:
        return exporters.patch_svg(self._patch(self.cfg.radius))

    def nu(self) -> str:
        z = self.cfg.difference_vector
        value = nu(self.tiling, z)
        self.results_log.info(f"nu({z}) = {value}", extra={"tags": ["results"], "z": list(z.coords),
                                                           "nu": value.to_dict()})
        fmt = self.cfg.output_format
        if fmt == "json":
            return exporters.nu_json(z, value)
        if fmt == "csv":
            return exporters.nu_csv(z, value)
        return exporters.nu_text(value)

    def shelling(self) -> str:
        radius = self.cfg.radius
        entries = shelling(self.tiling, radius * radius)
        if self.cfg.output_format == "json":
            return exporters.shelling_json(entries, {**self.meta(), "radius": radius.to_dict()})
        return exporters.shelling_csv(entries)

    def coordination(self) -> str:
        method = self.cfg.method
        workers = self.cfg.threads
        meta = {**self.meta(), "method": method, "k_max": self.cfg.k_max}
        if method == "bfs":
            patch = self._patch(self.cfg.radius)
            result = coordination_bfs(patch, self.cfg.k_max, self.cfg.min_margin, workers)
            if self.cfg.output_format == "json":
                return exporters.bfs_json(result)
            return exporters.bfs_csv(result)
        if method == "l1":
            entries = coordination_l1(self.cfg.k_max, workers, self.tiling)
        else:
            entries = coordination_regions(self.tiling, self.cfg.k_max, workers)
        if self.cfg.output_format == "json":
            return exporters.coordination_json(entries, meta)
        output_path = self.cfg.output_path
        if output_path is not None:
            companion = output_path.with_name(f"{output_path.stem}_contributions.csv")
            self.log.info(f"Writing shell contributions to {companion}")
            companion.write_text(exporters.contributions_csv(entries))
        return exporters.coordination_csv(entries)

    def verify(self) -> str:
        suite = VerificationSuite(self.cfg, self.cfg.threads)
        try:
            suite.run()
        finally:
            # The report is written whether or not every check passed.
            report = (
                exporters.report_json(suite.as_dicts())
                if self.cfg.output_format == "json"
                else exporters.report_text(suite.as_dicts())
            )
            self.write(report)
        return ""

    def fig2(self) -> str:
        entries = coordination_l1(self.cfg.k_max, self.cfg.threads, self.tiling)
        deltas = delta_series(entries)
        fmt = self.cfg.output_format
        if fmt == "svg":
            return exporters.fig2_svg(entries, deltas)
        if fmt == "json":
            return exporters.fig2_json(entries, deltas)
        return exporters.fig2_csv(entries, deltas)

    def write(self, text: str):
        """Write to output_path, or to stdout when none is set."""
        if not text:
            return
        output_path = self.cfg.output_path
        if output_path is None:
            sys.stdout.write(text)
            return
        self.log.info(f"Writing {self.cfg.command} output to {output_path}")
        output_path.write_text(text)

    def _execute(self):
        self.log.info(f"Running {self.cfg.command} on {self.tiling.name} with {self.cfg.threads} workers")
        self.log_git_hashes()
        if self.cfg.save_config:
            self.save_config()
        self.write(getattr(self, self.cfg.command)())

    def save_config(self):
        """Keep the exact config of this run next to its output."""
        output_path = self.cfg.output_path
        if output_path is None:
            self.log.warning("save_config is set but there is no output path to save next to.")
            return
        self.cfg.save(output_path.with_name(f"{output_path.name}.config.toml"))

    def run(self):
        """Run the configured command, logging to file when log_path is set."""
        log_path: Optional[Path] = self.cfg.log_path
        if log_path is None:
            self._execute()
            return
        results_path = log_path.with_name(f"{log_path.stem}_results.log")
        with self.log_to_file(log_path):
            with self.log_to_file(results_path, None, ResultsFormatter, ResultsFilter):
                self._execute()
