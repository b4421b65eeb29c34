"""TOML/YAML wrapper that enables edits, reloads, and manages derived params."""

import toml
from ruamel.yaml import YAML
import logging
import psutil
from argparse import Namespace
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple, Union

from coordination_core.fields.cyclotomic import CycloInt
from coordination_core.fields.quadfield import QuadRat
from coordination_core.tilings.coordnum import METHODS, REGIONS_SCOPE
from coordination_core.tilings.modelset import TILING_NAMES, TilingConfig

COMMANDS = ("window", "patch", "nu", "shelling", "coordination", "verify", "fig2", "render")
FORMATS = ("csv", "json", "svg", "text")
FORMATS_BY_COMMAND = {
    "window": ("csv", "json", "svg"),
    "patch": ("csv", "json", "svg"),
    "nu": ("text", "csv", "json"),
    "shelling": ("csv", "json"),
    "coordination": ("csv", "json"),
    "verify": ("text", "json"),
    "fig2": ("csv", "json", "svg"),
    "render": ("svg",),
}
DEFAULT_FORMATS = {"nu": "text", "verify": "text", "render": "svg"}

RUN_CONFIG_TEMPLATE = {
    "run": {
        "tiling": "ammann-beenker",
        "command": "coordination",
        "method": "l1",
        "k_max": 40,
        "radius": "10",
        "output_format": "",
        "output_path": "",
        "threads": 0,
        "save_config": False,
        "log_path": "",
    },
    "tiling_specs": {
        "shift": ["1/7", "1/13"],
        "patch_margin_edges": 3,
        "support_validation_edges": 4,
        "z": "0,0,0,0",
    },
    "tolerances": {
        "bfs_relative_ab": 0.02,
        "bfs_relative_shield": 0.05,
        "grid_absolute": 1e-3,
        "grid_resolution": 2000,
        "min_margin_edges": 3,
    },
    "verify_specs": {
        "k_max_l1": 40,
        "k_max_cross": 6,
        "k_max_shells": 6,
        "k_max_shield": 4,
        "oracle_radius": 10,
        "grid_samples": 100,
        "grid_radius": 4,
        "bfs_radius_ab": 80,
        "bfs_radius_shield": 40,
        "bfs_k_max_ab": 8,
        "bfs_k_max_shield": 4,
    },
}


class Config:

    def __init__(
        self,
        filepath: Union[str, Path, None] = None,
        config_template: Union[dict, None] = None,
        create: bool = False,
    ):
        """Load an existing (TOML or YAML) config
        or create one from the specified template.

         :param filepath: location of the config if we are
             loading one from file. Default location to save to. Optional.
         :param config_template: dict with the same key structure as the
             config file. Optional. Only required if `create` is True.
         :param create: if True, create a config object from the specified
             `config_template`. Without a filepath the config lives in memory
             until it is saved somewhere.
         :note: comments and file order are not preserved for toml files but
             *are* preserved in yaml files. This is a quirk of the libraries
             used to read/write them.
        """
        self.cfg = None  # The actual type will vary but it can be treated
        # as a dict.
        self.handlers = {"yaml": YAML(), "toml": toml}
        self.path = Path(filepath) if filepath else None
        self.template = config_template
        self.log = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.doc_name = "config.toml"
        # User specified existing config.
        if self.path and self.path.exists():
            self.log.info(f"Loading: {self.path.resolve()}")
            self.load(self.path)
        # User specified existing config but it does not exist.
        elif self.path and not create:
            raise ValueError(
                f"Configuration file at {str(self.path.absolute())} does not exist."
            )
        # Create a new config, at the specified path if there is one.
        elif config_template and create:
            where = self.path.resolve() if self.path else "memory"
            self.log.info(f"Creating: {where} from template.")
            self.load_from_template()
        # No config specified; not creating.
        else:
            raise ValueError("No configuration was specified.")
        if self.path:
            self.doc_name = self.path.name

    def load_from_template(self, config_template: dict = None):
        """Create a config from a template if one was specified on __init__.

        .. code-block:: python

            cfg.load_from_template() # Optional dict may be passed in if one was
                                     # not specified in the init.
            cfg.save("./config.toml")  # Save the config made from the template.

        """
        if config_template:
            self.template = config_template
        if self.template is None:
            raise ValueError(
                "Error: No template was specified from which to "
                "create the configuration."
            )
        # This will destroy anything that we loaded.
        self.cfg = toml.loads(toml.dumps(self.template))

    def load(self, filepath: Path = None):
        """Load a config from file specified in filepath or __init__."""
        if filepath:
            self.path = Path(filepath)
        if not (self.path.is_file() and self.path.exists()):
            raise AssertionError(
                f"Config does not exist at provided filepath: {self.path}."
            )
        file_type = self.path.name.split(".")[-1].lower()
        cfg_handler = self.handlers.get(file_type, None)
        if cfg_handler is None:
            raise RuntimeError(
                "Config file extension not recognized."
                "File must have a *.yaml or *.toml suffix."
            )
        with open(self.path, "r") as cfg_file:
            self.cfg = cfg_handler.load(cfg_file)
        self.doc_name = self.path.name

    def reload(self):
        """Reload the config from the file we loaded the config from.

        Take all the new changes.
        """
        # This will error out if the config never existed in the first place.
        self.load(self.path)

    def save(self, filepath: Union[str, Path] = None, overwrite: bool = True):
        """Save config to specified file, or overwrite if no file specified.

        :param filepath: can be a path to a folder or a file.
            If folder, we use the original filename (or default filename
            if filename never specified).
            If file, we use the specified filename.
            If no path specified, we overwrite unless flagged not to do so.
            File extension (yaml or toml) dictates what type of file is
            saved.
        :param overwrite: bool to indicate if we overwrite an existing file.
            Defaults to True so that we can save() over a previous file.
        """
        # if filepath unspecified, overwrite the original.
        write_path = Path(filepath) if filepath else self.path
        if write_path is None:
            raise ValueError("This config was never loaded from or saved to a file.")
        # if file name is unspecified, use the original.
        if write_path.is_dir():
            write_path = write_path / self.doc_name
        if write_path.exists() and not overwrite:
            raise FileExistsError(f"Refusing to overwrite {write_path}.")
        file_type = write_path.name.split(".")[-1].lower()
        cfg_handler = self.handlers.get(file_type, None)
        if cfg_handler is None:
            raise ValueError(
                "Config file extension not recognized."
                "File must have a *.yaml or *.toml suffix."
            )
        self.log.info(f"Writing config file to {write_path}")
        with write_path.open("w") as f:
            cfg_handler.dump(self.cfg, f)


class RunConfig(Config):

    def __init__(
        self,
        filepath: Union[str, Path, None] = None,
        config_template: Union[dict, None] = None,
        create: bool = False,
    ):
        super().__init__(filepath, config_template, create=create)

        # Note: these are mutable, so reloading the file doesn't affect them.
        self.run_specs = self.cfg["run"]
        self.tiling_specs = self.cfg["tiling_specs"]
        self.tolerances = self.cfg["tolerances"]
        self.verify_specs = self.cfg["verify_specs"]

    @classmethod
    def from_arguments(cls, args: Namespace) -> "RunConfig":
        """The --config file (or the defaults) overlaid with the flags that were given."""
        config_path = getattr(args, "config", None)
        if config_path:
            run_cfg = cls(config_path)
        else:
            run_cfg = cls(config_template=RUN_CONFIG_TEMPLATE, create=True)
        overrides = {
            "tiling": "tiling",
            "command": "command",
            "method": "method",
            "k_max": "k_max",
            "radius": "radius",
            "output_format": "output_format",
            "output_path": "output_path",
            "threads": "threads",
            "log_path": "log_path",
            "shift": "shift",
            "z": "z",
        }
        for attribute, name in overrides.items():
            value = getattr(args, name, None)
            if value is not None:
                setattr(run_cfg, attribute, value)
        if getattr(args, "save_config", False):
            run_cfg.save_config = True
        return run_cfg

    def sanity_check(self):
        """Confirm that config fields have values that are in the right ranges."""
        self.log.debug(f"Performing {self.doc_name} config sanity checks")
        # Log all errors, but raise an AssertionError at the end if
        # any failures exist.
        error_msgs = []

        def fail(msg: str):
            self.log.error(msg)
            error_msgs.append(msg)

        if self.tiling not in TILING_NAMES:
            fail(f"Unknown tiling '{self.tiling}'. Use one of {TILING_NAMES}.")
        if self.command not in COMMANDS:
            fail(f"Unknown command '{self.command}'. Use one of {COMMANDS}.")
        if self.method not in METHODS:
            fail(f"Unknown method '{self.method}'. Use one of {METHODS}.")
        if self.output_format not in FORMATS:
            fail(f"Unknown output format '{self.output_format}'. Use one of {FORMATS}.")
        elif self.command in COMMANDS and self.output_format not in FORMATS_BY_COMMAND[self.command]:
            fail(
                f"{self.command} writes {FORMATS_BY_COMMAND[self.command]}, not {self.output_format}."
            )
        if self.command == "coordination" and self.method == "l1" and self.tiling != "ammann-beenker":
            fail("The l1 method only applies to the ammann-beenker tiling.")
        if self.command == "fig2" and self.tiling != "ammann-beenker":
            fail("fig2 is only defined for the ammann-beenker tiling.")
        if self.k_max < 1:
            fail(f"k_max must be at least 1, not {self.k_max}.")
        try:
            if self.radius.sign() <= 0:
                fail(f"radius must be positive, not {self.radius}.")
        except ValueError as error:
            fail(f"radius is not a number: {error}")
        try:
            _ = self.shift_fractions
        except (ValueError, ZeroDivisionError) as error:
            fail(f"shift must be two rational numbers: {error}")
        try:
            _ = self.difference_vector
        except ValueError as error:
            fail(f"z is not a difference vector: {error}")
        if self.run_specs["threads"] < 0:
            fail(f"threads must be 0 (all cores) or positive, not {self.run_specs['threads']}.")
        for name, value in self.tolerances.items():
            if value <= 0:
                fail(f"Tolerance {name} must be positive, not {value}.")
        if (
            self.command == "coordination"
            and self.method == "regions"
            and self.tiling in REGIONS_SCOPE
            and self.k_max > REGIONS_SCOPE[self.tiling]
        ):
            self.log.warning(
                f"Reach regions to k={self.k_max} on {self.tiling} may run for a very long time."
            )
        # Create a big error message at the end.
        if len(error_msgs):
            all_msgs = "\n".join(error_msgs)
            raise AssertionError(all_msgs)

    # Make @Properties to simplify structure of the config file
    @property
    def tiling(self) -> str:
        return self.run_specs["tiling"]

    @tiling.setter
    def tiling(self, name: str):
        self.run_specs["tiling"] = name

    @property
    def command(self) -> str:
        return self.run_specs["command"]

    @command.setter
    def command(self, name: str):
        self.run_specs["command"] = name

    @property
    def method(self) -> str:
        return self.run_specs["method"]

    @method.setter
    def method(self, name: str):
        self.run_specs["method"] = name

    @property
    def k_max(self) -> int:
        return int(self.run_specs["k_max"])

    @k_max.setter
    def k_max(self, k: int):
        self.run_specs["k_max"] = int(k)

    @property
    def radius(self) -> QuadRat:
        """Patch or shell radius, exact; written like '80', '5/2' or '1+sqrt(2)'."""
        return QuadRat.parse(str(self.run_specs["radius"]), self.discriminant)

    @radius.setter
    def radius(self, value: Union[str, int]):
        self.run_specs["radius"] = str(value)

    @property
    def output_format(self) -> str:
        """Configured format, or the command's default when unset."""
        return self.run_specs.get("output_format") or DEFAULT_FORMATS.get(self.command, "csv")

    @output_format.setter
    def output_format(self, name: str):
        self.run_specs["output_format"] = name

    @property
    def output_path(self) -> Union[Path, None]:
        path = self.run_specs.get("output_path", "")
        return Path(path) if path else None

    @output_path.setter
    def output_path(self, path: Union[str, Path]):
        self.run_specs["output_path"] = str(path)

    @property
    def threads(self) -> int:
        """Worker processes; 0 in the file means every logical CPU."""
        threads = int(self.run_specs["threads"])
        return threads if threads > 0 else (psutil.cpu_count() or 1)

    @threads.setter
    def threads(self, count: int):
        self.run_specs["threads"] = int(count)

    @property
    def save_config(self) -> bool:
        return bool(self.run_specs.get("save_config", False))

    @save_config.setter
    def save_config(self, flag: bool):
        self.run_specs["save_config"] = bool(flag)

    @property
    def log_path(self) -> Union[Path, None]:
        path = self.run_specs.get("log_path", "")
        return Path(path) if path else None

    @log_path.setter
    def log_path(self, path: Union[str, Path]):
        self.run_specs["log_path"] = str(path)

    @property
    def shift(self) -> List[str]:
        return [str(value) for value in self.tiling_specs["shift"]]

    @shift.setter
    def shift(self, values: Union[str, List[str]]):
        if isinstance(values, str):
            values = values.split(",")
        self.tiling_specs["shift"] = [value.strip() for value in values]

    @property
    def z(self) -> str:
        return str(self.tiling_specs["z"])

    @z.setter
    def z(self, coords: str):
        self.tiling_specs["z"] = coords

    @property
    def patch_margin_edges(self) -> float:
        return self.tiling_specs["patch_margin_edges"]

    @property
    def support_validation_edges(self) -> float:
        return self.tiling_specs["support_validation_edges"]

    # Derived parameters. Note that these do not have setters.
    @property
    def n(self) -> int:
        return 8 if self.tiling == "ammann-beenker" else 12

    @property
    def discriminant(self) -> int:
        return 2 if self.tiling == "ammann-beenker" else 3

    @property
    def shift_fractions(self) -> Tuple[Fraction, Fraction]:
        values = self.shift
        if len(values) != 2:
            raise ValueError(f"expected two values, got {values}")
        return Fraction(values[0]), Fraction(values[1])

    @property
    def difference_vector(self) -> CycloInt:
        return CycloInt.parse(self.z, self.n)

    @property
    def tiling_config(self) -> TilingConfig:
        return TilingConfig.from_name(self.tiling, self.shift_fractions)

    @property
    def min_margin(self) -> float:
        """Extra BFS center margin in physical units."""
        return self.tolerances["min_margin_edges"] * self.tiling_config.edge_length

    def bfs_tolerance(self, tiling: str) -> float:
        if tiling == "ammann-beenker":
            return self.tolerances["bfs_relative_ab"]
        return self.tolerances["bfs_relative_shield"]
