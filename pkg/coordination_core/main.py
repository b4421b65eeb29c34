"""Command line front end: coordnum COMMAND [options]."""

import argparse
import logging
import sys
from typing import List, Optional

import coloredlogs

from coordination_core.config_base import COMMANDS, FORMATS, RunConfig
from coordination_core.run_base import CoordinationRun
from coordination_core.tilings.coordnum import METHODS
from coordination_core.tilings.modelset import TILING_NAMES, BoundaryHit
from coordination_core.verification import VerificationError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BOUNDARY = 3
EXIT_INVALID = 4
EXIT_VERIFICATION = 5
EXIT_IO = 6
EXIT_COMPUTATION = 7
EXIT_MEMORY = 8

EPILOG = f"""\
difference vectors:
  --z a0,a1,a2,a3 means a0 + a1*xi + a2*xi^2 + a3*xi^3 with xi = exp(2 pi i / n),
  n = 8 for ammann-beenker and n = 12 for shield.

radius:
  exact values such as 80, 5/2 or 1+sqrt(2). shelling lists every shell with r <= radius.

exit codes:
  {EXIT_OK}  success
  {EXIT_USAGE}  command line usage error
  {EXIT_BOUNDARY}  a lattice point projects onto the window boundary (non-generic shift)
  {EXIT_INVALID}  invalid configuration, tiling/method/command combination or input value
  {EXIT_VERIFICATION}  verify: at least one check failed
  {EXIT_IO}  file could not be read or written
  {EXIT_COMPUTATION}  computation error (seed, support or BFS center search failed)
  {EXIT_MEMORY}  not enough memory for the requested patch
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coordnum",
        description="Exact shelling and coordination numbers of the Ammann-Beenker and shield tilings.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="What to compute.")
    parser.add_argument("--config", help="TOML or YAML run config; flags override its values.")
    parser.add_argument("--tiling", choices=TILING_NAMES)
    parser.add_argument("--method", choices=METHODS, help="coordination method.")
    parser.add_argument("--kmax", dest="k_max", type=int, help="Largest graph distance k.")
    parser.add_argument("--radius", help="Patch radius, or shell radius bound for shelling.")
    parser.add_argument("--format", dest="output_format", choices=FORMATS)
    parser.add_argument("--output", dest="output_path", help="Output file; stdout when omitted.")
    parser.add_argument("--threads", type=int, help="Worker processes; 0 for all logical CPUs.")
    parser.add_argument("--shift", help="Window shift as two rationals, e.g. 1/7,1/13.")
    parser.add_argument("--z", help="Difference vector a0,a1,a2,a3 for nu.")
    parser.add_argument("--log", dest="log_path", help="Also log to this file.")
    parser.add_argument(
        "--save-config", dest="save_config", action="store_true",
        help="Save the effective config as <output>.config.toml.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only log warnings and errors.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else "INFO"
    coloredlogs.install(level=level, stream=sys.stderr,
                        fmt="%(asctime)s.%(msecs)03d %(levelname)s %(name)s: %(message)s",
                        datefmt="%Y-%m-%d,%H:%M:%S")
    try:
        run_cfg = RunConfig.from_arguments(args)
        CoordinationRun(run_cfg).run()
    except BoundaryHit as error:
        log.error(f"{error} Pick another --shift.")
        return EXIT_BOUNDARY
    except VerificationError as error:
        log.error(str(error))
        return EXIT_VERIFICATION
    except (AssertionError, ValueError) as error:
        log.error(str(error))
        return EXIT_INVALID
    except MemoryError as error:
        log.error(str(error))
        return EXIT_MEMORY
    except OSError as error:
        log.error(f"I/O error: {error}")
        return EXIT_IO
    except Exception as error:
        log.exception(f"Computation failed: {error}")
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
