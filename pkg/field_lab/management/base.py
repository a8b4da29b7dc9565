import logging

from django.core.management.base import BaseCommand, CommandError
from scipy import fft

from field_lab.core.config import load_config
from field_lab.core.errors import ConfigError, FieldLabError, InvalidInputError
from field_lab.core.scenarios import scenario_engine

logger = logging.getLogger(__name__)

VERBOSITY_LEVELS = {0: logging.WARNING, 2: logging.DEBUG, 3: logging.DEBUG}


class ScenarioCommand(BaseCommand):
    """
    Shared base of the laboratory subcommands.

    Global flags are --config, --seed, --out, --threads, --set KEY=VALUE and
    --record. Subclasses register their own flags with ``option`` so that each
    one overrides a config key. Invalid input exits with status 1, any other
    failure with status 2.
    """

    subcommand = None

    def add_arguments(self, parser):
        self.option_keys = {}
        parser.add_argument("--config", dest="config_path", help="flat key = value config file")
        parser.add_argument("--seed", type=int, help="RNG seed (overrides run.seed)")
        parser.add_argument("--out", dest="output_dir", help="output directory (overrides output.dir)")
        parser.add_argument("--threads", type=int, help="FFT worker count (overrides run.threads)")
        parser.add_argument(
            "--set",
            dest="assignments",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override any config key; may be repeated",
        )
        parser.add_argument(
            "--record", action="store_true", help="store the run and its metrics in the database"
        )
        self.add_scenario_arguments(parser)

    def add_scenario_arguments(self, parser):
        pass

    def option(self, parser, flag, key, **kwargs):
        dest = key.replace(".", "_")
        parser.add_argument(flag, dest=dest, default=None, help=f"overrides {key}", **kwargs)
        self.option_keys[dest] = key

    def flag(self, parser, flag, key):
        self.option(parser, flag, key, action="store_const", const=True)

    def add_grid_arguments(self, parser):
        self.option(parser, "--grid", "grid.n", type=int)
        self.option(parser, "--spacing", "grid.h", type=float)

    def add_run_arguments(self, parser):
        self.option(parser, "--dt", "run.dt", type=float)
        self.option(parser, "--steps", "run.steps", type=int)
        self.option(parser, "--cadence", "run.cadence", type=int)

    def add_initial_arguments(self, parser):
        self.option(parser, "--preset", "init.preset")
        self.option(parser, "--amplitude", "init.amplitude", type=float)
        self.option(parser, "--mode", "init.mode")
        self.option(parser, "--polarization", "init.polarization", type=int)

    def collect_overrides(self, options):
        overrides = {}
        for item in options.get("assignments") or []:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key.strip()] = value.strip()
        overrides["run.seed"] = options.get("seed")
        overrides["run.threads"] = options.get("threads")
        for dest, key in self.option_keys.items():
            overrides[key] = options.get(dest)
        return overrides

    def configure_logging(self, verbosity, config=None):
        level = VERBOSITY_LEVELS.get(verbosity)
        if level is None:
            name = config["logging_level"] if config is not None else "INFO"
            level = logging.getLevelName(str(name).upper())
            if not isinstance(level, int):
                raise ConfigError(f"unknown logging level {name!r}")
        logging.getLogger("field_lab").setLevel(level)

    def handle(self, *args, **options):
        self.configure_logging(options["verbosity"])
        try:
            config = load_config(
                self.subcommand, options.get("config_path"), self.collect_overrides(options)
            )
            self.configure_logging(options["verbosity"], config)
            threads = config["run.threads"]
            if threads < 1:
                raise ConfigError(f"run.threads must be at least 1, got {threads!r}")
            output_dir = options.get("output_dir") or config["output.dir"]
            with fft.set_workers(threads):
                written = scenario_engine.run(config, output_dir, record=options["record"])
        except InvalidInputError as exc:
            raise CommandError(f"invalid input: {exc}", returncode=1) from exc
        except FieldLabError as exc:
            raise CommandError(f"{self.subcommand} failed: {exc}", returncode=2) from exc
        except Exception as exc:
            logger.exception("%s aborted", self.subcommand)
            raise CommandError(f"{self.subcommand} aborted: {exc}", returncode=2) from exc
        self.stdout.write(f"{self.subcommand}: wrote {len(written)} files to {output_dir}")
