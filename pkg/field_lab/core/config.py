import logging
import os

from .errors import ConfigError
from .utils import serialize, sha256_hash

logger = logging.getLogger(__name__)

ENV_PREFIX = "FIELDLAB_"

CONFIG = {
    "grid.n": 16,
    "grid.h": 0.25,
    "physics.c": 1.0,  # Heaviside-Lorentz speed of light
    "physics.hbar": 1.0,
    "physics.k_b": 1.0,
    "physics.quantum": True,  # sqrt(hbar) in the mode normalisation
    "run.seed": 0,
    "run.steps": 100,
    "run.dt": 0.01,
    "run.cadence": 0,  # snapshot every N steps, 0 disables snapshots
    "run.threads": 1,
    "output.dir": "out",
    "init.preset": "plane-wave",  # plane-wave, gaussian-packet, random-transverse, file
    "init.amplitude": 1.0,
    "init.mode": "1,0,0",  # lattice wavevector index for plane waves / packet centre
    "init.polarization": 1,
    "init.width": 1.0,  # packet width in lattice-index units of k
    "init.modes": 10,  # number of random modes
    "init.kmax": 3,  # largest |m_i| of random modes
    "init.file_a": "",
    "init.file_e": "",
    "majorana.compare": False,
    "majorana.convention": "maxwell",  # maxwell or verbatim
    "dual.preset": "pulse",  # static-monopole, oscillating-dipole, pulse
    "dual.magnetic_sign": 1.0,  # +1 as printed in the symmetric equations, -1 conventional
    "dual.strength": 1.0,
    "dual.frequency": 1.0,
    "dual.width": 2.0,  # source width in grid cells
    "dual.cfl": 0.0,  # if > 0, dt = dual.cfl * CFL limit instead of run.dt
    "dual.magnetic_world": False,
    "dual.continuity_tol": 1e-6,
    "dual.energy_tol": 1e-6,  # relative drift of sum (E^2 + H^2)/2 h^3 for source-free runs
    "brackets.states": 20,
    "brackets.points": 10,
    "brackets.modes": 3,
    "brackets.tolerance": 1e-6,
    "brackets.numeric": False,  # finite-difference Hamiltonian derivatives
    "fock.n_max": 8,
    "fock.omega": 1.0,
    "fock.temperatures": "1.0",
    "fock.occupancy_cutoff": 60,
    "clebsch.preset": "trig",  # trig, harmonic, random
    "clebsch.sweep": False,
    "clebsch.length": 6.4,
    "clebsch.spacings": "0.4,0.2,0.1",
    "diag.charges": "1,2,5",
    "diag.points": 20,
    "diag.step": 1e-4,
    "logging_level": "INFO",
}

# Keys that never change a result; left out of the config hash.
HASH_EXCLUDED = ("output.dir", "run.threads", "logging_level")
MAX_SEED = 2**63 - 1

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def env_name(key):
    return ENV_PREFIX + key.upper().replace(".", "_")


def coerce(key, raw):
    """
    Convert a raw value to the type of the default for ``key``.
    """
    if key not in CONFIG:
        raise ConfigError(f"unknown config key {key!r}")
    default = CONFIG[key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(
            f"config key {key!r}: cannot read {raw!r} as {type(default).__name__}"
        ) from None
    return text


def parse_config_text(text, origin="<config>"):
    """
    Parse flat ``key = value`` text. Blank lines and '#' comments are skipped.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"{origin}:{lineno}: empty key")
        values[key] = coerce(key, value)
    return values


class ScenarioConfig:
    def __init__(self, subcommand, values):
        self.subcommand = subcommand
        self.values = dict(CONFIG)
        for key, value in values.items():
            self.values[key] = coerce(key, value)
        seed = self.values["run.seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
            raise ConfigError(f"run.seed must be an integer in [0, 2**63 - 1], got {seed!r}")

    def __getitem__(self, key):
        return self.values[key]

    @property
    def seed(self):
        return self.values["run.seed"]

    def floats(self, key):
        text = str(self.values[key])
        try:
            return [float(item) for item in text.split(",") if item.strip()]
        except ValueError:
            raise ConfigError(f"config key {key!r}: expected comma-separated numbers") from None

    def as_dict(self):
        return {"subcommand": self.subcommand, **self.values}

    def config_hash(self):
        relevant = {k: v for k, v in self.as_dict().items() if k not in HASH_EXCLUDED}
        return sha256_hash(serialize(relevant))

    def __repr__(self):
        return f"ScenarioConfig({self.subcommand}, hash={self.config_hash()[:10]}...)"


def load_config(subcommand, path=None, overrides=None, environ=None):
    """
    Resolve a scenario config: defaults, then file, then environment, then overrides.
    """
    values = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        values.update(parse_config_text(text, origin=str(path)))

    environ = os.environ if environ is None else environ
    for key in CONFIG:
        name = env_name(key)
        if name in environ:
            values[key] = coerce(key, environ[name])
            logger.debug("config %s taken from %s", key, name)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        values[key] = coerce(key, value)

    return ScenarioConfig(subcommand, values)
