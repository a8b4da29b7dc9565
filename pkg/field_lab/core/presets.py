import logging

import numpy as np

from .errors import InvalidInputError, UnknownPresetError
from .fields import VectorFieldGrid, project_resolved, read_snapshot
from .propagator import SpectralModeSet, expand, polarization_basis, random_modes

logger = logging.getLogger(__name__)


def parse_mode(text):
    """'1,0,0' -> (1, 0, 0)."""
    try:
        parts = tuple(int(p) for p in str(text).split(","))
    except ValueError:
        raise InvalidInputError(f"mode must be three comma-separated integers, got {text!r}") from None
    if len(parts) != 3:
        raise InvalidInputError(f"mode must have three indices, got {text!r}")
    return parts


def _polarization(config):
    alpha = config["init.polarization"]
    if alpha not in (1, 2):
        raise InvalidInputError(f"init.polarization must be 1 or 2, got {alpha!r}")
    return alpha


def plane_wave_modes(spec, config, rng=None):
    """A = amplitude * e_alpha * cos(k.x) for the single lattice mode init.mode."""
    hbar, quantum = config["physics.hbar"], config["physics.quantum"]
    index = parse_mode(config["init.mode"])
    alpha = _polarization(config)
    unit = SpectralModeSet.from_modes(spec, {index + (alpha,): 1.0}, hbar, quantum)
    # synthesize gives A = 2 N Re(c e^{ik.x}) e
    norm = unit.normalization()[tuple(i % spec.n for i in index)]
    return unit.replace(unit.amplitudes * config["init.amplitude"] / (2.0 * norm))


def gaussian_packet_modes(spec, config, rng=None):
    """
    Amplitudes amplitude * exp(-|m - m0|^2 / (2 w^2)) in polarization alpha,
    centred on the lattice index init.mode with width init.width.
    """
    width = config["init.width"]
    if width <= 0:
        raise InvalidInputError(f"init.width must be positive, got {width!r}")
    centre = np.array(parse_mode(config["init.mode"]), dtype=float).reshape(3, 1, 1, 1)
    alpha = _polarization(config)
    m = spec.mode_indices()
    envelope = np.exp(-np.sum((m - centre) ** 2, axis=0) / (2.0 * width**2))
    amplitudes = np.zeros((2,) + spec.shape, dtype=complex)
    amplitudes[alpha - 1] = config["init.amplitude"] * envelope
    modes = SpectralModeSet(spec, amplitudes, config["physics.hbar"], config["physics.quantum"])
    if modes.norm2() == 0.0:
        raise InvalidInputError("gaussian packet has no weight on resolved modes")
    return modes


def random_transverse_modes(spec, config, rng):
    return random_modes(
        spec,
        rng,
        count=config["init.modes"],
        kmax=config["init.kmax"],
        amplitude=config["init.amplitude"],
        hbar=config["physics.hbar"],
        quantum=config["physics.quantum"],
    )


def snapshot_file_modes(spec, config, rng=None):
    """
    Read A and E from binary snapshots and expand their transverse parts.
    The uniform part and the Nyquist modes of either field have no
    plane-wave mode and are dropped.
    """
    paths = config["init.file_a"], config["init.file_e"]
    if not all(paths):
        raise InvalidInputError("the file preset needs init.file_a and init.file_e")
    try:
        a, e_field = (read_snapshot(path) for path in paths)
    except OSError as exc:
        raise InvalidInputError(f"cannot read snapshot: {exc}") from exc
    for name, field in (("A", a), ("E", e_field)):
        if not isinstance(field, VectorFieldGrid):
            raise InvalidInputError(f"snapshot for {name} does not hold a vector field")
        if field.spec != spec:
            logger.info("using grid %r from snapshot instead of the configured %r", field.spec, spec)
    a = project_resolved(a)
    e_field = project_resolved(e_field)
    return expand(a, e_field, config["physics.hbar"], config["physics.quantum"])


PRESETS = {
    "plane-wave": plane_wave_modes,
    "gaussian-packet": gaussian_packet_modes,
    "random-transverse": random_transverse_modes,
    "file": snapshot_file_modes,
}


def build_modes(spec, config, rng):
    """Initial mode set named by init.preset."""
    name = config["init.preset"]
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown initial-condition preset {name!r}, expected one of {sorted(PRESETS)}"
        ) from None
    modes = builder(spec, config, rng)
    logger.info(
        "preset %s: %d active modes of %d resolved",
        name,
        int(np.count_nonzero(modes.amplitudes)),
        polarization_basis(modes.spec).mode_count(),
    )
    return modes
