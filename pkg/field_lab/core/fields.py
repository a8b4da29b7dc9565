import logging

import numpy as np
import pandas as pd
from scipy import fft

from .errors import GridMismatchError, InvalidInputError
from .utils import atomic_write_bytes, write_table

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b"FLDGRID1"
SNAPSHOT_HEADER = np.dtype(
    [("magic", "S8"), ("n", "<i8"), ("h", "<f8"), ("c", "<f8"), ("ncomp", "<i8")]
)

# Levi-Civita symbol e_{ikl}
LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0

_AXES = (-3, -2, -1)


class GridSpec:
    """Periodic cubic lattice of n**3 points with spacing h."""

    def __init__(self, n, h, c=1.0):
        if int(n) != n or n < 4:
            raise InvalidInputError(f"grid needs an integer n >= 4, got {n!r}")
        if not np.isfinite(h) or h <= 0:
            raise InvalidInputError(f"grid spacing must be positive, got {h!r}")
        if not np.isfinite(c) or c <= 0:
            raise InvalidInputError(f"speed of light must be positive, got {c!r}")
        self.n = int(n)
        self.h = float(h)
        self.c = float(c)

    @property
    def length(self):
        return self.n * self.h

    @property
    def volume(self):
        return self.length**3

    @property
    def cell_volume(self):
        return self.h**3

    @property
    def shape(self):
        return (self.n, self.n, self.n)

    def coordinates(self):
        axis = np.arange(self.n) * self.h
        return np.meshgrid(axis, axis, axis, indexing="ij")

    def wavenumbers(self):
        """
        Angular wavenumbers along one axis, with the Nyquist entry zeroed
        on even grids so that spectral derivatives of real fields stay real.
        """
        k = 2.0 * np.pi * fft.fftfreq(self.n, d=self.h)
        if self.n % 2 == 0:
            k[self.n // 2] = 0.0
        return k

    def wavevectors(self):
        k = self.wavenumbers()
        kx, ky, kz = np.meshgrid(k, k, k, indexing="ij")
        return np.stack([kx, ky, kz])

    def mode_indices(self):
        """Integer lattice indices m with k = 2*pi*m/(n*h), in FFT order."""
        m = np.rint(fft.fftfreq(self.n, d=1.0 / self.n)).astype(int)
        mx, my, mz = np.meshgrid(m, m, m, indexing="ij")
        return np.stack([mx, my, mz])

    def nyquist_mask(self):
        """True for every mode that carries a Nyquist index on some axis."""
        if self.n % 2:
            return np.zeros(self.shape, dtype=bool)
        m = self.mode_indices()
        return np.any(np.abs(m) == self.n // 2, axis=0)

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (self.n, self.h, self.c) == (other.n, other.h, other.c)

    def __hash__(self):
        return hash((self.n, self.h, self.c))

    def __repr__(self):
        return f"GridSpec(n={self.n}, h={self.h!r}, c={self.c!r})"


class _FieldGrid:
    ncomp = 1

    def __init__(self, spec, values):
        values = np.array(values, dtype=float)
        expected = self._expected_shape(spec)
        if values.shape != expected:
            raise GridMismatchError(
                f"{type(self).__name__} expects shape {expected}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError(f"{type(self).__name__} contains non-finite values")
        values.setflags(write=False)
        self.spec = spec
        self.values = values

    @classmethod
    def _expected_shape(cls, spec):
        raise NotImplementedError

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(cls._expected_shape(spec)))

    def _same_grid(self, other):
        if not isinstance(other, type(self)) or other.spec != self.spec:
            raise GridMismatchError(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other):
        self._same_grid(other)
        return type(self)(self.spec, self.values + other.values)

    def __sub__(self, other):
        self._same_grid(other)
        return type(self)(self.spec, self.values - other.values)

    def __mul__(self, scalar):
        return type(self)(self.spec, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(self.spec, -self.values)

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def l2(self):
        """Discrete L2 norm, sqrt(sum |f|^2 h^3)."""
        return float(np.sqrt(np.sum(self.values**2) * self.spec.cell_volume))

    def inner(self, other):
        self._same_grid(other)
        return float(np.sum(self.values * other.values) * self.spec.cell_volume)

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


class ScalarFieldGrid(_FieldGrid):
    ncomp = 1

    @classmethod
    def _expected_shape(cls, spec):
        return spec.shape


class VectorFieldGrid(_FieldGrid):
    ncomp = 3

    @classmethod
    def _expected_shape(cls, spec):
        return (3,) + spec.shape

    def component(self, i):
        return ScalarFieldGrid(self.spec, self.values[i])

    def dot(self, other):
        self._same_grid(other)
        return ScalarFieldGrid(self.spec, np.sum(self.values * other.values, axis=0))

    def cross(self, other):
        self._same_grid(other)
        return VectorFieldGrid(self.spec, np.cross(self.values, other.values, axis=0))

    def magnitude(self):
        return ScalarFieldGrid(self.spec, np.sqrt(np.sum(self.values**2, axis=0)))


def check_same_grid(*fields):
    specs = {field.spec for field in fields}
    if len(specs) > 1:
        raise GridMismatchError(f"fields live on different grids: {sorted(map(repr, specs))}")


# ---------------------------------------------------------------------------
# Central differences (second order, periodic)


def central_difference(values, axis, h):
    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)


def gradient(s):
    h = s.spec.h
    return VectorFieldGrid(
        s.spec, np.stack([central_difference(s.values, axis, h) for axis in range(3)])
    )


def divergence(f):
    h = f.spec.h
    total = sum(central_difference(f.values[i], i, h) for i in range(3))
    return ScalarFieldGrid(f.spec, total)


def curl(f):
    h = f.spec.h
    d = lambda i, axis: central_difference(f.values[i], axis, h)
    return VectorFieldGrid(
        f.spec,
        np.stack([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]),
    )


def laplacian(s):
    """Compact 7-point Laplacian."""
    h = s.spec.h
    v = s.values
    total = sum(np.roll(v, -1, axis) - 2.0 * v + np.roll(v, 1, axis) for axis in range(3))
    return ScalarFieldGrid(s.spec, total / h**2)


def vector_laplacian(f):
    return VectorFieldGrid(
        f.spec, np.stack([laplacian(f.component(i)).values for i in range(3)])
    )


def gauge_transform(a, psi):
    """A + grad(psi); leaves the central-difference curl unchanged."""
    if a.spec != psi.spec:
        raise GridMismatchError(f"gauge function on {psi.spec!r} does not match {a.spec!r}")
    return a + gradient(psi)


# ---------------------------------------------------------------------------
# Spectral operators


def to_spectrum(values):
    return fft.fftn(values, axes=_AXES)


def from_spectrum(values_hat):
    return np.real(fft.ifftn(values_hat, axes=_AXES))


def spectral_gradient(s):
    k = s.spec.wavevectors()
    return VectorFieldGrid(s.spec, from_spectrum(1j * k * to_spectrum(s.values)))


def spectral_divergence(f):
    k = f.spec.wavevectors()
    return ScalarFieldGrid(f.spec, from_spectrum(1j * np.sum(k * to_spectrum(f.values), axis=0)))


def spectral_curl_hat(k, f_hat):
    return 1j * np.cross(k, f_hat, axis=0)


def spectral_curl(f):
    k = f.spec.wavevectors()
    return VectorFieldGrid(f.spec, from_spectrum(spectral_curl_hat(k, to_spectrum(f.values))))


def spectral_laplacian(s):
    k = s.spec.wavevectors()
    return ScalarFieldGrid(s.spec, from_spectrum(-np.sum(k**2, axis=0) * to_spectrum(s.values)))


def _split_hat(spec, f_hat):
    k = spec.wavevectors()
    k2 = np.sum(k**2, axis=0)
    safe = np.where(k2 > 0, k2, 1.0)
    longitudinal = k * (np.sum(k * f_hat, axis=0) / safe)
    longitudinal[:, k2 == 0] = 0.0
    dc_hat = f_hat[:, 0, 0, 0].copy()
    transverse = f_hat - longitudinal
    transverse[:, 0, 0, 0] = 0.0
    return transverse, longitudinal, dc_hat


def helmholtz_split(f):
    """
    Split f into transverse and longitudinal parts plus its mean.

    Modes whose wavevector vanishes only because of the zeroed Nyquist entries
    have no longitudinal direction and are counted as transverse.
    """
    transverse_hat, longitudinal_hat, dc_hat = _split_hat(f.spec, to_spectrum(f.values))
    dc = np.real(dc_hat) / f.spec.n**3
    return (
        VectorFieldGrid(f.spec, from_spectrum(transverse_hat)),
        VectorFieldGrid(f.spec, from_spectrum(longitudinal_hat)),
        dc,
    )


def project_transverse(f, keep_dc=True):
    transverse_hat, _, dc_hat = _split_hat(f.spec, to_spectrum(f.values))
    if keep_dc:
        transverse_hat[:, 0, 0, 0] = dc_hat
    return VectorFieldGrid(f.spec, from_spectrum(transverse_hat))


def project_resolved(f):
    """
    Transverse part of f restricted to the modes a plane-wave expansion can
    carry: the mean and every mode with a Nyquist index are removed.
    """
    transverse_hat, _, _ = _split_hat(f.spec, to_spectrum(f.values))
    transverse_hat[:, f.spec.nyquist_mask()] = 0.0
    return VectorFieldGrid(f.spec, from_spectrum(transverse_hat))


def spectral_divergence_norm(f):
    """Relative spectral norm of k.f_hat, normalised by the norm of f_hat."""
    f_hat = to_spectrum(f.values)
    k = f.spec.wavevectors()
    k2 = np.sum(k**2, axis=0)
    safe = np.sqrt(np.where(k2 > 0, k2, 1.0))
    scale = np.linalg.norm(f_hat)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(np.sum(k * f_hat, axis=0) / safe) / scale)


# ---------------------------------------------------------------------------
# Random smooth fields


def random_smooth_spectrum(spec, rng, ncomp, kmax):
    """Complex spectrum with random entries on |m_i| <= kmax, Nyquist excluded."""
    m = spec.mode_indices()
    band = np.all(np.abs(m) <= kmax, axis=0) & ~spec.nyquist_mask()
    shape = (ncomp,) + spec.shape
    spectrum = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.where(band, spectrum, 0.0)


def random_smooth_scalar(spec, rng, kmax=2, amplitude=1.0):
    values = from_spectrum(random_smooth_spectrum(spec, rng, 1, kmax))[0]
    scale = np.max(np.abs(values)) or 1.0
    return ScalarFieldGrid(spec, amplitude * values / scale)


def random_smooth_vector(spec, rng, kmax=2, amplitude=1.0):
    values = from_spectrum(random_smooth_spectrum(spec, rng, 3, kmax))
    scale = np.max(np.abs(values)) or 1.0
    return VectorFieldGrid(spec, amplitude * values / scale)


# ---------------------------------------------------------------------------
# Spherical diagnostics


class SphericalSamples:
    """
    Sample points (r, theta, phi) together with the analytic spherical
    components of a field. Missing components are identically zero.
    """

    def __init__(self, points, e_r, e_theta=None, e_phi=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.ndim != 2 or points.shape[1] != 3:
            raise InvalidInputError("sample points must be (r, theta, phi) triples")
        r, theta = points[:, 0], points[:, 1]
        if np.any(r <= 0):
            raise InvalidInputError("spherical samples need r > 0")
        if np.any(theta <= 0) or np.any(theta >= np.pi) or np.any(np.sin(theta) == 0):
            raise InvalidInputError("spherical samples need 0 < theta < pi")
        zero = lambda r, theta, phi: 0.0 * r
        self.points = points
        self.e_r = e_r
        self.e_theta = e_theta or zero
        self.e_phi = e_phi or zero

    @property
    def components(self):
        r, theta, phi = self.points.T
        return np.stack(
            [
                np.broadcast_to(self.e_r(r, theta, phi), r.shape),
                np.broadcast_to(self.e_theta(r, theta, phi), r.shape),
                np.broadcast_to(self.e_phi(r, theta, phi), r.shape),
            ],
            axis=1,
        )

    def __len__(self):
        return len(self.points)


def spherical_divergence(samples, rel_step=1e-4):
    """
    Divergence in spherical coordinates by symmetric differences: the radial
    step is rel_step*r, the angular steps are rel_step radians.
    """
    if rel_step <= 0:
        raise InvalidInputError(f"probe step must be positive, got {rel_step!r}")
    r, theta, phi = samples.points.T
    dr = rel_step * r
    da = rel_step
    sin_t = np.sin(theta)

    radial = (
        (r + dr) ** 2 * samples.e_r(r + dr, theta, phi)
        - (r - dr) ** 2 * samples.e_r(r - dr, theta, phi)
    ) / (2.0 * dr)
    polar = (
        np.sin(theta + da) * samples.e_theta(r, theta + da, phi)
        - np.sin(theta - da) * samples.e_theta(r, theta - da, phi)
    ) / (2.0 * da)
    azimuthal = (samples.e_phi(r, theta, phi + da) - samples.e_phi(r, theta, phi - da)) / (
        2.0 * da
    )
    result = radial / r**2 + (polar + azimuthal) / (r * sin_t)
    return [float(value) for value in np.broadcast_to(result, r.shape)]


def radial_falloff_fit(samples):
    """
    Least-squares fit of log|E_r| against log r.

    Returns (exponent, amplitude) so that |E_r| ~ amplitude * r**exponent.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 3:
        raise InvalidInputError("falloff fit needs at least three (r, |E_r|) samples")
    r, magnitude = data.T
    if np.any(r <= 0):
        raise InvalidInputError("falloff fit needs r > 0")
    if len(np.unique(r)) != len(r):
        raise InvalidInputError("falloff fit needs distinct radii")
    if np.any(magnitude <= 0):
        raise InvalidInputError("falloff fit needs positive magnitudes")
    design = np.column_stack([np.log(r), np.ones_like(r)])
    (slope, intercept), *_ = np.linalg.lstsq(design, np.log(magnitude), rcond=None)
    return float(slope), float(np.exp(intercept))


# ---------------------------------------------------------------------------
# Snapshots


def snapshot_bytes(field):
    header = np.zeros(1, dtype=SNAPSHOT_HEADER)
    header["magic"] = SNAPSHOT_MAGIC
    header["n"] = field.spec.n
    header["h"] = field.spec.h
    header["c"] = field.spec.c
    header["ncomp"] = field.ncomp
    body = np.ascontiguousarray(field.values, dtype="<f8")
    return header.tobytes() + body.tobytes()


def write_snapshot(path, field):
    atomic_write_bytes(path, snapshot_bytes(field))
    logger.debug("snapshot %s written to %s", field, path)


def read_snapshot(path):
    with open(path, "rb") as handle:
        payload = handle.read()
    if len(payload) < SNAPSHOT_HEADER.itemsize:
        raise InvalidInputError(f"{path}: truncated snapshot header")
    header = np.frombuffer(payload[: SNAPSHOT_HEADER.itemsize], dtype=SNAPSHOT_HEADER)[0]
    if bytes(header["magic"]) != SNAPSHOT_MAGIC:
        raise InvalidInputError(f"{path}: not a field snapshot")
    spec = GridSpec(int(header["n"]), float(header["h"]), float(header["c"]))
    ncomp = int(header["ncomp"])
    body = np.frombuffer(payload[SNAPSHOT_HEADER.itemsize :], dtype="<f8")
    if body.size != ncomp * spec.n**3:
        raise InvalidInputError(f"{path}: body holds {body.size} values, expected {ncomp * spec.n**3}")
    if ncomp == 1:
        return ScalarFieldGrid(spec, body.reshape(spec.shape))
    if ncomp == 3:
        return VectorFieldGrid(spec, body.reshape((3,) + spec.shape))
    raise InvalidInputError(f"{path}: unsupported component count {ncomp}")


def snapshot_table(field):
    x, y, z = field.spec.coordinates()
    frame = pd.DataFrame({"x": x.ravel(), "y": y.ravel(), "z": z.ravel()})
    if field.ncomp == 1:
        frame["f"] = field.values.ravel()
    else:
        for name, values in zip(("fx", "fy", "fz"), field.values):
            frame[name] = values.ravel()
    return frame


def write_snapshot_csv(path, field, header_lines=()):
    write_table(path, snapshot_table(field), header_lines)
