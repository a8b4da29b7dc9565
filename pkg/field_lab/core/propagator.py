import functools
import logging

import numpy as np

from .errors import GridMismatchError, InvalidInputError, NotTransverseError
from .fields import (
    VectorFieldGrid,
    from_spectrum,
    spectral_curl_hat,
    to_spectrum,
)

logger = logging.getLogger(__name__)

TRANSVERSE_TOLERANCE = 1e-8


def negate_modes(values):
    """Reindex a spectrum from k to -k on the periodic lattice."""
    return np.roll(np.flip(values, axis=(-3, -2, -1)), 1, axis=(-3, -2, -1))


class PolarizationBasis:
    """
    Real orthonormal polarization vectors for every resolved lattice mode.

    A mode is resolved when k != 0 and none of its indices sits on the
    Nyquist plane. e1 is the Gram-Schmidt image of the coordinate axis least
    aligned with k (ties go to x, then y, then z) and e2 = n x e1.
    """

    def __init__(self, spec):
        self.spec = spec
        k = spec.wavevectors()
        k2 = np.sum(k**2, axis=0)
        self.resolved = (k2 > 0) & ~spec.nyquist_mask()
        kabs = np.sqrt(k2)
        safe = np.where(self.resolved, kabs, 1.0)
        n_hat = np.where(self.resolved, k / safe, 0.0)

        axis = np.argmin(np.abs(n_hat), axis=0)
        trial = np.stack([(axis == i).astype(float) for i in range(3)])
        e1 = trial - np.sum(trial * n_hat, axis=0) * n_hat
        e1_norm = np.sqrt(np.sum(e1**2, axis=0))
        e1 = np.where(self.resolved, e1 / np.where(e1_norm > 0, e1_norm, 1.0), 0.0)
        e2 = np.cross(n_hat, e1, axis=0)

        self.k = k
        self.kabs = np.where(self.resolved, kabs, 0.0)
        self.n_hat = n_hat
        self.e = np.stack([e1, e2])
        for array in (self.resolved, self.k, self.kabs, self.n_hat, self.e):
            array.setflags(write=False)

    @property
    def omega(self):
        return self.spec.c * self.kabs

    def mode_count(self):
        return 2 * int(np.count_nonzero(self.resolved))


@functools.lru_cache(maxsize=16)
def polarization_basis(spec):
    return PolarizationBasis(spec)


class SpectralModeSet:
    """
    Complex amplitudes c[alpha, i, j, k] of the transverse plane-wave
    expansion. Entries of unresolved modes are always zero.

    With ``quantum`` set, the mode normalisation carries a factor sqrt(hbar)
    and the energy of a mode is hbar*omega*|c|^2; otherwise it is omega*|c|^2.
    """

    def __init__(self, spec, amplitudes, hbar=1.0, quantum=True):
        amplitudes = np.array(amplitudes, dtype=complex)
        if amplitudes.shape != (2,) + spec.shape:
            raise GridMismatchError(
                f"mode amplitudes need shape {(2,) + spec.shape}, got {amplitudes.shape}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidInputError("mode amplitudes must be finite")
        if hbar <= 0:
            raise InvalidInputError(f"hbar must be positive, got {hbar!r}")
        basis = polarization_basis(spec)
        amplitudes[:, ~basis.resolved] = 0.0
        amplitudes.setflags(write=False)
        self.spec = spec
        self.amplitudes = amplitudes
        self.hbar = float(hbar)
        self.quantum = bool(quantum)

    @classmethod
    def empty(cls, spec, hbar=1.0, quantum=True):
        return cls(spec, np.zeros((2,) + spec.shape, dtype=complex), hbar, quantum)

    @classmethod
    def from_modes(cls, spec, modes, hbar=1.0, quantum=True):
        """
        Build a mode set from {(mx, my, mz, alpha): amplitude} with integer
        lattice indices and alpha in {1, 2}.
        """
        amplitudes = np.zeros((2,) + spec.shape, dtype=complex)
        basis = polarization_basis(spec)
        for (mx, my, mz, alpha), value in modes.items():
            if alpha not in (1, 2):
                raise InvalidInputError(f"polarization index must be 1 or 2, got {alpha!r}")
            index = (mx % spec.n, my % spec.n, mz % spec.n)
            if not basis.resolved[index]:
                raise InvalidInputError(f"mode {(mx, my, mz)} is not a resolved lattice mode")
            amplitudes[(alpha - 1,) + index] = value
        return cls(spec, amplitudes, hbar, quantum)

    def replace(self, amplitudes):
        return SpectralModeSet(self.spec, amplitudes, self.hbar, self.quantum)

    @property
    def basis(self):
        return polarization_basis(self.spec)

    @property
    def omega(self):
        return self.basis.omega

    @property
    def action_scale(self):
        return self.hbar if self.quantum else 1.0

    def normalization(self):
        """N_k = sqrt(c^2 s / (2 omega V)), zero on unresolved modes."""
        omega = self.omega
        safe = np.where(omega > 0, omega, 1.0)
        norm = np.sqrt(self.spec.c**2 * self.action_scale / (2.0 * safe * self.spec.volume))
        return np.where(omega > 0, norm, 0.0)

    def norm2(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def time_derivative(self, order=1):
        """Mode set of the exact order-th time derivative, c -> (-i omega)^order c."""
        return self.replace(self.amplitudes * (-1j * self.omega) ** order)

    def __repr__(self):
        active = int(np.count_nonzero(self.amplitudes))
        return f"SpectralModeSet({self.spec!r}, active={active}, quantum={self.quantum})"


def _polarization_vector(modes):
    """p_k = sum_alpha e_alpha(k) c_{k alpha}, shape (3, n, n, n)."""
    return np.einsum("aixyz,axyz->ixyz", modes.basis.e, modes.amplitudes)


def spectra(modes):
    """Fourier coefficients (A_hat, E_hat, H_hat) of a mode set in fftn scaling."""
    basis = modes.basis
    scale = modes.spec.n**3 * modes.normalization()
    p = _polarization_vector(modes)
    p_neg = np.conj(negate_modes(p))
    a_hat = scale * (p + p_neg)
    e_hat = scale * 1j * basis.kabs * (p - p_neg)
    h_hat = spectral_curl_hat(basis.k, a_hat)
    return a_hat, e_hat, h_hat


def synthesize(modes):
    """Real grids (A, E, H) with E = -(1/c) dA/dt and H = curl A."""
    a_hat, e_hat, h_hat = spectra(modes)
    spec = modes.spec
    return (
        VectorFieldGrid(spec, from_spectrum(a_hat)),
        VectorFieldGrid(spec, from_spectrum(e_hat)),
        VectorFieldGrid(spec, from_spectrum(h_hat)),
    )


def _unresolved_fraction(spec, values_hat, basis):
    total = np.linalg.norm(values_hat)
    if total == 0.0:
        return 0.0, 0.0
    k = basis.k
    kabs = np.where(basis.resolved, basis.kabs, 1.0)
    longitudinal = np.sum(k * values_hat, axis=0) / kabs
    longitudinal = np.where(basis.resolved, longitudinal, 0.0)
    unresolved = values_hat[:, ~basis.resolved]
    return (
        float(np.linalg.norm(longitudinal) / total),
        float(np.linalg.norm(unresolved) / total),
    )


def expand(a, e_field, hbar=1.0, quantum=True, tol=TRANSVERSE_TOLERANCE):
    """
    Invert the plane-wave expansion for transverse (A, E).

    Rejects input with a longitudinal part or with content on the mean or
    Nyquist modes above ``tol`` relative to the field norm.
    """
    if a.spec != e_field.spec:
        raise GridMismatchError(f"A on {a.spec!r} and E on {e_field.spec!r}")
    spec = a.spec
    basis = polarization_basis(spec)
    a_hat = to_spectrum(a.values)
    e_hat = to_spectrum(e_field.values)
    for name, values_hat in (("A", a_hat), ("E", e_hat)):
        longitudinal, unresolved = _unresolved_fraction(spec, values_hat, basis)
        if longitudinal > tol:
            raise NotTransverseError(
                f"{name} has a longitudinal part of relative size {longitudinal:.3e}; "
                "project it onto the transverse subspace first"
            )
        if unresolved > tol:
            raise NotTransverseError(
                f"{name} has relative content {unresolved:.3e} on mean or Nyquist modes"
            )

    template = SpectralModeSet.empty(spec, hbar, quantum)
    norm = template.normalization()
    denom = 2.0 * spec.n**3 * np.where(basis.resolved, norm, 1.0)
    kabs = np.where(basis.resolved, basis.kabs, 1.0)
    p = (a_hat + e_hat / (1j * kabs)) / denom
    amplitudes = np.einsum("aixyz,ixyz->axyz", basis.e, p)
    amplitudes[:, ~basis.resolved] = 0.0
    return template.replace(amplitudes)


def evolve(modes, dt):
    """Exact free evolution c -> c exp(-i omega dt)."""
    if not np.isfinite(dt):
        raise InvalidInputError(f"time step must be finite, got {dt!r}")
    return modes.replace(modes.amplitudes * np.exp(-1j * modes.omega * dt))


def energy(modes):
    """Mode-sum energy without the zero-point term."""
    return float(modes.action_scale * np.sum(modes.omega * np.abs(modes.amplitudes) ** 2))


def zero_point_sum(modes):
    """State-independent sum of hbar*omega/2 over every resolved (k, alpha)."""
    return float(modes.hbar * np.sum(modes.omega))


def grid_energy(a, e_field):
    """1/2 sum (E^2 + |curl A|^2) h^3 with the spectral curl."""
    if a.spec != e_field.spec:
        raise GridMismatchError(f"A on {a.spec!r} and E on {e_field.spec!r}")
    k = a.spec.wavevectors()
    curl_a = from_spectrum(spectral_curl_hat(k, to_spectrum(a.values)))
    total = np.sum(e_field.values**2) + np.sum(curl_a**2)
    return float(0.5 * total * a.spec.cell_volume)


def _max(values):
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def _ratio(residual, scale):
    return residual / scale if scale > 0 else residual


def field_maxwell_residuals(e_field, h_field, e_dot, h_dot):
    """
    Relative spectral residuals of the free Maxwell system for given fields
    and time derivatives:

        r1 = |curl H - (1/c) dE/dt|    r2 = |curl E + (1/c) dH/dt|
        r3 = |div E|                   r4 = |div H|

    Each is a max-norm divided by the max-norm of the terms it balances.
    """
    spec = e_field.spec
    c = spec.c
    k = spec.wavevectors()
    e_hat = to_spectrum(e_field.values)
    h_hat = to_spectrum(h_field.values)
    curl_h = from_spectrum(spectral_curl_hat(k, h_hat))
    curl_e = from_spectrum(spectral_curl_hat(k, e_hat))
    div_e = from_spectrum(1j * np.sum(k * e_hat, axis=0))
    div_h = from_spectrum(1j * np.sum(k * h_hat, axis=0))
    kmax = float(np.max(np.abs(k)))

    r1 = _ratio(_max(curl_h - e_dot.values / c), max(_max(curl_h), _max(e_dot.values) / c))
    r2 = _ratio(_max(curl_e + h_dot.values / c), max(_max(curl_e), _max(h_dot.values) / c))
    r3 = _ratio(_max(div_e), kmax * _max(e_field.values))
    r4 = _ratio(_max(div_h), kmax * _max(h_field.values))
    return r1, r2, r3, r4


def _probe_derivative(modes, dt_probe, order):
    """Fourth-order central differences of exactly evolved fields."""
    samples = {
        step: synthesize(evolve(modes, step * dt_probe)) for step in (-2, -1, 1, 2)
    }
    if order == 1:
        return tuple(
            (8.0 * (samples[1][i].values - samples[-1][i].values)
             - (samples[2][i].values - samples[-2][i].values)) / (12.0 * dt_probe)
            for i in range(3)
        )
    centre = synthesize(modes)
    return tuple(
        (-(samples[2][i].values + samples[-2][i].values)
         + 16.0 * (samples[1][i].values + samples[-1][i].values)
         - 30.0 * centre[i].values) / (12.0 * dt_probe**2)
        for i in range(3)
    )


def maxwell_residuals(modes, dt_probe=None):
    """
    The four Maxwell residuals of a mode set. Time derivatives come from the
    exact generator unless ``dt_probe`` asks for finite-difference probing.
    """
    _, e_field, h_field = synthesize(modes)
    if dt_probe is None:
        _, e_dot, h_dot = synthesize(modes.time_derivative())
    else:
        if dt_probe <= 0:
            raise InvalidInputError(f"dt_probe must be positive, got {dt_probe!r}")
        _, e_values, h_values = _probe_derivative(modes, dt_probe, order=1)
        e_dot = VectorFieldGrid(modes.spec, e_values)
        h_dot = VectorFieldGrid(modes.spec, h_values)
    return field_maxwell_residuals(e_field, h_field, e_dot, h_dot)


def wave_equation_residual(modes, dt_probe=None):
    """Relative max-norm of (1/c^2) d2A/dt2 - Laplacian(A)."""
    spec = modes.spec
    a_hat, _, _ = spectra(modes)
    k2 = np.sum(spec.wavevectors() ** 2, axis=0)
    lap_a = from_spectrum(-k2 * a_hat)
    if dt_probe is None:
        a_ddot, _, _ = synthesize(modes.time_derivative(order=2))
        a_ddot = a_ddot.values
    else:
        if dt_probe <= 0:
            raise InvalidInputError(f"dt_probe must be positive, got {dt_probe!r}")
        a_ddot = _probe_derivative(modes, dt_probe, order=2)[0]
    lhs = a_ddot / spec.c**2
    return _ratio(_max(lhs - lap_a), max(_max(lhs), _max(lap_a)))


def random_modes(spec, rng, count=10, kmax=3, amplitude=1.0, hbar=1.0, quantum=True):
    """``count`` distinct random resolved modes with |m_i| <= kmax."""
    basis = polarization_basis(spec)
    m = spec.mode_indices()
    candidates = np.argwhere(basis.resolved & np.all(np.abs(m) <= kmax, axis=0))
    if len(candidates) == 0:
        raise InvalidInputError(f"no resolved modes with |m| <= {kmax} on {spec!r}")
    pairs = [(alpha, tuple(index)) for index in candidates for alpha in (0, 1)]
    count = min(count, len(pairs))
    chosen = rng.choice(len(pairs), size=count, replace=False)
    amplitudes = np.zeros((2,) + spec.shape, dtype=complex)
    for pick in sorted(chosen):
        alpha, index = pairs[pick]
        amplitudes[(alpha,) + index] = amplitude * (rng.standard_normal() + 1j * rng.standard_normal())
    return SpectralModeSet(spec, amplitudes, hbar, quantum)
