import functools
import logging

import numpy as np
from scipy import fft, linalg

from .errors import GridMismatchError, InvalidInputError, NotTransverseError
from .fields import LEVI_CIVITA, VectorFieldGrid, to_spectrum
from .propagator import polarization_basis

logger = logging.getLogger(__name__)

TRANSVERSE_TOLERANCE = 1e-8
ROTATION_PREFACTOR = 1.0 / (4.0 * np.pi)
CONVENTIONS = ("maxwell", "verbatim")

# Generator signs for (F, G): dF/dt = sign * i c (s.k) F per Fourier mode.
_GENERATOR_SIGNS = {
    "maxwell": (-1.0, 1.0),
    "verbatim": (1.0, 1.0),
}


class SpinMatrices:
    """Spin-1 matrices (s_i)_{kl} = -i e_{ikl}."""

    def __init__(self):
        self.stack = -1j * LEVI_CIVITA
        self.stack.setflags(write=False)

    @property
    def s_x(self):
        return self.stack[0]

    @property
    def s_y(self):
        return self.stack[1]

    @property
    def s_z(self):
        return self.stack[2]

    def dot(self, vector):
        """s.v for one vector or for a stack of vectors of shape (..., 3)."""
        return np.tensordot(np.asarray(vector), self.stack, axes=([-1], [0]))

    def casimir(self):
        return np.einsum("ikl,ilm->km", self.stack, self.stack)

    def commutator_residual(self):
        """Largest entrywise deviation of [s_i, s_k] from i e_{ikl} s_l."""
        s = self.stack
        worst = 0.0
        for i in range(3):
            for k in range(3):
                lhs = s[i] @ s[k] - s[k] @ s[i]
                rhs = 1j * np.einsum("l,lab->ab", LEVI_CIVITA[i, k], s)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst


def spin_matrices():
    return SpinMatrices()


def pauli_matrices():
    return np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )


def pauli_casimir():
    half = pauli_matrices() / 2.0
    return np.einsum("iab,ibc->ac", half, half)


def pauli_commutator_residual():
    half = pauli_matrices() / 2.0
    worst = 0.0
    for i in range(3):
        for k in range(3):
            lhs = half[i] @ half[k] - half[k] @ half[i]
            rhs = 1j * np.einsum("l,lab->ab", LEVI_CIVITA[i, k], half)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def helicity_spectrum(direction):
    """Eigenvalues of s.n for a unit vector n, in ascending order."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise InvalidInputError("helicity needs a non-zero direction")
    return linalg.eigvalsh(spin_matrices().dot(direction / norm))


class RSField:
    """Riemann-Silberstein pair F = E + iH, G = E - iH on a grid."""

    def __init__(self, spec, f, g):
        f = np.array(f, dtype=complex)
        g = np.array(g, dtype=complex)
        expected = (3,) + spec.shape
        if f.shape != expected or g.shape != expected:
            raise GridMismatchError(f"RS components need shape {expected}")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise InvalidInputError("RS field contains non-finite values")
        f.setflags(write=False)
        g.setflags(write=False)
        self.spec = spec
        self.f = f
        self.g = g

    def scale(self):
        return max(float(np.max(np.abs(self.f))), float(np.max(np.abs(self.g))))

    def __repr__(self):
        return f"RSField({self.spec!r})"


def to_rs(e_field, h_field):
    if e_field.spec != h_field.spec:
        raise GridMismatchError(f"E on {e_field.spec!r} and H on {h_field.spec!r}")
    return RSField(
        e_field.spec,
        e_field.values + 1j * h_field.values,
        e_field.values - 1j * h_field.values,
    )


def from_rs(r):
    e_values = (r.f + r.g) / 2.0
    h_values = (r.f - r.g) / 2j
    return (
        VectorFieldGrid(r.spec, np.real(e_values)),
        VectorFieldGrid(r.spec, np.real(h_values)),
    )


def reality_residual(r):
    """Largest imaginary part of E and H reconstructed from (F, G)."""
    e_values = (r.f + r.g) / 2.0
    h_values = (r.f - r.g) / 2j
    return max(float(np.max(np.abs(np.imag(e_values)))), float(np.max(np.abs(np.imag(h_values)))))


def transversality_residual(r):
    """max |k.F_hat| / max(|k| |F_hat|), over both F and G."""
    k = r.spec.wavevectors()
    kabs = np.sqrt(np.sum(k**2, axis=0))
    worst = 0.0
    scale = 0.0
    for values in (r.f, r.g):
        values_hat = to_spectrum(values)
        worst = max(worst, float(np.max(np.abs(np.sum(k * values_hat, axis=0)))))
        scale = max(scale, float(np.max(kabs * np.sqrt(np.sum(np.abs(values_hat) ** 2, axis=0)))))
    if scale == 0.0:
        return 0.0
    return worst / scale


@functools.lru_cache(maxsize=32)
def mode_propagators(spec, dt, sign):
    """
    exp(sign * i c dt (s.k)) for every lattice mode, shape (n, n, n, 3, 3).
    Each matrix is a rotation about k.
    """
    k = np.moveaxis(spec.wavevectors(), 0, -1)
    generator = sign * 1j * spec.c * dt * spin_matrices().dot(k)
    stack = linalg.expm(generator.reshape(-1, 3, 3)).reshape(spec.shape + (3, 3))
    stack.setflags(write=False)
    return stack


def _apply_modes(matrices, values):
    values_hat = to_spectrum(values)
    rotated = np.einsum("xyzab,bxyz->axyz", matrices, values_hat)
    return fft.ifftn(rotated, axes=(-3, -2, -1))


def evolve_rs(r, dt, convention="maxwell", tol=TRANSVERSE_TOLERANCE):
    """
    Evolve (F, G) by the exact per-mode exponential of the spin generator.

    With the ``maxwell`` convention F and G reproduce the real-field Maxwell
    equations. ``verbatim`` applies the printed generator to both, which
    leaves G correct and F running backwards.
    """
    if convention not in CONVENTIONS:
        raise InvalidInputError(f"unknown convention {convention!r}, expected one of {CONVENTIONS}")
    if not np.isfinite(dt):
        raise InvalidInputError(f"time step must be finite, got {dt!r}")
    residual = transversality_residual(r)
    if residual > tol:
        raise NotTransverseError(f"RS field transversality residual {residual:.3e} exceeds {tol:.1e}")
    if dt == 0:
        return r
    sign_f, sign_g = _GENERATOR_SIGNS[convention]
    f = _apply_modes(mode_propagators(r.spec, float(dt), sign_f), r.f)
    g = _apply_modes(mode_propagators(r.spec, float(dt), sign_g), r.g)
    return RSField(r.spec, f, g)


def circular_mode_vector(direction, helicity):
    """Unit eigenvector of s.n with eigenvalue +1 or -1."""
    if helicity not in (1, -1):
        raise InvalidInputError(f"helicity must be +1 or -1, got {helicity!r}")
    n_hat = np.asarray(direction, dtype=float)
    n_hat = n_hat / np.linalg.norm(n_hat)
    axis = int(np.argmin(np.abs(n_hat)))
    trial = np.eye(3)[axis]
    e1 = trial - trial.dot(n_hat) * n_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n_hat, e1)
    return (e1 + helicity * 1j * e2) / np.sqrt(2.0)


def helicity_power(r):
    """
    Spectral power of F in the helicity +1 and -1 eigenvectors of s.n,
    summed over resolved modes. Free evolution leaves both unchanged.
    """
    basis = polarization_basis(r.spec)
    f_hat = to_spectrum(r.f)
    e1, e2 = basis.e
    powers = []
    for helicity in (1, -1):
        vector = (e1 + helicity * 1j * e2) / np.sqrt(2.0)
        amplitude = np.sum(np.conj(vector) * f_hat, axis=0)
        powers.append(float(np.sum(np.abs(amplitude[basis.resolved]) ** 2)))
    return tuple(powers)


def lorentz_matrix(dtheta, dv, prefactor=ROTATION_PREFACTOR, c=1.0):
    """1 + i*prefactor*(s.dtheta) - (1/c)(s.dv)."""
    s = spin_matrices()
    return (
        np.eye(3, dtype=complex)
        + 1j * prefactor * s.dot(np.asarray(dtheta, dtype=float))
        - s.dot(np.asarray(dv, dtype=float)) / c
    )


def lorentz_infinitesimal(r, dtheta, dv, prefactor=ROTATION_PREFACTOR):
    """
    First-order Lorentz map applied pointwise to F and G with the same
    matrix. Sample coordinates are not remapped.
    """
    matrix = lorentz_matrix(dtheta, dv, prefactor, r.spec.c)
    return RSField(
        r.spec,
        np.einsum("ab,bxyz->axyz", matrix, r.f),
        np.einsum("ab,bxyz->axyz", matrix, r.g),
    )


def bispinor_lorentz_infinitesimal(xi, dtheta, dv, prefactor=ROTATION_PREFACTOR, c=1.0):
    """1 + i*prefactor*(sigma.dtheta)/2 - (1/2c)(sigma.dv) applied to a 2-spinor."""
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (2,):
        raise InvalidInputError(f"bispinor must have two components, got shape {xi.shape}")
    sigma = pauli_matrices()
    dtheta = np.asarray(dtheta, dtype=float)
    dv = np.asarray(dv, dtype=float)
    matrix = (
        np.eye(2, dtype=complex)
        + 0.5j * prefactor * np.tensordot(dtheta, sigma, axes=1)
        - np.tensordot(dv, sigma, axes=1) / (2.0 * c)
    )
    return matrix @ xi
