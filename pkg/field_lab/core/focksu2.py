import logging

import numpy as np
from scipy import linalg

from .errors import AlgebraViolationError, InvalidInputError

logger = logging.getLogger(__name__)

CASIMIR_TOLERANCE = 1e-9
MIN_PLANCK_RATIO = 0.1


class TwoModeSpace:
    """
    Truncated two-mode number space with basis |n1, n2>, 0 <= n_i <= n_max,
    ordered lexicographically: index = n1 * (n_max + 1) + n2.
    """

    def __init__(self, n_max):
        if int(n_max) != n_max or n_max < 4:
            raise InvalidInputError(f"n_max must be an integer >= 4, got {n_max!r}")
        self.n_max = int(n_max)
        self.size = self.n_max + 1
        levels = np.arange(self.size)
        self.n1 = np.repeat(levels, self.size)
        self.n2 = np.tile(levels, self.size)

    @property
    def dimension(self):
        return self.size**2

    def index(self, n1, n2):
        if not (0 <= n1 <= self.n_max and 0 <= n2 <= self.n_max):
            raise InvalidInputError(f"|{n1},{n2}> lies outside the truncated space")
        return n1 * self.size + n2

    def basis_state(self, n1, n2):
        state = np.zeros(self.dimension, dtype=complex)
        state[self.index(n1, n2)] = 1.0
        return state

    def total(self):
        return self.n1 + self.n2

    def safe_states(self):
        """States that two photon-moving operators cannot push past the cutoff."""
        return self.total() <= self.n_max - 1

    def photon_subspace(self, n):
        return np.flatnonzero(self.total() == n)

    def __repr__(self):
        return f"TwoModeSpace(n_max={self.n_max})"


class OperatorMatrix:
    """Dense operator on a TwoModeSpace."""

    def __init__(self, space, matrix, hbar=1.0, omega=1.0):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (space.dimension, space.dimension):
            raise InvalidInputError(
                f"operator needs shape {(space.dimension,) * 2}, got {matrix.shape}"
            )
        self.space = space
        self.matrix = matrix
        self.hbar = hbar
        self.omega = omega

    def _wrap(self, matrix):
        return OperatorMatrix(self.space, matrix, self.hbar, self.omega)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return self._wrap(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)

    def __add__(self, other):
        return self._wrap(self.matrix + other.matrix)

    def __sub__(self, other):
        return self._wrap(self.matrix - other.matrix)

    def __mul__(self, scalar):
        return self._wrap(self.matrix * scalar)

    __rmul__ = __mul__

    def dagger(self):
        return self._wrap(self.matrix.conj().T)

    def element(self, bra, ket):
        """<bra|O|ket> for basis labels (n1, n2)."""
        return complex(self.matrix[self.space.index(*bra), self.space.index(*ket)])

    def restricted(self, indices):
        return self.matrix[np.ix_(indices, indices)]

    def __repr__(self):
        return f"OperatorMatrix({self.space!r})"


def commutator(a, b):
    return a @ b - b @ a


def residual_on(op, columns):
    """Largest entry of op acting on the selected basis states."""
    block = op.matrix[:, columns]
    return float(np.max(np.abs(block))) if block.size else 0.0


def _single_mode_lowering(size):
    return np.diag(np.sqrt(np.arange(1, size, dtype=float)), 1)


def ladder(space, mode, kind="lower", hbar=1.0, omega=1.0):
    """a_mode or its adjoint; <n-1|a|n> = sqrt(n)."""
    if mode not in (1, 2):
        raise InvalidInputError(f"mode must be 1 or 2, got {mode!r}")
    if kind not in ("lower", "raise"):
        raise InvalidInputError(f"ladder kind must be 'lower' or 'raise', got {kind!r}")
    single = _single_mode_lowering(space.size)
    if kind == "raise":
        single = single.T
    identity = np.eye(space.size)
    matrix = np.kron(single, identity) if mode == 1 else np.kron(identity, single)
    return OperatorMatrix(space, matrix, hbar, omega)


def number(space, mode):
    a = ladder(space, mode)
    return a.dagger() @ a


def total_number(space):
    return number(space, 1) + number(space, 2)


def hamiltonian_k(space, omega=1.0, hbar=1.0):
    """hbar omega (a1+ a1 + a2+ a2 + 1)."""
    identity = OperatorMatrix(space, np.eye(space.dimension))
    op = (total_number(space) + identity) * (hbar * omega)
    op.hbar, op.omega = hbar, omega
    return op


def u2_generators(space):
    """{(i, j): A^i_j = a_i^+ a_j} for i, j in {1, 2}."""
    return {
        (i, j): ladder(space, i, "raise") @ ladder(space, j, "lower")
        for i in (1, 2)
        for j in (1, 2)
    }


def su2_generators(space):
    """
    {(i, j): B^i_j = A^i_j - 1/2 delta^i_j A} with A the total number.

    The diagonal entries are formed as (A^1_1 - A^2_2)/2 and its negative,
    so B^1_1 + B^2_2 vanishes bitwise.
    """
    a = u2_generators(space)
    generators = dict(a)
    generators[(1, 1)] = (a[(1, 1)] - a[(2, 2)]) * 0.5
    generators[(2, 2)] = (a[(2, 2)] - a[(1, 1)]) * 0.5
    return generators


def angular_momentum(space):
    """(J+, J-, Jz) = (B^1_2, B^2_1, (B^1_1 - B^2_2)/2)."""
    b = su2_generators(space)
    return b[(1, 2)], b[(2, 1)], (b[(1, 1)] - b[(2, 2)]) * 0.5


def casimir(space):
    j_plus, j_minus, j_z = angular_momentum(space)
    return (j_plus @ j_minus + j_minus @ j_plus) * 0.5 + j_z @ j_z


def casimir_on_subspace(space, n, tolerance=CASIMIR_TOLERANCE):
    """Constant eigenvalue of J^2 on the n-photon subspace."""
    if int(n) != n or not 0 <= n <= space.n_max:
        raise InvalidInputError(f"photon number must lie in [0, {space.n_max}], got {n!r}")
    indices = space.photon_subspace(int(n))
    block = casimir(space).restricted(indices)
    eigenvalues = linalg.eigvalsh(block)
    spread = float(np.max(eigenvalues) - np.min(eigenvalues))
    if spread > tolerance:
        raise AlgebraViolationError(
            f"Casimir is not constant on the {n}-photon subspace (spread {spread:.3e})"
        )
    return float(np.mean(eigenvalues))


def _structure_residual(generators, columns):
    """[X^i_j, X^k_l] - (delta^k_j X^i_l - delta^i_l X^k_j) over all index pairs."""
    worst = 0.0
    zero = next(iter(generators.values())) * 0.0
    for (i, j), x_ij in generators.items():
        for (k, l), x_kl in generators.items():
            expected = zero
            if k == j:
                expected = expected + generators[(i, l)]
            if i == l:
                expected = expected - generators[(k, j)]
            worst = max(worst, residual_on(commutator(x_ij, x_kl) - expected, columns))
    return worst


def commutator_table(space, omega=1.0, hbar=1.0):
    """Named algebra checks with their largest residuals on the safe states."""
    safe = np.flatnonzero(space.safe_states())
    identity = OperatorMatrix(space, np.eye(space.dimension))
    a = {mode: ladder(space, mode) for mode in (1, 2)}
    a_dag = {mode: ladder(space, mode, "raise") for mode in (1, 2)}
    h = hamiltonian_k(space, omega, hbar)
    u2 = u2_generators(space)
    su2 = su2_generators(space)
    j_plus, j_minus, j_z = angular_momentum(space)

    rows = []
    for i in (1, 2):
        for j in (1, 2):
            below_cutoff = np.flatnonzero((space.n1 if i == 1 else space.n2) < space.n_max)
            expected = identity if i == j else identity * 0.0
            rows.append(
                (f"[a{i},a{j}+]", residual_on(commutator(a[i], a_dag[j]) - expected, below_cutoff))
            )
    rows.append(("u2 structure", _structure_residual(u2, safe)))
    rows.append(("su2 structure", _structure_residual(su2, safe)))
    rows.append(("[Jz,J+]-J+", residual_on(commutator(j_z, j_plus) - j_plus, safe)))
    rows.append(("[Jz,J-]+J-", residual_on(commutator(j_z, j_minus) + j_minus, safe)))
    rows.append(("[J+,J-]-2Jz", residual_on(commutator(j_plus, j_minus) - j_z * 2.0, safe)))
    for (i, j), op in u2.items():
        rows.append((f"[H,A{i}{j}]", residual_on(commutator(h, op), safe)))
    for (i, j), op in su2.items():
        rows.append((f"[H,B{i}{j}]", residual_on(commutator(h, op), safe)))
    trace = su2[(1, 1)] + su2[(2, 2)]
    rows.append(("B11+B22", float(np.max(np.abs(trace.matrix)))))
    number_from_h = h * (1.0 / (hbar * omega)) - identity
    rows.append(("A-(H/hw-1)", float(np.max(np.abs((total_number(space) - number_from_h).matrix)))))
    return rows


def planck_closed_form(ratio):
    """1/(exp(hbar omega / kT) - 1)."""
    return float(1.0 / np.expm1(ratio))


def planck_truncation_bound(ratio, n_max):
    return float(np.exp(-n_max * ratio) * n_max)


def planck_occupancy(omega, temperature, n_max, hbar=1.0, k_b=1.0):
    """Thermal mean occupation of one oscillator truncated at n_max quanta."""
    if temperature <= 0:
        raise InvalidInputError(f"temperature must be positive, got {temperature!r}")
    if int(n_max) != n_max or n_max < 1:
        raise InvalidInputError(f"n_max must be a positive integer, got {n_max!r}")
    ratio = hbar * omega / (k_b * temperature)
    if ratio < MIN_PLANCK_RATIO:
        raise InvalidInputError(
            f"hbar*omega/kT = {ratio:.3g} is below {MIN_PLANCK_RATIO}; truncation error is uncontrolled"
        )
    levels = np.arange(int(n_max) + 1, dtype=float)
    weights = np.exp(-ratio * levels)
    return float(np.sum(levels * weights) / np.sum(weights))
