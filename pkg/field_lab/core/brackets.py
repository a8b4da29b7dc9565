import logging

import numpy as np

from .errors import EvaluationFailure, GridMismatchError, InvalidInputError
from .fields import central_difference, from_spectrum, random_smooth_spectrum

logger = logging.getLogger(__name__)

FD_RELATIVE_STEP = 1e-5


class CanonicalLattice:
    """
    Coordinates A_mu(x) and momenta B^mu(x), mu = 0..3, on a periodic lattice.
    Both arrays have shape (4, n, n, n).
    """

    def __init__(self, spec, a, b):
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)
        expected = (4,) + spec.shape
        if a.shape != expected or b.shape != expected:
            raise GridMismatchError(f"canonical lattice arrays need shape {expected}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidInputError("canonical lattice contains non-finite values")
        a.setflags(write=False)
        b.setflags(write=False)
        self.spec = spec
        self.a = a
        self.b = b

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros((4,) + spec.shape), np.zeros((4,) + spec.shape))

    def scale(self):
        return max(float(np.max(np.abs(self.a))), float(np.max(np.abs(self.b))))

    def perturbed(self, which, index, delta):
        a = self.a.copy()
        b = self.b.copy()
        (a if which == "a" else b)[index] += delta
        return CanonicalLattice(self.spec, a, b)

    def __repr__(self):
        return f"CanonicalLattice({self.spec!r})"


def _point(spec, point):
    return tuple(int(i) % spec.n for i in point)


def _curl(values, h):
    d = lambda i, axis: central_difference(values[i], axis, h)
    return np.stack([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)])


def _div(values, h):
    return sum(central_difference(values[i], i, h) for i in range(3))


def hamiltonian(state):
    """sum_x [1/2 |curl A|^2 + 1/2 B^r B^r - (div B) A_0] h^3."""
    h = state.spec.h
    curl_a = _curl(state.a[1:], h)
    density = (
        0.5 * np.sum(curl_a**2, axis=0)
        + 0.5 * np.sum(state.b[1:] ** 2, axis=0)
        - _div(state.b[1:], h) * state.a[0]
    )
    return float(np.sum(density) * state.spec.cell_volume)


def total_hamiltonian(state, v):
    """H plus the primary constraint B^0 weighted by the multiplier v."""
    v_values = getattr(v, "values", v)
    v_values = np.asarray(v_values, dtype=float)
    if v_values.shape != state.spec.shape:
        raise GridMismatchError(f"multiplier needs shape {state.spec.shape}, got {v_values.shape}")
    if not np.all(np.isfinite(v_values)):
        raise InvalidInputError("multiplier contains non-finite values")
    return hamiltonian(state) + float(np.sum(v_values * state.b[0]) * state.spec.cell_volume)


def hamiltonian_gradient(state, v=None):
    """Analytic (dH/dA_mu, dH/dB^mu) on every lattice point."""
    h = state.spec.h
    w = state.spec.cell_volume
    grad_a = np.zeros_like(state.a)
    grad_b = np.zeros_like(state.b)
    grad_a[0] = -w * _div(state.b[1:], h)
    # central differences are antisymmetric, so curl is its own transpose
    grad_a[1:] = w * _curl(_curl(state.a[1:], h), h)
    for r in range(3):
        grad_b[r + 1] = w * (state.b[r + 1] + central_difference(state.a[0], r, h))
    if v is not None:
        grad_b[0] = w * np.asarray(getattr(v, "values", v), dtype=float)
    return grad_a, grad_b


class LatticeFunctional:
    """
    A named observable on a CanonicalLattice.

    ``gradient`` returns (dF/dA, dF/dB) as dense arrays. Without it the
    bracket engine falls back to symmetric finite differences.
    """

    def __init__(self, name, evaluate, gradient=None, eps=None):
        if eps is not None and eps <= 0:
            raise InvalidInputError(f"finite-difference step must be positive, got {eps!r}")
        self.name = name
        self.evaluate = evaluate
        self.gradient = gradient
        self.eps = eps

    @property
    def analytic(self):
        return self.gradient is not None

    def __call__(self, state):
        return self.evaluate(state)

    def numeric(self, eps=None):
        """Same functional with finite-difference derivatives."""
        return LatticeFunctional(self.name + "~fd", self.evaluate, None, eps)

    def __repr__(self):
        kind = "analytic" if self.analytic else "finite-difference"
        return f"LatticeFunctional({self.name}, {kind})"


def _unit_gradient(state, which, mu, point, weight=1.0):
    grad_a = np.zeros_like(state.a)
    grad_b = np.zeros_like(state.b)
    (grad_a if which == "a" else grad_b)[(mu,) + point] = weight
    return grad_a, grad_b


def coordinate(mu, point):
    def evaluate(state):
        return float(state.a[(mu,) + _point(state.spec, point)])

    def gradient(state):
        return _unit_gradient(state, "a", mu, _point(state.spec, point))

    return LatticeFunctional(f"A_{mu}{tuple(point)}", evaluate, gradient)


def momentum(mu, point):
    def evaluate(state):
        return float(state.b[(mu,) + _point(state.spec, point)])

    def gradient(state):
        return _unit_gradient(state, "b", mu, _point(state.spec, point))

    return LatticeFunctional(f"B^{mu}{tuple(point)}", evaluate, gradient)


def divergence_b(point):
    """Central-difference divergence of the spatial momenta at one point."""

    def evaluate(state):
        p = _point(state.spec, point)
        return float(_div(state.b[1:], state.spec.h)[p])

    def gradient(state):
        spec = state.spec
        p = _point(spec, point)
        grad_a = np.zeros_like(state.a)
        grad_b = np.zeros_like(state.b)
        for r in range(3):
            forward = list(p)
            backward = list(p)
            forward[r] = (forward[r] + 1) % spec.n
            backward[r] = (backward[r] - 1) % spec.n
            grad_b[(r + 1,) + tuple(forward)] += 1.0 / (2.0 * spec.h)
            grad_b[(r + 1,) + tuple(backward)] -= 1.0 / (2.0 * spec.h)
        return grad_a, grad_b

    return LatticeFunctional(f"divB{tuple(point)}", evaluate, gradient)


def hamiltonian_functional():
    return LatticeFunctional("H", hamiltonian, hamiltonian_gradient)


def total_hamiltonian_functional(v):
    return LatticeFunctional(
        "H_T",
        lambda state: total_hamiltonian(state, v),
        lambda state: hamiltonian_gradient(state, v),
    )


def fd_step(functional, state):
    if functional.eps is not None:
        return functional.eps
    return FD_RELATIVE_STEP * max(1.0, state.scale())


def _fd_gradient(functional, state, mask_a, mask_b):
    """Symmetric finite differences restricted to the masked entries."""
    eps = fd_step(functional, state)
    grad_a = np.zeros_like(state.a)
    grad_b = np.zeros_like(state.b)
    for which, mask, target in (("a", mask_a, grad_a), ("b", mask_b, grad_b)):
        for index in map(tuple, np.argwhere(mask)):
            upper = functional(state.perturbed(which, index, eps))
            lower = functional(state.perturbed(which, index, -eps))
            target[index] = (upper - lower) / (2.0 * eps)
    return grad_a, grad_b


def _gradients(f, g, state):
    full = np.ones_like(state.a, dtype=bool)
    grad_f = f.gradient(state) if f.analytic else None
    grad_g = g.gradient(state) if g.analytic else None
    if grad_f is None and grad_g is None:
        grad_f = _fd_gradient(f, state, full, full)
        grad_g = _fd_gradient(g, state, full, full)
    elif grad_f is None:
        # only entries that meet a non-zero partner derivative contribute
        grad_f = _fd_gradient(f, state, grad_g[1] != 0, grad_g[0] != 0)
    elif grad_g is None:
        grad_g = _fd_gradient(g, state, grad_f[1] != 0, grad_f[0] != 0)
    return grad_f, grad_g


def poisson_bracket(f, g, state, hbar=None):
    """
    Lattice Poisson bracket

        (1/h^3) sum_{x,mu} (df/dA_mu dg/dB^mu - df/dB^mu dg/dA_mu)

    so that [B^mu(x), A_nu(x')] = -delta^mu_nu delta_{xx'} / h^3. Passing
    ``hbar`` gives the quantum bracket, the classical one times hbar.
    """
    (fa, fb), (ga, gb) = _gradients(f, g, state)
    for name, grad in (("f", fa), ("f", fb), ("g", ga), ("g", gb)):
        if not np.all(np.isfinite(grad)):
            raise EvaluationFailure(f"non-finite derivative of {name} in bracket [{f.name}, {g.name}]")
    value = float(np.sum(fa * gb - fb * ga)) / state.spec.cell_volume
    if hbar is not None:
        value *= hbar
    return value


def secondary_constraint_residual(state, x0, numeric=False):
    """[B^0(x0), H] minus the central-difference divergence of B at x0."""
    h_functional = hamiltonian_functional()
    if numeric:
        h_functional = h_functional.numeric()
    bracket = poisson_bracket(momentum(0, x0), h_functional, state)
    return bracket - divergence_b(x0)(state)


def default_sample_points(spec, count=10):
    step = max(1, spec.n // count)
    return [((i * step) % spec.n, (3 * i * step + 1) % spec.n, (5 * i * step + 2) % spec.n) for i in range(count)]


def constraint_chain_closure(state, points=None, numeric=False):
    """Largest |[div B(x0), H]| over the sample points."""
    h_functional = hamiltonian_functional()
    if numeric:
        h_functional = h_functional.numeric()
    points = points or default_sample_points(state.spec)
    return max(abs(poisson_bracket(divergence_b(p), h_functional, state)) for p in points)


def canonical_relation_residual(state, point_pairs, hbar=None):
    """
    Largest deviation of [B^mu(x), A_nu(x')], [A_mu(x), A_nu(x')] and
    [B^mu(x), B^nu(x')] from their canonical values over all (mu, nu).
    """
    h3 = state.spec.cell_volume
    scale = 1.0 if hbar is None else hbar
    worst = 0.0
    for x, x_prime in point_pairs:
        same = _point(state.spec, x) == _point(state.spec, x_prime)
        for mu in range(4):
            for nu in range(4):
                expected = -scale / h3 if (same and mu == nu) else 0.0
                checks = (
                    (poisson_bracket(momentum(mu, x), coordinate(nu, x_prime), state, hbar), expected),
                    (poisson_bracket(coordinate(mu, x), coordinate(nu, x_prime), state, hbar), 0.0),
                    (poisson_bracket(momentum(mu, x), momentum(nu, x_prime), state, hbar), 0.0),
                )
                for value, target in checks:
                    worst = max(worst, abs(value - target) * h3 / scale)
    return worst


def random_smooth_state(spec, rng, kmax=2, amplitude=1.0):
    a = from_spectrum(random_smooth_spectrum(spec, rng, 4, kmax))
    b = from_spectrum(random_smooth_spectrum(spec, rng, 4, kmax))
    scale = max(np.max(np.abs(a)), np.max(np.abs(b))) or 1.0
    return CanonicalLattice(spec, amplitude * a / scale, amplitude * b / scale)


def plane_wave_state(spec, amplitude=1.0, mode=1):
    """A_2 = amplitude*sin(k x), B^2 = -amplitude*|k|*cos(k x), k = 2*pi*mode/L."""
    x, _, _ = spec.coordinates()
    k = 2.0 * np.pi * mode / spec.length
    a = np.zeros((4,) + spec.shape)
    b = np.zeros((4,) + spec.shape)
    a[2] = amplitude * np.sin(k * x)
    b[2] = -amplitude * k * np.cos(k * x)
    return CanonicalLattice(spec, a, b)
