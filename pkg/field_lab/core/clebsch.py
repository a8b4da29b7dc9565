import logging
import math

import numpy as np
import pandas as pd

from .errors import GridMismatchError, InvalidInputError, UnknownPresetError
from .fields import (
    GridSpec,
    ScalarFieldGrid,
    VectorFieldGrid,
    check_same_grid,
    curl,
    divergence,
    from_spectrum,
    gradient,
    laplacian,
    random_smooth_scalar,
    random_smooth_vector,
    to_spectrum,
    vector_laplacian,
)

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi


class ClebschTriple:
    """Scalars (phi, psi, chi) of the representation a = phi grad psi + grad chi."""

    def __init__(self, phi, psi, chi):
        check_same_grid(phi, psi, chi)
        self.spec = phi.spec
        self.phi = phi
        self.psi = psi
        self.chi = chi

    def __repr__(self):
        return f"ClebschTriple({self.spec!r})"


def _product(scalar, vector):
    return VectorFieldGrid(vector.spec, scalar.values * vector.values)


def synthesize(triple):
    """phi grad psi + grad chi with central-difference gradients."""
    return _product(triple.phi, gradient(triple.psi)) + gradient(triple.chi)


def curl_identity_residual(triple):
    """max |curl(a) - grad phi x grad psi|."""
    lhs = curl(synthesize(triple))
    rhs = gradient(triple.phi).cross(gradient(triple.psi))
    return (lhs - rhs).max_abs()


def div_formula_residual(triple):
    """max |div(a) - (grad phi . grad psi + phi Lap psi + Lap chi)|."""
    lhs = divergence(synthesize(triple))
    rhs = (
        gradient(triple.phi).dot(gradient(triple.psi))
        + ScalarFieldGrid(triple.spec, triple.phi.values * laplacian(triple.psi).values)
        + laplacian(triple.chi)
    )
    return (lhs - rhs).max_abs()


def harmonic_divergence(triple, margin=3):
    """
    Compare div(a) with grad phi . grad psi, the form it takes for harmonic
    psi and chi, on the interior window that the periodic wrap does not reach.
    """
    if margin < 2 or 2 * margin >= triple.spec.n:
        raise InvalidInputError(f"window margin {margin!r} does not fit a grid of {triple.spec.n}")
    lhs = divergence(synthesize(triple)).values
    rhs = gradient(triple.phi).dot(gradient(triple.psi)).values
    window = (slice(margin, -margin),) * 3
    return float(np.max(np.abs((lhs - rhs)[window])))


# ---------------------------------------------------------------------------
# Potentials


class PotentialSet:
    """Scalar and vector potential sampled at uniformly spaced times."""

    def __init__(self, phi_samples, a_samples, dt):
        if len(phi_samples) < 3 or len(a_samples) < 3:
            raise InvalidInputError("potentials need at least three time samples")
        if len(phi_samples) != len(a_samples):
            raise InvalidInputError("scalar and vector potentials need the same number of samples")
        if not np.isfinite(dt) or dt <= 0:
            raise InvalidInputError(f"sample spacing must be positive, got {dt!r}")
        check_same_grid(*phi_samples)
        check_same_grid(*a_samples)
        if phi_samples[0].spec != a_samples[0].spec:
            raise GridMismatchError("scalar and vector potentials live on different grids")
        self.spec = phi_samples[0].spec
        self.phi = list(phi_samples)
        self.a = list(a_samples)
        self.dt = float(dt)

    def centre(self):
        return len(self.phi) // 2


def _time_derivatives(samples, centre, dt):
    before, now, after = samples[centre - 1].values, samples[centre].values, samples[centre + 1].values
    first = (after - before) / (2.0 * dt)
    second = (after - 2.0 * now + before) / dt**2
    return now, first, second


def _potential_terms(p, c):
    i = p.centre()
    spec = p.spec
    _, phi_t, phi_tt = _time_derivatives(p.phi, i, p.dt)
    _, _, a_tt = _time_derivatives(p.a, i, p.dt)
    div_a = divergence(p.a[i]).values
    div_a_t = (divergence(p.a[i + 1]).values - divergence(p.a[i - 1]).values) / (2.0 * p.dt)
    lorenz = ScalarFieldGrid(spec, div_a + phi_t / c)
    lorenz_t = div_a_t + phi_tt / c
    vector_operator = (
        a_tt / c**2 - vector_laplacian(p.a[i]).values + gradient(lorenz).values
    )
    scalar_operator = phi_tt / c**2 - laplacian(p.phi[i]).values - lorenz_t / c
    gauss_operator = -laplacian(p.phi[i]).values - div_a_t / c
    return vector_operator, scalar_operator, gauss_operator


def potential_source_residual(p, rho, j, c=1.0):
    """
    (rv, rs): max-norm mismatch between (4 pi/c) j, 4 pi rho and the
    potential-form wave operators at the centre sample. The current j stands
    for the rho*v of the moving-charge form.
    """
    if rho.spec != p.spec or j.spec != p.spec:
        raise GridMismatchError("sources and potentials live on different grids")
    vector_operator, scalar_operator, _ = _potential_terms(p, c)
    rv = float(np.max(np.abs(FOUR_PI / c * j.values - vector_operator)))
    rs = float(np.max(np.abs(FOUR_PI * rho.values - scalar_operator)))
    return rv, rs


def gauss_source_residual(p, rho, c=1.0):
    """max |4 pi rho - (-Lap phi - (1/c) d(div A)/dt)|."""
    if rho.spec != p.spec:
        raise GridMismatchError("sources and potentials live on different grids")
    _, _, gauss_operator = _potential_terms(p, c)
    return float(np.max(np.abs(FOUR_PI * rho.values - gauss_operator)))


def manufacture_sources(p, c=1.0):
    """(rho, j) that make the potentials an exact solution of the discrete equations."""
    vector_operator, scalar_operator, _ = _potential_terms(p, c)
    rho = ScalarFieldGrid(p.spec, scalar_operator / FOUR_PI)
    j = VectorFieldGrid(p.spec, vector_operator * c / FOUR_PI)
    return rho, j


def lattice_poisson(spec, rho):
    """phi with -Lap_h phi = 4 pi (rho - mean rho) for the compact Laplacian."""
    values = getattr(rho, "values", rho)
    m = spec.mode_indices()
    k = 2.0 * np.pi * m / spec.length
    symbol = np.sum(4.0 * np.sin(k * spec.h / 2.0) ** 2, axis=0) / spec.h**2
    safe = np.where(symbol > 0, symbol, 1.0)
    phi_hat = np.where(symbol > 0, FOUR_PI * to_spectrum(values) / safe, 0.0)
    return ScalarFieldGrid(spec, from_spectrum(phi_hat))


def coulomb_potentials(spec, rho, dt, samples=3):
    """
    Static potentials of a neutralised charge density: phi from the lattice
    Poisson solve and A = 0. Returns (potentials, neutral rho).
    """
    values = np.asarray(getattr(rho, "values", rho), dtype=float)
    neutral = ScalarFieldGrid(spec, values - values.mean())
    phi = lattice_poisson(spec, neutral)
    zero = VectorFieldGrid.zeros(spec)
    return PotentialSet([phi] * samples, [zero] * samples, dt), neutral


def plane_wave_potentials(spec, dt, amplitude=1.0, mode=1, omega=None, samples=3):
    """
    Vacuum potentials phi = 0, A_y = amplitude sin(k x - omega t), which are
    in the transverse gauge. omega defaults to c k.
    """
    x, _, _ = spec.coordinates()
    k = 2.0 * math.pi * mode / spec.length
    omega = spec.c * k if omega is None else omega
    a_samples = []
    for i in range(samples):
        values = np.zeros((3,) + spec.shape)
        values[1] = amplitude * np.sin(k * x - omega * i * dt)
        a_samples.append(VectorFieldGrid(spec, values))
    return PotentialSet([ScalarFieldGrid.zeros(spec)] * samples, a_samples, dt)


def lattice_frequency(spec, dt, mode=1):
    """omega whose time second difference matches the compact Laplacian of mode."""
    k = 2.0 * math.pi * mode / spec.length
    k_lattice = 2.0 * math.sin(k * spec.h / 2.0) / spec.h
    return 2.0 / dt * math.asin(spec.c * dt * k_lattice / 2.0)


def potential_fields(p, c=1.0):
    """E = -grad phi - (1/c) dA/dt and H = curl A at the centre sample."""
    i = p.centre()
    _, a_t, _ = _time_derivatives(p.a, i, p.dt)
    e = -gradient(p.phi[i]) - VectorFieldGrid(p.spec, a_t / c)
    return e, curl(p.a[i])


def field_invariants(e, h):
    """(sum (E^2 - H^2) h^3, sum E.H h^3)."""
    if e.spec != h.spec:
        raise GridMismatchError(f"E on {e.spec!r} and H on {h.spec!r}")
    w = e.spec.cell_volume
    s = float(np.sum(e.values**2 - h.values**2) * w)
    p = float(np.sum(e.values * h.values) * w)
    return s, p


# ---------------------------------------------------------------------------
# Preset triples


def trig_triple(spec):
    x, y, z = spec.coordinates()
    a = 2.0 * np.pi / spec.length
    return ClebschTriple(
        ScalarFieldGrid(spec, np.sin(a * x) * np.cos(a * y)),
        ScalarFieldGrid(spec, np.cos(a * x) * np.sin(a * z) + np.sin(a * y)),
        ScalarFieldGrid(spec, np.cos(a * y) * np.sin(a * z)),
    )


def harmonic_triple(spec):
    """Periodic phi with the harmonic polynomials psi = x y and chi = x^2 - y^2."""
    x, y, z = spec.coordinates()
    a = 2.0 * np.pi / spec.length
    return ClebschTriple(
        ScalarFieldGrid(spec, np.sin(a * x) * np.cos(a * z)),
        ScalarFieldGrid(spec, x * y),
        ScalarFieldGrid(spec, x**2 - y**2),
    )


def random_triple(spec, rng, kmax=2):
    return ClebschTriple(
        random_smooth_scalar(spec, rng, kmax),
        random_smooth_scalar(spec, rng, kmax),
        random_smooth_scalar(spec, rng, kmax),
    )


TRIPLES = {
    "trig": lambda spec, rng: trig_triple(spec),
    "harmonic": lambda spec, rng: harmonic_triple(spec),
    "random": lambda spec, rng: random_triple(spec, rng),
}


def build_triple(name, spec, rng):
    try:
        return TRIPLES[name](spec, rng)
    except KeyError:
        raise UnknownPresetError(
            f"unknown Clebsch preset {name!r}, expected one of {sorted(TRIPLES)}"
        ) from None


def refinement_sweep(preset, length, spacings, rng, c=1.0):
    """
    Identity residuals on successively refined grids of fixed side ``length``
    with the observed convergence order between neighbouring rows.
    """
    rows = []
    for h in spacings:
        n = int(round(length / h))
        if not math.isclose(n * h, length, rel_tol=1e-9):
            raise InvalidInputError(f"spacing {h!r} does not divide the box length {length!r}")
        spec = GridSpec(n, h, c)
        triple = build_triple(preset, spec, rng)
        rows.append(
            {
                "h": h,
                "n": n,
                "curl_residual": curl_identity_residual(triple),
                "div_residual": div_formula_residual(triple),
            }
        )
    frame = pd.DataFrame(rows)
    for column in ("curl_residual", "div_residual"):
        ratio = frame[column].shift(1) / frame[column]
        step = frame["h"].shift(1) / frame["h"]
        frame[column.replace("residual", "order")] = np.log(ratio) / np.log(step)
    return frame


def smooth_potentials(spec, rng, dt, samples=3, frequency=1.0, kmax=2):
    """
    Potentials phi(x) cos(w t) and A(x) sin(w t) from random smooth profiles,
    sampled at ``samples`` times spaced by dt.
    """
    omega = 2.0 * math.pi * frequency
    phi0 = random_smooth_scalar(spec, rng, kmax)
    a0 = random_smooth_vector(spec, rng, kmax)
    times = [i * dt for i in range(samples)]
    return PotentialSet(
        [phi0 * math.cos(omega * t) for t in times],
        [a0 * math.sin(omega * t) for t in times],
        dt,
    )


def manufactured_residuals(p, c=1.0):
    """
    Relative (rv, rs, gauss) residuals of the potential-form equations for
    sources manufactured from the potentials themselves.
    """
    rho, j = manufacture_sources(p, c)
    rv, rs = potential_source_residual(p, rho, j, c)
    gauss = gauss_source_residual(p, rho, c)
    rho_scale = FOUR_PI * rho.max_abs()
    j_scale = FOUR_PI / c * j.max_abs()
    relative = lambda value, scale: value / scale if scale > 0 else value
    return relative(rv, j_scale), relative(rs, rho_scale), relative(gauss, rho_scale)
