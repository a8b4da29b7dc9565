import logging
import math

import numpy as np
import pandas as pd

from .errors import (
    CFLViolationError,
    ConstraintViolationError,
    GridMismatchError,
    InvalidInputError,
    SourceError,
)
from .fields import central_difference, from_spectrum, to_spectrum

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi
# +1 reproduces the printed symmetric equations, -1 the conventional monopole sign
VERBATIM_SIGN = 1.0
CONVENTIONAL_SIGN = -1.0
DIV_E_TOLERANCE = 1e-12


# ---------------------------------------------------------------------------
# Lattice operators


def curl(values, h):
    d = lambda i, axis: central_difference(values[i], axis, h)
    return np.stack([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)])


def div(values, h):
    return sum(central_difference(values[i], i, h) for i in range(3))


def cfl_limit(spec):
    return spec.h / (spec.c * math.sqrt(3.0))


def check_cfl(spec, dt):
    """
    The leapfrog is stable only for c*dt*|kappa| < 1 on every mode, and the
    diagonal kh = pi/2 mode reaches |kappa| = sqrt(3)/h, so the limit itself
    is excluded.
    """
    if not np.isfinite(dt) or dt <= 0:
        raise InvalidInputError(f"time step must be positive, got {dt!r}")
    limit = cfl_limit(spec)
    if dt >= limit:
        raise CFLViolationError(dt, limit)
    return limit


def lattice_wavevectors(spec):
    """Symbol kappa = sin(k h)/h of the central difference on every mode."""
    return np.sin(spec.wavevectors() * spec.h) / spec.h


# ---------------------------------------------------------------------------
# Sources


class Schedule:
    """Time-dependent lattice array; subclasses implement ``at``."""

    def at(self, t):
        raise NotImplementedError

    def covers(self, t0, t1):
        return True


class StaticSchedule(Schedule):
    def __init__(self, values):
        values = np.array(values, dtype=float)
        values.setflags(write=False)
        self.values = values

    def at(self, t):
        return self.values

    def is_zero(self):
        return not np.any(self.values)


class FunctionSchedule(Schedule):
    def __init__(self, func, shape):
        self.func = func
        self.shape = tuple(shape)

    def at(self, t):
        values = np.asarray(self.func(t), dtype=float)
        if values.shape != self.shape:
            raise SourceError(f"source schedule returned shape {values.shape}, expected {self.shape}")
        return values


class SampledSchedule(Schedule):
    """Linear interpolation between samples at increasing times."""

    def __init__(self, times, samples):
        times = np.asarray(times, dtype=float)
        samples = np.asarray(samples, dtype=float)
        if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
            raise SourceError("sampled schedule needs at least two increasing times")
        if samples.shape[0] != len(times):
            raise SourceError("one sample per schedule time is required")
        self.times = times
        self.samples = samples

    def covers(self, t0, t1):
        return self.times[0] <= t0 and t1 <= self.times[-1]

    def at(self, t):
        if not self.times[0] <= t <= self.times[-1]:
            raise SourceError(f"time {t!r} lies outside the sampled schedule")
        index = int(np.clip(np.searchsorted(self.times, t) - 1, 0, len(self.times) - 2))
        t0, t1 = self.times[index], self.times[index + 1]
        weight = (t - t0) / (t1 - t0)
        return (1.0 - weight) * self.samples[index] + weight * self.samples[index + 1]


class _MixedSchedule(Schedule):
    def __init__(self, first, second, a, b):
        self.parts = (first, second)
        self.weights = (a, b)

    def at(self, t):
        first, second = self.parts
        return self.weights[0] * first.at(t) + self.weights[1] * second.at(t)

    def covers(self, t0, t1):
        return all(part.covers(t0, t1) for part in self.parts)


class SourceSet:
    """Electric and magnetic charge/current densities as schedules."""

    def __init__(self, spec, rho_e=None, j_e=None, rho_m=None, j_m=None):
        self.spec = spec
        scalar = spec.shape
        vector = (3,) + spec.shape
        self.rho_e = self._schedule(rho_e, scalar, "rho_e")
        self.j_e = self._schedule(j_e, vector, "j_e")
        self.rho_m = self._schedule(rho_m, scalar, "rho_m")
        self.j_m = self._schedule(j_m, vector, "j_m")

    @staticmethod
    def _schedule(value, shape, name):
        if value is None:
            return StaticSchedule(np.zeros(shape))
        if isinstance(value, Schedule):
            return value
        values = np.asarray(getattr(value, "values", value), dtype=float)
        if values.shape != shape:
            raise SourceError(f"{name} needs shape {shape}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise SourceError(f"{name} contains non-finite values")
        return StaticSchedule(values)

    @classmethod
    def vacuum(cls, spec):
        return cls(spec)

    def schedules(self):
        return (self.rho_e, self.j_e, self.rho_m, self.j_m)

    def covers(self, t0, t1):
        return all(s.covers(t0, t1) for s in self.schedules())

    def electric_is_zero(self, times):
        for schedule in (self.rho_e, self.j_e):
            if isinstance(schedule, StaticSchedule):
                if not schedule.is_zero():
                    return False
                continue
            if any(np.any(schedule.at(t)) for t in times):
                return False
        return True

    def magnetic_is_zero(self):
        return all(
            isinstance(s, StaticSchedule) and s.is_zero() for s in (self.rho_m, self.j_m)
        )

    def is_static(self):
        return all(isinstance(s, StaticSchedule) for s in self.schedules())

    def is_vacuum(self):
        return self.is_static() and all(s.is_zero() for s in self.schedules())


# ---------------------------------------------------------------------------
# State


class StaggeredState:
    """
    Collocated E and H at time t, plus the level one step earlier that the
    three-level leapfrog needs. A fresh state has no previous level.
    """

    def __init__(self, spec, e, h, t=0.0, previous=None):
        e = np.array(e, dtype=float)
        h = np.array(h, dtype=float)
        expected = (3,) + spec.shape
        if e.shape != expected or h.shape != expected:
            raise GridMismatchError(f"E and H need shape {expected}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(h))):
            raise InvalidInputError("field state contains non-finite values")
        e.setflags(write=False)
        h.setflags(write=False)
        self.spec = spec
        self.e = e
        self.h = h
        self.t = float(t)
        self.previous = previous  # (e_prev, h_prev, dt) or None

    @classmethod
    def zeros(cls, spec, t=0.0):
        return cls(spec, np.zeros((3,) + spec.shape), np.zeros((3,) + spec.shape), t)

    def field_energy(self):
        """Sum (E^2 + H^2)/2 h^3."""
        return float(0.5 * (np.sum(self.e**2) + np.sum(self.h**2)) * self.spec.cell_volume)

    def energy(self):
        """
        Discrete energy conserved by the vacuum leapfrog:
        1/2 h^3 (E^n . E^{n-1} + H^n . H^{n-1}). Falls back to field_energy
        before the first step.
        """
        if self.previous is None:
            return self.field_energy()
        e_prev, h_prev, _ = self.previous
        return float(
            0.5 * (np.sum(self.e * e_prev) + np.sum(self.h * h_prev)) * self.spec.cell_volume
        )

    def scale(self):
        return max(float(np.max(np.abs(self.e))), float(np.max(np.abs(self.h))))

    def __repr__(self):
        return f"StaggeredState({self.spec!r}, t={self.t!r})"


def _rates(spec, e, h, j_e, j_m, magnetic_sign):
    c = spec.c
    rate_e = c * curl(h, spec.h) - FOUR_PI * j_e
    rate_h = -c * curl(e, spec.h) + FOUR_PI * magnetic_sign * j_m
    return rate_e, rate_h


def _physical_root(spec, dt, values):
    """
    sqrt(1 + (dt M)^2) for the free Maxwell operator M, applied to one
    field: identity on the longitudinal part, sqrt(1 - (c dt |kappa|)^2) on
    the transverse part.
    """
    kappa = lattice_wavevectors(spec)
    k2 = np.sum(kappa**2, axis=0)
    values_hat = to_spectrum(values)
    safe = np.where(k2 > 0, k2, 1.0)
    longitudinal = kappa * (np.sum(kappa * values_hat, axis=0) / safe)
    factor = np.sqrt(np.clip(1.0 - (spec.c * dt) ** 2 * k2, 0.0, None))
    return from_spectrum(longitudinal + factor * (values_hat - longitudinal))


def _advance(state, dt, rates):
    """
    Shared update: three-level leapfrog. The first level is started on the
    forward-travelling root of the leapfrog, so the free field keeps
    sum (E^2 + H^2) to roundoff instead of beating against the computational
    mode.
    """
    spec = state.spec
    t = state.t
    previous = state.previous
    if previous is None or previous[2] != dt:
        zero = np.zeros((3,) + spec.shape)
        forced_e, forced_h = rates(zero, zero, t)
        mid_e, mid_h = rates(zero, zero, t + 0.5 * dt)
        rate_e, rate_h = rates(state.e, state.h, t)
        # curl part applied to the forcing, for the dt^2 term
        twice_e, twice_h = rates(forced_e, forced_h, t)
        e_new = (
            _physical_root(spec, dt, state.e)
            + dt * (rate_e - forced_e)
            + dt * mid_e
            + 0.5 * dt**2 * (twice_e - forced_e)
        )
        h_new = (
            _physical_root(spec, dt, state.h)
            + dt * (rate_h - forced_h)
            + dt * mid_h
            + 0.5 * dt**2 * (twice_h - forced_h)
        )
    else:
        e_prev, h_prev, _ = previous
        rate_e, rate_h = rates(state.e, state.h, t)
        e_new = e_prev + 2.0 * dt * rate_e
        h_new = h_prev + 2.0 * dt * rate_h
    return StaggeredState(spec, e_new, h_new, t + dt, previous=(state.e, state.h, dt))


def step(state, src, dt, magnetic_sign=VERBATIM_SIGN):
    """
    One step of the symmetric system (Gaussian units)

        dE/dt =  c curl H - 4 pi j_e
        dH/dt = -c curl E + 4 pi sign j_m
    """
    if src.spec != state.spec:
        raise GridMismatchError(f"sources on {src.spec!r}, state on {state.spec!r}")
    check_cfl(state.spec, dt)

    def rates(e, h, t):
        return _rates(state.spec, e, h, src.j_e.at(t), src.j_m.at(t), magnetic_sign)

    return _advance(state, dt, rates)


def standard_step(state, src, dt):
    """Reference stepper for the ordinary Maxwell equations; magnetic sources are ignored."""
    check_cfl(state.spec, dt)
    spec = state.spec
    c = spec.c

    def rates(e, h, t):
        rate_e = c * curl(h, spec.h) - FOUR_PI * src.j_e.at(t)
        rate_h = -c * curl(e, spec.h)
        return rate_e, rate_h

    return _advance(state, dt, rates)


# ---------------------------------------------------------------------------
# Diagnostics


def gauss_residuals(state, src):
    """max |div E - 4 pi rho_e| and max |div H - 4 pi rho_m| at the state time."""
    h = state.spec.h
    re = float(np.max(np.abs(div(state.e, h) - FOUR_PI * src.rho_e.at(state.t))))
    rm = float(np.max(np.abs(div(state.h, h) - FOUR_PI * src.rho_m.at(state.t))))
    return re, rm


def continuity_residual(src, dt, t=0.0, magnetic_sign=VERBATIM_SIGN):
    """
    max |d rho_e/dt + div j_e| and max |d rho_m/dt - sign div j_m| with
    central differences of half-width dt around t.
    """
    if dt <= 0:
        raise InvalidInputError(f"probe step must be positive, got {dt!r}")
    h = src.spec.h
    rate = lambda schedule: (schedule.at(t + dt) - schedule.at(t - dt)) / (2.0 * dt)
    ce = float(np.max(np.abs(rate(src.rho_e) + div(src.j_e.at(t), h))))
    cm = float(np.max(np.abs(rate(src.rho_m) - magnetic_sign * div(src.j_m.at(t), h))))
    return ce, cm


def continuity_scale(src, t=0.0):
    h = src.spec.h
    return max(
        float(np.max(np.abs(div(src.j_e.at(t), h)))),
        float(np.max(np.abs(div(src.j_m.at(t), h)))),
    )


# ---------------------------------------------------------------------------
# Duality


def duality_rotate(state, src, angle):
    """
    (E, H) -> (E cos + H sin, -E sin + H cos); the same rotation mixes the
    electric and magnetic sources. Both time levels of the state rotate.
    """
    cos, sin = math.cos(angle), math.sin(angle)
    rotate = lambda first, second: (cos * first + sin * second, -sin * first + cos * second)
    e, h = rotate(state.e, state.h)
    previous = None
    if state.previous is not None:
        e_prev, h_prev, dt = state.previous
        previous = rotate(e_prev, h_prev) + (dt,)
    rotated_state = StaggeredState(state.spec, e, h, state.t, previous)

    rotated_src = SourceSet(
        src.spec,
        rho_e=_MixedSchedule(src.rho_e, src.rho_m, cos, sin),
        j_e=_MixedSchedule(src.j_e, src.j_m, cos, sin),
        rho_m=_MixedSchedule(src.rho_e, src.rho_m, -sin, cos),
        j_m=_MixedSchedule(src.j_e, src.j_m, -sin, cos),
    )
    return rotated_state, rotated_src


# ---------------------------------------------------------------------------
# Unit conversion


def fields_to_heaviside_lorentz(e, h):
    factor = 1.0 / math.sqrt(FOUR_PI)
    return e * factor, h * factor


def charge_to_heaviside_lorentz(rho):
    return rho * math.sqrt(FOUR_PI)


# ---------------------------------------------------------------------------
# Static fields and presets


def coulomb_field(spec, rho):
    """
    Curl-free field F with div F = 4 pi rho for the central-difference
    divergence. The mean of rho cannot be represented on a periodic lattice
    and is dropped.
    """
    rho = np.asarray(getattr(rho, "values", rho), dtype=float)
    k_c = np.sin(spec.wavevectors() * spec.h) / spec.h
    k2 = np.sum(k_c**2, axis=0)
    rho_hat = to_spectrum(rho)
    safe = np.where(k2 > 0, k2, 1.0)
    field_hat = np.where(k2 > 0, -1j * k_c * FOUR_PI * rho_hat / safe, 0.0)
    return from_spectrum(field_hat)


def gaussian_profile(spec, width_cells, center=None):
    x, y, z = spec.coordinates()
    center = np.full(3, spec.length / 2.0) if center is None else np.asarray(center, dtype=float)
    sigma = width_cells * spec.h
    r2 = (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2
    return np.exp(-r2 / (2.0 * sigma**2))


def neutralized(values):
    return values - np.mean(values)


def static_monopole(spec, strength=1.0, width_cells=2.0):
    """Neutralised magnetic charge bump with its Coulomb H and E = 0."""
    rho_m = neutralized(strength * gaussian_profile(spec, width_cells))
    state = StaggeredState(spec, np.zeros((3,) + spec.shape), coulomb_field(spec, rho_m))
    return state, SourceSet(spec, rho_m=rho_m)


def static_charge(spec, strength=1.0, width_cells=2.0):
    rho_e = neutralized(strength * gaussian_profile(spec, width_cells))
    state = StaggeredState(spec, coulomb_field(spec, rho_e), np.zeros((3,) + spec.shape))
    return state, SourceSet(spec, rho_e=rho_e)


def oscillating_dipole(spec, strength=1.0, frequency=1.0, width_cells=2.0):
    """
    j_e = strength g(x) z cos(w t) with rho_e = -div(g z) sin(w t)/w, which
    satisfies the discrete continuity equation exactly in continuous time.
    """
    if frequency <= 0:
        raise SourceError(f"dipole frequency must be positive, got {frequency!r}")
    omega = 2.0 * math.pi * frequency
    profile = np.zeros((3,) + spec.shape)
    profile[2] = strength * gaussian_profile(spec, width_cells)
    div_profile = div(profile, spec.h)
    src = SourceSet(
        spec,
        rho_e=FunctionSchedule(lambda t: -div_profile * math.sin(omega * t) / omega, spec.shape),
        j_e=FunctionSchedule(lambda t: profile * math.cos(omega * t), (3,) + spec.shape),
    )
    return StaggeredState.zeros(spec), src


def transverse_pulse(spec, strength=1.0, width_cells=2.0):
    """Source-free pulse E = curl(g y) with H = 0, divergence-free on the lattice."""
    potential = np.zeros((3,) + spec.shape)
    potential[1] = strength * gaussian_profile(spec, width_cells)
    e = curl(potential, spec.h)
    return StaggeredState(spec, e, np.zeros((3,) + spec.shape)), SourceSet.vacuum(spec)


def plane_wave(spec, t=0.0, mode=1, amplitude=1.0):
    """E_y = H_z = amplitude cos(k x - w t), an exact vacuum solution."""
    x, _, _ = spec.coordinates()
    k = 2.0 * math.pi * mode / spec.length
    phase = np.cos(k * x - spec.c * k * t)
    e = np.zeros((3,) + spec.shape)
    h = np.zeros((3,) + spec.shape)
    e[1] = amplitude * phase
    h[2] = amplitude * phase
    return StaggeredState(spec, e, h, t)


PRESETS = {
    "static-monopole": lambda spec, cfg: static_monopole(spec, cfg["strength"], cfg["width"]),
    "static-charge": lambda spec, cfg: static_charge(spec, cfg["strength"], cfg["width"]),
    "oscillating-dipole": lambda spec, cfg: oscillating_dipole(
        spec, cfg["strength"], cfg["frequency"], cfg["width"]
    ),
    "pulse": lambda spec, cfg: transverse_pulse(spec, cfg["strength"], cfg["width"]),
}


# ---------------------------------------------------------------------------
# Runs


def _trace_row(state, src, dt, magnetic_sign):
    re, rm = gauss_residuals(state, src)
    ce, cm = continuity_residual(src, dt, state.t, magnetic_sign)
    return {
        "step": 0,
        "t": state.t,
        "energy": state.energy(),
        "field_energy": state.field_energy(),
        "re": re,
        "rm": rm,
        "ce": ce,
        "cm": cm,
    }


def continuity_samples(src, dt, steps, magnetic_sign=VERBATIM_SIGN, samples=5):
    """
    (t, ce, cm, scale) at evenly spaced times of the run, differenced with a
    half-width of min(dt, 1e-4) so the time derivative is resolved.
    """
    half_width = min(dt, 1e-4)
    rows = []
    for t in np.linspace(0.0, dt * steps, samples):
        ce, cm = continuity_residual(src, half_width, float(t), magnetic_sign)
        rows.append((float(t), ce, cm, max(continuity_scale(src, float(t)), 1.0)))
    return rows


def check_continuity(src, dt, steps, magnetic_sign=VERBATIM_SIGN, tolerance=1e-6, samples=5):
    """Reject sources whose continuity residual exceeds tolerance times their scale."""
    for t, ce, cm, scale in continuity_samples(src, dt, steps, magnetic_sign, samples):
        if max(ce, cm) > tolerance * scale:
            raise SourceError(
                f"sources violate charge continuity at t={t:.6g}: "
                f"electric {ce:.3e}, magnetic {cm:.3e}"
            )


def run(state, src, steps, dt, magnetic_sign=VERBATIM_SIGN, cadence=0, tolerance=1e-6,
        on_row=None, guard=None):
    """
    Advance ``steps`` steps and return (final_state, trace DataFrame).

    ``on_row(step, state, row)`` is called for every row; ``guard(state)``
    may raise to stop the run.
    """
    if steps < 0:
        raise InvalidInputError(f"step count must be non-negative, got {steps!r}")
    check_cfl(state.spec, dt)
    if not src.covers(state.t - dt, state.t + (steps + 1) * dt):
        raise SourceError("source schedules do not cover the simulated interval")
    check_continuity(src, dt, steps, magnetic_sign, tolerance)
    logger.info(
        "dual run: %d steps, dt=%g (CFL limit %g), magnetic sign %+g",
        steps, dt, cfl_limit(state.spec), magnetic_sign,
    )

    rows = []
    for index in range(steps + 1):
        if index:
            state = step(state, src, dt, magnetic_sign)
        if guard is not None:
            guard(state)
        row = _trace_row(state, src, dt, magnetic_sign)
        row["step"] = index
        rows.append(row)
        if on_row is not None:
            on_row(index, state, row)
        if cadence and index % cadence == 0:
            logger.info("step %d t=%.6g energy=%.12g re=%.3e rm=%.3e",
                        index, state.t, row["energy"], row["re"], row["rm"])
    return state, pd.DataFrame(rows)


def magnetic_world_run(src, steps, dt, state=None, magnetic_sign=VERBATIM_SIGN, **kwargs):
    """
    Run with electric sources identically zero and require div E to stay
    at round-off level throughout.
    """
    times = [i * dt for i in range(steps + 1)]
    if not src.electric_is_zero(times):
        raise SourceError("magnetic world run needs rho_e = j_e = 0")
    if state is None:
        h_field = coulomb_field(src.spec, src.rho_m.at(0.0))
        state = StaggeredState(src.spec, np.zeros((3,) + src.spec.shape), h_field)

    def guard(current):
        div_e = float(np.max(np.abs(div(current.e, current.spec.h))))
        if div_e > DIV_E_TOLERANCE * max(1.0, current.scale()):
            raise ConstraintViolationError(f"div E = {div_e:.3e} at t={current.t:.6g}")

    return run(state, src, steps, dt, magnetic_sign, guard=guard, **kwargs)
