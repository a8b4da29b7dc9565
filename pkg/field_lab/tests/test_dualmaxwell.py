import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from field_lab.core import dualmaxwell
from field_lab.core.dualmaxwell import (
    CONVENTIONAL_SIGN,
    VERBATIM_SIGN,
    FunctionSchedule,
    SampledSchedule,
    SourceSet,
    StaggeredState,
)
from field_lab.core.errors import CFLViolationError, GridMismatchError, InvalidInputError, SourceError
from field_lab.core.fields import GridSpec, random_smooth_scalar
from field_lab.core.utils import relative_error


def advance(state, src, dt, steps, sign=VERBATIM_SIGN):
    for _ in range(steps):
        state = dualmaxwell.step(state, src, dt, sign)
    return state


class StepperTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(8, 0.5)

    def test_cfl_limit_is_enforced(self):
        limit = dualmaxwell.cfl_limit(self.spec)
        assert_allclose(limit, 0.5 / math.sqrt(3.0))
        state, src = dualmaxwell.transverse_pulse(self.spec)
        with self.assertRaises(CFLViolationError):
            dualmaxwell.step(state, src, 1.01 * limit)
        with self.assertRaises(InvalidInputError):
            dualmaxwell.step(state, src, 0.0)

    def test_the_cfl_limit_itself_is_rejected(self):
        state, src = dualmaxwell.transverse_pulse(self.spec)
        with self.assertRaises(CFLViolationError):
            dualmaxwell.step(state, src, dualmaxwell.cfl_limit(self.spec))

    def test_fastest_lattice_mode_stays_bounded_just_below_the_limit(self):
        # kh = pi/2 along the diagonal maximises |sin(kh)/h| on the lattice
        k = math.pi
        x = self.spec.coordinates()
        phase = np.cos(k * (x[0] + x[1] + x[2]))
        e = np.stack([-phase, phase, np.zeros_like(phase)])
        state = StaggeredState(self.spec, e, np.zeros_like(e))
        vacuum = SourceSet.vacuum(self.spec)
        dt = 0.99 * dualmaxwell.cfl_limit(self.spec)
        initial = state.field_energy()
        worst = 0.0
        for _ in range(2000):
            state = dualmaxwell.step(state, vacuum, dt)
            worst = max(worst, abs(state.field_energy() - initial))
        self.assertLess(worst / initial, 1e-9)

    def test_field_energy_drift_at_half_cfl(self):
        spec = GridSpec(16, 0.25)
        state, src = dualmaxwell.transverse_pulse(spec)
        dt = 0.5 * dualmaxwell.cfl_limit(spec)
        _, trace = dualmaxwell.run(state, src, 1000, dt)
        energies = trace["field_energy"].to_numpy()
        self.assertLessEqual(np.max(np.abs(energies - energies[0])) / energies[0], 1e-6)

    def test_matches_ordinary_maxwell_without_magnetic_sources(self):
        pulse, _ = dualmaxwell.transverse_pulse(self.spec)
        _, src = dualmaxwell.oscillating_dipole(self.spec)
        state_a = pulse
        state_b = pulse
        for _ in range(3):
            state_a = dualmaxwell.step(state_a, src, 0.1)
            state_b = dualmaxwell.standard_step(state_b, src, 0.1)
            assert_array_equal(state_a.e, state_b.e)
            assert_array_equal(state_a.h, state_b.h)

    def test_sources_must_share_the_grid(self):
        state, _ = dualmaxwell.transverse_pulse(self.spec)
        with self.assertRaises(GridMismatchError):
            dualmaxwell.step(state, SourceSet.vacuum(GridSpec(8, 0.25)), 0.1)

    def test_plane_wave_converges_at_second_order(self):
        errors = []
        for n, dt in ((16, 0.05), (32, 0.025)):
            spec = GridSpec(n, 4.0 / n)
            state = dualmaxwell.plane_wave(spec)
            state = advance(state, SourceSet.vacuum(spec), dt, round(1.0 / dt))
            exact = dualmaxwell.plane_wave(spec, t=state.t)
            errors.append(float(np.max(np.abs(state.e - exact.e))))
        ratio = errors[0] / errors[1]
        self.assertGreaterEqual(ratio, 3.2)
        self.assertLessEqual(ratio, 4.8)

    def test_discrete_energy_is_constant_after_the_first_step(self):
        state, src = dualmaxwell.transverse_pulse(self.spec)
        _, trace = dualmaxwell.run(state, src, 40, 0.1)
        self.assertEqual(len(trace), 41)
        energies = trace["energy"].to_numpy()[1:]
        self.assertLess(np.max(np.abs(energies - energies[0])) / energies[0], 1e-12)


class ConstraintTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(8, 0.5)

    def test_gauss_law_is_preserved(self):
        state, src = dualmaxwell.static_charge(self.spec)
        final, trace = dualmaxwell.run(state, src, 50, 0.1)
        self.assertLessEqual(trace["re"].max(), 1e-11)
        self.assertLessEqual(trace["rm"].max(), 1e-11)
        self.assertAlmostEqual(final.t, 5.0)

    def test_coulomb_field_has_the_requested_divergence(self):
        rho = random_smooth_scalar(self.spec, np.random.default_rng(30)).values + 0.3
        field = dualmaxwell.coulomb_field(self.spec, rho)
        expected = 4.0 * math.pi * (rho - rho.mean())
        self.assertLess(relative_error(dualmaxwell.div(field, self.spec.h), expected), 1e-12)
        assert_allclose(dualmaxwell.curl(field, self.spec.h), 0.0, atol=1e-12)

    def test_discontinuous_sources_are_rejected(self):
        profile = dualmaxwell.gaussian_profile(self.spec, 2.0)
        src = SourceSet(self.spec, rho_e=FunctionSchedule(lambda t: t * profile, self.spec.shape))
        with self.assertRaises(SourceError):
            dualmaxwell.run(StaggeredState.zeros(self.spec), src, 10, 0.1)

    def test_dipole_sources_satisfy_continuity(self):
        _, src = dualmaxwell.oscillating_dipole(self.spec)
        dualmaxwell.check_continuity(src, 0.1, 20)
        with self.assertRaises(SourceError):
            dualmaxwell.oscillating_dipole(self.spec, frequency=0.0)

    def test_sampled_schedule_must_cover_the_run(self):
        samples = np.zeros((2,) + self.spec.shape)
        src = SourceSet(self.spec, rho_e=SampledSchedule([0.0, 0.5], samples))
        with self.assertRaises(SourceError):
            dualmaxwell.run(StaggeredState.zeros(self.spec), src, 10, 0.1)


class DualityTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(8, 0.5)
        self.state, _ = dualmaxwell.transverse_pulse(self.spec)
        _, self.src = dualmaxwell.oscillating_dipole(self.spec)

    def commutation_error(self, state, src, angle, sign, steps=3):
        stepped = advance(state, src, 0.1, steps, sign)
        after, _ = dualmaxwell.duality_rotate(stepped, src, angle)
        rotated_state, rotated_src = dualmaxwell.duality_rotate(state, src, angle)
        before = advance(rotated_state, rotated_src, 0.1, steps, sign)
        return relative_error(
            np.concatenate([before.e, before.h]), np.concatenate([after.e, after.h])
        )

    def test_rotation_commutes_with_conventional_sign(self):
        for angle in (math.pi / 6, math.pi / 4, math.pi / 2):
            self.assertLess(self.commutation_error(self.state, self.src, angle, CONVENTIONAL_SIGN), 1e-12)

    def test_rotation_breaks_with_verbatim_sign_and_sources(self):
        self.assertGreater(self.commutation_error(self.state, self.src, math.pi / 4, VERBATIM_SIGN), 1e-6)

    def test_vacuum_commutes_for_both_signs(self):
        vacuum = SourceSet.vacuum(self.spec)
        for sign in (VERBATIM_SIGN, CONVENTIONAL_SIGN):
            self.assertLess(self.commutation_error(self.state, vacuum, math.pi / 3, sign), 1e-12)


class MagneticWorldTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(8, 0.5)

    def test_monopole_run_keeps_div_e_at_round_off(self):
        _, src = dualmaxwell.static_monopole(self.spec)
        final, trace = dualmaxwell.magnetic_world_run(src, 20, 0.1)
        self.assertEqual(len(trace), 21)
        self.assertLessEqual(trace["rm"].max(), 1e-11)
        self.assertLess(np.max(np.abs(dualmaxwell.div(final.e, self.spec.h))), 1e-12)

    def test_electric_sources_are_refused(self):
        _, src = dualmaxwell.static_charge(self.spec)
        with self.assertRaises(SourceError):
            dualmaxwell.magnetic_world_run(src, 5, 0.1)


class UnitConversionTests(SimpleTestCase):
    def test_gauss_law_loses_its_four_pi(self):
        spec = GridSpec(8, 0.5)
        rho = random_smooth_scalar(spec, np.random.default_rng(31)).values
        rho = rho - rho.mean()
        e = dualmaxwell.coulomb_field(spec, rho)
        e_hl, h_hl = dualmaxwell.fields_to_heaviside_lorentz(e, np.zeros_like(e))
        rho_hl = dualmaxwell.charge_to_heaviside_lorentz(rho)
        assert_allclose(dualmaxwell.div(e_hl, spec.h), rho_hl, atol=1e-12 * np.max(np.abs(rho_hl)))
        assert_allclose(h_hl, 0.0)

    def test_energy_scales_by_four_pi(self):
        spec = GridSpec(8, 0.5)
        state, _ = dualmaxwell.transverse_pulse(spec)
        e_hl, h_hl = dualmaxwell.fields_to_heaviside_lorentz(state.e, state.h)
        energy_hl = 0.5 * (np.sum(e_hl**2) + np.sum(h_hl**2)) * spec.cell_volume
        assert_allclose(energy_hl, state.field_energy() / (4.0 * math.pi), rtol=1e-14)
