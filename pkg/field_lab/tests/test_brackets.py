import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from field_lab.core import brackets
from field_lab.core.brackets import (
    CanonicalLattice,
    LatticeFunctional,
    coordinate,
    divergence_b,
    hamiltonian_functional,
    momentum,
    poisson_bracket,
)
from field_lab.core.errors import EvaluationFailure, GridMismatchError, InvalidInputError
from field_lab.core.fields import GridSpec


class BracketTestCase(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(6, 0.5)
        self.state = brackets.random_smooth_state(self.spec, np.random.default_rng(21))
        self.x0 = (2, 3, 1)


class CanonicalRelationTests(BracketTestCase):
    def test_canonical_relations_hold(self):
        pairs = [((0, 0, 0), (0, 0, 0)), ((1, 2, 3), (1, 2, 3)), ((1, 2, 3), (1, 2, 4)), ((5, 0, 1), (0, 5, 1))]
        self.assertLessEqual(brackets.canonical_relation_residual(self.state, pairs), 1e-12)

    def test_conjugate_pair_value(self):
        value = poisson_bracket(momentum(2, self.x0), coordinate(2, self.x0), self.state)
        assert_allclose(value, -1.0 / self.spec.cell_volume, rtol=1e-15)
        self.assertEqual(poisson_bracket(momentum(2, self.x0), coordinate(1, self.x0), self.state), 0.0)

    def test_quantum_bracket_scales_with_hbar(self):
        classical = poisson_bracket(momentum(1, self.x0), coordinate(1, self.x0), self.state)
        quantum = poisson_bracket(momentum(1, self.x0), coordinate(1, self.x0), self.state, hbar=0.5)
        assert_allclose(quantum, 0.5 * classical, rtol=1e-15)
        pairs = [(self.x0, self.x0)]
        self.assertLessEqual(brackets.canonical_relation_residual(self.state, pairs, hbar=0.5), 1e-12)

    def test_points_wrap_periodically(self):
        wrapped = (self.x0[0] + 6, self.x0[1] - 6, self.x0[2])
        self.assertEqual(coordinate(3, wrapped)(self.state), coordinate(3, self.x0)(self.state))


class ConstraintTests(BracketTestCase):
    def test_secondary_constraint_analytic(self):
        for point in brackets.default_sample_points(self.spec, count=5):
            self.assertLess(abs(brackets.secondary_constraint_residual(self.state, point)), 1e-10)

    def test_secondary_constraint_numeric(self):
        residual = brackets.secondary_constraint_residual(self.state, self.x0, numeric=True)
        scale = abs(divergence_b(self.x0)(self.state)) + 1.0
        self.assertLess(abs(residual) / scale, 1e-6)

    def test_constraint_chain_closes(self):
        self.assertLess(brackets.constraint_chain_closure(self.state), 1e-10)
        self.assertLess(brackets.constraint_chain_closure(self.state, [self.x0], numeric=True), 1e-6)

    def test_constraints_close_for_twenty_states_on_a_finer_grid(self):
        spec = GridSpec(16, 0.25)
        rng = np.random.default_rng(23)
        points = brackets.default_sample_points(spec, count=10)
        self.assertEqual(len(set(points)), 10)
        for _ in range(20):
            state = brackets.random_smooth_state(spec, rng)
            tolerance = 1e-6 * max(1.0, state.scale())
            for point in points:
                self.assertLess(abs(brackets.secondary_constraint_residual(state, point)), tolerance)
            self.assertLess(brackets.constraint_chain_closure(state, points), tolerance)

    def test_plane_wave_closes(self):
        state = brackets.plane_wave_state(self.spec)
        self.assertLess(brackets.constraint_chain_closure(state), 1e-12)
        self.assertLess(abs(brackets.secondary_constraint_residual(state, self.x0)), 1e-12)


class HamiltonianTests(BracketTestCase):
    def test_hamiltonian_commutes_with_itself(self):
        h_functional = hamiltonian_functional()
        self.assertEqual(poisson_bracket(h_functional, h_functional, self.state), 0.0)

    def test_antisymmetry(self):
        f = divergence_b(self.x0)
        g = hamiltonian_functional()
        assert_allclose(poisson_bracket(f, g, self.state), -poisson_bracket(g, f, self.state), atol=1e-14)

    def test_plane_wave_hamiltonian(self):
        state = brackets.plane_wave_state(self.spec, amplitude=0.5)
        x, _, _ = self.spec.coordinates()
        k = 2.0 * np.pi / self.spec.length
        curl_z = 0.5 * np.cos(k * x) * np.sin(k * self.spec.h) / self.spec.h
        expected = np.sum(0.5 * curl_z**2 + 0.5 * state.b[2] ** 2) * self.spec.cell_volume
        assert_allclose(brackets.hamiltonian(state), expected, rtol=1e-13)

    def test_total_hamiltonian_adds_the_primary_constraint(self):
        v = np.random.default_rng(22).standard_normal(self.spec.shape)
        expected = brackets.hamiltonian(self.state) + np.sum(v * self.state.b[0]) * self.spec.cell_volume
        assert_allclose(brackets.total_hamiltonian(self.state, v), expected, rtol=1e-13)
        functional = brackets.total_hamiltonian_functional(v)
        assert_allclose(poisson_bracket(coordinate(0, self.x0), functional, self.state), v[self.x0], rtol=1e-13)
        self.assertLess(abs(poisson_bracket(momentum(0, self.x0), functional, self.state)
                            - divergence_b(self.x0)(self.state)), 1e-10)
        with self.assertRaises(GridMismatchError):
            brackets.total_hamiltonian(self.state, np.zeros((3, 3, 3)))

    def test_analytic_and_numeric_derivatives_agree(self):
        f = coordinate(1, self.x0)
        analytic = poisson_bracket(f, hamiltonian_functional(), self.state)
        numeric = poisson_bracket(f, hamiltonian_functional().numeric(), self.state)
        assert_allclose(numeric, analytic, atol=1e-6)


class FailureTests(BracketTestCase):
    def test_non_finite_derivative_is_reported(self):
        broken = LatticeFunctional(
            "broken", lambda state: 0.0, lambda state: (np.full_like(state.a, np.nan), np.zeros_like(state.b))
        )
        with self.assertRaises(EvaluationFailure):
            poisson_bracket(broken, hamiltonian_functional(), self.state)

    def test_non_positive_step_is_rejected(self):
        for eps in (0.0, -1e-3):
            with self.assertRaises(InvalidInputError):
                LatticeFunctional("f", lambda state: 0.0, eps=eps)
        with self.assertRaises(InvalidInputError):
            hamiltonian_functional().numeric(eps=0.0)

    def test_lattice_shape_is_checked(self):
        with self.assertRaises(GridMismatchError):
            CanonicalLattice(self.spec, np.zeros((3,) + self.spec.shape), np.zeros((4,) + self.spec.shape))
