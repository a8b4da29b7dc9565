import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from field_lab.core.errors import GridMismatchError, InvalidInputError
from field_lab.core.fields import (
    GridSpec,
    ScalarFieldGrid,
    SphericalSamples,
    VectorFieldGrid,
    curl,
    divergence,
    gauge_transform,
    gradient,
    helmholtz_split,
    laplacian,
    project_resolved,
    project_transverse,
    radial_falloff_fit,
    random_smooth_scalar,
    random_smooth_vector,
    read_snapshot,
    snapshot_table,
    spectral_curl,
    spectral_divergence_norm,
    spectral_gradient,
    spectral_laplacian,
    spherical_divergence,
    write_snapshot,
)


class GridSpecTests(SimpleTestCase):
    def test_rejects_bad_grids(self):
        for n, h in ((3, 0.5), (8, 0.0), (8, -1.0), (8, float("nan")), (7.5, 0.5)):
            with self.assertRaises(InvalidInputError):
                GridSpec(n, h)

    def test_geometry(self):
        spec = GridSpec(8, 0.5)
        self.assertEqual(spec.length, 4.0)
        self.assertEqual(spec.volume, 64.0)
        self.assertEqual(spec.cell_volume, 0.125)
        self.assertEqual(spec.shape, (8, 8, 8))
        x, y, z = spec.coordinates()
        self.assertEqual(x[1, 0, 0], 0.5)
        self.assertEqual(z[0, 0, 7], 3.5)

    def test_nyquist_entry_is_zeroed(self):
        spec = GridSpec(8, 0.5)
        k = spec.wavenumbers()
        self.assertEqual(k[4], 0.0)
        assert_allclose(k[1], 2.0 * np.pi / 4.0)
        mask = spec.nyquist_mask()
        self.assertTrue(mask[4, 0, 0])
        self.assertTrue(mask[1, 4, 2])
        self.assertFalse(mask[1, 3, 2])

    def test_equality_and_hash(self):
        self.assertEqual(GridSpec(8, 0.5), GridSpec(8, 0.5))
        self.assertNotEqual(GridSpec(8, 0.5), GridSpec(8, 0.5, c=2.0))
        self.assertEqual(len({GridSpec(8, 0.5), GridSpec(8, 0.5)}), 1)


class FieldGridTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(8, 0.5)
        self.rng = np.random.default_rng(1)

    def test_values_are_read_only(self):
        field = random_smooth_scalar(self.spec, self.rng)
        with self.assertRaises(ValueError):
            field.values[0, 0, 0] = 1.0

    def test_shape_and_finiteness_checked(self):
        with self.assertRaises(GridMismatchError):
            VectorFieldGrid(self.spec, np.zeros(self.spec.shape))
        values = np.zeros(self.spec.shape)
        values[1, 2, 3] = np.inf
        with self.assertRaises(InvalidInputError):
            ScalarFieldGrid(self.spec, values)

    def test_mixing_grids_is_rejected(self):
        first = ScalarFieldGrid.zeros(self.spec)
        second = ScalarFieldGrid.zeros(GridSpec(8, 0.25))
        with self.assertRaises(GridMismatchError):
            first + second

    def test_vector_algebra(self):
        f = random_smooth_vector(self.spec, self.rng)
        g = random_smooth_vector(self.spec, self.rng)
        assert_allclose(f.cross(g).dot(f).values, 0.0, atol=1e-14)
        assert_allclose(f.magnitude().values ** 2, f.dot(f).values, rtol=1e-13)
        assert_allclose(f.inner(f), f.l2() ** 2, rtol=1e-13)


class DifferenceOperatorTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(16, 0.25)
        self.rng = np.random.default_rng(2)

    def test_central_difference_of_a_sine(self):
        x, _, _ = self.spec.coordinates()
        k = 2.0 * np.pi / self.spec.length
        s = ScalarFieldGrid(self.spec, np.sin(k * x))
        expected = np.cos(k * x) * np.sin(k * self.spec.h) / self.spec.h
        assert_allclose(gradient(s).values[0], expected, atol=1e-12)
        assert_allclose(gradient(s).values[1:], 0.0, atol=1e-12)

    def test_lattice_identities(self):
        f = random_smooth_vector(self.spec, self.rng)
        s = random_smooth_scalar(self.spec, self.rng)
        self.assertLess(divergence(curl(f)).max_abs(), 1e-12)
        self.assertLess(curl(gradient(s)).max_abs(), 1e-12)

    def test_gauge_transform_leaves_curl_unchanged(self):
        a = random_smooth_vector(self.spec, self.rng)
        psi = random_smooth_scalar(self.spec, self.rng)
        assert_allclose(curl(gauge_transform(a, psi)).values, curl(a).values, atol=1e-12)

    def test_compact_laplacian_of_a_sine(self):
        x, y, _ = self.spec.coordinates()
        k = 2.0 * np.pi / self.spec.length
        s = ScalarFieldGrid(self.spec, np.sin(k * x) * np.cos(k * y))
        symbol = 2.0 * (2.0 - 2.0 * np.cos(k * self.spec.h)) / self.spec.h**2
        assert_allclose(laplacian(s).values, -symbol * s.values, atol=1e-11)

    def test_spectral_operators_are_exact_on_resolved_modes(self):
        x, _, z = self.spec.coordinates()
        k = 2.0 * np.pi * 3 / self.spec.length
        s = ScalarFieldGrid(self.spec, np.sin(k * x) * np.cos(k * z))
        grad = spectral_gradient(s).values
        assert_allclose(grad[0], k * np.cos(k * x) * np.cos(k * z), atol=1e-12)
        assert_allclose(grad[2], -k * np.sin(k * x) * np.sin(k * z), atol=1e-12)
        assert_allclose(spectral_laplacian(s).values, -2.0 * k**2 * s.values, atol=1e-10)
        self.assertLess(spectral_curl(spectral_gradient(s)).max_abs(), 1e-12)


class HelmholtzTests(SimpleTestCase):
    def setUp(self):
        self.spec = GridSpec(16, 0.25)
        self.f = random_smooth_vector(self.spec, np.random.default_rng(3), kmax=3)

    def test_split_reconstructs_the_field(self):
        transverse, longitudinal, dc = helmholtz_split(self.f)
        rebuilt = transverse.values + longitudinal.values + dc.reshape(3, 1, 1, 1)
        assert_allclose(rebuilt, self.f.values, atol=1e-12)

    def test_parts_are_transverse_and_curl_free(self):
        transverse, longitudinal, _ = helmholtz_split(self.f)
        self.assertLess(spectral_divergence_norm(transverse), 1e-12)
        self.assertLess(spectral_curl(longitudinal).max_abs(), 1e-12)

    def test_projection_keeps_the_mean_on_request(self):
        shifted = VectorFieldGrid(self.spec, self.f.values + np.array([1.0, 2.0, 3.0]).reshape(3, 1, 1, 1))
        kept = project_transverse(shifted)
        dropped = project_transverse(shifted, keep_dc=False)
        mean = self.f.values.mean(axis=(1, 2, 3))
        assert_allclose(kept.values.mean(axis=(1, 2, 3)), mean + [1.0, 2.0, 3.0], atol=1e-12)
        assert_allclose(dropped.values.mean(axis=(1, 2, 3)), 0.0, atol=1e-12)

    def test_parts_are_orthogonal(self):
        transverse, longitudinal, _ = helmholtz_split(self.f)
        scale = self.f.l2() ** 2
        self.assertLess(abs(transverse.inner(longitudinal)), 1e-10 * scale)

    def test_projection_is_idempotent(self):
        once = project_transverse(self.f)
        assert_allclose(project_transverse(once).values, once.values, atol=1e-12)

    def test_resolved_projection_drops_nyquist_modes(self):
        spec = GridSpec(8, 0.5)
        rough = VectorFieldGrid(spec, np.random.default_rng(4).standard_normal((3,) + spec.shape))
        resolved = project_resolved(rough)
        spectrum = np.fft.fftn(resolved.values, axes=(1, 2, 3))
        self.assertLess(np.max(np.abs(spectrum[:, spec.nyquist_mask()])), 1e-10)
        self.assertLess(spectral_divergence_norm(resolved), 1e-12)
        assert_allclose(project_resolved(resolved).values, resolved.values, atol=1e-12)


class SphericalTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(4)
        self.points = np.column_stack(
            [rng.uniform(0.5, 5.0, 20), rng.uniform(0.2, 2.9, 20), rng.uniform(0.0, 6.2, 20)]
        )

    def test_inverse_square_field_is_divergence_free(self):
        for charge in (1.0, 2.0, 5.0):
            samples = SphericalSamples(self.points, lambda r, t, p, q=charge: q / r**2)
            values = spherical_divergence(samples, rel_step=1e-4)
            self.assertEqual(len(values), 20)
            self.assertLess(max(abs(v) for v in values), 1e-8)

    def test_linear_radial_field(self):
        samples = SphericalSamples(self.points, lambda r, t, p: r)
        assert_allclose(spherical_divergence(samples), 3.0, atol=1e-6)

    def test_polar_component(self):
        # E_theta = sin(theta) has divergence 2 cos(theta) / r
        samples = SphericalSamples(self.points, lambda r, t, p: 0.0 * r, e_theta=lambda r, t, p: np.sin(t))
        r, theta = self.points[:, 0], self.points[:, 1]
        assert_allclose(spherical_divergence(samples), 2.0 * np.cos(theta) / r, atol=1e-6)

    def test_singular_points_are_rejected(self):
        with self.assertRaises(InvalidInputError):
            SphericalSamples([[0.0, 1.0, 0.0]], lambda r, t, p: r)
        with self.assertRaises(InvalidInputError):
            SphericalSamples([[1.0, 0.0, 0.0]], lambda r, t, p: r)

    def test_falloff_fit_recovers_inverse_square(self):
        r = np.geomspace(0.5, 8.0, 9)
        exponent, amplitude = radial_falloff_fit(np.column_stack([r, 3.0 / r**2]))
        self.assertLess(abs(exponent + 2.0), 1e-12)
        assert_allclose(amplitude, 3.0, rtol=1e-12)

    def test_falloff_fit_needs_three_points(self):
        with self.assertRaises(InvalidInputError):
            radial_falloff_fit([[1.0, 1.0], [2.0, 0.25]])


class SnapshotTests(SimpleTestCase):
    def test_binary_snapshot_round_trip(self):
        spec = GridSpec(4, 0.5, c=2.0)
        field = random_smooth_vector(spec, np.random.default_rng(5), kmax=1)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "e.bin")
            write_snapshot(path, field)
            self.assertEqual(os.path.getsize(path), 40 + 8 * 3 * 64)
            loaded = read_snapshot(path)
        self.assertEqual(loaded.spec, spec)
        assert_array_equal(loaded.values, field.values)

    def test_foreign_file_is_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "junk.bin")
            with open(path, "wb") as handle:
                handle.write(b"NOTAGRID" + bytes(64))
            with self.assertRaises(InvalidInputError):
                read_snapshot(path)

    def test_table_columns(self):
        spec = GridSpec(4, 0.5)
        frame = snapshot_table(VectorFieldGrid.zeros(spec))
        self.assertEqual(list(frame.columns), ["x", "y", "z", "fx", "fy", "fz"])
        self.assertEqual(len(frame), 64)
        self.assertEqual(list(snapshot_table(ScalarFieldGrid.zeros(spec)).columns), ["x", "y", "z", "f"])
