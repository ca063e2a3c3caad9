import numpy as np
from django.test import SimpleTestCase

from fiducials.analytic import fiducial_d2, fiducial_d3, fiducial_d4, D3Params, D4Params
from fiducials.exceptions import DomainError, StructuralError
from fiducials.frame import (
    INSUFFICIENT_SUPPORT, NOT_D_SQUARED, VectorSet, bf_lower_bound, certify_design, certify_sic,
    circulant_gram_spectrum, design_average_error, frame_bounds, frame_potential,
    informational_completeness, is_tight_frame, matching_design_tol, measurement_probabilities,
    reconstruct_state, simplex_embedding, symmetric_subspace_dim, t_design_threshold,
)
from fiducials.wh_group import Fiducial, build_wh_basis, haar_random_fiducial, orbit


def analytic_orbits():
    """SIC orbits for d = 2, 3, 4 from the closed forms"""
    fiducials = [
        fiducial_d2(0),
        fiducial_d3(D3Params(r0=0.75, theta1=np.pi, theta2=np.pi / 3)),
        fiducial_d4(D4Params()),
    ]
    return [orbit(f, build_wh_basis(f.d)) for f in fiducials]


def random_vector_set(rng, n, d):
    vectors = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return VectorSet.from_vectors(vectors, normalize=True)


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return a + a.conj().T


def random_density_matrix(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class VectorSetTests(SimpleTestCase):
    def test_requires_unit_vectors(self):
        with self.assertRaises(DomainError):
            VectorSet(d=2, vectors=[[1.0, 1.0]])
        with self.assertRaises(StructuralError):
            VectorSet(d=3, vectors=[[1.0, 0.0]])

    def test_overlaps_are_hermitian_with_unit_diagonal(self):
        vector_set = random_vector_set(np.random.default_rng(0), 7, 3)
        overlaps = vector_set.overlaps()
        np.testing.assert_allclose(overlaps, overlaps.conj().T, atol=1e-15)
        np.testing.assert_allclose(np.diag(overlaps), 1, atol=1e-14)


class FramePotentialTests(SimpleTestCase):
    def test_orthonormal_basis_meets_the_bound(self):
        for d in range(2, 6):
            vector_set = VectorSet.from_vectors(np.eye(d))
            self.assertEqual(frame_potential(vector_set), d)
            self.assertEqual(bf_lower_bound(d, d), d)
            self.assertTrue(is_tight_frame(vector_set))

    def test_random_sets_respect_the_lower_bounds(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            d = int(rng.integers(2, 6))
            n = int(rng.integers(1, 13))
            vector_set = random_vector_set(rng, n, d)
            self.assertGreaterEqual(frame_potential(vector_set, 1), bf_lower_bound(n, d) - 1e-9)
            self.assertGreaterEqual(frame_potential(vector_set, 2), t_design_threshold(n, d, 2) - 1e-9)

    def test_any_wh_orbit_is_a_tight_frame(self):
        rng = np.random.default_rng(5)
        for d in range(2, 7):
            vector_set = orbit(haar_random_fiducial(d, rng), build_wh_basis(d))
            self.assertTrue(is_tight_frame(vector_set))
            lower, upper = frame_bounds(vector_set)
            self.assertAlmostEqual(lower, d, places=10)
            self.assertAlmostEqual(upper, d, places=10)
            self.assertTrue(certify_design(vector_set, t=1).passed)

    def test_threshold_and_symmetric_dimension(self):
        self.assertAlmostEqual(t_design_threshold(4, 2, 2), 16 / 3, places=14)
        self.assertEqual(symmetric_subspace_dim(2, 2), 3)
        self.assertEqual(symmetric_subspace_dim(3, 3), 10)

    def test_rejects_bad_design_order(self):
        vector_set = VectorSet.from_vectors(np.eye(2))
        with self.assertRaises(DomainError):
            frame_potential(vector_set, 0)
        with self.assertRaises(DomainError):
            t_design_threshold(4, 2, 0)


class CertificateTests(SimpleTestCase):
    def test_analytic_sics_pass_both_certificates(self):
        for vector_set in analytic_orbits():
            d = vector_set.d
            sic = certify_sic(vector_set, tol=1e-12)
            self.assertTrue(sic.passed, f"d={d}: {sic}")
            self.assertAlmostEqual(sic.potential, 2 * d ** 3 / (d + 1), places=9)
            design = certify_design(vector_set, t=2, tol=matching_design_tol(1e-8, d * d, d))
            self.assertTrue(design.passed, f"d={d}: {design}")

    def test_qubit_sic_potential(self):
        certificate = certify_sic(analytic_orbits()[0])
        self.assertAlmostEqual(certificate.potential, 16 / 3, places=12)
        self.assertLess(certificate.max_overlap_error, 1e-14)

    def test_wrong_count_is_flagged(self):
        vectors = analytic_orbits()[0].vectors[:3]
        certificate = certify_sic(VectorSet(d=2, vectors=vectors))
        self.assertFalse(certificate.passed)
        self.assertIn(NOT_D_SQUARED, certificate.flags)

    def test_too_few_vectors_lack_support(self):
        certificate = certify_design(VectorSet.from_vectors(np.eye(3)), t=2, tol=10.0)
        self.assertFalse(certificate.passed)
        self.assertIn(INSUFFICIENT_SUPPORT, certificate.flags)

    def test_two_design_and_sic_certificates_agree(self):
        rng = np.random.default_rng(99)
        sic_tol = 1e-8
        for vector_set in analytic_orbits():
            d = vector_set.d
            basis = build_wh_basis(d)
            fiducial = vector_set.vectors[0]
            design_tol = matching_design_tol(sic_tol, d * d, d)
            # magnitudes between 1e-11 and 1e-4 straddle the tolerance gap between the two tests
            magnitudes = [10.0 ** e for e in (-13, -12, -11, -4, -3, -2, -1)]
            for magnitude in magnitudes:
                for _ in range(24):
                    noise = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                    perturbed = fiducial + magnitude * noise / np.linalg.norm(noise)
                    vectors = orbit(Fiducial.from_vector(perturbed), basis)
                    sic = certify_sic(vectors, tol=sic_tol)
                    design = certify_design(vectors, t=2, tol=design_tol)
                    self.assertEqual(sic.passed, design.passed,
                                     f"d={d} magnitude={magnitude:.0e}: {sic} / {design}")


class CompletenessTests(SimpleTestCase):
    def test_sic_orbits_are_informationally_complete(self):
        for vector_set in analytic_orbits():
            report = informational_completeness(vector_set)
            self.assertEqual(report.rank, vector_set.d ** 2)
            self.assertTrue(report.informationally_complete)

    def test_orthonormal_basis_is_not(self):
        report = informational_completeness(VectorSet.from_vectors(np.eye(3)))
        self.assertEqual(report.rank, 3)
        self.assertFalse(report.informationally_complete)

    def test_gram_spectrum_is_the_dft_of_a_row(self):
        for vector_set in analytic_orbits():
            d = vector_set.d
            spectrum = circulant_gram_spectrum(vector_set)
            expected = np.array([d] + [d / (d + 1)] * (d * d - 1))
            np.testing.assert_allclose(spectrum, expected, atol=1e-10)
            eigenvalues = np.sort(np.linalg.eigvalsh(vector_set.overlap_squares()))[::-1]
            np.testing.assert_allclose(spectrum, eigenvalues, atol=1e-10)

    def test_gram_row_values_are_not_its_spectrum(self):
        vector_set = analytic_orbits()[1]
        d = vector_set.d
        row_values = np.sort(vector_set.overlap_squares()[0])[::-1]
        self.assertFalse(np.allclose(row_values, circulant_gram_spectrum(vector_set)))
        self.assertAlmostEqual(row_values[0], 1.0, places=12)
        np.testing.assert_allclose(row_values[1:], 1 / (d + 1), atol=1e-12)


class SimplexTests(SimpleTestCase):
    def test_embedding_is_a_regular_simplex(self):
        for vector_set in analytic_orbits():
            d = vector_set.d
            n = d * d
            embedding = simplex_embedding(vector_set)
            expected = np.full((n, n), -1 / (n - 1))
            np.fill_diagonal(expected, 1.0)
            np.testing.assert_allclose(embedding.gram, expected, atol=1e-12)
            traces = np.einsum('kii->k', embedding.sigmas)
            np.testing.assert_allclose(traces, 0, atol=1e-12)
            products = np.einsum('aij,bji->ab', embedding.sigmas, embedding.sigmas)
            np.testing.assert_allclose(products, expected, atol=1e-12)


class DesignAverageTests(SimpleTestCase):
    def test_sic_reproduces_the_haar_average(self):
        rng = np.random.default_rng(17)
        for vector_set in analytic_orbits():
            for _ in range(50):
                A = random_hermitian(rng, vector_set.d)
                self.assertLessEqual(design_average_error(vector_set, A), 1e-9)

    def test_random_set_does_not(self):
        rng = np.random.default_rng(18)
        vector_set = random_vector_set(rng, 9, 3)
        A = random_hermitian(rng, 3)
        self.assertGreater(design_average_error(vector_set, A), 1e-6)

    def test_operator_shape_must_match(self):
        with self.assertRaises(DomainError):
            design_average_error(analytic_orbits()[0], np.eye(3))

    def test_state_reconstruction(self):
        rng = np.random.default_rng(23)
        for vector_set in analytic_orbits():
            for _ in range(10):
                rho = random_density_matrix(rng, vector_set.d)
                probabilities = measurement_probabilities(vector_set, rho)
                self.assertAlmostEqual(probabilities.sum(), 1.0, places=12)
                self.assertTrue(np.all(probabilities >= -1e-15))
                np.testing.assert_allclose(reconstruct_state(vector_set, probabilities), rho, atol=1e-10)

    def test_reconstruction_needs_one_probability_per_vector(self):
        with self.assertRaises(StructuralError):
            reconstruct_state(analytic_orbits()[0], [0.5, 0.5])
