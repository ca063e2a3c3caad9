import unittest

import numpy as np
from django.test import SimpleTestCase, override_settings

from fiducials.analytic import D3Params, D4Params, fiducial_d2, fiducial_d3, fiducial_d4
from fiducials.conf import sic_setting
from fiducials.exceptions import DomainError
from fiducials.frame import certify_design, certify_sic, matching_design_tol
from fiducials.search import (
    POLISH_GAP, STATUS_GRADIENT, STATUS_MAX_ITERATIONS, STATUS_OBJECTIVE, SearchConfig, _OverlapResiduals,
    global_minimum, gradient, map_in_order, minimize, multi_start, objective, restart_seeds,
)
from fiducials.wh_group import Fiducial, build_wh_basis, haar_random_fiducial, orbit


def _square(x):
    return x * x


class ObjectiveTests(SimpleTestCase):
    def test_global_minimum(self):
        self.assertAlmostEqual(global_minimum(2), 4 / 3, places=15)
        self.assertAlmostEqual(global_minimum(3), 1.5, places=15)

    def test_known_values(self):
        basis = build_wh_basis(2)
        self.assertAlmostEqual(objective(fiducial_d2(0), basis), 4 / 3, places=12)
        self.assertAlmostEqual(objective(Fiducial.from_vector([1, 0]), basis), 2.0, places=15)

    def test_analytic_fiducials_attain_the_minimum(self):
        for fiducial in (fiducial_d2(1), fiducial_d3(D3Params(r0=0.72)), fiducial_d4(D4Params(swap=True))):
            target = global_minimum(fiducial.d)
            value = objective(fiducial, build_wh_basis(fiducial.d))
            self.assertLessEqual(abs(value - target) / target, 1e-10)

    def test_random_points_respect_the_bound(self):
        rng = np.random.default_rng(8)
        for d in range(2, 9):
            basis = build_wh_basis(d)
            for _ in range(20):
                value = objective(haar_random_fiducial(d, rng), basis)
                self.assertGreaterEqual(value, global_minimum(d) - 1e-9)

    def test_phase_invariance(self):
        rng = np.random.default_rng(9)
        for d in (2, 5, 7):
            basis = build_wh_basis(d)
            fiducial = haar_random_fiducial(d, rng)
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            rotated = Fiducial(d=d, amplitudes=phase * fiducial.amplitudes)
            self.assertAlmostEqual(objective(rotated, basis), objective(fiducial, basis), places=13)
            np.testing.assert_allclose(gradient(rotated, basis), phase * gradient(fiducial, basis), atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(10)
        step = 1e-5

        def on_sphere(vector, basis):
            return objective(Fiducial.from_vector(vector), basis)

        for _ in range(100):
            d = int(rng.integers(2, 9))
            basis = build_wh_basis(d)
            point = haar_random_fiducial(d, rng).amplitudes
            numeric = np.zeros(d, dtype=complex)
            for i in range(d):
                for unit in (1.0, 1j):
                    offset = np.zeros(d, dtype=complex)
                    offset[i] = step * unit
                    difference = (on_sphere(point + offset, basis) - on_sphere(point - offset, basis)) / (2 * step)
                    numeric[i] += difference * unit
            analytic = gradient(Fiducial(d=d, amplitudes=point), basis)
            error = np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)
            self.assertLessEqual(error, 1e-5, f"d={d}")

    def test_gradient_vanishes_at_a_sic(self):
        basis = build_wh_basis(4)
        self.assertLess(np.linalg.norm(gradient(fiducial_d4(D4Params()), basis)), 1e-10)

    def test_dimension_mismatch(self):
        with self.assertRaises(DomainError):
            objective(fiducial_d2(0), build_wh_basis(3))


class ConfigTests(SimpleTestCase):
    def test_rejects_invalid_values(self):
        for overrides in ({'d': 1}, {'restarts': 0}, {'sic_tol': 0.0}, {'gradient_tol': -1.0},
                          {'max_iterations': -1}, {'rng_seed': -3}):
            values = {'d': 3, **overrides}
            with self.assertRaises(DomainError, msg=str(overrides)):
                SearchConfig(**values)

    def test_basis_must_fit(self):
        with self.assertRaises(DomainError):
            SearchConfig(d=3, basis=build_wh_basis(2))

    def test_defaults_to_the_wh_basis(self):
        config = SearchConfig(d=3)
        self.assertEqual(config.basis.n, 9)

    def test_restarts_default_to_thirty_two_per_dimension(self):
        self.assertEqual(SearchConfig(d=7).restarts, 224)
        self.assertEqual(SearchConfig(d=2, restarts=5).restarts, 5)

    @override_settings(SIC_POVM={'SEARCH_RESTARTS_PER_DIMENSION': 4, 'SEARCH_MAX_ITERATIONS': 300})
    def test_for_dimension_reads_settings(self):
        config = SearchConfig.for_dimension(5, sic_tol=None, rng_seed=7)
        self.assertEqual(config.restarts, 20)
        self.assertEqual(config.max_iterations, 300)
        self.assertEqual(config.sic_tol, 1e-8)
        self.assertEqual(config.rng_seed, 7)


class MinimizeTests(SimpleTestCase):
    def test_starting_at_a_sic_stops_immediately(self):
        config = SearchConfig(d=2)
        result = minimize(config, start=fiducial_d2(1))
        self.assertTrue(result.converged)
        self.assertLessEqual(result.iterations, 3)
        self.assertEqual(result.status, STATUS_GRADIENT)

    def test_descent_and_gauge(self):
        result = minimize(SearchConfig(d=4, rng_seed=21))
        self.assertEqual(result.fiducial.amplitudes.shape, (4,))
        self.assertTrue(result.fiducial.is_canonical)
        steps = np.diff(result.trace)
        self.assertTrue(np.all(steps <= 0), steps[steps > 0])
        self.assertEqual(len(result.trace), result.iterations + 1)
        self.assertGreaterEqual(result.objective, result.global_min - 1e-9)

    def test_same_seed_same_result(self):
        config = SearchConfig(d=3, rng_seed=5)
        first = minimize(config)
        second = minimize(config)
        np.testing.assert_array_equal(first.fiducial.amplitudes, second.fiducial.amplitudes)
        self.assertEqual(first.iterations, second.iterations)
        self.assertEqual(first.objective, second.objective)

    def test_iteration_budget_is_reported_not_raised(self):
        result = minimize(SearchConfig(d=5, max_iterations=1, rng_seed=3))
        self.assertEqual(result.status, STATUS_MAX_ITERATIONS)
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 1)

    def test_start_must_match_dimension(self):
        with self.assertRaises(DomainError):
            minimize(SearchConfig(d=3), start=fiducial_d2(0))

    def test_residual_jacobian_matches_finite_differences(self):
        rng = np.random.default_rng(14)
        step = 1e-6
        for d in (2, 3, 5):
            residuals = _OverlapResiduals(build_wh_basis(d))
            x = rng.standard_normal(2 * d)
            numeric = np.empty((d * d, 2 * d))
            for i in range(2 * d):
                offset = np.zeros(2 * d)
                offset[i] = step
                numeric[:, i] = (residuals(x + offset) - residuals(x - offset)) / (2 * step)
            np.testing.assert_allclose(residuals.jacobian(x), numeric, atol=1e-6)

    def test_near_solution_goes_straight_to_the_polish(self):
        rng = np.random.default_rng(15)
        basis = build_wh_basis(3)
        exact = fiducial_d3(D3Params(r0=0.75))
        start = Fiducial.from_vector(exact.amplitudes + 1e-6 * rng.standard_normal(3))
        result = minimize(SearchConfig(d=3), start=start)
        self.assertIn(result.status, (STATUS_GRADIENT, STATUS_OBJECTIVE))
        self.assertEqual(result.iterations, 0)
        self.assertGreater(result.polish_evaluations, 0)
        self.assertTrue(result.converged, str(result))
        self.assertTrue(certify_sic(orbit(result.fiducial, basis), tol=1e-10).passed)

    def test_qutrit_descent_hands_over_to_the_polish(self):
        results = [minimize(SearchConfig(d=3, rng_seed=seed)) for seed in (3, 8, 21, 34)]
        handed_over = [result for result in results if result.status == STATUS_OBJECTIVE]
        self.assertTrue(handed_over, [result.status for result in results])
        for result in handed_over:
            self.assertLessEqual(result.trace[-1], POLISH_GAP)
            self.assertGreater(result.polish_evaluations, 0)
            self.assertTrue(result.converged, str(result))
            self.assertLessEqual(result.sic_deviation, 1e-8)


class MultiStartTests(SimpleTestCase):
    def test_restart_seeds(self):
        seeds = restart_seeds(42, 10)
        self.assertEqual(seeds, restart_seeds(42, 10))
        self.assertEqual(len(set(seeds)), 10)
        self.assertTrue(all(0 <= seed < 2 ** 63 for seed in seeds))
        self.assertEqual(restart_seeds(42, 12)[:10], seeds)
        self.assertNotEqual(restart_seeds(43, 10), seeds)

    def test_map_in_order(self):
        jobs = list(range(7))
        self.assertEqual(list(map_in_order(_square, jobs)), [x * x for x in jobs])
        self.assertEqual(list(map_in_order(_square, jobs, workers=3)), [x * x for x in jobs])

    def test_small_dimensions_converge(self):
        for d in (2, 3, 4):
            seen = []
            outcome = multi_start(SearchConfig(d=d, restarts=8, rng_seed=d), callback=seen.append)
            self.assertEqual(len(outcome.results), 8)
            self.assertEqual(seen, outcome.results)
            self.assertTrue(outcome.best.converged, f"d={d}: {outcome.best}")
            self.assertGreater(outcome.success_fraction, 0)
            self.assertEqual([r.restart_index for r in outcome.results], list(range(8)))

    def test_converged_results_are_two_designs(self):
        outcome = multi_start(SearchConfig(d=4, restarts=6, rng_seed=1))
        basis = build_wh_basis(4)
        for result in outcome.results:
            self.assertGreaterEqual(result.objective, global_minimum(4) - 1e-9)
            if result.converged:
                vectors = orbit(result.fiducial, basis)
                certificate = certify_design(vectors, t=2, tol=matching_design_tol(1e-8, 16, 4))
                self.assertTrue(certificate.passed, str(certificate))

    def test_qutrit_runs_land_on_differing_sics(self):
        outcome = multi_start(SearchConfig(d=3, restarts=12, rng_seed=3))
        converged = [result for result in outcome.results if result.converged]
        self.assertTrue(outcome.best.converged, str(outcome.best))
        self.assertGreaterEqual(len(converged), 2)
        basis = build_wh_basis(3)
        for result in converged:
            self.assertTrue(certify_sic(orbit(result.fiducial, basis)).passed)
        distinct = {tuple(np.round(result.fiducial.amplitudes, 6)) for result in converged}
        self.assertGreater(len(distinct), 1)

    def test_quiet_keeps_the_summary_out_of_info_logs(self):
        config = SearchConfig(d=5, restarts=1, max_iterations=1)
        with self.assertNoLogs('fiducials.search', 'INFO'):
            multi_start(config, quiet=True)
        with self.assertLogs('fiducials.search', 'WARNING'):
            multi_start(config)

    def test_stop_on_success(self):
        outcome = multi_start(SearchConfig(d=2, restarts=10, rng_seed=0, stop_on_success=True))
        self.assertTrue(outcome.results[-1].converged)
        self.assertEqual(sum(r.converged for r in outcome.results), 1)

    def test_parallel_matches_serial(self):
        config = SearchConfig(d=3, restarts=4, rng_seed=11)
        serial = multi_start(config, workers=1)
        parallel = multi_start(config, workers=2)
        for a, b in zip(serial.results, parallel.results):
            np.testing.assert_array_equal(a.fiducial.amplitudes, b.fiducial.amplitudes)
            self.assertEqual(a.iterations, b.iterations)
        self.assertEqual(serial.best.restart_index, parallel.best.restart_index)

    def test_finds_a_sic_in_dimension_five(self):
        outcome = multi_start(SearchConfig(d=5, restarts=64, rng_seed=0, stop_on_success=True))
        self.assertTrue(outcome.best.converged, str(outcome.best))
        self.assertLessEqual(outcome.best.sic_deviation, 1e-8)


@unittest.skipUnless(sic_setting('RUN_SLOW_TESTS'), "set SIC_SLOW_TESTS=1 to run")
class DiscoveryTests(SimpleTestCase):
    def test_every_dimension_up_to_twelve(self):
        for d in range(2, 13):
            basis = build_wh_basis(d)
            outcome = multi_start(SearchConfig(d=d, restarts=32 * d, rng_seed=0, stop_on_success=True),
                                  workers=4)
            best = outcome.best
            self.assertTrue(best.converged, f"d={d}: {best}")
            self.assertLessEqual(best.sic_deviation, 1e-8)

            target = global_minimum(d)
            self.assertLessEqual(abs(best.objective - target) / target, 1e-10, f"d={d}")
            certificate = certify_sic(orbit(best.fiducial, basis))
            potential = 2 * d ** 3 / (d + 1)
            self.assertLessEqual(abs(certificate.potential - potential) / potential, 1e-10, f"d={d}")
