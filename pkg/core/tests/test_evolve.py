# core/tests/test_evolve.py
import tempfile
from pathlib import Path

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.evolve import (
    ModeProblem,
    coefficient_jump,
    evolve,
    gaussian_pulse,
    lambda_sweep,
    load_solution,
    multiplier_balance,
    reduce_1p1,
    save_solution,
    self_convergence,
    transport_integrate,
    transport_ode_check,
)
from core.exceptions import KdsError
from core.fd import fitted_order
from core.geometry import make_params
from core.models import NORM_COLUMNS
from core.multipliers import energy_multiplier, morawetz_multiplier, rp_multiplier
from core.teukolsky import grw_residual


class ModeProblemTest(SimpleTestCase):
    """
    Discretization of one mode evolution
    """

    def setUp(self):
        self.params = make_params(1.0, 0.0, 1e-2)

    def test_rotation_is_refused(self):
        with self.assertRaises(KdsError) as ctx:
            ModeProblem(make_params(1.0, 0.05, 1e-3))
        self.assertEqual(ctx.exception.code, 'support')

    def test_resolution_limits(self):
        for kwargs in ({'n_r': 5}, {'cfl': 0.8}, {'cfl': 0.0}):
            with self.assertRaises(KdsError) as ctx:
                ModeProblem(self.params, **kwargs)
            self.assertEqual(ctx.exception.code, 'resolution', kwargs)

    def test_time_step_above_the_cfl_bound(self):
        problem = ModeProblem(self.params, n_r=41, dt=10.0)
        with self.assertRaises(KdsError) as ctx:
            problem.step
        self.assertEqual(ctx.exception.code, 'resolution')

    def test_unknown_radial_variable(self):
        with self.assertRaises(KdsError) as ctx:
            ModeProblem(self.params, radial_variable='tortoise')
        self.assertEqual(ctx.exception.code, 'config')

    def test_domain_ends_beyond_both_horizons(self):
        problem = ModeProblem(self.params, n_r=41)
        self.assertLess(problem.r[0], self.params.r_event)
        self.assertGreater(problem.r[-1], self.params.r_cosmo)
        self.assertFalse(problem.sommerfeld)
        self.assertTrue(ModeProblem(make_params(1.0, 0.0, 0.0), n_r=41).sommerfeld)

    def test_characteristics_leave_the_domain(self):
        """Both boundaries are spacelike: every characteristic exits there"""
        problem = ModeProblem(self.params, n_r=41)
        speeds = problem.table['speeds']
        self.assertTrue(np.all(speeds[0] < 0.0))
        self.assertTrue(np.all(speeds[-1] > 0.0))

    def test_effective_potential(self):
        r = np.array([3.0, 6.0])
        table = reduce_1p1(self.params, 6.0, r)
        np.testing.assert_allclose(table['V_eff'], 6.0 / r ** 2 + table['V'])

    def test_coefficients_are_smooth_across_the_transition(self):
        """Node-to-node jumps of g^{τr} through the r₀ band shrink with the spacing"""
        params = make_params(1.0, 0.0, 1e-3)
        lo, hi = params.r0 - 2.0 * params.M, params.r0 + 2.0 * params.M
        coarse = coefficient_jump(params, 6.0, np.linspace(lo, hi, 201))
        fine = coefficient_jump(params, 6.0, np.linspace(lo, hi, 401))
        self.assertGreater(coarse, 0.0)
        self.assertLess(fine, 0.6 * coarse)

    def test_gaussian_pulse(self):
        problem = ModeProblem(self.params, n_r=201, radial_variable='r')
        u, Pi = gaussian_pulse(problem, center=6.0, width=0.5, amplitude=2.0)
        self.assertAlmostEqual(float(np.max(u)), 2.0, delta=0.02)
        self.assertAlmostEqual(float(problem.r[np.argmax(u)]), 6.0, delta=problem.dy)
        self.assertFalse(Pi.any())

    def test_refined_grid_nests(self):
        problem = ModeProblem(self.params, n_r=41)
        fine = problem.refined(1)
        self.assertEqual(fine.n_r, 81)
        np.testing.assert_allclose(fine.r[::2], problem.r)


class EvolutionTest(SimpleTestCase):
    """
    Method-of-lines runs on a Schwarzschild–de Sitter background
    """

    def setUp(self):
        self.problem = ModeProblem(make_params(1.0, 0.0, 1e-2), n_r=201, tau_max=2.0,
                                   report_every=20, dissipation=0.0)

    def test_zero_data_stays_zero(self):
        zero = np.zeros_like(self.problem.r)
        record = evolve(self.problem, zero, zero, tau_max=5.0 * self.problem.step)
        for norms in record.norms:
            self.assertEqual(max(abs(value) for value in norms.row()[1:]), 0.0)

    def test_killing_energy_balance(self):
        """E_T(τ) − E_T(0) + F_in − F_out stays at discretization level"""
        record = evolve(self.problem, *gaussian_pulse(self.problem, center=6.0))
        self.assertGreater(record.balance[0]['E_T'], 0.0)
        self.assertLess(abs(record.balance[-1]['residual']) / record.balance[0]['E_T'], 1e-2)
        self.assertAlmostEqual(float(record.tau[-1]), 2.0, places=10)
        self.assertEqual(len(record.norms), len(record.tau))

    def test_cumulative_columns_grow(self):
        record = evolve(self.problem, *gaussian_pulse(self.problem, center=6.0))
        mor = [norms.Mor for norms in record.norms]
        self.assertEqual(mor, sorted(mor))
        self.assertGreater(mor[-1], 0.0)

    def test_solution_round_trip(self):
        record = evolve(self.problem, *gaussian_pulse(self.problem, center=6.0))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'solution.npz'
            save_solution(record, path)
            solution = load_solution(path)
        np.testing.assert_array_equal(solution['psi'], record.psi)
        self.assertEqual(solution['Lambda'], 1e-2)
        self.assertEqual(solution['norms'].shape, (len(record.norms), len(NORM_COLUMNS)))

    @pytest.mark.slow
    def test_self_convergence(self):
        """log₂ of successive final-slice differences over three nested grids"""
        problem = ModeProblem(make_params(1.0, 0.0, 1e-2), n_r=101, tau_max=1.0, dissipation=0.0)
        self.assertGreaterEqual(self_convergence(problem), 3.5)

    @pytest.mark.slow
    def test_evolved_pulse_solves_the_grw_equation(self):
        problem = ModeProblem(make_params(1.0, 0.0, 1e-3), n_r=201, tau_max=4.0)
        record = evolve(problem, *gaussian_pulse(problem, center=6.0))
        residual = grw_residual(record.as_solution())
        self.assertGreater(residual, 0.0)
        self.assertLess(residual, 1e-2)


class TransportTest(SimpleTestCase):
    """
    Integration of ∇₃Φ₁ = Φ₂ along the ingoing null direction
    """

    def setUp(self):
        self.problem = ModeProblem(make_params(1.0, 0.0, 1e-2), n_r=81, tau_max=1.0, dissipation=0.0)
        zero = np.zeros_like(self.problem.r)
        self.record = evolve(self.problem, zero, zero)

    def test_zero_source_and_data(self):
        result = transport_integrate(self.record, self.problem)
        self.assertEqual(result['constant'], 0.0)
        self.assertFalse(result['phi1'].any())

    def test_courant_bound(self):
        with self.assertRaises(KdsError) as ctx:
            transport_integrate(self.record, self.problem, dt=100.0)
        self.assertEqual(ctx.exception.code, 'cfl-transport')

    def test_unknown_source(self):
        with self.assertRaises(KdsError) as ctx:
            transport_integrate(self.record, self.problem, source='bogus')
        self.assertEqual(ctx.exception.code, 'support')

    @pytest.mark.slow
    def test_ode_agrees_with_quadrature(self):
        """Φ(r_end)/Φ(r_start) from quad and from a Radau solve"""
        result = transport_ode_check(make_params(1.0, 0.0, 1e-3))
        self.assertLess(result['difference'], 1e-8)


class LambdaSweepTest(SimpleTestCase):

    @pytest.mark.slow
    def test_sweep_rows(self):
        result = lambda_sweep([1e-2, 0.0], p=1.0, problem_kwargs={'n_r': 121, 'tau_max': 2.0})
        self.assertEqual([row[0] for row in result['rows']], [0.0, 1e-2])
        self.assertEqual(result['rows'][0][6], 0.0)
        self.assertGreaterEqual(result['ratio'], 1.0)
        self.assertEqual(len(result['columns']), len(result['rows'][0]))


class MultiplierBalanceTest(SimpleTestCase):
    """
    Refinement order of the stationary multiplier balances on a pulse
    """

    @pytest.mark.slow
    def test_balance_converges_for_each_triple(self):
        coarse = ModeProblem(make_params(1.0, 0.0, 1e-3), n_r=101, tau_max=40.0)
        triples = (
            energy_multiplier(coarse.params),
            morawetz_multiplier(coarse.params),
            rp_multiplier(coarse.params, 1.0),
        )
        steps, residuals = [], {triple.name: [] for triple in triples}
        for level in range(3):
            problem = coarse.refined(level)
            record = evolve(problem, *gaussian_pulse(problem, center=6.0))
            steps.append(problem.dy)
            for triple in triples:
                residuals[triple.name].append(multiplier_balance(record, triple, problem)['residual'])
        for name, values in residuals.items():
            self.assertGreaterEqual(fitted_order(steps, values), 1.9, name)
