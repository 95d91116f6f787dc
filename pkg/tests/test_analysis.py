"""
Tests for success probabilities, entanglement accounting and sweeps
"""
import os
import sys
import unittest

import numpy as np

# Add the src directory to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from core.analysis import (
    SweepRunner,
    entanglement_comparison,
    per_outcome_probability,
    repetitions,
    resource_budget,
    success_probability_exact,
    success_probability_qubit,
    sweep,
)
from core.bases import nme_basis
from core.protocol import outcome_distribution
from core.states import qubit_resource, random_unknown_state, resource_from_lambdas, uniform_resource
from utils.errors import RankDeficientError


class TestSuccessProbability(unittest.TestCase):
    """Test cases for closed-form success probabilities"""

    def test_known_values(self):
        """Test uniform spectra and the (1/2, 1/4, 1/4) qutrit pair"""
        for d in range(2, 7):
            with self.subTest(d=d):
                self.assertAlmostEqual(success_probability_exact(uniform_resource(d)), 1 / d, places=12)
        self.assertAlmostEqual(success_probability_exact(resource_from_lambdas([0.5, 0.25, 0.25])), 0.3, places=12)

    def test_qubit_formula(self):
        """Test 2|n|^2 / (1 + |n|^2)^2 against the general formula"""
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = complex(rng.uniform(0.05, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
            self.assertAlmostEqual(
                success_probability_qubit(n), success_probability_exact(qubit_resource(n)), places=12
            )
        self.assertAlmostEqual(success_probability_qubit(np.sqrt(0.5)), 4 / 9, places=12)
        self.assertAlmostEqual(success_probability_qubit(1.0), 0.5, places=12)

    def test_unentangled_pair(self):
        """Test that n = 0 and zero Schmidt coefficients raise RankDeficientError"""
        with self.assertRaises(RankDeficientError):
            success_probability_qubit(0)
        with self.assertRaises(RankDeficientError):
            success_probability_exact(resource_from_lambdas([0.5, 0.5, 0.0]))

    def test_bound_by_one_over_d(self):
        """Test P_succ <= 1/d over random spectra"""
        rng = np.random.default_rng(4)
        for d in range(2, 7):
            for _ in range(20):
                resource = resource_from_lambdas(rng.dirichlet(np.ones(d)))
                self.assertLessEqual(success_probability_exact(resource), 1 / d + 1e-12)

    def test_matches_enumeration(self):
        """Test that the designated outcome probabilities add up to P_succ"""
        rng = np.random.default_rng(6)
        for d in (2, 3, 4):
            with self.subTest(d=d):
                resource = resource_from_lambdas(rng.dirichlet(np.ones(d)))
                records = outcome_distribution(random_unknown_state(d, 1), resource, nme_basis(resource))
                designated = [r.probability for r in records if r.designated]
                self.assertAlmostEqual(sum(designated), success_probability_exact(resource), places=10)
                for probability in designated:
                    self.assertAlmostEqual(probability, per_outcome_probability(resource), places=10)

    def test_random_spectra_against_enumeration(self):
        """Test d / sum(1/lambda) against enumerated outcomes for 50 spectra per d = 2..6"""
        rng = np.random.default_rng(31)
        for d in range(2, 7):
            for k in range(50):
                with self.subTest(d=d, k=k):
                    lambdas = rng.dirichlet(np.ones(d))
                    resource = resource_from_lambdas(lambdas)
                    expected = d / float(np.sum(1.0 / lambdas))
                    records = outcome_distribution(random_unknown_state(d, k), resource, nme_basis(resource))
                    enumerated = sum(r.probability for r in records if r.designated)
                    self.assertAlmostEqual(success_probability_exact(resource), expected, places=10)
                    self.assertAlmostEqual(enumerated, expected, places=9)
                    self.assertLessEqual(expected, 1 / d + 1e-12)

    def test_per_outcome_probability(self):
        """Test that d designated outcomes share P_succ equally"""
        resource = resource_from_lambdas([0.5, 0.25, 0.25])
        self.assertAlmostEqual(per_outcome_probability(resource), 0.1, places=12)

    def test_monotone_in_n(self):
        """Test that P_succ grows strictly with |n| on (0, 1]"""
        grid = np.geomspace(0.05, 1.0, 50)
        values = [success_probability_exact(qubit_resource(float(n))) for n in grid]
        self.assertTrue(np.all(np.diff(values) > 0))


class TestRepetitionAccounting(unittest.TestCase):
    """Test cases for repetitions and resource budgets"""

    def test_repetitions_inverse(self):
        """Test R * P_succ = 1"""
        resource = resource_from_lambdas([0.6, 0.3, 0.1])
        self.assertAlmostEqual(repetitions(resource) * success_probability_exact(resource), 1.0, places=12)

    def test_budget_for_bell_pair(self):
        """Test the budget of a qubit Bell pair: 2 attempts, 2 ebits, 4 bits"""
        budget = resource_budget(uniform_resource(2))
        self.assertAlmostEqual(budget.repetitions, 2.0, places=12)
        self.assertAlmostEqual(budget.ebits, 2.0, places=12)
        self.assertAlmostEqual(budget.classical_bits, 4.0, places=12)

    def test_budget_for_qutrit_pair(self):
        """Test the budget of the (1/2, 1/4, 1/4) pair"""
        budget = resource_budget(resource_from_lambdas([0.5, 0.25, 0.25]))
        self.assertAlmostEqual(budget.repetitions, 10 / 3, places=12)
        self.assertAlmostEqual(budget.ebits, 10 / 3 * 1.5, places=12)
        self.assertAlmostEqual(budget.classical_bits, 2 * 10 / 3 * np.log2(3), places=12)


class TestEntanglementComparison(unittest.TestCase):
    """Test cases for resource versus measurement entanglement"""

    def test_qubits_match(self):
        """Test that qubit designated vectors match the resource entropy"""
        for n in (0.1, 0.5, 0.9 * np.exp(1j)):
            with self.subTest(n=n):
                self.assertTrue(entanglement_comparison(qubit_resource(n)).matches)

    def test_qutrits_differ(self):
        """Test that qutrit designated vectors do not match the resource entropy"""
        comparison = entanglement_comparison(resource_from_lambdas([0.5, 0.25, 0.25]))
        self.assertFalse(comparison.matches)
        self.assertAlmostEqual(comparison.resource_bits, 1.5, places=12)
        self.assertEqual(len(comparison.designated_bits), 3)
        for bits in comparison.designated_bits:
            self.assertGreater(abs(bits - 1.5), 1e-3)


class TestSweep(unittest.TestCase):
    """Test cases for resource-family sweeps"""

    def test_qubit_family(self):
        """Test 50 grid points ending at the Bell pair"""
        rows = sweep("qubit-n", 2, 50, trials=20, seed=3)
        self.assertEqual(len(rows), 50)
        self.assertAlmostEqual(rows[-1].p_succ_exact, 0.5, places=12)
        exact = [row.p_succ_exact for row in rows]
        self.assertTrue(np.all(np.diff(exact) > 0))
        for row in rows:
            self.assertAlmostEqual(row.repetitions_R * row.p_succ_exact, 1.0, places=12)
            self.assertAlmostEqual(row.basis_entropy_bits, row.entropy_bits, places=9)

    def test_single_point_qubit_sweep(self):
        """Test that a one-point qubit grid sits on the Bell pair"""
        rows = sweep("qubit-n", 2, 1, trials=20, seed=3)
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows[0].p_succ_exact, 0.5, places=12)

    def test_two_level_family_bound(self):
        """Test that every two-level qudit row respects P_succ <= 1/d"""
        rows = sweep("two-level-qudit", 5, 4, trials=20, seed=3)
        self.assertEqual(len(rows), 4)
        for row in rows:
            self.assertLessEqual(row.p_succ_exact, 0.2 + 1e-12)
        self.assertAlmostEqual(rows[-1].p_succ_exact, 0.2, places=12)

    def test_dirichlet_family_deterministic(self):
        """Test that a fixed seed reproduces every row"""
        first = sweep("dirichlet-random", 4, 3, trials=50, seed=11)
        second = sweep("dirichlet-random", 4, 3, trials=50, seed=11)
        self.assertEqual([row.model_dump() for row in first], [row.model_dump() for row in second])

    def test_invalid_requests(self):
        """Test unknown families, wrong dimensions and empty grids"""
        runner = SweepRunner()
        with self.assertRaises(ValueError):
            runner.sweep("qubit-n", 3, 5, trials=10, seed=0)
        with self.assertRaises(ValueError):
            runner.sweep("triangle", 2, 5, trials=10, seed=0)
        with self.assertRaises(ValueError):
            runner.sweep("qubit-n", 2, 0, trials=10, seed=0)


if __name__ == "__main__":
    unittest.main()
