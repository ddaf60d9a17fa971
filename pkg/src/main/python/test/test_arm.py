# SPDX-License-Identifier: GPL-2.0-or-later
import unittest

import numpy as np

from mdp.arm import ArmSpec, ThresholdPolicy, arm_transition, arm_stage_cost, stationary_exact, \
    stationary_closed_form, average_cost, activation_frequency, beta, threshold_chain


def linear_arm(cap, rho=1.0, tau=0.0):
    return ArmSpec(tuple(range(1, cap + 1)), tau, rho)


class TestArm(unittest.TestCase):

    def test_transition(self):
        self.assertEqual(arm_transition(3, 1, 1, 10), 1)
        self.assertEqual(arm_transition(10, 1, 0, 10), 10)
        self.assertEqual(arm_transition(4, 0, 0, 10), 5)
        self.assertEqual(arm_transition(4, 0, 1, 10), 5)
        with self.assertRaises(ValueError):
            arm_transition(0, 0, 0, 10)
        with self.assertRaises(ValueError):
            arm_transition(11, 1, 1, 10)

    def test_stage_cost(self):
        spec = ArmSpec((1, 5, 5), 10, 0.5)
        self.assertEqual(arm_stage_cost(spec, 2, 1, 0), 15)
        self.assertEqual(arm_stage_cost(spec, 2, 0, 7), 5)
        self.assertEqual(arm_stage_cost(spec, 1, 1, -4), 7)

    def test_spec_validation(self):
        with self.assertRaises(ValueError):
            ArmSpec((1, 3, 2), 0, 0.5)
        with self.assertRaises(ValueError):
            ArmSpec((1, 2), 0, 0.0)
        with self.assertRaises(ValueError):
            ArmSpec((1, 2), 0, 1.2)
        with self.assertRaises(ValueError):
            ArmSpec((1,), 0, 0.5)
        with self.assertRaises(ValueError):
            ArmSpec((1, 2), -1, 0.5)
        # flat stretches are fine
        ArmSpec((2, 2, 2), 0, 1.0)

    def test_threshold_policy(self):
        self.assertEqual(list(ThresholdPolicy(3, 4).actions()), [0, 0, 1, 1])
        self.assertEqual(list(ThresholdPolicy(5, 4).actions()), [0, 0, 0, 0])
        with self.assertRaises(ValueError):
            ThresholdPolicy(0, 4)
        with self.assertRaises(ValueError):
            ThresholdPolicy(6, 4)

    def test_stationary_exact(self):
        self.assertTrue(np.allclose(stationary_exact(1, 0.5, 3).probs, [0.5, 0.25, 0.25], atol=1e-12))
        self.assertTrue(np.allclose(stationary_exact(1, 1.0, 6).probs, [1, 0, 0, 0, 0, 0], atol=1e-12))
        self.assertTrue(np.array_equal(stationary_exact(6, 0.3, 5).probs, [0, 0, 0, 0, 1]))

    def test_balance_residual(self):
        for theta in range(1, 7):
            matrix = threshold_chain(theta, 0.35, 6)
            probs = stationary_exact(theta, 0.35, 6).probs
            self.assertLess(np.max(np.abs(probs @ matrix - probs)), 1e-12)

    def test_closed_form(self):
        self.assertEqual(beta(1, 0.5), 0.5)
        self.assertTrue(np.allclose(stationary_closed_form(1, 0.5, 3).probs, [0.5, 0.25, 0.25], atol=1e-12))
        self.assertTrue(np.allclose(stationary_closed_form(2, 1.0, 5).probs, [0.5, 0.5, 0, 0, 0], atol=1e-12))
        with self.assertRaises(ValueError):
            stationary_closed_form(4, 0.5, 3)

    def test_printed_tail_does_not_normalize(self):
        # an exponent of S-theta-1 on the capped age leaves the hand case at 1.25
        b = beta(1, 0.5)
        tail = (1 - 0.5) ** (3 - 1 - 1) / 0.5 * b
        self.assertAlmostEqual(b + 0.5 * b + tail, 1.25)

    def test_closed_form_matches_exact(self):
        for cap in range(2, 13):
            for rho in np.linspace(0.1, 1.0, 10):
                for theta in range(1, cap + 1):
                    exact = stationary_exact(theta, rho, cap).probs
                    closed = stationary_closed_form(theta, rho, cap).probs
                    self.assertLess(np.max(np.abs(exact - closed)), 1e-10, (theta, rho, cap))

    def test_average_cost(self):
        split = average_cost(linear_arm(5), 2, 0)
        self.assertAlmostEqual(split.holding, 1.5)
        self.assertAlmostEqual(split.activation, 0.5)
        self.assertAlmostEqual(split.total, 1.5)

        split = average_cost(linear_arm(5), 1, 3)
        self.assertAlmostEqual(split.holding, 1)
        self.assertAlmostEqual(split.activation, 1)
        self.assertAlmostEqual(split.total, 4)

        split = average_cost(linear_arm(5), 6, 3)
        self.assertAlmostEqual(split.holding, 5)
        self.assertEqual(split.activation, 0)

    def test_activation_frequency(self):
        for rho in (0.2, 0.5, 0.8, 1.0):
            spec = ArmSpec(tuple(range(8)), 0, rho)
            values = [average_cost(spec, theta).activation for theta in range(1, 10)]
            for theta, value in enumerate(values, start=1):
                self.assertAlmostEqual(value, activation_frequency(theta, rho, 8), places=12)
            self.assertTrue(all(b < a for a, b in zip(values, values[1:])), rho)

    def test_linear_in_lambda(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            spec = ArmSpec(tuple(np.sort(rng.uniform(0, 20, 6))), rng.uniform(0, 20), rng.uniform(0.1, 1))
            lam, lam2 = rng.uniform(-30, 30, 2)
            for theta in range(1, 8):
                low, high = average_cost(spec, theta, lam), average_cost(spec, theta, lam2)
                self.assertAlmostEqual(high.total - low.total, (lam2 - lam) * low.activation, places=9)

    def test_subadditive(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            spec = ArmSpec(tuple(np.sort(rng.uniform(0, 20, 6))), rng.uniform(0, 20), rng.uniform(0.1, 1))
            lam = rng.uniform(-30, 30)
            lam2 = lam + rng.uniform(0, 10)
            for theta in range(1, 7):
                for theta2 in range(theta + 1, 8):
                    gain_high = average_cost(spec, theta2, lam2).total - average_cost(spec, theta2, lam).total
                    gain_low = average_cost(spec, theta, lam2).total - average_cost(spec, theta, lam).total
                    self.assertLessEqual(gain_high, gain_low + 1e-9)
