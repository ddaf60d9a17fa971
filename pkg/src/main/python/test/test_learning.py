# SPDX-License-Identifier: GPL-2.0-or-later
import unittest
from dataclasses import replace
from types import SimpleNamespace

import numpy as np

from exact.evaluation import threshold_q_factors
from index.analytic import build_index_table, index_curve
from learning.qlearner import QLearner, LearnerBank, q_update, lambda_update, sweep_learner, synchronous_sweep
from learning.schedule import PowerStep, StepSchedule, parse_step, make_schedule, default_schedule, tracking_schedule
from mdp.arm import ArmSpec
from mdp.composite import SystemConfig


def constant_schedule(eta_q, eta_lambda=0.0):
    return SimpleNamespace(eta_q=lambda k: eta_q, eta_lambda=lambda k: eta_lambda)


def random_outcomes(rng, sweeps, rho):
    return rng.random((sweeps, len(rho))) < np.asarray(rho)


class TestSchedule(unittest.TestCase):

    def test_power_step(self):
        step = PowerStep(0.1, 0.6)
        self.assertAlmostEqual(step(1), 0.1)
        self.assertAlmostEqual(step(32), 0.1 / 8)
        self.assertEqual(str(step), "0.1/k^0.6")
        for scale, power in ((0, 1), (-1, 1), (1, 0.5), (1, 1.2)):
            with self.assertRaises(ValueError):
                PowerStep(scale, power)

    def test_presets(self):
        default = default_schedule()
        self.assertEqual(default.eta_q, PowerStep(1.0, 1.0))
        self.assertEqual(default.eta_lambda, PowerStep(0.1, 0.6))
        tracking = tracking_schedule()
        self.assertEqual(tracking.eta_q, PowerStep(1.0, 0.6))
        self.assertEqual(tracking.eta_lambda, PowerStep(5.0, 1.0))
        self.assertEqual(tracking(4), (1.0 / 4 ** 0.6, 1.25))

    def test_parse_step(self):
        self.assertEqual(parse_step("0.1/k**0.6"), PowerStep(0.1, 0.6))
        self.assertEqual(parse_step("1/k"), PowerStep(1.0, 1.0))
        self.assertEqual(parse_step("2/sqrt(k)**1.5"), PowerStep(2.0, 0.75))

    def test_parse_step_rejects(self):
        for expression in ("1/log(k)", "1/k**2", "k", "-1/k", "x/k", "1/k +", "0.1/k**0.4"):
            with self.assertRaises(ValueError, msg=expression):
                parse_step(expression)

    def test_make_schedule(self):
        self.assertEqual(make_schedule().name, "default")
        self.assertEqual(make_schedule("tracking").eta_lambda, PowerStep(5.0, 1.0))
        custom = make_schedule("tracking", eta_lambda="0.5/k**0.7")
        self.assertEqual(custom.eta_q, PowerStep(1.0, 0.6))
        self.assertEqual(custom.eta_lambda, PowerStep(0.5, 0.7))
        with self.assertRaises(ValueError):
            make_schedule("fastest")

    def test_schedule_is_callable(self):
        schedule = StepSchedule(PowerStep(1.0, 1.0), PowerStep(1.0, 1.0))
        self.assertEqual(schedule(2), (0.5, 0.5))


class TestQLearner(unittest.TestCase):

    spec = ArmSpec((1, 2, 4, 5, 8, 9), 1.0, 0.7)

    def test_zero_step(self):
        learner = replace(QLearner.for_arm(self.spec, 3, 2.5), q=threshold_q_factors(self.spec, 3, 0.0))
        swept = sweep_learner(learner, True, constant_schedule(0.0))
        self.assertTrue(np.array_equal(swept.q, learner.q))
        self.assertEqual(swept.lam, 2.5)
        self.assertEqual(swept.step_count, 1)
        updated = q_update(learner, 2, 0, 3, constant_schedule(0.0))
        self.assertTrue(np.array_equal(updated.q, learner.q))
        self.assertEqual(updated.step_count, 0)

    def test_anchor(self):
        learner = QLearner.for_arm(self.spec, 2)
        schedule = default_schedule()
        rng = np.random.default_rng(30)
        for gamma in rng.random(20) < 0.7:
            learner = sweep_learner(learner, gamma, schedule)
            self.assertEqual(learner.q[0, 0], 0.0)
        self.assertEqual(learner.step_count, 20)

    def test_impossible_transition(self):
        learner = QLearner.for_arm(self.spec, 2)
        schedule = default_schedule()
        for s, a, s_next in ((2, 0, 1), (2, 1, 4), (0, 0, 1), (6, 0, 1), (2, 2, 3)):
            with self.assertRaises(ValueError):
                q_update(learner, s, a, s_next, schedule)
        q_update(learner, 6, 0, 6, schedule)
        q_update(learner, 6, 1, 1, schedule)

    def test_sample_update(self):
        learner = QLearner.for_arm(self.spec, 2, lam=3.0)
        updated = q_update(learner, 4, 1, 1, constant_schedule(0.5))
        # target 5 + 1 + 3 + Q(1, 0) - Q(4, 1) = 9 from zeros
        self.assertAlmostEqual(updated.q[3, 1], 4.5)
        self.assertEqual(updated.q[0, 0], 0.0)

    def test_lambda_update(self):
        learner = replace(QLearner.for_arm(self.spec, 2, lam=1.0), q=np.array([[0, 1], [2, 0.5]] + [[0, 0]] * 4))
        updated = lambda_update(learner, constant_schedule(0.1, 0.5))
        self.assertAlmostEqual(updated.lam, 1.0 + 0.5 * 1.5)
        self.assertEqual(updated.step_count, 1)

    def test_drift_sign(self):
        curve = index_curve(self.spec)
        for theta in range(1, self.spec.state_cap + 1):
            nu = curve[theta - 1]
            for lam, sign in ((nu, 0), (nu - 2.0, 1), (nu + 2.0, -1)):
                learner = replace(QLearner.for_arm(self.spec, theta, lam), q=threshold_q_factors(self.spec, theta, lam))
                drift = learner.drift()
                if sign == 0:
                    self.assertAlmostEqual(drift, 0.0, places=8)
                else:
                    self.assertEqual(np.sign(drift), sign, (theta, lam))

    def test_drift_decreasing_in_lambda(self):
        theta = 3
        drifts = []
        for lam in np.linspace(-10, 20, 31):
            learner = replace(QLearner.for_arm(self.spec, theta, lam), q=threshold_q_factors(self.spec, theta, lam))
            drifts.append(learner.drift())
        self.assertTrue(np.all(np.diff(drifts) < 0))

    def test_exact_factors_are_fixed(self):
        spec = ArmSpec((1, 2, 4, 5, 8, 9), 1.0, 1.0)
        exact = threshold_q_factors(spec, 3, 1.5)
        learner = replace(QLearner.for_arm(spec, 3, 1.5), q=exact)
        for _ in range(5):
            learner = sweep_learner(learner, True, constant_schedule(0.7))
        self.assertTrue(np.allclose(learner.q, exact, atol=1e-10))

    def test_deterministic_convergence(self):
        spec = ArmSpec((1, 2, 4, 5, 8, 9), 1.0, 1.0)
        learner = QLearner.for_arm(spec, 3, 1.5)
        for _ in range(2000):
            learner = sweep_learner(learner, True, constant_schedule(0.5))
        self.assertTrue(np.allclose(learner.q, threshold_q_factors(spec, 3, 1.5), atol=1e-8))


class TestLearnerBank(unittest.TestCase):

    config = SystemConfig(holding=((1, 2, 3), (0, 1, 4, 6)), rho=(0.8, 0.5), tau=(1, 2))

    def test_rows(self):
        bank = LearnerBank(self.config)
        self.assertEqual(len(bank), 2 * (3 + 4))
        self.assertEqual(list(bank.theta[bank.rows(1, 1)]), [1, 2, 3, 4])
        self.assertEqual(bank.learner(0, 1, 2).q.shape, (4, 2))

    def test_matches_single_learners(self):
        bank = LearnerBank(self.config)
        schedule = tracking_schedule()
        singles = {(m, n, theta): QLearner.for_arm(self.config.arm_spec(m, n), theta)
                   for m in range(2) for n in range(2) for theta in range(1, self.config.caps[n] + 1)}
        rng = np.random.default_rng(31)
        for outcome in random_outcomes(rng, 50, self.config.rho):
            bank.sweep([1, 2], {1: outcome[0], 2: outcome[1]}, schedule)
            for key, learner in singles.items():
                singles[key] = sweep_learner(learner, outcome[key[0]], schedule)
        for (m, n, theta), learner in singles.items():
            banked = bank.learner(m, n, theta)
            self.assertTrue(np.allclose(banked.q, learner.q, atol=1e-10))
            self.assertAlmostEqual(banked.lam, learner.lam, places=10)
            self.assertEqual(banked.step_count, 50)

    def test_idle_channels_untouched(self):
        bank = LearnerBank(self.config)
        synchronous_sweep(bank, [2], {2: True}, default_schedule())
        self.assertTrue(np.all(bank.step_count[bank.channel == 0] == 0))
        self.assertTrue(np.all(bank.step_count[bank.channel == 1] == 1))
        self.assertTrue(np.all(bank.q[bank.channel == 0] == 0))
        bank.sweep([], {}, default_schedule())
        self.assertEqual(bank.step_count.sum(), 7)
        with self.assertRaises(ValueError):
            bank.sweep([3], {3: True}, default_schedule())

    def test_seeded_lambda(self):
        table = build_index_table(self.config, [1.0, 1.0])
        bank = LearnerBank(self.config, initial=table)
        self.assertAlmostEqual(bank.learner(1, 1, 3).lam, table.value(1, 1, 3))
        self.assertTrue(np.allclose(bank.index_table().values, table.values, equal_nan=True))

    def test_frame(self):
        frame = LearnerBank(self.config).to_frame()
        self.assertEqual(list(frame.columns), ["m", "n", "theta", "lambda", "step_count"])
        self.assertEqual(len(frame), 14)
        self.assertEqual(frame["m"].min(), 1)

    def test_tracking_converges(self):
        # five identical channels give five independent runs of every learner
        holding = tuple(range(1, 11))
        config = SystemConfig(holding=(holding,), rho=(0.8,) * 5, tau=(0,) * 5)
        bank = LearnerBank(config)
        schedule = tracking_schedule()
        rng = np.random.default_rng(32)
        channels = [1, 2, 3, 4, 5]
        for outcome in random_outcomes(rng, 200000, config.rho):
            bank.sweep(channels, dict(zip(channels, outcome)), schedule)
        expected = index_curve(config.arm_spec(0, 0))
        learned = bank.index_table().values[:, 0, :]
        self.assertTrue(np.all(np.isfinite(learned)))
        for m in range(5):
            for theta in range(1, 11):
                nu = expected[theta - 1]
                self.assertLess(abs(learned[m, theta - 1] - nu), max(0.05 * abs(nu), 0.05), (m, theta))

    def test_tracking_bounded(self):
        rng = np.random.default_rng(33)
        holding = tuple(np.sort(rng.uniform(0, 20, 8)))
        config = SystemConfig(holding=(holding, holding[:5]), rho=(0.75, 0.9), tau=(12, 17))
        bank = LearnerBank(config)
        schedule = tracking_schedule()
        bound = 10 * np.nanmax(np.abs(build_index_table(config, config.rho).values)) + 100
        for outcome in random_outcomes(rng, 100000, config.rho):
            bank.sweep([1, 2], {1: outcome[0], 2: outcome[1]}, schedule)
        self.assertTrue(np.all(np.isfinite(bank.q)))
        self.assertTrue(np.all(np.abs(bank.lam) < bound))

    def test_default_schedule_repeatable(self):
        rng = np.random.default_rng(34)
        outcomes = random_outcomes(rng, 2000, self.config.rho)
        banks = [LearnerBank(self.config), LearnerBank(self.config)]
        schedule = default_schedule()
        for bank in banks:
            for outcome in outcomes:
                bank.sweep([1, 2], {1: outcome[0], 2: outcome[1]}, schedule)
        self.assertTrue(np.array_equal(banks[0].lam, banks[1].lam))
        self.assertTrue(np.all(np.isfinite(banks[0].lam)))
