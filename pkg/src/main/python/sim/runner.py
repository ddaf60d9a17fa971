# SPDX-License-Identifier: GPL-2.0-or-later
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from constants import RHO_REBUILD_TOL, RHO_FLOOR
from index.analytic import build_index_table
from index.ucb import UcbState
from learning.qlearner import LearnerBank
from learning.schedule import default_schedule
from mdp.composite import AoIState, Assignment, encode_state, joint_stage_cost
from scheduler.dispatch import schedule
from sim.environment import ChannelStreams, env_step
from sim.estimator import ChannelEstimator, update_estimator
from sim.scenario import generate_scenario, scenario_rng, trial_seed

TRAJECTORY_COLUMNS = ["epoch", "cost", "moving_avg"]
SUITE_COLUMNS = ["policy", "mean", "std"]


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    kind: str
    seed: tuple
    costs: np.ndarray
    assignments: tuple
    holding: np.ndarray = None

    @property
    def moving_average(self):
        return np.cumsum(self.costs) / np.arange(1, len(self.costs) + 1)

    @property
    def final_moving_average(self):
        if len(self.costs) == 0:
            return float("nan")
        return float(self.moving_average[-1])

    def activations(self, n_channels):
        counts = np.zeros(n_channels, dtype=int)
        for assignment in self.assignments:
            for m in assignment.active_channels():
                counts[m - 1] += 1
        return counts

    def to_frame(self):
        return pd.DataFrame({
            "epoch": np.arange(1, len(self.costs) + 1),
            "cost": self.costs,
            "moving_avg": self.moving_average,
        }, columns=TRAJECTORY_COLUMNS)


def _seed_label(seed):
    if isinstance(seed, np.random.SeedSequence):
        return (seed.entropy,) + tuple(seed.spawn_key)
    return (seed,)


def run_trial(config, kind, horizon, seed, steps=None, rebuild_tol=RHO_REBUILD_TOL):
    """ Closed loop of estimation, scheduling and channel draws from the all-ones state """
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = ChannelStreams(seed_seq, config.n_channels)
    state = AoIState.fresh(config)
    estimator = ChannelEstimator.fresh(config.n_channels)
    ucb = UcbState.fresh(config.n_channels, kind.sigma) if kind.uses_ucb else None
    learners, table, built_for = None, None, None
    if kind.learned:
        steps = steps or default_schedule()
        # learned indices start from the optimistic analytic table
        learners = LearnerBank(config, initial=build_index_table(config, estimator.rho_hat, strict=False))

    costs, assignments, holding = [], [], []
    idle = Assignment.idle(config.n_users)
    for epoch in range(1, horizon + 1):
        rho_hat = estimator.rho_hat
        if learners is not None:
            table = learners.index_table()
        elif kind.is_index and (built_for is None or np.max(np.abs(rho_hat - built_for)) > rebuild_tol):
            table = build_index_table(config, np.maximum(rho_hat, RHO_FLOOR), strict=False)
            built_for = rho_hat
            logging.debug("{}: index table rebuilt at epoch {} for rho_hat={}".format(kind, epoch, rho_hat))
        action = schedule(kind, state, config, table, rho_hat, ucb)
        holding.append(joint_stage_cost(config, state, idle))
        state, outcomes, cost = env_step(config, state, action, streams)
        estimator = update_estimator(estimator, action, outcomes)
        if ucb is not None:
            ucb = ucb.record(action)
        if learners is not None:
            learners.sweep(sorted(outcomes), outcomes, steps)
        costs.append(cost)
        assignments.append(action)
    return TrajectoryRecord(str(kind), _seed_label(seed), np.array(costs, dtype=float), tuple(assignments),
                            np.array(holding, dtype=float))


def simulate_policy(config, model, policy, steps, seed):
    """ Per-epoch costs of a fixed joint policy driven through the environment """
    streams = ChannelStreams(seed, config.n_channels)
    state = AoIState.fresh(config)
    costs = np.empty(steps)
    for t in range(steps):
        action = policy.assignment(model, encode_state(config, state))
        state, _, costs[t] = env_step(config, state, action, streams)
    return costs


def _run_task(task):
    return run_trial(*task)


@dataclass(frozen=True, eq=False)
class SuiteResult:
    config: object
    kinds: tuple
    records: dict

    def finals(self, kind):
        return np.array([r.final_moving_average for r in self.records[str(kind)]])

    def summary(self):
        out = {}
        for kind in self.kinds:
            finals = self.finals(kind)
            out[str(kind)] = {
                "mean": float(finals.mean()),
                "std": float(finals.std()),
                "final_moving_avg": [float(x) for x in finals],
            }
        return out

    def to_frame(self):
        summary = self.summary()
        return pd.DataFrame([(k, v["mean"], v["std"]) for k, v in summary.items()], columns=SUITE_COLUMNS)


def run_suite(spec, kinds, workers=1, steps=None, config=None):
    """ One scenario per suite, every repeat shares its channel streams across all kinds """
    if config is None:
        config = generate_scenario(spec, scenario_rng(spec.seed))
    kinds = tuple(kinds)
    tasks = [(config, kind, spec.horizon, trial_seed(spec.seed, r), steps)
             for kind in kinds for r in range(spec.repeats)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]

    records = {}
    for (_, kind, _, _, _), record in zip(tasks, results):
        records.setdefault(str(kind), []).append(record)
        logging.info("{} repeat {}: final moving average {:.4f}".format(
            kind, len(records[str(kind)]) - 1, record.final_moving_average))
    return SuiteResult(config, kinds, records)
