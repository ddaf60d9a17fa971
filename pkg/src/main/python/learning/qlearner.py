# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from index.analytic import IndexTable

SNAPSHOT_COLUMNS = ["m", "n", "theta", "lambda", "step_count"]


def _jacobi_step(q, costs, lam, passive_next, policy, gamma, eta_q, anchor):
    """ One simultaneous TD update of every (s, a) entry of a batch of learners, then anchor subtraction

    q, costs: (B, S, 2); lam, gamma, eta_q: (B,); passive_next, policy: (B, S) with 0-based ages
    """
    values = np.take_along_axis(q, policy[..., None], axis=2)[..., 0]
    idle = np.take_along_axis(values, passive_next, axis=1)
    sent = np.where(gamma[:, None], values[:, :1], idle)
    target = np.stack([costs[..., 0] + idle, costs[..., 1] + lam[:, None] + sent], axis=2) - q
    q = q + eta_q[:, None, None] * target
    return q - q[:, anchor[0]:anchor[0] + 1, anchor[1]:anchor[1] + 1]


@dataclass(frozen=True, eq=False)
class QLearner:
    """ Relative Q-factors of the threshold policy theta and the running index estimate of state theta """

    q: np.ndarray
    lam: float
    theta: int
    costs: np.ndarray
    anchor: tuple = (1, 0)
    step_count: int = 0

    @classmethod
    def for_arm(cls, spec, theta, lam=0.0):
        if not 1 <= theta <= spec.state_cap:
            raise ValueError("learners exist for thresholds 1..{}, got {}".format(spec.state_cap, theta))
        costs = np.stack([spec.holding, spec.holding + spec.tx_cost], axis=1)
        return cls(np.zeros((spec.state_cap, 2)), float(lam), theta, costs)

    @property
    def state_cap(self):
        return self.q.shape[0]

    def policy(self):
        return (np.arange(1, self.state_cap + 1) >= self.theta).astype(int)

    def passive_next(self):
        return np.minimum(np.arange(1, self.state_cap + 1), self.state_cap - 1)

    def drift(self):
        return float(self.q[self.theta - 1, 0] - self.q[self.theta - 1, 1])

    def anchored(self, q):
        return q - q[self.anchor[0] - 1, self.anchor[1]]


def q_update(learner, s, a, s_next, schedule):
    cap = learner.state_cap
    expected = (1, min(s + 1, cap)) if a == 1 else (min(s + 1, cap),)
    if not 1 <= s <= cap or a not in (0, 1) or s_next not in expected:
        raise ValueError("transition ({}, {}) -> {} is impossible for cap {}".format(s, a, s_next, cap))
    eta = schedule.eta_q(learner.step_count + 1)
    q = learner.q.copy()
    target = learner.costs[s - 1, a] + learner.lam * a + q[s_next - 1, int(s_next >= learner.theta)] - q[s - 1, a]
    q[s - 1, a] += eta * target
    return replace(learner, q=learner.anchored(q))


def lambda_update(learner, schedule):
    k = learner.step_count + 1
    lam = learner.lam + schedule.eta_lambda(k) * learner.drift()
    return replace(learner, lam=float(lam), step_count=k)


def sweep_learner(learner, gamma, schedule):
    """ Updates every (s, a) entry from one channel outcome gamma, then lambda once """
    eta = np.array([schedule.eta_q(learner.step_count + 1)])
    q = _jacobi_step(learner.q[None], learner.costs[None], np.array([learner.lam]),
                     learner.passive_next()[None], learner.policy()[None], np.array([bool(gamma)]), eta,
                     (learner.anchor[0] - 1, learner.anchor[1]))
    return lambda_update(replace(learner, q=q[0]), schedule)


class LearnerBank:
    """ Learners of every (channel, user, threshold) triple, updated together """

    def __init__(self, config, initial=None):
        rows = [(m, n, theta) for m in range(config.n_channels) for n in range(config.n_users)
                for theta in range(1, config.caps[n] + 1)]
        self.n_channels, self.n_users, self.caps = config.n_channels, config.n_users, config.caps
        self.channel = np.array([r[0] for r in rows])
        self.user = np.array([r[1] for r in rows])
        self.theta = np.array([r[2] for r in rows])

        width = max(self.caps)
        holding = config.holding_matrix()[self.user]
        tau = np.array(config.tau)[self.channel]
        self.costs = np.stack([holding, holding + tau[:, None]], axis=2)
        caps = np.array(self.caps)[self.user]
        ages = np.arange(1, width + 1)
        self.passive_next = np.minimum(ages[None, :], caps[:, None] - 1)
        self.policy = (ages[None, :] >= self.theta[:, None]).astype(int)

        self.q = np.zeros((len(rows), width, 2))
        self.lam = np.zeros(len(rows))
        if initial is not None:
            seeded = initial.values[self.channel, self.user, self.theta - 1]
            self.lam = np.where(np.isfinite(seeded), seeded, 0.0)
        self.step_count = np.zeros(len(rows), dtype=int)

    def __len__(self):
        return len(self.theta)

    def rows(self, m, n):
        return np.flatnonzero((self.channel == m) & (self.user == n))

    def learner(self, m, n, theta):
        """ Copy of one learner, 0-based m and n """
        row = self.rows(m, n)[theta - 1]
        cap = self.caps[n]
        return QLearner(self.q[row, :cap].copy(), float(self.lam[row]), theta, self.costs[row, :cap].copy(),
                        step_count=int(self.step_count[row]))

    def sweep(self, activated, outcomes, schedule):
        """ activated: 1-based channel ids; outcomes[m] is the success flag of channel m """
        gamma = np.zeros(self.n_channels, dtype=bool)
        mask = np.zeros(len(self), dtype=bool)
        for m in activated:
            if not 1 <= m <= self.n_channels:
                raise ValueError("unknown channel {}".format(m))
            gamma[m - 1] = bool(outcomes[m])
            mask |= self.channel == m - 1
        if not mask.any():
            return self
        rows = np.flatnonzero(mask)
        k = self.step_count[rows] + 1
        eta_q, eta_lambda = schedule.eta_q(k.astype(float)), schedule.eta_lambda(k.astype(float))
        q = _jacobi_step(self.q[rows], self.costs[rows], self.lam[rows], self.passive_next[rows],
                         self.policy[rows], gamma[self.channel[rows]], np.broadcast_to(eta_q, rows.shape), (0, 0))
        self.q[rows] = q
        states = self.theta[rows] - 1
        drift = q[np.arange(len(rows)), states, 0] - q[np.arange(len(rows)), states, 1]
        self.lam[rows] += eta_lambda * drift
        self.step_count[rows] = k
        return self

    def index_table(self):
        values = np.full((self.n_channels, self.n_users, max(self.caps)), np.nan)
        values[self.channel, self.user, self.theta - 1] = self.lam
        return IndexTable(values, self.caps)

    def to_frame(self):
        return pd.DataFrame({
            "m": self.channel + 1,
            "n": self.user + 1,
            "theta": self.theta,
            "lambda": self.lam,
            "step_count": self.step_count,
        }, columns=SNAPSHOT_COLUMNS)


def synchronous_sweep(bank, activated_channels, outcomes, schedule):
    return bank.sweep(activated_channels, outcomes, schedule)
