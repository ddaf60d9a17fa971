# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from constants import STATIONARY_TOL
from mdp.tabular import TabularModel


class DegenerateGapError(Exception):

    def __init__(self, theta, channel=None, user=None):
        self.theta = theta
        self.channel = channel
        self.user = user
        where = "theta={}".format(theta)
        if channel is not None:
            where = "channel={} user={} {}".format(channel, user, where)
        super().__init__("activation frequency is flat between thresholds {} and {} ({}), index is undefined".format(
            theta, theta + 1, where))


@dataclass(frozen=True)
class ArmSpec:
    """ One user on one channel: holding cost h(1..S), transmission cost, success probability """

    holding_cost: tuple
    tx_cost: float
    success_prob: float

    def __post_init__(self):
        holding = tuple(float(x) for x in self.holding_cost)
        object.__setattr__(self, "holding_cost", holding)
        object.__setattr__(self, "tx_cost", float(self.tx_cost))
        object.__setattr__(self, "success_prob", float(self.success_prob))
        if len(holding) < 2:
            raise ValueError("state cap must be at least 2, got {}".format(len(holding)))
        for s in range(1, len(holding)):
            if holding[s] < holding[s - 1]:
                raise ValueError("holding cost decreases from h({})={} to h({})={}".format(
                    s, holding[s - 1], s + 1, holding[s]))
        if not 0.0 < self.success_prob <= 1.0:
            raise ValueError("success probability must lie in (0, 1], got {}".format(self.success_prob))
        if self.tx_cost < 0:
            raise ValueError("transmission cost must be nonnegative, got {}".format(self.tx_cost))

    @property
    def state_cap(self):
        return len(self.holding_cost)

    @property
    def holding(self):
        return np.array(self.holding_cost)

    def h(self, s):
        check_age(s, self.state_cap)
        return self.holding_cost[s - 1]


@dataclass(frozen=True)
class ThresholdPolicy:
    """ Transmit iff age >= theta, theta = S+1 never transmits """

    theta: int
    state_cap: int

    def __post_init__(self):
        if not 1 <= self.theta <= self.state_cap + 1:
            raise ValueError("threshold {} outside 1..{}".format(self.theta, self.state_cap + 1))

    def action(self, s):
        return int(s >= self.theta)

    def actions(self):
        return (np.arange(1, self.state_cap + 1) >= self.theta).astype(int)


@dataclass(frozen=True, eq=False)
class StationaryDist:

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if np.any(probs < 0):
            raise ValueError("stationary distribution has negative entries: {}".format(probs))
        if abs(probs.sum() - 1.0) > STATIONARY_TOL:
            raise ValueError("stationary distribution sums to {}".format(probs.sum()))
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, s):
        return self.probs[s - 1]

    def expect(self, values):
        return float(self.probs @ np.asarray(values, dtype=float))

    def mass_from(self, theta):
        """ Probability of ages >= theta """
        return float(self.probs[theta - 1:].sum())


@dataclass(frozen=True)
class CostSplit:
    holding: float
    activation: float
    total: float


def check_age(s, cap):
    if not 1 <= s <= cap:
        raise ValueError("age {} outside 1..{}".format(s, cap))


def arm_transition(s, a, success, cap):
    check_age(s, cap)
    if a not in (0, 1):
        raise ValueError("action must be 0 or 1, got {}".format(a))
    if a * success == 1:
        return 1
    return min(s + 1, cap)


def arm_stage_cost(spec, s, a, lam):
    return spec.h(s) + (spec.tx_cost + lam) * a


def threshold_chain(theta, rho, cap):
    ThresholdPolicy(theta, cap)
    matrix = np.zeros((cap, cap))
    for z in range(1, cap + 1):
        up = min(z + 1, cap) - 1
        if z >= theta:
            matrix[z - 1, 0] += rho
            matrix[z - 1, up] += 1.0 - rho
        else:
            matrix[z - 1, up] = 1.0
    return matrix


def _point_mass(cap):
    probs = np.zeros(cap)
    probs[-1] = 1.0
    return StationaryDist(probs)


def stationary_exact(theta, rho, cap):
    """ Solves the balance equations of the threshold chain with one row replaced by normalization """
    if theta == cap + 1:
        return _point_mass(cap)
    matrix = threshold_chain(theta, rho, cap)
    system = matrix.T - np.eye(cap)
    system[-1, :] = 1.0
    rhs = np.zeros(cap)
    rhs[-1] = 1.0
    probs = linalg.solve(system, rhs)
    probs = np.clip(probs, 0.0, None)
    return StationaryDist(probs / probs.sum())


def beta(theta, rho):
    return 1.0 / (theta - 1 + 1.0 / rho)


def stationary_closed_form(theta, rho, cap):
    if not 1 <= theta <= cap:
        raise ValueError("closed form covers thresholds 1..{}, got {}".format(cap, theta))
    b = beta(theta, rho)
    z = np.arange(1, cap + 1)
    probs = np.where(z < theta, b, (1.0 - rho) ** np.maximum(z - theta, 0) * b)
    # the capped age collects the whole geometric tail
    probs[-1] = (1.0 - rho) ** (cap - theta) * b / rho
    return StationaryDist(probs)


def activation_frequency(theta, rho, cap):
    ThresholdPolicy(theta, cap)
    if theta == cap + 1:
        return 0.0
    return 1.0 / (rho * (theta - 1) + 1.0)


def average_cost(spec, theta, lam=0.0):
    dist = stationary_exact(theta, spec.success_prob, spec.state_cap)
    holding = dist.expect(spec.holding)
    activation = dist.mass_from(theta) if theta <= spec.state_cap else 0.0
    return CostSplit(holding, activation, holding + (spec.tx_cost + lam) * activation)


def arm_model(spec, lam=0.0):
    """ The arm as a two-action tabular MDP carrying the virtual cost lam on activation """
    cap = spec.state_cap
    ages = np.arange(cap)
    up = np.minimum(ages + 1, cap - 1)
    successors = np.zeros((2, cap, 2), dtype=int)
    probs = np.zeros((2, cap, 2))
    successors[0, :, 0] = up
    successors[0, :, 1] = up
    probs[0, :, 0] = 1.0
    successors[1, :, 0] = 0
    successors[1, :, 1] = up
    probs[1, :, 0] = spec.success_prob
    probs[1, :, 1] = 1.0 - spec.success_prob
    costs = np.stack([spec.holding, spec.holding + spec.tx_cost + lam])
    return TabularModel(successors, probs, costs, (0, 1))
