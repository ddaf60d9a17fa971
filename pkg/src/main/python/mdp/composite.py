# SPDX-License-Identifier: GPL-2.0-or-later
import logging
import math
from dataclasses import dataclass

import numpy as np

from constants import ACTION_LIMIT, STATE_LIMIT
from mdp.arm import ArmSpec, arm_transition, check_age
from mdp.tabular import TabularModel


class SizeLimitError(Exception):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """ N users with holding curves h_n(1..S_n) and M channels with (rho_m, tau_m) """

    holding: tuple
    rho: tuple
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "holding", tuple(tuple(float(x) for x in h) for h in self.holding))
        object.__setattr__(self, "rho", tuple(float(x) for x in self.rho))
        object.__setattr__(self, "tau", tuple(float(x) for x in self.tau))
        if len(self.holding) < 1:
            raise ValueError("at least one user is required")
        if len(self.rho) < 1:
            raise ValueError("at least one channel is required")
        if len(self.rho) != len(self.tau):
            raise ValueError("{} success probabilities for {} transmission costs".format(len(self.rho), len(self.tau)))
        # ArmSpec validates every curve and channel pairing
        for n in range(self.n_users):
            for m in range(self.n_channels):
                self.arm_spec(m, n)

    @property
    def n_users(self):
        return len(self.holding)

    @property
    def n_channels(self):
        return len(self.rho)

    @property
    def caps(self):
        return tuple(len(h) for h in self.holding)

    @property
    def n_states(self):
        return int(np.prod(self.caps))

    def holding_matrix(self):
        """ N x max(S_n), padded with each curve's last value """
        width = max(self.caps)
        return np.array([list(h) + [h[-1]] * (width - len(h)) for h in self.holding])

    def arm_spec(self, m, n, rho=None):
        """ Arm of user n on channel m (both 0-based), optionally with an estimated success rate """
        return ArmSpec(self.holding[n], self.tau[m], self.rho[m] if rho is None else rho)

    def to_dict(self):
        return {"holding": [list(h) for h in self.holding], "rho": list(self.rho), "tau": list(self.tau)}


@dataclass(frozen=True)
class AoIState:

    ages: tuple

    def __post_init__(self):
        object.__setattr__(self, "ages", tuple(int(x) for x in self.ages))

    @classmethod
    def fresh(cls, config):
        return cls((1,) * config.n_users)

    def validate(self, config):
        if len(self.ages) != config.n_users:
            raise ValueError("state has {} ages for {} users".format(len(self.ages), config.n_users))
        for s, cap in zip(self.ages, config.caps):
            check_age(s, cap)
        return self

    def as_array(self):
        return np.array(self.ages)


@dataclass(frozen=True)
class Assignment:
    """ choice[n] is the 1-based channel of user n, 0 when idle """

    choice: tuple

    def __post_init__(self):
        object.__setattr__(self, "choice", tuple(int(x) for x in self.choice))

    @classmethod
    def idle(cls, n_users):
        return cls((0,) * n_users)

    @classmethod
    def from_pairs(cls, n_users, pairs):
        choice = [0] * n_users
        for n, m in pairs:
            choice[n] = m
        return cls(tuple(choice))

    def validate(self, config):
        if len(self.choice) != config.n_users:
            raise ValueError("assignment {} has {} entries for {} users".format(
                self.choice, len(self.choice), config.n_users))
        used = set()
        for m in self.choice:
            if not 0 <= m <= config.n_channels:
                raise ValueError("assignment {} names unknown channel {}".format(self.choice, m))
            if m > 0 and m in used:
                raise ValueError("assignment {} puts two users on channel {}".format(self.choice, m))
            used.add(m)
        return self

    def pairs(self):
        """ (user, channel) for every transmitting user """
        return [(n, m) for n, m in enumerate(self.choice) if m > 0]

    def active_channels(self):
        return sorted(m for m in self.choice if m > 0)


def action_count(n_users, n_channels):
    return sum(math.comb(n_users, j) * math.perm(n_channels, j) for j in range(min(n_users, n_channels) + 1))


def enumerate_actions(n_users, n_channels, limit=ACTION_LIMIT):
    """ All admissible assignments in lexicographic order of the choice vector """
    if n_users < 1 or n_channels < 1:
        raise ValueError("need at least one user and one channel, got N={} M={}".format(n_users, n_channels))
    count = action_count(n_users, n_channels)
    if count > limit:
        raise SizeLimitError("{} joint actions for N={} M={} exceed the limit of {}; "
                             "the action space is too large for exact methods".format(count, n_users, n_channels, limit))

    out = []

    def extend(prefix, used):
        if len(prefix) == n_users:
            out.append(Assignment(tuple(prefix)))
            return
        for m in range(n_channels + 1):
            if m == 0 or m not in used:
                extend(prefix + [m], used | {m} if m else used)

    extend([], frozenset())
    return out


def joint_transition_prob(config, s, a, s_next):
    a.validate(config)
    s.validate(config)
    s_next.validate(config)
    prob = 1.0
    for n, (age, m, age_next) in enumerate(zip(s.ages, a.choice, s_next.ages)):
        cap = config.caps[n]
        if m == 0:
            prob *= float(arm_transition(age, 0, 0, cap) == age_next)
        else:
            rho = config.rho[m - 1]
            prob *= rho * (arm_transition(age, 1, 1, cap) == age_next) + \
                (1.0 - rho) * (arm_transition(age, 1, 0, cap) == age_next)
        if prob == 0.0:
            break
    return prob


def joint_stage_cost(config, s, a):
    a.validate(config)
    s.validate(config)
    holding = sum(config.holding[n][age - 1] for n, age in enumerate(s.ages))
    return holding + sum(config.tau[m - 1] for m in a.choice if m > 0)


def encode_state(config, state):
    return int(np.ravel_multi_index(np.asarray(state.ages) - 1, config.caps))


def decode_state(config, index):
    return AoIState(tuple(int(x) + 1 for x in np.unravel_index(index, config.caps)))


def build_joint_model(config, max_states=STATE_LIMIT, action_limit=ACTION_LIMIT):
    """ Dense tabular model of the composite MDP over mixed-radix encoded joint states """
    n_states = config.n_states
    if n_states > max_states:
        raise SizeLimitError("{} joint states for N={} exceed the limit of {}; exact solving is refused "
                             "(N=4 users with S=10 already runs out of memory)".format(
                                 n_states, config.n_users, max_states))
    actions = enumerate_actions(config.n_users, config.n_channels, limit=action_limit)
    caps = np.array(config.caps)
    ages = np.stack(np.unravel_index(np.arange(n_states), config.caps), axis=1) + 1
    base_cost = config.holding_matrix()[np.arange(config.n_users), ages - 1].sum(axis=1)
    passive = np.minimum(ages + 1, caps)

    width = 2 ** min(config.n_users, config.n_channels)
    successors = np.zeros((len(actions), n_states, width), dtype=int)
    probs = np.zeros((len(actions), n_states, width))
    costs = np.zeros((len(actions), n_states))
    for idx, action in enumerate(actions):
        active = action.pairs()
        costs[idx] = base_cost + sum(config.tau[m - 1] for _, m in active)
        for k in range(2 ** len(active)):
            nxt = passive.copy()
            weight = 1.0
            for bit, (n, m) in enumerate(active):
                if (k >> bit) & 1:
                    nxt[:, n] = 1
                    weight *= config.rho[m - 1]
                else:
                    weight *= 1.0 - config.rho[m - 1]
            successors[idx, :, k] = np.ravel_multi_index(tuple((nxt - 1).T), config.caps)
            probs[idx, :, k] = weight
        successors[idx, :, 2 ** len(active):] = successors[idx, :, :1]
    logging.info("joint model: {} states, {} actions".format(n_states, len(actions)))
    return TabularModel(successors, probs, costs, tuple(actions))
