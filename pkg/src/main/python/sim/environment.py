# SPDX-License-Identifier: GPL-2.0-or-later
import numpy as np

from mdp.arm import arm_transition
from mdp.composite import AoIState, joint_stage_cost


class ChannelStreams:
    """ One random generator per channel, so a channel's outcomes do not depend on how others are used """

    def __init__(self, seed, n_channels):
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(seed)
        # children are derived from the spawn key so the same seed always gives the same streams
        self.generators = [np.random.default_rng(np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key + (m,)))
                           for m in range(n_channels)]
        self.draws = np.zeros(n_channels, dtype=int)

    def draw(self, m, rho):
        """ Bernoulli(rho) outcome of 1-based channel m """
        self.draws[m - 1] += 1
        return int(self.generators[m - 1].random() < rho)


def env_step(config, state, action, streams):
    """ Returns (next state, {channel: success flag} for activated channels, stage cost) """
    cost = joint_stage_cost(config, state, action)
    outcomes = {m: streams.draw(m, config.rho[m - 1]) for m in action.active_channels()}
    nxt = tuple(arm_transition(s, int(m > 0), outcomes.get(m, 0), cap)
                for s, m, cap in zip(state.ages, action.choice, config.caps))
    return AoIState(nxt), outcomes, cost
