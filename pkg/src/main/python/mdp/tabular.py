# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TabularModel:
    """ Dense finite MDP: successors[a, s, k] is reached with probs[a, s, k], stage cost is costs[a, s] """

    successors: np.ndarray
    probs: np.ndarray
    costs: np.ndarray
    actions: tuple

    def __post_init__(self):
        if self.successors.shape != self.probs.shape:
            raise ValueError("successor and probability arrays differ in shape: {} vs {}".format(
                self.successors.shape, self.probs.shape))
        if self.costs.shape != self.successors.shape[:2]:
            raise ValueError("cost array has shape {}, expected {}".format(self.costs.shape, self.successors.shape[:2]))
        if len(self.actions) != self.successors.shape[0]:
            raise ValueError("{} action labels for {} actions".format(len(self.actions), self.successors.shape[0]))

    @property
    def n_actions(self):
        return self.successors.shape[0]

    @property
    def n_states(self):
        return self.successors.shape[1]

    def action_index(self):
        return {action: idx for idx, action in enumerate(self.actions)}

    def transition_matrix(self, choices):
        """ Row-stochastic matrix of the chain induced by choosing action choices[s] in state s """
        choices = np.asarray(choices, dtype=int)
        rows = np.arange(self.n_states)
        succ = self.successors[choices, rows]
        prob = self.probs[choices, rows]
        matrix = np.zeros((self.n_states, self.n_states))
        np.add.at(matrix, (np.repeat(rows, succ.shape[1]), succ.ravel()), prob.ravel())
        return matrix

    def policy_costs(self, choices):
        choices = np.asarray(choices, dtype=int)
        return self.costs[choices, np.arange(self.n_states)]

    def expected_next(self, values):
        """ E[values(s') | s, a] for every (a, s) """
        return (self.probs * np.asarray(values)[self.successors]).sum(axis=-1)
