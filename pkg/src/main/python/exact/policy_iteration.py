# SPDX-License-Identifier: GPL-2.0-or-later
import logging

import numpy as np

from constants import IMPROVEMENT_TOL
from exact.evaluation import EvaluationError, PolicyTable, evaluate_policy, q_factors


def greedy_choices(q, current, tol=IMPROVEMENT_TOL):
    """ Keeps current[s] unless some action is better by more than tol, then takes the lowest such minimizer """
    states = np.arange(q.shape[1])
    best = q.min(axis=0)
    # actions are enumerated in lexicographic order, the first near-minimizer is the smallest
    lowest = np.argmax(q <= best + tol, axis=0)
    improve = q[current, states] - best > tol
    return np.where(improve, lowest, current), int(improve.sum())


def policy_iteration(model, s_fixed=0, tol=IMPROVEMENT_TOL, max_iterations=1000):
    """ Average-cost policy iteration from the never-transmit policy, returns (policy, gain) """
    choices = np.zeros(model.n_states, dtype=int)
    for iteration in range(1, max_iterations + 1):
        evaluation = evaluate_policy(model, PolicyTable(choices), s_fixed=s_fixed)
        choices, improved = greedy_choices(q_factors(model, evaluation), choices, tol)
        logging.info("policy iteration {}: gain={:.6f} improved={}".format(iteration, evaluation.gain, improved))
        if improved == 0:
            return PolicyTable(choices), evaluation.gain
    raise EvaluationError("policy iteration did not settle within {} iterations".format(max_iterations))
