# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from constants import POISSON_TOL
from mdp.arm import ThresholdPolicy, arm_model


class EvaluationError(Exception):
    pass


class MultichainError(EvaluationError):

    def __init__(self, classes):
        self.classes = classes
        super().__init__("policy induces {} closed recurrent classes, the gain is not unique".format(classes))


@dataclass(frozen=True, eq=False)
class PolicyTable:
    """ Deterministic stationary policy as an action index per joint state """

    choices: np.ndarray

    def __post_init__(self):
        choices = np.array(self.choices, dtype=int)
        choices.setflags(write=False)
        object.__setattr__(self, "choices", choices)

    @classmethod
    def from_assignments(cls, model, assignments):
        lookup = model.action_index()
        choices = []
        for s, assignment in enumerate(assignments):
            if assignment not in lookup:
                raise ValueError("state {}: {} is not an admissible action".format(s, assignment))
            choices.append(lookup[assignment])
        return cls(np.array(choices))

    @classmethod
    def threshold(cls, theta, cap):
        return cls(ThresholdPolicy(theta, cap).actions())

    def assignment(self, model, state_index):
        return model.actions[self.choices[state_index]]


@dataclass(frozen=True, eq=False)
class Evaluation:
    gain: float
    bias: np.ndarray
    anchor: int
    residual: float


def closed_classes(matrix):
    """ Number of strongly connected components with no edge leaving them """
    graph = csr_matrix(matrix > 0)
    count, labels = connected_components(graph, directed=True, connection="strong")
    rows, cols = graph.nonzero()
    leaking = np.unique(labels[rows[labels[rows] != labels[cols]]])
    return count - len(leaking)


def check_unichain(matrix):
    classes = closed_classes(matrix)
    if classes != 1:
        raise MultichainError(classes)


def evaluate_policy(model, policy, s_fixed=0, tol=POISSON_TOL):
    """ Solves V + J = c + P V with V(s_fixed) = 0 """
    if not 0 <= s_fixed < model.n_states:
        raise ValueError("anchor state {} outside 0..{}".format(s_fixed, model.n_states - 1))
    matrix = model.transition_matrix(policy.choices)
    check_unichain(matrix)
    costs = model.policy_costs(policy.choices)

    # V(s_fixed) = 0 drops its column, the freed slot carries the gain
    system = np.eye(model.n_states) - matrix
    system[:, s_fixed] = 1.0
    try:
        solution = linalg.lu_solve(linalg.lu_factor(system, check_finite=True), costs)
    except (ValueError, linalg.LinAlgError) as e:
        raise EvaluationError("Poisson system could not be solved: {}".format(e))
    if not np.all(np.isfinite(solution)):
        raise EvaluationError("Poisson system is singular")

    gain = float(solution[s_fixed])
    bias = solution.copy()
    bias[s_fixed] = 0.0
    residual = float(np.max(np.abs(bias + gain - costs - matrix @ bias)))
    scale = max(1.0, float(np.max(np.abs(costs))), float(np.max(np.abs(bias))))
    if residual > tol * scale:
        raise EvaluationError("Poisson residual {:.3e} exceeds {:.1e}".format(residual, tol * scale))
    bias.setflags(write=False)
    return Evaluation(gain, bias, s_fixed, residual)


def policy_stationary(model, policy):
    matrix = model.transition_matrix(policy.choices)
    check_unichain(matrix)
    n = model.n_states
    system = matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    probs = linalg.lu_solve(linalg.lu_factor(system), rhs)
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def q_factors(model, evaluation):
    """ Q[a, s] = c(s, a) - J + E[V(s')], so that Q[pi(s), s] = V(s) """
    return model.costs - evaluation.gain + model.expected_next(evaluation.bias)


def threshold_q_factors(spec, theta, lam):
    """ Relative Q-factors of a threshold policy laid out as [s][a], zero at (s=1, a=0) """
    model = arm_model(spec, lam)
    evaluation = evaluate_policy(model, PolicyTable.threshold(theta, spec.state_cap))
    q = q_factors(model, evaluation).T
    return q - q[0, 0]
