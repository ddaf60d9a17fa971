# SPDX-License-Identifier: GPL-2.0-or-later
import itertools
import logging

import numpy as np
from scipy.optimize import brentq

from constants import MINIMIZER_RTOL, DEGENERATE_GAP, BISECTION_BRACKET
from exact.evaluation import PolicyTable, MultichainError, evaluate_policy, policy_stationary, q_factors
from mdp.arm import DegenerateGapError, average_cost, arm_model


def threshold_splits(spec):
    """ CostSplit at lambda=0 for theta = 1..S+1 """
    return [average_cost(spec, theta) for theta in range(1, spec.state_cap + 2)]


def threshold_costs(spec, lambdas):
    """ J(theta, lambda) as a len(lambdas) x (S+1) matrix """
    splits = threshold_splits(spec)
    holding = np.array([x.holding for x in splits])
    activation = np.array([x.activation for x in splits])
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    return holding[None, :] + (spec.tx_cost + lambdas[:, None]) * activation[None, :]


def optimal_threshold(spec, lam, rtol=MINIMIZER_RTOL):
    """ All thresholds minimizing J(theta, lam), sorted """
    costs = threshold_costs(spec, [lam])[0]
    best = costs.min()
    return tuple(int(theta) for theta in np.flatnonzero(costs <= best + rtol * max(1.0, abs(best))) + 1)


def passive_set(spec, lam):
    return frozenset(range(1, min(optimal_threshold(spec, lam))))


def lower_envelope(spec, lambdas):
    """ min over thresholds of J(theta, lambda) and the smallest minimizing theta, per lambda """
    costs = threshold_costs(spec, lambdas)
    return costs.min(axis=1), costs.argmin(axis=1) + 1


def index_bisection(spec, theta):
    """ The virtual cost where thresholds theta and theta+1 coincide """
    if not 1 <= theta <= spec.state_cap:
        raise ValueError("index is defined for thresholds 1..{}, got {}".format(spec.state_cap, theta))
    low, high = average_cost(spec, theta), average_cost(spec, theta + 1)
    gap = low.activation - high.activation
    if gap > DEGENERATE_GAP:
        return (high.holding - low.holding) / gap - spec.tx_cost

    def difference(lam):
        return low.holding - high.holding + (spec.tx_cost + lam) * gap

    logging.warning("activation gap {:.3e} at theta={}, falling back to root finding".format(gap, theta))
    width = 1.0
    while width <= BISECTION_BRACKET:
        left, right = -spec.tx_cost - width, width
        if difference(left) * difference(right) <= 0:
            return brentq(difference, left, right, xtol=1e-12)
        width *= 10.0
    raise DegenerateGapError(theta)


def performance_difference(model, pi1, pi2):
    """ E_{s ~ d(pi1)}[Q_pi2(s, pi1(s)) - Q_pi2(s, pi2(s))], which equals J(pi1) - J(pi2) """
    probs = policy_stationary(model, pi1)
    q = q_factors(model, evaluate_policy(model, pi2))
    states = np.arange(model.n_states)
    return float(probs @ (q[pi1.choices, states] - q[pi2.choices, states]))


def verify_value_monotonicity(spec, theta, lam, tol=1e-10):
    evaluation = evaluate_policy(arm_model(spec, lam), PolicyTable.threshold(theta, spec.state_cap))
    scale = max(1.0, float(np.max(np.abs(evaluation.bias))))
    return bool(np.all(np.diff(evaluation.bias) >= -tol * scale))


def brute_force_optimal(spec, lam):
    """ Best gain over all 2^S deterministic arm policies, skipping multichain ones """
    model = arm_model(spec, lam)
    best_gain, best_actions = np.inf, None
    for actions in itertools.product((0, 1), repeat=spec.state_cap):
        try:
            gain = evaluate_policy(model, PolicyTable(np.array(actions))).gain
        except MultichainError:
            continue
        if gain < best_gain:
            best_gain, best_actions = gain, actions
    return best_gain, best_actions
