# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass

import numpy as np

from constants import RHO_PRIOR


@dataclass(frozen=True)
class ChannelEstimator:
    """ Empirical success rates, unused channels keep the optimistic prior """

    attempt_counts: tuple
    success_counts: tuple
    prior: float = RHO_PRIOR

    @classmethod
    def fresh(cls, n_channels, prior=RHO_PRIOR):
        return cls((0,) * n_channels, (0,) * n_channels, prior)

    @property
    def rho_hat(self):
        attempts = np.array(self.attempt_counts, dtype=float)
        successes = np.array(self.success_counts, dtype=float)
        return np.where(attempts > 0, successes / np.maximum(attempts, 1.0), self.prior)


def update_estimator(est, action, outcomes):
    activated = set(action.active_channels())
    if set(outcomes) != activated:
        raise ValueError("outcomes for channels {} do not match activated channels {}".format(
            sorted(outcomes), sorted(activated)))
    attempts = list(est.attempt_counts)
    successes = list(est.success_counts)
    for m, gamma in outcomes.items():
        attempts[m - 1] += 1
        successes[m - 1] += int(gamma)
    return ChannelEstimator(tuple(attempts), tuple(successes), est.prior)
