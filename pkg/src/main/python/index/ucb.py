# SPDX-License-Identifier: GPL-2.0-or-later
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UcbState:
    """ Epoch counter k and per-channel use counts N_m[k] for the confidence bonus """

    epoch: float
    tx_counts: tuple
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "tx_counts", tuple(int(x) for x in self.tx_counts))
        if any(x < 0 for x in self.tx_counts):
            raise ValueError("transmission counts must be nonnegative: {}".format(self.tx_counts))
        if self.epoch < 1:
            raise ValueError("epoch must be at least 1, got {}".format(self.epoch))

    @classmethod
    def fresh(cls, n_channels, sigma):
        return cls(1, (0,) * n_channels, float(sigma))

    def record(self, assignment):
        """ State for the next epoch after the channels of assignment were used """
        counts = list(self.tx_counts)
        for m in assignment.active_channels():
            counts[m - 1] += 1
        return UcbState(self.epoch + 1, tuple(counts), self.sigma)


def ucb_bonus(ucb, m):
    if ucb.sigma == 0:
        return 0.0
    uses = ucb.tx_counts[m]
    if uses == 0:
        # unexplored channels dominate, or are shunned when sigma < 0
        return math.copysign(math.inf, ucb.sigma)
    return ucb.sigma * math.sqrt(math.log(ucb.epoch) / uses)


def ucb_augment(nu, ucb, m):
    """ nu + sigma * sqrt(ln k / N_m) for 0-based channel m """
    return nu + ucb_bonus(ucb, m)


def ucb_bonuses(ucb):
    return np.array([ucb_bonus(ucb, m) for m in range(len(ucb.tx_counts))])
