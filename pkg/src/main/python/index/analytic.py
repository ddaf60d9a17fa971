# SPDX-License-Identifier: GPL-2.0-or-later
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from constants import DEGENERATE_GAP
from mdp.arm import DegenerateGapError, stationary_closed_form, stationary_exact

TABLE_COLUMNS = ["m", "n", "s", "nu"]


def _moments(spec, theta):
    cap = spec.state_cap
    if theta <= cap:
        dist = stationary_closed_form(theta, spec.success_prob, cap)
        return dist.expect(spec.holding), dist.mass_from(theta)
    # theta = S+1 never transmits and sits at the cap
    return stationary_exact(theta, spec.success_prob, cap).expect(spec.holding), 0.0


def analytic_index(spec, theta):
    if not 1 <= theta <= spec.state_cap:
        raise ValueError("index is defined for thresholds 1..{}, got {}".format(spec.state_cap, theta))
    holding_low, active_low = _moments(spec, theta)
    holding_high, active_high = _moments(spec, theta + 1)
    gap = active_low - active_high
    if gap <= DEGENERATE_GAP:
        raise DegenerateGapError(theta)
    return (holding_high - holding_low) / gap - spec.tx_cost


def index_curve(spec):
    """ nu(1..S) of one arm """
    moments = np.array([_moments(spec, theta) for theta in range(1, spec.state_cap + 2)])
    gaps = -np.diff(moments[:, 1])
    flat = np.flatnonzero(gaps <= DEGENERATE_GAP)
    if len(flat):
        raise DegenerateGapError(int(flat[0]) + 1)
    return np.diff(moments[:, 0]) / gaps - spec.tx_cost


@dataclass(frozen=True, eq=False)
class IndexTable:
    """ values[m, n, s-1] for 0-based channel m and user n, NaN beyond each user's cap or where degenerate """

    values: np.ndarray
    caps: tuple
    degenerate: tuple = ()

    @property
    def n_channels(self):
        return self.values.shape[0]

    @property
    def n_users(self):
        return self.values.shape[1]

    def value(self, m, n, s):
        return float(self.values[m, n, s - 1])

    def omega(self, state):
        """ M x N matrix of the indices at the current ages """
        ages = np.asarray(state.ages) - 1
        return self.values[:, np.arange(self.n_users), ages]

    def to_frame(self):
        rows = []
        for m in range(self.n_channels):
            for n in range(self.n_users):
                for s in range(1, self.caps[n] + 1):
                    rows.append((m + 1, n + 1, s, self.values[m, n, s - 1]))
        return pd.DataFrame(rows, columns=TABLE_COLUMNS)

    @classmethod
    def from_frame(cls, frame):
        n_channels, n_users = int(frame["m"].max()), int(frame["n"].max())
        caps = tuple(int(frame.loc[frame["n"] == n + 1, "s"].max()) for n in range(n_users))
        values = np.full((n_channels, n_users, max(caps)), np.nan)
        values[frame["m"].to_numpy() - 1, frame["n"].to_numpy() - 1, frame["s"].to_numpy() - 1] = frame["nu"].to_numpy()
        return cls(values, caps)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def read_csv(cls, path):
        return cls.from_frame(pd.read_csv(path))


def build_index_table(config, rho_hat, strict=True):
    """ Analytic indices of every (channel, user) arm under the estimated success rates """
    rho_hat = np.asarray(rho_hat, dtype=float)
    if rho_hat.shape != (config.n_channels,):
        raise ValueError("expected {} rate estimates, got {}".format(config.n_channels, rho_hat.shape))
    if np.any(rho_hat <= 0) or np.any(rho_hat > 1):
        raise ValueError("rate estimates must lie in (0, 1], got {}".format(rho_hat))
    caps = config.caps
    values = np.full((config.n_channels, config.n_users, max(caps)), np.nan)
    degenerate = []
    for m in range(config.n_channels):
        for n in range(config.n_users):
            spec = config.arm_spec(m, n, rho=rho_hat[m])
            try:
                values[m, n, :caps[n]] = index_curve(spec)
            except DegenerateGapError as e:
                if strict:
                    raise DegenerateGapError(e.theta, channel=m + 1, user=n + 1)
                # fill entry by entry so only the flat thresholds are lost
                for theta in range(1, caps[n] + 1):
                    try:
                        values[m, n, theta - 1] = analytic_index(spec, theta)
                    except DegenerateGapError:
                        logging.warning("degenerate index at channel={} user={} s={}".format(m + 1, n + 1, theta))
                        degenerate.append((m + 1, n + 1, theta))
    return IndexTable(values, caps, tuple(degenerate))
