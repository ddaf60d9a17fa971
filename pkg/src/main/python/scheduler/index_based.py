# SPDX-License-Identifier: GPL-2.0-or-later
import numpy as np

from mdp.composite import Assignment


def _prepare(omega, bonus):
    omega = np.array(omega, dtype=float)
    if bonus is not None:
        omega = omega + np.asarray(bonus, dtype=float)[:, None]
    # entries without an index never win
    return np.where(np.isnan(omega), -np.inf, omega)


def value_walk(omega, energy_saving=False, bonus=None):
    """ Walks all (m, n) entries by descending value, ties to lower m then lower n """
    omega = _prepare(omega, bonus)
    n_channels, n_users = omega.shape
    ms, ns = np.meshgrid(np.arange(n_channels), np.arange(n_users), indexing="ij")
    order = np.lexsort((ns.ravel(), ms.ravel(), -omega.ravel()))
    pairs, used_channels, used_users = [], set(), set()
    for flat in order:
        m, n = divmod(int(flat), n_users)
        if len(used_channels) == n_channels or len(used_users) == n_users:
            break
        if m in used_channels or n in used_users:
            continue
        if energy_saving and not omega[m, n] > 0:
            continue
        pairs.append((n, m + 1))
        used_channels.add(m)
        used_users.add(n)
    return Assignment.from_pairs(n_users, pairs)


def channel_walk(omega, rho_hat, energy_saving=False, bonus=None):
    """ Channels by descending estimated success each take their best free user """
    omega = _prepare(omega, bonus)
    n_channels, n_users = omega.shape
    pairs, used_users = [], set()
    for m in sorted(range(n_channels), key=lambda c: (-rho_hat[c], c)):
        free = [n for n in range(n_users) if n not in used_users]
        if not free:
            break
        best = max(free, key=lambda n: (omega[m, n], -n))
        if energy_saving and not omega[m, best] > 0:
            continue
        pairs.append((best, m + 1))
        used_users.add(best)
    return Assignment.from_pairs(n_users, pairs)


def idx_value_schedule(state, table, energy_saving=False, bonus=None):
    return value_walk(table.omega(state), energy_saving, bonus)


def idx_channel_schedule(state, table, rho_hat, energy_saving=False, bonus=None):
    return channel_walk(table.omega(state), rho_hat, energy_saving, bonus)
