# SPDX-License-Identifier: GPL-2.0-or-later
from mdp.composite import Assignment


def myopic_schedule(q, rho_hat):
    """ Top users by q take the channels in order of estimated success, ties to the lower id """
    users = sorted(range(len(q)), key=lambda n: (-q[n], n))
    channels = sorted(range(len(rho_hat)), key=lambda m: (-rho_hat[m], m))
    return Assignment.from_pairs(len(q), [(n, m + 1) for n, m in zip(users, channels)])
