# SPDX-License-Identifier: GPL-2.0-or-later
import logging

from exact.evaluation import PolicyTable
from index.analytic import build_index_table
from index.ucb import ucb_bonuses
from mdp.composite import decode_state, encode_state
from scheduler.index_based import channel_walk, value_walk
from scheduler.kinds import MYOPIC_HOLDING, OPTIMAL
from scheduler.myopic import myopic_schedule


def schedule(kind, state, config, table=None, rho_hat=None, ucb=None, optimal=None, model=None):
    """ Assignment chosen by kind in state

    table: IndexTable for index kinds; rho_hat: channel estimates; ucb: UcbState for ":sigma" kinds;
    optimal and model: PolicyTable and joint model for opt
    """
    if kind.tag == OPTIMAL:
        if optimal is None or model is None:
            raise ValueError("opt needs a solved policy table and is only available offline")
        return optimal.assignment(model, encode_state(config, state))

    if rho_hat is None:
        rho_hat = config.rho
    if kind.is_myopic:
        if kind.tag == MYOPIC_HOLDING:
            q = [config.holding[n][s - 1] for n, s in enumerate(state.ages)]
        else:
            q = list(state.ages)
        return myopic_schedule(q, rho_hat)

    if table is None:
        raise ValueError("policy {} needs an index table".format(kind))
    bonus = None
    if kind.uses_ucb:
        if ucb is None:
            raise ValueError("policy {} needs exploration counts".format(kind))
        bonus = ucb_bonuses(ucb)
    omega = table.omega(state)
    if kind.channel_based:
        return channel_walk(omega, rho_hat, kind.energy_saving, bonus)
    return value_walk(omega, kind.energy_saving, bonus)


def induced_policy(kind, config, model, rho=None):
    """ The stationary policy a heuristic follows when the rates are known """
    if not kind.offline or kind.tag == OPTIMAL:
        raise ValueError("policy {} has no fixed induced policy for offline evaluation".format(kind))
    rho = config.rho if rho is None else rho
    table = build_index_table(config, rho) if kind.is_index else None
    assignments = [schedule(kind, decode_state(config, s), config, table, rho) for s in range(model.n_states)]
    logging.info("induced policy of {} over {} states".format(kind, model.n_states))
    return PolicyTable.from_assignments(model, assignments)
