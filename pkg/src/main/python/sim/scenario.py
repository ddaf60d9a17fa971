# SPDX-License-Identifier: GPL-2.0-or-later
import dataclasses
import logging
from dataclasses import dataclass

import numpy as np
import simpleeval

from constants import DEFAULT_USERS, DEFAULT_CHANNELS, DEFAULT_STATES, HOLDING_RANGE, RHO_RANGE, TAU_RANGE, \
    DEFAULT_HORIZON, DEFAULT_REPEATS
from mdp.composite import SystemConfig

RANGE_KEYS = ("holding_range", "rho_range", "tau_range")
PINNED_KEYS = ("holding", "rho", "tau")


@dataclass(frozen=True)
class ScenarioSpec:

    users: int = DEFAULT_USERS
    channels: int = DEFAULT_CHANNELS
    states: int = DEFAULT_STATES
    holding_range: tuple = HOLDING_RANGE
    rho_range: tuple = RHO_RANGE
    tau_range: tuple = TAU_RANGE
    horizon: int = DEFAULT_HORIZON
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    # pinned instance values override the sampled ones
    holding: tuple = None
    rho: tuple = None
    tau: tuple = None

    def __post_init__(self):
        for key in RANGE_KEYS:
            low, high = (float(x) for x in getattr(self, key))
            if low > high:
                raise ValueError("{} is empty: ({}, {})".format(key, low, high))
            object.__setattr__(self, key, (low, high))
        if not self.users > self.channels >= 1:
            raise ValueError("scenarios need N > M >= 1, got N={} M={}".format(self.users, self.channels))
        if self.states < 2:
            raise ValueError("state cap must be at least 2, got {}".format(self.states))
        if self.rho_range[0] <= 0.0 or self.rho_range[1] > 1.0:
            raise ValueError("rho_range must lie in (0, 1], got {}".format(self.rho_range))
        if self.tau_range[0] < 0.0:
            raise ValueError("tau_range must be nonnegative, got {}".format(self.tau_range))
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative, got {}".format(self.horizon))
        if self.repeats < 1:
            raise ValueError("at least one repeat is required, got {}".format(self.repeats))
        if self.holding is not None:
            holding = tuple(tuple(float(x) for x in h) for h in self.holding)
            if len(holding) != self.users or any(len(h) != self.states for h in holding):
                raise ValueError("pinned holding costs must be {} lists of {} values".format(self.users, self.states))
            object.__setattr__(self, "holding", holding)
        for key in ("rho", "tau"):
            value = getattr(self, key)
            if value is not None:
                value = tuple(float(x) for x in value)
                if len(value) != self.channels:
                    raise ValueError("pinned {} needs {} values, got {}".format(key, self.channels, len(value)))
                object.__setattr__(self, key, value)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def parse_scenario(text):
    """ key = value lines, values are literals read by simpleeval """
    fields = {f.name for f in dataclasses.fields(ScenarioSpec)}
    evaluator = simpleeval.EvalWithCompoundTypes(names={})
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, expr = line.partition("=")
        key = key.strip()
        if not sep or not expr.strip():
            raise ValueError("line {}: expected key = value, got {!r}".format(lineno, line))
        if key not in fields:
            raise ValueError("line {}: unknown scenario key {!r}".format(lineno, key))
        try:
            values[key] = evaluator.eval(expr.strip())
        except (simpleeval.InvalidExpression, SyntaxError) as e:
            raise ValueError("line {}: cannot read value of {}: {}".format(lineno, key, e))
    return values


def load_scenario(path=None, base=None, **overrides):
    values = dict(dataclasses.asdict(base or ScenarioSpec()))
    if path is not None:
        with open(path, "r") as inf:
            values.update(parse_scenario(inf.read()))
        logging.info("scenario read from {}".format(path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioSpec(**values)


def scenario_rng(seed, instance=0):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, instance)))


def trial_seed(seed, repeat):
    return np.random.SeedSequence(seed, spawn_key=(1, repeat))


def generate_scenario(spec, rng):
    """ Holding curves are sorted uniform draws, channel rates and costs are uniform """
    holding = np.sort(rng.uniform(*spec.holding_range, size=(spec.users, spec.states)), axis=1)
    rho = rng.uniform(*spec.rho_range, size=spec.channels)
    tau = rng.uniform(*spec.tau_range, size=spec.channels)
    return SystemConfig(
        holding=spec.holding if spec.holding is not None else tuple(map(tuple, holding)),
        rho=spec.rho if spec.rho is not None else tuple(rho),
        tau=spec.tau if spec.tau is not None else tuple(tau),
    )
