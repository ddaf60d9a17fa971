# SPDX-License-Identifier: GPL-2.0-or-later
import logging
import math
from dataclasses import dataclass

import simpleeval

PROBE_POINTS = (10.0, 1000.0, 100000.0)


@dataclass(frozen=True)
class PowerStep:
    """ eta[k] = scale / k**power """

    scale: float
    power: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("step size scale must be positive, got {}".format(self.scale))
        # sum eta diverges iff power <= 1, sum eta^2 converges iff power > 1/2
        if not 0.5 < self.power <= 1.0:
            raise ValueError("step size power {} is outside (0.5, 1]: steps must be non-summable "
                             "and square-summable".format(self.power))

    def __call__(self, k):
        return self.scale / k ** self.power

    def __str__(self):
        return "{:g}/k^{:g}".format(self.scale, self.power)


@dataclass(frozen=True)
class StepSchedule:

    eta_q: PowerStep
    eta_lambda: PowerStep
    name: str = "custom"

    def __post_init__(self):
        if self.eta_q.power > self.eta_lambda.power:
            timescale = "lambda is the fast component"
        elif self.eta_q.power < self.eta_lambda.power:
            timescale = "Q is the fast component"
        else:
            timescale = "both share one timescale"
        logging.info("schedule {}: eta_q={} eta_lambda={}, {}".format(self.name, self.eta_q, self.eta_lambda, timescale))

    def __call__(self, k):
        return self.eta_q(k), self.eta_lambda(k)


def default_schedule(scale_q=1.0, scale_lambda=0.1):
    return StepSchedule(PowerStep(scale_q, 1.0), PowerStep(scale_lambda, 0.6), "default")


def tracking_schedule(scale_q=1.0, scale_lambda=5.0):
    """ Q on the fast timescale, lambda on the slow one """
    return StepSchedule(PowerStep(scale_q, 0.6), PowerStep(scale_lambda, 1.0), "tracking")


SCHEDULES = {
    "default": default_schedule,
    "tracking": tracking_schedule,
}


def parse_step(expression):
    """ Reads an expression in k such as "0.1/k**0.6", which must be of the form c/k^p """
    def at(k):
        try:
            value = simpleeval.simple_eval(expression, names={"k": k}, functions={"sqrt": math.sqrt, "log": math.log})
        except (simpleeval.InvalidExpression, SyntaxError, ZeroDivisionError, TypeError) as e:
            raise ValueError("cannot evaluate step size {!r}: {}".format(expression, e))
        if not isinstance(value, (int, float)) or not value > 0:
            raise ValueError("step size {!r} is not positive at k={}".format(expression, k))
        return float(value)

    k1, k2, k3 = PROBE_POINTS
    v1, v2, v3 = at(k1), at(k2), at(k3)
    power = math.log(v1 / v2) / math.log(k2 / k1)
    scale = v1 * k1 ** power
    if not math.isclose(scale / k3 ** power, v3, rel_tol=1e-6):
        raise ValueError("step size {!r} is not of the form c/k^p".format(expression))
    return PowerStep(round(scale, 12), round(power, 12))


def make_schedule(name="default", eta_q=None, eta_lambda=None):
    if name not in SCHEDULES:
        raise ValueError("unknown schedule {!r}, expected one of {}".format(name, ", ".join(SCHEDULES)))
    base = SCHEDULES[name]()
    if eta_q is None and eta_lambda is None:
        return base
    return StepSchedule(parse_step(eta_q) if eta_q else base.eta_q,
                        parse_step(eta_lambda) if eta_lambda else base.eta_lambda)
