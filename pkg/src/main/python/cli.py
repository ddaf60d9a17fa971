# SPDX-License-Identifier: GPL-2.0-or-later
import argparse
import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from constants import STATE_LIMIT, OFFLINE_USERS, OFFLINE_CHANNELS, SWEEP_SIZES, EXIT_OK, EXIT_VALIDATION, \
    EXIT_SIZE, EXIT_NUMERICAL
from exact.evaluation import EvaluationError, evaluate_policy
from exact.oracles import index_bisection, lower_envelope
from exact.policy_iteration import policy_iteration
from index.analytic import build_index_table
from learning.qlearner import LearnerBank
from learning.schedule import make_schedule
from mdp.arm import DegenerateGapError
from mdp.composite import SizeLimitError, build_joint_model
from scheduler.dispatch import induced_policy
from scheduler.kinds import OFFLINE_KINDS, ONLINE_KINDS, OPTIMAL, parse_kinds
from sim.environment import ChannelStreams
from sim.runner import run_suite
from sim.scenario import ScenarioSpec, generate_scenario, load_scenario, scenario_rng
from util import app_version, init_logger, safe_filename, write_frame, write_json

OFFLINE_COLUMNS = ["scenario", "policy", "gain", "ratio"]
INDEX_COLUMNS = ["m", "n", "s", "nu", "nu_bisection", "degenerate"]
ENVELOPE_COLUMNS = ["m", "n", "lambda", "cost", "theta"]
SWEEP_COLUMNS = ["users", "channels", "policy", "mean", "std"]
LEARN_COLUMNS = ["sweep", "m", "n", "theta", "lambda", "step_count", "nu"]


@dataclass
class RunManifest:
    command: str
    scenario: ScenarioSpec
    policies: list
    out: str
    seed: int
    workers: int = 1
    scenario_path: str = None
    sizes: tuple = SWEEP_SIZES
    max_states: int = STATE_LIMIT
    steps: object = None
    sweeps: int = 10000
    every: int = 1000
    points: int = 201

    def validate(self):
        if self.scenario_path is not None and not os.path.isfile(self.scenario_path):
            raise ValueError("scenario file {} does not exist".format(self.scenario_path))
        os.makedirs(self.out, exist_ok=True)
        if not os.access(self.out, os.W_OK):
            raise ValueError("output directory {} is not writable".format(self.out))
        if self.workers < 1:
            raise ValueError("need at least one worker, got {}".format(self.workers))
        if self.sweeps < 0 or self.every < 1 or self.points < 2:
            raise ValueError("sweeps must be >= 0, every >= 1 and points >= 2")
        return self


def _online_kinds(policies):
    for kind in policies:
        if kind.tag == OPTIMAL:
            raise ValueError("opt is only available in offline evaluation")
    return policies


def cmd_offline(manifest):
    kinds = [k for k in manifest.policies if k.tag != OPTIMAL]
    for kind in kinds:
        if not kind.offline:
            raise ValueError("policy {} is online only".format(kind))
    spec = manifest.scenario
    rows = []
    for instance in range(spec.repeats):
        config = generate_scenario(spec, scenario_rng(spec.seed, instance))
        model = build_joint_model(config, max_states=manifest.max_states)
        _, optimum = policy_iteration(model)
        rows.append((instance, OPTIMAL, optimum, 1.0))
        for kind in kinds:
            gain = evaluate_policy(model, induced_policy(kind, config, model)).gain
            rows.append((instance, str(kind), gain, gain / optimum if optimum else np.nan))
            logging.info("scenario {} {}: gain {:.6f} (optimum {:.6f})".format(instance, kind, gain, optimum))
        write_json(config.to_dict(), manifest.out, "scenario_{}.json".format(instance))
    write_frame(pd.DataFrame(rows, columns=OFFLINE_COLUMNS), manifest.out, "offline.csv")
    return EXIT_OK


def cmd_online(manifest):
    kinds = _online_kinds(manifest.policies)
    result = run_suite(manifest.scenario, kinds, workers=manifest.workers, steps=manifest.steps)
    trials = os.path.join(manifest.out, "trials")
    for kind in result.kinds:
        for r, record in enumerate(result.records[str(kind)]):
            write_frame(record.to_frame(), trials, "{}_r{}.csv".format(safe_filename(str(kind)), r))
    write_json(result.summary(), manifest.out, "summary.json")
    write_json(result.config.to_dict(), manifest.out, "scenario.json")
    write_frame(result.to_frame(), manifest.out, "suite.csv")
    return EXIT_OK


def cmd_index(manifest):
    config = generate_scenario(manifest.scenario, scenario_rng(manifest.scenario.seed))
    table = build_index_table(config, config.rho, strict=False)
    flat = set(table.degenerate)
    rows, envelope = [], []
    for m in range(config.n_channels):
        for n in range(config.n_users):
            spec = config.arm_spec(m, n)
            for s in range(1, config.caps[n] + 1):
                bisection = np.nan if (m + 1, n + 1, s) in flat else index_bisection(spec, s)
                rows.append((m + 1, n + 1, s, table.value(m, n, s), bisection, (m + 1, n + 1, s) in flat))
            curve = table.values[m, n, :config.caps[n]]
            finite = curve[np.isfinite(curve)]
            lo, hi = (finite.min(), finite.max()) if len(finite) else (0.0, 0.0)
            lambdas = np.linspace(-spec.tx_cost + lo - 10.0, hi + 10.0, manifest.points)
            costs, thetas = lower_envelope(spec, lambdas)
            envelope.extend((m + 1, n + 1, lam, cost, theta) for lam, cost, theta in zip(lambdas, costs, thetas))
    if flat:
        logging.warning("{} degenerate index entries: {}".format(len(flat), sorted(flat)))
    write_frame(pd.DataFrame(rows, columns=INDEX_COLUMNS), manifest.out, "index_table.csv")
    write_frame(pd.DataFrame(envelope, columns=ENVELOPE_COLUMNS), manifest.out, "envelope.csv")
    write_json(config.to_dict(), manifest.out, "scenario.json")
    return EXIT_OK


def cmd_sweep(manifest):
    kinds = _online_kinds(manifest.policies)
    rows = []
    for users in manifest.sizes:
        spec = manifest.scenario.replace(users=users, channels=users // 2, holding=None, rho=None, tau=None)
        result = run_suite(spec, kinds, workers=manifest.workers, steps=manifest.steps)
        for _, row in result.to_frame().iterrows():
            rows.append((spec.users, spec.channels, row["policy"], row["mean"], row["std"]))
    write_frame(pd.DataFrame(rows, columns=SWEEP_COLUMNS), manifest.out, "sweep.csv")
    return EXIT_OK


def cmd_learn(manifest):
    """ Index learning with every channel observed each sweep, snapshots next to the analytic index """
    config = generate_scenario(manifest.scenario, scenario_rng(manifest.scenario.seed))
    analytic = build_index_table(config, config.rho, strict=False)
    bank = LearnerBank(config)
    streams = ChannelStreams(manifest.seed, config.n_channels)
    channels = list(range(1, config.n_channels + 1))
    steps = manifest.steps or make_schedule()
    frames = []
    for sweep in range(1, manifest.sweeps + 1):
        outcomes = {m: streams.draw(m, config.rho[m - 1]) for m in channels}
        bank.sweep(channels, outcomes, steps)
        if sweep % manifest.every == 0 or sweep == manifest.sweeps:
            frame = bank.to_frame()
            frame.insert(0, "sweep", sweep)
            frame["nu"] = analytic.values[bank.channel, bank.user, bank.theta - 1]
            frames.append(frame)
    out = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=LEARN_COLUMNS)
    write_frame(out[LEARN_COLUMNS], manifest.out, "learning.csv")
    return EXIT_OK


COMMANDS = {
    "offline": cmd_offline,
    "online": cmd_online,
    "index": cmd_index,
    "sweep": cmd_sweep,
    "learn": cmd_learn,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="aoisched", description="Whittle index scheduling of AoI uplinks")
    parser.add_argument("--version", action="version", version=app_version())
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="key = value scenario file")
    common.add_argument("--policies", help="comma separated policy tags, idx kinds accept a :sigma suffix")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--repeats", type=int)
    common.add_argument("--horizon", type=int)
    common.add_argument("--users", type=int)
    common.add_argument("--channels", type=int)
    common.add_argument("--states", type=int)
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--log-level", default="INFO")
    common.add_argument("--schedule", default="default", help="step size preset: default or tracking")
    common.add_argument("--schedule-q", help="Q step size as an expression in k, e.g. 1/k")
    common.add_argument("--schedule-lambda", help="lambda step size as an expression in k, e.g. 0.1/k**0.6")

    sub = parser.add_subparsers(dest="command", required=True)
    offline = sub.add_parser("offline", parents=[common], help="exact gains of every policy by policy iteration")
    offline.add_argument("--max-states", type=int, default=STATE_LIMIT)
    sub.add_parser("online", parents=[common], help="simulated trajectories with rate estimation")
    index = sub.add_parser("index", parents=[common], help="index table and cost envelope")
    index.add_argument("--points", type=int, default=201, help="lambda grid size of the envelope")
    sweep = sub.add_parser("sweep", parents=[common], help="online suites over growing systems")
    sweep.add_argument("--sizes", default=",".join(str(x) for x in SWEEP_SIZES), help="user counts, M = N/2")
    learn = sub.add_parser("learn", parents=[common], help="index learning convergence data")
    learn.add_argument("--sweeps", type=int, default=10000)
    learn.add_argument("--every", type=int, default=1000)
    return parser


def manifest_from_args(args):
    base = ScenarioSpec()
    default_policies = ",".join(ONLINE_KINDS)
    if args.command == "offline":
        base = ScenarioSpec(users=OFFLINE_USERS, channels=OFFLINE_CHANNELS, repeats=1)
        default_policies = ",".join((OPTIMAL,) + OFFLINE_KINDS)
    elif args.command == "sweep":
        default_policies = "idx-v-r,idx-c-r,m-S,m-T"
    scenario = load_scenario(args.scenario, base=base, users=args.users, channels=args.channels,
                             states=args.states, horizon=args.horizon, repeats=args.repeats, seed=args.seed)
    manifest = RunManifest(
        command=args.command,
        scenario=scenario,
        policies=parse_kinds(args.policies or default_policies),
        out=args.out,
        seed=scenario.seed,
        workers=args.workers,
        scenario_path=args.scenario,
        steps=make_schedule(args.schedule, args.schedule_q, args.schedule_lambda),
    )
    if args.command == "offline":
        manifest.max_states = args.max_states
    elif args.command == "index":
        manifest.points = args.points
    elif args.command == "sweep":
        try:
            manifest.sizes = tuple(int(x) for x in args.sizes.split(",") if x.strip())
        except ValueError:
            raise ValueError("bad size list {!r}".format(args.sizes))
    elif args.command == "learn":
        manifest.sweeps, manifest.every = args.sweeps, args.every
    return manifest.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    init_logger(args.out, getattr(logging, args.log_level.upper(), logging.INFO))
    try:
        manifest = manifest_from_args(args)
        return COMMANDS[manifest.command](manifest)
    except SizeLimitError as e:
        logging.error(str(e))
        return EXIT_SIZE
    except (EvaluationError, DegenerateGapError, np.linalg.LinAlgError) as e:
        logging.error(str(e))
        return EXIT_NUMERICAL
    except (ValueError, OSError) as e:
        logging.error(str(e))
        return EXIT_VALIDATION
