"""Command-line front end: scenario files in, CSV/JSON records out.

Every subcommand reads one scenario document (--config), takes all of its
randomness from a single --seed, and writes its records under --out with
stable headers, so identical invocations produce byte-identical files.
Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.
Non-convergence of the iterative dynamics is reported as data, not as a
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import DegenerateGameError, ScenarioError, SpectrumGameError
from .experiments import channel_ensemble_study, region_comparison, value_of_knowledge
from .learning import empirical_joint_distribution, run_repeated_game, value_of_learning
from .matrix_games import (
    is_correlated_equilibrium,
    JointDistribution,
    mixed_nash_2x2,
    optimize_ce,
    pure_nash,
    stackelberg_finite,
    strictly_dominant_action,
)
from .power_games import iterative_water_filling, stackelberg_leader_search, weighted_sum_optimize
from .scenario import load_scenario
from .spectrum import PowerBudget, water_fill

PROFILE_TOKENS = {
    "priv": "private",
    "private": "private",
    "heter": "heterogeneous_leader",
    "heterogeneous_leader": "heterogeneous_leader",
    "comp": "complete",
    "complete": "complete",
}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _py(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _emit(out_dir: Path, base: str, fmt: str, header, rows) -> Path:
    """Write one record table as CSV or JSON with deterministic formatting."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{base}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    else:
        path = out_dir / f"{base}.json"
        records = [{key: _py(v) for key, v in zip(header, row)} for row in rows]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return path


def _region_rows(samples):
    return [
        (s.method, s.params[0], s.params[1], float(s.rates[0]), float(s.rates[1]))
        for s in samples
    ]


def _distribution_rows(game, dist: JointDistribution):
    flat = dist.probs.reshape(-1)
    return [
        (game.label(profile), float(flat[i]))
        for i, profile in enumerate(game.profiles())
    ]


def _cmd_waterfill(doc, args, out_dir):
    scen = doc.power_scenario()
    user = args.user - 1
    if not 0 <= user < scen.user_count:
        raise ScenarioError("--user", f"user must be in 1..{scen.user_count}")
    row = water_fill(
        scen.channels.gain2[user, user],
        scen.noise.psd[user],
        scen.budgets.budget[user],
        scen.grid,
    )
    rate = scen.grid.bin_width * float(
        np.log2(1.0 + row * scen.channels.gain2[user, user] / scen.noise.psd[user]).sum()
    )
    rows = [(k, float(row[k])) for k in range(scen.grid.bin_count)]
    _emit(out_dir, doc.output_base("allocation"), args.format, ("bin", "psd"), rows)
    print(f"user {args.user} single-user rate {rate!r}")
    return 0


def _cmd_iw(doc, args, out_dir):
    scen = doc.power_scenario()
    res = iterative_water_filling(scen.channels, scen.noise, scen.budgets, scen.grid)
    header = ("bin",) + tuple(f"psd_{n + 1}" for n in range(scen.user_count))
    rows = [
        (k,) + tuple(float(res.allocation.psd[n, k]) for n in range(scen.user_count))
        for k in range(scen.grid.bin_count)
    ]
    _emit(out_dir, doc.output_base("allocation"), args.format, header, rows)
    rates = ", ".join(repr(float(r)) for r in res.rates)
    print(f"converged={res.converged} iterations={res.iterations} residual={res.residual!r}")
    print(f"rates: {rates}")
    return 0


def _cmd_stackelberg(doc, args, out_dir):
    scen = doc.power_scenario()
    leader = args.leader - 1
    res = stackelberg_leader_search(
        leader, scen.channels, scen.noise, scen.budgets, scen.grid,
        levels=args.levels, refine_rounds=args.refine,
    )
    psd = np.zeros((2, scen.grid.bin_count))
    psd[res.leader] = res.leader_allocation
    psd[1 - res.leader] = res.follower_allocation
    header = ("bin", "psd_1", "psd_2")
    rows = [(k, float(psd[0, k]), float(psd[1, k])) for k in range(scen.grid.bin_count)]
    _emit(out_dir, doc.output_base("allocation"), args.format, header, rows)
    print(
        f"leader={args.leader} rates=({res.rates[0]!r}, {res.rates[1]!r}) "
        f"candidates={res.candidates_evaluated}"
    )
    return 0


def _cmd_pareto(doc, args, out_dir):
    scen = doc.power_scenario()
    sweeps = doc.sweeps()
    weights = sweeps.get("weights", [[1.0, 1.0]])
    levels = sweeps.get("levels", 10)
    samples = [
        weighted_sum_optimize(w, scen.channels, scen.noise, scen.budgets, scen.grid, levels=levels)
        for w in weights
    ]
    _emit(
        out_dir, doc.output_base("region"), args.format,
        ("method", "param1", "param2", "R_1", "R_2"), _region_rows(samples),
    )
    for s in samples:
        print(f"weights={s.params} rates=({s.rates[0]!r}, {s.rates[1]!r})")
    return 0


def _cmd_region(doc, args, out_dir):
    scen = doc.power_scenario()
    sweeps = doc.sweeps()
    budget_pairs = sweeps.get("budget_pairs", [list(scen.budgets.budget)])
    weights = sweeps.get("weights", [[1.0, 1.0]])
    levels = sweeps.get("levels", 10)
    table = region_comparison(scen, budget_pairs, weights, levels=levels)
    _emit(
        out_dir, doc.output_base("region"), args.format,
        ("method", "param1", "param2", "R_1", "R_2"), _region_rows(table),
    )
    print(f"{len(table)} region samples written")
    return 0


def _cmd_matrix_solve(doc, args, out_dir):
    game = doc.finite_game()
    rows = []
    nash_profiles = pure_nash(game)
    nash_text = ", ".join(f"({game.label(p).replace('/', ', ')})" for p in nash_profiles)
    print(f"pure NE: {nash_text if nash_profiles else 'none'}")
    for p in nash_profiles:
        values = game.payoff_vector(p)
        rows.append(("pure_nash", game.label(p), float(values[0]), float(values[1])))
    for player in range(game.player_count):
        action = strictly_dominant_action(game, player)
        label = "none" if action is None else game.action_labels[player][action]
        print(f"dominant action player {player + 1}: {label}")
        rows.append((f"dominant_{player + 1}", label, "", ""))
    try:
        s1, s2, utilities = mixed_nash_2x2(game)
        print(
            f"mixed NE: p1={s1.probs[0]!r} p2={s2.probs[0]!r} "
            f"value=({utilities[0]!r}, {utilities[1]!r})"
        )
        rows.append(("mixed_nash", f"{s1.probs[0]!r}/{s2.probs[0]!r}",
                     float(utilities[0]), float(utilities[1])))
    except (DegenerateGameError, ValueError):
        print("mixed NE: none (degenerate)")
        rows.append(("mixed_nash", "none", "", ""))
    for leader in range(2):
        profile, utilities = stackelberg_finite(game, leader)
        print(
            f"stackelberg leader {leader + 1}: ({game.label(profile).replace('/', ', ')}) "
            f"value=({utilities[0]!r}, {utilities[1]!r})"
        )
        rows.append((f"stackelberg_{leader + 1}", game.label(profile),
                     float(utilities[0]), float(utilities[1])))
    _emit(out_dir, doc.output_base("solution"), args.format,
          ("record", "detail", "value_1", "value_2"), rows)
    return 0


def _cmd_ce_check(doc, args, out_dir):
    game = doc.finite_game()
    section = doc.ce_section()
    if "distribution" not in section:
        raise ScenarioError("ce.distribution", "ce check needs a distribution in the config")
    flat = np.asarray(section["distribution"], dtype=float)
    if flat.size != int(np.prod(game.action_counts)):
        raise ScenarioError("ce.distribution", f"expected {int(np.prod(game.action_counts))} entries")
    try:
        dist = JointDistribution.from_flat(flat, game.action_counts)
    except ValueError as exc:
        raise ScenarioError("ce.distribution", str(exc))
    ok, violation = is_correlated_equilibrium(game, dist, tol=args.tol)
    values = dist.expected_utilities(game)
    _emit(out_dir, doc.output_base("solution"), args.format,
          ("record", "detail", "value_1", "value_2"),
          [("ce_check", "pass" if ok else "fail", float(violation), ""),
           ("ce_values", "", float(values[0]), float(values[1]))])
    print(f"correlated equilibrium: {ok} (max violation {violation!r})")
    print(f"expected utilities: ({values[0]!r}, {values[1]!r})")
    return 0


def _cmd_ce_optimize(doc, args, out_dir):
    game = doc.finite_game()
    weights = doc.ce_section().get("weights")
    dist, value = optimize_ce(game, weights)
    _emit(out_dir, doc.output_base("distribution"), args.format,
          ("profile", "prob"), _distribution_rows(game, dist))
    print(f"optimal CE value {value!r}")
    return 0


def _cmd_learn(doc, args, out_dir):
    game = doc.finite_game()
    learners = doc.learners(game)
    rounds = args.rounds if args.rounds is not None else doc.rounds()
    trace = run_repeated_game(game, learners, rounds, args.seed)
    n = game.player_count
    header = ("t",) + tuple(f"action_{p + 1}" for p in range(n)) + tuple(f"u_{p + 1}" for p in range(n))
    rows = [
        (t,)
        + tuple(int(a) for a in trace.actions[t])
        + tuple(float(u) for u in trace.utilities[t])
        for t in range(trace.rounds)
    ]
    _emit(out_dir, doc.output_base("trace"), args.format, header, rows)
    dist = empirical_joint_distribution(trace)
    _emit(out_dir, doc.output_base("distribution"), args.format,
          ("profile", "prob"), _distribution_rows(game, dist))
    averages = value_of_learning(trace, (0, trace.rounds))
    print("time-average utilities: " + ", ".join(repr(float(v)) for v in averages))
    return 0


def _cmd_vok(doc, args, out_dir):
    if args.profile is not None:
        tokens = [t.strip() for t in args.profile.split(",")]
        try:
            levels = [PROFILE_TOKENS[t] for t in tokens]
        except KeyError as exc:
            raise ScenarioError("--profile", f"unknown knowledge token {exc.args[0]!r}")
        profile = doc.knowledge_profile(levels)
    else:
        profile = doc.knowledge_profile()
    if doc.kind == "matrix_game" or "actions" in doc.raw:
        scenario = doc.finite_game()
    else:
        scenario = doc.power_scenario()
    utilities = value_of_knowledge(scenario, profile, start_profile=doc.start_profile())
    rows = [(n + 1, profile.levels[n], float(u)) for n, u in enumerate(utilities)]
    _emit(out_dir, doc.output_base("solution"), args.format, ("user", "knowledge", "utility"), rows)
    print("utilities: (" + ", ".join(repr(float(u)) for u in utilities) + ")")
    return 0


def _cmd_ensemble(doc, args, out_dir):
    scen_grid = doc.grid()
    section = doc.ensemble_section()
    realizations = args.realizations if args.realizations is not None else section.get("realizations")
    if realizations is None:
        raise ScenarioError("ensemble.realizations", "ensemble needs a realization count")
    taps = section.get("taps", doc.raw["channels"].get("taps", 4))
    budgets = PowerBudget(np.asarray(doc.raw["budgets"], dtype=float))
    report = channel_ensemble_study(int(realizations), args.seed, scen_grid, budgets, tap_count=taps)
    rows = [
        (i, float(report.ratios[i, 0]), float(report.ratios[i, 1]))
        for i in range(report.realizations)
    ]
    rows.append(("mean", float(report.means[0]), float(report.means[1])))
    _emit(out_dir, doc.output_base("ensemble"), args.format,
          ("realization", "ratio_1", "ratio_2"), rows)
    print(
        f"realizations={report.realizations} skipped={report.skipped} "
        f"mean ratios=({report.means[0]!r}, {report.means[1]!r})"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario document (JSON)")
    common.add_argument("--seed", type=int, default=None, help="master seed; overrides the config")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="specgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("waterfill", parents=[common], help="single-user water-filling")
    p.add_argument("--user", type=int, default=1, help="1-based user index")
    sub.add_parser("iw", parents=[common], help="iterative water-filling equilibrium")
    p = sub.add_parser("stackelberg", parents=[common], help="leader-commitment search")
    p.add_argument("--leader", type=int, default=1, help="1-based leader index")
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--refine", type=int, default=40)
    sub.add_parser("pareto", parents=[common], help="weighted rate-sum oracle points")
    sub.add_parser("region", parents=[common], help="joined rate-region table")
    p = sub.add_parser("matrix", parents=[common], help="finite-game analysis")
    p.add_argument("mode", choices=("solve",))
    p = sub.add_parser("ce", parents=[common], help="correlated equilibrium tools")
    p.add_argument("mode", choices=("check", "optimize"))
    p.add_argument("--tol", type=float, default=1e-9)
    p = sub.add_parser("learn", parents=[common], help="repeated-game learning run")
    p.add_argument("--rounds", type=int, default=None)
    p = sub.add_parser("vok", parents=[common], help="value of a knowledge profile")
    p.add_argument("--profile", default=None, help="comma list: priv|heter|comp per user")
    p = sub.add_parser("ensemble", parents=[common], help="random-channel leadership study")
    p.add_argument("--realizations", type=int, default=None)
    return parser


_DISPATCH = {
    "waterfill": _cmd_waterfill,
    "iw": _cmd_iw,
    "stackelberg": _cmd_stackelberg,
    "pareto": _cmd_pareto,
    "region": _cmd_region,
    "learn": _cmd_learn,
    "vok": _cmd_vok,
    "ensemble": _cmd_ensemble,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; fold the
        # latter into the validation exit code
        return 0 if exc.code in (0, None) else 1
    try:
        doc = load_scenario(args.config)
        if args.seed is None:
            args.seed = doc.seed(default=0)
        if args.seed < 0:
            raise ScenarioError("--seed", "seed must be nonnegative")
        out_dir = Path(args.out)
        if args.command == "matrix":
            return _cmd_matrix_solve(doc, args, out_dir)
        if args.command == "ce":
            if args.mode == "check":
                return _cmd_ce_check(doc, args, out_dir)
            return _cmd_ce_optimize(doc, args, out_dir)
        return _DISPATCH[args.command](doc, args, out_dir)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (SpectrumGameError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
