"""Command-line entry point.

Every subcommand prints one JSON report to stdout::

    {"command": [argv...], "config": {...}, "payload": {...},
     "warnings": [...], "exit_code": 0, "wall_time_s": 0.01}

``payload`` depends only on the inputs and the seed. Exit codes: 0 success,
1 solver did not converge (report still printed), 2 missing file, 3 schema
error, 4 invariant violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .casestudy import (
    DEFAULT_COALITIONS,
    FIXTURE_DIR,
    CounterfactualSpec,
    build_scenario,
    counterfactual_run,
    estimate_resilience,
    load_price_csv,
    published_estimates,
    two_stage_decision,
    yearly_share_series,
)
from .coopgame import EnduranceKind, EnduranceSpec, core_check, shapley_value
from .equilibrium import (
    SolverConfig,
    candidate_payoffs,
    cdf_sup_distance,
    solve_mixed_fp,
    solve_pure_br,
    solve_two_layer,
    solve_woa_fp,
    woa_cdf,
    woa_sample,
)
from .errors import GameError, InvariantViolation, SchemaError
from .model import EffortProfile, Scenario, select_coalition
from .scenario_file import parse_game, parse_scenario

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_NOT_FOUND = 2
EXIT_SCHEMA = 3
EXIT_INVARIANT = 4
EXIT_USAGE = 64



class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("solver")
    g.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--max-iter", type=int, default=None)
    g.add_argument("--grid", type=int, default=None, help="effort grid size for mixed solvers")
    g.add_argument("--t-max", type=float, default=None, help="upper end of the effort range")
    g.add_argument("--rounds", type=int, default=None, help="fictitious-play round limit")
    g.add_argument("--payoff", choices=("expected", "conditional"), default="expected",
                   help="payoff used for coalition choice")
    g.add_argument("--endurance", choices=("weighted-sum", "variance", "weakest-link"), default=None)
    g.add_argument("--gamma", type=float, default=None, help="variance penalty (with --endurance variance)")
    parser.add_argument("--out-dir", type=Path, default=None, help="write CSV series here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coalition-attrition", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_text in (
        ("solve", "pure equilibrium of each coalition's contest by damped best response"),
        ("mixed", "mixed equilibrium of each coalition's contest by fictitious play"),
        ("two-layer", "joint equilibrium under the expected payoff"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", type=Path)
        p.add_argument("--coalition", default=None, help="only this coalition")
        _common(p)

    p = sub.add_parser("woa", help="classic war of attrition: samples and discretized equilibrium")
    p.add_argument("--prize", type=float, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--fp", action="store_true", help="also solve the discretized game by fictitious play")
    _common(p)

    p = sub.add_parser("shapley", help="exact Shapley value of a characteristic-function game")
    p.add_argument("game", type=Path)
    _common(p)

    p = sub.add_parser("core", help="check an allocation against the core")
    p.add_argument("game", type=Path)
    p.add_argument("--allocation", required=True, help="comma-separated payoffs in player order")
    _common(p)

    for name, help_text in (
        ("casestudy", "market case study from local price CSVs"),
        ("counterfactual", "re-solve after scaling one lever"),
    ):
        p = sub.add_parser(name, help=help_text)
        if name == "counterfactual":
            p.add_argument("scenario", type=Path, nargs="?", default=None)
            p.add_argument("--target", choices=("reward", "cost", "effectiveness", "resilience"), required=True)
            p.add_argument("--select", default="", help="comma-separated coalition or player ids (default: all)")
            p.add_argument("--multiplier", type=float, required=True)
        p.add_argument("--data-dir", type=Path, default=None,
                       help="directory of <asset>.csv files (default: bundled fixtures)")
        p.add_argument("--published", action="store_true",
                       help="use the published 2018-2023 return moments instead of price files")
        p.add_argument("--coalition", action="append", default=None, metavar="ID=ASSET,ASSET",
                       help="coalition membership; repeatable (default: crypto vs traditional)")
        p.add_argument("--attractiveness", choices=("mean-return", "uniform"), default="mean-return")
        p.add_argument("--start", default="2018-01-01")
        p.add_argument("--end", default="2023-12-31")
        p.add_argument("--share-coalition", default=None, help="coalition for the yearly share series")
        _common(p)
    return parser


def _config(args, base: SolverConfig | None = None) -> SolverConfig:
    base = base or SolverConfig()
    changes = {}
    for flag, key in (("seed", "seed"), ("tol", "tol"), ("max_iter", "max_iter"), ("grid", "grid_size"),
                      ("t_max", "t_max"), ("rounds", "fp_rounds")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    return base.replace(**changes)


def _endurance(args, base: EnduranceSpec | None = None) -> EnduranceSpec:
    base = base or EnduranceSpec()
    kind = EnduranceKind(args.endurance) if args.endurance else base.kind
    if args.gamma is not None and kind is not EnduranceKind.VARIANCE_PENALIZED:
        raise UsageError("--gamma only applies with --endurance variance")
    gamma = args.gamma if args.gamma is not None else base.gamma
    return EnduranceSpec(kind, base.weights, gamma)


def _finite(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _finite(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def _select(scenario: Scenario, coalition_id):
    if coalition_id is None:
        return [c.id for c in scenario.coalitions]
    scenario.coalition(coalition_id)
    return [coalition_id]


def _choices(scenario: Scenario, profile: EffortProfile, payoff_kind: str, config: SolverConfig) -> dict:
    t_max = config.resolve_t_max(scenario.coalitions)
    out = {}
    order = [c.id for c in scenario.coalitions]
    for pid in scenario.player_ids:
        cands = candidate_payoffs(scenario, profile, pid, payoff_kind, t_max, config.tol)
        out[str(pid)] = {"candidates": cands, "choice": select_coalition(cands, order)}
    return out


def cmd_solve(args, warnings):
    parsed = parse_scenario(args.scenario)
    config = _config(args, parsed.config)
    reports = {cid: solve_pure_br(parsed.scenario, cid, config) for cid in _select(parsed.scenario, args.coalition)}
    for cid, r in reports.items():
        if not r.converged:
            warnings.append(f"coalition {cid}: best-response iteration did not converge ({r.kind.value})")
    payload = {"coalitions": {str(cid): r.to_dict() for cid, r in reports.items()}}
    if args.coalition is None:
        profile = EffortProfile({pid: t for r in reports.values() for pid, t in r.efforts.as_dict().items()})
        payload["choices"] = _choices(parsed.scenario, profile, args.payoff, config)
    converged = all(r.converged for r in reports.values())
    return config, payload, converged


def cmd_two_layer(args, warnings):
    parsed = parse_scenario(args.scenario)
    config = _config(args, parsed.config)
    reports = solve_two_layer(parsed.scenario, config)
    if args.coalition is not None:
        parsed.scenario.coalition(args.coalition)
        reports = {args.coalition: reports[args.coalition]}
    converged = all(r.converged for r in reports.values())
    if not converged:
        warnings.append("two-layer iteration did not converge")
    payload = {"coalitions": {str(cid): r.to_dict() for cid, r in reports.items()}}
    if args.coalition is None:
        profile = EffortProfile({pid: t for r in reports.values() for pid, t in r.efforts.as_dict().items()})
        payload["choices"] = _choices(parsed.scenario, profile, args.payoff, config)
    return config, payload, converged


def cmd_mixed(args, warnings):
    parsed = parse_scenario(args.scenario)
    config = _config(args, parsed.config)
    reports = {cid: solve_mixed_fp(parsed.scenario, cid, config) for cid in _select(parsed.scenario, args.coalition)}
    for cid, r in reports.items():
        if not r.converged:
            warnings.append(f"coalition {cid}: fictitious play stopped at exploitability {r.exploitability:.3g}")
    payload = {"coalitions": {str(cid): r.to_dict() for cid, r in reports.items()}}
    if args.out_dir is not None:
        rows = []
        for cid, r in reports.items():
            for pid, s in r.strategies.items():
                rows.extend((cid, pid, float(t), float(p)) for t, p in zip(s.grid, s.probs))
        _write_csv(args.out_dir / "mixed_strategies.csv", ["coalition", "player", "effort", "prob"], rows)
    return config, payload, all(r.converged for r in reports.values())


def cmd_woa(args, warnings):
    config = _config(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    samples = woa_sample(args.prize, args.samples, config.seed)
    ordered = np.sort(samples)
    n = len(ordered)
    exact = np.array([woa_cdf(args.prize, float(t)) for t in ordered])
    ks = float(max(np.max(np.arange(1, n + 1) / n - exact), np.max(exact - np.arange(n) / n)))
    payload = {"prize": args.prize, "samples": {"count": n, "mean": float(np.mean(samples)), "ks_distance": ks}}
    converged = True
    if args.out_dir is not None:
        _write_csv(args.out_dir / "woa_samples.csv", ["index", "time"], enumerate(samples))
    if args.fp:
        report = solve_woa_fp(args.prize, config)
        s = report.strategies["p1"]
        payload["equilibrium"] = {
            "rounds": report.iterations,
            "exploitability": report.exploitability,
            "converged": report.converged,
            "cdf_sup_distance": cdf_sup_distance(s.cdf(), s.grid, args.prize),
            "grid": s.grid.tolist(),
            "cdf": s.cdf().tolist(),
        }
        converged = report.converged
        if not converged:
            warnings.append("fictitious play did not reach the exploitability target")
    return config, payload, converged


def cmd_shapley(args, warnings):
    names, game = parse_game(args.game)
    phi = shapley_value(game)
    payload = {"shapley": dict(zip(names, phi.tolist())), "grand_value": game.grand,
               "efficiency_gap": float(phi.sum() - game.grand)}
    return _config(args), payload, True


def cmd_core(args, warnings):
    names, game = parse_game(args.game)
    try:
        x = [float(v) for v in args.allocation.split(",")]
    except ValueError:
        raise UsageError(f"--allocation must be comma-separated numbers, got {args.allocation!r}") from None
    if len(x) != game.n:
        raise UsageError(f"--allocation has {len(x)} values for {game.n} players")
    res = core_check(game, x)
    payload = {
        "in_core": res.in_core,
        "efficient": res.efficient,
        "worst_violating_subset": [names[i] for i in res.worst_violating_subset]
        if res.worst_violating_subset is not None else None,
        "worst_violation": res.worst_violation,
    }
    return _config(args), payload, True


def _coalition_map(args) -> dict:
    if not args.coalition:
        return dict(DEFAULT_COALITIONS)
    mapping = {}
    for item in args.coalition:
        cid, sep, assets = item.partition("=")
        if not sep or not cid or not assets:
            raise UsageError(f"--coalition expects ID=ASSET,ASSET; got {item!r}")
        for asset in assets.split(","):
            asset = asset.strip()
            if asset in mapping:
                raise InvariantViolation(f"asset {asset!r} assigned to both {mapping[asset]!r} and {cid!r}")
            mapping[asset] = cid
    return mapping


def _load_case(args, warnings):
    mapping = _coalition_map(args)
    if args.published:
        if args.data_dir is not None:
            raise UsageError("--published and --data-dir are mutually exclusive")
        estimates = [e for e in published_estimates() if e.asset_id in mapping]
        missing = sorted(set(mapping) - {e.asset_id for e in estimates})
        if missing:
            raise FileNotFoundError(f"no published moments for assets {missing}")
        case = build_scenario(estimates, mapping, args.attractiveness)
        return None, mapping, estimates[0].window, estimates, case
    data_dir = args.data_dir or FIXTURE_DIR
    if not data_dir.is_dir():
        raise FileNotFoundError(f"data directory not found: {data_dir}")
    series = {}
    for asset in mapping:
        path = data_dir / f"{asset}.csv"
        if not path.is_file():
            raise FileNotFoundError(f"no price file for asset {asset!r}: {path}")
        series[asset] = load_price_csv(path, asset)
    try:
        start, end = dt.date.fromisoformat(args.start), dt.date.fromisoformat(args.end)
    except ValueError as exc:
        raise UsageError(f"bad --start/--end: {exc}") from None
    if start > end:
        raise UsageError("--start is after --end")
    estimates = [estimate_resilience(series[a], start, end) for a in mapping]
    case = build_scenario(estimates, mapping, args.attractiveness)
    for asset in case.clamped:
        warnings.append(f"asset {asset}: negative Sharpe ratio clamped to the effort floor")
    return series, mapping, (start, end), estimates, case


def cmd_casestudy(args, warnings):
    series, mapping, (start, end), estimates, case = _load_case(args, warnings)
    endurance = _endurance(args)
    decision = two_stage_decision(case.scenario, case.profile, endurance)
    share_cid = args.share_coalition or decision.chosen
    if share_cid not in set(mapping.values()):
        raise UsageError(f"--share-coalition {share_cid!r} is not a coalition")
    yearly = None
    if series is not None:
        years = list(range(start.year, end.year + 1))
        yearly = yearly_share_series(series, years, mapping, share_cid, args.attractiveness)
        for year, missing in yearly.excluded.items():
            for asset in missing:
                warnings.append(f"{year}: asset {asset} has no usable data and is excluded")
    ranking = sorted(estimates, key=lambda e: e.sharpe, reverse=True)
    payload = {
        "window": [start.isoformat(), end.isoformat()],
        "attractiveness": case.attractiveness,
        "estimates": {
            e.asset_id: {"coalition": mapping[e.asset_id], "mean": e.stats.mean, "std": e.stats.std,
                         "count": e.stats.count, "sharpe": e.sharpe}
            for e in estimates
        },
        "ranking": [e.asset_id for e in ranking],
        "stage_one": {"endurance": decision.endurance, "chosen": decision.chosen,
                      "endurance_kind": endurance.kind.value},
        "stage_two": {"coalition": decision.chosen, "shares": decision.shares},
        "source": "published" if series is None else "prices",
    }
    if yearly is not None:
        payload["yearly_shares"] = {"coalition": share_cid, "years": {str(y): s for y, s in yearly.shares.items()}}
    if args.out_dir is not None:
        _write_csv(args.out_dir / "figure1_sharpe.csv", ["asset", "coalition", "sharpe"],
                   [(e.asset_id, mapping[e.asset_id], e.sharpe) for e in ranking])
        _write_csv(args.out_dir / "figure2_endurance.csv", ["coalition", "endurance"],
                   list(decision.endurance.items()))
        if yearly is not None:
            assets = [a for a in series if mapping[a] == share_cid]
            _write_csv(args.out_dir / "figure3_shares.csv", ["year", *assets],
                       [(y, *[s.get(a, "") for a in assets]) for y, s in yearly.shares.items()])
    return _config(args), payload, True


def cmd_counterfactual(args, warnings):
    if args.scenario is not None and args.data_dir is not None:
        raise UsageError("give either a scenario file or --data-dir, not both")
    selector = tuple(s.strip() for s in args.select.split(",") if s.strip())
    spec = CounterfactualSpec(args.target, selector, args.multiplier)
    if args.scenario is not None:
        if args.coalition:
            raise UsageError("--coalition only applies to price data")
        parsed = parse_scenario(args.scenario)
        config = _config(args, parsed.config)
        endurance = _endurance(args, parsed.endurance)
        scenario, profile = parsed.scenario, parsed.efforts
        if profile is None:
            # no observed efforts: use the baseline equilibrium as the observed profile
            reports = solve_two_layer(scenario, config)
            profile = EffortProfile({p: t for r in reports.values() for p, t in r.efforts.as_dict().items()})
    else:
        _, _, _, _, case = _load_case(args, warnings)
        config = _config(args)
        endurance = _endurance(args)
        scenario, profile = case.scenario, case.profile
    result = counterfactual_run(scenario, profile, spec, config, endurance)
    converged = result.baseline.converged and result.perturbed.converged
    if not converged:
        warnings.append("a two-layer solve did not converge")
    payload = {"target": spec.target.value, "selector": list(spec.selector), "multiplier": spec.multiplier,
               **result.to_dict()}
    return config, payload, converged


COMMANDS = {
    "solve": cmd_solve,
    "mixed": cmd_mixed,
    "woa": cmd_woa,
    "two-layer": cmd_two_layer,
    "shapley": cmd_shapley,
    "core": cmd_core,
    "casestudy": cmd_casestudy,
    "counterfactual": cmd_counterfactual,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    warnings: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        config, payload, converged = COMMANDS[args.command](args, warnings)
        code = EXIT_OK if converged else EXIT_NOT_CONVERGED
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NOT_FOUND
    except SchemaError as exc:
        print(f"schema error: {exc}", file=stderr)
        return EXIT_SCHEMA
    except GameError as exc:
        print(f"invariant violation: {exc}", file=stderr)
        return EXIT_INVARIANT
    config_out = config.to_dict()
    config_out["payoff"] = getattr(args, "payoff", None)
    report = {
        "command": argv,
        "config": config_out,
        "payload": payload,
        "warnings": warnings,
        "exit_code": code,
        "wall_time_s": time.perf_counter() - started,
    }
    print(json.dumps(_finite(report), indent=2), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
