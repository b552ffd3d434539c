"""Command-line interface.

Exit codes: 0 success, 1 infeasible regime, 2 input error. The environment
variable ``ENERGYGAMES_SEED`` overrides every seed (sweep specs and
Rayleigh-sampled configs).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .efficiency import EfficiencyModel, beta_star, check_se_conditions, gamma_star, interference_coefficient
from .equilibria import leader_power_numeric, sic_nash, stackelberg, sud_nash
from .errors import IllPosedError, InfeasibleError
from .harness import ExperimentSpec, emit, run
from .metrics import select
from .model import DecodingOrder, game_from_dict
from .oracle import br_iterate, verify_leader_optimality, verify_no_deviation

SEED_ENV = "ENERGYGAMES_SEED"
EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


def _seed_override() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _load_game(path: str):
    return game_from_dict(_read_json(path), seed=_seed_override())


def _print(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_constants(args) -> int:
    model = EfficiencyModel(args.M)
    doc = {"M": args.M, "beta_star": beta_star(model)}
    if args.K is not None:
        doc.update(K=args.K, N=args.N,
                   c=interference_coefficient(model, args.K, args.N),
                   gamma_star=gamma_star(model, args.K, args.N))
        if args.K >= 2:
            doc["se_conditions"] = check_se_conditions(model, args.K, args.N).to_dict()
    _print(doc)
    return EXIT_OK


def _parse_order(text: str, K: int) -> DecodingOrder:
    try:
        ids = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ValueError(f"--order must be comma-separated user ids, got {text!r}") from None
    if len(ids) != K:
        raise ValueError(f"--order lists {len(ids)} users, config has K={K}")
    return DecodingOrder(tuple(ids))


def cmd_equilibrium(args) -> int:
    config, channel = _load_game(args.config)
    if args.receiver == "sud":
        outcome = sud_nash(config, channel)
        receiver = "sud"
    elif args.receiver == "sic":
        order = _parse_order(args.order, config.K) if args.order else DecodingOrder.identity(config.K)
        outcome = sic_nash(config, channel, order)
        receiver = order
    else:
        leader = args.leader if args.leader is not None else 0
        if not 0 <= leader < config.K:
            raise ValueError(f"--leader must be in 0..{config.K - 1}")
        outcome = stackelberg(config, channel, leader)
        receiver = "sud"
    doc = outcome.to_dict()
    if args.verify and outcome.exists:
        checks = {}
        if args.receiver == "stackelberg":
            followers = [i for i in range(config.K) if i != outcome.leader]
            checks["followers"] = verify_no_deviation(config, channel, "sud", outcome.powers,
                                                      users=followers).to_dict()
            checks["leader"] = verify_leader_optimality(config, channel, outcome.leader,
                                                        outcome.powers[outcome.leader]).to_dict()
            numeric = leader_power_numeric(config, channel, outcome.leader)
            checks["leader_numeric_power"] = numeric
            checks["leader_power_rel_error"] = abs(numeric / outcome.powers[outcome.leader] - 1.0)
        else:
            trace = br_iterate(config, channel, receiver, keep=2)
            checks["best_response"] = trace.to_dict()
            checks["no_deviation"] = verify_no_deviation(config, channel, receiver, outcome.powers).to_dict()
        doc["verification"] = checks
    _print(doc)
    return EXIT_OK if outcome.exists else EXIT_INFEASIBLE


def cmd_best(args) -> int:
    config, channel = _load_game(args.config)
    report = select(config, channel, args.metric, args.choice, brute_force=args.brute_force)
    _print(report.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = _read_json(args.spec)
    doc.setdefault("kind", args.kind)
    if doc["kind"] != args.kind:
        raise ValueError(f"spec kind {doc['kind']!r} does not match subcommand {args.kind!r}")
    seed = _seed_override()
    if seed is not None:
        doc["seed"] = seed
    result = run(ExperimentSpec.from_dict(doc))
    emit(result, args.format, args.out)
    for reason in result.skipped:
        print(f"skipped: {reason}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="energygames", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print beta*, and gamma* and c when K is given")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int)
    p.add_argument("--N", type=float, default=1.0)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("equilibrium", help="solve one equilibrium and print it as JSON")
    p.add_argument("--receiver", choices=("sud", "sic", "stackelberg"), required=True)
    p.add_argument("--config", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--order", help="decoding order, 0-based ids, first decoded first")
    group.add_argument("--leader", type=int, help="0-based id of the Stackelberg leader")
    p.add_argument("--verify", action="store_true", help="run the oracle checks")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("best", help="best leader or decoding order for a network metric")
    p.add_argument("--metric", choices=("welfare", "evmn"), required=True)
    p.add_argument("--choice", choices=("leader", "order"), required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=cmd_best)

    p = sub.add_parser("sweep", help="Monte-Carlo sweeps")
    p.add_argument("kind", choices=("snr", "load"))
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InfeasibleError, IllPosedError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
