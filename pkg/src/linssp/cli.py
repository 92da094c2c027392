"""Command-line interface.

Exit codes: 0 success, 1 configuration error (or validation failure), 2 the
run finished but some trial hit the step cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import harness
from .errors import ConfigurationError, Improper, InsufficientData
from .instances import HardInstanceParams, build_hard_instance, embed_tabular, optimal_hard_action
from .model import load_instance, save_instance, validate
from .oracle import solve_optimal

OUTPUT_ENV = "LINSSP_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_TAINTED = 0, 1, 2

_TOP_KEYS = {"instance", "agent", "K_max", "trials", "seed", "parallelism", "output",
             "step_cap", "k_min"}
_AGENT_KEYS = {f.name for f in fields(harness.AgentSpec)}


def bundled_config(name: str = "fig1.json") -> Path:
    return Path(str(resources.files("linssp") / "configs" / name))


def build_instance(spec: dict):
    """Instance from the ``instance`` section of a config."""
    spec = dict(spec)
    if "path" in spec:
        return load_instance(spec.pop("path"))
    kind = spec.pop("kind", None)
    if kind == "hard":
        zero = spec.pop("zero_cost_action", None)
        preset = spec.pop("preset", None)
        if preset is not None:
            params = HardInstanceParams.preset(preset, **spec)
        else:
            params = HardInstanceParams(**spec)
        inst = build_hard_instance(params)
        if zero is not None:
            idx = optimal_hard_action(params.d) if zero == "optimal" else int(zero)
            if not 0 <= idx < inst.n_actions:
                raise ConfigurationError(f"instance.zero_cost_action={zero} is not an action")
            cost = np.array(inst.cost)
            cost[inst.init, idx] = 0.0
            inst = build_hard_instance(params, cost=cost)
        return inst
    if kind == "tabular":
        try:
            return embed_tabular(np.asarray(spec["P"], dtype=float),
                                 np.asarray(spec["cost"], dtype=float), spec["init"], spec["goal"])
        except KeyError as exc:
            raise ConfigurationError(f"instance.{exc.args[0]} is required for kind 'tabular'") from None
    raise ConfigurationError(f"instance.kind must be 'hard' or 'tabular' (or give instance.path), "
                             f"got {kind!r}")


def resolve_config(raw: dict, overrides: dict | None = None) -> dict:
    """Validate a config dict and fill in defaults; errors name the offending field."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    cfg = {
        "instance": raw.get("instance"),
        "agent": dict(raw.get("agent", {})),
        "K_max": raw.get("K_max", 2000),
        "trials": raw.get("trials", 40),
        "seed": raw.get("seed", 0),
        "parallelism": raw.get("parallelism", 1),
        "output": raw.get("output"),
        "step_cap": raw.get("step_cap", 1_000_000),
        "k_min": raw.get("k_min", 100),
    }
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    if cfg["instance"] is None:
        raise ConfigurationError("instance: missing")
    for key in ("K_max", "trials", "parallelism", "step_cap", "k_min"):
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool) or cfg[key] < 1:
            raise ConfigurationError(f"{key}: must be a positive integer, got {cfg[key]!r}")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigurationError(f"seed: must be a non-negative integer, got {cfg['seed']!r}")
    bad = set(cfg["agent"]) - _AGENT_KEYS
    if bad:
        raise ConfigurationError(f"agent: unknown field(s) {', '.join(sorted(bad))}")
    try:
        spec = harness.AgentSpec(**cfg["agent"])
        learner = spec.learner_config(cfg["K_max"])
    except ConfigurationError as exc:
        raise ConfigurationError(f"agent.{exc}") from None
    except TypeError as exc:
        raise ConfigurationError(f"agent: {exc}") from None
    cfg["agent"] = harness.spec_to_dict(spec)
    cfg["resolved_rho"] = spec.resolve_rho(cfg["K_max"])
    if learner is not None:
        cfg["resolved_lam"] = learner.lam
    try:
        build_instance(cfg["instance"])
    except ConfigurationError as exc:
        raise ConfigurationError(f"instance: {exc}") from None
    except TypeError as exc:
        raise ConfigurationError(f"instance: {exc}") from None
    if cfg["output"] is None:
        cfg["output"] = os.environ.get(OUTPUT_ENV, "linssp-out")
    return cfg


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None


def cmd_run(args) -> int:
    raw = load_config(args.config)
    cfg = resolve_config(raw, {"seed": args.seed, "trials": args.trials, "output": args.output,
                               "parallelism": args.parallelism})
    if args.dry_run:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return EXIT_OK
    instance = build_instance(cfg["instance"])
    spec = harness.AgentSpec(**cfg["agent"])
    traces = harness.run_trials(instance, spec, cfg["K_max"], cfg["trials"], cfg["seed"],
                                cfg["step_cap"], cfg["parallelism"])
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    tainted = sum(tr.tainted for tr in traces)
    harness.write_trace_csv(traces, out / "trace.csv")
    fit = None
    try:
        agg = harness.aggregate(traces, harness.checkpoint_grid(cfg["K_max"]))
        harness.write_aggregate_csv(agg, out / "aggregate.csv")
        fit = harness.loglog_slope(agg, cfg["k_min"])
    except InsufficientData as exc:
        print(f"warning: {exc}", file=sys.stderr)
    harness.write_summary(out / "summary.json", fit, cfg, tainted)
    if fit is not None:
        print(f"slope={fit.slope:.4f} r2={fit.r2:.4f} over {fit.n_points} checkpoints "
              f"(K >= {cfg['k_min']})")
    print(f"wrote {out}/trace.csv, aggregate.csv, summary.json")
    if tainted:
        print(f"error: {tainted} trial(s) hit the step cap", file=sys.stderr)
        return EXIT_TAINTED
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    problems = validate(inst)
    for v in problems:
        print(v)
    if not problems:
        print("ok")
    return EXIT_OK if not problems else EXIT_CONFIG


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    try:
        res = solve_optimal(inst)
    except Improper as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps({
        "V_star_init": float(res.V_star[inst.init]),
        "B_star": res.B_star,
        "T_star": res.T_star,
        "pi_star": [int(a) for a in res.pi_star],
        "V_star": [float(v) for v in res.V_star],
        "iterations": res.iterations,
    }, indent=2))
    return EXIT_OK


def cmd_make_instance(args) -> int:
    spec = {"kind": "hard", "d": args.d, "B_star": args.B_star, "preset": args.preset}
    if args.preset == "lower-bound-calibrated":
        spec["K"] = args.K
    else:
        spec["split"] = args.split
    save_instance(build_instance(spec), args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="linssp", description=__doc__.split("\n\n")[0],
        epilog="exit codes: 0 success; 1 configuration error or invalid instance; "
               "2 some trial hit the step cap. "
               f"Default output directory: ${OUTPUT_ENV} or ./linssp-out.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config", nargs="?", default=None,
                   help="config file (default: bundled fig1.json)")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--output")
    r.add_argument("--parallelism", type=int)
    r.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check an instance JSON file")
    v.add_argument("instance")
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="solve an instance exactly and print V*, B*, T*, pi*")
    o.add_argument("instance")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("make-instance", help="write a hard-family instance JSON file")
    m.add_argument("output")
    m.add_argument("--d", type=int, default=5)
    m.add_argument("--B-star", type=float, default=3.0)
    m.add_argument("--preset", default="default", choices=["default", "lower-bound-calibrated"])
    m.add_argument("--split", type=float, default=0.9)
    m.add_argument("--K", type=int, default=2000)
    m.set_defaults(func=cmd_make_instance)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if getattr(args, "config", "unset") is None:
        args.config = bundled_config()
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
