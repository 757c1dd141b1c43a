"""Command line entry points: simulate, train, eval, serve."""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import os
import statistics
import sys

from .behaviors import BUILTIN_POLICIES, build_policy
from .engine import (
    BLUE,
    RED,
    IllegalActionError,
    ReplayError,
    ScenarioError,
    canonical_json,
    run_episode,
)
from .learn import TrainConfig, TrainingDiverged
from .multimodel import MANIFEST_SCHEMA, load_multimodel
from .learn.net import MODEL_SCHEMA

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

OPTIONS_SCHEMA = "warhex-options/1"


class ConfigError(Exception):
    """Bad manifest: missing file, unparsable document, unknown policy."""


def _load_json(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"no such file: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def load_scenario_doc(path: str) -> dict:
    doc = _load_json(path)
    from .engine import load_scenario

    try:
        load_scenario(doc)
    except ScenarioError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return doc


def make_policy_factory(spec: str, faction: str):
    """Resolve a policy spec into a per-episode factory(scenario, seed).

    Specs: a builtin name, "hierarchy", a saved model file, or a
    multi-model manifest. Files are validated here, before any episode.
    """
    if spec in BUILTIN_POLICIES:
        return lambda scenario, seed: build_policy(spec, seed=seed, scenario=scenario)
    if spec == "hierarchy":
        from .hierarchy import HierarchicalPolicy

        return lambda scenario, seed: HierarchicalPolicy(faction=faction)
    if os.path.exists(spec):
        doc = _load_json(spec)
        schema = doc.get("schema")
        if schema == MODEL_SCHEMA:
            from .learn.dqn import GreedyNetPolicy

            return lambda scenario, seed: GreedyNetPolicy.load(spec)
        if schema == MANIFEST_SCHEMA:
            return lambda scenario, seed: load_multimodel(spec, scenario=scenario, seed=seed)
        if schema == OPTIONS_SCHEMA:
            from .hierarchy import HierarchicalPolicy

            trained = load_options_policy(spec)
            return lambda scenario, seed: HierarchicalPolicy(
                faction=faction, manager_policy=trained.as_manager_policy(faction)
            )
        raise ConfigError(f"{spec}: unrecognized schema {schema!r}")
    raise ConfigError(
        f"unknown policy {spec!r} (builtin names: {', '.join(BUILTIN_POLICIES)}, "
        "'hierarchy', or a model/manifest file)"
    )


def _train_config(args) -> TrainConfig:
    """Config file first, explicit flags override."""
    config = TrainConfig.from_dict(_load_json(args.config)) if args.config else TrainConfig()
    if args.episodes is not None:
        config.episodes = args.episodes
    if args.seed is not None:
        config.seed = args.seed
    return config


def _manifest(args, command: str) -> dict:
    fields = ("scenario", "blue", "red", "policies", "seed", "episodes", "out", "config")
    doc = {"command": command}
    for f in fields:
        value = getattr(args, f, None)
        if value is not None:
            doc[f] = value
    if getattr(args, "deterministic_combat", False):
        doc["deterministic_combat"] = True
    return doc


def _summary(scores: list[int]) -> dict:
    wins = sum(1 for s in scores if s > 0)
    losses = sum(1 for s in scores if s < 0)
    return {
        "episodes": len(scores),
        "mean": statistics.fmean(scores) if scores else 0.0,
        "stddev": statistics.pstdev(scores) if scores else 0.0,
        "wins": wins,
        "draws": len(scores) - wins - losses,
        "losses": losses,
    }


def cmd_simulate(args) -> int:
    scenario = load_scenario_doc(args.scenario)
    blue = make_policy_factory(args.blue, BLUE)
    red = make_policy_factory(args.red, RED)
    deterministic = True if args.deterministic_combat else None
    if args.out:
        os.makedirs(args.out, exist_ok=True)

    scores = []
    for ep in range(args.episodes):
        seed = args.seed + ep
        log = run_episode(
            scenario, blue(scenario, seed), red(scenario, seed), seed=seed,
            deterministic=deterministic,
        )
        scores.append(log.final_score)
        if args.out:
            log.save(os.path.join(args.out, f"episode-{ep:04d}.jsonl"))

    summary = {"manifest": _manifest(args, "simulate"), **_summary(scores)}
    text = canonical_json(summary)
    if args.out:
        with open(os.path.join(args.out, "summary.json"), "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _write_curve(path: str, header: tuple[str, str], rows, manifest: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest: {canonical_json(manifest)}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_train(args) -> int:
    scenario = load_scenario_doc(args.scenario)
    config = _train_config(args)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    manifest = _manifest(args, f"train:{args.kind}")

    if args.kind == "dqn":
        from .learn.dqn import train_dqn

        adversary = make_policy_factory(args.red, RED)(scenario, config.seed)
        policy, curve = train_dqn(scenario, adversary, config)
        policy.save(os.path.join(out, "dqn.json"))
        _write_curve(
            os.path.join(out, "dqn_curve.csv"), ("episode_window", "mean_score"),
            curve, manifest,
        )
    elif args.kind == "score":
        from .learn.score import train_score_model

        blue = make_policy_factory(args.blue, BLUE)
        red = make_policy_factory(args.red, RED)
        logs = []
        for ep in range(args.episodes or 100):
            seed = config.seed + ep
            logs.append(
                run_episode(scenario, blue(scenario, seed), red(scenario, seed), seed=seed)
            )
        predictor, curve = train_score_model(
            logs, config, behavior_name=args.blue, adversary_name=args.red
        )
        predictor.save(os.path.join(out, "score.json"))
        _write_curve(
            os.path.join(out, "score_curve.csv"), ("epoch", "mse"), curve, manifest
        )
    elif args.kind == "options":
        from .behaviors import goal_seek_policy
        from .hierarchy import train_manager_options

        adversary = make_policy_factory(args.red, RED)(scenario, config.seed)
        policy = train_manager_options(scenario, goal_seek_policy, config, adversary=adversary)
        doc = {
            "schema": OPTIONS_SCHEMA,
            "templates": [[list(t), p] for t, p in policy.templates],
            "grid": policy.grid,
            "qtable": [[repr(k), o, v] for (k, o), v in sorted(policy.qtable.items(), key=repr)],
        }
        with open(os.path.join(out, "options.json"), "w") as fh:
            json.dump(doc, fh)
    else:
        raise ConfigError(f"unknown train kind {args.kind!r}")
    return EXIT_OK


def load_options_policy(path: str):
    from .hexgrid import HexCoord
    from .hierarchy import TrainedManagerPolicy

    doc = _load_json(path)
    if doc.get("schema") != OPTIONS_SCHEMA:
        raise ConfigError(f"{path}: not an options file")
    templates = [(HexCoord(*t), p) for t, p in doc["templates"]]
    qtable = {(ast.literal_eval(k), o): v for k, o, v in doc["qtable"]}
    return TrainedManagerPolicy(templates, qtable, doc["grid"])


def cmd_eval(args) -> int:
    scenario = load_scenario_doc(args.scenario)
    specs = [s.strip() for s in args.policies.split(",") if s.strip()]
    if len(specs) < 2:
        raise ConfigError("eval needs at least two policy specs (--policies a,b)")
    factories = {
        spec: (make_policy_factory(spec, BLUE), make_policy_factory(spec, RED))
        for spec in specs
    }
    deterministic = True if args.deterministic_combat else None

    rows = []
    for blue_spec in specs:
        for red_spec in specs:
            if blue_spec == red_spec:
                continue
            scores = []
            for ep in range(args.episodes):
                seed = args.seed + ep
                log = run_episode(
                    scenario,
                    factories[blue_spec][0](scenario, seed),
                    factories[red_spec][1](scenario, seed),
                    seed=seed,
                    deterministic=deterministic,
                )
                scores.append(log.final_score)
            mean = statistics.fmean(scores)
            if len(scores) > 1:
                half = 1.96 * statistics.stdev(scores) / math.sqrt(len(scores))
                ci = [mean - half, mean + half]
                degenerate = False
            else:
                ci = [mean, mean]
                degenerate = True
            rows.append(
                {
                    "blue": blue_spec,
                    "red": red_spec,
                    "episodes": len(scores),
                    "mean": mean,
                    "ci95": ci,
                    "degenerate_ci": degenerate,
                }
            )

    table = {"manifest": _manifest(args, "eval"), "pairs": rows}
    text = canonical_json(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "eval.json"), "w") as fh:
            fh.write(text + "\n")
    print(text)
    for row in rows:
        flag = " (degenerate CI)" if row["degenerate_ci"] else ""
        print(
            f"{row['blue']} vs {row['red']}: mean {row['mean']:.2f} "
            f"ci95 [{row['ci95'][0]:.2f}, {row['ci95'][1]:.2f}]{flag}"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .playserver import create_app

    paths = []
    if os.path.isdir(args.scenario):
        paths = [
            os.path.join(args.scenario, f)
            for f in sorted(os.listdir(args.scenario))
            if f.endswith(".json")
        ]
    else:
        paths = [args.scenario]
    if not paths:
        raise ConfigError(f"no scenario files under {args.scenario}")
    scenarios = {}
    for path in paths:
        doc = load_scenario_doc(path)
        name = doc.get("name") or os.path.splitext(os.path.basename(path))[0]
        scenarios[name] = doc

    red_factory = make_policy_factory(args.red, RED)
    app = create_app(
        scenarios,
        red_policy_factory=red_factory,
        default_seed=args.seed,
        log_dir=args.out,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="warhex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, episodes_default=None):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output directory")
        p.add_argument(
            "--deterministic-combat", action="store_true",
            help="force deterministic adjudication regardless of the scenario",
        )
        if episodes_default is not None:
            p.add_argument("--episodes", type=int, default=episodes_default)

    p = sub.add_parser("simulate", help="run scripted episodes and summarize")
    common(p, episodes_default=1)
    p.add_argument("--blue", default="pass", help="blue policy spec")
    p.add_argument("--red", default="pass", help="red policy spec")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train a model and write artifacts")
    common(p)
    p.set_defaults(seed=None)  # fall back to the config file's seed
    p.add_argument("--kind", choices=("dqn", "score", "options"), default="dqn")
    p.add_argument("--blue", default="greedy", help="behavior model (score training)")
    p.add_argument("--red", default="pass", help="adversary policy spec")
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--config", help="training config JSON file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="round-robin comparison of policies")
    common(p, episodes_default=20)
    p.add_argument("--policies", required=True, help="comma-separated policy specs")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="serve human-vs-AI play over websockets")
    p.add_argument("--scenario", required=True, help="scenario file or directory")
    p.add_argument("--red", default="greedy", help="red policy spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--out", help="directory for episode logs")
    p.add_argument("--static-dir", help="serve a browser UI from this directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrainingDiverged, IllegalActionError, ReplayError, RuntimeError) as exc:
        print(f"fault: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
