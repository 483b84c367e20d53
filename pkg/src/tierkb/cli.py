"""Command-line entry point.

Subcommands mirror the package's flows: cross-validated learner evaluation,
tree-to-rules compilation, knowledge-base reasoning, the mission diagnosis
flows, and the storage/reasoning benchmarks. Every subcommand accepts
``--config FILE`` holding ``key = value`` lines keyed by the dotted command
path (``eval.folds``, ``mission.run.scale``); explicit flags win over config
entries. All file outputs are deterministic for equal inputs and seeds,
except fields that record wall time.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dataset import SCENARIO_KINDS, load_glass, make_folds
from .errors import TierkbError
from .learners import ALGORITHMS, make_fit
from .learners.evaluation import evaluate_cv
from .learners.io import load_model
from .learners.tree import DecisionTree
from .pipeline.config import load_config, resolve


class CliError(TierkbError, ValueError):
    """A subcommand cannot run with the given flags/config."""


def _require(value, flag: str, key: str):
    if value is None:
        raise CliError(f"missing required setting: pass {flag} or config key {key}")
    return value


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _cmd_eval(args) -> int:
    config = load_config(args.config)
    dataset_name = resolve(config, "eval.dataset", args.dataset, "glass")
    algo = resolve(config, "eval.algo", args.algo, "j48")
    folds = resolve(config, "eval.folds", args.folds, 10, int)
    seed = resolve(config, "eval.seed", args.seed, 0, int)
    if dataset_name != "glass":
        raise CliError(f"unknown dataset {dataset_name!r}; only 'glass' ships built in")
    if algo not in ALGORITHMS:
        raise CliError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    data = load_glass(None)
    plan = make_folds(data, folds, seed)
    report = evaluate_cv(make_fit(algo, seed=seed), data, plan)
    print(f"=== {algo} on {dataset_name}: {folds}-fold cross-validation, seed {seed} ===")
    print(report.summary())
    return 0


# ---------------------------------------------------------------------------
# compile-rules
# ---------------------------------------------------------------------------


def _glass_rule_base(model):
    from .dataset import GLASS_SCHEMA
    from .kb.builders import GLASS_PROPERTY_MAP, GLASS_SAMPLE, build_glass_ontology

    if model.schema == GLASS_SCHEMA:
        return build_glass_ontology(), GLASS_PROPERTY_MAP, GLASS_SAMPLE

    from .kb.model import KnowledgeBase

    kb = KnowledgeBase()
    kb.add_class("Sample")
    for value in model.schema.class_values:
        kb.add_class(value)
    property_map = {}
    for attr in model.schema.attributes:
        prop = f"has_{attr.name}"
        kb.add_data_property(prop, "Sample")
        property_map[attr.name] = prop
    return kb, property_map, "Sample"


def _cmd_compile_rules(args) -> int:
    from .kb.text import serialize_kb
    from .rulegen import compile_tree_to_rules, review_rules

    config = load_config(args.config)
    model_path = _require(
        resolve(config, "compile_rules.model", args.model, None),
        "--model", "compile_rules.model",
    )
    out_path = _require(
        resolve(config, "compile_rules.out", args.out, None),
        "--out", "compile_rules.out",
    )
    review = resolve(config, "compile_rules.review", args.review, False, bool)
    log_path = resolve(
        config, "compile_rules.review_log", args.review_log, "rules_review.log"
    )
    with open(model_path, "rb") as fh:
        model = load_model(fh.read())
    if not isinstance(model, DecisionTree):
        raise CliError("only decision-tree models compile to rules")
    kb, property_map, base_class = _glass_rule_base(model)
    class_map = {c: c for c in model.schema.class_values}
    rules = compile_tree_to_rules(model, property_map, class_map, base_class=base_class)
    approved = review_rules(
        rules, mode="interactive" if review else "auto", log_path=log_path, kb=kb
    )
    for rule in approved:
        kb.add_rule(rule)
    _write_text(out_path, serialize_kb(kb))
    print(f"compiled {len(rules)} rules, approved {len(approved)} -> {out_path}")
    return 0


# ---------------------------------------------------------------------------
# kb reason
# ---------------------------------------------------------------------------


def _cmd_kb_reason(args) -> int:
    from .kb.text import parse_kb, serialize_kb
    from .reasoner import apply_rules

    config = load_config(args.config)
    in_path = _require(
        resolve(config, "kb.reason.in", args.in_path, None), "--in", "kb.reason.in"
    )
    out_path = _require(
        resolve(config, "kb.reason.out", args.out, None), "--out", "kb.reason.out"
    )
    trace_path = resolve(config, "kb.reason.trace", args.trace, None)
    with open(in_path, encoding="utf-8") as fh:
        kb = parse_kb(fh.read())
    before = len(kb.assertions)
    kb, trace = apply_rules(kb)
    _write_text(out_path, serialize_kb(kb))
    if trace_path is not None:
        _write_text(trace_path, trace.to_text())
    print(
        f"reasoned {in_path}: {before} asserted, "
        f"{len(kb.assertions) - before} inferred -> {out_path}"
    )
    return 0


# ---------------------------------------------------------------------------
# mission run / mission online
# ---------------------------------------------------------------------------


def _cmd_mission_run(args) -> int:
    from .pipeline.mission import (
        DEFAULT_PERSISTENCE,
        DEFAULT_SCALE,
        DEFAULT_WINDOW_S,
        run_experiment2,
    )

    config = load_config(args.config)
    scenario = resolve(config, "mission.run.scenario", args.scenario, "all")
    scale = resolve(config, "mission.run.scale", args.scale, DEFAULT_SCALE, float)
    seed = resolve(config, "mission.run.seed", args.seed, 0, int)
    window_s = resolve(config, "mission.run.window_s", args.window_s, DEFAULT_WINDOW_S, float)
    persistence = resolve(
        config, "mission.run.persistence", args.persistence, DEFAULT_PERSISTENCE, int
    )
    report_path = resolve(config, "mission.run.report", args.report, None)
    kinds = SCENARIO_KINDS if scenario == "all" else (scenario,)
    report = run_experiment2(
        scenario_kinds=kinds,
        scale=scale,
        seed=seed,
        window_s=window_s,
        persistence=persistence,
    )
    if report_path is not None:
        _write_json(report_path, report.to_dict())
    print(report.summary())
    return 0


def _cmd_mission_online(args) -> int:
    from .pipeline.online import run_online

    config = load_config(args.config)
    scenario = resolve(config, "mission.online.scenario", args.scenario, "baseline")
    from .pipeline.mission import DEFAULT_PERSISTENCE, DEFAULT_SCALE, DEFAULT_WINDOW_S

    scale = resolve(config, "mission.online.scale", args.scale, DEFAULT_SCALE, float)
    seed = resolve(config, "mission.online.seed", args.seed, 0, int)
    window_s = resolve(
        config, "mission.online.window_s", args.window_s, DEFAULT_WINDOW_S, float
    )
    persistence = resolve(
        config, "mission.online.persistence", args.persistence, DEFAULT_PERSISTENCE, int
    )
    train_fraction = resolve(
        config, "mission.online.train_fraction", args.train_fraction, 0.4, float
    )
    queue_capacity = resolve(
        config, "mission.online.queue_capacity", args.queue_capacity, 8, int
    )
    report_path = resolve(config, "mission.online.report", args.report, None)
    report = run_online(
        kind=scenario,
        scale=scale,
        seed=seed,
        window_s=window_s,
        persistence=persistence,
        train_fraction=train_fraction,
        queue_capacity=queue_capacity,
    )
    if report_path is not None:
        _write_json(report_path, report.to_dict())
    mode = "degraded (rules only)" if report.fallback else "trained in loop"
    print(
        f"online mission {report.scenario}: verdict={report.final_verdict} "
        f"({report.final_condition}), windows={len(report.windows)}, "
        f"dropped={report.dropped_windows}, {mode}"
    )
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _cmd_bench_space(args) -> int:
    from .pipeline.bench import DEFAULT_SPACE_SCALES, bench_space

    config = load_config(args.config)
    out_path = resolve(config, "bench.space.out", args.out, None)
    seed = resolve(config, "bench.space.seed", args.seed, None, int)
    table = bench_space(DEFAULT_SPACE_SCALES, seed=seed)
    csv_text = table.to_csv()
    if out_path is not None:
        _write_text(out_path, csv_text)
    else:
        print(csv_text, end="")
    fit = table.fit()
    ratios = [row.ratio for row in table.rows]
    print(
        f"linear fit of kb_bytes vs scale: R^2 = {fit.r_squared:.6f}; "
        f"kb/raw ratio {min(ratios):.2f}-{max(ratios):.2f}"
    )
    return 0


def _cmd_bench_time(args) -> int:
    from .pipeline.bench import DEFAULT_TIME_SCALES, bench_time, growth_exponent

    config = load_config(args.config)
    out_path = resolve(config, "bench.time.out", args.out, None)
    seed = resolve(config, "bench.time.seed", args.seed, None, int)
    table = bench_time(DEFAULT_TIME_SCALES, seed=seed)
    csv_text = table.to_csv()
    if out_path is not None:
        _write_text(out_path, csv_text)
    else:
        print(csv_text, end="")
    print(f"log-log growth exponent of reason_ms vs scale: {growth_exponent(table):.3f}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_config_flag(parser) -> None:
    parser.add_argument("--config", help="key = value settings file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tierkb",
        description="Learned classifiers coupled to an ontology-backed rule reasoner.",
    )
    commands = parser.add_subparsers(dest="command")

    p = commands.add_parser("eval", help="cross-validate a learner on the sample table")
    p.add_argument("--dataset", help="dataset name (default glass)")
    p.add_argument("--algo", help=f"one of {', '.join(ALGORITHMS)} (default j48)")
    p.add_argument("--folds", type=int, help="fold count (default 10)")
    p.add_argument("--seed", type=int, help="fold-plan and learner seed (default 0)")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_eval)

    p = commands.add_parser(
        "compile-rules", help="compile a saved decision tree into a rule document"
    )
    p.add_argument("--model", help="saved model file (tree kind)")
    p.add_argument("--out", help="output knowledge-base document")
    p.add_argument(
        "--review", action="store_true", default=None,
        help="review each rule interactively before it is kept",
    )
    p.add_argument("--review-log", help="review decision log (default rules_review.log)")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_compile_rules)

    kb = commands.add_parser("kb", help="knowledge-base operations")
    kb_sub = kb.add_subparsers(dest="subcommand")
    p = kb_sub.add_parser("reason", help="saturate a document under axioms and rules")
    p.add_argument("--in", dest="in_path", help="input knowledge-base document")
    p.add_argument("--out", help="output document including inferred facts")
    p.add_argument("--trace", help="also write the inference trace here")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_kb_reason)

    mission = commands.add_parser("mission", help="robot mission diagnosis flows")
    mission_sub = mission.add_subparsers(dest="subcommand")
    p = mission_sub.add_parser("run", help="fault-injection sweep with offline training")
    p.add_argument(
        "--scenario", choices=SCENARIO_KINDS + ("all",),
        help="scenario kind to diagnose (default all)",
    )
    p.add_argument("--scale", type=float, help="mission length factor (default 0.05)")
    p.add_argument("--seed", type=int, help="mission noise seed (default 0)")
    p.add_argument("--window-s", type=float, help="diagnosis window seconds (default 1.0)")
    p.add_argument("--persistence", type=int, help="windows before escalation (default 3)")
    p.add_argument("--report", help="write the JSON report here")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_mission_run)

    p = mission_sub.add_parser("online", help="single mission with in-loop training")
    p.add_argument(
        "--scenario", choices=SCENARIO_KINDS, help="scenario kind (default baseline)"
    )
    p.add_argument("--scale", type=float, help="mission length factor (default 0.05)")
    p.add_argument("--seed", type=int, help="mission noise seed (default 0)")
    p.add_argument("--window-s", type=float, help="diagnosis window seconds (default 1.0)")
    p.add_argument("--persistence", type=int, help="windows before escalation (default 3)")
    p.add_argument(
        "--train-fraction", type=float,
        help="mission fraction buffered before training (default 0.4)",
    )
    p.add_argument("--queue-capacity", type=int, help="window buffer size (default 8)")
    p.add_argument("--report", help="write the JSON report here")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_mission_online)

    bench = commands.add_parser("bench", help="storage and reasoning benchmarks")
    bench_sub = bench.add_subparsers(dest="subcommand")
    p = bench_sub.add_parser("space", help="stored bytes versus table scale")
    p.add_argument("--out", help="write the CSV table here (default stdout)")
    p.add_argument("--seed", type=int, help="table synthesis seed")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_bench_space)
    p = bench_sub.add_parser("time", help="reasoning wall time versus table scale")
    p.add_argument("--out", help="write the CSV table here (default stdout)")
    p.add_argument("--seed", type=int, help="table synthesis seed")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_bench_time)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except TierkbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
