"""Command-line entry point.

Four subcommands:

    ideonaut ideate --config run.json [overrides]   run the pipeline
    ideonaut bench --config run.json [overrides]    run benchmark suites
    ideonaut replay LEDGER RECORD_ID                audit one record's provenance
    ideonaut print-config --config run.json [...]   show the resolved settings

Exit codes: 0 success, 1 configuration or input problem, 2 backend
failure, 3 internal invariant violation.  Everything a run writes is
free of wall-clock data, so rerunning with the same config produces
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bench import load_baseline, load_tasks, render_tables, run_benchmark
from .config import CliConfig, load_config
from .errors import (
    ConfigError,
    IdeonautError,
    InsufficientPopulation,
    JudgeParseError,
    LambdaOutOfRange,
    ProtocolError,
    SchemaError,
    StrategyError,
    TaskMismatch,
    TransportError,
    WeightsFormatError,
)
from .pipeline import Ledger, RunConfig, config_hash, load_ledger, replay_record, run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BACKEND = 2
EXIT_INTERNAL = 3

_CONFIG_ERRORS = (
    ConfigError, SchemaError, TaskMismatch, InsufficientPopulation,
    StrategyError, LambdaOutOfRange, WeightsFormatError,
)
_BACKEND_ERRORS = (TransportError, ProtocolError, JudgeParseError)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _classify(exc: Exception) -> int:
    if isinstance(exc, _CONFIG_ERRORS):
        return EXIT_CONFIG
    if isinstance(exc, _BACKEND_ERRORS):
        return EXIT_BACKEND
    return EXIT_INTERNAL


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--rng-seed", type=int, default=None,
                        help="override run.rng_seed")
    parser.add_argument("--output-dir", default=None,
                        help="override the output directory")
    for role in ("encoder", "decoder", "judge"):
        parser.add_argument(f"--backend-{role}", default=None, metavar="URL",
                            help=f"override the {role} endpoint")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ideonaut",
        description="latent-space ideation runs, benchmarks, and audits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ideate = sub.add_parser("ideate", help="run the ideation pipeline")
    _add_override_flags(p_ideate)
    p_ideate.add_argument("--seeds", default=None, metavar="PATH",
                          help="text file of seed ideas, one per line "
                               "(skips seed generation)")
    p_ideate.add_argument("--iterations", type=int, default=None,
                          help="override run.iterations")

    p_bench = sub.add_parser("bench", help="run configured benchmark suites")
    _add_override_flags(p_bench)

    p_replay = sub.add_parser("replay", help="verify one record's provenance")
    p_replay.add_argument("ledger", help="ledger JSONL file")
    p_replay.add_argument("record_id", help="record id to recompute")

    p_print = sub.add_parser("print-config", help="show the resolved config")
    _add_override_flags(p_print)
    p_print.add_argument("--seeds", default=None, metavar="PATH")
    p_print.add_argument("--iterations", type=int, default=None)

    return parser


def _read_seed_file(path: str) -> tuple[str, ...]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"seed file not found: {path}") from None
    seeds = tuple(line.strip() for line in text.splitlines() if line.strip())
    if not seeds:
        raise ConfigError(f"seed file has no usable lines: {path}")
    return seeds


def _apply_overrides(cli: CliConfig, args: argparse.Namespace) -> CliConfig:
    """Fold command-line flags over the file config; flags win."""
    run_cfg = cli.run
    if run_cfg is not None:
        changes = {}
        if getattr(args, "seeds", None) is not None:
            changes["seed_texts"] = _read_seed_file(args.seeds)
        if getattr(args, "iterations", None) is not None:
            changes["iterations"] = args.iterations
        for role in ("encoder", "decoder", "judge"):
            endpoint = getattr(args, f"backend_{role}", None)
            if endpoint is not None:
                changes[role] = replace(getattr(run_cfg, role), endpoint=endpoint)
        if changes:
            run_cfg = replace(run_cfg, **changes)
    output_dir = args.output_dir if args.output_dir is not None else cli.output_dir
    return CliConfig(run=run_cfg, bench=cli.bench, output_dir=output_dir)


def _resolved_snapshot(cli: CliConfig) -> dict:
    snapshot: dict = {"output_dir": cli.output_dir}
    if cli.run is not None:
        snapshot["config_hash"] = config_hash(cli.run)
        snapshot["run"] = cli.run.to_dict()
    if cli.bench:
        snapshot["bench"] = [
            {"tasks": spec.tasks_path, "baseline": spec.baseline_path}
            for spec in cli.bench
        ]
    return snapshot


def _dump_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")


def _require_run(cli: CliConfig) -> RunConfig:
    if cli.run is None:
        raise ConfigError("config has no run section")
    return cli.run


def cmd_ideate(args: argparse.Namespace) -> int:
    cli = _apply_overrides(load_config(args.config, args.rng_seed), args)
    cfg = _require_run(cli)

    out = Path(cli.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(out / "resolved_config.json", _resolved_snapshot(cli))

    ledger = Ledger()
    try:
        result = run(cfg, ledger)
    finally:
        # partial ledgers are still worth keeping when a backend dies
        if ledger.entries:
            ledger.write(out / "ledger.jsonl")

    accepted = [r for r in ledger.records() if r.accepted]
    (out / "accepted.jsonl").write_text(
        "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in accepted),
        encoding="utf-8",
    )
    _dump_json(out / "metrics.json", {
        "final": None if result.final_metrics is None
        else result.final_metrics.to_dict(),
        "iterations": [r.to_dict() for r in result.reports],
    })
    _dump_json(out / "run_result.json", result.to_dict())

    print(f"run {result.config_hash}: {len(result.accepted_ids)} accepted "
          f"over {result.iterations_completed} iteration(s), "
          f"stop: {result.stop_reason}")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    cli = _apply_overrides(load_config(args.config, args.rng_seed), args)
    cfg = _require_run(cli)
    if not cli.bench:
        raise ConfigError("config has no bench section")

    reports = []
    for spec in cli.bench:
        tasks = load_tasks(spec.tasks_path)
        baseline = load_baseline(spec.baseline_path)
        reports.append(run_benchmark(tasks, baseline, cfg))

    out = Path(cli.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(out / "resolved_config.json", _resolved_snapshot(cli))
    table_text = render_tables(reports)
    (out / "bench_report.txt").write_text(table_text, encoding="utf-8")
    _dump_json(out / "bench_report.json", {
        "config_hash": config_hash(cfg),
        "reports": [r.to_dict() for r in reports],
    })
    print(table_text, end="")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    entries = load_ledger(args.ledger)
    ok, message = replay_record(entries, args.record_id)
    if ok:
        print(f"REPLAY OK: {message}")
        return EXIT_OK
    lookup_problem = any(
        marker in message
        for marker in ("record not found", "seed record", "missing from ledger",
                       "no stored explored")
    )
    if lookup_problem:
        return _fail(message, EXIT_CONFIG)
    print(f"REPLAY MISMATCH: {message}")
    return EXIT_CONFIG


def cmd_print_config(args: argparse.Namespace) -> int:
    cli = _apply_overrides(load_config(args.config, args.rng_seed), args)
    print(json.dumps(_resolved_snapshot(cli), sort_keys=True, indent=1))
    return EXIT_OK


_COMMANDS = {
    "ideate": cmd_ideate,
    "bench": cmd_bench,
    "replay": cmd_replay,
    "print-config": cmd_print_config,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except IdeonautError as exc:
        return _fail(str(exc), _classify(exc))
    except OSError as exc:
        return _fail(str(exc), EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
