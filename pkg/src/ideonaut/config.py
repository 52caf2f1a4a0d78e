"""Strict config-file parsing for the command line.

The file is JSON with up to three top-level keys:

    {
      "output_dir": "out",
      "run": { ... run settings, see parse_run_section ... },
      "bench": {"benchmarks": [{"tasks": "aut.json", "baseline": "aut_base.json"}]}
    }

Unknown keys are rejected at every level rather than ignored; a typo in
a knob like lambda_max should stop the run, not silently fall back to a
default.  Relative paths inside the file resolve against the file's own
directory, so a config directory can be moved as a unit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .explore import ExpansionSchedule, StrategyConfig
from .gateway import BackendDescriptor
from .pipeline import RunConfig

_BACKEND_KEYS = {"endpoint", "model_name", "timeout", "max_parallel", "retry_limit"}
_STRATEGY_KEYS = {"kind", "lambda_min", "lambda_max", "sigma", "rng_seed"}
_SCHEDULE_KEYS = {"expansion_factor", "stages_per_iteration"}
_RUN_KEYS = {
    "objective", "rng_seed", "backends", "seed_texts", "seed_count",
    "strategy", "schedule", "iterations", "originality_threshold",
    "projector_path", "stop", "renormalize", "decode_instruction",
    "decode_max_tokens",
}
_TOP_KEYS = {"run", "bench", "output_dir"}
_BENCH_KEYS = {"benchmarks"}
_BENCH_ITEM_KEYS = {"tasks", "baseline"}

DEFAULT_OUTPUT_DIR = "ideonaut-out"


@dataclass(frozen=True)
class BenchSpec:
    tasks_path: str
    baseline_path: str


@dataclass(frozen=True)
class CliConfig:
    run: RunConfig | None
    bench: tuple[BenchSpec, ...]
    output_dir: str


def _reject_unknown(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _parse_backend(role: str, doc, base_dir: Path) -> BackendDescriptor:
    if not isinstance(doc, dict):
        raise ConfigError(f"backends.{role} must be an object")
    _reject_unknown(doc, _BACKEND_KEYS, f"backends.{role}")
    if "endpoint" not in doc:
        raise ConfigError(f"backends.{role}: endpoint is required")
    endpoint = doc["endpoint"]
    # mock worlds referenced by file path travel with the config
    if isinstance(endpoint, str) and endpoint.startswith("mock://"):
        candidate = _resolve(base_dir, endpoint.split("://", 1)[1])
        if candidate.is_file():
            endpoint = f"mock://{candidate}"
    kwargs = {k: doc[k] for k in _BACKEND_KEYS - {"endpoint"} if k in doc}
    return BackendDescriptor(role=role, endpoint=endpoint, **kwargs)


def _parse_strategy(doc) -> StrategyConfig:
    if not isinstance(doc, dict):
        raise ConfigError("run.strategy must be an object")
    _reject_unknown(doc, _STRATEGY_KEYS, "run.strategy")
    return StrategyConfig(**doc)


def _parse_schedule(doc) -> ExpansionSchedule:
    if not isinstance(doc, dict):
        raise ConfigError("run.schedule must be an object")
    _reject_unknown(doc, _SCHEDULE_KEYS, "run.schedule")
    return ExpansionSchedule(**doc)


def parse_run_section(doc: dict, base_dir: Path,
                      rng_seed_override: int | None = None) -> RunConfig:
    """Build a RunConfig from the file's "run" object.

    rng_seed must come from the file or the command line; there is no
    default seed, so no run is accidentally nondeterministic.
    """
    if not isinstance(doc, dict):
        raise ConfigError("run section must be an object")
    _reject_unknown(doc, _RUN_KEYS, "run")

    rng_seed = rng_seed_override if rng_seed_override is not None \
        else doc.get("rng_seed")
    if rng_seed is None:
        raise ConfigError("run.rng_seed is required (pass it or use --rng-seed)")
    if isinstance(rng_seed, bool) or not isinstance(rng_seed, int):
        raise ConfigError(f"run.rng_seed must be an integer, got {rng_seed!r}")

    backends_doc = doc.get("backends")
    if not isinstance(backends_doc, dict):
        raise ConfigError("run.backends must be an object")
    _reject_unknown(backends_doc, {"encoder", "decoder", "judge"}, "run.backends")
    missing = {"encoder", "decoder", "judge"} - set(backends_doc)
    if missing:
        raise ConfigError(f"run.backends: missing {sorted(missing)}")

    kwargs = {}
    if "seed_texts" in doc:
        texts = doc["seed_texts"]
        if texts is not None:
            if not isinstance(texts, list) or \
                    not all(isinstance(t, str) for t in texts):
                raise ConfigError("run.seed_texts must be a list of strings")
            texts = tuple(texts)
        kwargs["seed_texts"] = texts
    if "strategy" in doc:
        kwargs["strategy"] = _parse_strategy(doc["strategy"])
    if "schedule" in doc:
        kwargs["schedule"] = _parse_schedule(doc["schedule"])
    if "projector_path" in doc and doc["projector_path"] is not None:
        kwargs["projector_path"] = str(_resolve(base_dir, doc["projector_path"]))
    for key in ("seed_count", "iterations", "originality_threshold", "stop",
                "renormalize", "decode_instruction", "decode_max_tokens"):
        if key in doc:
            kwargs[key] = doc[key]

    try:
        return RunConfig(
            objective=doc.get("objective", ""),
            rng_seed=rng_seed,
            encoder=_parse_backend("encoder", backends_doc["encoder"], base_dir),
            decoder=_parse_backend("decoder", backends_doc["decoder"], base_dir),
            judge=_parse_backend("judge", backends_doc["judge"], base_dir),
            **kwargs,
        )
    except TypeError as exc:
        raise ConfigError(f"run section: {exc}") from exc


def _resolve(base_dir: Path, path: str) -> Path:
    p = Path(path)
    return p if p.is_absolute() else base_dir / p


def _parse_bench_section(doc, base_dir: Path) -> tuple[BenchSpec, ...]:
    if not isinstance(doc, dict):
        raise ConfigError("bench section must be an object")
    _reject_unknown(doc, _BENCH_KEYS, "bench")
    items = doc.get("benchmarks")
    if not isinstance(items, list) or not items:
        raise ConfigError("bench.benchmarks must be a non-empty list")
    specs = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ConfigError(f"bench.benchmarks[{i}] must be an object")
        _reject_unknown(item, _BENCH_ITEM_KEYS, f"bench.benchmarks[{i}]")
        missing = _BENCH_ITEM_KEYS - set(item)
        if missing:
            raise ConfigError(f"bench.benchmarks[{i}]: missing {sorted(missing)}")
        specs.append(BenchSpec(
            tasks_path=str(_resolve(base_dir, item["tasks"])),
            baseline_path=str(_resolve(base_dir, item["baseline"])),
        ))
    return tuple(specs)


def load_config(path: str | Path,
                rng_seed_override: int | None = None) -> CliConfig:
    """Parse and validate one config file."""
    file_path = Path(path)
    try:
        doc = json.loads(file_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "config")

    base_dir = file_path.parent
    run_cfg = None
    if "run" in doc:
        run_cfg = parse_run_section(doc["run"], base_dir, rng_seed_override)
    bench = ()
    if "bench" in doc:
        bench = _parse_bench_section(doc["bench"], base_dir)

    output_dir = doc.get("output_dir", DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir.strip():
        raise ConfigError("output_dir must be a non-empty string")
    return CliConfig(run=run_cfg, bench=bench,
                     output_dir=str(_resolve(base_dir, output_dir)))
