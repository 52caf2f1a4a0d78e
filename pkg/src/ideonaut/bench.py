"""Creativity benchmark harness.

Loads task sets and baseline idea files, runs the pipeline once per task
with the baseline ideas as seeds, merges what survived the filter back
into the baseline pool, re-judges the merged pool with one judge
configuration, and aggregates the four divergent-thinking metrics into
fixed-width report tables.

Method rows are emitted per iteration ("Ours (1 iter.)", "Ours (2 iter)",
or plain "Ours" for single-iteration runs) plus one row for the baseline,
so a report block reads like the table the numbers are usually shown in.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SchemaError, TaskMismatch
from .evaluation import MetricReport, compute_metrics, dedup_unique, merge_with_baseline
from .gateway import BackendDescriptor, bounded_parallel_map, encode_texts, judge_idea
from .latent import Embedding
from .pipeline import Ledger, RunConfig, run

BENCHMARKS = ("AUT", "Instances", "Similarities", "Scientific")

_COL_BENCH = 14
_COL_METHOD = 16
_COL_METRIC = 17
_METRIC_HEADERS = ("ORIGINALITY", "ELABORATION", "FLUENCY", "FLEXIBILITY")


@dataclass(frozen=True)
class Task:
    task_id: str
    prompt: str


@dataclass(frozen=True)
class TaskSet:
    benchmark: str
    tasks: tuple[Task, ...]

    def __post_init__(self) -> None:
        if self.benchmark not in BENCHMARKS:
            raise SchemaError(
                f"unknown benchmark {self.benchmark!r}, expected one of {BENCHMARKS}"
            )
        if not self.tasks:
            raise SchemaError("no tasks")
        seen: set[str] = set()
        for task in self.tasks:
            if not task.task_id or not task.task_id.strip():
                raise SchemaError("task_id must be a non-empty string")
            if task.task_id in seen:
                raise SchemaError(f"duplicate task_id: {task.task_id}")
            seen.add(task.task_id)
            if not task.prompt.strip():
                raise SchemaError(f"task {task.task_id} has an empty prompt")


@dataclass(frozen=True)
class BaselineSet:
    benchmark: str
    method: str
    ideas: tuple[tuple[str, tuple[str, ...]], ...]  # (task_id, idea texts)

    def __post_init__(self) -> None:
        if self.benchmark not in BENCHMARKS:
            raise SchemaError(
                f"unknown benchmark {self.benchmark!r}, expected one of {BENCHMARKS}"
            )
        if not self.method.strip():
            raise SchemaError("baseline method label must be non-empty")
        seen: set[str] = set()
        for task_id, texts in self.ideas:
            if task_id in seen:
                raise SchemaError(f"duplicate baseline task_id: {task_id}")
            seen.add(task_id)
            if not texts:
                raise SchemaError(f"baseline task {task_id} has no ideas")
            if any(not t.strip() for t in texts):
                raise SchemaError(f"baseline task {task_id} has a blank idea")

    def for_task(self, task_id: str) -> tuple[str, ...] | None:
        for tid, texts in self.ideas:
            if tid == task_id:
                return texts
        return None


def _load_json_object(path: str | Path, allowed: set[str]) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
    missing = allowed - set(doc)
    if missing:
        raise SchemaError(f"{path}: missing keys {sorted(missing)}")
    return doc


def load_tasks(path: str | Path) -> TaskSet:
    """Read a task file: {"benchmark": ..., "tasks": [{"task_id", "prompt"}]}."""
    doc = _load_json_object(path, {"benchmark", "tasks"})
    if not isinstance(doc["tasks"], list):
        raise SchemaError(f"{path}: tasks must be a list")
    tasks = []
    for item in doc["tasks"]:
        if not isinstance(item, dict) or set(item) != {"task_id", "prompt"}:
            raise SchemaError(f"{path}: each task needs exactly task_id and prompt")
        tasks.append(Task(task_id=item["task_id"], prompt=item["prompt"]))
    return TaskSet(benchmark=doc["benchmark"], tasks=tuple(tasks))


def load_baseline(path: str | Path) -> BaselineSet:
    """Read a baseline file: {"benchmark", "method", "tasks": [{"task_id", "ideas"}]}."""
    doc = _load_json_object(path, {"benchmark", "method", "tasks"})
    if not isinstance(doc["tasks"], list):
        raise SchemaError(f"{path}: tasks must be a list")
    ideas = []
    for item in doc["tasks"]:
        if not isinstance(item, dict) or set(item) != {"task_id", "ideas"}:
            raise SchemaError(f"{path}: each entry needs exactly task_id and ideas")
        if not isinstance(item["ideas"], list) \
                or not all(isinstance(t, str) for t in item["ideas"]):
            raise SchemaError(f"{path}: ideas must be a list of strings")
        ideas.append((item["task_id"], tuple(item["ideas"])))
    return BaselineSet(
        benchmark=doc["benchmark"], method=doc["method"], ideas=tuple(ideas)
    )


@dataclass(frozen=True)
class MethodRow:
    """One method's aggregated numbers, plus the per-task detail behind them."""

    method: str
    originality_mean: float
    originality_std: float
    elaboration_mean: float
    elaboration_std: float
    fluency_mean: float
    fluency_std: float
    flexibility_mean: float
    flexibility_std: float
    per_task: tuple[tuple[str, MetricReport], ...] = ()

    @classmethod
    def from_task_metrics(
        cls, method: str, per_task: dict[str, MetricReport]
    ) -> "MethodRow":
        if not per_task:
            raise ConfigError(f"method {method!r} has no per-task metrics")
        ordered = tuple(sorted(per_task.items()))
        columns = {
            "originality": [m.originality_mean for _, m in ordered],
            "elaboration": [m.elaboration_mean for _, m in ordered],
            "fluency": [float(m.fluency) for _, m in ordered],
            "flexibility": [float(m.flexibility) for _, m in ordered],
        }
        aggregates = {}
        for name, values in columns.items():
            arr = np.asarray(values, dtype=np.float64)
            aggregates[f"{name}_mean"] = float(np.mean(arr))
            aggregates[f"{name}_std"] = float(np.std(arr))
        return cls(method=method, per_task=ordered, **aggregates)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "originality": {"mean": self.originality_mean, "std": self.originality_std},
            "elaboration": {"mean": self.elaboration_mean, "std": self.elaboration_std},
            "fluency": {"mean": self.fluency_mean, "std": self.fluency_std},
            "flexibility": {"mean": self.flexibility_mean, "std": self.flexibility_std},
            "per_task": {tid: m.to_dict() for tid, m in self.per_task},
        }


@dataclass(frozen=True)
class BenchmarkReport:
    benchmark: str
    rows: tuple[MethodRow, ...]

    def to_dict(self) -> dict:
        return {
            "benchmark": self.benchmark,
            "rows": [row.to_dict() for row in self.rows],
        }


def method_label(iteration: int, total_iterations: int) -> str:
    """Row label for our method after a given iteration.

    Single-iteration runs get the bare label.  Multi-iteration runs
    label each snapshot; the first iteration traditionally carries a
    trailing period in its abbreviation while later ones do not, and the
    rendered tables keep that quirk so rows collate with prior reports.
    """
    if total_iterations == 1:
        return "Ours"
    if iteration == 1:
        return "Ours (1 iter.)"
    return f"Ours ({iteration} iter)"


def task_rng_seed(base_seed: int, task_id: str) -> int:
    """Stable per-task seed so tasks are independent but reproducible."""
    digest = hashlib.sha256(f"{base_seed}:{task_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class _BenchIdea:
    text: str
    embedding: Embedding
    task_id: str


def _judge_all(texts: list[str], objective: str,
               judge: BackendDescriptor) -> list:
    cards = bounded_parallel_map(
        lambda t: judge_idea(t, objective, judge),
        texts, max_parallel=judge.max_parallel,
    )
    for text, card in zip(texts, cards):
        if isinstance(card, Exception):
            raise card
    return cards


def _metrics_for_pool(pool: list[_BenchIdea], objective: str,
                      judge: BackendDescriptor) -> MetricReport:
    cards = _judge_all([idea.text for idea in pool], objective, judge)
    return compute_metrics(cards, list(range(len(pool))))


def run_benchmark(tasks: TaskSet, baseline: BaselineSet,
                  cfg: RunConfig) -> BenchmarkReport:
    """Run the pipeline per task and report baseline vs merged metrics.

    The baseline ideas double as the run's seeds: the pipeline treats
    them as entry points and everything it accepts extends the pool.
    All metric rows are computed over de-duplicated pools re-judged with
    the run's judge backend, so baseline and merged numbers are directly
    comparable (an empty accept set reproduces the baseline row exactly).
    """
    if tasks.benchmark != baseline.benchmark:
        raise TaskMismatch(
            f"task set is {tasks.benchmark}, baseline is {baseline.benchmark}"
        )
    known_ids = {t.task_id for t in tasks.tasks}
    for task_id, _ in baseline.ideas:
        if task_id not in known_ids:
            raise TaskMismatch(f"baseline covers unknown task: {task_id}")
    for task in tasks.tasks:
        if baseline.for_task(task.task_id) is None:
            raise ConfigError(f"baseline coverage gap: {task.task_id}")

    per_iteration: dict[int, dict[str, MetricReport]] = {
        k: {} for k in range(1, cfg.iterations + 1)
    }
    baseline_metrics: dict[str, MetricReport] = {}

    for task in tasks.tasks:
        baseline_texts = baseline.for_task(task.task_id)
        assert baseline_texts is not None
        task_cfg = replace(
            cfg,
            objective=task.prompt,
            seed_texts=baseline_texts,
            task_id=task.task_id,
            rng_seed=task_rng_seed(cfg.rng_seed, task.task_id),
        )
        ledger = Ledger()
        try:
            run(task_cfg, ledger)
        except Exception as exc:
            # keep the original type (exit-code mapping depends on it),
            # just prefix the failing task's id
            exc.args = (f"task {task.task_id}: {exc}",)
            raise

        embeddings = encode_texts(list(baseline_texts), cfg.encoder)
        baseline_pool = [
            _BenchIdea(text=t, embedding=e, task_id=task.task_id)
            for t, e in zip(baseline_texts, embeddings)
        ]
        accepted = [r for r in ledger.records() if r.accepted]

        baseline_only = merge_with_baseline(baseline_pool, [])
        baseline_metrics[task.task_id] = _metrics_for_pool(
            baseline_only, task.prompt, cfg.judge
        )
        for k in per_iteration:
            ours_k = [r for r in accepted if r.iteration <= k]
            merged = merge_with_baseline(baseline_pool, ours_k)
            per_iteration[k][task.task_id] = _metrics_for_pool(
                merged, task.prompt, cfg.judge
            )

    rows = [
        MethodRow.from_task_metrics(method_label(k, cfg.iterations), per_iteration[k])
        for k in sorted(per_iteration, reverse=True)
    ]
    rows.append(MethodRow.from_task_metrics(baseline.method, baseline_metrics))
    return BenchmarkReport(benchmark=tasks.benchmark, rows=tuple(rows))


def _metric_cell(mean: float, std: float) -> str:
    return f"{mean:>6.3f} {std:.3f}"


def render_table(report: BenchmarkReport) -> str:
    """Fixed-width text table for one benchmark's report.

    Pure function of the report contents; three decimals everywhere,
    benchmark name printed on the block's first row only.
    """
    header_1 = (
        "BENCHMARK".ljust(_COL_BENCH)
        + "METHOD".ljust(_COL_METHOD)
        + "".join(h.ljust(_COL_METRIC) for h in _METRIC_HEADERS)
    ).rstrip()
    header_2 = (
        " " * (_COL_BENCH + _COL_METHOD)
        + (f"{'Mean':>6} Std.".ljust(_COL_METRIC)) * len(_METRIC_HEADERS)
    ).rstrip()

    lines = [header_1, header_2]
    for i, row in enumerate(report.rows):
        bench_cell = report.benchmark if i == 0 else ""
        cells = [
            _metric_cell(row.originality_mean, row.originality_std),
            _metric_cell(row.elaboration_mean, row.elaboration_std),
            _metric_cell(row.fluency_mean, row.fluency_std),
            _metric_cell(row.flexibility_mean, row.flexibility_std),
        ]
        lines.append(
            (
                bench_cell.ljust(_COL_BENCH)
                + row.method.ljust(_COL_METHOD)
                + "".join(c.ljust(_COL_METRIC) for c in cells)
            ).rstrip()
        )

    width = max(len(line) for line in lines)
    lines.insert(2, "-" * width)
    return "\n".join(lines) + "\n"


def render_tables(reports: list[BenchmarkReport]) -> str:
    return "\n".join(render_table(r) for r in reports)


def baseline_pool_metrics(
    baseline_texts: list[str], objective: str,
    encoder: BackendDescriptor, judge: BackendDescriptor,
) -> MetricReport:
    """Metrics of a baseline idea list alone, bypassing the harness loop.

    Exists so reports can be cross-checked against a direct computation:
    encode, de-duplicate, judge, fold.  Uses the exact same primitives
    as `run_benchmark`, called in the open.
    """
    embeddings = encode_texts(baseline_texts, encoder)
    kept = dedup_unique(list(zip(baseline_texts, embeddings)))
    texts = [baseline_texts[i] for i in kept]
    cards = _judge_all(texts, objective, judge)
    return compute_metrics(cards, list(range(len(texts))))
