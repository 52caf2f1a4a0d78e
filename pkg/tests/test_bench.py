"""Harness behavior: file schemas, labels, merged metrics, table rendering.

The end-to-end cases run on a registered mock world whose geometry makes
verdicts predictable, so fluency comparisons and baseline cross-checks
are exact rather than statistical.
"""

import hashlib
import json
from pathlib import Path

import pytest

from ideonaut.bench import (
    BaselineSet,
    BenchmarkReport,
    MethodRow,
    Task,
    TaskSet,
    baseline_pool_metrics,
    load_baseline,
    load_tasks,
    method_label,
    render_table,
    render_tables,
    run_benchmark,
    task_rng_seed,
)
from ideonaut.errors import ConfigError, SchemaError, TaskMismatch
from ideonaut.gateway import BackendDescriptor
from ideonaut.mockworld import make_annulus_world, register_world
from ideonaut.pipeline import RunConfig

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_table.txt"

WORLD, _ = make_annulus_world(rng_seed=0)
register_world("bench-annulus", WORLD)
VOCAB_TEXTS = [entry.text for entry in WORLD.vocabulary]

STALE_WORLD, _ = make_annulus_world(rng_seed=3)
from dataclasses import replace as _dc_replace  # noqa: E402

STALE_WORLD = _dc_replace(
    STALE_WORLD, known_texts=tuple(e.text for e in STALE_WORLD.vocabulary)
)
register_world("bench-stale", STALE_WORLD)
STALE_TEXTS = [entry.text for entry in STALE_WORLD.vocabulary]


def backends(name: str) -> dict:
    endpoint = f"mock://{name}"
    return {
        "encoder": BackendDescriptor(role="encoder", endpoint=endpoint),
        "decoder": BackendDescriptor(role="decoder", endpoint=endpoint),
        "judge": BackendDescriptor(role="judge", endpoint=endpoint),
    }


def template_config(world: str, **overrides) -> RunConfig:
    fields = dict(objective="", rng_seed=11, iterations=2, **backends(world))
    fields.update(overrides)
    return RunConfig(**fields)


def annulus_fixture() -> tuple[TaskSet, BaselineSet]:
    tasks = TaskSet(
        benchmark="AUT",
        tasks=(
            Task("aut-01", "unusual uses for a wooden ruler"),
            Task("aut-02", "unusual uses for a tin can"),
        ),
    )
    baseline = BaselineSet(
        benchmark="AUT",
        method="LLM Discussion",
        ideas=(
            ("aut-01", tuple(VOCAB_TEXTS[0:4])),
            ("aut-02", tuple(VOCAB_TEXTS[4:8])),
        ),
    )
    return tasks, baseline


class TestTaskSetValidation:
    def test_unknown_benchmark(self):
        with pytest.raises(SchemaError, match="unknown benchmark"):
            TaskSet(benchmark="Puzzles", tasks=(Task("t1", "p"),))

    def test_no_tasks(self):
        with pytest.raises(SchemaError, match="no tasks"):
            TaskSet(benchmark="AUT", tasks=())

    def test_duplicate_task_id(self):
        with pytest.raises(SchemaError, match="duplicate task_id"):
            TaskSet(benchmark="AUT", tasks=(Task("t1", "a"), Task("t1", "b")))

    def test_blank_prompt(self):
        with pytest.raises(SchemaError, match="empty prompt"):
            TaskSet(benchmark="AUT", tasks=(Task("t1", "  "),))


class TestBaselineSetValidation:
    def test_empty_ideas(self):
        with pytest.raises(SchemaError, match="no ideas"):
            BaselineSet(benchmark="AUT", method="m", ideas=(("t1", ()),))

    def test_blank_idea(self):
        with pytest.raises(SchemaError, match="blank idea"):
            BaselineSet(benchmark="AUT", method="m", ideas=(("t1", ("ok", " ")),))

    def test_duplicate_task(self):
        with pytest.raises(SchemaError, match="duplicate baseline task_id"):
            BaselineSet(benchmark="AUT", method="m",
                        ideas=(("t1", ("a",)), ("t1", ("b",))))

    def test_blank_method(self):
        with pytest.raises(SchemaError, match="method label"):
            BaselineSet(benchmark="AUT", method="", ideas=(("t1", ("a",)),))


class TestTaskFileLoading:
    def write(self, tmp_path, doc) -> Path:
        path = tmp_path / "tasks.json"
        path.write_text(json.dumps(doc))
        return path

    def test_ten_prompts_load_as_ten_tasks(self, tmp_path):
        doc = {
            "benchmark": "AUT",
            "tasks": [{"task_id": f"aut-{i:02d}", "prompt": f"uses for object {i}"}
                      for i in range(10)],
        }
        tasks = load_tasks(self.write(tmp_path, doc))
        assert len(tasks.tasks) == 10
        assert tasks.benchmark == "AUT"
        assert tasks.tasks[3].task_id == "aut-03"

    def test_duplicate_task_id_rejected(self, tmp_path):
        doc = {"benchmark": "AUT",
               "tasks": [{"task_id": "x", "prompt": "a"},
                         {"task_id": "x", "prompt": "b"}]}
        with pytest.raises(SchemaError, match="duplicate task_id"):
            load_tasks(self.write(tmp_path, doc))

    def test_empty_list_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="no tasks"):
            load_tasks(self.write(tmp_path, {"benchmark": "AUT", "tasks": []}))

    def test_unknown_keys_rejected(self, tmp_path):
        doc = {"benchmark": "AUT", "tasks": [], "comment": "hi"}
        with pytest.raises(SchemaError, match="unknown keys"):
            load_tasks(self.write(tmp_path, doc))

    def test_missing_keys_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="missing keys"):
            load_tasks(self.write(tmp_path, {"benchmark": "AUT"}))

    def test_extra_task_fields_rejected(self, tmp_path):
        doc = {"benchmark": "AUT",
               "tasks": [{"task_id": "x", "prompt": "a", "difficulty": 3}]}
        with pytest.raises(SchemaError, match="exactly task_id and prompt"):
            load_tasks(self.write(tmp_path, doc))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="file not found"):
            load_tasks(tmp_path / "absent.json")


class TestBaselineFileLoading:
    def test_round_trip(self, tmp_path):
        doc = {
            "benchmark": "Instances",
            "method": "LLM Discussion",
            "tasks": [{"task_id": "ins-01", "ideas": ["a thing", "another"]}],
        }
        path = tmp_path / "baseline.json"
        path.write_text(json.dumps(doc))
        baseline = load_baseline(path)
        assert baseline.method == "LLM Discussion"
        assert baseline.for_task("ins-01") == ("a thing", "another")
        assert baseline.for_task("nope") is None

    def test_ideas_must_be_strings(self, tmp_path):
        doc = {"benchmark": "AUT", "method": "m",
               "tasks": [{"task_id": "x", "ideas": ["ok", 5]}]}
        path = tmp_path / "baseline.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaError, match="list of strings"):
            load_baseline(path)


class TestMethodLabel:
    def test_single_iteration_is_unsuffixed(self):
        assert method_label(1, 1) == "Ours"

    def test_multi_iteration_labels(self):
        assert method_label(1, 2) == "Ours (1 iter.)"
        assert method_label(2, 2) == "Ours (2 iter)"
        assert method_label(3, 3) == "Ours (3 iter)"


class TestTaskRngSeed:
    def test_matches_hash_construction(self):
        # recompute the derivation by hand
        digest = hashlib.sha256(b"11:aut-01").digest()
        expected = int.from_bytes(digest[:8], "big")
        assert task_rng_seed(11, "aut-01") == expected

    def test_distinct_tasks_get_distinct_seeds(self):
        seeds = {task_rng_seed(11, f"t-{i}") for i in range(20)}
        assert len(seeds) == 20

    def test_stable(self):
        assert task_rng_seed(7, "x") == task_rng_seed(7, "x")


def paper_style_reports() -> list[BenchmarkReport]:
    """The fixture behind the golden file: published aggregate numbers."""

    def row(method, o, e, fl, fx):
        return MethodRow(
            method=method,
            originality_mean=o[0], originality_std=o[1],
            elaboration_mean=e[0], elaboration_std=e[1],
            fluency_mean=fl[0], fluency_std=fl[1],
            flexibility_mean=fx[0], flexibility_std=fx[1],
        )

    return [
        BenchmarkReport("AUT", (
            row("Ours (2 iter)", (4.160, 0.192), (3.152, 0.610),
                (12.150, 5.177), (11.467, 3.169)),
            row("Ours (1 iter.)", (4.154, 0.197), (3.130, 0.610),
                (11.775, 5.540), (11.042, 2.737)),
            row("LLM Discussion", (4.148, 0.198), (3.116, 0.619),
                (11.108, 5.088), (11.525, 3.613)),
        )),
        BenchmarkReport("Instances", (
            row("Ours", (4.150, 0.590), (2.108, 0.537),
                (11.908, 11.415), (10.308, 2.722)),
            row("LLM Discussion", (4.149, 0.590), (2.117, 0.542),
                (11.233, 11.406), (10.575, 2.775)),
        )),
        BenchmarkReport("Similarities", (
            row("Ours", (3.467, 0.341), (1.744, 0.281),
                (8.960, 4.396), (13.725, 4.428)),
            row("LLM Discussion", (3.464, 0.341), (1.744, 0.280),
                (8.733, 4.374), (13.625, 4.459)),
        )),
        BenchmarkReport("Scientific", (
            row("Ours", (3.518, 0.708), (2.059, 0.663),
                (7.508, 5.606), (8.333, 2.811)),
            row("LLM Discussion", (3.510, 0.707), (2.049, 0.657),
                (7.217, 5.547), (8.358, 2.849)),
        )),
    ]


class TestRenderTable:
    def test_matches_golden_file(self):
        rendered = render_tables(paper_style_reports())
        assert rendered == GOLDEN_PATH.read_text(encoding="utf-8")

    def test_reference_pair_appears_verbatim(self):
        rendered = render_table(paper_style_reports()[0])
        assert "4.160 0.192" in rendered
        assert "Ours (2 iter)" in rendered
        assert "Ours (1 iter.)" in rendered

    def test_three_decimal_rounding(self):
        report = BenchmarkReport("AUT", (
            MethodRow(
                method="Ours",
                originality_mean=13.0 / 3.0, originality_std=0.0,
                elaboration_mean=1.0, elaboration_std=0.0,
                fluency_mean=2.0, fluency_std=0.0,
                flexibility_mean=1.0, flexibility_std=0.0,
            ),
        ))
        assert "4.333" in render_table(report)

    def test_single_method_has_one_data_row(self):
        report = BenchmarkReport("AUT", (paper_style_reports()[0].rows[0],))
        lines = render_table(report).splitlines()
        # two header lines, one separator, one data row
        assert len(lines) == 4
        assert lines[3].startswith("AUT")

    def test_pure_function(self):
        report = paper_style_reports()[0]
        assert render_table(report) == render_table(report)


class TestRunBenchmark:
    def run_fixture(self, **overrides) -> BenchmarkReport:
        tasks, baseline = annulus_fixture()
        cfg = template_config("bench-annulus", **overrides)
        return run_benchmark(tasks, baseline, cfg)

    def test_row_labels_and_order(self):
        report = self.run_fixture()
        assert [row.method for row in report.rows] == [
            "Ours (2 iter)", "Ours (1 iter.)", "LLM Discussion",
        ]
        assert report.benchmark == "AUT"

    def test_every_row_covers_every_task(self):
        report = self.run_fixture()
        for row in report.rows:
            assert [tid for tid, _ in row.per_task] == ["aut-01", "aut-02"]

    def test_fluency_never_below_baseline(self):
        report = self.run_fixture()
        ours_rows = [r for r in report.rows if r.method.startswith("Ours")]
        baseline_row = report.rows[-1]
        baseline_by_task = dict(baseline_row.per_task)
        for row in ours_rows:
            for task_id, metrics in row.per_task:
                base = baseline_by_task[task_id]
                assert metrics.fluency >= base.fluency
                assert metrics.flexibility >= base.flexibility
        # the annulus geometry guarantees the pipeline actually adds ideas
        total_ours = sum(m.fluency for _, m in ours_rows[0].per_task)
        total_base = sum(m.fluency for _, m in baseline_row.per_task)
        assert total_ours > total_base

    def test_second_iteration_never_below_first(self):
        report = self.run_fixture()
        two, one = report.rows[0], report.rows[1]
        for (tid_a, m2), (tid_b, m1) in zip(two.per_task, one.per_task):
            assert tid_a == tid_b
            assert m2.fluency >= m1.fluency

    def test_baseline_row_matches_direct_computation(self):
        tasks, baseline = annulus_fixture()
        cfg = template_config("bench-annulus")
        report = run_benchmark(tasks, baseline, cfg)
        baseline_row = report.rows[-1]
        for task in tasks.tasks:
            direct = baseline_pool_metrics(
                list(baseline.for_task(task.task_id)),
                task.prompt, cfg.encoder, cfg.judge,
            )
            harness = dict(baseline_row.per_task)[task.task_id]
            assert harness == direct

    def test_deterministic(self):
        a = self.run_fixture()
        b = self.run_fixture()
        assert json.dumps(a.to_dict(), sort_keys=True) == \
            json.dumps(b.to_dict(), sort_keys=True)
        assert render_table(a) == render_table(b)

    def test_empty_accepts_reproduce_baseline_exactly(self):
        # in the stale world every decodable text is already known, so
        # originality pins at 1 and nothing passes the filter
        tasks = TaskSet(
            benchmark="AUT",
            tasks=(Task("t1", "uses for a brick"), Task("t2", "uses for a cup")),
        )
        baseline = BaselineSet(
            benchmark="AUT", method="LLM Discussion",
            ideas=(("t1", tuple(STALE_TEXTS[0:4])),
                   ("t2", tuple(STALE_TEXTS[4:8]))),
        )
        cfg = template_config("bench-stale", iterations=1)
        report = run_benchmark(tasks, baseline, cfg)
        assert [row.method for row in report.rows] == ["Ours", "LLM Discussion"]
        ours, base = report.rows
        assert dict(ours.per_task) == dict(base.per_task)
        assert ours.to_dict()["originality"] == base.to_dict()["originality"]
        assert ours.fluency_mean == base.fluency_mean

    def test_benchmark_mismatch(self):
        tasks, _ = annulus_fixture()
        baseline = BaselineSet(benchmark="Instances", method="m",
                               ideas=(("aut-01", ("a", "b")),))
        with pytest.raises(TaskMismatch, match="Instances"):
            run_benchmark(tasks, baseline, template_config("bench-annulus"))

    def test_coverage_gap_names_the_task(self):
        tasks, _ = annulus_fixture()
        baseline = BaselineSet(benchmark="AUT", method="m",
                               ideas=(("aut-01", tuple(VOCAB_TEXTS[0:4])),))
        with pytest.raises(ConfigError, match="baseline coverage gap: aut-02"):
            run_benchmark(tasks, baseline, template_config("bench-annulus"))

    def test_unknown_baseline_task_rejected(self):
        tasks, _ = annulus_fixture()
        baseline = BaselineSet(
            benchmark="AUT", method="m",
            ideas=(("aut-01", tuple(VOCAB_TEXTS[0:4])),
                   ("aut-02", tuple(VOCAB_TEXTS[4:8])),
                   ("aut-99", ("stray",))),
        )
        with pytest.raises(TaskMismatch, match="aut-99"):
            run_benchmark(tasks, baseline, template_config("bench-annulus"))

    def test_pipeline_errors_carry_task_context(self):
        tasks = TaskSet(benchmark="AUT", tasks=(Task("solo", "prompt"),))
        baseline = BaselineSet(benchmark="AUT", method="m",
                               ideas=(("solo", (VOCAB_TEXTS[0],)),))
        with pytest.raises(Exception, match="task solo"):
            run_benchmark(tasks, baseline, template_config("bench-annulus"))
