"""
Benchmarking against a baseline pool
====================================

A benchmark is a set of tasks plus a baseline pool of ideas per task.
The harness seeds each task's run with the baseline ideas, merges what
the run accepts into the pool, re-judges everything once, and renders
a fixed-width comparison table with one row per method.
"""

from ideonaut import (
    BackendDescriptor,
    BaselineSet,
    RunConfig,
    Task,
    TaskSet,
    make_annulus_world,
    register_world,
    render_tables,
    run_benchmark,
)

world, _ = make_annulus_world(rng_seed=0)
register_world("bench-demo", world)
vocab = [entry.text for entry in world.vocabulary]

# Two alternate-uses tasks.  In a real benchmark each task would carry
# a distinct prompt and a baseline produced by the method under
# comparison; here the mock vocabulary plays both roles.
tasks = TaskSet(benchmark="AUT", tasks=(
    Task(task_id="aut-01", prompt="alternate uses for a worn-out ruler"),
    Task(task_id="aut-02", prompt="alternate uses for a chipped mug"),
))
baseline = BaselineSet(benchmark="AUT", method="Reference pool", ideas=(
    ("aut-01", tuple(vocab[0:4])),
    ("aut-02", tuple(vocab[4:8])),
))

backend = lambda role: BackendDescriptor(role=role, endpoint="mock://bench-demo")
# The template config leaves objective and seeds blank; the harness
# fills them per task from the prompt and the baseline pool.
cfg = RunConfig(
    objective="",
    rng_seed=2024,
    iterations=2,
    encoder=backend("encoder"),
    decoder=backend("decoder"),
    judge=backend("judge"),
)

report = run_benchmark(tasks, baseline, cfg)

# One row per iteration depth, newest first, baseline last.  Fluency
# and flexibility can only grow relative to the baseline row because
# the merged pool contains the baseline pool.
print(render_tables([report]))

for row in report.rows:
    print(f"{row.method:16s} fluency {row.fluency_mean:6.3f}"
          f"  flexibility {row.flexibility_mean:6.3f}")

# The same numbers are available as plain dicts for downstream tooling.
best = report.rows[0]
print()
print("top row as dict keys:", sorted(best.to_dict().keys()))
