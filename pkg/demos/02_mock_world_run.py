"""
An end-to-end ideation run on a mock world
==========================================

The mock world is a deterministic in-process stand-in for the three
backends (encoder, decoder, judge).  It lets the whole loop run in
milliseconds and makes every artifact byte-reproducible, which is what
the replay check at the end relies on.
"""

from ideonaut import (
    BackendDescriptor,
    Ledger,
    RunConfig,
    load_ledger,
    make_annulus_world,
    register_world,
    replay_record,
    run,
)

# The annulus world places its vocabulary on a ring around a topic
# center: far enough from the known ideas to score as original, close
# enough to stay relevant.  It ships with matching seed texts.
world, seed_texts = make_annulus_world(rng_seed=0)
register_world("demo-annulus", world)
print("vocabulary size:", len(world.vocabulary))
print("seed texts:", seed_texts[:3], "...")

backend = lambda role: BackendDescriptor(role=role, endpoint="mock://demo-annulus")
cfg = RunConfig(
    objective="repurpose a worn-out wooden ruler",
    rng_seed=11,
    seed_texts=tuple(seed_texts),
    iterations=2,
    encoder=backend("encoder"),
    decoder=backend("decoder"),
    judge=backend("judge"),
)

ledger = Ledger()
result = run(cfg, ledger)

print()
print("run", result.config_hash, "stopped:", result.stop_reason)
for report in result.reports:
    print(f"  iteration {report.iteration}: generated {report.generated},"
          f" judged {report.judged}, accepted {report.accepted},"
          f" duplicates {report.duplicates}, filtered {report.filtered},"
          f" manifold {report.manifold_size_before} -> {report.manifold_size_after}")

metrics = result.final_metrics
print("final metrics: originality {:.3f}, fluency {}, flexibility {}".format(
    metrics.originality_mean, metrics.fluency, metrics.flexibility))

# The ledger is append-only JSONL.  Every accepted or rejected candidate
# carries its parents, its lambda or noise seed, and the explored latent,
# so any of them can be recomputed from first principles.
path = "demo_ledger.jsonl"
ledger.write(path)
entries = load_ledger(path)
candidates = [e["id"] for e in entries
              if e.get("kind") == "record" and e["origin"] != "seed"]
print()
print(len(entries), "ledger entries,", len(candidates), "candidate records")

ok, message = replay_record(entries, candidates[0])
print("replay of", candidates[0], "->", message)
assert ok

# Rerunning the identical config reproduces the ledger byte for byte.
second = Ledger()
run(cfg, second)
print("two runs, identical ledgers:", second.to_jsonl() == ledger.to_jsonl())
