"""Acceptance gate: one test per shipping criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v` (add `-s` to see the
[ACCEPTANCE] lines on passing tests).  Each test is self-contained and
recomputes its expectations with independent code paths: hand-rolled
affine math, plain-loop de-duplication, golden files, byte comparisons.
"""

import json
import math
import time
from pathlib import Path

import numpy as np

from ideonaut.bench import BenchmarkReport, MethodRow, render_table, render_tables
from ideonaut.cli import main as cli_main
from ideonaut.evaluation import ScoreCard, accept, compute_metrics, dedup_unique
from ideonaut.explore import ExpansionSchedule, StrategyConfig, generate_candidates
from ideonaut.gateway import BackendDescriptor
from ideonaut.latent import Embedding, interpolate
from ideonaut.mockworld import make_annulus_world, register_world
from ideonaut.pipeline import Ledger, RunConfig, run
from ideonaut.projector import (
    Layer,
    ProjectorWeights,
    identity_projector,
    load_weights,
    project,
    save_weights,
)

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_table.txt"

ACCEPT_WORLD, ACCEPT_SEEDS = make_annulus_world(rng_seed=0)
register_world("accept-annulus", ACCEPT_WORLD)


def _report(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {name}: PASS{suffix}", flush=True)


def _mock_run_config(**overrides) -> RunConfig:
    endpoint = "mock://accept-annulus"
    fields = dict(
        objective="repurpose a worn-out wooden ruler",
        rng_seed=7,
        seed_texts=tuple(ACCEPT_SEEDS),
        iterations=2,
        encoder=BackendDescriptor(role="encoder", endpoint=endpoint),
        decoder=BackendDescriptor(role="decoder", endpoint=endpoint),
        judge=BackendDescriptor(role="judge", endpoint=endpoint),
    )
    fields.update(overrides)
    return RunConfig(**fields)


def test_latent_math_suite():
    """Endpoint identities, symmetry, hull containment, affine oracle."""
    started = time.monotonic()
    rng = np.random.Generator(np.random.PCG64(2024))
    worst = 0.0
    for _ in range(1000):
        dim = int(rng.integers(2, 33))
        a = Embedding(rng.normal(size=dim) * rng.uniform(0.1, 10.0))
        b = Embedding(rng.normal(size=dim) * rng.uniform(0.1, 10.0))
        lam = float(rng.uniform(0.0, 1.0))

        blended = interpolate(a, b, lam)

        # independent per-coordinate affine oracle, plain Python floats
        for k in range(dim):
            expected = lam * float(a.values[k]) + (1.0 - lam) * float(b.values[k])
            got = float(blended.values[k])
            tol = 1e-12 * max(1.0, abs(expected))
            assert abs(got - expected) <= tol, (k, got, expected)
            worst = max(worst, abs(got - expected) / max(1.0, abs(expected)))

        # hull containment, coordinate-wise
        lo = np.minimum(a.values, b.values)
        hi = np.maximum(a.values, b.values)
        assert np.all(blended.values >= lo) and np.all(blended.values <= hi)

        # symmetry under (lam <-> 1-lam) within the same tolerance
        mirrored = interpolate(b, a, 1.0 - lam)
        assert np.allclose(blended.values, mirrored.values, rtol=1e-12, atol=0.0)

    # endpoint identities are exact, not approximate
    a = Embedding(rng.normal(size=8))
    b = Embedding(rng.normal(size=8))
    assert interpolate(a, b, 1.0) == a
    assert interpolate(a, b, 0.0) == b

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"latent math suite took {elapsed:.2f}s"
    _report("latent-math-suite",
            f"1000 triples, worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_experimental_protocol_fidelity():
    """Published exploration regime: lambda window and 5x expansion."""
    strategy = StrategyConfig(kind="interpolation", lambda_min=0.45, lambda_max=0.55)
    schedule = ExpansionSchedule(expansion_factor=5)
    checked = 0
    for seed in range(100):
        rng = np.random.Generator(np.random.PCG64(seed))
        size = int(rng.integers(2, 9))
        members = [
            (f"m{i}", Embedding(rng.normal(size=12))) for i in range(size)
        ]
        batch = generate_candidates(members, strategy, schedule, rng=rng)
        assert len(batch.candidates) == 5 * size
        for cand in batch.candidates:
            assert cand.lambda_used is not None
            assert 0.45 <= cand.lambda_used <= 0.55
            checked += 1
    _report("experimental-protocol-fidelity",
            f"100 seeded runs, {checked} candidates in bounds")


def test_accept_rule_exactness():
    """Exhaustive grid: accept iff relevant and originality >= 4."""
    cases = 0
    for originality in (1, 2, 3, 4, 5):
        for relevant in (False, True):
            card = ScoreCard(originality=originality, relevant=relevant,
                             elaboration=3, category="any")
            expected = relevant and originality >= 4
            assert accept(card) is expected, (originality, relevant)
            cases += 1
    assert cases == 10
    _report("accept-rule-exactness", "10/10 grid cases")


def _brute_force_dedup(texts, vectors, threshold=0.98):
    """Plain-loop greedy dedup; the independent oracle for dedup_unique."""

    def norm_text(t):
        return " ".join(t.casefold().split())

    def norm(v):
        return math.sqrt(math.fsum(x * x for x in v))

    kept = []
    for i in range(len(texts)):
        duplicate = False
        for j in kept:
            if norm_text(texts[i]) == norm_text(texts[j]):
                duplicate = True
                break
            na, nb = norm(vectors[j]), norm(vectors[i])
            if na > 0.0 and nb > 0.0:
                dot = math.fsum(x * y for x, y in zip(vectors[j], vectors[i]))
                if dot / (na * nb) >= threshold:
                    duplicate = True
                    break
        if not duplicate:
            kept.append(i)
    return kept


def _random_idea_set(rng, size):
    """Texts and unit vectors with planted exact and near duplicates."""
    dim = 8
    texts, vectors = [], []
    for i in range(size):
        kind = rng.uniform()
        if texts and kind < 0.2:
            # textual duplicate of an earlier idea, different spelling
            j = int(rng.integers(0, len(texts)))
            texts.append("  " + texts[j].upper() + " ")
            v = rng.normal(size=dim)
            vectors.append(v / np.linalg.norm(v))
        elif texts and kind < 0.4:
            # geometric near-duplicate, cosine about 0.995
            j = int(rng.integers(0, len(texts)))
            base = np.asarray(vectors[j])
            noise = rng.normal(size=dim) * 0.05
            v = base + noise
            texts.append(f"rephrased idea {i}")
            vectors.append(v / np.linalg.norm(v))
        else:
            v = rng.normal(size=dim)
            texts.append(f"idea number {i}")
            vectors.append(v / np.linalg.norm(v))
    return texts, [list(map(float, v)) for v in vectors]


def test_fluency_oracle():
    """dedup_unique vs brute force on 500 sets; fluency counted exactly."""
    rng = np.random.Generator(np.random.PCG64(99))
    sizes = [int(rng.integers(1, 61)) for _ in range(495)] + [200] * 5
    total = 0
    for size in sizes:
        texts, vectors = _random_idea_set(rng, size)
        ideas = [(t, Embedding(np.asarray(v))) for t, v in zip(texts, vectors)]
        kept = dedup_unique(ideas)
        assert kept == _brute_force_dedup(texts, vectors)
        total += size

        # fluency == "number of unique relevant responses", exactly
        flags = [bool(rng.integers(0, 2)) for _ in range(size)]
        cards = [
            ScoreCard(originality=3, relevant=flag, elaboration=2, category="c")
            for flag in flags
        ]
        by_hand = 0
        for i in kept:
            if flags[i]:
                by_hand += 1
        assert compute_metrics(cards, kept).fluency == by_hand
    _report("fluency-oracle", f"500 idea sets, {total} ideas")


def test_mock_world_end_to_end():
    """Two iterations on a reachable world: accepts, growth, no regression."""
    started = time.monotonic()
    assert len(ACCEPT_WORLD.vocabulary) >= 20
    ledger = Ledger()
    result = run(_mock_run_config(), ledger)

    assert len(result.accepted_ids) >= 1
    sizes = []
    for report in result.reports:
        assert report.manifold_size_after >= report.manifold_size_before
        sizes.extend([report.manifold_size_before, report.manifold_size_after])
    assert sizes == sorted(sizes), "manifold shrank between stages"

    first, second = result.reports
    assert first.metrics is not None and second.metrics is not None
    assert second.metrics.originality_mean >= first.metrics.originality_mean

    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"end-to-end run took {elapsed:.2f}s"
    _report("mock-world-end-to-end",
            f"{len(result.accepted_ids)} accepted, "
            f"originality {first.metrics.originality_mean:.3f} -> "
            f"{second.metrics.originality_mean:.3f}, {elapsed:.2f}s")


def test_determinism_and_replay(tmp_path):
    """Byte-identical artifacts across runs; every candidate replays."""
    ledger_a, ledger_b = Ledger(), Ledger()
    result_a = run(_mock_run_config(), ledger_a)
    result_b = run(_mock_run_config(), ledger_b)

    assert ledger_a.to_jsonl() == ledger_b.to_jsonl()
    assert result_a.to_json() == result_b.to_json()
    reports_a = json.dumps([r.to_dict() for r in result_a.reports], sort_keys=True)
    reports_b = json.dumps([r.to_dict() for r in result_b.reports], sort_keys=True)
    assert reports_a == reports_b

    ledger_path = tmp_path / "ledger.jsonl"
    ledger_a.write(ledger_path)
    candidate_ids = [e["id"] for e in ledger_a.entries
                     if e.get("kind") == "record" and e["origin"] != "seed"]
    assert candidate_ids
    for record_id in candidate_ids:
        code = cli_main(["replay", str(ledger_path), record_id])
        assert code == 0, f"replay failed for {record_id}"
    _report("determinism-and-replay",
            f"{len(candidate_ids)} records replayed bit-for-bit")


def test_report_format_golden():
    """Fixture report renders the published table layout byte-for-byte."""

    def row(method, o, e, fl, fx):
        return MethodRow(
            method=method,
            originality_mean=o[0], originality_std=o[1],
            elaboration_mean=e[0], elaboration_std=e[1],
            fluency_mean=fl[0], fluency_std=fl[1],
            flexibility_mean=fx[0], flexibility_std=fx[1],
        )

    reports = [
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
    rendered = render_tables(reports)
    assert rendered == GOLDEN_PATH.read_text(encoding="utf-8")
    aut_table = render_table(reports[0])
    assert "Ours (2 iter)" in aut_table
    assert "Ours (1 iter.)" in aut_table
    assert "4.160 0.192" in aut_table
    _report("report-format-golden", "golden file matches")


def test_projector_contracts():
    """Identity pass-through, linearity without activations, XPRJ1 round trip."""
    rng = np.random.Generator(np.random.PCG64(17))

    # identity round trip is exact
    identity = identity_projector(24)
    x = Embedding(rng.normal(size=24))
    assert np.array_equal(project(x, identity).values, x.values)

    # activation-free stacks are linear maps
    weights = ProjectorWeights(
        layers=(
            Layer(weight=rng.normal(size=(20, 16)).astype("<f4"),
                  bias=np.zeros(20, dtype="<f4"), activation="none"),
            Layer(weight=rng.normal(size=(12, 20)).astype("<f4"),
                  bias=np.zeros(12, dtype="<f4"), activation="none"),
        ),
        input_dim=16, output_dim=12,
    )
    for _ in range(25):
        u = Embedding(rng.normal(size=16))
        v = Embedding(rng.normal(size=16))
        alpha, beta = float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3))
        combined = project(
            Embedding(alpha * u.values + beta * v.values), weights
        ).values
        separate = (alpha * project(u, weights).values
                    + beta * project(v, weights).values)
        scale = np.maximum(1.0, np.abs(separate))
        assert np.all(np.abs(combined - separate) <= 1e-9 * scale)

    # serialize / load is bit-exact and stable
    blob = save_weights(weights)
    loaded = load_weights(blob)
    assert loaded.input_dim == weights.input_dim
    assert loaded.output_dim == weights.output_dim
    for original, reloaded in zip(weights.layers, loaded.layers):
        assert original.weight.tobytes() == reloaded.weight.tobytes()
        assert original.bias.tobytes() == reloaded.bias.tobytes()
        assert original.activation == reloaded.activation
    assert save_weights(loaded) == blob
    _report("projector-contracts", "identity, linearity, XPRJ1 round trip")
