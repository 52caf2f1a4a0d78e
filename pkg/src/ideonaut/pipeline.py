"""The diverge-evaluate-converge loop.

One iteration samples parents from the manifold of known valid ideas,
explores new latent points (interpolation, extrapolation, or noise),
projects them into the decoder's token space, decodes them to text,
judges the texts, and folds the survivors back into the manifold.

Everything the loop does is written to an append-only JSONL ledger:
one line per idea record (seeds, failures, rejects, and accepts alike)
plus per-iteration summaries.  Ledger lines carry full provenance, so
any non-seed record's latent can be recomputed bit-for-bit from its
parents; nothing in a ledger depends on wall-clock time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    InsufficientPopulation,
    ProtocolError,
    ZeroNormError,
)
from .evaluation import (
    DEFAULT_ORIGINALITY_THRESHOLD,
    MetricReport,
    ScoreCard,
    accept,
    compute_metrics,
    normalize_text,
)
from .explore import (
    PAIRWISE_KINDS,
    Candidate,
    ExpansionSchedule,
    StrategyConfig,
    generate_candidates,
)
from .gateway import (
    BackendDescriptor,
    DecodeRequest,
    bounded_parallel_map,
    decode_latent,
    decode_plain,
    encode_texts,
    judge_idea,
)
from .latent import Embedding, renormalize
from .projector import ProjectorWeights, identity_projector, load_weights, project

LEDGER_SCHEMA = "ideonaut-ledger/1"

ORIGINS = ("seed", "interpolation", "extrapolation", "noise")

STOP_MODES = ("fixed_iterations", "no_new_accepts")

#: Wrapped around the soft token when decoding an explored latent.  The
#: exact wording is a configuration default, not a claim about any
#: particular upstream system's prompt.
DEFAULT_DECODE_INSTRUCTION = (
    "Rewrite the concept [X] as one concrete, specific idea for the "
    "objective, in a single short sentence."
)

_UNIT_TOL = 1e-6


@dataclass(frozen=True)
class IdeaRecord:
    """One idea with full provenance, as written to the ledger.

    `embedding` is the encoder's embedding of the decoded text (the
    coordinates the manifold lives in); `explored` is the pre-decode
    latent the candidate was generated at, kept so replay can verify it.
    A candidate that failed to decode has no text and no embedding.
    """

    id: str
    text: str
    origin: str
    parents: tuple[str, ...]
    iteration: int
    embedding: Embedding | None = None
    explored: Embedding | None = None
    lambda_used: float | None = None
    sigma_used: float | None = None
    noise_seed: int | None = None
    renormalized: bool = False
    stage: int = 0
    scores: ScoreCard | None = None
    accepted: bool = False
    rejection_reason: str | None = None
    task_id: str | None = None

    def __post_init__(self) -> None:
        if self.origin not in ORIGINS:
            raise ConfigError(f"unknown origin: {self.origin!r}")
        if self.origin == "seed":
            if self.parents:
                raise ConfigError("seed records have no parents")
        elif self.origin == "noise":
            if len(self.parents) != 1 or self.sigma_used is None:
                raise ConfigError("noise records need 1 parent and sigma_used")
        else:
            if len(self.parents) != 2 or self.lambda_used is None:
                raise ConfigError(
                    f"{self.origin} records need 2 parents and lambda_used"
                )
        if self.accepted and self.scores is None:
            raise ConfigError("accepted records must carry scores")
        if self.iteration < 0:
            raise ConfigError("iteration must be non-negative")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "origin": self.origin,
            "parents": list(self.parents),
            "iteration": self.iteration,
            "embedding": None if self.embedding is None else self.embedding.to_list(),
            "explored": None if self.explored is None else self.explored.to_list(),
            "lambda_used": self.lambda_used,
            "sigma_used": self.sigma_used,
            "noise_seed": self.noise_seed,
            "renormalized": self.renormalized,
            "stage": self.stage,
            "scores": None if self.scores is None else self.scores.to_dict(),
            "accepted": self.accepted,
            "rejection_reason": self.rejection_reason,
            "task_id": self.task_id,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IdeaRecord":
        def emb(key):
            value = doc.get(key)
            return None if value is None else Embedding(
                np.asarray(value, dtype=np.float64)
            )

        return cls(
            id=doc["id"],
            text=doc["text"],
            origin=doc["origin"],
            parents=tuple(doc["parents"]),
            iteration=doc["iteration"],
            embedding=emb("embedding"),
            explored=emb("explored"),
            lambda_used=doc.get("lambda_used"),
            sigma_used=doc.get("sigma_used"),
            noise_seed=doc.get("noise_seed"),
            renormalized=doc.get("renormalized", False),
            stage=doc.get("stage", 0),
            scores=None if doc.get("scores") is None
            else ScoreCard.from_dict(doc["scores"]),
            accepted=doc["accepted"],
            rejection_reason=doc.get("rejection_reason"),
            task_id=doc.get("task_id"),
        )


class Manifold:
    """Append-only collection of the ideas exploration may sample from.

    Seeds enter unjudged (they are given, not filtered); every other
    member must carry scores that pass the accept rule, re-checked here
    so a bug upstream cannot slip a failing card in.  Records are never
    removed.
    """

    def __init__(self, objective: str) -> None:
        self.objective = objective
        self._records: dict[str, IdeaRecord] = {}
        self._order: list[str] = []

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._order)

    def get(self, record_id: str) -> IdeaRecord:
        return self._records[record_id]

    def records(self) -> list[IdeaRecord]:
        return [self._records[i] for i in self._order]

    def members(self) -> list[tuple[str, Embedding]]:
        out = []
        for i in self._order:
            record = self._records[i]
            assert record.embedding is not None
            out.append((i, record.embedding))
        return out

    def _admit(self, record: IdeaRecord) -> None:
        if record.id in self._records:
            raise ConfigError(f"duplicate record id: {record.id}")
        if record.embedding is None:
            raise ConfigError("manifold members need an embedding")
        self._records[record.id] = record
        self._order.append(record.id)

    def add_seed(self, record: IdeaRecord) -> None:
        if record.origin != "seed":
            raise ConfigError(f"add_seed got origin {record.origin!r}")
        self._admit(record)

    def add_accepted(
        self, record: IdeaRecord,
        threshold: int = DEFAULT_ORIGINALITY_THRESHOLD,
    ) -> None:
        if record.origin == "seed":
            raise ConfigError("seeds enter through add_seed")
        if not record.accepted or record.scores is None:
            raise ConfigError(f"record {record.id} is not accepted")
        if not accept(record.scores, threshold):
            raise ConfigError(
                f"record {record.id} marked accepted but fails the accept rule"
            )
        self._admit(record)

    def duplicate_of(self, text: str, embedding: Embedding,
                     cosine_threshold: float = 0.98) -> str | None:
        """Id of an existing member this idea duplicates, if any."""
        norm = normalize_text(text)
        e_norm = embedding.norm()
        for i in self._order:
            record = self._records[i]
            if normalize_text(record.text) == norm:
                return i
            assert record.embedding is not None
            m_norm = record.embedding.norm()
            if e_norm > 0.0 and m_norm > 0.0:
                cos = float(
                    np.dot(record.embedding.values, embedding.values)
                    / (m_norm * e_norm)
                )
                if cos >= cosine_threshold:
                    return i
        return None


@dataclass(frozen=True)
class RunConfig:
    """Everything one reproducible run needs.

    `renormalize=None` means auto-detect: latents are rescaled to unit
    norm after exploration iff every seed embedding is unit norm.
    """

    objective: str
    rng_seed: int
    encoder: BackendDescriptor
    decoder: BackendDescriptor
    judge: BackendDescriptor
    seed_texts: tuple[str, ...] | None = None
    seed_count: int = 8
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    schedule: ExpansionSchedule = field(default_factory=ExpansionSchedule)
    iterations: int = 1
    originality_threshold: int = DEFAULT_ORIGINALITY_THRESHOLD
    projector_path: str | None = None
    stop: str = "fixed_iterations"
    renormalize: bool | None = None
    decode_instruction: str = DEFAULT_DECODE_INSTRUCTION
    decode_max_tokens: int = 64
    task_id: str | None = None

    def __post_init__(self) -> None:
        if self.rng_seed < 0:
            raise ConfigError("rng_seed must be non-negative")
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if not 1 <= self.originality_threshold <= 5:
            raise ConfigError("originality_threshold must be in 1..5")
        if self.stop not in STOP_MODES:
            raise ConfigError(f"stop must be one of {STOP_MODES}")
        if self.seed_count < 1:
            raise ConfigError("seed_count must be positive")
        if self.decode_max_tokens < 1:
            raise ConfigError("decode_max_tokens must be positive")
        if self.seed_texts is not None:
            if not self.seed_texts:
                raise ConfigError("seed_texts, when given, must be non-empty")
            if any(not t.strip() for t in self.seed_texts):
                raise ConfigError("seed_texts must not contain blank entries")
        for role, backend in (("encoder", self.encoder),
                              ("decoder", self.decoder),
                              ("judge", self.judge)):
            if backend.role != role:
                raise ConfigError(
                    f"{role} backend has role {backend.role!r}"
                )
        self.strategy.validate_strict()

    def to_dict(self) -> dict:
        def backend_dict(b: BackendDescriptor) -> dict:
            return {
                "role": b.role, "endpoint": b.endpoint,
                "model_name": b.model_name, "timeout": b.timeout,
                "max_parallel": b.max_parallel, "retry_limit": b.retry_limit,
            }

        return {
            "objective": self.objective,
            "rng_seed": self.rng_seed,
            "encoder": backend_dict(self.encoder),
            "decoder": backend_dict(self.decoder),
            "judge": backend_dict(self.judge),
            "seed_texts": None if self.seed_texts is None else list(self.seed_texts),
            "seed_count": self.seed_count,
            "strategy": {
                "kind": self.strategy.kind,
                "lambda_min": self.strategy.lambda_min,
                "lambda_max": self.strategy.lambda_max,
                "sigma": self.strategy.sigma,
                "rng_seed": self.strategy.rng_seed,
            },
            "schedule": {
                "expansion_factor": self.schedule.expansion_factor,
                "stages_per_iteration": self.schedule.stages_per_iteration,
            },
            "iterations": self.iterations,
            "originality_threshold": self.originality_threshold,
            "projector_path": self.projector_path,
            "stop": self.stop,
            "renormalize": self.renormalize,
            "decode_instruction": self.decode_instruction,
            "decode_max_tokens": self.decode_max_tokens,
            "task_id": self.task_id,
        }


def config_hash(cfg: RunConfig) -> str:
    canonical = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    generated: int
    decoded: int
    decode_failures: int
    judged: int
    judge_failures: int
    accepted: int
    duplicates: int
    filtered: int
    manifold_size_before: int
    manifold_size_after: int
    originality_histogram: dict
    metrics: MetricReport | None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "generated": self.generated,
            "decoded": self.decoded,
            "decode_failures": self.decode_failures,
            "judged": self.judged,
            "judge_failures": self.judge_failures,
            "accepted": self.accepted,
            "duplicates": self.duplicates,
            "filtered": self.filtered,
            "manifold_size_before": self.manifold_size_before,
            "manifold_size_after": self.manifold_size_after,
            "originality_histogram": self.originality_histogram,
            "metrics": None if self.metrics is None else self.metrics.to_dict(),
        }


@dataclass(frozen=True)
class RunResult:
    config_hash: str
    objective: str
    stop_reason: str
    iterations_completed: int
    seed_ids: tuple[str, ...]
    accepted_ids: tuple[str, ...]
    reports: tuple[IterationReport, ...]
    final_metrics: MetricReport | None

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "objective": self.objective,
            "stop_reason": self.stop_reason,
            "iterations_completed": self.iterations_completed,
            "seed_ids": list(self.seed_ids),
            "accepted_ids": list(self.accepted_ids),
            "reports": [r.to_dict() for r in self.reports],
            "final_metrics": (
                None if self.final_metrics is None else self.final_metrics.to_dict()
            ),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


class Ledger:
    """In-memory JSONL ledger; one dict per line, serialized sorted-keys."""

    def __init__(self) -> None:
        self.entries: list[dict] = []

    def append(self, kind: str, **fields) -> None:
        self.entries.append({"kind": kind, **fields})

    def records(self) -> list[IdeaRecord]:
        return [IdeaRecord.from_dict(e) for e in self.entries
                if e.get("kind") == "record"]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.entries)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def load_ledger(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    entries = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entries.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"ledger line {n} is not valid JSON: {exc}") from exc
    if entries and entries[0].get("schema") not in (None, LEDGER_SCHEMA):
        raise ConfigError(f"unsupported ledger schema: {entries[0].get('schema')}")
    return entries


def derive_objective(objective: str, seed_texts: Sequence[str]) -> str:
    """The judging objective: the problem description when present, else a
    one-line summary of the seeds."""
    if objective.strip():
        return objective
    if not seed_texts:
        raise ConfigError("need an objective or seed texts to derive one from")
    head = "; ".join(seed_texts[:3])
    suffix = "; ..." if len(seed_texts) > 3 else ""
    return f"Ideas in the spirit of: {head}{suffix}"


def generate_seeds(objective: str, n: int, backend: BackendDescriptor) -> list[str]:
    """Ask the decoder (plain prompt, no soft token) for n distinct seeds.

    One retry with a doubled request before giving up; duplicates are
    collapsed by normalized text, first spelling wins.
    """
    if n < 1:
        raise ConfigError(f"seed count must be positive, got {n}")

    def ask(count: int) -> list[str]:
        instruction = (
            f"List {count} diverse, high-level ideas, one per line, "
            f"for this objective: {objective}"
        )
        text = decode_plain(instruction, max_tokens=max(1024, 64 * count), backend=backend)
        return [line.strip() for line in text.splitlines() if line.strip()]

    seen: set[str] = set()
    seeds: list[str] = []
    for attempt_count in (n, 2 * n):
        for line in ask(attempt_count):
            key = normalize_text(line)
            if key not in seen:
                seen.add(key)
                seeds.append(line)
        if len(seeds) >= n:
            return seeds[:n]
    raise ProtocolError(
        f"only {len(seeds)} unique seeds after retry, need {n}"
    )


def _load_projector(cfg: RunConfig, encoder_dim: int) -> ProjectorWeights:
    if cfg.projector_path is None:
        return identity_projector(encoder_dim)
    path = Path(cfg.projector_path)
    if not path.is_file():
        raise ConfigError(f"projector weights not found: {path}")
    weights = load_weights(path.read_bytes())
    if weights.input_dim != encoder_dim:
        raise ConfigError(
            f"projector expects input dim {weights.input_dim}, "
            f"encoder produces {encoder_dim}"
        )
    return weights


def _iteration_rng(cfg: RunConfig, iteration: int, stage: int) -> np.random.Generator:
    seq = np.random.SeedSequence((cfg.rng_seed, iteration, stage))
    return np.random.Generator(np.random.PCG64(seq))


def _cumulative_metrics(manifold: Manifold) -> MetricReport | None:
    cards = [r.scores for r in manifold.records() if r.scores is not None]
    if not cards:
        return None
    return compute_metrics(cards, list(range(len(cards))))


@dataclass
class _Runtime:
    cfg: RunConfig
    weights: ProjectorWeights
    unit_space: bool
    objective: str


def _explore_latent(candidate: Candidate, unit_space: bool) -> Embedding | None:
    """The latent actually sent onward; None when renormalizing is impossible."""
    if not unit_space:
        return candidate.embedding
    try:
        return renormalize(candidate.embedding)
    except ZeroNormError:
        return None


def _run_stage(
    runtime: _Runtime,
    manifold: Manifold,
    ledger: Ledger,
    iteration: int,
    stage: int,
    counters: dict,
) -> None:
    cfg = runtime.cfg
    members = manifold.members()
    rng = _iteration_rng(cfg, iteration, stage)
    batch = generate_candidates(
        members, cfg.strategy, cfg.schedule, rng=rng, stage_index=stage
    )
    counters["generated"] += len(batch.candidates)

    # resolve each candidate's outgoing latent, then decode them in bulk
    latents: list[Embedding | None] = [
        _explore_latent(c, runtime.unit_space) for c in batch.candidates
    ]

    def decode_one(latent: Embedding | None):
        if latent is None:
            return ZeroNormError("explored latent has zero norm")
        projected = project(latent, runtime.weights)
        request = DecodeRequest(
            projected=projected,
            instruction=cfg.decode_instruction,
            max_tokens=cfg.decode_max_tokens,
        )
        return decode_latent(request, cfg.decoder)

    decoded = bounded_parallel_map(
        decode_one, latents, max_parallel=cfg.decoder.max_parallel
    )

    texts_to_encode = [t for t in decoded if isinstance(t, str)]
    if texts_to_encode:
        embeddings = iter(encode_texts(texts_to_encode, cfg.encoder))
        text_embeddings = [
            next(embeddings) if isinstance(t, str) else None for t in decoded
        ]
    else:
        text_embeddings = [None] * len(decoded)

    def judge_one(item):
        index, text = item
        if not isinstance(text, str):
            return None
        return judge_idea(text, runtime.objective, cfg.judge)

    verdicts = bounded_parallel_map(
        judge_one, list(enumerate(decoded)), max_parallel=cfg.judge.max_parallel
    )

    # ingest in candidate-index order so the ledger is deterministic
    for index, candidate in enumerate(batch.candidates):
        record_id = f"it{iteration:02d}-st{stage:02d}-c{index:04d}"
        base = dict(
            id=record_id,
            origin=cfg.strategy.kind,
            parents=candidate.parents,
            iteration=iteration,
            stage=stage,
            explored=latents[index],
            lambda_used=candidate.lambda_used,
            sigma_used=candidate.sigma_used,
            noise_seed=candidate.noise_seed,
            renormalized=runtime.unit_space,
            task_id=cfg.task_id,
        )
        outcome = decoded[index]
        if not isinstance(outcome, str):
            counters["decode_failures"] += 1
            record = IdeaRecord(
                text="", embedding=None, scores=None, accepted=False,
                rejection_reason=f"decode failed: {outcome}", **base,
            )
            ledger.append("record", **record.to_dict())
            continue
        counters["decoded"] += 1

        verdict = verdicts[index]
        embedding = text_embeddings[index]
        if isinstance(verdict, Exception) or verdict is None:
            counters["judge_failures"] += 1
            record = IdeaRecord(
                text=outcome, embedding=embedding, scores=None, accepted=False,
                rejection_reason=f"judge failed: {verdict}", **base,
            )
            ledger.append("record", **record.to_dict())
            continue
        counters["judged"] += 1
        counters["originality_histogram"][str(verdict.originality)] = (
            counters["originality_histogram"].get(str(verdict.originality), 0) + 1
        )

        assert embedding is not None
        if not accept(verdict, cfg.originality_threshold):
            counters["filtered"] += 1
            record = IdeaRecord(
                text=outcome, embedding=embedding, scores=verdict, accepted=False,
                rejection_reason=(
                    f"filtered: relevant={verdict.relevant}, "
                    f"originality={verdict.originality}"
                ),
                **base,
            )
        else:
            duplicate = manifold.duplicate_of(outcome, embedding)
            if duplicate is not None:
                counters["duplicates"] += 1
                record = IdeaRecord(
                    text=outcome, embedding=embedding, scores=verdict,
                    accepted=False, rejection_reason=f"duplicate of {duplicate}",
                    **base,
                )
            else:
                counters["accepted"] += 1
                record = IdeaRecord(
                    text=outcome, embedding=embedding, scores=verdict,
                    accepted=True, rejection_reason=None, **base,
                )
                manifold.add_accepted(record, cfg.originality_threshold)
        ledger.append("record", **record.to_dict())


def run_iteration(
    manifold: Manifold,
    cfg: RunConfig,
    iteration: int = 1,
    ledger: Ledger | None = None,
    runtime: "_Runtime | None" = None,
) -> IterationReport:
    """One diverge-evaluate-converge pass over the manifold."""
    if len(manifold) == 0:
        raise InsufficientPopulation("manifold is empty")
    if cfg.strategy.kind in PAIRWISE_KINDS and len(manifold) < 2:
        raise InsufficientPopulation(
            f"{cfg.strategy.kind} needs at least 2 manifold members, "
            f"have {len(manifold)}"
        )
    if ledger is None:
        ledger = Ledger()
    if runtime is None:
        members = manifold.members()
        encoder_dim = members[0][1].dim
        unit_space = (
            cfg.renormalize
            if cfg.renormalize is not None
            else all(abs(e.norm() - 1.0) <= _UNIT_TOL for _, e in members)
        )
        runtime = _Runtime(
            cfg=cfg,
            weights=_load_projector(cfg, encoder_dim),
            unit_space=unit_space,
            objective=derive_objective(
                cfg.objective, [manifold.get(i).text for i in manifold.ids]
            ),
        )

    size_before = len(manifold)
    counters = {
        "generated": 0, "decoded": 0, "decode_failures": 0,
        "judged": 0, "judge_failures": 0, "accepted": 0,
        "duplicates": 0, "filtered": 0, "originality_histogram": {},
    }
    for stage in range(cfg.schedule.stages_per_iteration):
        _run_stage(runtime, manifold, ledger, iteration, stage, counters)

    report = IterationReport(
        iteration=iteration,
        generated=counters["generated"],
        decoded=counters["decoded"],
        decode_failures=counters["decode_failures"],
        judged=counters["judged"],
        judge_failures=counters["judge_failures"],
        accepted=counters["accepted"],
        duplicates=counters["duplicates"],
        filtered=counters["filtered"],
        manifold_size_before=size_before,
        manifold_size_after=len(manifold),
        originality_histogram=counters["originality_histogram"],
        metrics=_cumulative_metrics(manifold),
    )
    ledger.append("iteration_summary", **report.to_dict())
    return report


def _seed_records(
    cfg: RunConfig, seed_texts: Sequence[str],
    embeddings: Sequence[Embedding], unit_space: bool,
) -> list[IdeaRecord]:
    records = []
    for i, (text, embedding) in enumerate(zip(seed_texts, embeddings)):
        stored = renormalize(embedding) if unit_space else embedding
        records.append(
            IdeaRecord(
                id=f"seed-{i:04d}",
                text=text,
                origin="seed",
                parents=(),
                iteration=0,
                embedding=stored,
                renormalized=unit_space and stored != embedding,
                task_id=cfg.task_id,
            )
        )
    return records


def run(cfg: RunConfig, ledger: Ledger | None = None) -> RunResult:
    """Execute a full configured run; returns the result, fills the ledger."""
    if ledger is None:
        ledger = Ledger()

    seed_texts = (
        list(cfg.seed_texts)
        if cfg.seed_texts is not None
        else None
    )
    if seed_texts is not None and cfg.strategy.kind in PAIRWISE_KINDS \
            and len(seed_texts) < 2:
        raise InsufficientPopulation(
            f"{cfg.strategy.kind} needs at least 2 seeds, got {len(seed_texts)}"
        )
    if seed_texts is None:
        objective = derive_objective(cfg.objective, [])
        seed_texts = generate_seeds(objective, cfg.seed_count, cfg.decoder)

    objective = derive_objective(cfg.objective, seed_texts)
    digest = config_hash(cfg)
    ledger.append(
        "run_header", schema=LEDGER_SCHEMA, config_hash=digest,
        objective=objective, config=cfg.to_dict(),
    )

    raw_seed_embeddings = encode_texts(list(seed_texts), cfg.encoder)
    unit_space = (
        cfg.renormalize
        if cfg.renormalize is not None
        else all(abs(e.norm() - 1.0) <= _UNIT_TOL for e in raw_seed_embeddings)
    )

    manifold = Manifold(objective)
    seed_ids = []
    for record in _seed_records(cfg, seed_texts, raw_seed_embeddings, unit_space):
        manifold.add_seed(record)
        ledger.append("record", **record.to_dict())
        seed_ids.append(record.id)

    runtime = _Runtime(
        cfg=cfg,
        weights=_load_projector(cfg, raw_seed_embeddings[0].dim),
        unit_space=unit_space,
        objective=objective,
    )

    reports: list[IterationReport] = []
    stop_reason = "fixed iterations"
    for iteration in range(1, cfg.iterations + 1):
        report = run_iteration(
            manifold, cfg, iteration=iteration, ledger=ledger, runtime=runtime
        )
        reports.append(report)
        if cfg.stop == "no_new_accepts" and report.accepted == 0:
            stop_reason = "no new accepts"
            break

    accepted_ids = tuple(i for i in manifold.ids if manifold.get(i).accepted)
    result = RunResult(
        config_hash=digest,
        objective=objective,
        stop_reason=stop_reason,
        iterations_completed=len(reports),
        seed_ids=tuple(seed_ids),
        accepted_ids=accepted_ids,
        reports=tuple(reports),
        final_metrics=_cumulative_metrics(manifold),
    )
    ledger.append(
        "run_footer", config_hash=digest, stop_reason=stop_reason,
        iterations_completed=len(reports), accepted=len(accepted_ids),
    )
    return result


# ---------------------------------------------------------------------------
# provenance replay

def replay_record(entries: Iterable[dict], record_id: str) -> tuple[bool, str]:
    """Recompute one ledger record's explored latent from its parents.

    Returns (ok, message).  Seeds have no exploration provenance and a
    missing id is reported, both as failures with a telling message.
    """
    from .explore import replay_candidate

    by_id: dict[str, dict] = {}
    for entry in entries:
        if entry.get("kind") == "record":
            by_id[entry["id"]] = entry

    doc = by_id.get(record_id)
    if doc is None:
        return False, f"record not found: {record_id}"
    if doc["origin"] == "seed":
        return False, f"{record_id} is a seed record; nothing to replay"
    if doc.get("explored") is None:
        return False, f"{record_id} has no stored explored latent"

    parents = {}
    for parent_id in doc["parents"]:
        parent = by_id.get(parent_id)
        if parent is None or parent.get("embedding") is None:
            return False, f"parent {parent_id} missing from ledger"
        parents[parent_id] = Embedding(
            np.asarray(parent["embedding"], dtype=np.float64)
        )

    candidate = Candidate(
        embedding=Embedding(np.zeros(1)),  # placeholder, replaced below
        parents=tuple(doc["parents"]),
        lambda_used=doc.get("lambda_used"),
        sigma_used=doc.get("sigma_used"),
        noise_seed=doc.get("noise_seed"),
    )
    try:
        recomputed = replay_candidate(candidate, parents, doc["origin"])
    except Exception as exc:  # noqa: BLE001 - verdict, not control flow
        return False, f"replay computation failed: {exc}"

    if doc.get("renormalized", False):
        try:
            recomputed = renormalize(recomputed)
        except ZeroNormError:
            return False, "stored latent is renormalized but recomputed norm is zero"

    stored = Embedding(np.asarray(doc["explored"], dtype=np.float64))
    if recomputed == stored:
        return True, f"{record_id}: latent replays bit-for-bit"
    return False, f"{record_id}: recomputed latent differs from the ledger"
