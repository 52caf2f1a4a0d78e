"""Latent-space ideation: explore an embedding space of ideas and keep score.

The package is organized as a pipeline of small, independently testable
layers.  `latent` holds the vector arithmetic, `explore` turns a manifold
of accepted ideas into candidate latents, `projector` maps encoder space
into a decoder's token space, `gateway` talks to model backends over a
small wire protocol, `evaluation` scores and de-duplicates, `pipeline`
runs the loop and writes replayable ledgers, and `bench` aggregates runs
into comparison tables.  `mockworld` provides deterministic in-process
backends so everything above is testable without a model server.
"""

from ideonaut.bench import (
    BaselineSet,
    BenchmarkReport,
    MethodRow,
    Task,
    TaskSet,
    load_baseline,
    load_tasks,
    method_label,
    render_table,
    render_tables,
    run_benchmark,
)
from ideonaut.errors import (
    ConfigError,
    DimensionMismatch,
    IdeonautError,
    InsufficientPopulation,
    JudgeParseError,
    LambdaOutOfRange,
    MetricsError,
    ProtocolError,
    ReplayMismatch,
    SchemaError,
    StrategyError,
    TaskMismatch,
    TransportError,
    WeightsFormatError,
    ZeroNormError,
)
from ideonaut.evaluation import (
    MetricReport,
    ScoreCard,
    accept,
    compute_metrics,
    dedup_unique,
    merge_with_baseline,
    normalize_text,
)
from ideonaut.explore import (
    Candidate,
    CandidateBatch,
    ExpansionSchedule,
    StrategyConfig,
    generate_candidates,
    replay_candidate,
)
from ideonaut.gateway import (
    BackendDescriptor,
    DecodeRequest,
    decode_latent,
    decode_plain,
    encode_texts,
    judge_idea,
    run_contract_checks,
)
from ideonaut.latent import (
    Embedding,
    cosine_similarity,
    extrapolate,
    interpolate,
    perturb,
    renormalize,
)
from ideonaut.mockworld import (
    MockWorld,
    load_world,
    make_annulus_world,
    register_world,
    save_world,
)
from ideonaut.pipeline import (
    IdeaRecord,
    IterationReport,
    Ledger,
    Manifold,
    RunConfig,
    RunResult,
    config_hash,
    load_ledger,
    replay_record,
    run,
    run_iteration,
)
from ideonaut.projector import (
    Layer,
    ProjectedLatent,
    ProjectorWeights,
    identity_projector,
    load_weights,
    project,
    save_weights,
)

__version__ = "0.1.0"

__all__ = [
    "BackendDescriptor",
    "BaselineSet",
    "BenchmarkReport",
    "Candidate",
    "CandidateBatch",
    "ConfigError",
    "DecodeRequest",
    "DimensionMismatch",
    "Embedding",
    "ExpansionSchedule",
    "IdeaRecord",
    "IdeonautError",
    "InsufficientPopulation",
    "IterationReport",
    "JudgeParseError",
    "LambdaOutOfRange",
    "Layer",
    "Ledger",
    "Manifold",
    "MethodRow",
    "MetricReport",
    "MetricsError",
    "MockWorld",
    "ProjectedLatent",
    "ProjectorWeights",
    "ProtocolError",
    "ReplayMismatch",
    "RunConfig",
    "RunResult",
    "SchemaError",
    "ScoreCard",
    "StrategyConfig",
    "StrategyError",
    "Task",
    "TaskMismatch",
    "TaskSet",
    "TransportError",
    "WeightsFormatError",
    "ZeroNormError",
    "accept",
    "compute_metrics",
    "config_hash",
    "cosine_similarity",
    "decode_latent",
    "decode_plain",
    "dedup_unique",
    "encode_texts",
    "extrapolate",
    "generate_candidates",
    "identity_projector",
    "interpolate",
    "judge_idea",
    "load_baseline",
    "load_ledger",
    "load_tasks",
    "load_weights",
    "load_world",
    "make_annulus_world",
    "merge_with_baseline",
    "method_label",
    "normalize_text",
    "perturb",
    "project",
    "register_world",
    "renormalize",
    "render_table",
    "render_tables",
    "replay_candidate",
    "replay_record",
    "run",
    "run_benchmark",
    "run_contract_checks",
    "run_iteration",
    "save_weights",
    "save_world",
]
