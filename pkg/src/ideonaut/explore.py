"""Candidate generation over the manifold of known-valid ideas.

One call to :func:`generate_candidates` turns the current manifold into
a batch of new candidate embeddings, expansion_factor per member, using
a pluggable strategy. The built-in strategies are pair interpolation
(the workhorse: blend two random members with a sampled coefficient),
pair extrapolation (same formula, coefficient outside [0, 1]), and
Gaussian perturbation of a single member.

Every candidate records enough provenance (parent ids, the exact
coefficient or noise seed used) that its embedding can be recomputed
bit-for-bit later. All sampling flows through a caller-owned
numpy Generator, so a fixed seed fixes the whole batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientPopulation, StrategyError
from .latent import Embedding, interpolate, perturb

# Strategies producing each candidate from TWO distinct parents.
PAIRWISE_KINDS = ("interpolation", "extrapolation")

# sigma fallback for the noise strategy, as a fraction of the manifold's
# mean embedding norm (keeps noise scale-relative across encoders).
NOISE_SIGMA_FRACTION = 0.05

_NOISE_SEED_MAX = 2**63 - 1


@dataclass(frozen=True)
class StrategyConfig:
    """How candidates are made: which operation and its parameter ranges.

    lambda bounds apply to the pairwise kinds; sigma to noise (None means
    "derive from the manifold scale at generation time"). rng_seed seeds
    the batch generator when the caller does not pass its own.
    """

    kind: str = "interpolation"
    lambda_min: float = 0.45
    lambda_max: float = 0.55
    sigma: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.lambda_min > self.lambda_max:
            raise StrategyError(
                f"lambda_min {self.lambda_min} exceeds lambda_max {self.lambda_max}"
            )
        if self.sigma is not None and self.sigma < 0:
            raise StrategyError(f"sigma must be non-negative, got {self.sigma}")

    def validate_strict(self) -> None:
        """Full per-kind invariants, enforced on configs that drive real runs.

        (Tests may construct out-of-regime configs directly, e.g. noise with
        sigma forced to 0.)
        """
        if self.kind not in _STRATEGIES:
            raise StrategyError(
                f"unknown strategy kind {self.kind!r}; registered: {strategy_kinds()}"
            )
        if self.kind == "interpolation":
            if not (0.0 <= self.lambda_min <= self.lambda_max <= 1.0):
                raise StrategyError(
                    "interpolation needs 0 <= lambda_min <= lambda_max <= 1, "
                    f"got [{self.lambda_min}, {self.lambda_max}]"
                )
        elif self.kind == "extrapolation":
            # the whole [min, max] interval must avoid [0, 1]
            if not (self.lambda_max < 0.0 or self.lambda_min > 1.0):
                raise StrategyError(
                    f"extrapolation range [{self.lambda_min}, {self.lambda_max}] "
                    "must not intersect [0, 1]"
                )
        elif self.kind == "noise":
            if self.sigma is not None and self.sigma <= 0:
                raise StrategyError("noise strategy needs sigma > 0 (or None to auto-scale)")


@dataclass(frozen=True)
class ExpansionSchedule:
    """Population growth per stage: expansion_factor candidates per member."""

    expansion_factor: int = 5
    stages_per_iteration: int = 1

    def __post_init__(self):
        if self.expansion_factor < 1:
            raise StrategyError(f"expansion_factor must be >= 1, got {self.expansion_factor}")
        if self.stages_per_iteration < 1:
            raise StrategyError(
                f"stages_per_iteration must be >= 1, got {self.stages_per_iteration}"
            )


@dataclass(frozen=True)
class Candidate:
    """A proposed embedding plus the provenance needed to replay it."""

    embedding: Embedding
    parents: tuple[str, ...]
    lambda_used: float | None = None
    sigma_used: float | None = None
    noise_seed: int | None = None


@dataclass(frozen=True)
class CandidateBatch:
    candidates: tuple[Candidate, ...]
    stage_index: int


Members = Sequence[tuple[str, Embedding]]
StrategyFn = Callable[[Members, StrategyConfig, int, np.random.Generator], list[Candidate]]

_STRATEGIES: dict[str, StrategyFn] = {}


def register_strategy(kind: str):
    """Register a candidate-generation strategy under `kind`.

    New strategies plug in without touching the pipeline; the function
    receives (members, config, count, rng) and returns `count` candidates.
    """

    def wrap(fn: StrategyFn) -> StrategyFn:
        _STRATEGIES[kind] = fn
        return fn

    return wrap


def strategy_kinds() -> tuple[str, ...]:
    return tuple(sorted(_STRATEGIES))


def sample_pair(manifold_ids: Sequence[str], rng: np.random.Generator) -> tuple[str, str]:
    """Draw two distinct ids uniformly without replacement."""
    n = len(manifold_ids)
    if n < 2:
        raise InsufficientPopulation(
            f"insufficient population: pairwise sampling needs >= 2 ideas, have {n}"
        )
    i, j = rng.choice(n, size=2, replace=False)
    return manifold_ids[int(i)], manifold_ids[int(j)]


def lambda_draw(lambda_min: float, lambda_max: float, rng: np.random.Generator) -> float:
    """Uniform draw in [lambda_min, lambda_max]."""
    if lambda_min > lambda_max:
        raise StrategyError(f"inverted bounds: [{lambda_min}, {lambda_max}]")
    return float(rng.uniform(lambda_min, lambda_max))


@register_strategy("interpolation")
def _interpolation_strategy(members: Members, cfg: StrategyConfig, count: int,
                            rng: np.random.Generator) -> list[Candidate]:
    ids = [m[0] for m in members]
    by_id = dict(members)
    out = []
    for _ in range(count):
        pa, pb = sample_pair(ids, rng)
        lam = lambda_draw(cfg.lambda_min, cfg.lambda_max, rng)
        out.append(Candidate(
            embedding=interpolate(by_id[pa], by_id[pb], lam),
            parents=(pa, pb),
            lambda_used=lam,
        ))
    return out


@register_strategy("extrapolation")
def _extrapolation_strategy(members: Members, cfg: StrategyConfig, count: int,
                            rng: np.random.Generator) -> list[Candidate]:
    from .latent import extrapolate  # local: keeps module top uncluttered

    ids = [m[0] for m in members]
    by_id = dict(members)
    out = []
    for _ in range(count):
        pa, pb = sample_pair(ids, rng)
        lam = lambda_draw(cfg.lambda_min, cfg.lambda_max, rng)
        out.append(Candidate(
            embedding=extrapolate(by_id[pa], by_id[pb], lam),
            parents=(pa, pb),
            lambda_used=lam,
        ))
    return out


@register_strategy("noise")
def _noise_strategy(members: Members, cfg: StrategyConfig, count: int,
                    rng: np.random.Generator) -> list[Candidate]:
    ids = [m[0] for m in members]
    by_id = dict(members)
    sigma = cfg.sigma
    if sigma is None:
        mean_norm = float(np.mean([e.norm() for _, e in members]))
        sigma = NOISE_SIGMA_FRACTION * mean_norm
    out = []
    for _ in range(count):
        pid = ids[int(rng.integers(len(ids)))]
        seed = int(rng.integers(0, _NOISE_SEED_MAX))
        out.append(Candidate(
            embedding=perturb(by_id[pid], sigma, seed),
            parents=(pid,),
            sigma_used=sigma,
            noise_seed=seed,
        ))
    return out


def generate_candidates(manifold: Members, strategy: StrategyConfig,
                        schedule: ExpansionSchedule,
                        rng: np.random.Generator | None = None,
                        stage_index: int = 0) -> CandidateBatch:
    """Produce exactly expansion_factor * len(manifold) candidates.

    `manifold` is the sampling view of the valid-ideas set: ordered
    (id, embedding) pairs. Pairwise strategies need at least 2 members.
    When rng is None a fresh PCG64 generator is seeded from
    strategy.rng_seed; passing a generator lets a coordinator thread the
    same stream through consecutive stages.
    """
    members = list(manifold)
    if not members:
        raise InsufficientPopulation("empty manifold: nothing to explore from")
    if strategy.kind in PAIRWISE_KINDS and len(members) < 2:
        raise InsufficientPopulation(
            f"insufficient population: {strategy.kind} needs >= 2 ideas, have {len(members)}"
        )
    try:
        fn = _STRATEGIES[strategy.kind]
    except KeyError:
        raise StrategyError(
            f"unknown strategy kind {strategy.kind!r}; registered: {strategy_kinds()}"
        ) from None
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(strategy.rng_seed))
    count = schedule.expansion_factor * len(members)
    candidates = fn(members, strategy, count, rng)
    if len(candidates) != count:
        raise StrategyError(
            f"strategy {strategy.kind!r} returned {len(candidates)} candidates, expected {count}"
        )
    return CandidateBatch(candidates=tuple(candidates), stage_index=stage_index)


def replay_candidate(cand: Candidate, parents: dict[str, Embedding],
                     kind: str) -> Embedding:
    """Recompute a candidate's embedding from its recorded provenance."""
    from .latent import extrapolate

    if kind == "interpolation":
        a, b = (parents[p] for p in cand.parents)
        return interpolate(a, b, cand.lambda_used)
    if kind == "extrapolation":
        a, b = (parents[p] for p in cand.parents)
        return extrapolate(a, b, cand.lambda_used)
    if kind == "noise":
        (a,) = (parents[p] for p in cand.parents)
        return perturb(a, cand.sigma_used, cand.noise_seed)
    raise StrategyError(f"cannot replay candidates of kind {kind!r}")
