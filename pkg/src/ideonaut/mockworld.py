"""A fully deterministic synthetic backend for offline pipeline runs.

A MockWorld plays all three model roles at once.  Its geometry is simple
enough to reason about by hand:

- encoding a vocabulary text returns that entry's stored unit vector;
  any other text maps to a hash-derived point on the unit sphere,
- decoding returns the vocabulary text whose embedding has the highest
  cosine similarity to the incoming latent (ties break to the lowest
  vocabulary index),
- judging measures two distances: euclidean distance to the objective
  center decides relevancy, and distance to the nearest known text
  quantizes into the 1..5 originality scale.

`handle_request` speaks the same wire protocol as a real model server,
so everything above it (gateway, pipeline, harness) runs unchanged
against either.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, SchemaError
from .latent import Embedding

_UNIT_NORM_TOL = 1e-6
_WORLD_FORMAT = "mockworld/1"

#: Word-count thresholds for the mock elaboration score: fewer than 3 words
#: scores 1, each further 3 words adds a point, capped at 5.
_ELABORATION_WORDS_PER_POINT = 3


@dataclass(frozen=True)
class VocabEntry:
    text: str
    embedding: Embedding
    category: str


@dataclass(frozen=True)
class MockWorld:
    """Synthetic encode/decode/judge backend with hand-checkable geometry."""

    vocabulary: tuple[VocabEntry, ...]
    objective_center: Embedding
    relevance_radius: float
    novelty_floor: float
    dim: int
    known_texts: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        if not self.novelty_floor > 0:
            raise ConfigError("novelty_floor must be positive")
        if not self.relevance_radius > self.novelty_floor:
            raise ConfigError(
                "relevance_radius must exceed novelty_floor "
                f"({self.relevance_radius} vs {self.novelty_floor})"
            )
        if not self.vocabulary:
            raise ConfigError("vocabulary must be non-empty")
        if self.objective_center.dim != self.dim:
            raise ConfigError(
                f"objective_center has dim {self.objective_center.dim}, "
                f"world dim is {self.dim}"
            )
        seen: set[str] = set()
        for i, entry in enumerate(self.vocabulary):
            if entry.text in seen:
                raise ConfigError(f"duplicate vocabulary text: {entry.text!r}")
            seen.add(entry.text)
            if entry.embedding.dim != self.dim:
                raise ConfigError(
                    f"vocabulary[{i}] has dim {entry.embedding.dim}, "
                    f"world dim is {self.dim}"
                )
            if abs(entry.embedding.norm() - 1.0) > _UNIT_NORM_TOL:
                raise ConfigError(
                    f"vocabulary[{i}] is not unit norm ({entry.embedding.norm()})"
                )

    def _vocab_matrix(self) -> np.ndarray:
        return np.stack([entry.embedding.values for entry in self.vocabulary])


def encode_text(world: MockWorld, text: str) -> Embedding:
    """Deterministic embedding of one text.

    Vocabulary texts return their stored vectors.  For any other text the
    embedding is hash-derived: take sha256 of the UTF-8 bytes, seed a
    PCG64 generator with the first 8 digest bytes (big-endian), draw
    `dim` standard normals, and normalize to unit length.  Stable across
    runs and processes by construction.
    """
    for entry in world.vocabulary:
        if entry.text == text:
            return entry.embedding
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "big")))
    while True:
        v = rng.normal(size=world.dim)
        norm = np.linalg.norm(v)
        if norm > 0.0:
            return Embedding(v / norm)


def nearest_vocab_index(world: MockWorld, vector: np.ndarray) -> int:
    """Index of the vocabulary entry most cosine-similar to `vector`.

    Vocabulary vectors are unit norm, so the cosine argmax equals the dot
    product argmax; np.argmax returns the first maximum, which is the
    tie-break rule (lowest index wins).
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (world.dim,):
        raise ConfigError(f"latent has shape {v.shape}, world dim is {world.dim}")
    return int(np.argmax(world._vocab_matrix() @ v))


def decode_vector(world: MockWorld, vector: np.ndarray) -> str:
    return world.vocabulary[nearest_vocab_index(world, vector)].text


def top_vocab_texts(world: MockWorld, k: int) -> list[str]:
    """The k vocabulary texts nearest the objective center, best first."""
    if k < 1:
        raise ConfigError(f"need a positive count, got {k}")
    dots = world._vocab_matrix() @ world.objective_center.values
    order = np.argsort(-dots, kind="stable")
    return [world.vocabulary[int(i)].text for i in order[:k]]


def _known_embeddings(world: MockWorld) -> list[Embedding]:
    return [encode_text(world, t) for t in world.known_texts]


def judge_text(world: MockWorld, idea: str) -> dict:
    """Score one idea against the world's geometry.

    relevant: euclidean distance from the idea embedding to the objective
        center is at most relevance_radius.
    originality: 1 + floor(4 * d / novelty_floor) capped at 5, where d is
        the distance to the nearest known text's embedding (no known
        texts means maximally far, so 5).  Zero distance scores 1; the
        score is a non-decreasing step function of d and saturates at
        exactly d == novelty_floor.
    elaboration: word-count bucket, one point per 3 words, capped at 5.
    category: the nearest vocabulary entry's category.
    """
    e = encode_text(world, idea)
    center_dist = float(np.linalg.norm(e.values - world.objective_center.values))
    relevant = center_dist <= world.relevance_radius

    known = _known_embeddings(world)
    if known:
        d = min(float(np.linalg.norm(e.values - k.values)) for k in known)
        originality = 1 + min(4, int(4.0 * d / world.novelty_floor))
    else:
        originality = 5

    words = len(idea.split())
    elaboration = min(5, 1 + words // _ELABORATION_WORDS_PER_POINT)
    category = world.vocabulary[nearest_vocab_index(world, e.values)].category

    return {
        "originality": originality,
        "relevant": relevant,
        "elaboration": elaboration,
        "category": category,
    }


def _bad(message: str) -> tuple[int, dict]:
    return 400, {"error": message}


def _decode_payload(world: MockWorld, payload: dict) -> tuple[int, dict]:
    import base64
    import binascii

    latent_b64 = payload.get("latent_b64")
    instruction = payload.get("instruction")
    max_tokens = payload.get("max_tokens")
    if not isinstance(latent_b64, str):
        return _bad("latent_b64 must be a string")
    if not isinstance(instruction, str):
        return _bad("instruction must be a string")
    if isinstance(max_tokens, bool) or not isinstance(max_tokens, int) or max_tokens < 1:
        return _bad("max_tokens must be a positive integer")

    if latent_b64 == "":
        # plain-prompt mode: no soft token, the instruction alone drives
        # generation.  The mock reads the first integer in the instruction
        # as "how many ideas" and lists that many vocabulary texts nearest
        # the objective, one per line.
        m = re.search(r"\d+", instruction)
        if m is None:
            return _bad("plain-prompt decode needs an idea count in the instruction")
        k = min(int(m.group()), len(world.vocabulary))
        if k < 1:
            return _bad("plain-prompt decode needs a positive idea count")
        return 200, {"text": "\n".join(top_vocab_texts(world, k))}

    try:
        raw = base64.b64decode(latent_b64, validate=True)
    except (binascii.Error, ValueError):
        return _bad("latent_b64 is not valid base64")
    vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if vector.size != world.dim:
        return _bad(f"latent has {vector.size} floats, expected {world.dim}")
    if not np.all(np.isfinite(vector)):
        return _bad("latent contains non-finite values")
    return 200, {"text": decode_vector(world, vector)}


def handle_request(world: MockWorld, path: str, payload: dict) -> tuple[int, dict]:
    """Serve one wire-protocol request; returns (status, body).

    Stateless and idempotent; non-2xx bodies carry {"error": ...}.
    """
    if path == "/v1/health":
        return 200, {"status": "ok", "dim": world.dim, "decoder_dim": world.dim}

    if path == "/v1/encode":
        texts = payload.get("texts")
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return _bad("texts must be a list of strings")
        if not texts:
            return _bad("nothing to encode")
        vectors = [encode_text(world, t).to_list() for t in texts]
        return 200, {"dim": world.dim, "embeddings": vectors}

    if path == "/v1/decode":
        return _decode_payload(world, payload)

    if path == "/v1/judge":
        idea = payload.get("idea")
        objective = payload.get("objective")
        rubric = payload.get("rubric_version", "1")
        if not isinstance(idea, str) or not idea.strip():
            return _bad("idea must be a non-empty string")
        if not isinstance(objective, str):
            return _bad("objective must be a string")
        if rubric != "1":
            return _bad(f"unsupported rubric_version: {rubric!r}")
        return 200, judge_text(world, idea)

    return 404, {"error": f"unknown path: {path}"}


# ---------------------------------------------------------------------------
# persistence and by-name lookup

_WORLD_REGISTRY: dict[str, MockWorld] = {}


def register_world(name: str, world: MockWorld) -> None:
    """Make a world reachable as the backend endpoint mock://<name>."""
    _WORLD_REGISTRY[name] = world


def resolve_world(ref: str) -> MockWorld:
    """Look up a world by registered name, else by world-file path."""
    if ref in _WORLD_REGISTRY:
        return _WORLD_REGISTRY[ref]
    if Path(ref).is_file():
        return load_world(ref)
    raise ConfigError(f"unknown mock world: {ref}")


def world_to_dict(world: MockWorld) -> dict:
    return {
        "format": _WORLD_FORMAT,
        "dim": world.dim,
        "relevance_radius": world.relevance_radius,
        "novelty_floor": world.novelty_floor,
        "objective_center": world.objective_center.to_list(),
        "known_texts": list(world.known_texts),
        "vocabulary": [
            {"text": e.text, "embedding": e.embedding.to_list(), "category": e.category}
            for e in world.vocabulary
        ],
    }


def world_from_dict(doc: dict) -> MockWorld:
    if not isinstance(doc, dict):
        raise SchemaError("world document must be a JSON object")
    allowed = {"format", "dim", "relevance_radius", "novelty_floor",
               "objective_center", "known_texts", "vocabulary"}
    unknown = set(doc) - allowed
    if unknown:
        raise SchemaError(f"unknown world keys: {sorted(unknown)}")
    if doc.get("format") != _WORLD_FORMAT:
        raise SchemaError(f"unsupported world format: {doc.get('format')!r}")
    try:
        vocab = tuple(
            VocabEntry(
                text=item["text"],
                embedding=Embedding(np.asarray(item["embedding"], dtype=np.float64)),
                category=item["category"],
            )
            for item in doc["vocabulary"]
        )
        return MockWorld(
            vocabulary=vocab,
            objective_center=Embedding(
                np.asarray(doc["objective_center"], dtype=np.float64)
            ),
            relevance_radius=float(doc["relevance_radius"]),
            novelty_floor=float(doc["novelty_floor"]),
            dim=int(doc["dim"]),
            known_texts=tuple(doc.get("known_texts", [])),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed world document: {exc}") from exc


def save_world(world: MockWorld, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(world_to_dict(world), sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def load_world(path: str | Path) -> MockWorld:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"world file is not valid JSON: {exc}") from exc
    return world_from_dict(doc)


def _unit_orthogonal(rng: np.random.Generator, center: np.ndarray) -> np.ndarray:
    while True:
        w = rng.normal(size=center.size)
        w -= center * np.dot(w, center)
        norm = np.linalg.norm(w)
        if norm > 1e-9:
            return w / norm


def make_annulus_world(
    dim: int = 16,
    vocab_size: int = 24,
    seed_count: int = 6,
    rng_seed: int = 0,
) -> tuple[MockWorld, list[str]]:
    """A world calibrated so exploration from the returned seeds succeeds.

    The vocabulary sits on a narrow cap around the objective center
    (6 to 14 degrees away), well inside the relevance radius.  The seed
    texts are deliberately absent from the vocabulary, so their hash
    embeddings land in general position far from every vocabulary entry;
    every decoded candidate is therefore relevant and maximally original.
    Vocabulary entries are spaced apart (pairwise cosine below 0.97) so
    distinct decodes survive de-duplication.

    Returns (world, seed_texts); pass the texts as both the run's seeds
    and the world's novelty reference (already wired into known_texts).
    """
    if vocab_size < 2 or seed_count < 2:
        raise ConfigError("need at least 2 vocabulary entries and 2 seeds")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    center = rng.normal(size=dim)
    center /= np.linalg.norm(center)

    categories = ("household", "art", "science", "outdoor", "repair")
    phrasing = (
        "as a compact rain shelter for small tools",
        "to trace perfect circles on rough paper",
        "as a resonating chamber for a string",
        "to anchor a tarp against strong wind",
        "as a temporary handle for a broken file",
    )
    entries: list[VocabEntry] = []
    vectors: list[np.ndarray] = []
    while len(entries) < vocab_size:
        theta = np.deg2rad(rng.uniform(6.0, 14.0))
        v = np.cos(theta) * center + np.sin(theta) * _unit_orthogonal(rng, center)
        v /= np.linalg.norm(v)
        if any(float(np.dot(v, u)) >= 0.97 for u in vectors):
            continue
        i = len(entries)
        entries.append(
            VocabEntry(
                text=f"idea {i:02d}: use it {phrasing[i % len(phrasing)]}",
                embedding=Embedding(v),
                category=categories[i % len(categories)],
            )
        )
        vectors.append(v)

    seed_texts = [f"starting concept {i:02d}" for i in range(seed_count)]
    world = MockWorld(
        vocabulary=tuple(entries),
        objective_center=Embedding(center),
        relevance_radius=0.8,
        novelty_floor=0.3,
        dim=dim,
        known_texts=tuple(seed_texts),
    )

    # confirm the intended geometry actually holds for this rng_seed
    for entry in world.vocabulary:
        verdict = judge_text(world, entry.text)
        if not (verdict["relevant"] and verdict["originality"] == 5):
            raise ConfigError(
                f"annulus construction failed for {entry.text!r}: {verdict}"
            )
    seed_vecs = [encode_text(world, t) for t in seed_texts]
    for i, a in enumerate(seed_vecs):
        for b in seed_vecs[i + 1:]:
            if float(np.dot(a.values, b.values)) >= 0.97:
                raise ConfigError("seed embeddings landed too close together")
    return world, seed_texts
