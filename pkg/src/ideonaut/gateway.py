"""Clients for the three model roles behind one small wire protocol.

A backend is addressed by an endpoint URL whose scheme picks the
transport: `http://` and `https://` go over the network, `mock://name`
routes to an in-process MockWorld (registered name or world-file path).
Every transport speaks the same JSON protocol:

    POST /v1/encode  {"texts": [...]}                  -> {"dim": d, "embeddings": [[...], ...]}
    POST /v1/decode  {"latent_b64": ..., "instruction": ..., "max_tokens": n} -> {"text": ...}
    POST /v1/judge   {"idea": ..., "objective": ..., "rubric_version": "1"}   -> scores

Non-2xx replies carry {"error": "..."}.  An empty latent_b64 selects
plain-prompt decoding (no soft token), which seed generation uses.
"""

from __future__ import annotations

import base64
import os
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, JudgeParseError, ProtocolError, TransportError
from .evaluation import SCORE_MAX, SCORE_MIN, ScoreCard
from .latent import Embedding
from .projector import ProjectedLatent

ROLES = ("encoder", "decoder", "judge")

TOKEN_ENV_VAR = "IDEONAUT_TOKEN"

RUBRIC_VERSION = "1"


@dataclass(frozen=True)
class BackendDescriptor:
    """Where one model role lives and how hard to lean on it."""

    role: str
    endpoint: str
    model_name: str = ""
    timeout: float = 30.0
    max_parallel: int = 4
    retry_limit: int = 2

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ConfigError(f"role must be one of {ROLES}, got {self.role!r}")
        if "://" not in self.endpoint:
            raise ConfigError(f"endpoint needs a scheme: {self.endpoint!r}")
        if self.timeout <= 0:
            raise ConfigError("timeout must be positive")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be at least 1")
        if self.retry_limit < 0:
            raise ConfigError("retry_limit must be non-negative")

    @property
    def scheme(self) -> str:
        return self.endpoint.split("://", 1)[0]


@dataclass(frozen=True)
class DecodeRequest:
    projected: ProjectedLatent
    instruction: str
    max_tokens: int

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be positive")


# ---------------------------------------------------------------------------
# transports

TransportFn = Callable[[BackendDescriptor, str, dict], dict]

_TRANSPORTS: dict[str, TransportFn] = {}

_metrics_lock = threading.Lock()
_request_counts: dict[str, int] = {}


def register_transport(scheme: str, fn: TransportFn) -> None:
    _TRANSPORTS[scheme] = fn


def request_counts() -> dict[str, int]:
    """Snapshot of dispatch attempts per endpoint, for tests and audits."""
    with _metrics_lock:
        return dict(_request_counts)


def reset_request_counts() -> None:
    with _metrics_lock:
        _request_counts.clear()


def _count_request(endpoint: str) -> None:
    with _metrics_lock:
        _request_counts[endpoint] = _request_counts.get(endpoint, 0) + 1


def _http_transport(backend: BackendDescriptor, path: str, payload: dict) -> dict:
    import requests

    url = backend.endpoint.rstrip("/") + path
    headers = {"content-type": "application/json"}
    token = os.environ.get(TOKEN_ENV_VAR)
    if token:
        headers["authorization"] = f"Bearer {token}"
    try:
        resp = requests.post(url, json=payload, headers=headers,
                             timeout=backend.timeout)
    except requests.RequestException as exc:
        raise TransportError(
            f"request to {url} failed: {exc}", status=0, retryable=True
        ) from exc

    if 200 <= resp.status_code < 300:
        try:
            body = resp.json()
        except ValueError:
            raise TransportError(
                f"{url} returned a non-JSON body", status=resp.status_code
            ) from None
        if not isinstance(body, dict):
            raise TransportError(f"{url} returned a non-object body",
                                 status=resp.status_code)
        return body

    try:
        error_body = resp.json()
    except ValueError:
        error_body = {"error": resp.text[:500]}
    message = error_body.get("error") if isinstance(error_body, dict) else None
    raise TransportError(
        str(message or f"backend error {resp.status_code}"),
        status=resp.status_code,
        body=error_body if isinstance(error_body, dict) else None,
        retryable=resp.status_code >= 500,
    )


def _mock_transport(backend: BackendDescriptor, path: str, payload: dict) -> dict:
    from .mockworld import handle_request, resolve_world

    world = resolve_world(backend.endpoint.split("://", 1)[1])
    status, body = handle_request(world, path, payload)
    if 200 <= status < 300:
        return body
    raise TransportError(
        str(body.get("error", f"mock error {status}")),
        status=status,
        body=body,
        retryable=False,
    )


register_transport("http", _http_transport)
register_transport("https", _http_transport)
register_transport("mock", _mock_transport)


def dispatch(backend: BackendDescriptor, path: str, payload: dict) -> dict:
    """One protocol request with retries on retryable transport failures."""
    try:
        transport = _TRANSPORTS[backend.scheme]
    except KeyError:
        raise ConfigError(
            f"no transport registered for scheme {backend.scheme!r}"
        ) from None

    last: TransportError | None = None
    for _ in range(1 + backend.retry_limit):
        _count_request(backend.endpoint)
        try:
            return transport(backend, path, payload)
        except TransportError as exc:
            last = exc
            if not exc.retryable:
                raise
    assert last is not None
    raise last


# ---------------------------------------------------------------------------
# role operations

def _require_role(backend: BackendDescriptor, role: str, op: str) -> None:
    if backend.role != role:
        raise ProtocolError(f"{op} needs a {role} backend, got {backend.role!r}")


def encode_texts(
    texts: Sequence[str], backend: BackendDescriptor
) -> list[Embedding]:
    """Embed a batch of texts; one embedding per input, all the same dim."""
    _require_role(backend, "encoder", "encode_texts")
    texts = list(texts)
    if not texts:
        raise ProtocolError("nothing to encode")

    body = dispatch(backend, "/v1/encode", {"texts": texts})
    dim = body.get("dim")
    rows = body.get("embeddings")
    if not isinstance(dim, int) or dim < 1:
        raise ProtocolError(f"encoder reply has bad dim: {dim!r}")
    if not isinstance(rows, list) or len(rows) != len(texts):
        raise ProtocolError(
            f"encoder returned {len(rows) if isinstance(rows, list) else '?'} "
            f"embeddings for {len(texts)} texts"
        )

    out: list[Embedding] = []
    by_text: dict[str, Embedding] = {}
    for text, row in zip(texts, rows):
        values = np.asarray(row, dtype=np.float64)
        if values.shape != (dim,):
            raise ProtocolError(
                f"embedding for {text!r} has dimension {values.shape}, "
                f"expected {dim}"
            )
        emb = Embedding(values)
        prior = by_text.get(text)
        if prior is not None and prior != emb:
            raise ProtocolError(
                f"backend returned different embeddings for identical text {text!r}"
            )
        by_text[text] = emb
        out.append(emb)
    return out


def decode_latent(req: DecodeRequest, backend: BackendDescriptor) -> str:
    """Turn one projected latent into idea text via soft-token decoding."""
    _require_role(backend, "decoder", "decode_latent")
    payload = {
        "latent_b64": base64.b64encode(req.projected.to_float32_bytes()).decode("ascii"),
        "instruction": req.instruction,
        "max_tokens": req.max_tokens,
    }
    body = dispatch(backend, "/v1/decode", payload)
    text = body.get("text")
    if not isinstance(text, str) or not text:
        raise ProtocolError("empty generation (decoder misconfiguration)")
    return text


def decode_plain(
    instruction: str, max_tokens: int, backend: BackendDescriptor
) -> str:
    """Plain-prompt decoding with no soft token (used for seed generation)."""
    _require_role(backend, "decoder", "decode_plain")
    if max_tokens < 1:
        raise ConfigError("max_tokens must be positive")
    payload = {"latent_b64": "", "instruction": instruction, "max_tokens": max_tokens}
    body = dispatch(backend, "/v1/decode", payload)
    text = body.get("text")
    if not isinstance(text, str) or not text:
        raise ProtocolError("empty generation (decoder misconfiguration)")
    return text


def scorecard_from_payload(payload: dict) -> ScoreCard:
    """Validate a structured judge reply into a ScoreCard."""
    for key in ("originality", "relevant", "elaboration", "category"):
        if key not in payload:
            raise JudgeParseError(f"missing key: {key}")
    originality = payload["originality"]
    elaboration = payload["elaboration"]
    relevant = payload["relevant"]
    category = payload["category"]
    for name, score in (("originality", originality), ("elaboration", elaboration)):
        if isinstance(score, bool) or not isinstance(score, int):
            raise JudgeParseError(f"{name} is not an integer: {score!r}")
        if not SCORE_MIN <= score <= SCORE_MAX:
            raise JudgeParseError(f"score out of range: {name}={score}")
    if not isinstance(relevant, bool):
        raise JudgeParseError(f"relevant is not a boolean: {relevant!r}")
    if not isinstance(category, str) or not category:
        raise JudgeParseError(f"category is not a non-empty string: {category!r}")
    return ScoreCard(originality=originality, relevant=relevant,
                     elaboration=elaboration, category=category)


def judge_idea(
    idea_text: str, objective: str, backend: BackendDescriptor
) -> ScoreCard:
    """Score one idea.  A malformed reply is retried once, then surfaced.

    The judge only ever produces scores; nothing here feeds back into the
    idea text itself.
    """
    _require_role(backend, "judge", "judge_idea")
    if not idea_text.strip():
        raise ProtocolError("idea text is empty")
    payload = {
        "idea": idea_text,
        "objective": objective,
        "rubric_version": RUBRIC_VERSION,
    }
    try:
        return scorecard_from_payload(dispatch(backend, "/v1/judge", payload))
    except JudgeParseError:
        return scorecard_from_payload(dispatch(backend, "/v1/judge", payload))


_TRUE_WORDS = {"yes", "true", "y"}
_FALSE_WORDS = {"no", "false", "n"}


def parse_judge_reply(raw: str) -> ScoreCard:
    """Extract scores from a key-value judge reply.

    Accepts `key: value` lines, optionally inside a markdown code fence.
    Unknown keys are ignored; a repeated key keeps its last value; the
    four required keys must all be present.
    """
    if not raw.strip():
        raise JudgeParseError("empty judge reply")

    text = raw
    if "```" in raw:
        parts = raw.split("```")
        if len(parts) >= 3:
            fenced = parts[1]
            # drop a language tag like ```text
            first_newline = fenced.find("\n")
            text = fenced[first_newline + 1:] if first_newline >= 0 else fenced

    found: dict[str, str] = {}
    for line in text.splitlines():
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        found[key.strip().casefold()] = value.strip()

    payload: dict[str, object] = {}
    for key in ("originality", "elaboration"):
        if key in found:
            try:
                payload[key] = int(found[key].split()[0])
            except (ValueError, IndexError):
                raise JudgeParseError(
                    f"{key} is not an integer: {found[key]!r}"
                ) from None
    if "relevant" in found:
        word = found["relevant"].casefold()
        if word in _TRUE_WORDS:
            payload["relevant"] = True
        elif word in _FALSE_WORDS:
            payload["relevant"] = False
        else:
            raise JudgeParseError(f"relevant is not yes/no: {found['relevant']!r}")
    if "category" in found:
        payload["category"] = found["category"]

    return scorecard_from_payload(payload)


# ---------------------------------------------------------------------------
# concurrency

def bounded_parallel_map(fn, items, max_parallel: int) -> list:
    """Apply fn to every item, at most max_parallel at a time.

    Results come back in input order; an item whose call raised has its
    exception object in that slot instead of a value, so one bad request
    never poisons the batch.
    """
    if max_parallel < 1:
        raise ConfigError("max_parallel must be at least 1")
    items = list(items)
    if not items:
        return []

    results: list = [None] * len(items)
    if max_parallel == 1 or len(items) == 1:
        for i, item in enumerate(items):
            try:
                results[i] = fn(item)
            except Exception as exc:  # noqa: BLE001 - captured per item
                results[i] = exc
        return results

    with ThreadPoolExecutor(max_workers=max_parallel) as pool:
        futures = {pool.submit(fn, item): i for i, item in enumerate(items)}
        for future in as_completed(futures):
            i = futures[future]
            try:
                results[i] = future.result()
            except Exception as exc:  # noqa: BLE001 - captured per item
                results[i] = exc
    return results


# ---------------------------------------------------------------------------
# wire-contract conformance

def run_contract_checks(post, encode_dim: int, decode_dim: int | None = None) -> list[str]:
    """Exercise one backend implementation against the wire contract.

    `post(path, payload)` must return (status, body) for a JSON request;
    both the in-process mock and an HTTP test client fit.  Returns a list
    of human-readable failures, empty when the backend conforms.
    """
    if decode_dim is None:
        decode_dim = encode_dim
    failures: list[str] = []

    def check(condition: bool, message: str) -> None:
        if not condition:
            failures.append(message)

    def expect_error(status: int, body, label: str) -> None:
        check(status == 400, f"{label}: expected 400, got {status}")
        check(isinstance(body, dict) and isinstance(body.get("error"), str)
              and bool(body.get("error")),
              f"{label}: error body must be {{'error': <string>}}, got {body!r}")

    # encode: happy path, repeated text, then the empty-list error shape
    status, body = post("/v1/encode", {"texts": ["alpha", "beta", "alpha"]})
    check(status == 200, f"encode: expected 200, got {status}")
    if status == 200:
        check(body.get("dim") == encode_dim,
              f"encode: dim {body.get('dim')} != advertised {encode_dim}")
        rows = body.get("embeddings")
        ok_shape = (isinstance(rows, list) and len(rows) == 3
                    and all(isinstance(r, list) and len(r) == encode_dim for r in rows))
        check(ok_shape, "encode: embeddings shape mismatch")
        if ok_shape:
            check(all(np.isfinite(np.asarray(r, dtype=np.float64)).all() for r in rows),
                  "encode: non-finite embedding values")
            check(rows[0] == rows[2],
                  "encode: identical texts produced different embeddings")
            status2, body2 = post("/v1/encode", {"texts": ["alpha", "beta", "alpha"]})
            check(status2 == 200 and body2.get("embeddings") == rows,
                  "encode: not idempotent")

    status, body = post("/v1/encode", {"texts": []})
    expect_error(status, body, "encode empty list")

    # decode: happy path, wrong length, invalid base64
    latent = np.linspace(0.1, 1.0, decode_dim).astype("<f4")
    good_payload = {
        "latent_b64": base64.b64encode(latent.tobytes()).decode("ascii"),
        "instruction": "Paraphrase the concept [X] as one short idea.",
        "max_tokens": 16,
    }
    status, body = post("/v1/decode", good_payload)
    check(status == 200, f"decode: expected 200, got {status} ({body})")
    if status == 200:
        check(isinstance(body.get("text"), str) and len(body["text"]) > 0,
              "decode: text must be a non-empty string")

    wrong = np.zeros(decode_dim + 3, dtype="<f4")
    status, body = post("/v1/decode", dict(
        good_payload, latent_b64=base64.b64encode(wrong.tobytes()).decode("ascii")))
    expect_error(status, body, "decode wrong latent length")

    status, body = post("/v1/decode", dict(good_payload, latent_b64="!not base64!"))
    expect_error(status, body, "decode invalid base64")

    # judge: happy path twice (idempotent), then the empty-idea error shape
    judge_payload = {
        "idea": "use the brick as a tiny bookshelf for matchbooks",
        "objective": "unusual uses for a brick",
        "rubric_version": "1",
    }
    status, body = post("/v1/judge", judge_payload)
    check(status == 200, f"judge: expected 200, got {status} ({body})")
    if status == 200:
        try:
            scorecard_from_payload(body)
        except JudgeParseError as exc:
            check(False, f"judge: malformed score body: {exc}")
        status2, body2 = post("/v1/judge", judge_payload)
        check(status2 == 200 and body2 == body, "judge: not idempotent")

    status, body = post("/v1/judge", dict(judge_payload, idea=""))
    expect_error(status, body, "judge empty idea")

    # health
    status, body = post("/v1/health", {})
    check(status == 200, f"health: expected 200, got {status}")
    if status == 200:
        check(body.get("status") == "ok", f"health: body {body!r}")

    return failures
