"""Server configuration: one strict JSON file, no silent defaults for models."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

JUDGE_MODES = ("choice", "freeform")

_KEYS = {
    "encoder_model_id",
    "decoder_model_id",
    "judge_model_id",
    "placeholder_token",
    "device",
    "max_tokens_cap",
    "judge_mode",
    "temperature",
}
_REQUIRED = ("encoder_model_id", "decoder_model_id", "judge_model_id")


class ServerConfigError(ValueError):
    """Raised for malformed config files and invalid field values."""


@dataclass(frozen=True)
class ServerConfig:
    """Which models to load and how the decoder injects latents.

    Model ids are HuggingFace hub names or local directories.  The
    placeholder token marks the injection point in decode instructions
    and must map to exactly one token in the decoder's vocabulary
    (checked at load time, not here).  temperature is exposed for
    experimentation but defaults to greedy decoding.
    """

    encoder_model_id: str
    decoder_model_id: str
    judge_model_id: str
    placeholder_token: str = "[X]"
    device: str = "cpu"
    max_tokens_cap: int = 256
    judge_mode: str = "choice"
    temperature: float = 0.0

    def __post_init__(self) -> None:
        for name in _REQUIRED:
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ServerConfigError(f"{name} must be a non-empty string")
        if not isinstance(self.placeholder_token, str) \
                or not self.placeholder_token.strip():
            raise ServerConfigError("placeholder_token must be a non-empty string")
        if not isinstance(self.max_tokens_cap, int) \
                or isinstance(self.max_tokens_cap, bool) \
                or self.max_tokens_cap < 1:
            raise ServerConfigError(
                f"max_tokens_cap must be a positive integer, got {self.max_tokens_cap!r}"
            )
        if self.judge_mode not in JUDGE_MODES:
            raise ServerConfigError(
                f"judge_mode must be one of {JUDGE_MODES}, got {self.judge_mode!r}"
            )
        if not isinstance(self.temperature, (int, float)) \
                or isinstance(self.temperature, bool) or self.temperature < 0:
            raise ServerConfigError(
                f"temperature must be a non-negative number, got {self.temperature!r}"
            )


def load_server_config(path: str | Path) -> ServerConfig:
    """Read a config file, rejecting unknown keys so typos fail loudly."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ServerConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ServerConfigError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ServerConfigError(f"{path} must contain a JSON object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise ServerConfigError(f"{path}: unknown key(s): {', '.join(unknown)}")
    missing = sorted(k for k in _REQUIRED if k not in doc)
    if missing:
        raise ServerConfigError(f"{path}: missing required key(s): {', '.join(missing)}")

    # model ids that look like paths resolve against the config file,
    # so launching from another directory still finds local models
    resolved = dict(doc)
    for name in _REQUIRED:
        ref = resolved[name]
        if isinstance(ref, str):
            candidate = (path.parent / ref).resolve()
            if candidate.exists():
                resolved[name] = str(candidate)
    return ServerConfig(**resolved)
