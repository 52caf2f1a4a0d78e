"""Reference model server for the ideonaut wire protocol."""

from ideonaut_server.app import create_app
from ideonaut_server.config import ServerConfig, ServerConfigError, load_server_config
from ideonaut_server.models import (
    Bundles,
    DecoderBundle,
    EncoderBundle,
    InvalidRequest,
    JudgeBundle,
    JudgeRetryExhausted,
    ServerSetupError,
    load_bundles,
)
from ideonaut_server.rubric import RUBRIC_VERSION, TemplateError, build_prompt, parse_reply

__version__ = "0.1.0"

__all__ = [
    "Bundles",
    "DecoderBundle",
    "EncoderBundle",
    "InvalidRequest",
    "JudgeBundle",
    "JudgeRetryExhausted",
    "RUBRIC_VERSION",
    "ServerConfig",
    "ServerConfigError",
    "ServerSetupError",
    "TemplateError",
    "build_prompt",
    "create_app",
    "load_bundles",
    "load_server_config",
    "parse_reply",
]
