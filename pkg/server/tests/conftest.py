"""Session fixtures: tiny randomly initialized models, built once on disk.

The models are real transformers models (a BERT encoder, a GPT-2 decoder
shared by the judge) with a word-level tokenizer whose vocabulary covers
the rubric template, the placeholder token, and a handful of idea words.
Weights come from fixed torch seeds, so every assertion in this suite is
about deterministic behavior of a frozen model, not about quality.
"""

import json

import pytest
import torch
from fastapi.testclient import TestClient
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import (
    BertConfig,
    BertModel,
    GPT2Config,
    GPT2LMHeadModel,
    PreTrainedTokenizerFast,
)
from transformers.utils import logging as hf_logging

from ideonaut_server import ServerConfig, create_app, load_server_config
from ideonaut_server.models import load_bundles

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

ENCODER_SEED = 11
DECODER_SEED = 8
MAX_TOKENS_CAP = 32

WORDS = list(dict.fromkeys([
    "[UNK]", "[PAD]", "[EOS]", "[X]",
    "originality:", "relevant:", "elaboration:", "category:",
    "objective:", "idea:",
    "1", "2", "3", "4", "5", "yes", "no",
    "object", "tool", "process", "story",
    "You", "are", "scoring", "one", "idea", "for", "a", "creative",
    "objective", "Rate", "originality", "to", "where", "means", "almost",
    "would", "think", "of", "it", "elaboration", "rich", "specific",
    "detail", "Say", "whether", "the", "is", "relevant", "Name", "word",
    "category", "Reply", "with", "exactly", "these", "four", "lines",
    "and", "nothing", "else",
    "paraphrase", "rewrite", "concept", "as", "short", "single",
    "sentence", "list", "diverse", "ideas", "per", "line", "this",
    "ruler", "brick", "chair", "ladder", "mug", "rope", "use", "measure",
    "hold", "stack", "build", "tiny", "bookshelf", "alpha", "beta",
]))


def build_word_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {word: index for index, word in enumerate(WORDS)}
    core = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    core.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        eos_token="[EOS]",
        model_max_length=256,
    )


@pytest.fixture(scope="session")
def model_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny-models")
    encoder_dir, decoder_dir = root / "encoder", root / "decoder"
    tokenizer = build_word_tokenizer()

    tokenizer.save_pretrained(str(encoder_dir))
    torch.manual_seed(ENCODER_SEED)
    BertModel(BertConfig(
        vocab_size=len(WORDS),
        hidden_size=24,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=48,
        max_position_embeddings=256,
        pad_token_id=1,
    )).save_pretrained(str(encoder_dir))

    tokenizer.save_pretrained(str(decoder_dir))
    torch.manual_seed(DECODER_SEED)
    GPT2LMHeadModel(GPT2Config(
        vocab_size=len(WORDS),
        n_positions=256,
        n_embd=16,
        n_layer=2,
        n_head=2,
        bos_token_id=2,
        eos_token_id=2,
        pad_token_id=1,
    )).save_pretrained(str(decoder_dir))

    return {"encoder": encoder_dir, "decoder": decoder_dir}


@pytest.fixture(scope="session")
def server_config(model_dirs, tmp_path_factory) -> ServerConfig:
    path = tmp_path_factory.mktemp("config") / "server.json"
    path.write_text(json.dumps({
        "encoder_model_id": str(model_dirs["encoder"]),
        "decoder_model_id": str(model_dirs["decoder"]),
        "judge_model_id": str(model_dirs["decoder"]),
        "placeholder_token": "[X]",
        "device": "cpu",
        "max_tokens_cap": MAX_TOKENS_CAP,
        "judge_mode": "choice",
    }), encoding="utf-8")
    return load_server_config(path)


@pytest.fixture(scope="session")
def bundles(server_config):
    return load_bundles(server_config)


@pytest.fixture(scope="session")
def app(server_config, bundles):
    return create_app(server_config, bundles=bundles)


@pytest.fixture(scope="session")
def client(app) -> TestClient:
    return TestClient(app, raise_server_exceptions=False)


@pytest.fixture()
def post(client):
    def _post(path: str, payload: dict):
        response = client.post(path, json=payload)
        return response.status_code, response.json()
    return _post


@pytest.fixture(scope="session")
def freeform_app(server_config):
    """Same models, but the judge generates its reply instead of choosing."""
    config = ServerConfig(
        encoder_model_id=server_config.encoder_model_id,
        decoder_model_id=server_config.decoder_model_id,
        judge_model_id=server_config.judge_model_id,
        placeholder_token=server_config.placeholder_token,
        max_tokens_cap=server_config.max_tokens_cap,
        judge_mode="freeform",
    )
    return create_app(config)


@pytest.fixture(scope="session")
def freeform_client(freeform_app) -> TestClient:
    return TestClient(freeform_app, raise_server_exceptions=False)
