"""Model bundles: the torch/transformers layer behind the three endpoints.

Each bundle owns one model instance and a lock; requests may arrive
concurrently but invocations of a given model are serialized, so a
single loaded copy serves the whole process.  Everything runs in eval
mode with greedy decoding by default, which makes every endpoint a pure
function of its inputs for fixed weights.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoModelForCausalLM, AutoTokenizer

from ideonaut_server.config import ServerConfig
from ideonaut_server.rubric import (
    CATEGORY_CHOICES,
    RELEVANT_CHOICES,
    SCORE_CHOICES,
    TemplateError,
    build_prompt,
    parse_reply,
)


class ServerSetupError(RuntimeError):
    """Model loading or configuration invariants failed at startup."""


class InvalidRequest(ValueError):
    """A request that is well-formed JSON but semantically unusable (400)."""


class JudgeRetryExhausted(RuntimeError):
    """The judge reply failed template parsing twice; raw reply kept for audit."""

    def __init__(self, message: str, raw_reply: str):
        super().__init__(message)
        self.raw_reply = raw_reply


def _load_tokenizer(model_id: str):
    tokenizer = AutoTokenizer.from_pretrained(model_id)
    if tokenizer.pad_token is None:
        tokenizer.pad_token = tokenizer.eos_token
    return tokenizer


class EncoderBundle:
    """Sentence embeddings: mean-pooled last hidden state, unit-normalized."""

    def __init__(self, model_id: str, device: str = "cpu"):
        self.tokenizer = _load_tokenizer(model_id)
        self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        self.device = device
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return int(self.model.config.hidden_size)

    def encode(self, texts: list[str]) -> np.ndarray:
        batch = self.tokenizer(
            list(texts), return_tensors="pt", padding=True, truncation=True
        )
        batch = {k: v.to(self.device) for k, v in batch.items()}
        with self._lock, torch.no_grad():
            hidden = self.model(**batch).last_hidden_state
        mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
        pooled = torch.nn.functional.normalize(pooled, dim=-1)
        return pooled.cpu().numpy().astype(np.float32)


class DecoderBundle:
    """Text generation with optional soft-token injection.

    The instruction is the prompt.  In injected mode the placeholder
    token must appear exactly once; its input embedding is replaced by
    the received latent before generation, so the model reads the latent
    as one virtual token in context.
    """

    def __init__(self, model_id: str, placeholder_token: str,
                 device: str = "cpu", temperature: float = 0.0):
        self.tokenizer = _load_tokenizer(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id).to(device).eval()
        self.device = device
        self.temperature = temperature
        self.placeholder_token = placeholder_token
        self._lock = threading.Lock()

        ids = self.tokenizer.encode(placeholder_token, add_special_tokens=False)
        if len(ids) != 1:
            raise ServerSetupError(
                f"placeholder {placeholder_token!r} must map to exactly one "
                f"decoder token, got {len(ids)}"
            )
        unk = self.tokenizer.unk_token_id
        if unk is not None and ids[0] == unk \
                and placeholder_token != self.tokenizer.unk_token:
            raise ServerSetupError(
                f"placeholder {placeholder_token!r} is not in the decoder vocabulary"
            )
        self.placeholder_id = int(ids[0])

    @property
    def embed_dim(self) -> int:
        return int(self.model.get_input_embeddings().weight.shape[1])

    def token_embedding(self, token: str) -> np.ndarray:
        """The decoder's own input embedding of a single-token word."""
        ids = self.tokenizer.encode(token, add_special_tokens=False)
        if len(ids) != 1:
            raise InvalidRequest(f"{token!r} is not a single decoder token")
        weight = self.model.get_input_embeddings().weight[ids[0]]
        return weight.detach().cpu().numpy().astype(np.float32)

    def _generation_kwargs(self, max_new_tokens: int) -> dict:
        kwargs = dict(
            max_new_tokens=max_new_tokens,
            min_new_tokens=1,
            pad_token_id=self.tokenizer.pad_token_id,
        )
        if self.temperature > 0:
            kwargs.update(do_sample=True, temperature=self.temperature)
        else:
            kwargs.update(do_sample=False)
        return kwargs

    def _decode_new_tokens(self, token_ids: torch.Tensor) -> str:
        text = self.tokenizer.decode(token_ids, skip_special_tokens=True).strip()
        if not text:
            # every surviving token was "special"; show them rather than
            # return an empty reply
            text = self.tokenizer.decode(token_ids, skip_special_tokens=False).strip()
        return text

    def generate_plain(self, instruction: str, max_new_tokens: int) -> str:
        batch = self.tokenizer(instruction, return_tensors="pt").to(self.device)
        with self._lock, torch.no_grad():
            out = self.model.generate(
                input_ids=batch["input_ids"],
                attention_mask=batch["attention_mask"],
                **self._generation_kwargs(max_new_tokens),
            )
        return self._decode_new_tokens(out[0, batch["input_ids"].shape[1]:])

    def generate_injected(self, instruction: str, latent: np.ndarray,
                          max_new_tokens: int) -> str:
        if latent.shape != (self.embed_dim,):
            raise InvalidRequest(
                f"latent has {latent.size} values, decoder expects {self.embed_dim}"
            )
        ids = self.tokenizer(instruction, return_tensors="pt")["input_ids"]
        positions = (ids[0] == self.placeholder_id).nonzero(as_tuple=True)[0]
        if len(positions) != 1:
            raise InvalidRequest(
                f"instruction must contain the placeholder "
                f"{self.placeholder_token!r} exactly once, found {len(positions)}"
            )
        embeddings = self.model.get_input_embeddings()(ids.to(self.device))
        injected = embeddings.clone()
        injected[0, int(positions[0])] = torch.from_numpy(
            latent.astype(np.float32)
        ).to(device=self.device, dtype=embeddings.dtype)
        mask = torch.ones(injected.shape[:2], dtype=torch.long, device=self.device)
        with self._lock, torch.no_grad():
            out = self.model.generate(
                inputs_embeds=injected,
                attention_mask=mask,
                **self._generation_kwargs(max_new_tokens),
            )
        # with inputs_embeds the returned sequence is only the new tokens
        return self._decode_new_tokens(out[0])


_JUDGE_FIELDS = (
    ("originality:", SCORE_CHOICES),
    ("relevant:", RELEVANT_CHOICES),
    ("elaboration:", SCORE_CHOICES),
    ("category:", CATEGORY_CHOICES),
)


class JudgeBundle:
    """Rubric-prompted scorer.

    "choice" mode fills each template field with the option the model
    assigns the highest likelihood, so the reply is well-formed by
    construction.  "freeform" mode lets the model generate the reply
    and parses it strictly, retrying once with a sharper reminder, then
    failing with the raw reply attached.
    """

    def __init__(self, model_id: str, device: str = "cpu", mode: str = "choice"):
        self.tokenizer = _load_tokenizer(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id).to(device).eval()
        self.device = device
        self.mode = mode
        self._lock = threading.Lock()

    def score(self, idea: str, objective: str) -> dict:
        prompt = build_prompt(idea, objective)
        replies = []
        for attempt in range(2):
            if self.mode == "choice":
                reply = self._choice_reply(prompt)
            else:
                nudge = "" if attempt == 0 \
                    else "\nAnswer with the four template lines only."
                reply = self._generate_reply(prompt + nudge)
            replies.append(reply)
            try:
                return parse_reply(reply)
            except TemplateError:
                continue
        raise JudgeRetryExhausted(
            "judge reply failed template parsing after retry", raw_reply=replies[-1]
        )

    def _generate_reply(self, prompt: str) -> str:
        batch = self.tokenizer(prompt, return_tensors="pt").to(self.device)
        with self._lock, torch.no_grad():
            out = self.model.generate(
                input_ids=batch["input_ids"],
                attention_mask=batch["attention_mask"],
                max_new_tokens=48,
                min_new_tokens=1,
                do_sample=False,
                pad_token_id=self.tokenizer.pad_token_id,
            )
        return self.tokenizer.decode(
            out[0, batch["input_ids"].shape[1]:], skip_special_tokens=True
        )

    def _continuation_logprob(self, stem: str, option: str) -> float:
        prefix = self.tokenizer.encode(stem, add_special_tokens=False)
        full = self.tokenizer.encode(stem + " " + option, add_special_tokens=False)
        option_ids = full[len(prefix):]
        if full[:len(prefix)] != prefix or not option_ids:
            return float("-inf")
        ids = torch.tensor([full], device=self.device)
        with self._lock, torch.no_grad():
            logits = self.model(input_ids=ids).logits[0]
        logprobs = torch.log_softmax(logits.float(), dim=-1)
        total = 0.0
        for k, token_id in enumerate(option_ids):
            total += float(logprobs[len(prefix) - 1 + k, token_id])
        return total

    def _choice_reply(self, prompt: str) -> str:
        lines: list[str] = []
        for label, options in _JUDGE_FIELDS:
            stem = "\n".join([prompt, *lines, label])
            best = max(options,
                       key=lambda opt: self._continuation_logprob(stem, opt))
            lines.append(f"{label} {best}")
        return "\n".join(lines)


@dataclass
class Bundles:
    encoder: EncoderBundle
    decoder: DecoderBundle
    judge: JudgeBundle


def load_bundles(config: ServerConfig) -> Bundles:
    """Load all three models; startup fails fast on any invariant break."""
    return Bundles(
        encoder=EncoderBundle(config.encoder_model_id, device=config.device),
        decoder=DecoderBundle(
            config.decoder_model_id,
            placeholder_token=config.placeholder_token,
            device=config.device,
            temperature=config.temperature,
        ),
        judge=JudgeBundle(
            config.judge_model_id, device=config.device, mode=config.judge_mode
        ),
    )
