"""The judge rubric: prompt construction and strict reply parsing.

The scoring model is asked for a four-line template and nothing else.
Whatever else the model emits (an echoed idea, commentary, a rewritten
version of the input) is ignored; only the four labeled lines are read,
so the judge can never alter the idea it scores.
"""

from __future__ import annotations

import re

RUBRIC_VERSION = "1"

SCORE_CHOICES = ("1", "2", "3", "4", "5")
RELEVANT_CHOICES = ("yes", "no")
CATEGORY_CHOICES = ("object", "tool", "process", "story")

_FIELD_RE = {
    "originality": re.compile(r"^\s*originality\s*:\s*(\S+)", re.IGNORECASE | re.MULTILINE),
    "relevant": re.compile(r"^\s*relevant\s*:\s*(\S+)", re.IGNORECASE | re.MULTILINE),
    "elaboration": re.compile(r"^\s*elaboration\s*:\s*(\S+)", re.IGNORECASE | re.MULTILINE),
    "category": re.compile(r"^\s*category\s*:\s*(\S[^\n]*)", re.IGNORECASE | re.MULTILINE),
}


class TemplateError(ValueError):
    """The judge reply does not follow the required template."""


def build_prompt(idea: str, objective: str) -> str:
    return (
        "You are scoring one idea for a creative objective.\n"
        f"objective: {objective}\n"
        f"idea: {idea}\n"
        "Rate originality 1 to 5, where 5 means almost no one would think of it.\n"
        "Rate elaboration 1 to 5, where 5 means rich specific detail.\n"
        "Say whether the idea is relevant to the objective, yes or no.\n"
        "Name a one word category for the idea.\n"
        "Reply with exactly these four lines and nothing else:\n"
        "originality: <1-5>\n"
        "relevant: <yes|no>\n"
        "elaboration: <1-5>\n"
        "category: <word>"
    )


def _score_field(reply: str, field: str) -> int:
    match = _FIELD_RE[field].search(reply)
    if match is None:
        raise TemplateError(f"reply has no '{field}:' line")
    token = match.group(1)
    if not token.isdigit():
        raise TemplateError(f"{field} is not a number: {token!r}")
    value = int(token)
    if not 1 <= value <= 5:
        raise TemplateError(f"{field} {value} out of range 1-5")
    return value


def parse_reply(reply: str) -> dict:
    """Extract the scorecard from a template reply.

    Returns {"originality", "relevant", "elaboration", "category"} or
    raises TemplateError naming the first offending field.
    """
    originality = _score_field(reply, "originality")
    match = _FIELD_RE["relevant"].search(reply)
    if match is None:
        raise TemplateError("reply has no 'relevant:' line")
    word = match.group(1).strip().lower().rstrip(".")
    if word not in RELEVANT_CHOICES:
        raise TemplateError(f"relevant must be yes or no, got {word!r}")
    elaboration = _score_field(reply, "elaboration")
    match = _FIELD_RE["category"].search(reply)
    if match is None:
        raise TemplateError("reply has no 'category:' line")
    category = match.group(1).strip()
    if not category:
        raise TemplateError("category is empty")
    return {
        "originality": originality,
        "relevant": word == "yes",
        "elaboration": elaboration,
        "category": category[:60],
    }
