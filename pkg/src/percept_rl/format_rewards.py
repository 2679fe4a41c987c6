"""Binary format rewards judged on a parsed rollout.

Three independent 0/1 signals: the think/answer tag structure, the answer
schema, and the absence of repeated sentences in the reasoning block. All
are pure functions of the rollout text.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .rollout import ParsedRollout, ParseStatus

_SENTENCE_BREAKS = (".", "!", "?", "\n")
_PUNCT_TABLE = str.maketrans({ch: " " for ch in string.punctuation})

# Normalized sentences shorter than this many words are ignored, so short
# connectives ("Yes.") repeating do not zero the reward.
MIN_SENTENCE_WORDS = 3


@dataclass(frozen=True)
class FormatScores:
    """The three format components; each is exactly 0.0 or 1.0."""

    thinking: float
    answer_format: float
    non_repeat: float

    @property
    def total(self) -> float:
        return self.thinking + self.answer_format + self.non_repeat


def thinking_reward(parsed: ParsedRollout) -> float:
    """1.0 iff both tag blocks were extracted (an empty think block counts)."""
    return 0.0 if parsed.parse_status is ParseStatus.MISSING_TAGS else 1.0


def answer_format_reward(parsed: ParsedRollout) -> float:
    """1.0 iff the answer parsed as a valid instance list (empty list included)."""
    return 1.0 if parsed.parse_status is ParseStatus.OK else 0.0


def _split_sentences(text: str) -> list[str]:
    sentences = []
    current = []
    for ch in text:
        if ch in _SENTENCE_BREAKS:
            sentences.append("".join(current))
            current = []
        else:
            current.append(ch)
    sentences.append("".join(current))
    return sentences


def _normalize_sentence(sentence: str) -> str:
    return " ".join(sentence.lower().translate(_PUNCT_TABLE).split())


def non_repeat_reward(think: str) -> float:
    """1.0 iff no normalized sentence of >= 3 words occurs more than once.

    Sentences are split at ``.``, ``!``, ``?`` and newlines, lowercased,
    punctuation-stripped, and whitespace-collapsed before comparison. The
    empty string is vacuously non-repetitive.
    """
    seen = set()
    for sentence in _split_sentences(think):
        norm = _normalize_sentence(sentence)
        if len(norm.split()) < MIN_SENTENCE_WORDS:
            continue
        if norm in seen:
            return 0.0
        seen.add(norm)
    return 1.0


def format_scores(parsed: ParsedRollout) -> FormatScores:
    """Compute all three format components for one rollout.

    A rollout with no extractable think block has no reasoning to judge, so
    its non-repeat component is 0.0 (not the vacuous 1.0 of an empty string);
    an entirely malformed rollout therefore scores 0 on every component.
    """
    thinking = thinking_reward(parsed)
    return FormatScores(
        thinking=thinking,
        answer_format=answer_format_reward(parsed),
        non_repeat=non_repeat_reward(parsed.think) if thinking == 1.0 else 0.0,
    )
