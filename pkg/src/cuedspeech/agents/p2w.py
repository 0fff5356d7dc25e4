"""Self-correcting phoneme-to-word agent client.

The agent receives a decoded phoneme sequence and answers with a
revised sequence plus a natural sentence. A round is accepted only
when the revised sequence parses against the vocabulary and the
sentence is non-empty; otherwise the validation failure is appended to
the prompt and another round runs, up to the configured budget. When
every round fails the original sequence comes back marked degraded.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Sequence

from ..errors import MalformedResponseError, VocabError
from ..vocab import PhonemeVocab, TokenSeq, string_to_tokens, tokens_to_string
from .backends import AgentBackend, RetryPolicy, call_with_transport_retries
from .cache import ResponseCache
from .requests import BackendRequest, TextPart, request_hash

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class P2wTemplate:
    background: str
    conversion_rules: str
    in_context_pairs: tuple[tuple[str, str], ...]
    confusable_pairs: tuple[tuple[str, str], ...]
    task: str

    @classmethod
    def load(cls, directory, vocab: PhonemeVocab | None = None) -> "P2wTemplate":
        root = Path(directory)

        def read(name):
            path = root / name
            return path.read_text(encoding="utf-8").strip() if path.is_file() else ""

        pairs: tuple = ()
        confusable: tuple = ()
        pairs_path = root / "pairs.json"
        if pairs_path.is_file():
            with open(pairs_path, encoding="utf-8") as fh:
                doc = json.load(fh)
            pairs = tuple((str(a), str(b)) for a, b in doc.get("pairs", []))
            confusable = tuple((str(a), str(b)) for a, b in doc.get("confusable", []))
        if vocab is not None:
            for phonemes, _ in pairs:
                string_to_tokens(phonemes, vocab)  # raises on foreign symbols
        return cls(
            background=read("background.txt"),
            conversion_rules=read("rules.txt"),
            in_context_pairs=pairs,
            confusable_pairs=confusable,
            task=read("task.txt"),
        )

    @classmethod
    def default(cls, vocab: PhonemeVocab | None = None) -> "P2wTemplate":
        return cls.load(files("cuedspeech.assets").joinpath("prompts/p2w"), vocab)


def p2w_response_schema() -> dict:
    return {
        "type": "object",
        "properties": {
            "phonemes": {"type": "string"},
            "sentence": {"type": "string"},
        },
        "required": ["phonemes", "sentence"],
    }


def build_p2w_request(
    decoded: Sequence[int],
    vocab: PhonemeVocab,
    template: P2wTemplate,
    error_note: str | None = None,
    key: str | None = None,
) -> BackendRequest:
    """Render the four prompt sections around the decoded sequence."""
    if not decoded:
        raise ValueError("decoded sequence must be non-empty")
    parts = []
    if template.background:
        parts.append(TextPart(template.background))
    if template.conversion_rules:
        parts.append(TextPart(template.conversion_rules))
    in_context_lines = []
    if template.in_context_pairs:
        in_context_lines.append("Example conversions:")
        in_context_lines.extend(
            f"  phonemes: {ph}  ->  sentence: {sent}"
            for ph, sent in template.in_context_pairs
        )
    if template.confusable_pairs:
        in_context_lines.append(
            "Easily confused phoneme pairs (same hand code), check these first:"
        )
        in_context_lines.extend(
            f"  {a} <-> {b}" for a, b in template.confusable_pairs
        )
    if in_context_lines:
        parts.append(TextPart("\n".join(in_context_lines)))
    if template.task:
        parts.append(TextPart(template.task))
    parts.append(
        TextPart(f"Phoneme sequence to convert: {tokens_to_string(decoded, vocab)}")
    )
    if error_note:
        parts.append(
            TextPart(
                "Your previous answer failed validation and was discarded: "
                f"{error_note}. Answer again, fixing that problem."
            )
        )
    return BackendRequest(parts=tuple(parts), schema=p2w_response_schema(), key=key)


def parse_p2w_response(raw: str) -> tuple[str, str]:
    """Extract (phoneme string, sentence) from a structured response."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedResponseError(f"response is not JSON: {exc}") from exc
    if (
        not isinstance(doc, dict)
        or not isinstance(doc.get("phonemes"), str)
        or not isinstance(doc.get("sentence"), str)
    ):
        raise MalformedResponseError(
            "response must carry string fields 'phonemes' and 'sentence'"
        )
    return doc["phonemes"], doc["sentence"]


@dataclass(frozen=True)
class P2wResult:
    """Outcome of the correction loop.

    ``degraded`` means no round validated: ``revised`` echoes the input
    sequence, the sentence is empty, and ``diagnostic`` explains why.
    """

    revised: TokenSeq
    sentence: str
    rounds_used: int
    degraded: bool = False
    diagnostic: str | None = None


def correct_and_convert(
    decoded: Sequence[int],
    backend: AgentBackend,
    vocab: PhonemeVocab,
    template: P2wTemplate,
    rounds: int = 3,
    cache: ResponseCache | None = None,
    policy: RetryPolicy = RetryPolicy(),
    key: str | None = None,
) -> P2wResult:
    """Run up to ``rounds`` validation-gated correction rounds."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not decoded:
        raise ValueError("decoded sequence must be non-empty")
    decoded = tuple(decoded)
    error_note = None
    for round_number in range(1, rounds + 1):
        request = build_p2w_request(
            decoded, vocab, template, error_note=error_note, key=key
        )
        cache_key = request_hash(backend.name, request)
        raw = None
        if cache is not None:
            raw = cache.get_raw(cache_key)
        if raw is None:
            raw = call_with_transport_retries(backend, request, policy)
            if cache is not None:
                cache.put(cache_key, raw, {"raw": True})
        try:
            phonemes_text, sentence = parse_p2w_response(raw)
            revised = string_to_tokens(phonemes_text, vocab)
            if not sentence.strip():
                raise MalformedResponseError("sentence is empty")
        except (MalformedResponseError, VocabError) as exc:
            error_note = str(exc)
            logger.info(
                "p2w round %d rejected (%s); %d rounds left",
                round_number, exc, rounds - round_number,
            )
            continue
        return P2wResult(
            revised=revised, sentence=sentence.strip(), rounds_used=round_number
        )
    return P2wResult(
        revised=decoded,
        sentence="",
        rounds_used=rounds,
        degraded=True,
        diagnostic=f"all {rounds} correction rounds failed; last error: {error_note}",
    )
