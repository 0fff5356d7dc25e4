"""Multimodal hand recognition agent client.

One request covers every keyframe of an utterance. The prompt renders
four sections in order (background, in-context with the support grid,
contrastive, chain-of-thought), then the labeled keyframe images and a
task line, and demands structured output: one integer (position,
shape) record per keyframe.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Mapping, Sequence

from ..errors import (
    CountMismatchError,
    HandPromptError,
    MalformedResponseError,
    OutOfRangeError,
    ResponseParseError,
)
from ..handprompt import POSITION_IDS, SHAPE_IDS, HandRecognitionResult
from ..keyframes import KeyframeGroup
from .backends import AgentBackend, RetryPolicy, call_with_transport_retries
from .cache import ResponseCache
from .requests import BackendRequest, ImagePart, TextPart, request_hash

logger = logging.getLogger(__name__)

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".webp")


@dataclass(frozen=True)
class SupportSet:
    """Reference image for every (position, shape) combination."""

    images: dict[tuple[int, int], str]

    def __post_init__(self):
        expected = {(p, s) for p in POSITION_IDS for s in SHAPE_IDS}
        if set(self.images) != expected:
            missing = sorted(expected - set(self.images))[:3]
            raise ValueError(
                f"support set must cover the full 5x8 grid; missing {missing}..."
            )

    @classmethod
    def from_dir(cls, directory) -> "SupportSet":
        """Collect ``pos<p>_shape<s>.<ext>`` images from a directory."""
        root = Path(directory)
        images = {}
        for p in POSITION_IDS:
            for s in SHAPE_IDS:
                for suffix in _IMAGE_SUFFIXES:
                    candidate = root / f"pos{p}_shape{s}{suffix}"
                    if candidate.is_file():
                        images[(p, s)] = str(candidate)
                        break
        return cls(images=images)


@dataclass(frozen=True)
class HandPromptTemplate:
    """Editable text for the four prompt sections.

    Empty sections are omitted from the rendered request; the order of
    the remaining sections is fixed. ``support_order`` controls where
    each reference image lands in the in-context section.
    """

    background: str
    in_context: str
    contrastive: str
    chain_of_thought: str
    support_order: tuple[tuple[int, int], ...] = tuple(
        (p, s) for p in POSITION_IDS for s in SHAPE_IDS
    )

    @classmethod
    def load(cls, directory) -> "HandPromptTemplate":
        root = Path(directory)

        def read(name):
            path = root / name
            return path.read_text(encoding="utf-8").strip() if path.is_file() else ""

        return cls(
            background=read("background.txt"),
            in_context=read("in_context.txt"),
            contrastive=read("contrastive.txt"),
            chain_of_thought=read("chain_of_thought.txt"),
        )

    @classmethod
    def default(cls) -> "HandPromptTemplate":
        return cls.load(files("cuedspeech.assets").joinpath("prompts/hand"))


def hand_response_schema(keyframe_indices: Sequence[int]) -> dict:
    count = len(keyframe_indices)
    return {
        "type": "object",
        "properties": {
            "keyframes": {
                "type": "array",
                "minItems": count,
                "maxItems": count,
                "items": {
                    "type": "object",
                    "properties": {
                        "keyframe_index": {"type": "integer", "enum": list(keyframe_indices)},
                        "position": {"type": "integer", "minimum": 1, "maximum": 5},
                        "shape": {"type": "integer", "minimum": 1, "maximum": 8},
                    },
                    "required": ["keyframe_index", "position", "shape"],
                },
            }
        },
        "required": ["keyframes"],
    }


def build_hand_request(
    keyframes: Sequence[KeyframeGroup],
    image_paths: Mapping[int, str],
    support: SupportSet,
    template: HandPromptTemplate,
    key: str | None = None,
) -> BackendRequest:
    """Assemble the recognition request for one utterance's keyframes."""
    indices = [g.keyframe for g in keyframes]
    for idx in indices:
        if idx not in image_paths:
            raise HandPromptError(f"no image reference for keyframe {idx}")

    parts: list = []
    if template.background:
        parts.append(TextPart(template.background))
    if template.in_context:
        parts.append(TextPart(template.in_context))
        for p, s in template.support_order:
            parts.append(
                ImagePart(support.images[(p, s)], label=f"support position {p} shape {s}")
            )
    if template.contrastive:
        parts.append(TextPart(template.contrastive))
    if template.chain_of_thought:
        parts.append(TextPart(template.chain_of_thought))
    for idx in indices:
        parts.append(ImagePart(image_paths[idx], label=f"keyframe {idx}"))
    task = (
        "Classify the hand position (1-5) and hand shape (1-8) in "
        f"keyframes {indices}." if indices else "There are no keyframes to classify."
    )
    parts.append(TextPart(task))
    return BackendRequest(
        parts=tuple(parts), schema=hand_response_schema(indices), key=key
    )


def parse_hand_response(raw: str, expected_count: int) -> HandRecognitionResult:
    """Validate a structured response into recognition entries."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedResponseError(f"response is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("keyframes"), list):
        raise MalformedResponseError("response must carry a 'keyframes' array")
    records = doc["keyframes"]
    if len(records) != expected_count:
        raise CountMismatchError(
            f"expected {expected_count} records, got {len(records)}"
        )
    entries = []
    for rec in records:
        if not isinstance(rec, dict):
            raise MalformedResponseError("keyframe record is not an object")
        try:
            kf = int(rec["keyframe_index"])
            position = int(rec["position"])
            shape = int(rec["shape"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad keyframe record {rec!r}") from exc
        if position not in POSITION_IDS:
            raise OutOfRangeError(f"position {position} outside 1..5")
        if shape not in SHAPE_IDS:
            raise OutOfRangeError(f"shape {shape} outside 1..8")
        entries.append((kf, position, shape))
    return HandRecognitionResult(entries=tuple(entries))


def recognize_hands(
    utterance_id: str,
    keyframes: Sequence[KeyframeGroup],
    image_paths: Mapping[int, str],
    support: SupportSet,
    template: HandPromptTemplate,
    backend: AgentBackend,
    cache: ResponseCache | None = None,
    policy: RetryPolicy = RetryPolicy(),
) -> HandRecognitionResult:
    """Recognize all keyframes of one utterance, with caching and re-asks.

    A cache hit returns the stored parse without touching the backend.
    Parse failures re-ask up to ``policy.parse_retries`` extra times;
    the last parse error is raised when the budget runs out.
    """
    if not keyframes:
        return HandRecognitionResult(entries=())
    request = build_hand_request(keyframes, image_paths, support, template,
                                 key=utterance_id)
    cache_key = request_hash(backend.name, request)
    if cache is not None:
        stored = cache.get_parsed(cache_key)
        if stored is not None:
            return HandRecognitionResult(
                entries=tuple((int(k), int(p), int(s)) for k, p, s in stored)
            )

    wanted = {g.keyframe for g in keyframes}
    last_error: ResponseParseError | None = None
    for attempt in range(policy.parse_retries + 1):
        raw = call_with_transport_retries(backend, request, policy)
        try:
            result = parse_hand_response(raw, expected_count=len(keyframes))
            got = {kf for kf, _, _ in result.entries}
            if got != wanted:
                raise MalformedResponseError(
                    f"recognized keyframes {sorted(got)} != requested {sorted(wanted)}"
                )
        except ResponseParseError as exc:
            last_error = exc
            logger.warning(
                "utterance %s: unusable hand response (attempt %d): %s",
                utterance_id, attempt + 1, exc,
            )
            continue
        if cache is not None:
            cache.put(cache_key, raw, [list(e) for e in result.entries])
        return result
    assert last_error is not None
    raise last_error
