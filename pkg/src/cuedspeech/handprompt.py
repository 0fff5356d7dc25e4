"""Hand coding chart and the hand-prompt matrix.

The chart maps each hand position id (1..5) to the vowel phonemes it
encodes and each hand shape id (1..8) to its consonants. Recognition
results for keyframes are expanded into a T x q binary matrix: every
frame of a slow-motion group gets ones at the phoneme columns encoded
by the group's recognized (position, shape) pair. A position covers a
set of vowels, so rows are multi-hot over that set.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ChartError, HandPromptError
from .keyframes import KeyframeGroup
from .vocab import PhonemeVocab

logger = logging.getLogger(__name__)

POSITION_IDS = range(1, 6)
SHAPE_IDS = range(1, 9)


@dataclass(frozen=True)
class CodingChart:
    """Validated phoneme encoding chart over a vocabulary."""

    position_to_vowels: dict[int, frozenset[int]]
    shape_to_consonants: dict[int, frozenset[int]]

    def phonemes_for(self, position: int, shape: int) -> frozenset[int]:
        try:
            vowels = self.position_to_vowels[position]
            consonants = self.shape_to_consonants[shape]
        except KeyError as exc:
            raise ChartError(f"chart has no entry for id {exc}") from None
        return vowels | consonants


@dataclass(frozen=True)
class HandRecognitionResult:
    """Per-keyframe recognized (position, shape) category ids."""

    entries: tuple[tuple[int, int, int], ...]  # (keyframe_index, position, shape)

    def by_keyframe(self) -> dict[int, tuple[int, int]]:
        return {kf: (pos, shape) for kf, pos, shape in self.entries}


def _build_class_map(raw: dict, ids: range, vocab: PhonemeVocab, kind: str):
    mapping: dict[int, frozenset[int]] = {}
    for key, symbols in raw.items():
        try:
            class_id = int(key)
        except (TypeError, ValueError):
            raise ChartError(f"non-integer {kind} id {key!r}") from None
        if class_id not in ids:
            raise ChartError(f"{kind} id {class_id} outside {ids.start}..{ids.stop - 1}")
        if class_id in mapping:
            raise ChartError(f"duplicate {kind} id {class_id}")
        if not symbols:
            raise ChartError(f"{kind} {class_id} encodes no phonemes")
        members = set()
        for sym in symbols:
            idx = vocab.index(sym)  # raises UnknownSymbolError
            if idx in (vocab.blank_index, vocab.eos_index):
                raise ChartError(f"{kind} {class_id} maps reserved symbol {sym!r}")
            members.add(idx)
        mapping[class_id] = frozenset(members)
    if not mapping:
        raise ChartError(f"chart defines no {kind} classes")
    return mapping


def load_chart(path, vocab: PhonemeVocab) -> CodingChart:
    """Load and validate a chart file.

    The file is JSON with ``positions`` and ``shapes`` objects mapping
    id strings to phoneme symbol lists. Every phoneme may appear in at
    most one class, and vowel and consonant sets must be disjoint.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ChartError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or "positions" not in doc or "shapes" not in doc:
        raise ChartError(f"{path}: chart needs 'positions' and 'shapes' objects")

    positions = _build_class_map(doc["positions"], POSITION_IDS, vocab, "position")
    shapes = _build_class_map(doc["shapes"], SHAPE_IDS, vocab, "shape")

    vowel_lists = [positions[k] for k in sorted(positions)]
    consonant_lists = [shapes[k] for k in sorted(shapes)]
    all_vowels: set[int] = set()
    for members in vowel_lists:
        if members & all_vowels:
            raise ChartError(f"{path}: a vowel is mapped to two positions")
        all_vowels |= members
    all_consonants: set[int] = set()
    for members in consonant_lists:
        if members & all_consonants:
            raise ChartError(f"{path}: a consonant is mapped to two shapes")
        all_consonants |= members
    if all_vowels & all_consonants:
        raise ChartError(f"{path}: vowel and consonant sets overlap")

    return CodingChart(position_to_vowels=positions, shape_to_consonants=shapes)


def embed_hand_prompts(
    result: HandRecognitionResult,
    keyframes: list[KeyframeGroup],
    chart: CodingChart,
    vocab: PhonemeVocab,
    frame_count: int,
) -> np.ndarray:
    """Expand recognition results into the T x q hand-prompt matrix.

    Groups whose recognized ids are absent from the chart are skipped
    with a warning; a keyframe with no recognition entry at all is an
    error, as is a frame index beyond T.
    """
    prompt = np.zeros((frame_count, vocab.size), dtype=np.float64)
    if not keyframes:
        return prompt
    recognized = result.by_keyframe()
    for group in keyframes:
        if group.keyframe not in recognized:
            raise HandPromptError(
                f"no recognition entry for keyframe {group.keyframe}"
            )
        position, shape = recognized[group.keyframe]
        try:
            columns = chart.phonemes_for(position, shape)
        except ChartError:
            logger.warning(
                "skipping group at keyframe %d: chart has no (position=%d, shape=%d)",
                group.keyframe, position, shape,
            )
            continue
        for frame in group.frames:
            if not (0 <= frame < frame_count):
                raise HandPromptError(
                    f"group frame {frame} outside 0..{frame_count - 1}"
                )
            prompt[frame, list(columns)] = 1.0
    return prompt
