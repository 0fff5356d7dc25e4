"""Dataset manifests: one JSON document binding utterance inputs together.

A manifest is an array of utterance records. File paths inside a record
are relative to the manifest's own directory, so datasets can be moved
as a unit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import ManifestError


@dataclass(frozen=True)
class UtteranceManifest:
    """Inputs and references for one utterance.

    `keyframe_image_paths` maps frame index to a hand-crop image path,
    for whichever frames the keyframe filter may pick. Reference fields
    are optional; evaluation skips utterances without them. The
    reference phoneme string may carry ``|`` word-boundary markers.
    """

    id: str
    frame_count: int
    hand_track_path: str
    lip_logits_path: str
    keyframe_image_paths: dict[int, str]
    reference_phonemes: str | None = None
    reference_sentence: str | None = None


def load_manifest(path) -> list[UtteranceManifest]:
    """Load and validate a manifest file, resolving relative paths."""
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    if not isinstance(doc, list):
        raise ManifestError(f"{path}: manifest must be a JSON array")

    utterances = []
    seen_ids = set()
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise ManifestError(f"{path}: record {i} is not an object")
        try:
            utt_id = str(rec["id"])
            frame_count = int(rec["frame_count"])
            track = rec["hand_track"]
            logits = rec["lip_logits"]
        except KeyError as exc:
            raise ManifestError(f"{path}: record {i} missing field {exc}") from None
        if utt_id in seen_ids:
            raise ManifestError(f"{path}: duplicate utterance id {utt_id!r}")
        seen_ids.add(utt_id)
        if frame_count < 1:
            raise ManifestError(f"{path}: utterance {utt_id!r} has frame_count < 1")
        images = {}
        for key, rel in rec.get("keyframe_images", {}).items():
            try:
                frame = int(key)
            except ValueError:
                raise ManifestError(
                    f"{path}: utterance {utt_id!r} has non-integer frame key {key!r}"
                ) from None
            if not (0 <= frame < frame_count):
                raise ManifestError(
                    f"{path}: utterance {utt_id!r} image frame {frame} out of range"
                )
            images[frame] = os.path.join(base, rel)
        utterances.append(
            UtteranceManifest(
                id=utt_id,
                frame_count=frame_count,
                hand_track_path=os.path.join(base, track),
                lip_logits_path=os.path.join(base, logits),
                keyframe_image_paths=images,
                reference_phonemes=rec.get("reference_phonemes"),
                reference_sentence=rec.get("reference_sentence"),
            )
        )
    return utterances
