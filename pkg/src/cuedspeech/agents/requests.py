"""Backend-neutral request model for agent calls.

A request is an ordered list of text segments and image references
plus a schema descriptor for constrained output. Hashing is content
based: image parts contribute the SHA-256 of their file bytes, so two
requests with byte-identical prompts and images share a cache entry
regardless of where the files live.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    path: str
    label: str


PromptPart = Union[TextPart, ImagePart]


@dataclass(frozen=True)
class BackendRequest:
    """One agent invocation: prompt parts, response schema, optional key.

    ``key`` groups the request for fixture lookup (typically the
    utterance id); it does not participate in content hashing.
    """

    parts: tuple[PromptPart, ...]
    schema: dict = field(default_factory=dict)
    key: str | None = None

    def text(self) -> str:
        """All text segments joined, for substring checks and logging."""
        return "\n".join(p.text for p in self.parts if isinstance(p, TextPart))

    def image_parts(self) -> tuple[ImagePart, ...]:
        return tuple(p for p in self.parts if isinstance(p, ImagePart))


def _file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_request(request: BackendRequest) -> dict:
    """JSON-able canonical form used for hashing and fixtures."""
    parts = []
    for part in request.parts:
        if isinstance(part, TextPart):
            parts.append({"text": part.text})
        else:
            parts.append({"image_sha256": _file_sha256(part.path), "label": part.label})
    return {"parts": parts, "schema": request.schema}


def request_hash(backend_name: str, request: BackendRequest) -> str:
    """Content hash of (backend id, rendered request)."""
    payload = {"backend": backend_name, "request": canonical_request(request)}
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
