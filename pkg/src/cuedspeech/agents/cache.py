"""On-disk response cache keyed by request content hash.

Each entry is a raw response file plus a parsed sidecar. Writes go to
a temporary file in the same directory and are renamed into place, so
a cache shared by concurrent workers never exposes partial files.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path


class ResponseCache:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _raw_path(self, key: str) -> Path:
        return self.directory / f"{key}.raw.txt"

    def _parsed_path(self, key: str) -> Path:
        return self.directory / f"{key}.parsed.json"

    def __contains__(self, key: str) -> bool:
        return self._parsed_path(key).is_file()

    def get_parsed(self, key: str):
        path = self._parsed_path(key)
        if not path.is_file():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def get_raw(self, key: str) -> str | None:
        path = self._raw_path(key)
        if not path.is_file():
            return None
        return path.read_text(encoding="utf-8")

    def put(self, key: str, raw: str, parsed) -> None:
        self._atomic_write(self._raw_path(key), raw)
        self._atomic_write(
            self._parsed_path(key),
            json.dumps(parsed, sort_keys=True, ensure_ascii=False),
        )

    def _atomic_write(self, path: Path, text: str) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
