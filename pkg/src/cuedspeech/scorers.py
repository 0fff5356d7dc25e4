"""Attention scorers queried during label-synchronous beam search.

A scorer answers one question: given an utterance id and a decoded
prefix, what is the log-probability of each next symbol? Returned
vectors are log-normalized over the whole vocabulary (logsumexp = 0
within 1e-6). Neural inference stays behind this interface; the
built-in implementations cover testing and external models.
"""

from __future__ import annotations

import json
import subprocess
import threading
from typing import Protocol, Sequence

import numpy as np

from .errors import ScorerError
from .vocab import PhonemeVocab

NORMALIZATION_TOL = 1e-6


class AttentionScorer(Protocol):
    def log_probs(self, utterance_id: str, prefix: Sequence[int]) -> np.ndarray:
        """Log-probability row over the q vocabulary symbols."""
        ...


def check_normalized(row: np.ndarray, size: int) -> np.ndarray:
    """Validate the scorer contract: shape (q,) and logsumexp == 0."""
    arr = np.asarray(row, dtype=np.float64)
    if arr.shape != (size,):
        raise ScorerError(f"scorer returned shape {arr.shape}, expected ({size},)")
    total = _logsumexp(arr)
    if not np.isfinite(total) or abs(total) > NORMALIZATION_TOL:
        raise ScorerError(f"scorer row is not log-normalized (logsumexp={total:g})")
    return arr


def _logsumexp(row: np.ndarray) -> float:
    peak = np.max(row)
    if not np.isfinite(peak):
        return float(peak)
    return float(peak + np.log(np.sum(np.exp(row - peak))))


def log_normalize(row: np.ndarray) -> np.ndarray:
    """Log-softmax a raw score row."""
    arr = np.asarray(row, dtype=np.float64)
    return arr - _logsumexp(arr)


class UniformScorer:
    """Every next symbol equally likely; useful as a CTC-only baseline."""

    def __init__(self, size: int):
        self._row = np.full(size, -np.log(size))

    def log_probs(self, utterance_id: str, prefix: Sequence[int]) -> np.ndarray:
        return self._row


class TableScorer:
    """Prefix-keyed lookup table with a uniform fallback.

    The table maps a prefix rendered as space-separated symbols (empty
    string for the empty prefix) to a raw score row of length q; rows
    are log-normalized at construction so hand-authored tables satisfy
    the scorer contract.
    """

    def __init__(self, table: dict[str, Sequence[float]], vocab: PhonemeVocab):
        self.vocab = vocab
        self._rows: dict[str, np.ndarray] = {}
        for key, row in table.items():
            arr = np.asarray(row, dtype=np.float64)
            if arr.shape != (vocab.size,):
                raise ScorerError(
                    f"table row for {key!r} has length {arr.shape}, expected {vocab.size}"
                )
            self._rows[" ".join(key.split())] = log_normalize(arr)
        self._uniform = np.full(vocab.size, -np.log(vocab.size))

    @classmethod
    def from_file(cls, path, vocab: PhonemeVocab) -> "TableScorer":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), vocab)

    def log_probs(self, utterance_id: str, prefix: Sequence[int]) -> np.ndarray:
        key = " ".join(self.vocab.symbol(t) for t in prefix)
        return self._rows.get(key, self._uniform)


class SubprocessScorer:
    """Line-delimited JSON protocol over a child process's stdio.

    Each request is one line ``{"utterance_id": ..., "prefix": [symbols]}``
    and each response one line ``{"log_probs": [q floats]}`` in vocab
    order. A lock serializes access, so one instance is safe to share
    across decoding workers.
    """

    def __init__(self, command: Sequence[str], vocab: PhonemeVocab):
        self.command = list(command)
        self.vocab = vocab
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _ensure_started(self):
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )

    def log_probs(self, utterance_id: str, prefix: Sequence[int]) -> np.ndarray:
        request = {
            "utterance_id": utterance_id,
            "prefix": [self.vocab.symbol(t) for t in prefix],
        }
        with self._lock:
            self._ensure_started()
            assert self._proc.stdin is not None and self._proc.stdout is not None
            try:
                self._proc.stdin.write(json.dumps(request) + "\n")
                self._proc.stdin.flush()
                line = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ScorerError(f"scorer process failed: {exc}") from exc
        if not line:
            raise ScorerError("scorer process closed its output stream")
        try:
            payload = json.loads(line)
            row = payload["log_probs"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise ScorerError(f"bad scorer response line: {line!r}") from exc
        return check_normalized(np.asarray(row, dtype=np.float64), self.vocab.size)

    def close(self):
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.terminate()
                self._proc.wait(timeout=5)
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
