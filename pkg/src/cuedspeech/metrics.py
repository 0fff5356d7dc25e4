"""Phoneme- and sentence-level evaluation.

Covers Levenshtein alignment with deterministic tie-breaking, character
and word error rates, sentence word error rate over a pluggable
segmenter, mean-cosine semantic scoring over a pluggable embedder, and
phoneme confusion accumulation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Protocol, Sequence

import numpy as np

from .errors import MetricError
from .vocab import PhonemeVocab

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignOp:
    """One alignment step; indices are None where a side has no token."""

    kind: str  # match | substitute | insert | delete
    hyp_index: int | None
    ref_index: int | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[AlignOp, ...]
    distance: int


def edit_distance(hyp: Sequence, ref: Sequence) -> tuple[int, Alignment]:
    """Levenshtein distance with an explicit alignment.

    Insertions are hypothesis tokens with no reference counterpart;
    deletions are reference tokens the hypothesis missed. Ties are
    broken match > substitute > delete > insert so alignments (and the
    confusion counts built from them) are deterministic.
    """
    n, m = len(hyp), len(ref)
    dist = np.zeros((n + 1, m + 1), dtype=np.int64)
    dist[:, 0] = np.arange(n + 1)
    dist[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        hi = hyp[i - 1]
        for j in range(1, m + 1):
            same = hi == ref[j - 1]
            dist[i, j] = min(
                dist[i - 1, j - 1] + (0 if same else 1),
                dist[i, j - 1] + 1,
                dist[i - 1, j] + 1,
            )

    ops: list[AlignOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i, j]
        if i > 0 and j > 0 and hyp[i - 1] == ref[j - 1] and here == dist[i - 1, j - 1]:
            ops.append(AlignOp("match", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and here == dist[i - 1, j - 1] + 1:
            ops.append(AlignOp("substitute", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif j > 0 and here == dist[i, j - 1] + 1:
            ops.append(AlignOp("delete", None, j - 1))
            j -= 1
        else:
            ops.append(AlignOp("insert", i - 1, None))
            i -= 1
    ops.reverse()
    distance = int(dist[n, m])
    return distance, Alignment(ops=tuple(ops), distance=distance)


def cer(hyp: Sequence, ref: Sequence) -> float:
    """Edit distance divided by reference length."""
    if len(ref) == 0:
        raise MetricError("reference sequence is empty")
    distance, _ = edit_distance(hyp, ref)
    return distance / len(ref)


def wer(hyp_words: Sequence[Hashable], ref_words: Sequence[Hashable]) -> float:
    """Word error rate: edit distance over word units."""
    if len(ref_words) == 0:
        raise MetricError("reference word list is empty")
    distance, _ = edit_distance(list(hyp_words), list(ref_words))
    return distance / len(ref_words)


# ------------------------------------------------------------- segmentation

Segmenter = Callable[[str], list[str]]


def whitespace_segmenter(sentence: str) -> list[str]:
    return sentence.split()


def character_segmenter(sentence: str) -> list[str]:
    return [ch for ch in sentence if not ch.isspace()]


class LexiconGreedySegmenter:
    """Longest-match segmentation against a supplied word list.

    Characters that match no lexicon word become single-character
    words, so concatenating the output always reproduces the sentence's
    non-space characters.
    """

    def __init__(self, words: Sequence[str]):
        self.words = sorted({w for w in words if w}, key=len, reverse=True)

    @classmethod
    def from_file(cls, path) -> "LexiconGreedySegmenter":
        with open(path, encoding="utf-8") as fh:
            return cls([line.strip() for line in fh if line.strip()])

    def __call__(self, sentence: str) -> list[str]:
        out = []
        i = 0
        while i < len(sentence):
            if sentence[i].isspace():
                i += 1
                continue
            for word in self.words:
                if sentence.startswith(word, i):
                    out.append(word)
                    i += len(word)
                    break
            else:
                out.append(sentence[i])
                i += 1
        return out


def s_wer(hyp_sentence: str, ref_sentence: str, segmenter: Segmenter) -> float:
    """Word error rate over segmented sentences."""
    ref_words = segmenter(ref_sentence)
    if not ref_words:
        raise MetricError("reference sentence segments to nothing")
    return wer(segmenter(hyp_sentence), ref_words)


# ---------------------------------------------------------------- embeddings


class Embedder(Protocol):
    def embed(self, sentence: str) -> np.ndarray:
        ...


class CharHistogramEmbedder:
    """Hermetic mock embedder: L2-normalized character-frequency histogram.

    The dimension spans all Unicode code points, so sentences with
    disjoint character sets embed orthogonally.
    """

    dimension = 0x110000

    def embed(self, sentence: str) -> np.ndarray:
        if not sentence:
            return np.zeros(self.dimension, dtype=np.float32)
        counts = np.bincount(
            [ord(ch) for ch in sentence], minlength=self.dimension
        ).astype(np.float32)
        return counts / np.linalg.norm(counts)


class HttpEmbedder:
    """Embedding endpoint client: POST {"input": [texts]} -> {"embeddings": [...]}."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def embed(self, sentence: str) -> np.ndarray:
        import requests as http_requests

        try:
            response = http_requests.post(
                self.endpoint, json={"input": [sentence]}, timeout=self.timeout
            )
            response.raise_for_status()
            vector = response.json()["embeddings"][0]
        except Exception as exc:
            raise MetricError(f"embedding endpoint failed: {exc}") from exc
        return np.asarray(vector, dtype=np.float64)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise MetricError("zero-norm embedding")
    return float(np.dot(a, b) / (norm_a * norm_b))


def semantic_score(pairs: Sequence[tuple[str, str]], embedder: Embedder) -> float:
    """Mean cosine similarity between predicted and reference sentences."""
    if not pairs:
        raise MetricError("no sentence pairs to score")
    total = 0.0
    for hyp_sentence, ref_sentence in pairs:
        if not hyp_sentence or not ref_sentence:
            raise MetricError("sentences must be non-empty")
        total += cosine_similarity(
            embedder.embed(hyp_sentence), embedder.embed(ref_sentence)
        )
    return total / len(pairs)


# ----------------------------------------------------------------- confusion


@dataclass
class ConfusionMatrix:
    """Alignment-derived phoneme confusion counts.

    ``counts[r, c]`` accumulates reference phoneme r aligned to
    prediction c (diagonal = matches); insertions and deletions are
    kept in marginal vectors, not the q x q body.
    """

    counts: np.ndarray
    insertions: np.ndarray
    deletions: np.ndarray

    @classmethod
    def zeros(cls, size: int) -> "ConfusionMatrix":
        return cls(
            counts=np.zeros((size, size), dtype=np.int64),
            insertions=np.zeros(size, dtype=np.int64),
            deletions=np.zeros(size, dtype=np.int64),
        )

    def add_pair(self, hyp: Sequence[int], ref: Sequence[int]) -> None:
        _, alignment = edit_distance(list(hyp), list(ref))
        for op in alignment.ops:
            if op.kind in ("match", "substitute"):
                self.counts[ref[op.ref_index], hyp[op.hyp_index]] += 1
            elif op.kind == "insert":
                self.insertions[hyp[op.hyp_index]] += 1
            else:
                self.deletions[ref[op.ref_index]] += 1

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            counts=self.counts + other.counts,
            insertions=self.insertions + other.insertions,
            deletions=self.deletions + other.deletions,
        )


def confusion_matrix(
    hyps: Sequence[Sequence[int]],
    refs: Sequence[Sequence[int]],
    vocab: PhonemeVocab,
) -> ConfusionMatrix:
    """Accumulate confusion counts over aligned hypothesis/reference pairs."""
    if len(hyps) != len(refs):
        raise MetricError("hypothesis and reference counts differ")
    matrix = ConfusionMatrix.zeros(vocab.size)
    for hyp, ref in zip(hyps, refs):
        matrix.add_pair(hyp, ref)
    return matrix


_HEAT_CHARS = " .:-=+*#%@"


def render_confusion_heatmap(matrix: ConfusionMatrix, vocab: PhonemeVocab) -> str:
    """Text heatmap: rows are reference phonemes, columns predictions."""
    peak = int(matrix.counts.max()) if matrix.counts.size else 0
    lines = ["confusion heatmap (rows=reference, cols=prediction)"]
    lines.append(f"scale: ' '=0 .. '@'={max(peak, 1)}")
    width = max(len(s) for s in vocab.symbols)
    header = " " * (width + 1) + "".join(s[0] for s in vocab.symbols)
    lines.append(header)
    for r, symbol in enumerate(vocab.symbols):
        cells = []
        for c in range(vocab.size):
            value = int(matrix.counts[r, c])
            if value == 0:
                cells.append(" ")
            else:
                level = min(
                    len(_HEAT_CHARS) - 1,
                    1 + int((len(_HEAT_CHARS) - 2) * value / max(peak, 1)),
                )
                cells.append(_HEAT_CHARS[level])
        lines.append(f"{symbol:>{width}} " + "".join(cells))
    return "\n".join(lines) + "\n"


# -------------------------------------------------- word boundary projection


def split_on_boundaries(symbols: Sequence[str], marker: str = "|") -> list[list[str]]:
    """Split a symbol sequence into words at boundary markers."""
    words: list[list[str]] = [[]]
    for sym in symbols:
        if sym == marker:
            if words[-1]:
                words.append([])
        else:
            words[-1].append(sym)
    if words and not words[-1]:
        words.pop()
    return words


def project_words(
    hyp: Sequence, ref: Sequence, ref_word_sizes: Sequence[int]
) -> list[tuple]:
    """Partition hypothesis tokens into words via alignment to the reference.

    Each aligned hypothesis token joins the word of its reference
    counterpart; inserted tokens stay with the most recent word. Words
    the hypothesis missed entirely are dropped (they surface as
    deletions in the word-level distance).
    """
    if sum(ref_word_sizes) != len(ref):
        raise MetricError("word sizes do not cover the reference")
    word_of_ref = []
    for w, size in enumerate(ref_word_sizes):
        word_of_ref.extend([w] * size)
    _, alignment = edit_distance(list(hyp), list(ref))
    buckets: list[list] = [[] for _ in ref_word_sizes]
    current = 0
    for op in alignment.ops:
        if op.kind in ("match", "substitute"):
            current = word_of_ref[op.ref_index]
            buckets[current].append(hyp[op.hyp_index])
        elif op.kind == "insert":
            buckets[current].append(hyp[op.hyp_index])
    return [tuple(bucket) for bucket in buckets if bucket]
