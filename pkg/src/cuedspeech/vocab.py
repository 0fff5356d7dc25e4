"""Phoneme symbol table and token/string conversion.

A vocabulary is an ordered list of symbol strings. Two entries are
reserved for decoding: the CTC blank and the end-of-sequence marker.
Token sequences handled by the rest of the toolkit are tuples of
vocabulary indices and never contain blank or <eos>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import UnknownSymbolError, VocabError

TokenSeq = tuple[int, ...]


@dataclass(frozen=True)
class PhonemeVocab:
    """Immutable symbol table with reserved blank and <eos> entries."""

    symbols: tuple[str, ...]
    blank_index: int
    eos_index: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise VocabError("duplicate symbol in vocabulary")
        if not (0 <= self.blank_index < len(self.symbols)):
            raise VocabError("blank index out of range")
        if not (0 <= self.eos_index < len(self.symbols)):
            raise VocabError("eos index out of range")
        if self.blank_index == self.eos_index:
            raise VocabError("blank and eos must be distinct symbols")
        object.__setattr__(
            self, "_index", {s: i for i, s in enumerate(self.symbols)}
        )

    @property
    def size(self) -> int:
        """Total symbol count q, including blank and <eos>."""
        return len(self.symbols)

    @property
    def blank_symbol(self) -> str:
        return self.symbols[self.blank_index]

    @property
    def eos_symbol(self) -> str:
        return self.symbols[self.eos_index]

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbolError(f"unknown symbol {symbol!r}") from None

    def symbol(self, index: int) -> str:
        return self.symbols[index]

    def phoneme_indices(self) -> tuple[int, ...]:
        """Indices of all symbols except blank and <eos>."""
        reserved = (self.blank_index, self.eos_index)
        return tuple(i for i in range(len(self.symbols)) if i not in reserved)


def load_vocab(path) -> PhonemeVocab:
    """Load a vocabulary file.

    Line 1 declares the reserved symbols as ``blank=<sym> eos=<sym>``;
    every following non-empty line is one symbol, in index order.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines:
        raise VocabError(f"{path}: empty vocabulary file")
    header = lines[0].split()
    declared = {}
    for part in header:
        key, sep, value = part.partition("=")
        if sep and key in ("blank", "eos") and value:
            declared[key] = value
    if set(declared) != {"blank", "eos"}:
        raise VocabError(
            f"{path}: first line must declare 'blank=<symbol> eos=<symbol>'"
        )
    symbols = [line.strip() for line in lines[1:] if line.strip()]
    seen = set()
    for sym in symbols:
        if sym in seen:
            raise VocabError(f"{path}: duplicate symbol {sym!r}")
        seen.add(sym)
    for key in ("blank", "eos"):
        if declared[key] not in seen:
            raise VocabError(
                f"{path}: declared {key} symbol {declared[key]!r} is not listed"
            )
    return PhonemeVocab(
        symbols=tuple(symbols),
        blank_index=symbols.index(declared["blank"]),
        eos_index=symbols.index(declared["eos"]),
    )


def tokens_to_string(tokens: Sequence[int], vocab: PhonemeVocab) -> str:
    """Render a token sequence as space-separated symbols."""
    out = []
    for t in tokens:
        if not (0 <= t < vocab.size):
            raise VocabError(f"token index {t} out of range for q={vocab.size}")
        out.append(vocab.symbol(t))
    return " ".join(out)


def string_to_tokens(text: str, vocab: PhonemeVocab) -> TokenSeq:
    """Parse space-separated symbols into a token sequence.

    Blank and <eos> are decoding-internal and rejected here.
    """
    tokens = []
    for sym in text.split():
        idx = vocab.index(sym)
        if idx in (vocab.blank_index, vocab.eos_index):
            raise UnknownSymbolError(
                f"symbol {sym!r} is decoding-internal and not a valid token"
            )
        tokens.append(idx)
    return tuple(tokens)


def validate_tokens(tokens: Iterable[int], vocab: PhonemeVocab) -> TokenSeq:
    """Check a raw index sequence against the vocabulary and freeze it."""
    seq = tuple(tokens)
    for t in seq:
        if not (0 <= t < vocab.size):
            raise VocabError(f"token index {t} out of range for q={vocab.size}")
        if t in (vocab.blank_index, vocab.eos_index):
            raise VocabError("token sequences may not contain blank or <eos>")
    return seq
