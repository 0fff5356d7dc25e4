import pytest

from cuedspeech.vocab import PhonemeVocab


@pytest.fixture
def tiny_vocab():
    """Minimal decoding vocab: blank, two confusable consonants, two vowels."""
    return PhonemeVocab(
        symbols=("<blk>", "b", "p", "a", "i", "<eos>"),
        blank_index=0,
        eos_index=5,
    )


@pytest.fixture
def abc_vocab():
    """Three-symbol vocab used by small enumeration instances."""
    return PhonemeVocab(symbols=("<blk>", "a", "<eos>"), blank_index=0, eos_index=2)
