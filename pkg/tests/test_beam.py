import numpy as np
import pytest

from cuedspeech.beam import DecodeConfig, decode_utterance, joint_beam_search
from cuedspeech.errors import DecodeFailureError
from cuedspeech.fusion import fuse_hand_prompt, softmax_posteriors
from cuedspeech.scorers import TableScorer, UniformScorer
from cuedspeech.vocab import PhonemeVocab
from oracles import (
    all_label_sequences,
    enumerate_collapse_masses,
    exhaustive_joint_argmax,
    oracle_exact,
    random_posteriors,
)


def bp_fixture_logits(vocab):
    """Lip logits where b/p are ambiguous (p slightly ahead) then a clear 'a'."""
    logits = np.full((6, vocab.size), -8.0)
    b, p, a = vocab.index("b"), vocab.index("p"), vocab.index("a")
    logits[0:3, vocab.blank_index] = 0.0
    logits[0:3, b] = 0.5
    logits[0:3, p] = 1.5
    logits[3:6, vocab.blank_index] = 0.0
    logits[3:6, a] = 6.0
    return logits


def hand_vote(vocab, symbol, frames, total_frames=6):
    hand = np.zeros((total_frames, vocab.size))
    hand[list(frames), vocab.index(symbol)] = 1.0
    return hand


def random_table_scorer(rng, vocab, max_len):
    labels = [vocab.symbol(i) for i in vocab.phoneme_indices()]
    table = {}
    for seq in all_label_sequences(labels, max_len):
        table[" ".join(seq)] = rng.normal(size=vocab.size) * 2.0
    return TableScorer(table, vocab)


def test_exhaustive_equivalence_small_instances():
    rng = np.random.default_rng(2024)
    vocab = PhonemeVocab(("<blk>", "a", "b", "<eos>"), 0, 3)
    for trial in range(25):
        frames = int(rng.integers(1, 4))
        post = random_posteriors(rng, frames, vocab.size,
                                 zero_columns=(vocab.eos_index,))
        scorer = random_table_scorer(rng, vocab, frames)
        lam = float(rng.choice([0.0, 0.3, 0.5, 0.8, 1.0]))
        config = DecodeConfig(lambda_decode=lam, beam_width=100000, max_len=frames)
        hyps = joint_beam_search(post, scorer, f"t{trial}", vocab, config)
        best = hyps[0]
        oracle_seq, oracle_joint = exhaustive_joint_argmax(
            post, scorer, f"t{trial}", vocab, lam, frames
        )
        assert best.prefix[:-1] == oracle_seq
        assert best.joint == pytest.approx(oracle_joint, abs=1e-9)


def test_ctc_only_ranking_matches_exact_mass():
    rng = np.random.default_rng(7)
    vocab = PhonemeVocab(("<blk>", "a", "b", "<eos>"), 0, 3)
    post = random_posteriors(rng, 3, vocab.size, zero_columns=(vocab.eos_index,))
    config = DecodeConfig(lambda_decode=1.0, beam_width=100000, max_len=3)
    hyps = joint_beam_search(post, UniformScorer(vocab.size), "u", vocab, config)
    joints = [h.joint for h in hyps]
    assert joints == sorted(joints, reverse=True)
    assert all(h.joint == pytest.approx(h.ctc_logp) for h in hyps)
    masses = enumerate_collapse_masses(post, vocab.blank_index)
    best_exact = max(
        (seq for seq in masses if len(seq) <= 3),
        key=lambda s: masses[s],
    )
    assert hyps[0].prefix[:-1] == best_exact


def test_decode_strong_lip_only(tiny_vocab):
    logits = np.full((6, tiny_vocab.size), -8.0)
    logits[0:3, tiny_vocab.index("b")] = 6.0
    logits[3:6, tiny_vocab.index("a")] = 6.0
    decoded = decode_utterance(
        logits,
        np.zeros_like(logits),
        UniformScorer(tiny_vocab.size),
        "u",
        tiny_vocab,
    )
    assert decoded == (tiny_vocab.index("b"), tiny_vocab.index("a"))


def test_zero_hand_prompt_matches_zero_weight(tiny_vocab):
    rng = np.random.default_rng(3)
    scorer = UniformScorer(tiny_vocab.size)
    for trial in range(10):
        logits = rng.normal(size=(5, tiny_vocab.size)) * 3.0
        hand = (rng.random((5, tiny_vocab.size)) > 0.6).astype(float)
        zero_hand = decode_utterance(
            logits, np.zeros_like(logits), scorer, f"u{trial}", tiny_vocab,
            DecodeConfig(lambda_prompt=4.5),
        )
        zero_weight = decode_utterance(
            logits, hand, scorer, f"u{trial}", tiny_vocab,
            DecodeConfig(lambda_prompt=0.0),
        )
        baseline = decode_utterance(
            logits, np.zeros_like(logits), scorer, f"u{trial}", tiny_vocab,
            DecodeConfig(lambda_prompt=0.0),
        )
        assert zero_hand == zero_weight == baseline


def test_hand_prompt_flips_confusable(tiny_vocab):
    logits = bp_fixture_logits(tiny_vocab)
    scorer = UniformScorer(tiny_vocab.size)
    b, p, a = (tiny_vocab.index(s) for s in ("b", "p", "a"))

    pure = decode_utterance(logits, np.zeros_like(logits), scorer, "u", tiny_vocab)
    assert pure == (p, a)

    vote_b = decode_utterance(
        logits, hand_vote(tiny_vocab, "b", range(3)), scorer, "u", tiny_vocab
    )
    assert vote_b == (b, a)

    vote_p = decode_utterance(
        logits, hand_vote(tiny_vocab, "p", range(3)), scorer, "u", tiny_vocab
    )
    assert vote_p == (p, a)


def test_large_prompt_weight_dominates(tiny_vocab):
    # lip slightly favors p on every frame; an all-frame b vote at weight 50 wins
    logits = np.full((4, tiny_vocab.size), -8.0)
    logits[:, tiny_vocab.index("p")] = 1.0
    logits[:, tiny_vocab.index("b")] = 0.5
    hand = hand_vote(tiny_vocab, "b", range(4), total_frames=4)
    decoded = decode_utterance(
        logits, hand, UniformScorer(tiny_vocab.size), "u", tiny_vocab,
        DecodeConfig(lambda_prompt=50.0),
    )
    assert tiny_vocab.index("b") in decoded
    assert tiny_vocab.index("p") not in decoded


def test_decode_failure_carries_best_live():
    vocab = PhonemeVocab(("<blk>", "a", "b", "<eos>"), 0, 3)
    # every path collapses to (a, b): no sequence of length <= 1 can complete
    post = np.array([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    config = DecodeConfig(beam_width=4, max_len=1)
    with pytest.raises(DecodeFailureError) as excinfo:
        joint_beam_search(post, UniformScorer(vocab.size), "u", vocab, config)
    assert excinfo.value.best_live is not None
    assert excinfo.value.best_live.prefix == (1,)


def test_beam_deterministic(tiny_vocab):
    rng = np.random.default_rng(12)
    logits = rng.normal(size=(6, tiny_vocab.size)) * 2.0
    post = softmax_posteriors(fuse_hand_prompt(logits, np.zeros_like(logits), 0.0))
    scorer = UniformScorer(tiny_vocab.size)
    first = joint_beam_search(post, scorer, "u", tiny_vocab, DecodeConfig(beam_width=5))
    second = joint_beam_search(post, scorer, "u", tiny_vocab, DecodeConfig(beam_width=5))
    assert [h.prefix for h in first] == [h.prefix for h in second]
    assert [h.joint for h in first] == [h.joint for h in second]


def test_eos_probability_reflected_in_completed_scores(abc_vocab):
    # single frame of pure 'a': only complete decode is (a)
    post = np.array([[0.0, 1.0, 0.0]])
    hyps = joint_beam_search(
        post, UniformScorer(abc_vocab.size), "u", abc_vocab,
        DecodeConfig(lambda_decode=1.0, beam_width=10, max_len=1),
    )
    assert hyps[0].prefix == (1, abc_vocab.eos_index)
    assert hyps[0].ctc_logp == pytest.approx(0.0, abs=1e-9)
    assert oracle_exact(enumerate_collapse_masses(post, 0), (1,)) == 1.0
