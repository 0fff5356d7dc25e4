"""Label-synchronous joint CTC/attention beam search.

Hypotheses grow one output symbol per step. Every live hypothesis is
extended with every non-blank symbol plus <eos>; each candidate is
scored jointly as

    joint = lambda_decode * ctc_prefix_score + (1 - lambda_decode) * attention_score

where the CTC term is the prefix probability of the extended sequence
(or, for <eos>, the probability that the collapse equals the prefix
exactly) and the attention term accumulates per-step next-token
log-probabilities from the scorer. The top beam_width candidates
survive each step; the ones ending in <eos> move to the completed set
and are never extended again.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ctc import CtcPrefixScorer, is_dead
from .errors import DecodeFailureError
from .fusion import fuse_hand_prompt, softmax_posteriors
from .scorers import AttentionScorer, check_normalized
from .vocab import PhonemeVocab, TokenSeq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecodeConfig:
    """Decoding weights and search limits.

    ``max_len`` bounds the number of phonemes in a decoded sequence;
    None means one per input frame. ``lambda_prompt`` weights the hand
    prompt during fusion and ``lambda_decode`` interpolates CTC against
    attention scores.
    """

    lambda_prompt: float = 4.5
    lambda_decode: float = 0.5
    beam_width: int = 40
    max_len: int | None = None

    def __post_init__(self):
        if self.lambda_prompt < 0:
            raise ValueError("lambda_prompt must be >= 0")
        if not (0.0 <= self.lambda_decode <= 1.0):
            raise ValueError("lambda_decode must lie in [0, 1]")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_len is not None and self.max_len < 1:
            raise ValueError("max_len must be >= 1")


@dataclass(frozen=True)
class Hypothesis:
    """A decoding prefix with its cached scores.

    ``prefix`` ends with <eos> exactly when the hypothesis is complete.
    ``ctc_state`` is the forward state of the prefix without <eos>;
    complete hypotheses carry no state because they are never extended.
    """

    prefix: tuple[int, ...]
    ctc_logp: float
    att_logp: float
    joint: float
    ctc_state: np.ndarray | None = field(repr=False, compare=False, default=None)


def _joint_score(lam: float, ctc_logp: float, att_logp: float) -> float:
    # Guard the weight endpoints so a dead term scaled by zero stays zero.
    ctc_term = lam * ctc_logp if lam > 0.0 else 0.0
    att_term = (1.0 - lam) * att_logp if lam < 1.0 else 0.0
    return ctc_term + att_term


def joint_beam_search(
    posteriors: np.ndarray,
    scorer: AttentionScorer,
    utterance_id: str,
    vocab: PhonemeVocab,
    config: DecodeConfig = DecodeConfig(),
) -> list[Hypothesis]:
    """Run the search and return completed hypotheses, best first.

    Raises DecodeFailureError when no hypothesis ever reaches <eos>;
    the error carries the best live hypothesis for diagnostics.
    """
    frames = posteriors.shape[0]
    q = vocab.size
    ctc = CtcPrefixScorer(posteriors, vocab.blank_index, vocab.eos_index)
    lam = config.lambda_decode
    max_len = config.max_len if config.max_len is not None else frames

    extension_labels = [
        c for c in range(q) if c not in (vocab.blank_index, vocab.eos_index)
    ]
    live = [
        Hypothesis(prefix=(), ctc_logp=0.0, att_logp=0.0, joint=0.0,
                   ctc_state=ctc.initial_state())
    ]
    completed: list[Hypothesis] = []
    best_dead: Hypothesis | None = None

    # Steps 1..max_len extend freely; one closing step offers only <eos>
    # so sequences of exactly max_len phonemes can still terminate.
    for step in range(max_len + 1):
        closing = step == max_len
        candidates: list[Hypothesis] = []
        for hyp in live:
            att_row = check_normalized(
                scorer.log_probs(utterance_id, hyp.prefix), q
            )
            psi, states = ctc.extensions(hyp.prefix, hyp.ctc_state)
            labels = (vocab.eos_index,) if closing else (
                *extension_labels, vocab.eos_index)
            for c in labels:
                ctc_logp = float(psi[c])
                if is_dead(ctc_logp):
                    continue
                att_logp = hyp.att_logp + float(att_row[c])
                candidates.append(
                    Hypothesis(
                        prefix=hyp.prefix + (c,),
                        ctc_logp=ctc_logp,
                        att_logp=att_logp,
                        joint=_joint_score(lam, ctc_logp, att_logp),
                        ctc_state=None if c == vocab.eos_index else states[c].copy(),
                    )
                )
        if not candidates:
            best_dead = max(live, key=lambda h: h.joint, default=best_dead)
            break
        candidates.sort(key=lambda h: (-h.joint, h.prefix))
        kept = candidates[: config.beam_width]
        live = [h for h in kept if h.prefix[-1] != vocab.eos_index]
        completed.extend(h for h in kept if h.prefix[-1] == vocab.eos_index)
        if not live:
            break

    if not completed:
        raise DecodeFailureError(
            f"utterance {utterance_id!r}: no complete hypothesis after "
            f"{max_len} steps",
            best_live=best_dead,
        )
    completed.sort(key=lambda h: (-h.joint, h.prefix))
    return completed


def decode_utterance(
    lip_logits: np.ndarray,
    hand_prompt: np.ndarray,
    scorer: AttentionScorer,
    utterance_id: str,
    vocab: PhonemeVocab,
    config: DecodeConfig = DecodeConfig(),
) -> TokenSeq:
    """Fuse, normalize, search; return the best phoneme sequence."""
    fused = fuse_hand_prompt(lip_logits, hand_prompt, config.lambda_prompt)
    posteriors = softmax_posteriors(fused)
    hypotheses = joint_beam_search(posteriors, scorer, utterance_id, vocab, config)
    best = hypotheses[0]
    logger.debug(
        "utterance %s: best joint %.4f over %d completed",
        utterance_id, best.joint, len(hypotheses),
    )
    return best.prefix[:-1]
