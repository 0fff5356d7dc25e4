"""Incremental CTC prefix probabilities.

For a T x q row-stochastic posterior matrix, the prefix probability of
a label sequence g is the total probability of every frame-level path
whose CTC collapse (merge adjacent repeats, then drop blanks) begins
with g. It is computed with the usual two-variable forward recursion
that tracks, per frame, the probability of having produced exactly g
with the path ending in the last label versus ending in blank.

Scores live in log space. Zero probability is represented by the
finite floor ``NEG_INF`` so that arithmetic never produces NaN; any
value at or below ``DEAD_SCORE`` means an impossible branch.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .matrixio import is_row_stochastic

NEG_INF = -1.0e30
DEAD_SCORE = -1.0e29


def is_dead(score: float) -> bool:
    """True when a log score denotes an unreachable branch."""
    return score <= DEAD_SCORE


class CtcPrefixScorer:
    """Prefix scoring over one utterance's CTC posteriors.

    State for a prefix g is a (T, 2) array of log forward probabilities:
    column 0 holds paths over frames 0..t that collapse to exactly g and
    end in g's last label, column 1 those ending in blank. Extending g
    by a non-blank label c reuses that state in O(T) per candidate.
    """

    def __init__(self, posteriors: np.ndarray, blank_index: int, eos_index: int,
                 validate: bool = True):
        post = np.asarray(posteriors, dtype=np.float64)
        if post.ndim != 2 or post.shape[0] < 1:
            raise ValueError(f"posteriors must be 2-D with T >= 1, got {post.shape}")
        if validate and not is_row_stochastic(post):
            raise ValueError("posteriors rows must sum to 1 with entries in [0, 1]")
        self.frames, self.vocab_size = post.shape
        if not (0 <= blank_index < self.vocab_size):
            raise ValueError("blank index out of range")
        if not (0 <= eos_index < self.vocab_size) or eos_index == blank_index:
            raise ValueError("eos index out of range or equal to blank")
        self.blank = blank_index
        self.eos = eos_index
        with np.errstate(divide="ignore"):
            logp = np.log(post)
        self.log_probs = np.where(np.isfinite(logp), logp, NEG_INF)

    def initial_state(self) -> np.ndarray:
        """State of the empty prefix: only all-blank paths exist."""
        r = np.full((self.frames, 2), NEG_INF)
        r[0, 1] = self.log_probs[0, self.blank]
        for t in range(1, self.frames):
            r[t, 1] = r[t - 1, 1] + self.log_probs[t, self.blank]
        return r

    def extensions(
        self, prefix: Sequence[int], state: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Score every single-label extension of ``prefix``.

        Returns ``(psi, states)`` where ``psi[c]`` is the log prefix
        probability of prefix+[c] for each non-blank label c, with two
        special entries: ``psi[eos]`` is the log probability that the
        collapse equals the prefix exactly, and ``psi[blank]`` is dead.
        ``states[c]`` is the (T, 2) forward state of prefix+[c].
        """
        T, q = self.frames, self.vocab_size
        lp = self.log_probs
        n = len(prefix)
        if n > 0 and not (0 <= prefix[-1] < q):
            raise ValueError(f"prefix label {prefix[-1]} out of range")

        r_prev = state
        r_sum = np.logaddexp(r_prev[:, 0], r_prev[:, 1])  # exactly-g mass per frame

        if n >= T:
            # No room for another emission; only exact-match mass survives.
            psi = np.full(q, NEG_INF)
            psi[self.eos] = r_sum[T - 1]
            return psi, np.full((q, T, 2), NEG_INF)

        # phi[t, c]: probability g is complete after frames 0..t in a way
        # that allows emitting c next (repeated labels need a blank gap).
        phi = np.repeat(r_sum[:, None], q, axis=1)
        if n > 0:
            phi[:, prefix[-1]] = r_prev[:, 1]

        r = np.full((T, 2, q), NEG_INF)
        if n == 0:
            r[0, 0, :] = lp[0, :]
        start = max(n, 1)
        psi = r[start - 1, 0, :].copy()
        blank_col = lp[:, self.blank]
        for t in range(start, T):
            emit = phi[t - 1, :] + lp[t, :]
            r[t, 0, :] = np.logaddexp(r[t - 1, 0, :] + lp[t, :], emit)
            r[t, 1, :] = np.logaddexp(r[t - 1, 0, :], r[t - 1, 1, :]) + blank_col[t]
            psi = np.logaddexp(psi, emit)

        psi[self.eos] = r_sum[T - 1]
        psi[self.blank] = NEG_INF
        return psi, np.moveaxis(r, 2, 0)

    def score_extension(
        self, prefix: Sequence[int], label: int, state: np.ndarray
    ) -> tuple[float, np.ndarray]:
        """Log prefix probability and new state for prefix+[label].

        For ``label == eos`` the returned score is the exact-sequence
        probability of the prefix and the state is unusable (complete
        hypotheses are never extended).
        """
        if label == self.blank:
            raise ValueError("cannot extend a prefix with blank")
        psi, states = self.extensions(prefix, state)
        return float(psi[label]), states[label]

    def full_sequence_logprob(self, labels: Sequence[int]) -> float:
        """Log probability that the whole-utterance collapse equals ``labels``."""
        state = self.initial_state()
        prefix: tuple[int, ...] = ()
        for label in labels:
            _, state = self.score_extension(prefix, label, state)
            prefix = prefix + (label,)
        return float(np.logaddexp(state[-1, 0], state[-1, 1]))
