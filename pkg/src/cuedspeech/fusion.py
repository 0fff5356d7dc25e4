"""Hand-lip fusion in logit space.

Lip scores arrive as a T x q pre-normalization matrix from the lip
pipeline's output projection. The hand prompt is added on top with a
non-negative weight, and the fused rows are renormalized into CTC
posteriors. Adding a constant to a whole row therefore changes
nothing, and a weight of zero reproduces the pure-lip posteriors.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatchError
from .matrixio import check_finite


def fuse_hand_prompt(
    lip_logits: np.ndarray, hand_prompt: np.ndarray, prompt_weight: float
) -> np.ndarray:
    """Elementwise fusion: lip_logits + prompt_weight * hand_prompt."""
    if prompt_weight < 0:
        raise ValueError("prompt weight must be non-negative")
    lip = check_finite(lip_logits, "lip logits")
    hand = check_finite(hand_prompt, "hand prompt")
    if lip.shape != hand.shape:
        raise ShapeMismatchError(
            f"lip logits {lip.shape} and hand prompt {hand.shape} differ"
        )
    return lip + prompt_weight * hand


def softmax_posteriors(logits: np.ndarray) -> np.ndarray:
    """Row-wise exponential normalization with max-subtraction."""
    arr = check_finite(logits, "logits")
    shifted = arr - arr.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=1, keepdims=True)
