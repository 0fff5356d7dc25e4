"""Hand keyframe selection from a hand-position track.

A cuer pauses on each hand code, so keyframes are found by thresholding
inter-frame movement speed, grouping nearby slow frames, and taking one
representative frame per group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TrackTooShortError


@dataclass(frozen=True)
class KeyframeGroup:
    """One slow-motion group and its representative frame."""

    keyframe: int
    frames: tuple[int, ...]


def motion_distances(track: np.ndarray) -> np.ndarray:
    """Euclidean distance between adjacent track points.

    `track` has shape (T, 2) with pixel coordinates; the result has
    length T-1 where entry j-1 is the distance travelled into frame j.
    """
    pts = np.asarray(track, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"track must have shape (T, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("track contains non-finite coordinates")
    if pts.shape[0] < 2:
        raise TrackTooShortError(
            f"need at least 2 frames to measure motion, got {pts.shape[0]}"
        )
    deltas = np.diff(pts, axis=0)
    return np.hypot(deltas[:, 0], deltas[:, 1])


def select_slow_frames(distances: np.ndarray, sigma: float) -> list[int]:
    """Frames whose incoming movement distance is at most sigma.

    Frame j (j >= 1) is selected when distances[j-1] <= sigma; frame 0
    has no incoming distance and is never selected.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    dist = np.asarray(distances, dtype=np.float64)
    return [int(j) for j in np.flatnonzero(dist <= sigma) + 1]


def group_frames(slow_frames: list[int], theta: int) -> list[list[int]]:
    """Split slow frames into groups of index-adjacent runs.

    Consecutive selected frames stay in one group while their index gap
    is at most theta; a larger gap closes the group and the current
    frame opens the next one. The trailing group is always flushed.
    """
    if theta < 1:
        raise ValueError("theta must be at least 1")
    groups: list[list[int]] = []
    current: list[int] = []
    prev = None
    for j in slow_frames:
        if prev is not None and j <= prev:
            raise ValueError("slow frame indices must be strictly increasing")
        if not current or j - prev <= theta:
            current.append(j)
        else:
            groups.append(current)
            current = [j]
        prev = j
    if current:
        groups.append(current)
    return groups


def pick_keyframes(groups: list[list[int]]) -> list[KeyframeGroup]:
    """Take the middle frame of each group (lower median for even sizes)."""
    picked = []
    for group in groups:
        if not group:
            raise ValueError("empty slow-motion group")
        mid = group[(len(group) - 1) // 2]
        picked.append(KeyframeGroup(keyframe=mid, frames=tuple(group)))
    return picked


def filter_keyframes(
    track: np.ndarray, sigma: float = 6.0, theta: int = 2
) -> list[KeyframeGroup]:
    """Full keyframe filter: distances -> slow frames -> groups -> picks."""
    distances = motion_distances(track)
    slow = select_slow_frames(distances, sigma)
    return pick_keyframes(group_frames(slow, theta))
