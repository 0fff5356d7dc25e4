import math

import numpy as np
import pytest

from cuedspeech.errors import TrackTooShortError
from cuedspeech.keyframes import (
    filter_keyframes,
    group_frames,
    motion_distances,
    pick_keyframes,
    select_slow_frames,
)


def test_motion_345_triangle():
    assert motion_distances([(0, 0), (3, 4)]).tolist() == [5.0]


def test_motion_stationary():
    track = [(2.0, 2.0)] * 5
    assert motion_distances(track).tolist() == [0.0, 0.0, 0.0, 0.0]


def test_motion_hand_computed():
    d = motion_distances([(0, 0), (1, 1), (4, 5)])
    assert d == pytest.approx([math.sqrt(2.0), 5.0])


def test_motion_too_short():
    with pytest.raises(TrackTooShortError):
        motion_distances([(1, 1)])


def test_select_slow_default_sigma():
    assert select_slow_frames([0, 1, 10, 0], sigma=6) == [1, 2, 4]


def test_select_slow_none():
    assert select_slow_frames([7, 8, 9], sigma=6) == []


def test_select_slow_inclusive_boundary():
    assert select_slow_frames([0, 0, 0], sigma=0) == [1, 2, 3]


def test_group_single():
    assert group_frames([1, 2, 4, 5], theta=2) == [[1, 2, 4, 5]]


def test_group_split():
    assert group_frames([1, 2, 7, 8], theta=2) == [[1, 2], [7, 8]]


def test_group_empty():
    assert group_frames([], theta=2) == []


def test_group_gap_straddling_frame_starts_new_group():
    # The frame that crosses the theta boundary must open the next group,
    # not vanish.
    assert group_frames([1, 5, 6], theta=2) == [[1], [5, 6]]


def test_group_trailing_flush():
    # A run that lasts until the end of the sequence is still emitted.
    assert group_frames([1, 2], theta=2) == [[1, 2]]


def test_pick_odd_middle():
    picks = pick_keyframes([[3, 4, 5]])
    assert [(g.keyframe, g.frames) for g in picks] == [(4, (3, 4, 5))]


def test_pick_even_lower_median():
    assert pick_keyframes([[3, 4, 5, 6]])[0].keyframe == 4


def test_pick_singleton():
    assert pick_keyframes([[7]])[0].keyframe == 7


def test_filter_stationary_seven_frames():
    track = [(10.0, 10.0)] * 7
    picks = filter_keyframes(track, sigma=6, theta=2)
    assert len(picks) == 1
    assert picks[0].frames == (1, 2, 3, 4, 5, 6)
    assert picks[0].keyframe == 3


def test_filter_fast_track_has_no_keyframes():
    track = [(0.0, 0.0), (100.0, 0.0), (0.0, 0.0), (100.0, 0.0)]
    assert filter_keyframes(track, sigma=6, theta=2) == []


def test_filter_two_pause_trajectory():
    # pause at x=0 (frames 0-2), sweep right, pause at x=300 (frames 5-7)
    track = [(0, 0), (0, 0), (0, 0), (100, 0), (200, 0), (300, 0), (300, 0), (300, 0)]
    picks = filter_keyframes(track, sigma=6, theta=2)
    assert [(g.keyframe, g.frames) for g in picks] == [(1, (1, 2)), (6, (6, 7))]


def test_properties_random_tracks():
    rng = np.random.default_rng(11)
    for _ in range(200):
        frames = int(rng.integers(2, 30))
        track = rng.normal(scale=20.0, size=(frames, 2))
        d = motion_distances(track)
        small, large = sorted(rng.random(2) * 30.0)
        slow_small = select_slow_frames(d, small)
        slow_large = select_slow_frames(d, large)
        # growing sigma never drops a slow frame
        assert set(slow_small) <= set(slow_large)

        theta = int(rng.integers(1, 4))
        groups = group_frames(slow_large, theta)
        flattened = [j for g in groups for j in g]
        # partition: every slow frame in exactly one group, order kept
        assert flattened == slow_large
        picks = pick_keyframes(groups)
        assert len(picks) == len(groups)
        for pick in picks:
            assert pick.keyframe in pick.frames


def test_deterministic():
    rng = np.random.default_rng(3)
    track = rng.normal(scale=10.0, size=(25, 2))
    a = filter_keyframes(track, sigma=6, theta=2)
    b = filter_keyframes(track, sigma=6, theta=2)
    assert a == b
