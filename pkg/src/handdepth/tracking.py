"""Frame-to-frame hand identity and the two-hand color convention.

A lone hand is reported as Single and drawn white.  With two hands the
one further right (larger palm x) becomes Right/white and the other
Left/pink at track birth; afterwards identities follow palm-center
continuity so that crossing hands keep their colors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .distance import PalmCenter
from .fingertips import Fingertip
from .segmentation import Blob


class HandId(Enum):
    SINGLE = "Single"
    RIGHT = "Right"
    LEFT = "Left"


WHITE = (255, 255, 255)
PINK = (255, 105, 180)

OVERLAY_COLORS = {HandId.SINGLE: WHITE, HandId.RIGHT: WHITE, HandId.LEFT: PINK}


@dataclass
class HandReport:
    """Labeled per-hand detection for one frame."""

    hand_id: HandId
    overlay_color: tuple[int, int, int]
    palm: PalmCenter
    fingertips: list[Fingertip]
    blob_area: int


@dataclass
class _Track:
    identity: HandId | None  # RIGHT/LEFT once assigned in a two-hand frame
    x: float
    y: float
    last_frame: int = -1
    misses: int = 0


@dataclass
class TrackState:
    """Mutable tracker memory; feed frames strictly in order."""

    max_misses: int = 5
    tracks: list[_Track] = field(default_factory=list)


HandObservation = tuple[PalmCenter, list[Fingertip], Blob]


def _sqdist(palm: PalmCenter, track: _Track) -> float:
    return (palm.x - track.x) ** 2 + (palm.y - track.y) ** 2


def _x_order(a: PalmCenter, b: PalmCenter) -> tuple[int, int]:
    """Indices of (right hand, left hand) by image x; ties go to smaller y."""
    if (a.x, -a.y) > (b.x, -b.y):
        return 0, 1
    return 1, 0


def label_hands(hands: list[HandObservation], state: TrackState) -> list[HandReport]:
    """Assign Single/Right/Left identities and overlay colors.

    Two hands with tracked predecessors take whichever Right/Left
    assignment minimizes total palm displacement; without history the
    hand with the larger palm x becomes Right (non-mirrored image).
    """
    if len(hands) > 2:
        raise ValueError("at most two hands per frame")
    if not hands:
        return []
    if len(hands) == 1:
        palm, tips, blob = hands[0]
        return [HandReport(HandId.SINGLE, WHITE, palm, tips, blob.area)]

    (palm_a, tips_a, blob_a), (palm_b, tips_b, blob_b) = hands
    prior = {t.identity: t for t in state.tracks if t.identity in (HandId.RIGHT, HandId.LEFT)}
    if prior:
        straight = swapped = 0.0
        if HandId.RIGHT in prior:
            straight += _sqdist(palm_a, prior[HandId.RIGHT])
            swapped += _sqdist(palm_b, prior[HandId.RIGHT])
        if HandId.LEFT in prior:
            straight += _sqdist(palm_b, prior[HandId.LEFT])
            swapped += _sqdist(palm_a, prior[HandId.LEFT])
        if straight < swapped:
            right_idx, left_idx = 0, 1
        elif swapped < straight:
            right_idx, left_idx = 1, 0
        else:
            right_idx, left_idx = _x_order(palm_a, palm_b)
    else:
        right_idx, left_idx = _x_order(palm_a, palm_b)

    ordered = []
    for idx, ident in ((right_idx, HandId.RIGHT), (left_idx, HandId.LEFT)):
        palm, tips, blob = hands[idx]
        ordered.append(HandReport(ident, OVERLAY_COLORS[ident], palm, tips, blob.area))
    return ordered


def update(state: TrackState, reports: list[HandReport], frame_index: int) -> TrackState:
    """Refresh tracks from this frame's reports; stale tracks age out.

    Matched tracks reset their miss count; unmatched ones accumulate
    misses and drop once max_misses consecutive frames went by without
    a sighting.
    """
    matched: set[int] = set()
    for report in reports:
        track = None
        if report.hand_id in (HandId.RIGHT, HandId.LEFT):
            for i, t in enumerate(state.tracks):
                if i not in matched and t.identity == report.hand_id:
                    track = i
                    break
            if track is None:  # adopt the nearest unlabeled track, if any
                candidates = [
                    (_sqdist(report.palm, t), i)
                    for i, t in enumerate(state.tracks)
                    if i not in matched and t.identity is None
                ]
                if candidates:
                    track = min(candidates)[1]
                    state.tracks[track].identity = report.hand_id
        else:
            candidates = [
                (_sqdist(report.palm, t), i)
                for i, t in enumerate(state.tracks)
                if i not in matched
            ]
            if candidates:
                track = min(candidates)[1]
        if track is None:
            identity = report.hand_id if report.hand_id is not HandId.SINGLE else None
            state.tracks.append(
                _Track(identity=identity, x=report.palm.x, y=report.palm.y, last_frame=frame_index)
            )
            matched.add(len(state.tracks) - 1)
        else:
            t = state.tracks[track]
            t.x, t.y = report.palm.x, report.palm.y
            t.last_frame = frame_index
            t.misses = 0
            matched.add(track)

    survivors = []
    for i, t in enumerate(state.tracks):
        if i not in matched:
            t.misses += 1
        if t.misses < state.max_misses:
            survivors.append(t)
    state.tracks = survivors
    return state
