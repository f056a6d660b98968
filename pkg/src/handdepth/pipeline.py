"""End-to-end detection: frames in, labeled hand reports out.

Per frame and per hand the stages run in a fixed order: seed finding,
depth-band threshold, blob selection, hole filling, distance transform,
palm center and inradius, opening with an inradius-scaled disk, finger
masks by subtraction, minimum-depth fingertips, then identity labeling
and tracking.  The distance transform runs before palm extraction so the
opening radius can scale with the measured inradius; the palm center is
then re-taken as the argmax restricted to the opened palm, which keeps
it on the palm body even for extreme poses.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Iterator

from .calibration import CalibrationParams, DEFAULT_CALIBRATION
from .distance import PalmCenter, distance_transform, find_palm_center
from .errors import (
    ConfigError,
    DegenerateHandError,
    DomainError,
    EmptyResultError,
    NotFoundError,
)
from .fingertips import Fingertip, detect_fingertips
from .frame_io import DepthFrame, DetectionReport
from .morphology import auto_radius, default_min_finger_area, extract_palm, finger_masks
from .segmentation import (
    Blob,
    connected_components,
    depth_threshold,
    fill_holes,
    find_hand_seeds,
    select_hand_blob,
)
from .tracking import HandObservation, TrackState, label_hands, update

log = logging.getLogger(__name__)

_CROP_MARGIN = 2  # keeps morphology clear of the bbox edge


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the detection pipeline, with working defaults."""

    calibration: CalibrationParams = DEFAULT_CALIBRATION
    band_cm: float = 15.0
    slab_cm: float = 20.0
    min_area: int = 100
    radius_factor: float = 0.7
    min_finger_area: int | None = None  # None: scale with the hand's area
    max_hands: int = 2
    max_misses: int = 5
    workers: int = 1

    def __post_init__(self) -> None:
        if self.band_cm <= 0 or self.slab_cm <= 0:
            raise ConfigError("band_cm and slab_cm must be positive")
        if self.min_area < 1:
            raise ConfigError("min_area must be >= 1")
        if not 0 < self.radius_factor < 1:
            raise ConfigError("radius_factor must lie in (0, 1)")
        if self.min_finger_area is not None and self.min_finger_area < 0:
            raise ConfigError("min_finger_area must be >= 0")
        if self.max_hands not in (1, 2):
            raise ConfigError("max_hands must be 1 or 2")
        if self.max_misses < 1:
            raise ConfigError("max_misses must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


_CALIBRATION_KEYS = {"h": "h_rad", "k": "k_cm", "l": "l_rad", "o": "o_cm",
                     "raw_valid_max": "raw_valid_max"}


def config_from_dict(data: dict) -> PipelineConfig:
    """Build a config from parsed JSON; unknown keys are rejected."""
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "calibration" in kwargs:
        cal = kwargs["calibration"]
        if not isinstance(cal, dict):
            raise ConfigError("calibration must be an object")
        bad = set(cal) - set(_CALIBRATION_KEYS)
        if bad:
            raise ConfigError(f"unknown calibration keys: {sorted(bad)}")
        try:
            kwargs["calibration"] = CalibrationParams(
                **{_CALIBRATION_KEYS[k]: v for k, v in cal.items()}
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return PipelineConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc


def config_to_dict(config: PipelineConfig) -> dict:
    cal = config.calibration
    return {
        "calibration": {
            "h": cal.h_rad,
            "k": cal.k_cm,
            "l": cal.l_rad,
            "o": cal.o_cm,
            "raw_valid_max": cal.raw_valid_max,
        },
        "band_cm": config.band_cm,
        "slab_cm": config.slab_cm,
        "min_area": config.min_area,
        "radius_factor": config.radius_factor,
        "min_finger_area": config.min_finger_area,
        "max_hands": config.max_hands,
        "max_misses": config.max_misses,
        "workers": config.workers,
    }


def _shift_palm(palm: PalmCenter, ox: int, oy: int) -> PalmCenter:
    return PalmCenter(x=palm.x + ox, y=palm.y + oy, inradius_px=palm.inradius_px)


def _shift_tip(tip: Fingertip, ox: int, oy: int) -> Fingertip:
    return Fingertip(x=tip.x + ox, y=tip.y + oy, depth_cm=tip.depth_cm,
                     finger_index=tip.finger_index)


def _analyze_hand(
    frame: DepthFrame, blob: Blob, config: PipelineConfig
) -> HandObservation:
    """Palm center and fingertips of one segmented hand blob."""
    min_x, min_y, max_x, max_y = blob.bbox
    h, w = blob.mask.shape
    y0, y1 = max(0, min_y - _CROP_MARGIN), min(h, max_y + 1 + _CROP_MARGIN)
    x0, x1 = max(0, min_x - _CROP_MARGIN), min(w, max_x + 1 + _CROP_MARGIN)
    hand = fill_holes(blob.mask[y0:y1, x0:x1])
    crop = DepthFrame(frame.samples[y0:y1, x0:x1])

    dist = distance_transform(hand)
    seed_palm = find_palm_center(dist, hand)
    radius = auto_radius(seed_palm.inradius_px, config.radius_factor)
    palm_mask = extract_palm(hand, radius)
    palm = find_palm_center(dist, palm_mask)

    min_finger = (
        config.min_finger_area
        if config.min_finger_area is not None
        else default_min_finger_area(int(hand.sum()))
    )
    fingers = finger_masks(hand, palm_mask, min_finger, (palm.x, palm.y))
    tips = detect_fingertips(crop, fingers, config.calibration)
    return (
        _shift_palm(palm, x0, y0),
        [_shift_tip(t, x0, y0) for t in tips],
        blob,
    )


def extract_hands(frame: DepthFrame, config: PipelineConfig) -> list[HandObservation]:
    """Stateless per-frame analysis: everything before identity labeling.

    A frame with nothing segmentable yields an empty list; a hand that
    fails partway (degenerate mask, empty opening) is skipped with a
    warning rather than failing the frame.
    """
    try:
        seeds = find_hand_seeds(
            frame, config.max_hands, config.min_area, config.slab_cm, config.calibration
        )
    except NotFoundError:
        return []
    observations: list[HandObservation] = []
    for seed in seeds:
        if any(obs[2].contains(seed.x, seed.y) for obs in observations):
            continue  # both seeds landed on one blob; report it once
        try:
            mask = depth_threshold(frame, seed, config.band_cm, config.calibration)
            blob = select_hand_blob(connected_components(mask), seed)
            observations.append(_analyze_hand(frame, blob, config))
        except (NotFoundError, DegenerateHandError, EmptyResultError, DomainError) as exc:
            log.warning("hand at seed (%d, %d) dropped: %s", seed.x, seed.y, exc)
    return observations


def run_pipeline(
    frames: Iterable[DepthFrame], config: PipelineConfig = PipelineConfig()
) -> Iterator[DetectionReport]:
    """Detect, label, and track hands over an ordered frame sequence.

    Per-frame analysis may fan out to a worker pool; results are consumed
    in input order and the tracker state advances strictly frame by
    frame, so output is identical for any worker count.
    """
    state = TrackState(max_misses=config.max_misses)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            candidates = pool.map(lambda f: extract_hands(f, config), frames)
            for index, observed in enumerate(candidates):
                reports = label_hands(observed, state)
                update(state, reports, index)
                yield DetectionReport(frame_index=index, hands=reports)
    else:
        for index, frame in enumerate(frames):
            reports = label_hands(extract_hands(frame, config), state)
            update(state, reports, index)
            yield DetectionReport(frame_index=index, hands=reports)
