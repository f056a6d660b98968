"""Conversion between 11-bit raw disparity and metric depth.

The sensor reports 2048 disparity levels per pixel.  Metric depth follows
a tangent model, ``depth_cm = k * tan(h * raw + l) - o``, which has a pole
inside the 11-bit range (raw ~1116.6 with the default constants), so all
conversions are restricted to an explicit valid domain.  Raw value 2047
is reserved as the "no measurement" sentinel and never converts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

RAW_SENTINEL = 2047
RAW_CEILING = 2046  # largest raw value that could ever carry a measurement


@dataclass(frozen=True)
class CalibrationParams:
    """Tangent-model constants plus the usable raw range.

    Defaults are the published constants for this sensor class.  The model
    is only trusted up to ``raw_valid_max``; disparities beyond it sit too
    close to the tangent pole to convert into meaningful depths.
    """

    h_rad: float = 3.5e-4  # radians per raw unit
    k_cm: float = 12.36
    l_rad: float = 1.18
    o_cm: float = 3.7
    raw_valid_max: int = 1100

    def __post_init__(self) -> None:
        for name in ("h_rad", "k_cm", "l_rad", "o_cm"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"calibration parameter {name} must be finite")
        if self.h_rad <= 0 or self.k_cm <= 0:
            raise DomainError("h_rad and k_cm must be positive")
        if not 0 <= self.raw_valid_max <= RAW_CEILING:
            raise DomainError("raw_valid_max must lie in [0, 2046]")
        if self.raw_valid_max > valid_domain(self):
            raise DomainError(
                f"raw_valid_max={self.raw_valid_max} exceeds the tangent-pole "
                f"bound {valid_domain(self)}"
            )


def valid_domain(params: CalibrationParams) -> int:
    """Largest raw value that still converts to a finite depth.

    Solves ``h*raw + l < pi/2`` for raw, clamped to the 11-bit ceiling.
    Raises DomainError when even raw 0 sits past the pole.
    """
    limit = (math.pi / 2 - params.l_rad) / params.h_rad
    if limit <= 0:
        raise DomainError("empty calibration domain: l_rad is at or past pi/2")
    bound = math.ceil(limit) - 1
    # guard against float round-off at the boundary
    while bound >= 0 and params.h_rad * bound + params.l_rad >= math.pi / 2:
        bound -= 1
    if bound < 0:
        raise DomainError("empty calibration domain: l_rad is at or past pi/2")
    return min(bound, RAW_CEILING)


DEFAULT_CALIBRATION = CalibrationParams()


def raw_to_cm(raw: int, params: CalibrationParams = DEFAULT_CALIBRATION) -> float:
    """Convert one raw disparity sample to depth in centimeters.

    Strictly increasing over the valid domain, so raw-space comparisons
    and metric comparisons agree.
    """
    if raw == RAW_SENTINEL:
        raise DomainError("raw 2047 is the no-measurement sentinel")
    if not 0 <= raw <= params.raw_valid_max:
        raise DomainError(
            f"raw disparity {raw} outside valid domain [0, {params.raw_valid_max}]"
        )
    return params.k_cm * math.tan(params.h_rad * raw + params.l_rad) - params.o_cm


def cm_to_raw(depth_cm: float, params: CalibrationParams = DEFAULT_CALIBRATION) -> int:
    """Inverse of raw_to_cm, rounded to the nearest raw step.

    Round-trips with raw_to_cm to within one raw unit.  Raises DomainError
    for depths whose disparity would fall outside the valid domain.
    """
    raw = round((math.atan((depth_cm + params.o_cm) / params.k_cm) - params.l_rad) / params.h_rad)
    if not 0 <= raw <= params.raw_valid_max:
        raise DomainError(
            f"depth {depth_cm} cm maps to raw {raw}, outside [0, {params.raw_valid_max}]"
        )
    return raw


def cm_per_raw(raw: int, params: CalibrationParams = DEFAULT_CALIBRATION) -> float:
    """Metric size of one raw step at the given disparity (the model's slope).

    Grows quickly toward the pole: a raw unit spans ~0.12 cm at 60 cm but
    ~0.67 cm at 150 cm.
    """
    if not 0 <= raw <= params.raw_valid_max:
        raise DomainError(
            f"raw disparity {raw} outside valid domain [0, {params.raw_valid_max}]"
        )
    return params.k_cm * params.h_rad / math.cos(params.h_rad * raw + params.l_rad) ** 2


def depth_image_cm(
    samples: np.ndarray, params: CalibrationParams = DEFAULT_CALIBRATION
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized raw_to_cm over a whole frame.

    Returns ``(cm, valid)`` where ``valid`` flags samples inside the
    calibration domain (the sentinel is never valid) and ``cm`` holds NaN
    wherever ``valid`` is False.
    """
    valid = samples <= params.raw_valid_max
    cm = np.full(samples.shape, np.nan)
    r = samples[valid].astype(np.float64)
    cm[valid] = params.k_cm * np.tan(params.h_rad * r + params.l_rad) - params.o_cm
    return cm, valid
