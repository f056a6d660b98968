"""Binary morphology with closed-disk structuring elements.

Erosion and dilation are computed by thresholding the exact squared
distance transform: a pixel survives erosion by a radius-r disk iff its
squared distance to background exceeds r*r, and dilation is the dual
threshold on the distance to foreground.  This is exact for closed
disks (offsets dx^2 + dy^2 <= r^2) and costs O(pixels) regardless of
radius.  Out-of-frame pixels count as background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distance import distance_transform, sq_edt
from .errors import EmptyResultError
from .segmentation import connected_components


@dataclass(frozen=True)
class DiskElement:
    """Closed rasterized disk: all integer offsets with dx^2 + dy^2 <= radius^2."""

    radius: int

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("disk radius must be >= 0")

    @property
    def offsets(self) -> list[tuple[int, int]]:
        r = self.radius
        rr = r * r
        return [
            (dx, dy)
            for dy in range(-r, r + 1)
            for dx in range(-r, r + 1)
            if dx * dx + dy * dy <= rr
        ]


def erode(mask: np.ndarray, elem: DiskElement) -> np.ndarray:
    """Minkowski erosion: keep pixels whose whole disk neighborhood is foreground."""
    if elem.radius == 0:
        return mask.copy()
    return distance_transform(mask) > elem.radius * elem.radius


def dilate(mask: np.ndarray, elem: DiskElement) -> np.ndarray:
    """Minkowski dilation: mark pixels within the disk of any foreground pixel."""
    if elem.radius == 0:
        return mask.copy()
    return sq_edt(mask) <= elem.radius * elem.radius


def opening(mask: np.ndarray, elem: DiskElement) -> np.ndarray:
    """Erosion followed by dilation; removes protrusions thinner than the disk."""
    return dilate(erode(mask, elem), elem)


def extract_palm(hand_mask: np.ndarray, radius: int) -> np.ndarray:
    """Strip everything thinner than the disk (the fingers), keeping the palm body.

    Raises EmptyResultError when the radius exceeds the palm inradius and
    the opening annihilates the hand entirely.
    """
    if radius < 1:
        raise ValueError("palm extraction radius must be >= 1")
    opened = opening(hand_mask, DiskElement(radius))
    if not opened.any():
        raise EmptyResultError(f"opening by radius {radius} left no palm")
    return opened


def auto_radius(palm_inradius: float, factor: float = 0.7) -> int:
    """Structuring-element radius scaled from the measured palm inradius.

    A fixed radius would break as the hand moves nearer or farther; a
    fraction of the inradius tracks the hand's apparent size.
    """
    if palm_inradius < 1:
        raise ValueError("palm inradius must be >= 1")
    if not 0 < factor < 1:
        raise ValueError("radius factor must lie in (0, 1)")
    return max(1, round(factor * palm_inradius))


def default_min_finger_area(hand_area: int) -> int:
    """Area floor that drops palm-rim subtraction slivers but keeps real fingers."""
    return max(4, round(0.05 * hand_area / 5))


def finger_masks(
    hand_mask: np.ndarray,
    palm_mask: np.ndarray,
    min_finger_area: int,
    palm_center: tuple[float, float],
) -> list[np.ndarray]:
    """Connected remnants of hand minus palm, filtered and ordered.

    Components smaller than ``min_finger_area`` are discarded (they are
    usually 1-2 px slivers where the opening undercut the palm rim); at
    most the five largest survive, ordered by the angle of their centroid
    around the palm center.  An empty list is a valid outcome (a fist).
    """
    if (palm_mask & ~hand_mask).any():
        raise ValueError("palm mask must be a subset of the hand mask")
    blobs = connected_components(hand_mask & ~palm_mask)
    blobs = [b for b in blobs if b.area >= min_finger_area]
    if len(blobs) > 5:
        blobs.sort(key=lambda b: (-b.area, b.label))
        blobs = blobs[:5]
    px, py = palm_center

    def angle(blob) -> tuple[float, int]:
        cx, cy = blob.centroid
        return math.atan2(cy - py, cx - px), blob.label

    blobs.sort(key=angle)
    return [b.mask for b in blobs]
