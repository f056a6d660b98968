"""Depth-band hand segmentation and 8-connected blob extraction.

A hand is whatever connected region sits within a metric depth band of a
seed pixel.  Seeds either come from an external tracker or from the
nearest-object heuristic in find_hand_seeds (hands are assumed to be the
closest things to the camera).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibrationParams, DEFAULT_CALIBRATION, depth_image_cm, raw_to_cm
from .errors import DomainError, NotFoundError
from .frame_io import DepthFrame


@dataclass(frozen=True)
class HandSeed:
    """A pixel assumed to lie on a hand, with the raw depth found there."""

    x: int
    y: int
    depth_raw: int


@dataclass(eq=False)
class Blob:
    """One maximal connected foreground component.

    Holds a reference to the shared label image instead of its own mask,
    so frames with many components stay cheap; ``mask`` materializes a
    boolean view on demand.
    """

    label: int
    area: int
    bbox: tuple[int, int, int, int]  # min_x, min_y, max_x, max_y (inclusive)
    centroid: tuple[float, float]  # (x, y)
    labels: np.ndarray = field(repr=False)  # int32 label image, 0 = background

    @property
    def mask(self) -> np.ndarray:
        return self.labels == self.label

    def contains(self, x: int, y: int) -> bool:
        h, w = self.labels.shape
        return 0 <= x < w and 0 <= y < h and int(self.labels[y, x]) == self.label

    @property
    def pixels(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.labels == self.label)
        return {(int(x), int(y)) for x, y in zip(xs, ys)}


def _row_runs(row: np.ndarray) -> np.ndarray:
    """Half-open [start, end) column spans of each maximal run of True."""
    edges = np.flatnonzero(np.diff(np.concatenate(([0], row.astype(np.uint8), [0]))))
    return edges.reshape(-1, 2)


def label_image(mask: np.ndarray, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label connected foreground components; 0 marks background.

    Works on horizontal runs merged across adjacent rows with union-find,
    so cost scales with the number of runs, not pixels.  Labels start at 1
    and are assigned in raster order of each component's first pixel,
    which makes the result deterministic.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    h, w = mask.shape
    runs: list[tuple[int, int, int]] = []  # (y, start, end)
    row_first: list[int] = []  # index of each row's first run
    for y in range(h):
        row_first.append(len(runs))
        for a, b in _row_runs(mask[y]):
            runs.append((y, int(a), int(b)))
    row_first.append(len(runs))

    parent = list(range(len(runs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            # keep the smaller (earlier, raster-order) index as root
            if ri < rj:
                parent[rj] = ri
            else:
                parent[ri] = rj

    for y in range(1, h):
        i = row_first[y - 1]
        j = row_first[y]
        end_prev = row_first[y]
        end_cur = row_first[y + 1]
        while i < end_prev and j < end_cur:
            _, b0, b1 = runs[i]
            _, a0, a1 = runs[j]
            if connectivity == 8:
                touching = a0 <= b1 and b0 <= a1
            else:
                touching = a0 < b1 and b0 < a1
            if touching:
                union(i, j)
            # advance whichever run ends first
            if b1 < a1:
                i += 1
            else:
                j += 1

    labels = np.zeros((h, w), dtype=np.int32)
    label_of_root: dict[int, int] = {}
    for idx, (y, a, b) in enumerate(runs):
        root = find(idx)
        lab = label_of_root.get(root)
        if lab is None:
            lab = len(label_of_root) + 1
            label_of_root[root] = lab
        labels[y, a:b] = lab
    return labels, len(label_of_root)


def connected_components(mask: np.ndarray, connectivity: int = 8) -> list[Blob]:
    """Maximal connected components of the foreground as Blob records."""
    labels, count = label_image(mask, connectivity)
    if count == 0:
        return []
    stats = [
        {"area": 0, "min_x": 0, "min_y": 0, "max_x": 0, "max_y": 0, "sum_x": 0, "sum_y": 0}
        for _ in range(count)
    ]
    seen = [False] * count
    for y in range(labels.shape[0]):
        for a, b in _row_runs(labels[y] > 0):
            lab = int(labels[y, a])
            st = stats[lab - 1]
            n = int(b - a)
            if not seen[lab - 1]:
                seen[lab - 1] = True
                st["min_x"], st["min_y"] = int(a), y
                st["max_x"], st["max_y"] = int(b) - 1, y
            st["area"] += n
            st["min_x"] = min(st["min_x"], int(a))
            st["max_x"] = max(st["max_x"], int(b) - 1)
            st["max_y"] = y
            st["sum_x"] += n * (int(a) + int(b) - 1) // 2
            st["sum_y"] += n * y
    blobs = []
    for lab, st in enumerate(stats, start=1):
        blobs.append(
            Blob(
                label=lab,
                area=st["area"],
                bbox=(st["min_x"], st["min_y"], st["max_x"], st["max_y"]),
                centroid=(st["sum_x"] / st["area"], st["sum_y"] / st["area"]),
                labels=labels,
            )
        )
    return blobs


def depth_threshold(
    frame: DepthFrame,
    seed: HandSeed,
    band_cm: float,
    params: CalibrationParams = DEFAULT_CALIBRATION,
) -> np.ndarray:
    """Foreground mask: valid pixels within +/- band_cm of the seed's depth."""
    if band_cm <= 0:
        raise ValueError("band_cm must be positive")
    if not 0 <= seed.depth_raw <= params.raw_valid_max:
        raise DomainError(f"seed depth raw={seed.depth_raw} is not a valid measurement")
    seed_cm = raw_to_cm(seed.depth_raw, params)
    cm, valid = depth_image_cm(frame.samples, params)
    mask = np.zeros(valid.shape, dtype=bool)
    mask[valid] = np.abs(cm[valid] - seed_cm) <= band_cm
    return mask


def select_hand_blob(blobs: list[Blob], seed: HandSeed) -> Blob:
    """The unique blob containing the seed pixel; NotFoundError if background."""
    for blob in blobs:
        if blob.contains(seed.x, seed.y):
            return blob
    raise NotFoundError(f"seed pixel ({seed.x}, {seed.y}) lies on background")


def find_hand_seeds(
    frame: DepthFrame,
    max_hands: int,
    min_area: int,
    slab_cm: float = 20.0,
    params: CalibrationParams = DEFAULT_CALIBRATION,
) -> list[HandSeed]:
    """Guess up to max_hands seed pixels, assuming hands are the nearest objects.

    Thresholds the frame at the nearest valid depth plus ``slab_cm``,
    keeps components with at least ``min_area`` pixels ordered by area,
    and seeds each at its nearest-depth pixel (raster order on ties).
    """
    if max_hands not in (1, 2):
        raise ValueError("max_hands must be 1 or 2")
    if min_area < 1:
        raise ValueError("min_area must be >= 1")
    samples = frame.samples
    valid = samples <= params.raw_valid_max
    if not valid.any():
        raise NotFoundError("frame has no valid depth samples")
    near_raw = int(samples[valid].min())
    near_cm = raw_to_cm(near_raw, params)
    cm, _ = depth_image_cm(samples, params)
    fg = np.zeros(valid.shape, dtype=bool)
    fg[valid] = cm[valid] <= near_cm + slab_cm
    blobs = [b for b in connected_components(fg) if b.area >= min_area]
    if not blobs:
        raise NotFoundError(f"no foreground component reaches min_area={min_area}")
    blobs.sort(key=lambda b: (-b.area, b.label))
    seeds = []
    for blob in blobs[:max_hands]:
        vals = np.where(blob.mask, samples.astype(np.int64), 4096)
        flat = int(np.argmin(vals))  # first min in raster order
        y, x = divmod(flat, vals.shape[1])
        seeds.append(HandSeed(x=x, y=y, depth_raw=int(samples[y, x])))
    return seeds


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Fill background pockets not connected to the frame border.

    Depth dropouts punch sentinel holes through segmented hands; left in
    place they would wreck the distance transform (a hole looks like
    background right next to the palm center).  Background is traced with
    4-connectivity, the proper dual of 8-connected foreground.
    """
    padded = np.pad(mask, 1, constant_values=False)
    labels, count = label_image(~padded, connectivity=4)
    if count == 0:
        return mask.copy()
    border = np.unique(
        np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    )
    outside = np.isin(labels, border[border > 0])
    return (~outside)[1:-1, 1:-1]
