"""Exact squared Euclidean distance transform and palm-center extraction.

The transform is separable: a column sweep reduces the 2-D problem to
one exact 1-D distance per column, then a per-row lower-envelope pass
over parabolas yields the full squared distance.  Everything stays in
integers; the square root is taken only when a radius is reported, so
comparisons (and the morphology built on top of this module) are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHandError


@dataclass(frozen=True)
class PalmCenter:
    """Deepest point of a hand mask: the distance-transform argmax."""

    x: int
    y: int
    inradius_px: float


def _column_distances(target: np.ndarray) -> np.ndarray:
    """Per pixel: distance (not squared) to the nearest target pixel in its column."""
    h, w = target.shape
    far = h + w + 1
    out = np.empty((h, w), dtype=np.int64)
    cur = np.full(w, far, dtype=np.int64)
    for y in range(h):
        cur = np.where(target[y], 0, np.minimum(cur + 1, far))
        out[y] = cur
    cur = np.full(w, far, dtype=np.int64)
    for y in range(h - 1, -1, -1):
        cur = np.minimum(cur + 1, out[y])
        out[y] = cur
    return np.minimum(out, far)


def _envelope_row(g: list[int], n: int) -> list[int]:
    """1-D squared-distance pass: d[x] = min over x' of (x - x')^2 + g[x']."""
    v = [0] * n           # parabola sites
    z = [0.0] * (n + 1)   # boundaries between envelope segments
    d = [0] * n
    k = 0
    z[0] = -math.inf
    z[1] = math.inf
    for q in range(1, n):
        fq = g[q] + q * q
        while True:
            p = v[k]
            s = (fq - (g[p] + p * p)) / (2 * q - 2 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = math.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) * (q - p) + g[p]
    return d


def sq_edt(target: np.ndarray) -> np.ndarray:
    """Exact squared distance from every pixel to the nearest True pixel.

    If no pixel is True, every entry holds a value strictly larger than
    any squared distance realizable on the grid.
    """
    h, w = target.shape
    far = h + w + 1
    if not target.any():
        return np.full((h, w), far * far, dtype=np.int64)
    col = _column_distances(target)
    g = col * col
    out = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        out[y] = _envelope_row(g[y].tolist(), w)
    return out


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Squared distance from each pixel to the nearest background pixel.

    The mask is treated as if surrounded by background, so foreground
    touching the frame edge still gets a finite distance.  Background
    pixels hold exactly 0, foreground pixels at least 1.
    """
    padded = np.pad(mask, 1, constant_values=False)
    return sq_edt(~padded)[1:-1, 1:-1]


def find_palm_center(dist: np.ndarray, hand_mask: np.ndarray) -> PalmCenter:
    """Argmax of the distance map over the hand's pixels.

    Ties resolve to the smallest y, then the smallest x.  Raises
    DegenerateHandError when the hand is nowhere farther than one pixel
    from background (no palm body to speak of).
    """
    if dist.shape != hand_mask.shape:
        raise ValueError("distance map and hand mask shapes differ")
    vals = np.where(hand_mask, dist, -1)
    best = int(vals.max())
    if best <= 1:
        raise DegenerateHandError("hand mask is thinner than 2 px everywhere")
    flat = int(np.argmax(vals))  # first max in row-major order: min y, then min x
    y, x = divmod(flat, vals.shape[1])
    return PalmCenter(x=x, y=y, inradius_px=math.sqrt(best))
