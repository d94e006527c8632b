"""Histogram-of-oriented-gradients descriptor, numpy only.

Conventional pipeline: bilinear resize to a fixed resolution, central
difference gradients, unsigned orientation binned over [0, 180) with
linear interpolation between neighbouring bins, per-cell magnitude
histograms, and overlapping block windows normalized by L2 with an
epsilon guard. A constant image therefore produces an all-zero
descriptor rather than NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImageTooSmall


@dataclass(frozen=True)
class HogConfig:
    """Descriptor geometry. Defaults are a conventional configuration.

    resize: (width, height) the image is resampled to, must be divisible
        by ``cell``.
    cell: cell side in pixels.
    bins: orientation bins over [0, 180).
    block: block side in cells (blocks slide with stride one cell).
    epsilon: L2 normalization guard.
    """

    resize: tuple[int, int] = (128, 128)
    cell: int = 8
    bins: int = 9
    block: int = 2
    epsilon: float = 1e-5

    def __post_init__(self):
        w, h = self.resize
        if w <= 0 or h <= 0 or self.cell <= 0 or self.bins <= 0 or self.block <= 0:
            raise ValueError("all HOG dimensions must be positive")
        if w % self.cell or h % self.cell:
            raise ValueError(
                f"resize {self.resize} must be divisible by cell {self.cell}"
            )
        if self.block > w // self.cell or self.block > h // self.cell:
            raise ImageTooSmall(
                f"block of {self.block} cells exceeds the "
                f"{w // self.cell}x{h // self.cell} cell grid"
            )

    @property
    def grid(self) -> tuple[int, int]:
        """Cell grid (cols, rows) after resizing."""
        return self.resize[0] // self.cell, self.resize[1] // self.cell

    @property
    def length(self) -> int:
        """Descriptor length: blocks x block^2 x bins."""
        gx, gy = self.grid
        bx, by = gx - self.block + 1, gy - self.block + 1
        return bx * by * self.block * self.block * self.bins


def bilinear_resize(image: np.ndarray, width: int, height: int) -> np.ndarray:
    """Resample a 2-D array with bilinear interpolation (pixel centers)."""
    src = np.asarray(image, dtype=np.float64)
    sh, sw = src.shape
    ys = (np.arange(height) + 0.5) * (sh / height) - 0.5
    xs = (np.arange(width) + 0.5) * (sw / width) - 0.5
    ys = np.clip(ys, 0, sh - 1)
    xs = np.clip(xs, 0, sw - 1)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, sh - 1)
    x1 = np.minimum(x0 + 1, sw - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bot = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def hog_descriptor(image, cfg: HogConfig | None = None) -> np.ndarray:
    """Fixed-length HOG descriptor of a grayscale raster.

    Deterministic for a given image and configuration. Raises
    ImageTooSmall for empty input.
    """
    cfg = cfg or HogConfig()
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 2 or img.shape[1] < 2:
        raise ImageTooSmall(
            f"need a 2-D image of at least 2x2 pixels, got shape {img.shape}"
        )
    width, height = cfg.resize
    img = bilinear_resize(img, width, height)

    gy, gx = np.gradient(img)
    magnitude = np.hypot(gx, gy)
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0

    # Linear split of each pixel's magnitude between the two nearest bins;
    # bin k is centered on orientation k * (180 / bins).
    bin_width = 180.0 / cfg.bins
    pos = angle / bin_width
    low = np.floor(pos).astype(np.intp)
    frac = pos - low
    low %= cfg.bins
    high = (low + 1) % cfg.bins

    ncx, ncy = cfg.grid
    cell_y = (np.arange(height) // cfg.cell)[:, None]
    cell_x = (np.arange(width) // cfg.cell)[None, :]
    cell_idx = (cell_y * ncx + cell_x)

    hist = np.zeros(ncy * ncx * cfg.bins)
    flat_low = (cell_idx * cfg.bins + low).ravel()
    flat_high = (cell_idx * cfg.bins + high).ravel()
    np.add.at(hist, flat_low, (magnitude * (1 - frac)).ravel())
    np.add.at(hist, flat_high, (magnitude * frac).ravel())
    hist = hist.reshape(ncy, ncx, cfg.bins)

    # Overlapping blocks, stride one cell, L2 norm with epsilon guard.
    nbx, nby = ncx - cfg.block + 1, ncy - cfg.block + 1
    out = np.empty((nby, nbx, cfg.block * cfg.block * cfg.bins))
    for by in range(nby):
        for bx in range(nbx):
            block = hist[by:by + cfg.block, bx:bx + cfg.block].ravel()
            out[by, bx] = block / np.sqrt(np.sum(block * block) + cfg.epsilon**2)
    return out.ravel()
