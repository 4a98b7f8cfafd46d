"""Plane resampling primitives: separable resize and warp sampling.

Two kernels are provided. Bilinear (triangle, radius 1) is monotone and
never overshoots; Lanczos3 (radius 3) is sharper and used for ladder
downscaling. For separable resize the kernel support is stretched by the
downscale factor so minification is antialiased; warp sampling (sphere
resampling) uses the unscaled kernel. All kernels are normalized to unit
DC gain, so constant inputs are reproduced exactly after rounding.

Continuous coordinates use the pixel-center convention: sample i covers
[i-0.5, i+0.5) and its center is at coordinate i.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

__all__ = ["ResampleFilter", "resize_plane", "warp_sample_plane", "round_half_up_u8"]


class ResampleFilter(Enum):
    BILINEAR = "bilinear"
    LANCZOS3 = "lanczos3"

    @property
    def radius(self) -> int:
        return 1 if self is ResampleFilter.BILINEAR else 3


def kernel_values(filt: ResampleFilter, x: np.ndarray) -> np.ndarray:
    """Evaluate the filter kernel at offsets x (vectorized)."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    if filt is ResampleFilter.BILINEAR:
        return np.maximum(0.0, 1.0 - ax)
    # Lanczos3: sinc(x) * sinc(x/3) on |x| < 3. np.sinc is sin(pi x)/(pi x).
    out = np.where(ax < 3.0, np.sinc(ax) * np.sinc(ax / 3.0), 0.0)
    return out


def round_half_up_u8(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer, halves up, clipped to [0, 255] uint8."""
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


def _axis_plan(n_in: int, n_out: int, filt: ResampleFilter) -> tuple[np.ndarray, np.ndarray]:
    """Tap indices and normalized weights mapping an axis of n_in to n_out.

    Returns (idx, w) of shape (n_out, taps); indices are clamped to the
    valid range (edge-clamp boundary handling).
    """
    scale = n_in / n_out
    support_scale = max(1.0, scale)
    radius = filt.radius * support_scale
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * scale - 0.5
    taps = int(np.ceil(2.0 * radius)) + 1
    left = np.floor(src - radius).astype(np.int64) + 1
    offsets = np.arange(taps, dtype=np.int64)
    tap_idx = left[:, None] + offsets[None, :]
    w = kernel_values(filt, (tap_idx - src[:, None]) / support_scale)
    w /= w.sum(axis=1, keepdims=True)
    idx = np.clip(tap_idx, 0, n_in - 1)
    return idx, w


def _apply_axis(arr: np.ndarray, idx: np.ndarray, w: np.ndarray) -> np.ndarray:
    # arr: (..., n_in) -> (..., n_out), accumulating one tap at a time to
    # keep memory bounded for 8K planes.
    n_out, taps = idx.shape
    out = np.zeros(arr.shape[:-1] + (n_out,), dtype=np.float64)
    for t in range(taps):
        out += arr[..., idx[:, t]] * w[:, t]
    return out


def resize_plane(plane: np.ndarray, out_w: int, out_h: int, filt: ResampleFilter) -> np.ndarray:
    """Separable resize of a uint8 plane to (out_h, out_w), returned as uint8."""
    h, w = plane.shape
    data = plane.astype(np.float64)
    if w != out_w:
        idx, wt = _axis_plan(w, out_w, filt)
        data = _apply_axis(data, idx, wt)
    if h != out_h:
        idx, wt = _axis_plan(h, out_h, filt)
        data = _apply_axis(np.swapaxes(data, 0, 1), idx, wt)
        data = np.swapaxes(data, 0, 1)
    return round_half_up_u8(data)


def warp_sample_plane(
    plane: np.ndarray,
    px: np.ndarray,
    py: np.ndarray,
    filt: ResampleFilter,
    wrap_x: bool,
) -> np.ndarray:
    """Sample a plane at continuous positions (px, py), returning float64.

    Rows (py) always clamp at the boundary. Columns wrap modulo the width
    when wrap_x is set (equirectangular longitude) and clamp otherwise.
    """
    h, w = plane.shape
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    r = filt.radius
    taps = 2 * r
    left_x = np.floor(px - r).astype(np.int64) + 1
    left_y = np.floor(py - r).astype(np.int64) + 1

    data = plane.astype(np.float64)
    acc = np.zeros(px.shape, dtype=np.float64)
    wx_sum = np.zeros(px.shape, dtype=np.float64)
    wy_sum = np.zeros(px.shape, dtype=np.float64)

    wx_list = []
    ix_list = []
    for dx in range(taps):
        tx = left_x + dx
        wx = kernel_values(filt, tx - px)
        wx_sum += wx
        ix = np.mod(tx, w) if wrap_x else np.clip(tx, 0, w - 1)
        wx_list.append(wx)
        ix_list.append(ix)

    for dy in range(taps):
        ty = left_y + dy
        wy = kernel_values(filt, ty - py)
        wy_sum += wy
        iy = np.clip(ty, 0, h - 1)
        row_acc = np.zeros(px.shape, dtype=np.float64)
        for wx, ix in zip(wx_list, ix_list):
            row_acc += wx * data[iy, ix]
        acc += wy * row_acc

    return acc / (wx_sum * wy_sum)
