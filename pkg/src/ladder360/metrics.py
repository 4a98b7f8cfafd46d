"""PSNR and spherically weighted WS-PSNR for 8-bit sequences.

Scores are Y-plane by default. WS-PSNR weights correct for projection
oversampling: equirectangular rows are weighted by cos(latitude), cubemap
faces by the solid angle of each pixel, (1 + u^2 + v^2)^(-3/2). Identical
content is capped at 999.99 dB so CSV output stays numeric.

Sequence scores average the per-frame dB values by default; pooled-MSE
aggregation is available via pooling="pooled".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .media_io import VideoSequence

__all__ = [
    "MetricsError",
    "IDENTICAL_DB_CAP",
    "QualityScore",
    "WeightMap",
    "erp_weight_map",
    "cmp_weight_map",
    "psnr",
    "wspsnr",
    "wspsnr_faces",
    "chroma_psnr",
]

IDENTICAL_DB_CAP = 999.99
_PEAK_SQ = 255.0 * 255.0


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class QualityScore:
    """Sequence-level scores plus the per-frame (psnr, wspsnr) pairs."""

    psnr_y: float
    wspsnr_y: float
    per_frame: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class WeightMap:
    """Per-pixel positive weights for one plane geometry."""

    width: int
    height: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.height, self.width):
            raise MetricsError(f"weight shape {w.shape} does not match {self.width}x{self.height}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise MetricsError("weights must be finite and strictly positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def erp_weight_map(width: int, height: int) -> WeightMap:
    """Latitude weights cos((j + 0.5 - H/2) * pi / H), equal across columns."""
    if width <= 0 or height <= 0:
        raise MetricsError(f"non-positive geometry {width}x{height}")
    col = np.empty(height, dtype=np.float64)
    half = (height + 1) // 2
    j = np.arange(half, dtype=np.float64)
    top = np.cos((j + 0.5 - height / 2.0) * (math.pi / height))
    col[:half] = top
    col[height - half:] = top[::-1]  # mirror for exact top/bottom symmetry
    return WeightMap(width, height, np.tile(col[:, None], (1, width)))


def cmp_weight_map(n: int) -> WeightMap:
    """Solid-angle weights (1 + u^2 + v^2)^(-3/2) for an NxN cubemap face."""
    if n <= 0:
        raise MetricsError(f"non-positive face size {n}")
    half = (n + 1) // 2
    c = 2.0 * (np.arange(half, dtype=np.float64) + 0.5) / n - 1.0
    u, v = np.meshgrid(c, c)
    q = (1.0 + u * u + v * v) ** -1.5
    w = np.empty((n, n), dtype=np.float64)
    w[:half, :half] = q
    w[:half, n - half:] = q[:, ::-1]  # mirror quadrant for exact 4-fold symmetry
    w[n - half:, :] = w[:half, :][::-1, :]
    return WeightMap(n, n, w)


def _check_compatible(ref: VideoSequence, dist: VideoSequence):
    if (ref.width, ref.height) != (dist.width, dist.height):
        raise MetricsError(
            f"geometry mismatch: {ref.width}x{ref.height} vs {dist.width}x{dist.height}"
        )
    if ref.frame_count != dist.frame_count:
        raise MetricsError(f"frame count mismatch: {ref.frame_count} vs {dist.frame_count}")
    if ref.projection is not dist.projection:
        raise MetricsError("projection mismatch between reference and distorted sequences")


def _db(mse: float) -> float:
    if mse == 0.0:
        return IDENTICAL_DB_CAP
    return 10.0 * math.log10(_PEAK_SQ / mse)


def _sequence_db(per_frame_db: Sequence[float], per_frame_mse: Sequence[float], pooling: str) -> float:
    if not per_frame_db:
        raise MetricsError("cannot score an empty sequence")
    if pooling == "per_frame":
        return float(np.mean(per_frame_db))
    if pooling == "pooled":
        return _db(float(np.mean(per_frame_mse)))
    raise MetricsError(f"unknown pooling mode {pooling!r}")


def psnr(ref: VideoSequence, dist: VideoSequence, pooling: str = "per_frame") -> QualityScore:
    """Y-plane PSNR. The wspsnr column is filled with the same values
    (uniform weights), so downstream consumers see a complete QualityScore."""
    _check_compatible(ref, dist)
    frame_db, frame_mse = [], []
    for a, b in zip(ref.frames, dist.frames):
        e = a.y.astype(np.float64) - b.y.astype(np.float64)
        mse = float(np.mean(e * e))
        frame_mse.append(mse)
        frame_db.append(_db(mse))
    seq_db = _sequence_db(frame_db, frame_mse, pooling)
    return QualityScore(seq_db, seq_db, tuple((p, p) for p in frame_db))


def wspsnr(
    ref: VideoSequence,
    dist: VideoSequence,
    weights: WeightMap,
    pooling: str = "per_frame",
) -> QualityScore:
    """Weighted WS-PSNR plus plain PSNR in one pass over the Y planes."""
    _check_compatible(ref, dist)
    if (weights.width, weights.height) != (ref.width, ref.height):
        raise MetricsError(
            f"weight geometry {weights.width}x{weights.height} does not match {ref.width}x{ref.height}"
        )
    w = weights.weights
    wsum = float(np.sum(w))
    pf, frame_mse, frame_wmse = [], [], []
    for a, b in zip(ref.frames, dist.frames):
        e2 = (a.y.astype(np.float64) - b.y.astype(np.float64)) ** 2
        mse = float(np.mean(e2))
        wmse = float(np.sum(w * e2) / wsum)
        frame_mse.append(mse)
        frame_wmse.append(wmse)
        pf.append((_db(mse), _db(wmse)))
    seq_psnr = _sequence_db([p for p, _ in pf], frame_mse, pooling)
    seq_ws = _sequence_db([q for _, q in pf], frame_wmse, pooling)
    return QualityScore(seq_psnr, seq_ws, tuple(pf))


def wspsnr_faces(
    ref_faces: Sequence[VideoSequence],
    dist_faces: Sequence[VideoSequence],
    weights: WeightMap,
    pooling: str = "per_frame",
) -> QualityScore:
    """Six-face cubemap score: WMSE is pooled over all faces before the log."""
    if len(ref_faces) != 6 or len(dist_faces) != 6:
        raise MetricsError("cubemap scoring requires six reference and six distorted faces")
    counts = {s.frame_count for s in list(ref_faces) + list(dist_faces)}
    if len(counts) != 1:
        raise MetricsError("face sequences disagree in frame count")
    for r, d in zip(ref_faces, dist_faces):
        _check_compatible(r, d)
        if (weights.width, weights.height) != (r.width, r.height):
            raise MetricsError("weight geometry does not match face geometry")
    w = weights.weights
    wsum_all = 6.0 * float(np.sum(w))
    n_px = 6.0 * w.size
    pf, frame_mse, frame_wmse = [], [], []
    for t in range(next(iter(counts))):
        se_sum = 0.0
        wse_sum = 0.0
        for r, d in zip(ref_faces, dist_faces):
            e2 = (r.frames[t].y.astype(np.float64) - d.frames[t].y.astype(np.float64)) ** 2
            se_sum += float(np.sum(e2))
            wse_sum += float(np.sum(w * e2))
        mse = se_sum / n_px
        wmse = wse_sum / wsum_all
        frame_mse.append(mse)
        frame_wmse.append(wmse)
        pf.append((_db(mse), _db(wmse)))
    seq_psnr = _sequence_db([p for p, _ in pf], frame_mse, pooling)
    seq_ws = _sequence_db([q for _, q in pf], frame_wmse, pooling)
    return QualityScore(seq_psnr, seq_ws, tuple(pf))


def chroma_psnr(ref: VideoSequence, dist: VideoSequence, pooling: str = "per_frame") -> tuple[float, float]:
    """(Cb, Cr) PSNR; outside the default Y-only scoring path."""
    _check_compatible(ref, dist)
    out = []
    for plane in ("cb", "cr"):
        frame_db, frame_mse = [], []
        for a, b in zip(ref.frames, dist.frames):
            e = getattr(a, plane).astype(np.float64) - getattr(b, plane).astype(np.float64)
            mse = float(np.mean(e * e))
            frame_mse.append(mse)
            frame_db.append(_db(mse))
        out.append(_sequence_db(frame_db, frame_mse, pooling))
    return out[0], out[1]
