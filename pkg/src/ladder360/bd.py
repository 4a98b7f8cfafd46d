"""Bjontegaard-style comparative metrics over rate-distortion curves.

bd_quality averages the vertical gap between two curves interpolated over
log10(rate); bd_rate and bdet swap the axes and average the horizontal gap
over the common quality interval, on log10(rate) and log10(encoding time)
respectively, reported as a percentage. Negative bdet means the test
curve encodes faster at equal quality.

The default interpolant is monotone piecewise cubic (PCHIP), which does
not overshoot on the five-point ladders used here; the classic cubic
polynomial fit is available as mode="cubic" for cross-tool comparison.
Integration is closed-form (piecewise-polynomial antiderivatives).

delta_t_serial and delta_t_parallel are the plain relative-time formulas:
change of the total versus the reference total, and change of the maximum
(the slowest representation) versus the reference maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "CurveError",
    "RDPoint",
    "RDCurve",
    "bd_quality",
    "bd_rate",
    "bdet",
    "delta_t_serial",
    "delta_t_parallel",
    "quality_overlap_span",
]

MIN_CURVE_POINTS = 4


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class RDPoint:
    rate: float  # kbps
    quality: float  # dB
    time: Optional[float] = None  # seconds

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise CurveError(f"rate must be positive and finite, got {self.rate}")
        if not math.isfinite(self.quality):
            raise CurveError(f"quality must be finite, got {self.quality}")
        if self.time is not None and not (self.time > 0.0 and math.isfinite(self.time)):
            raise CurveError(f"time must be positive and finite, got {self.time}")


@dataclass(frozen=True)
class RDCurve:
    """At least four points with strictly increasing rate and quality
    non-decreasing in rate. Non-monotone input is rejected, not sorted:
    silent reordering would hide encoder anomalies."""

    points: tuple[RDPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < MIN_CURVE_POINTS:
            raise CurveError(f"a curve needs at least {MIN_CURVE_POINTS} points, got {len(pts)}")
        for a, b in zip(pts, pts[1:]):
            if b.rate <= a.rate:
                raise CurveError(f"rates must be strictly increasing ({a.rate} then {b.rate})")
            if b.quality < a.quality:
                raise CurveError(
                    f"quality decreases with rate ({a.quality} dB then {b.quality} dB); refusing non-monotone curve"
                )

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points], dtype=np.float64)

    @property
    def qualities(self) -> np.ndarray:
        return np.array([p.quality for p in self.points], dtype=np.float64)

    @property
    def times(self) -> np.ndarray:
        if any(p.time is None for p in self.points):
            raise CurveError("curve points are missing time values")
        return np.array([p.time for p in self.points], dtype=np.float64)


def _integral_mean(x: np.ndarray, y: np.ndarray, lo: float, hi: float, mode: str) -> float:
    """Mean of the interpolant of (x, y) over [lo, hi], closed form."""
    if mode == "pchip":
        f = PchipInterpolator(x, y).antiderivative()
        return float((f(hi) - f(lo)) / (hi - lo))
    if mode == "cubic":
        ic = np.polyint(np.polyfit(x, y, 3))
        return float((np.polyval(ic, hi) - np.polyval(ic, lo)) / (hi - lo))
    raise CurveError(f"unknown interpolation mode {mode!r}")


def _overlap(a: np.ndarray, b: np.ndarray, what: str) -> tuple[float, float]:
    lo = max(a.min(), b.min())
    hi = min(a.max(), b.max())
    if not lo < hi:
        raise CurveError(f"curves have no overlapping {what} interval")
    return float(lo), float(hi)


def _strictly_increasing(v: np.ndarray, what: str) -> np.ndarray:
    if np.any(np.diff(v) <= 0.0):
        raise CurveError(f"{what} must be strictly increasing to interpolate over it")
    return v


def bd_quality(ref: RDCurve, test: RDCurve, mode: str = "pchip") -> float:
    """Average quality difference (test - ref) in dB over the common log-rate interval."""
    xr = np.log10(ref.rates)
    xt = np.log10(test.rates)
    lo, hi = _overlap(xr, xt, "rate")
    return _integral_mean(xt, test.qualities, lo, hi, mode) - _integral_mean(
        xr, ref.qualities, lo, hi, mode
    )


def _bd_log_axis(
    ref_q: np.ndarray, ref_y: np.ndarray, test_q: np.ndarray, test_y: np.ndarray, mode: str
) -> float:
    _strictly_increasing(ref_q, "reference quality")
    _strictly_increasing(test_q, "test quality")
    lo, hi = _overlap(ref_q, test_q, "quality")
    mean_dlog = _integral_mean(test_q, test_y, lo, hi, mode) - _integral_mean(
        ref_q, ref_y, lo, hi, mode
    )
    return (10.0 ** mean_dlog - 1.0) * 100.0


def bd_rate(ref: RDCurve, test: RDCurve, mode: str = "pchip") -> float:
    """Average rate change in percent at equal quality (negative = test cheaper)."""
    return _bd_log_axis(ref.qualities, np.log10(ref.rates), test.qualities, np.log10(test.rates), mode)


def bdet(ref: RDCurve, test: RDCurve, mode: str = "pchip") -> float:
    """Average encoding-time change in percent at equal quality (negative = faster)."""
    return _bd_log_axis(ref.qualities, np.log10(ref.times), test.qualities, np.log10(test.times), mode)


def quality_overlap_span(ref: RDCurve, test: RDCurve) -> float:
    """Width in dB of the common quality interval (<= 0 means disjoint)."""
    lo = max(ref.qualities.min(), test.qualities.min())
    hi = min(ref.qualities.max(), test.qualities.max())
    return float(hi - lo)


def _check_times(times: Sequence[float], name: str) -> list[float]:
    times = list(times)
    if not times:
        raise CurveError(f"{name} times are empty")
    if any(not (t > 0.0 and math.isfinite(t)) for t in times):
        raise CurveError(f"{name} times must all be positive and finite")
    return times


def delta_t_serial(ref_times: Sequence[float], method_times: Sequence[float]) -> float:
    """Relative change of the summed encoding time, in percent."""
    ref = _check_times(ref_times, "reference")
    method = _check_times(method_times, "method")
    return (math.fsum(method) - math.fsum(ref)) / math.fsum(ref) * 100.0


def delta_t_parallel(ref_times: Sequence[float], method_times: Sequence[float]) -> float:
    """Relative change of the slowest encode, in percent."""
    ref = _check_times(ref_times, "reference")
    method = _check_times(method_times, "method")
    return (max(method) - max(ref)) / max(ref) * 100.0
