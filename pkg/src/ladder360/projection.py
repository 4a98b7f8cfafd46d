"""Spherical geometry: ERP and cubemap mappings, conversion, and resizing.

Axis convention: x points right, y up, z forward. ERP longitude increases
with the image x coordinate and is 0 at the image center (forward);
latitude is +pi/2 at the top row. Face-local (u, v) live in [-1, 1] with
v increasing downward (row-major); the per-face orientation is:

    Front(+z): u = +x/z,  v = -y/z       Back(-z):   u = -x/|z|, v = -y/|z|
    Right(+x): u = -z/x,  v = -y/x       Left(-x):   u = +z/|x|, v = -y/|x|
    Top(+y):   u = +x/y,  v = +z/y       Bottom(-y): u = +x/|y|, v = -z/|y|

Pixel center i of an N-wide face maps to u = 2*(i+0.5)/N - 1. Directions
on a face-selection tie are resolved by the fixed priority
Front > Back > Left > Right > Top > Bottom, making the face map total and
deterministic. At the poles (|y| = 1) the ERP u coordinate is pinned to
W/2 - 0.5.

Face boundary sampling clamps to the face edge rather than fetching the
neighbor face: each face is an independent tile, so seams are inherent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, Union

import numpy as np

from .media_io import FrameBuffer, Projection, VideoSequence
from .resample import ResampleFilter, round_half_up_u8, warp_sample_plane, resize_plane

__all__ = [
    "ProjectionError",
    "Direction",
    "FaceId",
    "FaceCoord",
    "ResampleFilter",
    "erp_to_direction",
    "direction_to_erp",
    "direction_to_face",
    "face_to_direction",
    "erp_to_cmp",
    "cmp_to_erp",
    "resize",
]

_TWO_PI = 2.0 * math.pi


class ProjectionError(ValueError):
    """Raised for invalid geometry or projection-tag mismatches."""


class FaceId(Enum):
    FRONT = "front"
    BACK = "back"
    LEFT = "left"
    RIGHT = "right"
    TOP = "top"
    BOTTOM = "bottom"

    @property
    def index(self) -> int:
        return _FACE_ORDER.index(self)


_FACE_ORDER = (FaceId.FRONT, FaceId.BACK, FaceId.LEFT, FaceId.RIGHT, FaceId.TOP, FaceId.BOTTOM)


@dataclass(frozen=True)
class Direction:
    """A unit viewing vector. Construction rejects non-unit input."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if n2 == 0.0:
            raise ProjectionError("zero vector is not a direction")
        if abs(n2 - 1.0) > 1e-12:
            raise ProjectionError(f"direction is not unit-norm (|d|^2 = {n2!r})")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "Direction":
        n = math.sqrt(x * x + y * y + z * z)
        if n == 0.0:
            raise ProjectionError("zero vector is not a direction")
        return cls(x / n, y / n, z / n)


@dataclass(frozen=True)
class FaceCoord:
    """Face-local coordinates (u, v) in [-1, 1] on a cubemap face."""

    face: FaceId
    u: float
    v: float

    def __post_init__(self):
        if abs(self.u) > 1.0 or abs(self.v) > 1.0:
            raise ProjectionError(f"face coordinates out of range: ({self.u}, {self.v})")


def erp_to_direction(u: float, v: float, width: int, height: int) -> Direction:
    """Direction seen by the ERP pixel position (u, v).

    u and v are continuous pixel coordinates; values outside the frame
    wrap in longitude and clamp in latitude.
    """
    if width <= 0 or height <= 0:
        raise ProjectionError(f"non-positive geometry {width}x{height}")
    frac = (u + 0.5) / width
    frac -= math.floor(frac)
    lon = frac * _TWO_PI - math.pi
    t = min(max((v + 0.5) / height, 0.0), 1.0)
    lat = math.pi / 2.0 - t * math.pi
    cl = math.cos(lat)
    return Direction(cl * math.sin(lon), math.sin(lat), cl * math.cos(lon))


def direction_to_erp(d: Direction, width: int, height: int) -> tuple[float, float]:
    """Continuous ERP pixel position of a direction; inverse of erp_to_direction."""
    if width <= 0 or height <= 0:
        raise ProjectionError(f"non-positive geometry {width}x{height}")
    if d.x == 0.0 and d.z == 0.0:
        lon = 0.0  # pole: pin u to the image center column
    else:
        lon = math.atan2(d.x, d.z)
    lat = math.asin(min(1.0, max(-1.0, d.y)))
    u = (lon + math.pi) / _TWO_PI * width - 0.5
    if u >= width - 0.5:
        u -= width
    v = (math.pi / 2.0 - lat) / math.pi * height - 0.5
    return u, v


def direction_to_face(d: Direction) -> FaceCoord:
    """Classify a direction to its cubemap face and face-local (u, v)."""
    x, y, z = d.x, d.y, d.z
    ax, ay, az = abs(x), abs(y), abs(z)
    m = max(ax, ay, az)
    if az == m and z > 0.0:
        face, u, v = FaceId.FRONT, x / z, -y / z
    elif az == m and z < 0.0:
        face, u, v = FaceId.BACK, -x / az, -y / az
    elif ax == m and x < 0.0:
        face, u, v = FaceId.LEFT, z / ax, -y / ax
    elif ax == m and x > 0.0:
        face, u, v = FaceId.RIGHT, -z / x, -y / x
    elif ay == m and y > 0.0:
        face, u, v = FaceId.TOP, x / y, z / y
    else:
        face, u, v = FaceId.BOTTOM, x / ay, -z / ay
    return FaceCoord(face, u, v)


def face_to_direction(fc: FaceCoord) -> Direction:
    """Unit direction through a face-local coordinate; inverse of direction_to_face."""
    u, v = fc.u, fc.v
    if fc.face is FaceId.FRONT:
        x, y, z = u, -v, 1.0
    elif fc.face is FaceId.BACK:
        x, y, z = -u, -v, -1.0
    elif fc.face is FaceId.RIGHT:
        x, y, z = 1.0, -v, -u
    elif fc.face is FaceId.LEFT:
        x, y, z = -1.0, -v, u
    elif fc.face is FaceId.TOP:
        x, y, z = u, 1.0, v
    else:
        x, y, z = u, -1.0, -v
    return Direction.normalized(x, y, z)


# Vectorized counterparts used by the image conversions. Kept in lockstep
# with the scalar definitions above (the scalar ops are the contract; the
# array forms exist for throughput).


def _face_grid_directions(face: FaceId, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c = 2.0 * (np.arange(n, dtype=np.float64) + 0.5) / n - 1.0
    u, v = np.meshgrid(c, c)  # u varies along columns, v along rows
    one = np.ones_like(u)
    if face is FaceId.FRONT:
        x, y, z = u, -v, one
    elif face is FaceId.BACK:
        x, y, z = -u, -v, -one
    elif face is FaceId.RIGHT:
        x, y, z = one, -v, -u
    elif face is FaceId.LEFT:
        x, y, z = -one, -v, u
    elif face is FaceId.TOP:
        x, y, z = u, one, v
    else:
        x, y, z = u, -one, -v
    n_inv = 1.0 / np.sqrt(x * x + y * y + z * z)
    return x * n_inv, y * n_inv, z * n_inv


def _directions_to_erp_px(x, y, z, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    lon = np.arctan2(x, z)
    lon = np.where((x == 0.0) & (z == 0.0), 0.0, lon)
    lat = np.arcsin(np.clip(y, -1.0, 1.0))
    u = (lon + math.pi) / _TWO_PI * width - 0.5
    u = np.where(u >= width - 0.5, u - width, u)
    v = (math.pi / 2.0 - lat) / math.pi * height - 0.5
    return u, v


def _erp_grid_directions(width: int, height: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lon = ((np.arange(width, dtype=np.float64) + 0.5) / width) * _TWO_PI - math.pi
    lat = math.pi / 2.0 - ((np.arange(height, dtype=np.float64) + 0.5) / height) * math.pi
    lon, lat = np.meshgrid(lon, lat)
    cl = np.cos(lat)
    return cl * np.sin(lon), np.sin(lat), cl * np.cos(lon)


def _classify_faces(x, y, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Array version of direction_to_face: (face index, u, v)."""
    ax, ay, az = np.abs(x), np.abs(y), np.abs(z)
    m = np.maximum(np.maximum(ax, ay), az)
    conds = [
        (az == m) & (z > 0.0),
        (az == m) & (z < 0.0),
        (ax == m) & (x < 0.0),
        (ax == m) & (x > 0.0),
        (ay == m) & (y > 0.0),
        (ay == m) & (y < 0.0),
    ]
    idx = np.select(conds, np.arange(6), default=-1)
    u = np.empty(x.shape, dtype=np.float64)
    v = np.empty(x.shape, dtype=np.float64)
    uv_exprs = (
        lambda xs, ys, zs: (xs / zs, -ys / zs),
        lambda xs, ys, zs: (-xs / np.abs(zs), -ys / np.abs(zs)),
        lambda xs, ys, zs: (zs / np.abs(xs), -ys / np.abs(xs)),
        lambda xs, ys, zs: (-zs / xs, -ys / xs),
        lambda xs, ys, zs: (xs / ys, zs / ys),
        lambda xs, ys, zs: (xs / np.abs(ys), -zs / np.abs(ys)),
    )
    for k, expr in enumerate(uv_exprs):
        mask = idx == k
        if not mask.any():
            continue
        u[mask], v[mask] = expr(x[mask], y[mask], z[mask])
    return idx, u, v


def _check_face_set(faces) -> list[VideoSequence]:
    if isinstance(faces, Mapping):
        try:
            ordered = [faces[f] for f in _FACE_ORDER]
        except KeyError as e:
            raise ProjectionError(f"missing cubemap face {e.args[0]}") from None
    else:
        ordered = list(faces)
    if len(ordered) != 6:
        raise ProjectionError(f"expected 6 faces, got {len(ordered)}")
    first = ordered[0]
    for seq in ordered:
        if (seq.width, seq.height, seq.frame_count) != (first.width, first.height, first.frame_count):
            raise ProjectionError("cubemap faces disagree in geometry or frame count")
        if seq.width != seq.height:
            raise ProjectionError(f"cubemap faces must be square, got {seq.width}x{seq.height}")
    return ordered


def erp_to_cmp(
    seq: VideoSequence,
    face_size: int,
    filt: ResampleFilter = ResampleFilter.BILINEAR,
) -> dict[FaceId, VideoSequence]:
    """Project an ERP sequence onto six cubemap face sequences.

    Each face pixel center is mapped through the sphere back into the ERP
    source and sampled there (longitude wraps, latitude clamps). Chroma is
    sampled on its own half-resolution grid.
    """
    if seq.projection is not Projection.ERP:
        raise ProjectionError("erp_to_cmp requires an ERP input sequence")
    if face_size <= 0 or face_size % 2:
        raise ProjectionError(f"face size must be positive and even, got {face_size}")

    out: dict[FaceId, VideoSequence] = {}
    for face in _FACE_ORDER:
        maps = []
        for n, (w, h) in ((face_size, (seq.width, seq.height)),
                          (face_size // 2, (seq.width // 2, seq.height // 2))):
            x, y, z = _face_grid_directions(face, n)
            maps.append(_directions_to_erp_px(x, y, z, w, h))
        (ly_px, ly_py), (c_px, c_py) = maps

        frames = []
        for frame in seq.frames:
            yp = round_half_up_u8(warp_sample_plane(frame.y, ly_px, ly_py, filt, wrap_x=True))
            cb = round_half_up_u8(warp_sample_plane(frame.cb, c_px, c_py, filt, wrap_x=True))
            cr = round_half_up_u8(warp_sample_plane(frame.cr, c_px, c_py, filt, wrap_x=True))
            frames.append(FrameBuffer(face_size, face_size, yp, cb, cr))
        out[face] = VideoSequence(
            width=face_size,
            height=face_size,
            fps=seq.fps,
            frames=tuple(frames),
            projection=Projection.CMP_FACE,
            face_id=face,
        )
    return out


def cmp_to_erp(
    faces: Union[Mapping[FaceId, VideoSequence], Sequence[VideoSequence]],
    width: int,
    height: int,
    filt: ResampleFilter = ResampleFilter.BILINEAR,
) -> VideoSequence:
    """Reassemble an ERP sequence from six cubemap faces.

    Every ERP pixel is classified to one face and sampled there, clamped
    to the face boundary (faces are independent tiles; no neighbor fetch).
    """
    ordered = _check_face_set(faces)
    if width <= 0 or height <= 0 or width % 2 or height % 2:
        raise ProjectionError(f"invalid target geometry {width}x{height}")
    n = ordered[0].width

    def plane_maps(w: int, h: int, fsize: int):
        x, y, z = _erp_grid_directions(w, h)
        fidx, fu, fv = _classify_faces(x, y, z)
        px = (fu + 1.0) / 2.0 * fsize - 0.5
        py = (fv + 1.0) / 2.0 * fsize - 0.5
        return fidx, px, py

    luma_map = plane_maps(width, height, n)
    chroma_map = plane_maps(width // 2, height // 2, n // 2)

    def assemble(planes: list[np.ndarray], mapping) -> np.ndarray:
        fidx, px, py = mapping
        out = np.zeros(px.shape, dtype=np.float64)
        for k in range(6):
            mask = fidx == k
            if not mask.any():
                continue
            out[mask] = warp_sample_plane(planes[k], px[mask], py[mask], filt, wrap_x=False)
        return round_half_up_u8(out)

    frames = []
    for t in range(ordered[0].frame_count):
        yp = assemble([f.frames[t].y for f in ordered], luma_map)
        cb = assemble([f.frames[t].cb for f in ordered], chroma_map)
        cr = assemble([f.frames[t].cr for f in ordered], chroma_map)
        frames.append(FrameBuffer(width, height, yp, cb, cr))
    return VideoSequence(
        width=width,
        height=height,
        fps=ordered[0].fps,
        frames=tuple(frames),
        projection=Projection.ERP,
    )


def resize(
    seq: VideoSequence,
    target_w: int,
    target_h: int,
    filt: ResampleFilter = ResampleFilter.LANCZOS3,
) -> VideoSequence:
    """Resize in pixel space (not through the sphere), preserving the projection tag."""
    if target_w <= 0 or target_h <= 0 or target_w % 2 or target_h % 2:
        raise ProjectionError(f"target geometry must be positive and even, got {target_w}x{target_h}")
    if (target_w, target_h) == (seq.width, seq.height):
        return seq
    frames = []
    for frame in seq.frames:
        yp = resize_plane(frame.y, target_w, target_h, filt)
        cb = resize_plane(frame.cb, target_w // 2, target_h // 2, filt)
        cr = resize_plane(frame.cr, target_w // 2, target_h // 2, filt)
        frames.append(FrameBuffer(target_w, target_h, yp, cb, cr))
    return VideoSequence(
        width=target_w,
        height=target_h,
        fps=seq.fps,
        frames=tuple(frames),
        projection=seq.projection,
        face_id=seq.face_id,
    )
