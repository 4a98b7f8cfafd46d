"""Raw planar 4:2:0 video I/O: YUV4MPEG2 (Y4M) and headerless I420 files.

Only 8-bit 4:2:0 content is supported; anything else is rejected with
MediaFormatError. Frame data is held as read-only numpy arrays so frames
can be shared freely between worker threads.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np

__all__ = [
    "MediaFormatError",
    "Projection",
    "FrameBuffer",
    "VideoSequence",
    "read_y4m",
    "iter_y4m",
    "probe_y4m",
    "read_raw_yuv",
    "write_y4m",
]

Y4M_MAGIC = b"YUV4MPEG2"

# Chroma tags we accept as 8-bit 4:2:0. A missing C tag defaults to 4:2:0
# per the Y4M convention.
_C420_TAGS = {"420", "420jpeg", "420mpeg2", "420paldv"}


class MediaFormatError(ValueError):
    """Raised for malformed, unsupported, or truncated video files."""


class Projection(Enum):
    ERP = "erp"
    CMP_FACE = "cmp_face"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint8)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FrameBuffer:
    """One planar 4:2:0 picture: Y at WxH, Cb and Cr at (W/2)x(H/2).

    Planes are stored row-major as read-only uint8 arrays of shape (H, W)
    and (H/2, W/2). Instances are immutable and safe to share.
    """

    width: int
    height: int
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth != 8:
            raise MediaFormatError(f"only 8-bit content is supported, got {self.bit_depth}")
        if self.width <= 0 or self.height <= 0:
            raise MediaFormatError(f"non-positive geometry {self.width}x{self.height}")
        if self.width % 2 or self.height % 2:
            raise MediaFormatError(f"geometry must be even for 4:2:0, got {self.width}x{self.height}")
        object.__setattr__(self, "y", _readonly(self.y))
        object.__setattr__(self, "cb", _readonly(self.cb))
        object.__setattr__(self, "cr", _readonly(self.cr))
        if self.y.shape != (self.height, self.width):
            raise MediaFormatError(f"Y plane shape {self.y.shape} does not match {self.width}x{self.height}")
        half = (self.height // 2, self.width // 2)
        if self.cb.shape != half or self.cr.shape != half:
            raise MediaFormatError(f"chroma plane shapes {self.cb.shape}/{self.cr.shape}, expected {half}")

    @property
    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.y, self.cb, self.cr)

    def tobytes(self) -> bytes:
        return self.y.tobytes() + self.cb.tobytes() + self.cr.tobytes()

    @classmethod
    def from_planar_bytes(cls, data: bytes, width: int, height: int) -> "FrameBuffer":
        expected = frame_size_bytes(width, height)
        if len(data) != expected:
            raise MediaFormatError(f"frame payload is {len(data)} bytes, expected {expected}")
        ysize = width * height
        csize = ysize // 4
        y = np.frombuffer(data, dtype=np.uint8, count=ysize).reshape(height, width)
        cb = np.frombuffer(data, dtype=np.uint8, count=csize, offset=ysize).reshape(height // 2, width // 2)
        cr = np.frombuffer(data, dtype=np.uint8, count=csize, offset=ysize + csize).reshape(height // 2, width // 2)
        return cls(width=width, height=height, y=y, cb=cb, cr=cr)


def frame_size_bytes(width: int, height: int) -> int:
    """Byte count of one 8-bit 4:2:0 frame (W*H*3/2)."""
    return width * height * 3 // 2


@dataclass(frozen=True)
class VideoSequence:
    """An ordered list of identically sized frames plus stream metadata.

    Geometry is carried explicitly so empty sequences (e.g. a Y4M file
    with zero FRAME markers) still have a valid shape. face_id must be
    set exactly when projection is CMP_FACE.
    """

    width: int
    height: int
    fps: Fraction
    frames: tuple[FrameBuffer, ...] = field(default_factory=tuple)
    projection: Projection = Projection.ERP
    face_id: Optional["object"] = None  # FaceId; kept loose to avoid an import cycle

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "fps", Fraction(self.fps))
        if self.width <= 0 or self.height <= 0 or self.width % 2 or self.height % 2:
            raise MediaFormatError(f"invalid sequence geometry {self.width}x{self.height}")
        if self.fps.numerator <= 0 or self.fps.denominator <= 0:
            raise MediaFormatError(f"invalid frame rate {self.fps}")
        for f in self.frames:
            if (f.width, f.height) != (self.width, self.height):
                raise MediaFormatError(
                    f"frame geometry {f.width}x{f.height} differs from sequence {self.width}x{self.height}"
                )
        if (self.projection is Projection.CMP_FACE) != (self.face_id is not None):
            raise MediaFormatError("face_id must be present exactly for CMP_FACE sequences")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def with_frames(self, frames: Sequence[FrameBuffer]) -> "VideoSequence":
        return VideoSequence(
            width=self.width,
            height=self.height,
            fps=self.fps,
            frames=tuple(frames),
            projection=self.projection,
            face_id=self.face_id,
        )


def _parse_y4m_header(line: bytes, path) -> tuple[int, int, Fraction]:
    parts = line.decode("ascii", errors="replace").strip().split(" ")
    if not parts or parts[0].encode() != Y4M_MAGIC:
        raise MediaFormatError(f"{path}: missing YUV4MPEG2 magic")
    width = height = None
    fps = None
    colorspace = "420"
    for tag in parts[1:]:
        if not tag:
            continue
        key, val = tag[0], tag[1:]
        if key == "W":
            width = int(val)
        elif key == "H":
            height = int(val)
        elif key == "F":
            num, _, den = val.partition(":")
            fps = Fraction(int(num), int(den or 1))
        elif key == "C":
            colorspace = val
    if width is None or height is None or fps is None:
        raise MediaFormatError(f"{path}: header lacks W/H/F tags")
    if colorspace not in _C420_TAGS:
        raise MediaFormatError(f"{path}: unsupported colorspace C{colorspace} (need 4:2:0 8-bit)")
    return width, height, fps


def iter_y4m(path: Union[str, Path]) -> tuple[int, int, Fraction, Iterator[FrameBuffer]]:
    """Open a Y4M file and return (width, height, fps, frame iterator).

    The iterator streams frames without holding the whole file in memory;
    read_y4m is the eager wrapper around it.
    """
    path = Path(path)
    fh = open(path, "rb")
    try:
        header = fh.readline()
        width, height, fps = _parse_y4m_header(header, path)
    except Exception:
        fh.close()
        raise

    fsize = frame_size_bytes(width, height)

    def frames() -> Iterator[FrameBuffer]:
        with fh:
            while True:
                marker = fh.readline()
                if marker == b"":
                    return
                if not marker.startswith(b"FRAME"):
                    raise MediaFormatError(f"{path}: expected FRAME marker, got {marker[:16]!r}")
                payload = fh.read(fsize)
                if len(payload) != fsize:
                    raise MediaFormatError(
                        f"{path}: truncated frame payload ({len(payload)} of {fsize} bytes)"
                    )
                yield FrameBuffer.from_planar_bytes(payload, width, height)

    return width, height, fps, frames()


def read_y4m(path: Union[str, Path], projection: Projection = Projection.ERP, face_id=None) -> VideoSequence:
    """Read an entire Y4M file into a VideoSequence."""
    width, height, fps, frames = iter_y4m(path)
    return VideoSequence(
        width=width,
        height=height,
        fps=fps,
        frames=tuple(frames),
        projection=projection,
        face_id=face_id,
    )


def probe_y4m(path: Union[str, Path]) -> tuple[int, int, Fraction, int]:
    """Return (width, height, fps, frame_count) without loading payloads."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline()
        width, height, fps = _parse_y4m_header(header, path)
        fsize = frame_size_bytes(width, height)
        count = 0
        while True:
            marker = fh.readline()
            if marker == b"":
                break
            if not marker.startswith(b"FRAME"):
                raise MediaFormatError(f"{path}: expected FRAME marker, got {marker[:16]!r}")
            start = fh.tell()
            fh.seek(fsize, io.SEEK_CUR)
            if fh.tell() - start != fsize:
                raise MediaFormatError(f"{path}: truncated frame payload")
            count += 1
    return width, height, fps, count


def read_raw_yuv(
    path: Union[str, Path],
    width: int,
    height: int,
    fps: Fraction,
    projection: Projection = Projection.ERP,
    face_id=None,
) -> VideoSequence:
    """Read a headerless planar I420 file with explicitly supplied geometry.

    The file size must be an exact multiple of one frame (W*H*3/2 bytes);
    a zero-byte file yields an empty sequence.
    """
    path = Path(path)
    fsize = frame_size_bytes(width, height)
    total = os.path.getsize(path)
    if total % fsize:
        raise MediaFormatError(
            f"{path}: size {total} is not a multiple of the {width}x{height} frame size {fsize}"
        )
    frames = []
    with open(path, "rb") as fh:
        for _ in range(total // fsize):
            frames.append(FrameBuffer.from_planar_bytes(fh.read(fsize), width, height))
    return VideoSequence(
        width=width,
        height=height,
        fps=Fraction(fps),
        frames=tuple(frames),
        projection=projection,
        face_id=face_id,
    )


def write_y4m(seq: VideoSequence, path: Union[str, Path]) -> int:
    """Write a sequence as Y4M (C420jpeg tag) and return the byte count."""
    path = Path(path)
    header = f"YUV4MPEG2 W{seq.width} H{seq.height} F{seq.fps.numerator}:{seq.fps.denominator} Ip A1:1 C420jpeg\n"
    written = 0
    with open(path, "wb") as fh:
        written += fh.write(header.encode("ascii"))
        for frame in seq.frames:
            written += fh.write(b"FRAME\n")
            written += fh.write(frame.tobytes())
    return written
