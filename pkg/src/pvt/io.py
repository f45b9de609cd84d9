"""On-disk formats: the PVT tensor container, Middlebury .flo flow, 16-bit PNG.

The PVT container is deliberately dumb: a fixed 40-byte header (magic
"PVT1", five little-endian u32 fields, a 16-byte ASCII content tag) followed
by the raw float32 payload in C order, direction-major then channel-major.
Readers validate the header against the actual file size BEFORE allocating
anything, so corrupt or hostile headers fail with FormatError instead of an
allocation attempt.

PNG16 stores one plane as 16-bit grayscale plus a JSON sidecar recording the
linear scale factor; values reload as stored/65535 * scale. Gamma exists
only in the 8-bit preview writer, never in data paths.
"""

from __future__ import annotations

import json
import os
import struct
import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DimensionError, FormatError
from .flow import FlowField
from .mosaic import MosaicFrame, MosaicLayout, get_layout
from .stokes import PolarFrame, PolarParams, StokesFrame

PVT_MAGIC = b"PVT1"
FLO_MAGIC = 202021.25  # spells "PIEH" as float32 bytes

_HEADER = struct.Struct("<4s5I16s")  # magic, dirs, channels, h, w, dtype, tag
_DTYPE_FLOAT32 = 0

#: Content tags written by the typed helpers.
TAG_DIRECTIONS = "d0-45-90-135"
TAG_STOKES = "s0-s1-s2"
TAG_PARAMS = "i-p-phi"
TAG_MOSAIC = "mosaic"


@dataclass(frozen=True)
class PvtHeader:
    n_dirs: int
    n_channels: int
    height: int
    width: int
    dtype_code: int
    tag: str

    @property
    def n_values(self) -> int:
        return self.n_dirs * self.n_channels * self.height * self.width


def write_pvt(path, array, tag: str = TAG_DIRECTIONS) -> None:
    """Write a (D, C, H, W) float array as a PVT container (fsynced).

    The payload is stored as float32; wider inputs are narrowed on save,
    so only float32-representable values round trip bit-exact.
    """
    arr = np.ascontiguousarray(np.asarray(array), dtype="<f4")
    if arr.ndim != 4:
        raise DimensionError(f"PVT stores 4-D stacks, got shape {arr.shape}")
    tag_b = tag.encode("ascii")
    if len(tag_b) > 16:
        raise FormatError(f"tag {tag!r} longer than 16 bytes")
    header = _HEADER.pack(PVT_MAGIC, *arr.shape, _DTYPE_FLOAT32, tag_b.ljust(16, b"\0"))
    with open(path, "wb") as f:
        f.write(header)
        f.write(arr.tobytes())
        f.flush()
        os.fsync(f.fileno())


def read_pvt_header(path) -> PvtHeader:
    """Read and validate only the header of a PVT file."""
    with open(path, "rb") as f:
        raw = f.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"{path}: header truncated, expected {_HEADER.size} bytes, got {len(raw)}")
    magic, d, c, h, w, dtype_code, tag_b = _HEADER.unpack(raw)
    if magic != PVT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {PVT_MAGIC!r}")
    if dtype_code != _DTYPE_FLOAT32:
        raise FormatError(f"{path}: unsupported dtype code {dtype_code}")
    if min(d, c, h, w) < 1:
        raise FormatError(f"{path}: non-positive dimension in header {(d, c, h, w)}")
    try:
        tag = tag_b.rstrip(b"\0").decode("ascii")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: content tag is not ASCII") from None
    return PvtHeader(d, c, h, w, dtype_code, tag)


def read_pvt(path):
    """Read a PVT container; returns (float32 (D, C, H, W) array, tag).

    The payload size implied by the header is checked against the real file
    size before any allocation, so malformed headers cannot trigger huge
    reads.
    """
    header = read_pvt_header(path)
    expected = header.n_values * 4
    actual = os.stat(path).st_size - _HEADER.size
    if actual != expected:
        raise FormatError(
            f"{path}: payload is {actual} bytes but the header declares {expected}")
    with open(path, "rb") as f:
        f.seek(_HEADER.size)
        payload = f.read(expected)
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload truncated, expected {expected} bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype="<f4").reshape(
        header.n_dirs, header.n_channels, header.height, header.width)
    return arr.copy(), header.tag


def write_polar_frame(path, frame: PolarFrame, tag: str = TAG_DIRECTIONS) -> None:
    write_pvt(path, frame.data, tag)


def read_polar_frame(path) -> PolarFrame:
    arr, tag = read_pvt(path)
    if arr.shape[0] != 4:
        raise FormatError(f"{path}: expected 4 directions, header says {arr.shape[0]}")
    return PolarFrame(arr)


def write_stokes(path, stokes: StokesFrame) -> None:
    write_pvt(path, np.stack([stokes.s0, stokes.s1, stokes.s2]), TAG_STOKES)


def read_stokes(path) -> StokesFrame:
    arr, tag = read_pvt(path)
    if arr.shape[0] != 3 or tag != TAG_STOKES:
        raise FormatError(f"{path}: not a Stokes container (tag {tag!r}, D={arr.shape[0]})")
    return StokesFrame(s0=arr[0], s1=arr[1], s2=arr[2])


def write_params(path, params: PolarParams) -> None:
    write_pvt(path, np.stack([params.i, params.p, params.phi]), TAG_PARAMS)


def read_params(path, clamped: bool = False) -> PolarParams:
    arr, tag = read_pvt(path)
    if arr.shape[0] != 3 or tag != TAG_PARAMS:
        raise FormatError(f"{path}: not a parameter container (tag {tag!r})")
    return PolarParams(i=arr[0], p=arr[1], phi=arr[2], clamped=clamped)


def write_mosaic(path, mosaic: MosaicFrame) -> None:
    write_pvt(path, mosaic.data[None, None], TAG_MOSAIC)


def read_mosaic(path, layout: MosaicLayout = None) -> MosaicFrame:
    arr, tag = read_pvt(path)
    if arr.shape[:2] != (1, 1) or tag != TAG_MOSAIC:
        raise FormatError(f"{path}: not a mosaic container (tag {tag!r})")
    return MosaicFrame(arr[0, 0], layout or get_layout())


# ---------------------------------------------------------------------------
# Middlebury .flo


def write_flo(path, flow: FlowField) -> None:
    """Write a flow field in Middlebury .flo layout (interleaved u, v)."""
    h, w = flow.shape
    data = np.empty((h, w, 2), dtype="<f4")
    data[..., 0] = flow.u
    data[..., 1] = flow.v
    with open(path, "wb") as f:
        f.write(struct.pack("<fii", FLO_MAGIC, w, h))
        f.write(data.tobytes())
        f.flush()
        os.fsync(f.fileno())


def read_flo(path) -> FlowField:
    """Read a Middlebury .flo file, validating magic and size before allocation."""
    size = os.stat(path).st_size
    if size < 12:
        raise FormatError(f"{path}: too short for a .flo header ({size} bytes)")
    with open(path, "rb") as f:
        magic, w, h = struct.unpack("<fii", f.read(12))
        if np.float32(magic) != np.float32(FLO_MAGIC):
            raise FormatError(f"{path}: bad .flo magic {magic!r}")
        if w < 1 or h < 1:
            raise FormatError(f"{path}: non-positive flow dims {w}x{h}")
        expected = w * h * 2 * 4
        if size - 12 != expected:
            raise FormatError(
                f"{path}: payload is {size - 12} bytes but dims imply {expected}")
        data = np.frombuffer(f.read(expected), dtype="<f4").reshape(h, w, 2)
    return FlowField(data[..., 0].astype(np.float64), data[..., 1].astype(np.float64))


# ---------------------------------------------------------------------------
# PNG


def write_png16(path, plane, scale: float = None) -> float:
    """Store one non-negative plane as 16-bit grayscale PNG plus scale sidecar.

    Values map as stored = round(plane / scale * 65535); the scale defaults
    to the plane maximum (or 1 for an all-zero plane) and is written to
    ``<path>.json``. Returns the scale used.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise DimensionError(f"PNG16 stores single planes, got shape {plane.shape}")
    if scale is None:
        peak = float(plane.max()) if plane.size else 0.0
        scale = peak if peak > 0 else 1.0
    stored = np.round(np.clip(plane / scale, 0.0, 1.0) * 65535.0).astype(np.uint16)
    Image.fromarray(stored).save(path, format="PNG")
    with open(str(path) + ".json", "w") as f:
        json.dump({"scale": scale}, f)
        f.write("\n")
    return float(scale)


def read_png16(path) -> np.ndarray:
    """Load a 16-bit grayscale PNG back to linear floats via its sidecar scale.

    A missing sidecar warns and assumes scale 1; an 8-bit image raises
    FormatError (quantization would be silently destructive).
    """
    img = Image.open(path)
    if img.mode not in ("I;16", "I;16B", "I;16L", "I"):
        raise FormatError(
            f"{path}: mode {img.mode!r} is not 16-bit grayscale (8-bit input?)")
    arr = np.asarray(img, dtype=np.float64)
    sidecar = str(path) + ".json"
    scale = 1.0
    if os.path.exists(sidecar):
        with open(sidecar) as f:
            scale = float(json.load(f)["scale"])
    else:
        warnings.warn(f"{path}: missing scale sidecar, assuming scale 1.0")
    return arr / 65535.0 * scale


def write_png8(path, rgb, gamma: float = 1.0) -> None:
    """Write an (H, W, 3) float image in [0, 1] as 8-bit PNG.

    ``gamma`` > 1 applies display encoding (out = in^(1/gamma)); data paths
    keep gamma 1 and stay linear.
    """
    rgb = np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise DimensionError(f"expected (H, W, 3), got {rgb.shape}")
    if gamma <= 0:
        raise FormatError(f"gamma must be > 0, got {gamma}")
    if gamma != 1.0:
        rgb = rgb ** (1.0 / gamma)
    Image.fromarray((rgb * 255.0 + 0.5).astype(np.uint8)).save(path, format="PNG")
