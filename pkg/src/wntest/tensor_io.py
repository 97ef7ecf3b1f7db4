"""Dataset ingestion and the tensor container exchange format.

Covers bit-exact reading of CIFAR-10 binary batches, a small binary
container format ("OODT") used to exchange tensors with external
tooling, and the channel-last flattening that defines the sequence
index of every per-sample statistic in this package.
"""

import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, FormatError

_MAGIC = b"OODT"
_VERSION = 1
_DTYPE_CODES = {0: np.uint8, 1: np.float32}
_CODE_FOR_DTYPE = {np.dtype(np.uint8): 0, np.dtype(np.float32): 1}

CIFAR10_RECORD_BYTES = 3073  # 1 label byte + 3 * 32 * 32 pixel bytes

RANGE_RAW = "raw-bytes"
RANGE_UNIT = "unit"
RANGE_RESIDUAL = "unbounded-residual"


@dataclass(frozen=True)
class ImageGeometry:
    """Image shape metadata; width is `wd` to keep W free for whitened sequences."""

    height: int
    wd: int
    channels: int

    def __post_init__(self):
        if self.height < 1 or self.wd < 1 or self.channels < 1:
            raise ArgumentError("all geometry dimensions must be >= 1")

    @property
    def d(self):
        return self.height * self.wd * self.channels


@dataclass
class SampleMatrix:
    """n samples by d flattened values, with the geometry that produced d."""

    geometry: ImageGeometry
    values: np.ndarray  # (n, d) float64
    value_range: str = RANGE_RESIDUAL

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ArgumentError("values must be a 2-d array")
        if self.values.shape[1] != self.geometry.d:
            raise ArgumentError(
                f"row length {self.values.shape[1]} does not match geometry d={self.geometry.d}"
            )
        if self.value_range not in (RANGE_RAW, RANGE_UNIT, RANGE_RESIDUAL):
            raise ArgumentError(f"unknown value_range {self.value_range!r}")
        if self.value_range == RANGE_RAW:
            v = self.values
            if v.size and (v.min() < 0 or v.max() > 255 or not np.all(v == np.round(v))):
                raise ArgumentError("raw-bytes values must be integers in [0, 255]")

    @property
    def n(self):
        return self.values.shape[0]

    def to_unit(self):
        """Rescale raw byte values to [0, 1]; no-op on already-unit data."""
        if self.value_range == RANGE_RAW:
            return SampleMatrix(self.geometry, self.values / 255.0, RANGE_UNIT)
        return self


def read_cifar10_bin(paths):
    """Read CIFAR-10 binary batch files into one SampleMatrix.

    Labels are discarded. Pixels are transposed from the on-disk
    channel-planar order (R plane, G plane, B plane) to channel-last,
    so flattened index 3*(32*i + j) + c holds channel c of pixel (i, j).
    """
    rows = []
    for path in paths:
        try:
            raw = np.fromfile(path, dtype=np.uint8)
        except OSError as e:
            raise FormatError(f"cannot read {path}: {e}") from e
        if raw.size == 0 or raw.size % CIFAR10_RECORD_BYTES != 0:
            raise FormatError(
                f"{path}: length {raw.size} is not a positive multiple of {CIFAR10_RECORD_BYTES}"
            )
        recs = raw.reshape(-1, CIFAR10_RECORD_BYTES)[:, 1:]  # drop label byte
        imgs = recs.reshape(-1, 3, 32, 32).transpose(0, 2, 3, 1)  # planar -> HWC
        rows.append(imgs.reshape(-1, 3072))
    values = np.concatenate(rows, axis=0).astype(np.float64)
    return SampleMatrix(ImageGeometry(32, 32, 3), values, RANGE_RAW)


def write_tensor(path, arr):
    """Write an ndarray (uint8 or float32) in the OODT container format."""
    arr = np.asarray(arr)
    if arr.dtype not in _CODE_FOR_DTYPE:
        raise ArgumentError(f"unsupported dtype {arr.dtype}; use uint8 or float32")
    header = _MAGIC + struct.pack("<IBB", _VERSION, _CODE_FOR_DTYPE[arr.dtype], arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes())


def read_tensor(path):
    """Read an OODT container back into an ndarray (uint8 or float32)."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 10 or data[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic")
    version, dtype_code, ndim = struct.unpack("<IBB", data[4:10])
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dtype_code not in _DTYPE_CODES:
        raise FormatError(f"{path}: unknown dtype code {dtype_code}")
    shape_end = 10 + 8 * ndim
    if len(data) < shape_end:
        raise FormatError(f"{path}: truncated header")
    shape = struct.unpack(f"<{ndim}Q", data[10:shape_end])
    dtype = np.dtype(_DTYPE_CODES[dtype_code]).newbyteorder("<")
    expected = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    payload = data[shape_end:]
    if len(payload) != expected:
        raise FormatError(f"{path}: payload length {len(payload)} != expected {expected}")
    return np.frombuffer(payload, dtype=dtype).reshape(shape).astype(_DTYPE_CODES[dtype_code])


def write_container(path, matrix):
    """Persist a SampleMatrix as an (n, H, Wd, C) tensor container.

    raw-byte matrices are stored as uint8, everything else as float32.
    """
    g = matrix.geometry
    arr = matrix.values.reshape(matrix.n, g.height, g.wd, g.channels)
    if matrix.value_range == RANGE_RAW:
        write_tensor(path, arr.astype(np.uint8))
    else:
        write_tensor(path, arr.astype(np.float32))


def read_container(path):
    """Read a container holding an (n, H, Wd, C) or (n, d) sample tensor."""
    arr = read_tensor(path)
    if arr.ndim == 4:
        n, h, wd, c = arr.shape
        geometry = ImageGeometry(h, wd, c)
    elif arr.ndim == 2:
        n, d = arr.shape
        geometry = ImageGeometry(1, d, 1)
    else:
        raise FormatError(f"{path}: expected shape (n,H,W,C) or (n,d), got ndim={arr.ndim}")
    value_range = RANGE_RAW if arr.dtype == np.uint8 else RANGE_RESIDUAL
    return SampleMatrix(geometry, arr.reshape(n, -1).astype(np.float64), value_range)


def flatten_hwc(image):
    """Flatten an (H, Wd, C) image so index C*(Wd*i + j) + c holds (i, j, c)."""
    image = np.asarray(image)
    if image.ndim != 3:
        raise ArgumentError("expected an (H, Wd, C) array")
    return image.reshape(-1)


def unflatten_hwc(vec, geometry):
    """Inverse of flatten_hwc for the given geometry."""
    vec = np.asarray(vec)
    if vec.size != geometry.d:
        raise ArgumentError(f"vector length {vec.size} != d={geometry.d}")
    return vec.reshape(geometry.height, geometry.wd, geometry.channels)
