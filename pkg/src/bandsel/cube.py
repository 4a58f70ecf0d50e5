"""Hyperspectral cube container, file I/O, scaling, and sample extraction.

A cube is rows x cols x bands of reflectance values. The on-disk format is:

* 8-byte magic ``HSICUBE1``
* little-endian uint32 header length, then that many bytes of UTF-8 JSON:
  ``{"rows", "cols", "bands", "dtype": "f32", "band_labels"?, "has_gt"}``
* rows * cols * bands little-endian float32 values in row-major
  (row, col, band) order
* if ``has_gt``: rows * cols little-endian uint32 class labels
  (0 means unlabeled)

Values are held in memory as float64; the payload is float32, so a
save/load round trip is exact for float32-representable values.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from bandsel.errors import ConfigError, DataError, DimensionError, FormatError

MAGIC = b"HSICUBE1"

# Standard water-absorption exclusion for 224-band AVIRIS Indian Pines
# scenes (0-based): bands 104-108, 150-163 and 220-224 in 1-based counting.
INDIAN_PINES_DROP_BANDS = tuple(range(103, 108)) + tuple(range(149, 163)) + tuple(range(219, 224))


@dataclass
class HsiCube:
    """3-D spectral image with optional original band labels and ground truth."""

    values: np.ndarray
    band_labels: np.ndarray | None = None
    ground_truth: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 3:
            raise DimensionError(f"cube values must be rows x cols x bands, got shape {tuple(self.values.shape)}")
        if min(self.values.shape) < 1:
            raise DimensionError(f"cube axes must be non-empty, got shape {tuple(self.values.shape)}")
        if self.band_labels is not None:
            self.band_labels = np.asarray(self.band_labels, dtype=np.int64)
            if self.band_labels.shape != (self.bands,):
                raise DimensionError(
                    f"band labels length {self.band_labels.shape} does not match {self.bands} bands"
                )
            if self.bands > 1 and not np.all(np.diff(self.band_labels) > 0):
                raise DataError("band labels must be strictly increasing")
        if self.ground_truth is not None:
            self.ground_truth = np.asarray(self.ground_truth, dtype=np.uint32)
            if self.ground_truth.shape != (self.rows, self.cols):
                raise DimensionError(
                    f"ground truth shape {self.ground_truth.shape} does not match cube {self.rows}x{self.cols}"
                )

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]

    @property
    def bands(self):
        return self.values.shape[2]

    def with_ground_truth(self, labels):
        return HsiCube(self.values, band_labels=self.band_labels, ground_truth=labels)


def save_cube(cube, path):
    """Write a cube in the container format described in the module docstring."""
    header = {"rows": cube.rows, "cols": cube.cols, "bands": cube.bands, "dtype": "f32",
              "has_gt": cube.ground_truth is not None}
    if cube.band_labels is not None:
        header["band_labels"] = [int(v) for v in cube.band_labels]
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(cube.values, dtype="<f4").tobytes())
        if cube.ground_truth is not None:
            fh.write(np.ascontiguousarray(cube.ground_truth, dtype="<u4").tobytes())


def load_cube(path):
    """Read a cube file, validating magic, header, and payload sizes."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 4:
        raise FormatError(f"file too short for magic and header length (size {len(data)})")
    if data[: len(MAGIC)] != MAGIC:
        raise FormatError(f"bad magic at offset 0: {data[:len(MAGIC)]!r}")
    (hlen,) = struct.unpack_from("<I", data, len(MAGIC))
    offset = len(MAGIC) + 4
    if len(data) < offset + hlen:
        raise FormatError(f"truncated header at offset {offset}: need {hlen} bytes")
    try:
        header = json.loads(data[offset : offset + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unparseable header at offset {offset}: {exc}") from exc
    offset += hlen
    try:
        rows, cols, bands = int(header["rows"]), int(header["cols"]), int(header["bands"])
        dtype = header["dtype"]
        has_gt = bool(header["has_gt"])
    except KeyError as exc:
        raise FormatError(f"header missing field {exc}") from exc
    if dtype != "f32":
        raise FormatError(f"unsupported dtype {dtype!r}")
    if rows < 1 or cols < 1 or bands < 1:
        raise FormatError(f"non-positive cube dimensions {rows}x{cols}x{bands} in header")
    n_values = rows * cols * bands
    if len(data) < offset + 4 * n_values:
        raise FormatError(f"truncated value payload at offset {offset}: need {4 * n_values} bytes")
    values = np.frombuffer(data, dtype="<f4", count=n_values, offset=offset)
    values = values.astype(np.float64).reshape(rows, cols, bands)
    offset += 4 * n_values
    gt = None
    if has_gt:
        if len(data) < offset + 4 * rows * cols:
            raise FormatError(f"truncated ground truth at offset {offset}: need {4 * rows * cols} bytes")
        gt = np.frombuffer(data, dtype="<u4", count=rows * cols, offset=offset).reshape(rows, cols).copy()
        offset += 4 * rows * cols
    if len(data) != offset:
        raise FormatError(f"{len(data) - offset} trailing bytes at offset {offset}")
    labels = header.get("band_labels")
    return HsiCube(values, band_labels=labels, ground_truth=gt)


def load_labels_csv(path, rows, cols):
    """Read (row, col, label) CSV into a rows x cols uint32 label image.

    Lines starting with ``#`` and a ``row,col,label`` header line are
    skipped; unmentioned pixels stay 0 (unlabeled).
    """
    labels = np.zeros((rows, cols), dtype=np.uint32)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if lineno == 1 and not parts[0].lstrip("-").isdigit():
                continue
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected row,col,label, got {line!r}")
            try:
                r, c, lab = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: non-integer field in {line!r}") from exc
            if not (0 <= r < rows and 0 <= c < cols) or lab < 0:
                raise DataError(f"line {lineno}: pixel ({r},{c}) or label {lab} out of range")
            labels[r, c] = lab
    return labels


def scale_unit(cube):
    """Affine-map the whole cube so its global minimum is 0 and maximum is 1.

    A constant cube maps to all zeros.
    """
    values = cube.values
    if not np.all(np.isfinite(values)):
        raise DataError("cube contains non-finite values; cannot scale")
    lo = values.min()
    hi = values.max()
    if hi == lo:
        scaled = np.zeros_like(values)
    else:
        scaled = (values - lo) / (hi - lo)
    return HsiCube(scaled, band_labels=cube.band_labels, ground_truth=cube.ground_truth)


def exclude_bands(cube, drop_list):
    """Remove the listed band indices; surviving original labels are recorded."""
    drop = sorted(set(int(i) for i in drop_list))
    for i in drop:
        if not 0 <= i < cube.bands:
            raise ConfigError(f"band index {i} out of range for {cube.bands}-band cube")
    keep = np.array([i for i in range(cube.bands) if i not in set(drop)], dtype=np.int64)
    labels = cube.band_labels if cube.band_labels is not None else np.arange(cube.bands)
    return HsiCube(
        cube.values[:, :, keep],
        band_labels=np.asarray(labels)[keep],
        ground_truth=cube.ground_truth,
    )


@dataclass
class SampleSet:
    """Training samples: flat spectra [S, b] or square patches [S, a, a, b]."""

    kind: str
    samples: np.ndarray
    window: int | None = None
    stride: int | None = None

    @property
    def bands(self):
        return self.samples.shape[-1]

    def __len__(self):
        return self.samples.shape[0]


def extract_pixels(cube):
    """All spectral vectors in row-major pixel order: S = rows * cols."""
    flat = cube.values.reshape(cube.rows * cube.cols, cube.bands).copy()
    return SampleSet(kind="pixels", samples=flat)


def extract_patches(cube, window, stride):
    """Square patches from a sliding window.

    Offsets are (i * stride, j * stride) for every placement where the
    window fits, giving (floor((rows - a) / t) + 1) * (floor((cols - a) / t) + 1)
    patches of shape a x a x bands.
    """
    a, t = int(window), int(stride)
    if a < 1 or a > min(cube.rows, cube.cols):
        raise ConfigError(f"window {a} must be in [1, {min(cube.rows, cube.cols)}]")
    if t < 1:
        raise ConfigError(f"stride must be >= 1, got {t}")
    views = np.lib.stride_tricks.sliding_window_view(cube.values, (a, a), axis=(0, 1))
    sub = views[::t, ::t]  # [n_i, n_j, bands, a, a]
    n_i, n_j = sub.shape[0], sub.shape[1]
    patches = sub.transpose(0, 1, 3, 4, 2).reshape(n_i * n_j, a, a, cube.bands).copy()
    return SampleSet(kind="patches", samples=patches, window=a, stride=t)
