"""Grayscale image loading, padding, block partitioning and reassembly.

Images are carried as real-valued pixel arrays. Integer quantization to the
[0, L] range happens only when a file is written or a metric is computed;
everything in between stays in floating point because the downstream quantum
amplitudes are continuous.

Supported formats: PGM (P2 ascii / P5 binary, maxval <= 255) and PPM
(P3 / P6, reduced to luminance with BT.601 weights). PNG ingestion is
available behind the ``allow_png`` switch and uses Pillow when installed.

All types are immutable after construction and all operations are pure,
so images can be processed in parallel without shared state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BLOCK = 8

#: BT.601 luminance weights for RGB -> grayscale reduction.
BT601_WEIGHTS = (0.299, 0.587, 0.114)


class ImageFormatError(ValueError):
    """Raised for unreadable, unsupported, or corrupt image files."""


@dataclass(frozen=True)
class GrayscaleImage:
    """A 2D grid of real-valued intensities.

    ``original_dims`` tracks the pre-padding height/width so padded copies can
    be cropped back. ``bit_depth`` fixes the intensity ceiling
    L = 2**bit_depth - 1 (255 for ordinary 8-bit material).
    """

    pixels: np.ndarray
    bit_depth: int = 8
    original_dims: tuple[int, int] = None

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2D array")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)
        if self.original_dims is None:
            object.__setattr__(self, "original_dims", px.shape)
        oh, ow = self.original_dims
        if oh > px.shape[0] or ow > px.shape[1]:
            raise ValueError("original_dims exceed pixel dimensions")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def max_value(self) -> float:
        """Intensity ceiling L."""
        return float(2 ** self.bit_depth - 1)

    def clamped(self) -> "GrayscaleImage":
        """Copy with pixels clipped into [0, L]."""
        return GrayscaleImage(np.clip(self.pixels, 0.0, self.max_value),
                              self.bit_depth, self.original_dims)

    def cropped(self) -> "GrayscaleImage":
        """Copy restricted to the original (pre-padding) dimensions."""
        oh, ow = self.original_dims
        return GrayscaleImage(self.pixels[:oh, :ow], self.bit_depth, (oh, ow))


@dataclass(frozen=True)
class BlockGrid:
    """Row-major sequence of 8x8 pixel blocks covering a padded image.

    ``n_b_x`` counts block rows (ceil(H/8)), ``n_b_y`` block columns
    (ceil(W/8)); ``blocks[j]`` is the j-th block with
    j = block_row * n_b_y + block_col.
    """

    blocks: np.ndarray          # (n_blocks, 8, 8)
    n_b_x: int
    n_b_y: int
    original_dims: tuple[int, int]
    bit_depth: int = 8

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=np.float64)
        if blocks.shape != (self.n_b_x * self.n_b_y, BLOCK, BLOCK):
            raise ValueError("blocks shape inconsistent with block counts")
        blocks = blocks.copy()
        blocks.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)

    @property
    def padded_dims(self) -> tuple[int, int]:
        return (self.n_b_x * BLOCK, self.n_b_y * BLOCK)


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Reduce an (H, W, 3) array to luminance with BT.601 weights."""
    r, g, b = BT601_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def _read_pnm_tokens(data: bytes, count: int, offset: int) -> tuple[list[int], int]:
    """Read whitespace/comment separated integer tokens from a PNM header."""
    tokens = []
    i = offset
    while len(tokens) < count:
        if i >= len(data):
            raise ImageFormatError("corrupt header: unexpected end of file")
        c = data[i:i + 1]
        if c == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            tok = data[i:j]
            if not tok.isdigit():
                raise ImageFormatError(f"corrupt header: bad token {tok!r}")
            tokens.append(int(tok))
            i = j
    return tokens, i


def _bit_depth_for(maxval: int) -> int:
    bits = 1
    while 2 ** bits - 1 < maxval:
        bits += 1
    return bits


def _load_pnm(data: bytes) -> GrayscaleImage:
    magic = data[:2]
    if magic not in (b"P2", b"P5", b"P3", b"P6"):
        raise ImageFormatError(f"unsupported format: magic {magic!r}")
    (w, h, maxval), pos = _read_pnm_tokens(data, 3, 2)
    if w <= 0 or h <= 0:
        raise ImageFormatError("corrupt header: non-positive dimensions")
    if maxval <= 0 or maxval > 255:
        raise ImageFormatError(f"unsupported maxval {maxval} (expected 1..255)")
    channels = 3 if magic in (b"P3", b"P6") else 1
    n_values = w * h * channels

    if magic in (b"P5", b"P6"):
        # Binary payload starts after exactly one whitespace byte.
        payload = data[pos + 1:]
        if len(payload) < n_values:
            raise ImageFormatError("corrupt payload: truncated pixel data")
        values = np.frombuffer(payload[:n_values], dtype=np.uint8).astype(np.float64)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:])
        fields = body.split()
        if len(fields) < n_values:
            raise ImageFormatError("corrupt payload: truncated pixel data")
        try:
            values = np.array([int(f) for f in fields[:n_values]], dtype=np.float64)
        except ValueError as exc:
            raise ImageFormatError("corrupt payload: non-numeric sample") from exc

    if np.any(values > maxval):
        raise ImageFormatError("corrupt payload: sample exceeds maxval")
    if channels == 3:
        pixels = luminance(values.reshape(h, w, 3))
    else:
        pixels = values.reshape(h, w)
    return GrayscaleImage(pixels, bit_depth=_bit_depth_for(maxval))


def load_image(path, allow_png: bool = False) -> GrayscaleImage:
    """Load a grayscale image from a PGM/PPM file (or PNG when enabled).

    Multi-channel inputs are reduced to luminance. Raises
    :class:`ImageFormatError` for unreadable or corrupt files.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"unreadable file: {path}") from exc
    if data[:2] in (b"P2", b"P5", b"P3", b"P6"):
        return _load_pnm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        if not allow_png:
            raise ImageFormatError("PNG support is disabled (pass allow_png=True)")
        try:
            from PIL import Image
        except ImportError as exc:
            raise ImageFormatError("PNG support requires Pillow") from exc
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
        return GrayscaleImage(luminance(arr), bit_depth=8)
    raise ImageFormatError(f"unsupported format: {path}")


def write_pgm(img: GrayscaleImage, path, binary: bool = True) -> None:
    """Write an image as PGM (P5 binary by default, P2 ascii otherwise).

    Pixels are clamped to [0, L] and rounded half away from zero; maxval is
    always 255.
    """
    px = np.clip(img.pixels, 0.0, 255.0)
    px = np.copysign(np.floor(np.abs(px) + 0.5), px).astype(np.uint8)
    h, w = px.shape
    path = Path(path)
    if binary:
        header = f"P5\n{w} {h}\n255\n".encode("ascii")
        path.write_bytes(header + px.tobytes())
    else:
        lines = [" ".join(str(int(v)) for v in row) for row in px]
        path.write_text(f"P2\n{w} {h}\n255\n" + "\n".join(lines) + "\n")


def pad_to_multiple(img: GrayscaleImage, multiple: int = BLOCK) -> GrayscaleImage:
    """Zero-pad along the bottom and right edges to a dimension multiple."""
    h, w = img.pixels.shape
    ph = (multiple - h % multiple) % multiple
    pw = (multiple - w % multiple) % multiple
    if ph == 0 and pw == 0:
        return img
    padded = np.pad(img.pixels, ((0, ph), (0, pw)), mode="constant")
    return GrayscaleImage(padded, img.bit_depth, img.original_dims)


def pad_to_pow2(img: GrayscaleImage, minimum: int = BLOCK) -> GrayscaleImage:
    """Zero-pad each dimension up to the next power of two (at least 8).

    The quantum register layout addresses pixels with binary indices, so the
    padded height and width must both be powers of two even though the block
    grid itself only needs multiples of 8. The original dimensions are kept
    for cropping at readout.
    """
    h, w = img.pixels.shape
    th = max(minimum, 1 << (h - 1).bit_length())
    tw = max(minimum, 1 << (w - 1).bit_length())
    if th == h and tw == w:
        return img
    padded = np.pad(img.pixels, ((0, th - h), (0, tw - w)), mode="constant")
    return GrayscaleImage(padded, img.bit_depth, img.original_dims)


def pad_and_partition(img: GrayscaleImage) -> BlockGrid:
    """Zero-pad to multiples of 8 and split into row-major 8x8 blocks."""
    padded = pad_to_multiple(img)
    h, w = padded.pixels.shape
    nbx, nby = h // BLOCK, w // BLOCK
    blocks = (padded.pixels.reshape(nbx, BLOCK, nby, BLOCK)
              .transpose(0, 2, 1, 3)
              .reshape(nbx * nby, BLOCK, BLOCK))
    return BlockGrid(blocks, nbx, nby, img.original_dims, img.bit_depth)


def assemble_image(grid: BlockGrid, original_dims: tuple[int, int] | None = None,
                   clamp: bool = True) -> GrayscaleImage:
    """Reassemble blocks into an image, cropping away the padding region.

    Inverse of :func:`pad_and_partition` up to the cropped padding. Values are
    clamped to [0, L] unless ``clamp`` is False (oracle comparisons need the
    raw pre-clamp pixels).
    """
    if original_dims is None:
        original_dims = grid.original_dims
    oh, ow = original_dims
    ph, pw = grid.padded_dims
    if oh > ph or ow > pw:
        raise ValueError(f"original dims {original_dims} exceed padded grid {grid.padded_dims}")
    pixels = (grid.blocks.reshape(grid.n_b_x, grid.n_b_y, BLOCK, BLOCK)
              .transpose(0, 2, 1, 3)
              .reshape(ph, pw))[:oh, :ow]
    if clamp:
        pixels = np.clip(pixels, 0.0, float(2 ** grid.bit_depth - 1))
    return GrayscaleImage(pixels, grid.bit_depth, (oh, ow))


def blocks_from_matrix(pixels: np.ndarray, nbx: int, nby: int) -> np.ndarray:
    """Reshape a padded (8*nbx, 8*nby) pixel array into (n_blocks, 8, 8)."""
    return (pixels.reshape(nbx, BLOCK, nby, BLOCK)
            .transpose(0, 2, 1, 3)
            .reshape(nbx * nby, BLOCK, BLOCK))
