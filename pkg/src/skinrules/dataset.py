"""Image/mask ingestion, pixel-record flattening and the records CSV format.

Ground-truth masks mark skin white ``(255, 255, 255)`` and everything else
black ``(0, 0, 0)``.  A dataset root holds ``images/`` and ``masks/`` whose
files are matched by stem.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    AnnotationError,
    DatasetWarning,
    EmptyDatasetError,
    FormatError,
    InputError,
    LayoutError,
    PairingError,
)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
MASK_SUFFIXES = (".png",)
CSV_HEADER = "R,G,B,label"
MASK_MODES = ("strict", "lenient")

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True)
class ImageBuffer:
    """Decoded 8-bit RGB image, ``pixels`` shaped ``(height, width, 3)``."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ValueError(f"expected (H, W, 3) uint8 pixels, got {p.shape} {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class MaskImage:
    """Per-pixel skin flags, ``labels`` shaped ``(height, width)``.

    ``non_canonical`` counts pixels that were neither pure white nor pure
    black when the mask was read in lenient mode.
    """

    labels: np.ndarray
    non_canonical: int = 0

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def skin_count(self) -> int:
        return int(np.count_nonzero(self.labels))


@dataclass(frozen=True)
class DatasetPair:
    stem: str
    image_path: Path
    mask_path: Path


class LabeledRecord(NamedTuple):
    r: int
    g: int
    b: int
    label: int


# --- decoding -----------------------------------------------------------------


def _png_bit_depth(path: Path) -> tuple[int, int] | None:
    with open(path, "rb") as fh:
        head = fh.read(33)
    if not head.startswith(_PNG_SIGNATURE) or head[12:16] != b"IHDR":
        return None
    return head[24], head[25]


def _decode_rgb(path, what: str) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: {what} file not found")
    depth = _png_bit_depth(path)
    if depth is not None:
        bit_depth, colour_type = depth
        # palette entries are always 8-bit; every other colour type must be
        if colour_type != 3 and bit_depth != 8:
            raise FormatError(f"{path}: {bit_depth}-bit PNG not supported (8-bit channels only)")
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode not in ("RGB", "RGBA", "L", "LA", "P", "PA"):
                raise FormatError(f"{path}: unsupported image mode {im.mode} (8-bit channels only)")
            if im.width < 1 or im.height < 1:
                raise FormatError(f"{path}: image has zero size")
            rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: cannot decode {what}: {exc}") from None
    return rgb


def load_image(path) -> ImageBuffer:
    """Decode a PNG or JPEG to 8-bit RGB, dropping any alpha channel."""
    return ImageBuffer(np.ascontiguousarray(_decode_rgb(path, "image")))


def load_mask(path, mode: str = "strict") -> MaskImage:
    """Read a ground-truth mask.

    Strict mode accepts only pure white and pure black pixels and raises
    ``AnnotationError`` naming the first other pixel in row-major order.
    Lenient mode treats a pixel as skin when every channel exceeds 127 and
    counts the pixels that were not canonical.
    """
    if mode not in MASK_MODES:
        raise ValueError(f"mask mode must be one of {MASK_MODES}, got {mode!r}")
    rgb = _decode_rgb(path, "mask")
    white = np.all(rgb == 255, axis=2)
    black = np.all(rgb == 0, axis=2)
    odd = ~(white | black)
    n_odd = int(np.count_nonzero(odd))
    if n_odd == 0:
        return MaskImage(white)
    if mode == "strict":
        y, x = np.unravel_index(int(np.argmax(odd)), odd.shape)
        value = tuple(int(c) for c in rgb[y, x])
        raise AnnotationError(
            f"{path}: non-canonical mask pixel {value} at (x={x}, y={y}); "
            f"{n_odd} such pixels in total (use lenient mode to threshold)"
        )
    return MaskImage(np.all(rgb > 127, axis=2), non_canonical=n_odd)


# --- dataset layout -----------------------------------------------------------


def _index_dir(directory: Path, suffixes: Sequence[str]) -> dict[str, Path]:
    found: dict[str, Path] = {}
    for path in sorted(directory.iterdir()):
        if path.name.startswith(".") or not path.is_file():
            continue
        if path.suffix.lower() not in suffixes:
            continue
        if path.stem in found:
            raise LayoutError(f"{directory}: ambiguous stem {path.stem!r} ({found[path.stem].name}, {path.name})")
        found[path.stem] = path
    return found


def pair_dataset(root) -> list[DatasetPair]:
    """Match ``root/images/*`` with ``root/masks/*.png`` by stem, sorted."""
    root = Path(root)
    images_dir, masks_dir = root / "images", root / "masks"
    for d in (images_dir, masks_dir):
        if not d.is_dir():
            raise LayoutError(f"{root}: missing subdirectory {d.name}/")
    images = _index_dir(images_dir, IMAGE_SUFFIXES)
    masks = _index_dir(masks_dir, MASK_SUFFIXES)
    for stem in sorted(images.keys() ^ masks.keys()):
        side = "images/" if stem in images else "masks/"
        warnings.warn(f"{root}: stem {stem!r} only present in {side}; skipped", DatasetWarning, stacklevel=2)
    common = sorted(images.keys() & masks.keys())
    if not common:
        raise EmptyDatasetError(f"{root}: no image/mask pairs found")
    return [DatasetPair(s, images[s], masks[s]) for s in common]


def load_pair(pair: DatasetPair, mask_mode: str = "strict") -> tuple[ImageBuffer, MaskImage]:
    image = load_image(pair.image_path)
    mask = load_mask(pair.mask_path, mask_mode)
    if mask.non_canonical:
        warnings.warn(
            f"{pair.mask_path}: {mask.non_canonical} non-canonical mask pixels thresholded",
            DatasetWarning,
            stacklevel=2,
        )
    return image, mask


# --- records ------------------------------------------------------------------


def record_array(image: ImageBuffer, mask: MaskImage) -> np.ndarray:
    """Row-major ``(N, 4)`` uint8 array of ``R, G, B, label``."""
    if image.pixels.shape[:2] != mask.labels.shape:
        raise PairingError(
            f"image is {image.width}x{image.height} but mask is {mask.width}x{mask.height}"
        )
    n = image.width * image.height
    out = np.empty((n, 4), dtype=np.uint8)
    out[:, :3] = image.pixels.reshape(n, 3)
    out[:, 3] = mask.labels.reshape(n)
    return out


def transform_records(image: ImageBuffer, mask: MaskImage) -> list[LabeledRecord]:
    return [LabeledRecord(*row) for row in record_array(image, mask).tolist()]


def dataset_record_array(root, mask_mode: str = "strict") -> np.ndarray:
    parts = []
    for pair in pair_dataset(root):
        image, mask = load_pair(pair, mask_mode)
        try:
            parts.append(record_array(image, mask))
        except PairingError as exc:
            raise PairingError(f"{pair.stem}: {exc}") from None
    return np.concatenate(parts)


def write_records_csv(records: Iterable, path) -> None:
    rows = records_to_array(records)
    with open(path, "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.writelines(f"{r},{g},{b},{lab}\n" for r, g, b, lab in rows.tolist())


def read_records_csv(path) -> list[LabeledRecord]:
    path = Path(path)
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise InputError(f"{path}: records file not found") from None
    records = []
    with fh:
        header = fh.readline().rstrip("\r\n")
        if header != CSV_HEADER:
            raise FormatError(f"{path}:1: expected header {CSV_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split(",")
            try:
                if len(fields) != 4:
                    raise ValueError(f"expected 4 fields, got {len(fields)}")
                r, g, b, label = (int(f) for f in fields)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: malformed row {line!r} ({exc})") from None
            if not (0 <= r <= 255 and 0 <= g <= 255 and 0 <= b <= 255):
                raise FormatError(f"{path}:{lineno}: channel out of range in {line!r}")
            if label not in (0, 1):
                raise FormatError(f"{path}:{lineno}: label must be 0 or 1 in {line!r}")
            records.append(LabeledRecord(r, g, b, label))
    return records


def records_to_array(records) -> np.ndarray:
    """Coerce a record list or array to an ``(N, 4)`` int array."""
    arr = np.asarray(records)
    if arr.size == 0:
        return np.empty((0, 4), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"records must have 4 columns, got shape {arr.shape}")
    return arr
