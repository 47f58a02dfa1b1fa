"""Explicit skin-colour rules over the 8-bit RGB cube.

Every rule exists twice: a scalar predicate on plain ints (``is_skin_*``),
which is the reference definition, and a vectorised numpy form used for
images and for building lookup tables.  The scalar predicates use only
integer arithmetic and comparisons so they can be compiled or mapped over the
whole 2**24 domain by test oracles.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .errors import FormatError, InputError

DOMAIN_SIZE = 1 << 24
LUT_MAGIC = b"SKLUT001"


class RgbPixel(NamedTuple):
    r: int
    g: int
    b: int

    @classmethod
    def checked(cls, r: int, g: int, b: int) -> "RgbPixel":
        for name, value in (("r", r), ("g", g), ("b", b)):
            if not 0 <= value <= 255:
                raise ValueError(f"channel {name}={value} outside [0, 255]")
        return cls(int(r), int(g), int(b))


class SkinLabel(enum.IntEnum):
    NON_SKIN = 0
    SKIN = 1


class RuleKind(enum.Enum):
    KOVAC = "kovac"
    KOVAC_REWRITTEN = "kovac-rewritten"
    SALEH = "saleh"
    SWIFT = "swift"
    RGB_RATIO = "rgb-ratio"

    @property
    def rule_id(self) -> int:
        return _RULE_IDS[self]

    @classmethod
    def parse(cls, name: "str | RuleKind") -> "RuleKind":
        if isinstance(name, RuleKind):
            return name
        key = name.strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown rule {name!r} (expected one of: {known})") from None

    @classmethod
    def from_id(cls, rule_id: int) -> "RuleKind":
        for kind, value in _RULE_IDS.items():
            if value == rule_id:
                return kind
        raise ValueError(f"unknown rule id {rule_id}")


_RULE_IDS = {
    RuleKind.KOVAC: 0,
    RuleKind.KOVAC_REWRITTEN: 1,
    RuleKind.SALEH: 2,
    RuleKind.SWIFT: 3,
    RuleKind.RGB_RATIO: 4,
}

# Default rule set for comparison reports, in report row order.
COMPARED_RULES = (RuleKind.KOVAC, RuleKind.SALEH, RuleKind.SWIFT, RuleKind.RGB_RATIO)


# --- scalar predicates -------------------------------------------------------


def is_skin_kovac(r, g, b):
    if not (r > 95 and g > 40 and b > 20):
        return False
    if max(r, g, b) - min(r, g, b) <= 15:
        return False
    if abs(r - g) <= 15:
        return False
    return r > g and r > b


def is_skin_kovac_rewritten(r, g, b):
    return (
        r > 95 and g > 40 and b > 20
        and r > g and r > b
        and r - min(g, b) > 15
        and r - g > 15
    )


def is_skin_saleh(r, g, b):
    # blue is ignored by this rule
    d = r - g
    return 20 < d < 80


def is_skin_swift(r, g, b):
    # complement of: B > R or G < B or G > R or B < R/4 or B > 200
    return b <= r and g >= b and g <= r and 4 * b >= r and b <= 200


def is_skin_rgb_ratio(r, g, b):
    # 0 <= (R-G)/(R+G) <= 1/2 and B/(R+G) <= 1/2, cleared of denominators
    s = r + g
    return s > 0 and g <= r and r <= 3 * g and 2 * b <= s


def is_skin_rgb_ratio_float(r, g, b):
    """Floating-point reading of the ratio rule; reference only."""
    s = r + g
    if s == 0:
        return False
    f1 = (r - g) / s
    f2 = b / s
    return 0.0 <= f1 <= 0.5 and f2 <= 0.5


SCALAR_PREDICATES: dict[RuleKind, Callable[[int, int, int], bool]] = {
    RuleKind.KOVAC: is_skin_kovac,
    RuleKind.KOVAC_REWRITTEN: is_skin_kovac_rewritten,
    RuleKind.SALEH: is_skin_saleh,
    RuleKind.SWIFT: is_skin_swift,
    RuleKind.RGB_RATIO: is_skin_rgb_ratio,
}


def _label(flag: bool) -> SkinLabel:
    return SkinLabel.SKIN if flag else SkinLabel.NON_SKIN


def _ints(p):
    # numpy uint8 channels would wrap on subtraction
    r, g, b = p
    return int(r), int(g), int(b)


def classify_kovac(p) -> SkinLabel:
    return _label(is_skin_kovac(*_ints(p)))


def classify_kovac_rewritten(p) -> SkinLabel:
    return _label(is_skin_kovac_rewritten(*_ints(p)))


def classify_saleh(p) -> SkinLabel:
    return _label(is_skin_saleh(*_ints(p)))


def classify_swift(p) -> SkinLabel:
    return _label(is_skin_swift(*_ints(p)))


def classify_rgb_ratio(p) -> SkinLabel:
    return _label(is_skin_rgb_ratio(*_ints(p)))


def classify(rule: RuleKind | str, p) -> SkinLabel:
    """Classify one ``(r, g, b)`` pixel with the selected rule."""
    return _label(SCALAR_PREDICATES[RuleKind.parse(rule)](*_ints(p)))


# --- vectorised predicates ----------------------------------------------------


def _channels(rgb: np.ndarray):
    rgb = np.asarray(rgb)
    if rgb.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension of 3 channels, got shape {rgb.shape}")
    # int16 holds every intermediate below (max 4*255, min -255)
    c = rgb.astype(np.int16, copy=False)
    return c[..., 0], c[..., 1], c[..., 2]


def _kovac_v(r, g, b):
    spread = np.maximum(np.maximum(r, g), b) - np.minimum(np.minimum(r, g), b)
    return (
        (r > 95) & (g > 40) & (b > 20)
        & (spread > 15)
        & (np.abs(r - g) > 15)
        & (r > g) & (r > b)
    )


def _kovac_rewritten_v(r, g, b):
    return (
        (r > 95) & (g > 40) & (b > 20)
        & (r > g) & (r > b)
        & (r - np.minimum(g, b) > 15)
        & (r - g > 15)
    )


def _saleh_v(r, g, b):
    d = r - g
    return (d > 20) & (d < 80)


def _swift_v(r, g, b):
    return (b <= r) & (g >= b) & (g <= r) & (4 * b >= r) & (b <= 200)


def _rgb_ratio_v(r, g, b):
    s = r + g
    return (s > 0) & (g <= r) & (r <= 3 * g) & (2 * b <= s)


_VECTOR_PREDICATES = {
    RuleKind.KOVAC: _kovac_v,
    RuleKind.KOVAC_REWRITTEN: _kovac_rewritten_v,
    RuleKind.SALEH: _saleh_v,
    RuleKind.SWIFT: _swift_v,
    RuleKind.RGB_RATIO: _rgb_ratio_v,
}


def skin_mask(rule: RuleKind | str, rgb: np.ndarray) -> np.ndarray:
    """Boolean skin mask for an array of pixels with a trailing RGB axis."""
    r, g, b = _channels(rgb)
    return _VECTOR_PREDICATES[RuleKind.parse(rule)](r, g, b)


def pack_index(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb)
    c = rgb.astype(np.int32, copy=False)
    return (c[..., 0] << 16) | (c[..., 1] << 8) | c[..., 2]


def domain_block(r_lo: int, r_hi: int) -> np.ndarray:
    """All pixels with red in ``[r_lo, r_hi)``, in LUT index order."""
    idx = np.arange(r_lo << 16, r_hi << 16, dtype=np.int32)
    out = np.empty(idx.shape + (3,), dtype=np.uint8)
    out[:, 0] = idx >> 16
    out[:, 1] = (idx >> 8) & 0xFF
    out[:, 2] = idx & 0xFF
    return out


def domain_mask(rule: RuleKind | str, block: int = 32) -> np.ndarray:
    """Skin flag for every 24-bit colour, indexed ``R*65536 + G*256 + B``.

    The red axis is processed in blocks; the result does not depend on the
    block size.
    """
    rule = RuleKind.parse(rule)
    out = np.empty(DOMAIN_SIZE, dtype=bool)
    for r_lo in range(0, 256, block):
        r_hi = min(256, r_lo + block)
        out[r_lo << 16 : r_hi << 16] = skin_mask(rule, domain_block(r_lo, r_hi))
    return out


# --- lookup table -------------------------------------------------------------


@dataclass(frozen=True)
class RuleLut:
    """Bit-packed skin table for one rule, one bit per 24-bit colour."""

    rule: RuleKind
    table: np.ndarray  # uint8, DOMAIN_SIZE // 8 bytes, little-endian bit order

    def __post_init__(self):
        if self.table.dtype != np.uint8 or self.table.shape != (DOMAIN_SIZE // 8,):
            raise ValueError("LUT table must be a flat uint8 array of 2**21 bytes")
        self.table.setflags(write=False)

    @cached_property
    def dense(self) -> np.ndarray:
        flags = np.unpackbits(self.table, bitorder="little").view(bool)
        flags.setflags(write=False)
        return flags

    def lookup(self, p) -> SkinLabel:
        r, g, b = _ints(p)
        idx = (r << 16) | (g << 8) | b
        return _label(bool((self.table[idx >> 3] >> (idx & 7)) & 1))

    def lookup_array(self, rgb: np.ndarray) -> np.ndarray:
        return self.dense[pack_index(rgb)]

    def skin_count(self) -> int:
        return int(np.unpackbits(self.table).sum())

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(LUT_MAGIC)
            fh.write(bytes([self.rule.rule_id]))
            fh.write(self.table.tobytes())


def build_lut(rule: RuleKind | str) -> RuleLut:
    rule = RuleKind.parse(rule)
    return RuleLut(rule, np.packbits(domain_mask(rule), bitorder="little"))


def load_lut(path) -> RuleLut:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise InputError(f"{path}: LUT file not found") from None
    expected = len(LUT_MAGIC) + 1 + DOMAIN_SIZE // 8
    if len(data) != expected or data[: len(LUT_MAGIC)] != LUT_MAGIC:
        raise FormatError(f"{path}: not a skin LUT file (bad magic or length)")
    try:
        rule = RuleKind.from_id(data[len(LUT_MAGIC)])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    table = np.frombuffer(data, dtype=np.uint8, offset=len(LUT_MAGIC) + 1).copy()
    return RuleLut(rule, table)


# --- domain analysis ----------------------------------------------------------


@dataclass(frozen=True)
class ChannelRanges:
    r_min: int = 0
    r_max: int = 0
    g_min: int = 0
    g_max: int = 0
    b_min: int = 0
    b_max: int = 0
    empty: bool = True

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        return (
            f"R:[{self.r_min},{self.r_max}] "
            f"G:[{self.g_min},{self.g_max}] "
            f"B:[{self.b_min},{self.b_max}]"
        )


def channel_ranges(rule: RuleKind | str) -> ChannelRanges:
    """Per-channel extent of the skin region, by exhaustive enumeration."""
    cube = domain_mask(rule).reshape(256, 256, 256)
    if not cube.any():
        return ChannelRanges()
    bounds = []
    for axes in ((1, 2), (0, 2), (0, 1)):
        present = np.flatnonzero(cube.any(axis=axes))
        bounds += [int(present[0]), int(present[-1])]
    return ChannelRanges(*bounds, empty=False)
