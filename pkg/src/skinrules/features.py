"""Chromaticity ratio features and their histograms.

The two features are ``(R - G) / (R + G)`` and ``B / (R + G)``.  Both are
rationals with small integer parts, so binning is done exactly: each distinct
(numerator, denominator) pair is binned once with ``Fraction`` arithmetic and
the counts are scattered back.  Floating edges never misplace a value that
sits exactly on a bin boundary.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .dataset import records_to_array
from .errors import EmptyHistogramError, FormatError, InputError, ParameterError


class FeatureKind(enum.Enum):
    RG_RATIO = "rg-ratio"
    B_RATIO = "b-ratio"

    @classmethod
    def parse(cls, name: "str | FeatureKind") -> "FeatureKind":
        if isinstance(name, FeatureKind):
            return name
        try:
            return cls(name.strip().lower().replace("_", "-"))
        except ValueError:
            raise ValueError(f"unknown feature {name!r} (expected rg-ratio or b-ratio)") from None


# bins, lo, hi used when the caller gives none
DEFAULT_RANGES = {
    FeatureKind.RG_RATIO: (256, -1.0, 1.0),
    FeatureKind.B_RATIO: (256, 0.0, 2.0),
}

CLASS_FILTERS = ("skin", "non_skin", "all")


def compute_features(p) -> tuple[float, float] | None:
    """Return ``(rg_ratio, b_ratio)`` or ``None`` when ``R + G == 0``."""
    r, g, b = (int(c) for c in p)
    s = r + g
    if s == 0:
        return None
    return (r - g) / s, b / s


def _feature_terms(arr: np.ndarray, feature: FeatureKind):
    r = arr[:, 0].astype(np.int64)
    g = arr[:, 1].astype(np.int64)
    b = arr[:, 2].astype(np.int64)
    num = r - g if feature is FeatureKind.RG_RATIO else b
    return num, r + g


def _exact(x) -> Fraction:
    # str() keeps decimal literals like 0.1 exact instead of their binary value
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class FeatureHistogram:
    feature: FeatureKind
    lo: Fraction
    hi: Fraction
    bin_count: int
    counts: tuple[int, ...]
    undefined_count: int = 0
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts) + self.undefined_count + self.underflow + self.overflow

    @property
    def in_range(self) -> int:
        return sum(self.counts)

    def edge(self, i: int) -> Fraction:
        return self.lo + (self.hi - self.lo) * i / self.bin_count

    def edges(self) -> list[Fraction]:
        return [self.edge(i) for i in range(self.bin_count + 1)]

    def __add__(self, other: "FeatureHistogram") -> "FeatureHistogram":
        if (self.feature, self.lo, self.hi, self.bin_count) != (
            other.feature, other.lo, other.hi, other.bin_count,
        ):
            raise ValueError("cannot merge histograms with different binning")
        return FeatureHistogram(
            self.feature, self.lo, self.hi, self.bin_count,
            tuple(a + b for a, b in zip(self.counts, other.counts)),
            self.undefined_count + other.undefined_count,
            self.underflow + other.underflow,
            self.overflow + other.overflow,
        )


def build_histogram(
    records,
    feature: FeatureKind | str,
    bins: int | None = None,
    lo=None,
    hi=None,
    class_filter: str = "all",
) -> FeatureHistogram:
    """Uniform histogram of one ratio feature.

    A value ``v`` lands in bin ``floor((v - lo) / width)``; ``v == hi`` goes
    to the last bin, values below ``lo`` to ``underflow`` and above ``hi`` to
    ``overflow``.  Records with ``R + G == 0`` are counted as undefined.
    Records rejected by ``class_filter`` are not counted at all.
    """
    feature = FeatureKind.parse(feature)
    d_bins, d_lo, d_hi = DEFAULT_RANGES[feature]
    bins = d_bins if bins is None else bins
    lo = _exact(d_lo if lo is None else lo)
    hi = _exact(d_hi if hi is None else hi)
    if not isinstance(bins, (int, np.integer)) or bins < 1:
        raise ParameterError(f"bins must be a positive integer, got {bins!r}")
    if lo >= hi:
        raise ParameterError(f"histogram range needs lo < hi, got [{lo}, {hi}]")
    class_filter = class_filter.replace("-", "_")
    if class_filter not in CLASS_FILTERS:
        raise ParameterError(f"class filter must be one of {CLASS_FILTERS}, got {class_filter!r}")

    arr = records_to_array(records)
    if class_filter != "all" and len(arr):
        arr = arr[arr[:, 3] == (1 if class_filter == "skin" else 0)]

    counts = [0] * bins
    undefined = under = over = 0
    if len(arr):
        num, den = _feature_terms(arr, feature)
        defined = den > 0
        undefined = int(np.count_nonzero(~defined))
        # den <= 510 and |num| <= 255, so num*1024 + den is a collision-free key
        keys, freq = np.unique(num[defined] * 1024 + den[defined], return_counts=True)
        width = (hi - lo) / bins
        for key, n in zip(keys.tolist(), freq.tolist()):
            d = key % 1024
            v = Fraction((key - d) // 1024, d)
            if v < lo:
                under += n
            elif v > hi:
                over += n
            else:
                i = min(math.floor((v - lo) / width), bins - 1)
                counts[i] += n
    return FeatureHistogram(feature, lo, hi, bins, tuple(counts), undefined, under, over)


@dataclass(frozen=True)
class ThresholdSuggestion:
    feature: FeatureKind
    lo: Fraction
    hi: Fraction
    coverage: Fraction


def suggest_thresholds(hist: FeatureHistogram, coverage=0.95) -> ThresholdSuggestion:
    """Narrowest run of contiguous bins holding ``coverage`` of the in-range mass.

    Among runs of equal length the one starting lowest wins.  The reported
    interval spans the outer edges of the chosen bins.
    """
    target = _exact(coverage)
    if not 0 < target <= 1:
        raise ParameterError(f"coverage must be in (0, 1], got {coverage}")
    total = hist.in_range
    if total == 0:
        raise EmptyHistogramError(f"{hist.feature.value} histogram has no in-range counts")
    need = target * total
    prefix = np.concatenate([[0], np.cumsum(hist.counts)]).tolist()
    n = hist.bin_count
    for length in range(1, n + 1):
        for start in range(0, n - length + 1):
            mass = prefix[start + length] - prefix[start]
            if mass >= need:
                return ThresholdSuggestion(
                    hist.feature, hist.edge(start), hist.edge(start + length), Fraction(mass, total)
                )
    raise AssertionError("full range always reaches the target")  # pragma: no cover


# --- histogram CSV ------------------------------------------------------------


def _num(x: Fraction) -> str:
    return repr(float(x))


def histogram_to_csv(hist: FeatureHistogram) -> str:
    buf = io.StringIO()
    buf.write("bin_lo,bin_hi,count\n")
    edges = hist.edges()
    for i, count in enumerate(hist.counts):
        buf.write(f"{_num(edges[i])},{_num(edges[i + 1])},{count}\n")
    buf.write(f"# undefined={hist.undefined_count}\n")
    buf.write(f"# underflow={hist.underflow}\n")
    buf.write(f"# overflow={hist.overflow}\n")
    return buf.getvalue()


def write_histogram_csv(hist: FeatureHistogram, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(histogram_to_csv(hist))


def read_histogram_csv(path, feature: FeatureKind | str) -> FeatureHistogram:
    """Parse a histogram CSV back; bin edges are taken as written."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: histogram file not found") from None
    if not lines or lines[0] != "bin_lo,bin_hi,count":
        raise FormatError(f"{path}:1: expected header 'bin_lo,bin_hi,count'")
    edges, counts, aux = [], [], {}
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            if line.startswith("#"):
                key, value = line[1:].strip().split("=")
                aux[key] = int(value)
                continue
            a, b, c = line.split(",")
            if not edges:
                edges.append(Fraction(a))
            edges.append(Fraction(b))
            counts.append(int(c))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: malformed line {line!r}") from None
    if not counts:
        raise FormatError(f"{path}: no bins")
    return FeatureHistogram(
        FeatureKind.parse(feature), edges[0], edges[-1], len(counts), tuple(counts),
        aux.get("undefined", 0), aux.get("underflow", 0), aux.get("overflow", 0),
    )
