"""True/false positive measurement, multi-dataset comparison reports and
rendered classification masks.

Rates are kept as exact ``Fraction`` values; rounding to two-decimal
percentages happens only when a report is rendered.
"""
from __future__ import annotations

import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .dataset import (
    ImageBuffer,
    MaskImage,
    dataset_record_array,
    load_pair,
    pair_dataset,
    record_array,
    records_to_array,
)
from .errors import DatasetWarning, DegenerateClassError, EmptyInputError, SkinError
from .rules import COMPARED_RULES, RuleKind, RuleLut, skin_mask


AVERAGE = "AVERAGE"
REPORT_CSV_COLUMNS = ("rule", "dataset", "tp_pct", "fp_pct", "n_pos", "n_neg", "i_pos", "i_neg")


@dataclass(frozen=True)
class EvalResult:
    """Confusion counts for one rule over one record set.

    ``i_pos`` counts skin records detected as skin and ``i_neg`` non-skin
    records detected as skin.
    """

    n_pos: int = 0
    n_neg: int = 0
    i_pos: int = 0
    i_neg: int = 0

    def __post_init__(self):
        if not (0 <= self.i_pos <= self.n_pos and 0 <= self.i_neg <= self.n_neg):
            raise ValueError(f"inconsistent confusion counts {self}")

    def __add__(self, other: "EvalResult") -> "EvalResult":
        return EvalResult(
            self.n_pos + other.n_pos,
            self.n_neg + other.n_neg,
            self.i_pos + other.i_pos,
            self.i_neg + other.i_neg,
        )

    @property
    def total(self) -> int:
        return self.n_pos + self.n_neg

    @property
    def tp_rate(self) -> Fraction:
        if self.n_pos == 0:
            raise DegenerateClassError("true positive rate undefined: no skin-labelled records")
        return Fraction(self.i_pos, self.n_pos)

    @property
    def fp_rate(self) -> Fraction:
        if self.n_neg == 0:
            raise DegenerateClassError("false positive rate undefined: no non-skin-labelled records")
        return Fraction(self.i_neg, self.n_neg)

    def check(self) -> "EvalResult":
        if self.total == 0:
            raise EmptyInputError("no records to evaluate")
        self.tp_rate, self.fp_rate
        return self


def _detect(rule: RuleKind | str, rgb: np.ndarray, lut: RuleLut | None) -> np.ndarray:
    if lut is not None:
        if lut.rule is not RuleKind.parse(rule):
            raise ValueError(f"LUT was built for {lut.rule.value}, not {RuleKind.parse(rule).value}")
        return lut.lookup_array(rgb)
    return skin_mask(rule, rgb)


def count_confusion(rule: RuleKind | str, records, lut: RuleLut | None = None) -> EvalResult:
    """Raw confusion counts; never raises for empty or one-class input."""
    arr = records_to_array(records)
    if len(arr) == 0:
        return EvalResult()
    detected = _detect(rule, arr[:, :3], lut)
    is_skin = arr[:, 3] == 1
    n_pos = int(np.count_nonzero(is_skin))
    i_pos = int(np.count_nonzero(detected & is_skin))
    i_neg = int(np.count_nonzero(detected & ~is_skin))
    return EvalResult(n_pos, len(arr) - n_pos, i_pos, i_neg)


def evaluate_records(rule: RuleKind | str, records, lut: RuleLut | None = None) -> EvalResult:
    """Score ``rule`` against labelled records.

    Raises ``EmptyInputError`` for no records and ``DegenerateClassError``
    when either ground-truth class is absent.
    """
    return count_confusion(rule, records, lut).check()


def evaluate_dataset(
    rule: RuleKind | str,
    root,
    mask_mode: str = "strict",
    workers: int = 1,
    lut: RuleLut | None = None,
) -> EvalResult:
    pairs = pair_dataset(root)

    def score(pair):
        image, mask = load_pair(pair, mask_mode)
        return count_confusion(rule, record_array(image, mask), lut)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(score, pairs))
    else:
        parts = [score(p) for p in pairs]
    return sum(parts, EvalResult()).check()


# --- reports ------------------------------------------------------------------


def average_rates(rates: Iterable[Fraction]) -> Fraction:
    """Unweighted arithmetic mean, exact."""
    rates = [Fraction(r) for r in rates]
    if not rates:
        raise ValueError("cannot average an empty list of rates")
    return sum(rates, Fraction(0)) / len(rates)


def format_pct(rate: Fraction) -> str:
    """Render a rate as a percentage with two decimals, rounding half up."""
    hundredths = Fraction(rate) * 10000
    n = (hundredths.numerator * 2 + hundredths.denominator) // (hundredths.denominator * 2)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // 100}.{n % 100:02d}"


@dataclass
class ReportTable:
    rules: list[RuleKind]
    datasets: list[str]
    cells: dict[tuple[RuleKind, str], EvalResult] = field(default_factory=dict)
    failures: dict[tuple[RuleKind, str], str] = field(default_factory=dict)

    def cell(self, rule: RuleKind, dataset: str) -> EvalResult | None:
        return self.cells.get((rule, dataset))

    def averages(self) -> dict[RuleKind, tuple[Fraction, Fraction] | None]:
        out = {}
        for rule in self.rules:
            ok = [self.cells[(rule, d)] for d in self.datasets if (rule, d) in self.cells]
            if not ok:
                out[rule] = None
                continue
            out[rule] = (
                average_rates(c.tp_rate for c in ok),
                average_rates(c.fp_rate for c in ok),
            )
        return out

    def best_tp_rule(self) -> RuleKind | None:
        scored = [(avg[0], rule) for rule, avg in self.averages().items() if avg is not None]
        if not scored:
            return None
        best = max(r for r, _ in scored)
        return next(rule for r, rule in scored if r == best)


def compare(
    rules: Sequence[RuleKind | str] = COMPARED_RULES,
    datasets: Sequence[tuple[str, object]] = (),
    mask_mode: str = "strict",
) -> ReportTable:
    """Evaluate every rule on every named dataset.

    Each dataset is loaded once.  A cell that cannot be scored is recorded in
    ``failures`` and left out of that rule's average.
    """
    rules = [RuleKind.parse(r) for r in rules]
    if not rules:
        raise ValueError("compare needs at least one rule")
    if not datasets:
        raise ValueError("compare needs at least one dataset")
    names = [name for name, _ in datasets]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate dataset names in {names}")
    table = ReportTable(rules, names)
    for name, root in datasets:
        try:
            records = dataset_record_array(root, mask_mode)
        except SkinError as exc:
            for rule in rules:
                table.failures[(rule, name)] = str(exc)
            warnings.warn(f"dataset {name}: {exc}", DatasetWarning, stacklevel=2)
            continue
        for rule in rules:
            try:
                table.cells[(rule, name)] = evaluate_records(rule, records)
            except SkinError as exc:
                table.failures[(rule, name)] = str(exc)
                warnings.warn(f"{rule.value} on {name}: {exc}; excluded from average", DatasetWarning, stacklevel=2)
    return table


def render_text(table: ReportTable) -> str:
    rule_w = max(16, max(len(r.value) for r in table.rules) + 2)
    col_w = max(8, max(len(d) for d in table.datasets + [AVERAGE]) // 2 + 2)
    groups = table.datasets + [AVERAGE]
    lines = [
        "Rule".ljust(rule_w) + "".join(g.ljust(2 * col_w) for g in groups).rstrip(),
        "".ljust(rule_w) + ("TP".ljust(col_w) + "FP".ljust(col_w)) * len(groups),
    ]
    averages = table.averages()
    for rule in table.rules:
        row = rule.value.ljust(rule_w)
        for d in table.datasets:
            c = table.cell(rule, d)
            pair = (format_pct(c.tp_rate), format_pct(c.fp_rate)) if c else ("n/a", "n/a")
            row += pair[0].ljust(col_w) + pair[1].ljust(col_w)
        avg = averages[rule]
        pair = (format_pct(avg[0]), format_pct(avg[1])) if avg else ("n/a", "n/a")
        row += pair[0].ljust(col_w) + pair[1]
        lines.append(row)
    lines = [line.rstrip() for line in lines]
    for (rule, d), msg in table.failures.items():
        lines.append(f"! {rule.value} on {d}: {msg}")
    best = table.best_tp_rule()
    if best is not None and len(table.rules) > 1:
        lines.append(f"Highest average TP: {best.value} ({format_pct(averages[best][0])})")
    return "\n".join(lines) + "\n"


def _csv_row(rule: RuleKind, dataset: str, c: EvalResult | None) -> str:
    if c is None:
        return f"{rule.value},{dataset},,,,,,"
    return (
        f"{rule.value},{dataset},{format_pct(c.tp_rate)},{format_pct(c.fp_rate)},"
        f"{c.n_pos},{c.n_neg},{c.i_pos},{c.i_neg}"
    )


def render_csv(table: ReportTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(REPORT_CSV_COLUMNS) + "\n")
    averages = table.averages()
    for rule in table.rules:
        for d in table.datasets:
            buf.write(_csv_row(rule, d, table.cell(rule, d)) + "\n")
        avg = averages[rule]
        tp, fp = (format_pct(avg[0]), format_pct(avg[1])) if avg else ("", "")
        buf.write(f"{rule.value},{AVERAGE},{tp},{fp},,,,\n")
    return buf.getvalue()


def render_result_text(rule: RuleKind, dataset: str, c: EvalResult) -> str:
    return (
        f"rule: {rule.value}\n"
        f"dataset: {dataset}\n"
        f"n_pos: {c.n_pos}\n"
        f"n_neg: {c.n_neg}\n"
        f"i_pos: {c.i_pos}\n"
        f"i_neg: {c.i_neg}\n"
        f"tp_pct: {format_pct(c.tp_rate)}\n"
        f"fp_pct: {format_pct(c.fp_rate)}\n"
    )


def render_result_csv(rule: RuleKind, dataset: str, c: EvalResult) -> str:
    return ",".join(REPORT_CSV_COLUMNS) + "\n" + _csv_row(rule, dataset, c) + "\n"


# --- qualitative output -------------------------------------------------------


def render_mask(rule: RuleKind | str, image: ImageBuffer, lut: RuleLut | None = None) -> MaskImage:
    return MaskImage(_detect(rule, image.pixels, lut))


def mask_to_rgb(mask: MaskImage) -> np.ndarray:
    rgb = np.zeros(mask.labels.shape + (3,), dtype=np.uint8)
    rgb[mask.labels] = 255
    return rgb


def save_mask(mask: MaskImage, path) -> None:
    """Write a mask as an RGB PNG, skin white and everything else black."""
    Image.fromarray(mask_to_rgb(mask), mode="RGB").save(Path(path), format="PNG")
