"""``skinrules`` command line.

Exit status: 0 on success, 1 on usage errors, 2 on data or format errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import dataset, evaluation, features, rules
from .errors import SkinError
from .rules import COMPARED_RULES, RuleKind

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rule(value: str) -> RuleKind:
    try:
        return RuleKind.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rule_list(value: str) -> list[RuleKind]:
    return [_rule(v) for v in value.split(",") if v.strip()]


def _named_datasets(value: str) -> list[tuple[str, str]]:
    out = []
    for item in value.split(","):
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise argparse.ArgumentTypeError(f"expected NAME=DIR, got {item!r}")
        out.append((name, path))
    return out


def _positive_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skinrules", description="Explicit RGB skin-colour rules and their evaluation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="render a white/black skin mask for one image")
    p.add_argument("--rule", type=_rule, required=True)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--lut", action="store_true", help="classify through a precomputed lookup table")

    p = sub.add_parser("evaluate", help="TP/FP rates of one rule on a dataset")
    p.add_argument("--rule", type=_rule, required=True)
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--mask-mode", choices=dataset.MASK_MODES, default="strict")
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("compare", help="rules x datasets TP/FP table")
    p.add_argument("--rules", type=_rule_list, default=list(COMPARED_RULES))
    p.add_argument("--datasets", type=_named_datasets, required=True)
    p.add_argument("--mask-mode", choices=dataset.MASK_MODES, default="strict")
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("transform", help="flatten a dataset into labelled R,G,B records")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)

    p = sub.add_parser("histogram", help="histogram of a ratio feature over records")
    p.add_argument("--records", required=True, type=Path)
    p.add_argument("--feature", required=True, choices=[f.value for f in features.FeatureKind])
    p.add_argument("--bins", type=_positive_int)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--class", dest="class_filter", choices=("skin", "non-skin", "all"), default="skin")
    p.add_argument("--output", required=True, type=Path)

    p = sub.add_parser("ranges", help="per-channel extent of a rule's skin region")
    p.add_argument("--rule", type=_rule, required=True)
    return parser


def _cmd_classify(args, out) -> None:
    image = dataset.load_image(args.input)
    lut = rules.build_lut(args.rule) if args.lut else None
    mask = evaluation.render_mask(args.rule, image, lut)
    try:
        evaluation.save_mask(mask, args.output)
    except OSError as exc:
        raise SkinError(f"{args.output}: cannot write mask: {exc}") from None
    print(f"{args.output}: {mask.skin_count()} of {mask.labels.size} pixels classified as skin", file=out)


def _cmd_evaluate(args, out) -> None:
    result = evaluation.evaluate_dataset(args.rule, args.dataset, args.mask_mode)
    render = evaluation.render_result_csv if args.format == "csv" else evaluation.render_result_text
    out.write(render(args.rule, args.dataset.name or str(args.dataset), result))


def _cmd_compare(args, out) -> None:
    if not args.rules:
        raise UsageError("skinrules compare: --rules is empty")
    table = evaluation.compare(args.rules, args.datasets, args.mask_mode)
    out.write(evaluation.render_csv(table) if args.format == "csv" else evaluation.render_text(table))
    if not table.cells:
        raise SkinError("no cell of the comparison could be evaluated")


def _cmd_transform(args, out) -> None:
    records = dataset.dataset_record_array(args.dataset)
    try:
        dataset.write_records_csv(records, args.output)
    except OSError as exc:
        raise SkinError(f"{args.output}: cannot write records: {exc}") from None
    print(f"{args.output}: {len(records)} records", file=out)


def _cmd_histogram(args, out) -> None:
    records = dataset.read_records_csv(args.records)
    try:
        hist = features.build_histogram(
            records, args.feature, args.bins, args.lo, args.hi, args.class_filter
        )
    except SkinError as exc:
        raise UsageError(f"skinrules histogram: {exc}") from None
    try:
        features.write_histogram_csv(hist, args.output)
    except OSError as exc:
        raise SkinError(f"{args.output}: cannot write histogram: {exc}") from None
    print(
        f"{args.output}: {hist.in_range} in range, {hist.undefined_count} undefined, "
        f"{hist.underflow} underflow, {hist.overflow} overflow",
        file=out,
    )


def _cmd_ranges(args, out) -> None:
    print(rules.channel_ranges(args.rule), file=out)


COMMANDS = {
    "classify": _cmd_classify,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "transform": _cmd_transform,
    "histogram": _cmd_histogram,
    "ranges": _cmd_ranges,
}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](args, out)
            status = EXIT_OK
        except UsageError as exc:
            print(exc, file=err)
            status = EXIT_USAGE
        except SkinError as exc:
            print(f"skinrules {args.command}: error: {exc}", file=err)
            status = EXIT_DATA
    for w in caught:
        print(f"skinrules {args.command}: warning: {w.message}", file=err)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
