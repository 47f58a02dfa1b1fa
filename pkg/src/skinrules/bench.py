"""LUT classification throughput.

    python -m skinrules.bench --rule rgb-ratio --pixels 100000000
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from .rules import RuleKind, build_lut, classify, skin_mask


@dataclass
class BenchResult:
    rule: RuleKind
    pixels: int
    seconds: float
    skin: int
    sample_size: int
    sample_mismatches: int

    @property
    def pixels_per_second(self) -> float:
        return self.pixels / self.seconds if self.seconds > 0 else float("inf")

    def __str__(self) -> str:
        return (
            f"rule={self.rule.value} pixels={self.pixels} seconds={self.seconds:.3f} "
            f"pixels_per_second={self.pixels_per_second:.4g} skin={self.skin} "
            f"sample={self.sample_size} mismatches={self.sample_mismatches}"
        )


def run_benchmark(
    rule: RuleKind | str = RuleKind.RGB_RATIO,
    pixels: int = 10**8,
    chunk: int = 10**7,
    sample: int = 10**6,
    seed: int = 0,
) -> BenchResult:
    rule = RuleKind.parse(rule)
    rng = np.random.default_rng(seed)
    lut = build_lut(rule)
    lut.dense  # unpack outside the timed loop

    # sample check: LUT vs vectorised rule on the whole sample, scalar rule on a slice
    probe = rng.integers(0, 256, size=(sample, 3), dtype=np.uint8)
    via_lut = lut.lookup_array(probe)
    mismatches = int(np.count_nonzero(via_lut != skin_mask(rule, probe)))
    for p, flag in zip(probe[:10_000].tolist(), via_lut[:10_000].tolist()):
        mismatches += int(bool(classify(rule, p)) != flag)

    block = rng.integers(0, 256, size=(min(chunk, pixels), 3), dtype=np.uint8)
    done = skin = 0
    start = time.perf_counter()
    while done < pixels:
        n = min(len(block), pixels - done)
        skin += int(np.count_nonzero(lut.lookup_array(block[:n])))
        done += n
    seconds = time.perf_counter() - start
    return BenchResult(rule, done, seconds, skin, sample, mismatches)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rule", default="rgb-ratio")
    parser.add_argument("--pixels", type=int, default=10**8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    print(run_benchmark(args.rule, args.pixels, seed=args.seed))


if __name__ == "__main__":
    main()
