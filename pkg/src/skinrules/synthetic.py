"""Deterministic synthetic datasets whose ground truth is a rule's own output."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .dataset import ImageBuffer
from .evaluation import render_mask, save_mask
from .rules import RuleKind


def synthetic_image(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Uniform colour noise with a few skin-toned rectangles painted on top."""
    pixels = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    for _ in range(4):
        h, w = rng.integers(height // 6, height // 2 + 1), rng.integers(width // 6, width // 2 + 1)
        y, x = rng.integers(0, height - h + 1), rng.integers(0, width - w + 1)
        r = rng.integers(110, 256, size=(h, w))
        g = (r * rng.uniform(0.55, 0.95, size=(h, w))).astype(np.int64)
        b = (g * rng.uniform(0.5, 1.0, size=(h, w))).astype(np.int64)
        pixels[y : y + h, x : x + w] = np.stack([r, g, b], axis=-1).astype(np.uint8)
    return pixels


def make_synthetic_dataset(
    root,
    rule: RuleKind | str = RuleKind.RGB_RATIO,
    n_images: int = 3,
    height: int = 64,
    width: int = 64,
    seed: int = 0,
) -> Path:
    """Write ``root/images/*.png`` and ``root/masks/*.png``; return ``root``."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "masks").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(n_images):
        pixels = synthetic_image(rng, height, width)
        stem = f"synth_{i:03d}"
        Image.fromarray(pixels, mode="RGB").save(root / "images" / f"{stem}.png")
        save_mask(render_mask(rule, ImageBuffer(pixels)), root / "masks" / f"{stem}.png")
    return root
