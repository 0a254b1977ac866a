#!/usr/bin/env python3
"""Regenerate the committed test fixtures.

Run from the repository root:

    python3 tools/make_fixture.py

Writes tests/fixtures/generator_small.ggw (random-weight generator, seed 11)
and tests/fixtures/digits/ (synthetic labeled image set, seed 11). Tests
treat the committed files as the source of truth; this script only exists
so they can be rebuilt or varied deliberately.
"""

from pathlib import Path

from speckle_cs.dataset import STANDARD_FILES, save_idx_images, save_idx_labels
from speckle_cs.fixtures import random_generator_model, synthetic_digits
from speckle_cs.generator import save_model

FIXTURE_SEED = 11

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = ROOT / "tests" / "fixtures"


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    model = random_generator_model(FIXTURE_SEED, "small")
    target = FIXTURE_DIR / "generator_small.ggw"
    save_model(model, target)
    print(f"wrote {target} ({target.stat().st_size} bytes)")

    digits_dir = FIXTURE_DIR / "digits"
    digits_dir.mkdir(exist_ok=True)
    images, labels = synthetic_digits(FIXTURE_SEED, count=40)
    save_idx_images(digits_dir / STANDARD_FILES["test_images"], images)
    save_idx_labels(digits_dir / STANDARD_FILES["test_labels"], labels)
    print(f"wrote {digits_dir} ({len(labels)} images)")


if __name__ == "__main__":
    main()
