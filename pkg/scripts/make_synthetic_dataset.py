#!/usr/bin/env python3
"""Generate a deterministic synthetic dataset for demos.

Writes PGM images, landmark CSVs (one directory per scheme), and one
manifest per scheme.  The default layout mirrors the evaluation setup:
15 subjects x 9 variants with 68/79/194-point landmark schemes.

Example:
    python scripts/make_synthetic_dataset.py --out data/synth
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dtpca import synthetic  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="dataset root directory")
    parser.add_argument("--subjects", type=int, default=15)
    parser.add_argument("--variants", type=int, default=9)
    parser.add_argument("--width", type=int, default=16)
    parser.add_argument("--height", type=int, default=12)
    parser.add_argument(
        "--schemes", default="68,79,194", help="comma-separated landmark counts"
    )
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    schemes = tuple(int(s) for s in args.schemes.split(","))
    manifests = synthetic.make_dataset(
        args.out,
        subjects=args.subjects,
        variants=args.variants,
        width=args.width,
        height=args.height,
        schemes=schemes,
        seed=args.seed,
    )
    for scheme, path in manifests.items():
        print(f"scheme {scheme}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
