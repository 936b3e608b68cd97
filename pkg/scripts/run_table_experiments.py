#!/usr/bin/env python3
"""Run the three-split recognition experiments and print the summary table.

For every train-variant count, the plain eigenface baseline is evaluated
once and the fused mode once per landmark scheme; the merged table has one
row per split and one column per scheme.

Example (synthetic demo):
    python scripts/make_synthetic_dataset.py --out data/synth
    python scripts/run_table_experiments.py \
        --manifest 68=data/synth/manifest_68.csv \
        --manifest 79=data/synth/manifest_79.csv \
        --manifest 194=data/synth/manifest_194.csv \
        --train-variants 7,5,3 --report text
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dtpca import evalharness  # noqa: E402
from dtpca.evalharness import ExperimentConfig  # noqa: E402


def run_table(manifests, train_variant_list, k, dt_divisor):
    """manifests: ordered (scheme_label, manifest_path) pairs."""
    tables = []
    for tv in train_variant_list:
        for i, (label, manifest) in enumerate(manifests):
            modes = ("pca_only", "dt_pca") if i == 0 else ("dt_pca",)
            config = ExperimentConfig(
                manifest_path=str(manifest),
                train_variants=tv,
                k=k,
                modes=modes,
                dt_divisor=dt_divisor,
                landmark_scheme_label=label,
            )
            tables.append(evalharness.run_experiment(config))
    return tables[0].merged(*tables[1:])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--manifest",
        action="append",
        required=True,
        metavar="SCHEME=PATH",
        help="landmark scheme label and manifest path; repeatable",
    )
    parser.add_argument(
        "--train-variants", default="7,5,3", help="comma-separated split sizes"
    )
    parser.add_argument("--k", type=int, default=evalharness.DEFAULT_K)
    parser.add_argument("--dt-divisor", type=float, default=0.001)
    parser.add_argument("--report", choices=("text", "csv"), default="text")
    parser.add_argument("--out", help="report path (default: stdout)")
    args = parser.parse_args()

    manifests = []
    for item in args.manifest:
        label, _, path = item.partition("=")
        if not path:
            parser.error(f"--manifest must be SCHEME=PATH, got {item!r}")
        manifests.append((label, path))
    train_variants = [int(v) for v in args.train_variants.split(",")]

    table = run_table(manifests, train_variants, args.k, args.dt_divisor)
    evalharness.emit_report(table, args.report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
