"""Command-line interface: triangulate, train, recognize, evaluate.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
failure (e.g. a zero-variance training set).  Every failure prints one
line to stderr in the form ``error: <category>: <detail>``.  Output files
are written atomically; nothing is written on failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset_io, eigenface, evalharness, geometry, recognizer
from .dataset_io import DatasetFormatError
from .eigenface import ZeroVarianceError
from .recognizer import GalleryFormatError, atomic_write_text

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_MODE_FLAGS = {"pca-only": "pca_only", "dt-pca": "dt_pca"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dtpca",
        description="Face recognition via eigenfaces fused with a "
        "Delaunay-triangulation area descriptor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("triangulate", help="triangulate a landmark file to JSON")
    p.add_argument("--landmarks", required=True, help="landmark CSV path")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_triangulate)

    p = sub.add_parser("train", help="fit the eigenmodel and build a gallery file")
    p.add_argument("--manifest", required=True, help="training manifest CSV")
    p.add_argument("--k", type=int, default=evalharness.DEFAULT_K,
                   help="eigenvector count to retain (default 25)")
    p.add_argument("--out", required=True, help="gallery file to write")
    p.add_argument("--scheme-dir",
                   help="directory of landmark files overriding the manifest's")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="match one image against a gallery")
    p.add_argument("--gallery", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks")
    p.add_argument("--mode", required=True, choices=sorted(_MODE_FLAGS))
    p.add_argument("--dt-divisor", type=float, default=recognizer.DEFAULT_DT_DIVISOR)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("evaluate", help="run a split experiment and report accuracy")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train-variants", type=int, required=True)
    p.add_argument("--modes", required=True,
                   help="comma-separated: pca-only,dt-pca")
    p.add_argument("--dt-divisor", type=float, default=recognizer.DEFAULT_DT_DIVISOR)
    p.add_argument("--report", required=True, choices=sorted(evalharness.REPORT_FORMATS))
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)
    return parser


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def cmd_triangulate(args) -> int:
    landmarks = dataset_io.load_landmarks(args.landmarks)
    try:
        tri = geometry.delaunay(landmarks)
    except ValueError as exc:
        raise DatasetFormatError(f"{args.landmarks}: {exc}") from None
    _emit(json.dumps(tri.to_dict()) + "\n", args.out)
    return EXIT_OK


def _manifest_with_scheme_dir(manifest, scheme_dir):
    if scheme_dir is None:
        return manifest
    base = Path(scheme_dir)
    entries = tuple(
        dataset_io.ManifestEntry(
            image_path=e.image_path,
            subject_id=e.subject_id,
            variant=e.variant,
            landmark_path=base / e.landmark_path.name,
        )
        for e in manifest.entries
    )
    return dataset_io.DatasetManifest(entries=entries)


def cmd_train(args) -> int:
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    manifest = dataset_io.load_manifest(args.manifest)
    manifest = _manifest_with_scheme_dir(manifest, args.scheme_dir)

    images = []
    dims = None
    for e in manifest.entries:
        img = evalharness.load_image_checked(e.image_path, dims)
        dims = (img.width, img.height)
        images.append(img)
    model = eigenface.fit_eigenmodel(images, args.k)
    records = [
        recognizer.TrainingRecord(
            image=img,
            landmarks=evalharness.load_landmarks_checked(e.landmark_path),
            subject_id=e.subject_id,
            variant=e.variant,
            source_path=str(e.image_path),
        )
        for e, img in zip(manifest.entries, images)
    ]
    gallery = recognizer.build_gallery(model, records)
    recognizer.save_gallery(gallery, model, args.out)
    return EXIT_OK


def cmd_recognize(args) -> int:
    mode = _MODE_FLAGS[args.mode]
    if mode == "dt_pca" and args.landmarks is None:
        raise UsageError("--landmarks is required with --mode dt-pca")
    if args.dt_divisor <= 0:
        raise UsageError(f"--dt-divisor must be positive, got {args.dt_divisor}")
    gallery, model = recognizer.load_gallery(args.gallery)
    image = dataset_io.load_image(args.image)
    landmarks = None
    if mode == "dt_pca":
        landmarks = dataset_io.load_landmarks(args.landmarks)
    report = recognizer.recognize(
        gallery, model, image, landmarks, mode=mode, dt_divisor=args.dt_divisor
    )
    sys.stdout.write(json.dumps(report.to_dict()) + "\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    mode_flags = [m.strip() for m in args.modes.split(",") if m.strip()]
    unknown = [m for m in mode_flags if m not in _MODE_FLAGS]
    if unknown or not mode_flags:
        raise UsageError(
            f"--modes must list pca-only and/or dt-pca, got {args.modes!r}"
        )
    if args.dt_divisor <= 0:
        raise UsageError(f"--dt-divisor must be positive, got {args.dt_divisor}")
    manifest = dataset_io.load_manifest(args.manifest)
    per_subject = {
        len(v) for v in manifest.entries_by_subject().values()
    }
    variants = per_subject.pop() if len(per_subject) == 1 else 0
    if not 1 <= args.train_variants < variants:
        raise UsageError(
            f"--train-variants {args.train_variants} leaves no test images "
            f"(subjects have {variants} variants)"
        )
    config = evalharness.ExperimentConfig(
        manifest_path=args.manifest,
        train_variants=args.train_variants,
        modes=tuple(_MODE_FLAGS[m] for m in mode_flags),
        dt_divisor=args.dt_divisor,
    )
    table = evalharness.run_experiment(config)
    text = evalharness.render_text_report(table) if args.report == "text" \
        else evalharness.render_csv_report(table)
    _emit(text, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroVarianceError as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DatasetFormatError, GalleryFormatError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
