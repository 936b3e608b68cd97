"""Experiment harness: deterministic splits, accuracy tables, reports.

Runs a recognition experiment from a manifest: train on the first k
variants of each subject, classify every held-out image in the requested
modes, and tabulate percent accuracy per (split, mode, landmark scheme).
The text report mirrors the usual layout: one row per split, one column
for the plain eigenface baseline and one per landmark scheme.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import dataset_io, eigenface, recognizer
from .dataset_io import DatasetFormatError
from .recognizer import atomic_write_text

DEFAULT_K = 25

REPORT_FORMATS = ("text", "csv")


@dataclass(frozen=True)
class ExperimentConfig:
    manifest_path: str
    train_variants: int
    k: int = DEFAULT_K
    modes: tuple[str, ...] = ("pca_only", "dt_pca")
    dt_divisor: float = recognizer.DEFAULT_DT_DIVISOR
    landmark_scheme_label: str = ""

    def __post_init__(self):
        if self.train_variants < 1:
            raise ValueError("train_variants must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.dt_divisor <= 0:
            raise ValueError("dt_divisor must be positive")
        bad = [m for m in self.modes if m not in recognizer.MODES]
        if bad or not self.modes:
            raise ValueError(f"modes must be a non-empty subset of {recognizer.MODES}")


@dataclass(frozen=True)
class AccuracyRow:
    train_count: int
    test_count: int
    mode: str
    scheme: str
    correct: int
    total: int
    percent: float


@dataclass(frozen=True)
class AccuracyTable:
    rows: tuple[AccuracyRow, ...]

    def merged(self, *others: "AccuracyTable") -> "AccuracyTable":
        rows = list(self.rows)
        for other in others:
            rows.extend(other.rows)
        return AccuracyTable(rows=tuple(rows))


def accuracy(correct: int, total: int) -> float:
    """Percent accuracy, half-up rounded to 1 decimal (exact rational)."""
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= correct <= total:
        raise ValueError(f"correct={correct} outside [0, {total}]")
    tenths = Fraction(1000 * correct, total) + Fraction(1, 2)
    return (tenths.numerator // tenths.denominator) / 10


def load_image_checked(path, expected_dims=None):
    try:
        img = dataset_io.load_image(path)
    except FileNotFoundError:
        raise DatasetFormatError(f"{path}: image file not found") from None
    if expected_dims is not None and (img.width, img.height) != expected_dims:
        raise DatasetFormatError(
            f"{path}: image is {img.width}x{img.height}, expected "
            f"{expected_dims[0]}x{expected_dims[1]}"
        )
    return img


def load_landmarks_checked(path):
    try:
        return dataset_io.load_landmarks(path)
    except FileNotFoundError:
        raise DatasetFormatError(f"{path}: landmark file not found") from None


def run_experiment(config: ExperimentConfig) -> AccuracyTable:
    """Train on the deterministic split and classify every test image.

    A prediction is correct when the matched entry's subject id equals the
    test image's subject id.  In pca_only mode no landmark file is read.
    """
    manifest = dataset_io.load_manifest(config.manifest_path)
    train_m, test_m = dataset_io.split_dataset(manifest, config.train_variants)
    need_dt = "dt_pca" in config.modes

    train_images = []
    dims = None
    for e in train_m.entries:
        img = load_image_checked(e.image_path, dims)
        dims = (img.width, img.height)
        train_images.append(img)

    model = eigenface.fit_eigenmodel(train_images, config.k)
    records = []
    scheme_label = config.landmark_scheme_label
    for e, img in zip(train_m.entries, train_images):
        landmarks = load_landmarks_checked(e.landmark_path) if need_dt else None
        records.append(
            recognizer.TrainingRecord(
                image=img,
                landmarks=landmarks,
                subject_id=e.subject_id,
                variant=e.variant,
                source_path=str(e.image_path),
            )
        )
    gallery = recognizer.build_gallery(model, records)
    if need_dt and not scheme_label:
        scheme_label = str(gallery.scheme)

    test_images = [load_image_checked(e.image_path, dims) for e in test_m.entries]
    test_landmarks = [
        load_landmarks_checked(e.landmark_path) if need_dt else None
        for e in test_m.entries
    ]

    rows = []
    for mode in config.modes:
        correct = 0
        for e, img, lmk in zip(test_m.entries, test_images, test_landmarks):
            try:
                report = recognizer.recognize(
                    gallery,
                    model,
                    img,
                    lmk if mode == "dt_pca" else None,
                    mode=mode,
                    dt_divisor=config.dt_divisor,
                )
            except ValueError as exc:
                raise DatasetFormatError(f"{e.landmark_path}: {exc}") from None
            if report.best_subject == e.subject_id:
                correct += 1
        total = len(test_m.entries)
        rows.append(
            AccuracyRow(
                train_count=len(train_m.entries),
                test_count=total,
                mode=mode,
                scheme=scheme_label if mode == "dt_pca" else "",
                correct=correct,
                total=total,
                percent=accuracy(correct, total),
            )
        )
    return AccuracyTable(rows=tuple(rows))


def render_text_report(table: AccuracyTable) -> str:
    """Aligned table: one row per split, columns for the plain-eigenface
    baseline and each landmark scheme present ("<scheme>-L").
    """
    if not table.rows:
        raise ValueError("empty accuracy table")
    splits: list[tuple[int, int]] = []
    schemes: list[str] = []
    has_pca = False
    for row in table.rows:
        key = (row.train_count, row.test_count)
        if key not in splits:
            splits.append(key)
        if row.mode == "pca_only":
            has_pca = True
        elif row.scheme not in schemes:
            schemes.append(row.scheme)

    columns = (["Traditional PCA"] if has_pca else []) + [f"{s}-L" for s in schemes]
    cells = {}
    for row in table.rows:
        col = "Traditional PCA" if row.mode == "pca_only" else f"{row.scheme}-L"
        cells[((row.train_count, row.test_count), col)] = f"{row.percent:.1f} %"

    label_width = max(len(_split_label_for(t, e)) for t, e in splits)
    col_widths = [
        max(len(c), *(len(cells.get((s, c), "")) for s in splits)) for c in columns
    ]
    out = io.StringIO()
    out.write(" " * label_width)
    for c, w in zip(columns, col_widths):
        out.write("  " + c.rjust(w))
    out.write("\n")
    for s in splits:
        out.write(_split_label_for(*s).ljust(label_width))
        for c, w in zip(columns, col_widths):
            out.write("  " + cells.get((s, c), "-").rjust(w))
        out.write("\n")
    return out.getvalue()


def _split_label_for(train_count: int, test_count: int) -> str:
    return f"Train – {train_count} Test – {test_count}"


def render_csv_report(table: AccuracyTable) -> str:
    """Machine-readable report: split,mode,scheme,correct,total,percent."""
    if not table.rows:
        raise ValueError("empty accuracy table")
    lines = ["split,mode,scheme,correct,total,percent"]
    for row in table.rows:
        lines.append(
            f"{row.train_count}/{row.test_count},{row.mode},{row.scheme},"
            f"{row.correct},{row.total},{row.percent:.1f}"
        )
    return "\n".join(lines) + "\n"


def emit_report(table: AccuracyTable, format: str, path=None) -> str:
    """Render the table and write it to `path` (atomic) or stdout."""
    if format not in REPORT_FORMATS:
        raise ValueError(f"format must be one of {REPORT_FORMATS}, got {format!r}")
    text = render_text_report(table) if format == "text" else render_csv_report(table)
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)
    return text
