"""Gallery construction and fused nearest-match scoring.

Each training image is stored as its eigenspace coordinates plus the
average relative area of its landmark triangulation.  A test image is
scored against every entry: ED is the eigenspace Euclidean distance, D the
absolute difference of average relative areas, and the resultant value
RV = ED + D / divisor (divisor defaults to 0.001).  The match is the entry
with the smallest RV; ties break toward the lowest gallery index.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import eigenface, geometry
from .dataset_io import ImageVector, LandmarkSet
from .eigenface import EigenCoords, EigenModel

DEFAULT_DT_DIVISOR = 0.001

MODES = ("pca_only", "dt_pca")

GALLERY_FORMAT_VERSION = 1


class GalleryFormatError(ValueError):
    """A gallery file exists but cannot be parsed as a valid gallery."""


@dataclass(frozen=True)
class TrainingRecord:
    """One training image with its landmarks and identity labels."""

    image: ImageVector
    landmarks: LandmarkSet | None
    subject_id: str
    variant: str
    source_path: str = ""


@dataclass(frozen=True)
class GalleryEntry:
    subject_id: str
    variant: str
    coords: EigenCoords
    ra_avg: float | None
    source_path: str


@dataclass(frozen=True)
class Gallery:
    """Match database: one entry per training image.

    scheme is the landmark count shared by every entry, or None when the
    gallery was built without landmarks (usable in pca_only mode only).
    """

    scheme: int | None
    entries: tuple[GalleryEntry, ...]


@dataclass(frozen=True)
class EntryScore:
    ed: float
    d: float
    rv: float


@dataclass(frozen=True)
class MatchReport:
    best_index: int
    best_subject: str
    scores: tuple[EntryScore, ...]
    mode: str
    dt_divisor: float

    def to_dict(self) -> dict:
        return {
            "best": {"index": self.best_index, "subject": self.best_subject},
            "mode": self.mode,
            "dt_divisor": self.dt_divisor,
            "scores": [
                {"ed": s.ed, "d": s.d, "rv": s.rv} for s in self.scores
            ],
        }


def build_gallery(model: EigenModel, train) -> Gallery:
    """Project every training record and triangulate its landmarks.

    Records without landmarks produce entries with ra_avg None; such a
    gallery only supports pca_only matching.  All records must either have
    landmarks with one common scheme, or none at all.
    """
    records = list(train)
    if not records:
        raise ValueError("empty training set")
    schemes = {r.landmarks.scheme for r in records if r.landmarks is not None}
    if len(schemes) > 1:
        raise ValueError(f"mixed landmark schemes in training set: {sorted(schemes)}")
    if schemes and any(r.landmarks is None for r in records):
        raise ValueError("some training records are missing landmarks")
    entries = []
    for rec in records:
        coords = eigenface.project(model, rec.image)
        ra_avg = None
        if rec.landmarks is not None:
            try:
                ra_avg = geometry.delaunay(rec.landmarks).average_relative_area
            except ValueError as exc:
                where = rec.source_path or f"{rec.subject_id}/{rec.variant}"
                raise ValueError(f"{where}: {exc}") from None
        entries.append(
            GalleryEntry(
                subject_id=rec.subject_id,
                variant=rec.variant,
                coords=coords,
                ra_avg=ra_avg,
                source_path=rec.source_path,
            )
        )
    return Gallery(scheme=schemes.pop() if schemes else None, entries=tuple(entries))


def dt_difference(tt_avg: float, tn_avg: float) -> float:
    """Positive difference of two average relative areas."""
    return abs(tt_avg - tn_avg)


def fused_score(ed: float, d: float, dt_divisor: float = DEFAULT_DT_DIVISOR) -> float:
    """Resultant value RV = ED + D / dt_divisor."""
    if dt_divisor <= 0:
        raise ValueError(f"dt_divisor must be positive, got {dt_divisor}")
    return ed + d / dt_divisor


def recognize(
    gallery: Gallery,
    model: EigenModel,
    test_image: ImageVector,
    test_landmarks: LandmarkSet | None = None,
    mode: str = "dt_pca",
    dt_divisor: float = DEFAULT_DT_DIVISOR,
) -> MatchReport:
    """Score a test image against every gallery entry and pick the argmin RV.

    In pca_only mode landmarks are ignored and D is reported as 0, so RV
    equals ED.  In dt_pca mode the test landmarks are required and their
    scheme must equal the gallery's.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if dt_divisor <= 0:
        raise ValueError(f"dt_divisor must be positive, got {dt_divisor}")
    if not gallery.entries:
        raise ValueError("empty gallery")

    tt_avg = None
    if mode == "dt_pca":
        if test_landmarks is None:
            raise ValueError("dt_pca mode requires test landmarks")
        if gallery.scheme is None:
            raise ValueError("gallery was built without landmarks; use pca_only")
        if test_landmarks.scheme != gallery.scheme:
            raise ValueError(
                f"landmark scheme mismatch: test {test_landmarks.scheme} "
                f"vs gallery {gallery.scheme}"
            )
        tt_avg = geometry.delaunay(test_landmarks).average_relative_area

    coords = eigenface.project(model, test_image)
    scores = []
    for entry in gallery.entries:
        ed = eigenface.eigen_distance(coords, entry.coords)
        if mode == "pca_only":
            d = 0.0
            rv = ed
        else:
            d = dt_difference(tt_avg, entry.ra_avg)
            rv = fused_score(ed, d, dt_divisor)
        scores.append(EntryScore(ed=ed, d=d, rv=rv))
    best = min(range(len(scores)), key=lambda i: scores[i].rv)
    return MatchReport(
        best_index=best,
        best_subject=gallery.entries[best].subject_id,
        scores=tuple(scores),
        mode=mode,
        dt_divisor=dt_divisor,
    )


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so failures leave no partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_gallery(gallery: Gallery, model: EigenModel, path) -> None:
    """Serialize gallery + model to JSON (atomic write).

    Requires a landmark-complete gallery; a pca-only internal gallery has
    no file representation.
    """
    if gallery.scheme is None or any(e.ra_avg is None for e in gallery.entries):
        raise ValueError("cannot save a gallery built without landmarks")
    obj = {
        "format_version": GALLERY_FORMAT_VERSION,
        "model": eigenface.model_to_dict(model),
        "scheme": gallery.scheme,
        "entries": [
            {
                "subject": e.subject_id,
                "variant": e.variant,
                "ra_avg": float(e.ra_avg),
                "coords": [float(c) for c in e.coords],
                "source": e.source_path,
            }
            for e in gallery.entries
        ],
    }
    atomic_write_text(path, json.dumps(obj) + "\n")


def load_gallery(path) -> tuple[Gallery, EigenModel]:
    """Load a gallery file; the reload reproduces matching bit-exactly."""
    try:
        text = Path(path).read_text()
    except OSError:
        raise
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GalleryFormatError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise GalleryFormatError(f"{path}: expected a JSON object")
    version = obj.get("format_version")
    if version != GALLERY_FORMAT_VERSION:
        raise GalleryFormatError(f"{path}: unsupported format_version {version!r}")
    try:
        model = eigenface.model_from_dict(obj["model"])
        scheme = int(obj["scheme"])
        raw_entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GalleryFormatError(f"{path}: {exc}") from None
    entries = []
    for i, raw in enumerate(raw_entries):
        try:
            coords = np.array(raw["coords"], dtype=float)
            entry = GalleryEntry(
                subject_id=str(raw["subject"]),
                variant=str(raw["variant"]),
                coords=coords,
                ra_avg=float(raw["ra_avg"]),
                source_path=str(raw.get("source", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise GalleryFormatError(f"{path}: entry {i}: {exc}") from None
        if len(entry.coords) != model.k:
            raise GalleryFormatError(
                f"{path}: entry {i} has {len(entry.coords)} coords, model k={model.k}"
            )
        if not 0 < entry.ra_avg <= 1:
            raise GalleryFormatError(
                f"{path}: entry {i} ra_avg {entry.ra_avg} outside (0, 1]"
            )
        entries.append(entry)
    if not entries:
        raise GalleryFormatError(f"{path}: gallery has no entries")
    return Gallery(scheme=scheme, entries=tuple(entries)), model
