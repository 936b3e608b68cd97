"""Face recognition via eigenface projection fused with a
Delaunay-triangulation area descriptor.
"""

from .dataset_io import (
    DatasetFormatError,
    DatasetManifest,
    ImageVector,
    LandmarkSet,
    ManifestEntry,
    load_image,
    load_landmarks,
    load_manifest,
    save_image,
    save_manifest,
    split_dataset,
)
from .eigenface import (
    EigenModel,
    ZeroVarianceError,
    eigen_distance,
    fit_eigenmodel,
    mean_image,
    center_images,
    project,
    reconstruct,
)
from .evalharness import (
    AccuracyRow,
    AccuracyTable,
    ExperimentConfig,
    accuracy,
    emit_report,
    run_experiment,
)
from .geometry import (
    Triangulation,
    average_relative_area,
    delaunay,
    edge_length,
    empty_circumcircle_violations,
    in_circumcircle,
    relative_areas,
    triangle_area,
)
from .recognizer import (
    Gallery,
    GalleryEntry,
    GalleryFormatError,
    MatchReport,
    TrainingRecord,
    build_gallery,
    dt_difference,
    fused_score,
    load_gallery,
    recognize,
    save_gallery,
)

__version__ = "0.1.0"
