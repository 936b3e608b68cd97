import numpy as np
import pytest

from dtpca import synthetic
from dtpca.dataset_io import ImageVector


@pytest.fixture(scope="session")
def synth_dataset(tmp_path_factory):
    """Small deterministic dataset: 5 subjects x 4 variants, 68-pt landmarks."""
    root = tmp_path_factory.mktemp("synth")
    manifests = synthetic.make_dataset(
        root, subjects=5, variants=4, width=10, height=8, schemes=(68,), seed=7
    )
    return {"root": root, "manifest": manifests[68]}


@pytest.fixture
def write_pgm(tmp_path):
    """Write a P5 file from raw byte values; returns the path."""

    def _write(name, width, height, pixels, maxval=255, magic=b"P5"):
        raw = bytes(pixels)
        header = magic + f"\n{width} {height}\n{maxval}\n".encode()
        path = tmp_path / name
        path.write_bytes(header + raw)
        return path

    return _write


@pytest.fixture
def write_landmarks(tmp_path):
    def _write(name, points):
        path = tmp_path / name
        with open(path, "w") as fh:
            for x, y in points:
                fh.write(f"{x},{y}\n")
        return path

    return _write


def image_from_values(values, width=None, height=None):
    values = np.asarray(values, dtype=float)
    if width is None:
        width, height = len(values), 1
    return ImageVector(width=width, height=height, values=values)
