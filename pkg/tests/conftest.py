import math

import numpy as np
import pytest

from shapealign.geometry import Contour
from shapealign.synthetic import make_dataset


@pytest.fixture
def unit_square() -> Contour:
    return Contour(points=np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]))


@pytest.fixture(scope="session")
def mini_dataset(tmp_path_factory):
    """4 classes x 5 instances of synthetic shapes plus their manifest."""
    outdir = tmp_path_factory.mktemp("mini")
    return make_dataset(outdir, per_class=5, seed=0)


def random_simple_polygon(rng: np.random.Generator, n_vertices: int = 14,
                          spread: float = 0.35) -> Contour:
    """Star-shaped polygon with distinct vertex radii; never self-crossing."""
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n_vertices))
    # keep consecutive angles apart so consecutive points stay distinct
    while np.min(np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))) < 0.05:
        angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n_vertices))
    radii = rng.uniform(1.0 - spread, 1.0 + spread, n_vertices)
    pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    return Contour(points=pts)
