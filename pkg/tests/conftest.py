"""Shared fixtures: bundled data files and small synthetic routes."""

from pathlib import Path

import pytest

import platoonsim
from platoonsim.emissions import load_coeffs
from platoonsim.road_model import ContainerStop, Route, load_route

DATA_DIR = Path(platoonsim.__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def coeffs():
    return load_coeffs((DATA_DIR / "ldv_d_eu6.emis").read_text())


@pytest.fixture(scope="session")
def ref_route() -> Route:
    return load_route((DATA_DIR / "reference_route.rt").read_text())


@pytest.fixture
def make_flat_route():
    """Factory for a single-segment route with optional origin/dest stops."""

    def _make(length: float = 2000.0, limit: float = 20.0,
              origin: float = 100.0, dest: float | None = None) -> Route:
        stops = []
        if origin is not None:
            dest = length - 100.0 if dest is None else dest
            stops = [ContainerStop("orig", origin, 0.0),
                     ContainerStop("dest", dest, 0.0)]
        return Route(segments=[(0.0, length, limit)], stops=stops)

    return _make
