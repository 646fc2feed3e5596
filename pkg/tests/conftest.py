import numpy as np
import pytest

from hamlattice.mesh import Boundary, LatticeField, Mesh


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def periodic_mesh():
    return Mesh(h=0.1, n_points=64)


@pytest.fixture
def compact_mesh():
    return Mesh(h=0.1, n_points=64, boundary=Boundary.COMPACT_SUPPORT)


@pytest.fixture
def random_field(periodic_mesh, rng):
    return LatticeField(periodic_mesh, rng.normal(size=periodic_mesh.n_points))
