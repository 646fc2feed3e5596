"""Uniform 1-D spatial mesh and real-valued lattice fields.

The mesh is uniform in space and fixed in time.  Two boundary conventions
stand in for the infinite decaying line: periodic wrap-around, and compact
support (fields read as zero beyond the stored window).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    COMPACT_SUPPORT = "compact_support"


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class Mesh:
    """Uniform spatial mesh with spacing h and n_points sites."""

    h: float
    n_points: int
    x0: float = 0.0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if not self.h > 0:
            raise MeshError(f"mesh spacing must be positive, got {self.h}")
        if self.n_points < 4:
            raise MeshError(f"need at least 4 mesh points, got {self.n_points}")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n_points)

    @property
    def length(self) -> float:
        return self.h * self.n_points

    def shift_values(self, values: np.ndarray, k: int) -> np.ndarray:
        """Return the array of values[j + k] under this mesh's boundary mode."""
        if k == 0:
            return values.copy()
        n = self.n_points
        if self.boundary is Boundary.PERIODIC:
            return np.roll(values, -k)
        out = np.zeros_like(values)
        if abs(k) >= n:
            return out
        if k > 0:
            out[: n - k] = values[k:]
        else:
            out[-k:] = values[: n + k]
        return out


@dataclass
class LatticeField:
    """Real values attached to the sites of a mesh."""

    mesh: Mesh
    values: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_points,):
            raise MeshError(
                f"field has {self.values.shape} values for a mesh of "
                f"{self.mesh.n_points} points"
            )
        if self.validate and not np.all(np.isfinite(self.values)):
            raise MeshError("field contains non-finite values")

    def shift(self, k: int) -> "LatticeField":
        return LatticeField(self.mesh, self.mesh.shift_values(self.values, k),
                            validate=False)

    def copy(self) -> "LatticeField":
        return LatticeField(self.mesh, self.values.copy(), validate=False)

    def __add__(self, other):
        _require_same_mesh(self, other)
        return LatticeField(self.mesh, self.values + other.values, validate=False)

    def __sub__(self, other):
        _require_same_mesh(self, other)
        return LatticeField(self.mesh, self.values - other.values, validate=False)

    def __mul__(self, scalar):
        return LatticeField(self.mesh, self.values * float(scalar), validate=False)

    __rmul__ = __mul__


def _require_same_mesh(f: LatticeField, g: LatticeField):
    if f.mesh != g.mesh:
        raise MeshError("fields live on different meshes")


def zero_field(mesh: Mesh) -> LatticeField:
    return LatticeField(mesh, np.zeros(mesh.n_points))


def sum_functional(f: LatticeField) -> float:
    """h-weighted sum of the field over the whole mesh."""
    return f.mesh.h * float(np.sum(f.values))


def inner_product(f: LatticeField, g: LatticeField) -> float:
    """h-weighted pointwise inner product of two fields on the same mesh."""
    _require_same_mesh(f, g)
    return f.mesh.h * float(np.dot(f.values, g.values))


def decay_margin(f: LatticeField, buffer_fraction: float = 0.1) -> float:
    """Largest |value| inside the outer buffer on each side of the window.

    Only meaningful in compact-support mode, where it measures how well the
    field honours the decay assumption near the window edges.
    """
    if f.mesh.boundary is Boundary.PERIODIC:
        raise MeshError("decay margin is not meaningful on a periodic mesh")
    if not 0 < buffer_fraction < 0.5:
        raise MeshError(f"buffer fraction must lie in (0, 0.5), got {buffer_fraction}")
    n_buf = max(1, int(f.mesh.n_points * buffer_fraction))
    edges = np.concatenate([f.values[:n_buf], f.values[-n_buf:]])
    return float(np.max(np.abs(edges)))


def field_to_csv(f: LatticeField) -> str:
    """Serialize a field as CSV rows (index, x, value) at full precision."""
    buf = io.StringIO()
    buf.write("index,x,value\n")
    x = f.mesh.x
    for j, val in enumerate(f.values):
        buf.write(f"{j},{x[j]:.17g},{val:.17g}\n")
    return buf.getvalue()


def field_from_csv(text: str, boundary: Boundary = Boundary.PERIODIC) -> LatticeField:
    """Reconstruct a field from (index, x, value) CSV produced by field_to_csv."""
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    x = np.array([float(r[1]) for r in rows])
    values = np.array([float(r[2]) for r in rows])
    if len(x) < 4:
        raise MeshError("CSV field needs at least 4 rows")
    h = float(x[1] - x[0])
    if not np.allclose(np.diff(x), h, rtol=1e-12, atol=1e-12 * max(abs(h), 1.0)):
        raise MeshError("CSV field is not on a uniform mesh")
    mesh = Mesh(h=h, n_points=len(x), x0=float(x[0]), boundary=boundary)
    return LatticeField(mesh, values)
