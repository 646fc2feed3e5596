import numpy as np
import pytest

from hamlattice.mesh import (
    Boundary,
    LatticeField,
    Mesh,
    MeshError,
    decay_margin,
    field_from_csv,
    field_to_csv,
    inner_product,
    sum_functional,
    zero_field,
)


class TestMesh:
    def test_invalid_spacing(self):
        with pytest.raises(MeshError):
            Mesh(h=0.0, n_points=8)
        with pytest.raises(MeshError):
            Mesh(h=-1.0, n_points=8)

    def test_too_few_points(self):
        with pytest.raises(MeshError):
            Mesh(h=0.1, n_points=3)

    def test_coordinates(self):
        mesh = Mesh(h=0.5, n_points=4, x0=1.0)
        assert np.allclose(mesh.x, [1.0, 1.5, 2.0, 2.5])
        assert mesh.length == 2.0

    def test_periodic_shift_wraps(self):
        mesh = Mesh(h=1.0, n_points=4)
        vals = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(mesh.shift_values(vals, 1), [2, 3, 4, 1])
        assert np.array_equal(mesh.shift_values(vals, -1), [4, 1, 2, 3])

    def test_compact_shift_reads_zeros(self):
        mesh = Mesh(h=1.0, n_points=4, boundary=Boundary.COMPACT_SUPPORT)
        vals = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(mesh.shift_values(vals, 1), [2, 3, 4, 0])
        assert np.array_equal(mesh.shift_values(vals, -2), [0, 0, 1, 2])
        assert np.array_equal(mesh.shift_values(vals, 9), [0, 0, 0, 0])

    def test_shift_compose_identity_bit_exact(self, random_field):
        round_trip = random_field.shift(1).shift(-1)
        assert np.array_equal(round_trip.values, random_field.values)


class TestLatticeField:
    def test_rejects_non_finite(self, periodic_mesh):
        vals = np.zeros(periodic_mesh.n_points)
        vals[3] = np.nan
        with pytest.raises(MeshError):
            LatticeField(periodic_mesh, vals)

    def test_rejects_wrong_length(self, periodic_mesh):
        with pytest.raises(MeshError):
            LatticeField(periodic_mesh, np.zeros(5))

    def test_arithmetic(self, periodic_mesh):
        f = LatticeField(periodic_mesh, np.full(64, 2.0))
        g = LatticeField(periodic_mesh, np.full(64, 3.0))
        assert np.allclose((f + g).values, 5.0)
        assert np.allclose((f - g).values, -1.0)
        assert np.allclose((2.0 * f).values, 4.0)

    def test_mesh_mismatch(self, periodic_mesh):
        other = Mesh(h=0.2, n_points=64)
        f = zero_field(periodic_mesh)
        g = zero_field(other)
        with pytest.raises(MeshError):
            _ = f + g


class TestSumFunctional:
    def test_zero_field(self, periodic_mesh):
        assert sum_functional(zero_field(periodic_mesh)) == 0.0

    def test_constant_field(self):
        mesh = Mesh(h=0.5, n_points=8)
        assert sum_functional(LatticeField(mesh, np.ones(8))) == pytest.approx(4.0)

    def test_small_example(self):
        mesh = Mesh(h=0.1, n_points=6)
        vals = np.array([1.0, 2.0, 3.0, 0.0, 0.0, 0.0])
        assert sum_functional(LatticeField(mesh, vals)) == pytest.approx(0.6)

    def test_additivity(self, periodic_mesh, rng):
        f = LatticeField(periodic_mesh, rng.normal(size=64))
        g = LatticeField(periodic_mesh, rng.normal(size=64))
        assert sum_functional(f + g) == pytest.approx(
            sum_functional(f) + sum_functional(g), rel=1e-13, abs=1e-14
        )


class TestInnerProduct:
    def test_zero(self, periodic_mesh):
        z = zero_field(periodic_mesh)
        assert inner_product(z, z) == 0.0

    def test_single_site(self):
        mesh = Mesh(h=2.0, n_points=4)
        f = LatticeField(mesh, np.array([1.0, 0, 0, 0]))
        g = LatticeField(mesh, np.array([3.0, 0, 0, 0]))
        assert inner_product(f, g) == pytest.approx(6.0)

    def test_against_naive_loop(self, periodic_mesh, rng):
        f = LatticeField(periodic_mesh, rng.normal(size=64))
        g = LatticeField(periodic_mesh, rng.normal(size=64))
        naive = periodic_mesh.h * sum(
            a * b for a, b in zip(f.values, g.values)
        )
        assert inner_product(f, g) == pytest.approx(naive, rel=1e-15)

    def test_symmetric_bilinear(self, periodic_mesh, rng):
        f = LatticeField(periodic_mesh, rng.normal(size=64))
        g = LatticeField(periodic_mesh, rng.normal(size=64))
        k = LatticeField(periodic_mesh, rng.normal(size=64))
        assert inner_product(f, g) == pytest.approx(inner_product(g, f), rel=1e-13)
        assert inner_product(f + k, g) == pytest.approx(
            inner_product(f, g) + inner_product(k, g), rel=1e-13
        )

    def test_mesh_mismatch(self, periodic_mesh):
        other = Mesh(h=0.2, n_points=64)
        with pytest.raises(MeshError):
            inner_product(zero_field(periodic_mesh), zero_field(other))


class TestDecayMargin:
    def test_zero_and_constant(self, compact_mesh):
        assert decay_margin(zero_field(compact_mesh)) == 0.0
        one = LatticeField(compact_mesh, np.ones(64))
        assert decay_margin(one) == 1.0

    def test_gaussian_bump(self, compact_mesh):
        x = compact_mesh.x
        center = x[len(x) // 2]
        vals = np.exp(-(((x - center) / 0.5) ** 2))
        margin = decay_margin(LatticeField(compact_mesh, vals), 0.1)
        n_buf = 6
        expected = max(vals[:n_buf].max(), vals[-n_buf:].max())
        assert margin == pytest.approx(expected)

    def test_periodic_is_error(self, periodic_mesh):
        with pytest.raises(MeshError):
            decay_margin(zero_field(periodic_mesh))

    def test_bad_fraction(self, compact_mesh):
        with pytest.raises(MeshError):
            decay_margin(zero_field(compact_mesh), 0.7)


class TestCsv:
    def test_round_trip_full_precision(self, compact_mesh, rng):
        f = LatticeField(compact_mesh, rng.normal(size=64))
        g = field_from_csv(field_to_csv(f), boundary=Boundary.COMPACT_SUPPORT)
        assert np.array_equal(f.values, g.values)
        assert g.mesh.h == pytest.approx(f.mesh.h)
        assert g.mesh.boundary is Boundary.COMPACT_SUPPORT

    def test_nonuniform_rejected(self):
        text = "index,x,value\n0,0.0,1\n1,0.1,1\n2,0.3,1\n3,0.4,1\n"
        with pytest.raises(MeshError):
            field_from_csv(text)
