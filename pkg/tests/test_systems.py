import numpy as np
import pytest

from hamlattice.mesh import LatticeField, Mesh, zero_field
from hamlattice.potentials import (
    cubic_focusing,
    quadratic_potential,
    quartic_potential,
    zero_potential,
)
from hamlattice.suites import random_band_limited_state
from hamlattice.systems import (
    CanonicalState,
    IntegrationError,
    TangentState,
    evolve_tangent,
    nls_system,
    step_midpoint,
    step_midpoint_with_tangents,
    step_rk4,
    symplectic_form,
    wave_system,
)
from hamlattice.variational import hamiltonian_field_of


@pytest.fixture
def mesh():
    return Mesh(h=0.1, n_points=64)


def _random_state(mesh, seed=0, amplitude=0.1):
    rng = np.random.default_rng(seed)
    v, w = random_band_limited_state(mesh, rng, amplitude=amplitude)
    return CanonicalState(0.0, v, w)


class TestWaveSystem:
    def test_stationary_constant(self, mesh):
        sys = wave_system(zero_potential())
        v = LatticeField(mesh, np.full(64, 2.0))
        w = zero_field(mesh)
        dv, dw = sys.rhs(0.0, v.values, w.values, mesh)
        assert np.allclose(dv, 0.0)
        assert np.allclose(dw, 0.0)

    def test_single_site_quadratic(self, mesh):
        C = 0.7
        sys = wave_system(quadratic_potential(C))
        e = np.zeros(64)
        e[10] = 1.0
        _, wdot = sys.rhs(0.0, e, np.zeros(64), mesh)
        expected = (np.roll(e, -1) - 2 * e + np.roll(e, 1)) / mesh.h**2 - C * e
        assert np.allclose(wdot, expected)

    def test_rhs_is_canonical(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        X = hamiltonian_field_of(sys.hamiltonian)
        for seed in range(5):
            st = _random_state(mesh, seed)
            dv, dw = sys.rhs(0.0, st.v.values, st.w.values, mesh)
            assert np.allclose(dv, X.eta_v(0.0, st.v, st.w).values, atol=1e-12)
            assert np.allclose(dw, X.eta_w(0.0, st.v, st.w).values, atol=1e-12)


class TestNlsSystem:
    def test_free_case(self, mesh):
        sys = nls_system(zero_potential())
        st = _random_state(mesh, 1)
        dv, dw = sys.rhs(0.0, st.v.values, st.w.values, mesh)
        lap = lambda a: (np.roll(a, -1) - 2 * a + np.roll(a, 1)) / mesh.h**2
        assert np.allclose(dv, -lap(st.w.values))
        assert np.allclose(dw, lap(st.v.values))

    def test_plane_wave_rotation(self, mesh):
        sys = nls_system(zero_potential())
        kappa = 2 * np.pi * 4 / mesh.length
        v = np.cos(kappa * mesh.x)
        w = np.sin(kappa * mesh.x)
        omega = (2 - 2 * np.cos(kappa * mesh.h)) / mesh.h**2
        dv, dw = sys.rhs(0.0, v, w, mesh)
        assert np.allclose(dv, omega * w, atol=1e-10)
        assert np.allclose(dw, -omega * v, atol=1e-10)

    def test_rhs_is_canonical(self, mesh):
        sys = nls_system(cubic_focusing(1.0))
        X = hamiltonian_field_of(sys.hamiltonian)
        st = _random_state(mesh, 2)
        dv, dw = sys.rhs(0.0, st.v.values, st.w.values, mesh)
        assert np.allclose(dv, X.eta_v(0.0, st.v, st.w).values, atol=1e-12)
        assert np.allclose(dw, X.eta_w(0.0, st.v, st.w).values, atol=1e-12)

    def test_linearized_rhs_matches_finite_difference(self, mesh):
        sys = nls_system(cubic_focusing(1.0))
        st = _random_state(mesh, 3)
        rng = np.random.default_rng(8)
        dv, dw = random_band_limited_state(mesh, rng)
        eps = 1e-6
        av, aw = sys.linearized_rhs(
            0.0, st.v.values, st.w.values, dv.values, dw.values, mesh
        )
        fp = sys.rhs(0.0, st.v.values + eps * dv.values,
                     st.w.values + eps * dw.values, mesh)
        fm = sys.rhs(0.0, st.v.values - eps * dv.values,
                     st.w.values - eps * dw.values, mesh)
        assert np.allclose(av, (fp[0] - fm[0]) / (2 * eps), atol=1e-8)
        assert np.allclose(aw, (fp[1] - fm[1]) / (2 * eps), atol=1e-8)


class TestIntegrators:
    def test_zero_state_fixed_point(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        st = CanonicalState(0.0, zero_field(mesh), zero_field(mesh))
        for step in (step_rk4, step_midpoint):
            out = step(sys, st, 1e-2)
            assert np.allclose(out.v.values, 0.0)
            assert np.allclose(out.w.values, 0.0)

    def test_rk4_matches_exact_mode_rotation(self, mesh):
        C = 1.0
        sys = wave_system(quadratic_potential(C))
        kappa = 2 * np.pi * 3 / mesh.length
        omega = np.sqrt((2 - 2 * np.cos(kappa * mesh.h)) / mesh.h**2 + C)
        v0 = np.cos(kappa * mesh.x)
        st = CanonicalState(0.0, LatticeField(mesh, v0), zero_field(mesh))
        errs = []
        for dt in (2e-2, 1e-2):
            s = st.copy()
            n = int(round(1.0 / dt))
            for _ in range(n):
                s = step_rk4(sys, s, dt)
            exact = v0 * np.cos(omega * 1.0)
            errs.append(np.max(np.abs(s.v.values - exact)))
        order = np.log2(errs[0] / errs[1])
        assert order > 3.5

    def test_midpoint_preserves_mass_exactly(self, mesh):
        sys = nls_system(cubic_focusing(1.0))
        st = _random_state(mesh, 4)
        tol = 1e-13
        p3 = lambda s: 0.5 * mesh.h * np.sum(s.v.values**2 + s.w.values**2)
        before = p3(st)
        s = st.copy()
        n = 100
        for _ in range(n):
            s = step_midpoint(sys, s, 1e-3, newton_tol=tol)
        assert abs(p3(s) - before) < 100 * tol * n

    def test_midpoint_nonconvergence_raises(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        st = _random_state(mesh, 5, amplitude=1.0)
        with pytest.raises(IntegrationError):
            step_midpoint(sys, st, 1.0, newton_tol=1e-14, max_iter=2)

    def test_time_reversal_rk4(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        st = _random_state(mesh, 6)
        fwd = step_rk4(sys, st, 1e-2)
        back = step_rk4(sys, fwd, -1e-2)
        # per-step defect is O(dt^5) with a stiffness-sized constant
        assert np.max(np.abs(back.v.values - st.v.values)) < 1e-8
        assert np.max(np.abs(back.w.values - st.w.values)) < 1e-8


class TestTangentFlow:
    def test_zero_tangent_stays_zero(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        st = _random_state(mesh, 7)
        tg = TangentState(zero_field(mesh), zero_field(mesh))
        _, out = evolve_tangent(sys, st, tg, 1e-2, 20)
        assert np.allclose(out.dv.values, 0.0)
        assert np.allclose(out.dw.values, 0.0)

    def test_linear_system_tangent_equals_base_flow(self, mesh):
        # linearization of a linear flow is the flow itself
        sys = wave_system(quadratic_potential(1.0))
        st = CanonicalState(0.0, zero_field(mesh), zero_field(mesh))
        rng = np.random.default_rng(12)
        dv, dw = random_band_limited_state(mesh, rng)
        tg = TangentState(dv, dw)
        _, out = evolve_tangent(sys, st, tg, 1e-2, 50, integrator="rk4")
        base = CanonicalState(0.0, dv.copy(), dw.copy())
        for _ in range(50):
            base = step_rk4(sys, base, 1e-2)
        assert np.allclose(out.dv.values, base.v.values, atol=1e-12)
        assert np.allclose(out.dw.values, base.w.values, atol=1e-12)

    def test_tangent_matches_finite_difference(self, mesh):
        sys = nls_system(cubic_focusing(1.0))
        st = _random_state(mesh, 13)
        rng = np.random.default_rng(14)
        dv, dw = random_band_limited_state(mesh, rng)
        tg = TangentState(dv, dw)
        n, dt, eps = 100, 1e-3, 1e-6
        _, out = evolve_tangent(sys, st, tg, dt, n, integrator="rk4")
        sp = CanonicalState(0.0, st.v + eps * dv, st.w + eps * dw)
        sb = st.copy()
        for _ in range(n):
            sp = step_rk4(sys, sp, dt)
            sb = step_rk4(sys, sb, dt)
        fd_v = (sp.v.values - sb.v.values) / eps
        assert np.max(np.abs(fd_v - out.dv.values)) < 1e-5


class TestSymplecticForm:
    def test_antisymmetry_self(self, mesh):
        rng = np.random.default_rng(15)
        xi = TangentState(*random_band_limited_state(mesh, rng))
        assert symplectic_form(xi, xi) == 0.0

    def test_canonical_pairing(self, mesh):
        e = np.zeros(64)
        e[7] = 1.0
        xi = TangentState(LatticeField(mesh, e), zero_field(mesh))
        zeta = TangentState(zero_field(mesh), LatticeField(mesh, e))
        assert symplectic_form(xi, zeta) == pytest.approx(mesh.h)

    def test_against_naive_loop(self, mesh):
        rng = np.random.default_rng(16)
        xi = TangentState(*random_band_limited_state(mesh, rng))
        zeta = TangentState(*random_band_limited_state(mesh, rng))
        naive = mesh.h * sum(
            xi.dv.values[j] * zeta.dw.values[j] - zeta.dv.values[j] * xi.dw.values[j]
            for j in range(64)
        )
        assert symplectic_form(xi, zeta) == pytest.approx(naive, rel=1e-13)

    def test_conserved_under_midpoint(self, mesh):
        sys = wave_system(quartic_potential(1.0))
        st = _random_state(mesh, 17)
        rng = np.random.default_rng(18)
        tgs = [
            TangentState(*random_band_limited_state(mesh, rng)) for _ in range(2)
        ]
        before = symplectic_form(tgs[0], tgs[1])
        s = st.copy()
        for _ in range(100):
            s, tgs = step_midpoint_with_tangents(sys, s, tgs, 1e-2, 1e-13)
        after = symplectic_form(tgs[0], tgs[1])
        assert abs(after - before) < 1e-10 * abs(before)
