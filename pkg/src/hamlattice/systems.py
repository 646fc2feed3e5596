"""Canonical lattice systems, time integrators, and tangent (linearized) flow.

Two concrete systems are provided: the nonlinear wave system and the
nonlinear Schrödinger system written as a real pair.  Both are canonical:
the right-hand side equals (dH/dw, -dH/dv) for the system Hamiltonian.
Integrators are classical RK4 (reference, non-symplectic) and implicit
midpoint (symplectic; conserves quadratic invariants up to solver tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .mesh import Boundary, LatticeField, Mesh, MeshError
from .potentials import Potential
from .variational import LatticeFunctional, from_stencil


class IntegrationError(RuntimeError):
    """The implicit solve failed to converge."""


@dataclass
class CanonicalState:
    """Canonical pair (v, w) at time t on a shared mesh."""

    t: float
    v: LatticeField
    w: LatticeField

    def __post_init__(self):
        if self.v.mesh != self.w.mesh:
            raise MeshError("v and w live on different meshes")

    @property
    def mesh(self) -> Mesh:
        return self.v.mesh

    def copy(self) -> "CanonicalState":
        return CanonicalState(self.t, self.v.copy(), self.w.copy())


@dataclass
class TangentState:
    """Perturbation pair (dv, dw) evolved by the variational equations."""

    dv: LatticeField
    dw: LatticeField

    def __post_init__(self):
        if self.dv.mesh != self.dw.mesh:
            raise MeshError("dv and dw live on different meshes")

    def copy(self) -> "TangentState":
        return TangentState(self.dv.copy(), self.dw.copy())


RhsFn = Callable[[float, np.ndarray, np.ndarray, Mesh], Tuple[np.ndarray, np.ndarray]]
LinRhsFn = Callable[
    [float, np.ndarray, np.ndarray, np.ndarray, np.ndarray, Mesh],
    Tuple[np.ndarray, np.ndarray],
]


@dataclass(frozen=True)
class SystemSpec:
    """A canonical system: Hamiltonian, vector field, and its linearization."""

    name: str
    hamiltonian: LatticeFunctional
    rhs: RhsFn
    linearized_rhs: LinRhsFn
    potential: Potential


def _lap(mesh: Mesh, a: np.ndarray) -> np.ndarray:
    """Three-point second divided difference under the mesh boundary mode."""
    if mesh.boundary is Boundary.PERIODIC:
        return (np.roll(a, -1) - 2.0 * a + np.roll(a, 1)) / mesh.h**2
    return (mesh.shift_values(a, 1) - 2.0 * a + mesh.shift_values(a, -1)) / mesh.h**2


def _d_plus_arr(mesh: Mesh, a: np.ndarray) -> np.ndarray:
    if mesh.boundary is Boundary.PERIODIC:
        return (np.roll(a, -1) - a) / mesh.h
    return (mesh.shift_values(a, 1) - a) / mesh.h


def wave_system(V: Potential) -> SystemSpec:
    """Nonlinear wave system: vdot = w, wdot = lap(v) - V'(v).

    Hamiltonian density w^2/2 + (D+ v)^2/2 + V(v).
    """

    def density(t, v, w):
        dv = _d_plus_arr(v.mesh, v.values)
        return 0.5 * w.values**2 + 0.5 * dv**2 + V.value(v.values)

    energy = from_stencil(
        name=f"H[wave,{V.name}]",
        density=density,
        partials_v={
            0: lambda t, v, w: -_d_plus_arr(v.mesh, v.values) / v.mesh.h
            + V.deriv(v.values),
            1: lambda t, v, w: _d_plus_arr(v.mesh, v.values) / v.mesh.h,
        },
        partials_w={0: lambda t, v, w: w.values},
    )

    def rhs(t, v, w, mesh):
        return w.copy(), _lap(mesh, v) - V.deriv(v)

    def linearized_rhs(t, v, w, dv, dw, mesh):
        return dw.copy(), _lap(mesh, dv) - V.second_deriv(v) * dv

    return SystemSpec("wave", energy, rhs, linearized_rhs, V)


def nls_system(F: Potential) -> SystemSpec:
    """Nonlinear Schrödinger system for psi = v + i w, written as a real pair:
    vdot = -lap(w) - F'(v^2+w^2) w,  wdot = lap(v) + F'(v^2+w^2) v.

    Hamiltonian density ((D+ v)^2 + (D+ w)^2 - F(v^2 + w^2)) / 2.
    """

    def density(t, v, w):
        dv = _d_plus_arr(v.mesh, v.values)
        dw = _d_plus_arr(v.mesh, w.values)
        return 0.5 * (dv**2 + dw**2 - F.value(v.values**2 + w.values**2))

    def fprime(v, w):
        return F.deriv(v.values**2 + w.values**2)

    energy = from_stencil(
        name=f"H[nls,{F.name}]",
        density=density,
        partials_v={
            0: lambda t, v, w: -_d_plus_arr(v.mesh, v.values) / v.mesh.h
            - fprime(v, w) * v.values,
            1: lambda t, v, w: _d_plus_arr(v.mesh, v.values) / v.mesh.h,
        },
        partials_w={
            0: lambda t, v, w: -_d_plus_arr(v.mesh, w.values) / v.mesh.h
            - fprime(v, w) * w.values,
            1: lambda t, v, w: _d_plus_arr(v.mesh, w.values) / v.mesh.h,
        },
    )

    def rhs(t, v, w, mesh):
        fp = F.deriv(v**2 + w**2)
        return -_lap(mesh, w) - fp * w, _lap(mesh, v) + fp * v

    def linearized_rhs(t, v, w, dv, dw, mesh):
        z = v**2 + w**2
        fp = F.deriv(z)
        fpp = F.second_deriv(z)
        dz = 2.0 * (v * dv + w * dw)
        return (
            -_lap(mesh, dw) - fp * dw - fpp * dz * w,
            _lap(mesh, dv) + fp * dv + fpp * dz * v,
        )

    return SystemSpec("nls", energy, rhs, linearized_rhs, F)


def _state_arrays(state: CanonicalState) -> Tuple[np.ndarray, np.ndarray]:
    return state.v.values, state.w.values


def _wrap(mesh: Mesh, t: float, v: np.ndarray, w: np.ndarray) -> CanonicalState:
    return CanonicalState(
        t, LatticeField(mesh, v, validate=False), LatticeField(mesh, w, validate=False)
    )


def step_rk4(sys: SystemSpec, state: CanonicalState, dt: float) -> CanonicalState:
    """One classical fourth-order Runge-Kutta step."""
    mesh = state.mesh
    t, (v, w) = state.t, _state_arrays(state)
    k1v, k1w = sys.rhs(t, v, w, mesh)
    k2v, k2w = sys.rhs(t + dt / 2, v + dt / 2 * k1v, w + dt / 2 * k1w, mesh)
    k3v, k3w = sys.rhs(t + dt / 2, v + dt / 2 * k2v, w + dt / 2 * k2w, mesh)
    k4v, k4w = sys.rhs(t + dt, v + dt * k3v, w + dt * k3w, mesh)
    return _wrap(
        mesh,
        t + dt,
        v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v),
        w + dt / 6 * (k1w + 2 * k2w + 2 * k3w + k4w),
    )


def _midpoint_solve(
    sys: SystemSpec,
    t: float,
    v: np.ndarray,
    w: np.ndarray,
    mesh: Mesh,
    dt: float,
    newton_tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Solve the midpoint equations m = y + (dt/2) f(t + dt/2, m) by damped
    fixed-point iteration; returns the midpoint arrays.

    The damping factor is halved whenever the residual grows, which keeps
    the iteration contractive for the oscillatory (imaginary-spectrum)
    linearizations these systems produce.
    """
    tm = t + dt / 2
    fv, fw = sys.rhs(t, v, w, mesh)
    mv = v + dt / 2 * fv
    mw = w + dt / 2 * fw
    beta = 1.0
    prev_res = np.inf
    for _ in range(max_iter):
        fv, fw = sys.rhs(tm, mv, mw, mesh)
        gv = v + dt / 2 * fv - mv
        gw = w + dt / 2 * fw - mw
        res = max(float(np.max(np.abs(gv))), float(np.max(np.abs(gw))))
        if res < newton_tol:
            return mv, mw
        if res > prev_res and beta > 1.0 / 16.0:
            beta *= 0.5
        prev_res = res
        mv = mv + beta * gv
        mw = mw + beta * gw
    raise IntegrationError(
        f"implicit midpoint solve did not reach {newton_tol} in {max_iter} "
        f"iterations at t={t}"
    )


def step_midpoint(
    sys: SystemSpec,
    state: CanonicalState,
    dt: float,
    newton_tol: float = 1e-12,
    max_iter: int = 50,
) -> CanonicalState:
    """One implicit-midpoint step (symplectic)."""
    mesh = state.mesh
    v, w = _state_arrays(state)
    mv, mw = _midpoint_solve(sys, state.t, v, w, mesh, dt, newton_tol, max_iter)
    return _wrap(mesh, state.t + dt, 2 * mv - v, 2 * mw - w)


def step_midpoint_with_tangents(
    sys: SystemSpec,
    state: CanonicalState,
    tangents: Sequence[TangentState],
    dt: float,
    newton_tol: float = 1e-12,
    max_iter: int = 50,
) -> Tuple[CanonicalState, list]:
    """One implicit-midpoint step of the base state together with tangent
    states evolved by the exact linearization of the midpoint map.

    The tangent midpoint solves dm = d + (dt/2) A(m) dm with A the Jacobian
    action at the base midpoint, so the tangent map is the exact derivative
    of the (symplectic) base map and conserves the symplectic 2-form.
    """
    mesh = state.mesh
    v, w = _state_arrays(state)
    mv, mw = _midpoint_solve(sys, state.t, v, w, mesh, dt, newton_tol, max_iter)
    tm = state.t + dt / 2
    new_tangents = []
    for tg in tangents:
        dv, dw = tg.dv.values, tg.dw.values
        dmv, dmw = dv.copy(), dw.copy()
        for _ in range(max_iter):
            av, aw = sys.linearized_rhs(tm, mv, mw, dmv, dmw, mesh)
            new_dv = dv + dt / 2 * av
            new_dw = dw + dt / 2 * aw
            res = max(
                float(np.max(np.abs(new_dv - dmv))),
                float(np.max(np.abs(new_dw - dmw))),
            )
            dmv, dmw = new_dv, new_dw
            if res < newton_tol * max(1.0, float(np.max(np.abs(dmv)))):
                break
        else:
            raise IntegrationError("tangent midpoint solve did not converge")
        new_tangents.append(
            TangentState(
                LatticeField(mesh, 2 * dmv - dv, validate=False),
                LatticeField(mesh, 2 * dmw - dw, validate=False),
            )
        )
    return _wrap(mesh, state.t + dt, 2 * mv - v, 2 * mw - w), new_tangents


def step_rk4_with_tangents(
    sys: SystemSpec,
    state: CanonicalState,
    tangents: Sequence[TangentState],
    dt: float,
) -> Tuple[CanonicalState, list]:
    """One RK4 step of the augmented (base + linearized) system."""
    mesh = state.mesh
    t, (v, w) = state.t, _state_arrays(state)
    d = [(tg.dv.values, tg.dw.values) for tg in tangents]

    def aug_rhs(tt, vv, ww, dd):
        fv, fw = sys.rhs(tt, vv, ww, mesh)
        fd = [sys.linearized_rhs(tt, vv, ww, dv, dw, mesh) for dv, dw in dd]
        return fv, fw, fd

    k1 = aug_rhs(t, v, w, d)
    k2 = aug_rhs(
        t + dt / 2,
        v + dt / 2 * k1[0],
        w + dt / 2 * k1[1],
        [(dv + dt / 2 * a, dw + dt / 2 * b) for (dv, dw), (a, b) in zip(d, k1[2])],
    )
    k3 = aug_rhs(
        t + dt / 2,
        v + dt / 2 * k2[0],
        w + dt / 2 * k2[1],
        [(dv + dt / 2 * a, dw + dt / 2 * b) for (dv, dw), (a, b) in zip(d, k2[2])],
    )
    k4 = aug_rhs(
        t + dt,
        v + dt * k3[0],
        w + dt * k3[1],
        [(dv + dt * a, dw + dt * b) for (dv, dw), (a, b) in zip(d, k3[2])],
    )
    new_state = _wrap(
        mesh,
        t + dt,
        v + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        w + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )
    new_tangents = []
    for (dv, dw), (a1, b1), (a2, b2), (a3, b3), (a4, b4) in zip(
        d, k1[2], k2[2], k3[2], k4[2]
    ):
        new_tangents.append(
            TangentState(
                LatticeField(mesh, dv + dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4),
                             validate=False),
                LatticeField(mesh, dw + dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4),
                             validate=False),
            )
        )
    return new_state, new_tangents


def evolve_tangent(
    sys: SystemSpec,
    state0: CanonicalState,
    tangent0: TangentState,
    dt: float,
    n_steps: int,
    integrator: str = "midpoint",
    newton_tol: float = 1e-12,
    max_iter: int = 50,
) -> Tuple[CanonicalState, TangentState]:
    """Evolve a base state and one tangent state jointly for n_steps."""
    state, tangents = state0.copy(), [tangent0.copy()]
    for _ in range(n_steps):
        if integrator == "midpoint":
            state, tangents = step_midpoint_with_tangents(
                sys, state, tangents, dt, newton_tol, max_iter
            )
        elif integrator == "rk4":
            state, tangents = step_rk4_with_tangents(sys, state, tangents, dt)
        else:
            raise ValueError(f"unknown integrator {integrator!r}")
    return state, tangents[0]


def symplectic_form(xi: TangentState, zeta: TangentState) -> float:
    """Canonical 2-form h * sum_j (dv_xi dw_zeta - dv_zeta dw_xi)."""
    if xi.dv.mesh != zeta.dv.mesh:
        raise MeshError("tangent states live on different meshes")
    h = xi.dv.mesh.h
    return h * float(
        np.dot(xi.dv.values, zeta.dw.values) - np.dot(zeta.dv.values, xi.dw.values)
    )
