"""Second-order (Lagrangian) form of the wave system and the Legendre map.

The wave system can be written as vddot = second difference of v - V'(v),
the stationarity condition of the action with density vdot^2/2 - (D+ v)^2/2
- V(v).  The Legendre transform identifies w with vdot and reproduces the
canonical Hamiltonian; trajectories of both formulations coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import LatticeField, MeshError
from .operators import ShiftSeriesOperator, apply as op_apply
from .potentials import Potential
from .systems import (
    CanonicalState,
    SystemSpec,
    step_midpoint,
    step_rk4,
    wave_system,
)


@dataclass
class SecondOrderState:
    """Configuration and velocity (v, vdot) at time t."""

    t: float
    v: LatticeField
    vdot: LatticeField

    def __post_init__(self):
        if self.v.mesh != self.vdot.mesh:
            raise MeshError("v and vdot live on different meshes")

    def copy(self) -> "SecondOrderState":
        return SecondOrderState(self.t, self.v.copy(), self.vdot.copy())


def euler_lagrange_rhs(V: Potential, state: SecondOrderState) -> LatticeField:
    """Acceleration field of the second-order wave equation:
    vddot = (v_{j+1} - 2 v_j + v_{j-1})/h^2 - V'(v_j)."""
    mesh = state.v.mesh
    a = state.v.values
    lap = (mesh.shift_values(a, 1) - 2.0 * a + mesh.shift_values(a, -1)) / mesh.h**2
    return LatticeField(mesh, lap - V.deriv(a), validate=False)


def legendre(state: SecondOrderState) -> CanonicalState:
    """Legendre map: the conjugate momentum of vdot is w = vdot itself."""
    return CanonicalState(state.t, state.v.copy(), state.vdot.copy())


def inverse_legendre(state: CanonicalState) -> SecondOrderState:
    """Inverse Legendre map: vdot = w."""
    return SecondOrderState(state.t, state.v.copy(), state.w.copy())


def lagrangian_density(V: Potential, state: SecondOrderState) -> np.ndarray:
    """Per-site Lagrangian density vdot^2/2 - (D+ v)^2/2 - V(v)."""
    mesh = state.v.mesh
    dv = (mesh.shift_values(state.v.values, 1) - state.v.values) / mesh.h
    return 0.5 * state.vdot.values**2 - 0.5 * dv**2 - V.value(state.v.values)


def lagrangian_energy(V: Potential, state: SecondOrderState) -> float:
    """Energy via the Legendre display: sum (vdot * vdot - L) h."""
    mesh = state.v.mesh
    return mesh.h * float(
        np.sum(state.vdot.values**2 - lagrangian_density(V, state))
    )


def lagrangian_momentum(
    dtilde0: ShiftSeriesOperator, state: SecondOrderState
) -> float:
    """Momentum in velocity variables: sum vdot * Dt0(v) h."""
    mesh = state.v.mesh
    return mesh.h * float(
        np.dot(state.vdot.values, op_apply(dtilde0, state.v).values)
    )


_SYSTEM_CACHE: dict = {}


def step_second_order(
    V: Potential,
    state: SecondOrderState,
    dt: float,
    integrator: str = "rk4",
    newton_tol: float = 1e-12,
    max_iter: int = 50,
) -> SecondOrderState:
    """One time step of the second-order system via its first-order embedding.

    The embedding (v, vdot) -> (v, w) is the Legendre map, so the canonical
    integrators are reused verbatim; the point of the bridge is equivalence,
    not a separate scheme.
    """
    key = V.name
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = wave_system(V)
    sys: SystemSpec = _SYSTEM_CACHE[key]
    canonical = legendre(state)
    if integrator == "rk4":
        canonical = step_rk4(sys, canonical, dt)
    elif integrator == "midpoint":
        canonical = step_midpoint(sys, canonical, dt, newton_tol, max_iter)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")
    return inverse_legendre(canonical)
