"""Catalogue of candidate conserved functionals and trajectory drift monitors.

Positive candidates: energies, the nonlocal momentum, mass, the hierarchy of
higher momenta for the linear wave system, and the time-dependent
superposition family.  Negative controls: the x-weighted momentum combined
with t-scaled energy, and the transcription of the continuum Galilean booster
— both expected to drift.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .mesh import Boundary, LatticeField, MeshError, decay_margin
from .operators import (
    D_ZERO,
    OperatorError,
    ShiftSeriesOperator,
    apply as op_apply,
)
from .potentials import Potential
from .systems import (
    CanonicalState,
    SystemSpec,
    nls_system,
    step_midpoint,
    step_rk4,
    wave_system,
)
from .variational import LatticeFunctional


class DecayWarning(UserWarning):
    """A compact-support run is leaking into the edge buffers."""


def energy_wave(V: Potential) -> LatticeFunctional:
    """Wave energy H = sum (w^2/2 + (D+ v)^2/2 + V(v)) h."""
    return wave_system(V).hamiltonian


def energy_nls(F: Potential) -> LatticeFunctional:
    """Schrödinger energy H = sum ((D+ v)^2 + (D+ w)^2 - F(v^2+w^2)) h / 2."""
    return nls_system(F).hamiltonian


def momentum(dtilde0: ShiftSeriesOperator) -> LatticeFunctional:
    """Nonlocal momentum P2 = sum w * Dt0(v) h, with Dt0 skew-adjoint.

    Variational derivatives follow from skew-adjointness:
    dP2/dv = -Dt0(w), dP2/dw = Dt0(v).
    """
    if not dtilde0.skew:
        raise OperatorError("momentum requires a skew-flagged operator")

    return LatticeFunctional(
        name="P2",
        density=lambda t, v, w: w.values * op_apply(dtilde0, v).values,
        var_v=lambda t, v, w: -1.0 * op_apply(dtilde0, w),
        var_w=lambda t, v, w: op_apply(dtilde0, v),
    )


def mass() -> LatticeFunctional:
    """Mass P3 = sum (v^2 + w^2)/2 h."""
    return LatticeFunctional(
        name="P3",
        density=lambda t, v, w: 0.5 * (v.values**2 + w.values**2),
        var_v=lambda t, v, w: v.copy(),
        var_w=lambda t, v, w: w.copy(),
    )


def _hierarchy_operator(k: int) -> ShiftSeriesOperator:
    """L_k = D0 (D- D+)^k as a single (2k+3)-point antisymmetric stencil."""
    second = ShiftSeriesOperator({1: 1.0, 0: -2.0, -1: 1.0}, h_scaling=2)
    op = D_ZERO
    for _ in range(k):
        op = op.compose(second)
    # Antisymmetrize exactly so the skew flag holds bit-for-bit.
    sym = {
        off: 0.5 * (op.coeffs.get(off, 0.0) - op.coeffs.get(-off, 0.0))
        for off in op.coeffs
    }
    return ShiftSeriesOperator(sym, op.h_scaling, skew=True)


def hierarchy_Rk(k: int) -> LatticeFunctional:
    """Higher momentum R_k = sum w * D0((D- D+)^k v) h.

    The even difference is self-adjoint and D0 skew, so
    dR_k/dv = -L_k(w), dR_k/dw = L_k(v) with L_k = D0 (D- D+)^k.
    """
    if k < 0:
        raise ValueError(f"hierarchy index must be nonnegative, got {k}")
    Lk = _hierarchy_operator(k)

    return LatticeFunctional(
        name=f"R{k}",
        density=lambda t, v, w: w.values * op_apply(Lk, v).values,
        var_v=lambda t, v, w: -1.0 * op_apply(Lk, w),
        var_w=lambda t, v, w: op_apply(Lk, v),
    )


@dataclass(frozen=True)
class AlphaFunction:
    """Space-time weight for the superposition family, with time derivatives."""

    name: str
    alpha: Callable[[float, np.ndarray], np.ndarray]
    alpha_t: Callable[[float, np.ndarray], np.ndarray]
    alpha_tt: Callable[[float, np.ndarray], np.ndarray]


TABLE_ALPHAS = {
    "one": AlphaFunction(
        "one",
        lambda t, x: np.ones_like(x),
        lambda t, x: np.zeros_like(x),
        lambda t, x: np.zeros_like(x),
    ),
    "t": AlphaFunction(
        "t",
        lambda t, x: t * np.ones_like(x),
        lambda t, x: np.ones_like(x),
        lambda t, x: np.zeros_like(x),
    ),
    "x": AlphaFunction(
        "x",
        lambda t, x: x.copy(),
        lambda t, x: np.zeros_like(x),
        lambda t, x: np.zeros_like(x),
    ),
    "tx": AlphaFunction(
        "tx",
        lambda t, x: t * x,
        lambda t, x: x.copy(),
        lambda t, x: np.zeros_like(x),
    ),
    "t2px2": AlphaFunction(
        "t2px2",
        lambda t, x: t * t + x * x,
        lambda t, x: 2.0 * t * np.ones_like(x),
        lambda t, x: 2.0 * np.ones_like(x),
    ),
}


def alpha_condition_residual(
    alpha: AlphaFunction, t: float, mesh, C: float
) -> float:
    """Max residual of alpha_tt = (second difference of alpha) - C alpha.

    The superposition functional is conserved exactly when this vanishes on
    the mesh; interior points only, since compact-support shifts read zeros
    past the window edges.
    """
    x = mesh.x
    a = alpha.alpha(t, x)
    lap = (mesh.shift_values(a, 1) - 2.0 * a + mesh.shift_values(a, -1)) / mesh.h**2
    res = alpha.alpha_tt(t, x) - lap + C * a
    if mesh.boundary is Boundary.COMPACT_SUPPORT:
        res = res[1:-1]
    return float(np.max(np.abs(res)))


def superposition_T(alpha: AlphaFunction) -> LatticeFunctional:
    """Superposition functional T = sum (alpha w - alpha_t v) h.

    Conserved for the wave system when alpha satisfies the semidiscrete
    condition alpha_tt = second difference - C alpha (linear potential C).
    """

    def density(t, v, w):
        x = v.mesh.x
        return alpha.alpha(t, x) * w.values - alpha.alpha_t(t, x) * v.values

    return LatticeFunctional(
        name=f"T[{alpha.name}]",
        density=density,
        var_v=lambda t, v, w: LatticeField(
            v.mesh, -alpha.alpha_t(t, v.mesh.x), validate=False
        ),
        var_w=lambda t, v, w: LatticeField(
            v.mesh, alpha.alpha(t, v.mesh.x), validate=False
        ),
        time_dependent=True,
    )


def _require_compact(mesh, name: str):
    if mesh.boundary is not Boundary.COMPACT_SUPPORT:
        raise MeshError(
            f"{name} carries an x-weight and needs a compact-support mesh"
        )


def negative_P_star(
    dtilde0: ShiftSeriesOperator, energy: LatticeFunctional
) -> LatticeFunctional:
    """Negative control P* = t H + sum x w Dt0(v) h (expected to drift)."""
    if not dtilde0.skew:
        raise OperatorError("P* requires a skew-flagged operator")

    def density(t, v, w):
        _require_compact(v.mesh, "P*")
        return t * energy.density(t, v, w) + v.mesh.x * w.values * op_apply(
            dtilde0, v
        ).values

    def var_v(t, v, w):
        _require_compact(v.mesh, "P*")
        xw = LatticeField(v.mesh, v.mesh.x * w.values, validate=False)
        return t * energy.var_v(t, v, w) + (-1.0) * op_apply(dtilde0, xw)

    def var_w(t, v, w):
        _require_compact(v.mesh, "P*")
        xdv = v.mesh.x * op_apply(dtilde0, v).values
        return t * energy.var_w(t, v, w) + LatticeField(v.mesh, xdv, validate=False)

    return LatticeFunctional(
        name="Pstar", density=density, var_v=var_v, var_w=var_w, time_dependent=True
    )


def negative_galilean(dtilde0: ShiftSeriesOperator) -> LatticeFunctional:
    """Negative control: discrete transcription of the Galilean booster,
    P4 = sum (x/2 (v^2 + w^2) + t (w Dt0(v) - v Dt0(w))) h (expected to drift).
    """
    if not dtilde0.skew:
        raise OperatorError("P4 requires a skew-flagged operator")

    def density(t, v, w):
        _require_compact(v.mesh, "P4")
        dv = op_apply(dtilde0, v).values
        dw = op_apply(dtilde0, w).values
        x = v.mesh.x
        return 0.5 * x * (v.values**2 + w.values**2) + t * (
            w.values * dv - v.values * dw
        )

    def var_v(t, v, w):
        _require_compact(v.mesh, "P4")
        dw = op_apply(dtilde0, w).values
        return LatticeField(
            v.mesh, v.mesh.x * v.values - 2.0 * t * dw, validate=False
        )

    def var_w(t, v, w):
        _require_compact(v.mesh, "P4")
        dv = op_apply(dtilde0, v).values
        return LatticeField(
            v.mesh, v.mesh.x * w.values + 2.0 * t * dv, validate=False
        )

    return LatticeFunctional(
        name="P4", density=density, var_v=var_v, var_w=var_w, time_dependent=True
    )


class Verdict(enum.Enum):
    CONSERVED = "Conserved"
    AFFINE_CONSERVED = "AffineConserved"
    VIOLATED = "Violated"


@dataclass
class ConservationReport:
    """Drift record of one functional along one trajectory."""

    name: str
    times: np.ndarray
    values: np.ndarray
    drift_raw: float
    drift_affine: float
    affine_slope: float
    affine_permitted: bool
    tolerance: float
    scale: float
    verdict: Verdict
    max_decay_margin: float = 0.0

    @property
    def drift_abs(self) -> float:
        return self.drift_affine if self.affine_permitted else self.drift_raw


def _affine_residual(times: np.ndarray, values: np.ndarray):
    """Least-squares fit values ~ a t + b; returns (max residual, a)."""
    A = np.vstack([times, np.ones_like(times)]).T
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = values - A @ coef
    return float(np.max(np.abs(resid))), float(coef[0])


def classify(
    name: str,
    times: np.ndarray,
    values: np.ndarray,
    tol: float,
    affine_permitted: bool,
) -> ConservationReport:
    """Build a report; drift is measured relative to max(|values|, 1)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    drift_raw = float(np.max(np.abs(values - values[0])))
    drift_affine, slope = _affine_residual(times, values)
    scale = max(float(np.max(np.abs(values))), 1.0)
    if drift_raw / scale < tol:
        verdict = Verdict.CONSERVED
    elif affine_permitted and drift_affine / scale < tol:
        verdict = Verdict.AFFINE_CONSERVED
    else:
        verdict = Verdict.VIOLATED
    return ConservationReport(
        name=name,
        times=times,
        values=values,
        drift_raw=drift_raw,
        drift_affine=drift_affine,
        affine_slope=slope,
        affine_permitted=affine_permitted,
        tolerance=tol,
        scale=scale,
        verdict=verdict,
    )


def monitor(
    sys: SystemSpec,
    functionals: Sequence[LatticeFunctional],
    state0: CanonicalState,
    dt: float,
    t_end: float,
    integrator: str = "midpoint",
    tol: float = 1e-8,
    sample_stride: int = 10,
    newton_tol: float = 1e-12,
    max_iter: int = 50,
    decay_threshold: float = 1e-10,
    decay_action: str = "warn",
) -> list:
    """Integrate the system and report the drift of each functional.

    Affine-offset removal is permitted only for time-independent functionals
    (the Hamiltonians here are autonomous).  In compact-support mode the edge
    buffers are checked against decay_threshold every sample; decay_action is
    'warn', 'error', or 'ignore'.
    """
    n_steps = int(round(t_end / dt))
    state = state0.copy()
    times = [state.t]
    series = [[f.value(state.t, state.v, state.w)] for f in functionals]
    max_margin = 0.0

    def check_decay(st: CanonicalState):
        nonlocal max_margin
        if st.mesh.boundary is not Boundary.COMPACT_SUPPORT or decay_action == "ignore":
            return
        margin = max(decay_margin(st.v), decay_margin(st.w))
        max_margin = max(max_margin, margin)
        if margin > decay_threshold:
            msg = (
                f"edge buffer amplitude {margin:.3e} exceeds decay threshold "
                f"{decay_threshold:.3e} at t={st.t:.6g}"
            )
            if decay_action == "error":
                raise MeshError(msg)
            warnings.warn(msg, DecayWarning, stacklevel=2)

    check_decay(state)
    for step in range(1, n_steps + 1):
        if integrator == "midpoint":
            state = step_midpoint(sys, state, dt, newton_tol, max_iter)
        elif integrator == "rk4":
            state = step_rk4(sys, state, dt)
        else:
            raise ValueError(f"unknown integrator {integrator!r}")
        if step % sample_stride == 0 or step == n_steps:
            check_decay(state)
            times.append(state.t)
            for vals, f in zip(series, functionals):
                vals.append(f.value(state.t, state.v, state.w))

    reports = []
    for f, vals in zip(functionals, series):
        reports.append(
            classify(
                f.name,
                np.array(times),
                np.array(vals),
                tol,
                affine_permitted=not f.time_dependent,
            )
        )
    for r in reports:
        r.max_decay_margin = max_margin
    return reports
