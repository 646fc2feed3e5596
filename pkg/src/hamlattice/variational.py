"""Sum-over-mesh functionals, variational derivatives, and the canonical bracket.

A functional is F[v, w] = h * sum_j density_j(t, v, w).  Its variational
derivative with respect to a field is the lattice gradient, assembled either
from closed-form expressions or from per-offset density partials via the
adjoint-shift rule  dF/du_j = sum_s S_{-s} (d density / d u_{j+s}).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from .mesh import LatticeField, MeshError, inner_product

DensityFn = Callable[[float, LatticeField, LatticeField], np.ndarray]
VarFn = Callable[[float, LatticeField, LatticeField], LatticeField]


@dataclass(frozen=True)
class LatticeFunctional:
    """Named sum-functional with closed-form variational derivatives."""

    name: str
    density: DensityFn
    var_v: VarFn
    var_w: VarFn
    time_dependent: bool = False

    def value(self, t: float, v: LatticeField, w: LatticeField) -> float:
        if v.mesh != w.mesh:
            raise MeshError("functional arguments live on different meshes")
        return v.mesh.h * float(np.sum(self.density(t, v, w)))


def from_stencil(
    name: str,
    density: DensityFn,
    partials_v: Mapping[int, DensityFn],
    partials_w: Mapping[int, DensityFn],
    time_dependent: bool = False,
) -> LatticeFunctional:
    """Build a functional whose variational derivatives come from the
    adjoint-shift rule applied to per-offset density partials.

    partials_v[s](t, v, w) must return the array of d density_j / d v_{j+s};
    the derivative is then sum_s S_{-s} of that array (and likewise for w).
    """

    def make_var(partials: Mapping[int, DensityFn]) -> VarFn:
        items = tuple(partials.items())

        def var(t: float, v: LatticeField, w: LatticeField) -> LatticeField:
            mesh = v.mesh
            out = np.zeros(mesh.n_points)
            for s, partial in items:
                out += mesh.shift_values(partial(t, v, w), -s)
            return LatticeField(mesh, out, validate=False)

        return var

    return LatticeFunctional(
        name=name,
        density=density,
        var_v=make_var(partials_v),
        var_w=make_var(partials_w),
        time_dependent=time_dependent,
    )


def poisson_bracket(
    P: LatticeFunctional,
    L: LatticeFunctional,
    t: float,
    v: LatticeField,
    w: LatticeField,
) -> float:
    """Canonical bracket {P, L} = h * sum_j (dP/dv dL/dw - dP/dw dL/dv)."""
    pv, pw = P.var_v(t, v, w), P.var_w(t, v, w)
    lv, lw = L.var_v(t, v, w), L.var_w(t, v, w)
    return inner_product(pv, lw) - inner_product(pw, lv)


@dataclass(frozen=True)
class HamiltonianVectorField:
    """Evolutionary field with coefficients eta_v on d/dv and eta_w on d/dw."""

    name: str
    eta_v: VarFn
    eta_w: VarFn


def hamiltonian_field_of(P: LatticeFunctional) -> HamiltonianVectorField:
    """The canonical Hamiltonian vector field (dP/dw, -dP/dv) of a functional."""
    return HamiltonianVectorField(
        name=f"X[{P.name}]",
        eta_v=P.var_w,
        eta_w=lambda t, v, w: -1.0 * P.var_v(t, v, w),
    )


def is_hamiltonian_field(
    F: HamiltonianVectorField,
    candidate: LatticeFunctional,
    states: Sequence[Tuple[float, LatticeField, LatticeField]],
    tol: float = 1e-10,
) -> bool:
    """True iff F agrees with the Hamiltonian field of candidate on all states."""
    if not states:
        raise ValueError("need at least one sample state")
    worst = 0.0
    for t, v, w in states:
        dv = F.eta_v(t, v, w).values - candidate.var_w(t, v, w).values
        dw = F.eta_w(t, v, w).values + candidate.var_v(t, v, w).values
        worst = max(worst, float(np.max(np.abs(dv))) + float(np.max(np.abs(dw))))
    return worst < tol


def gateaux_defect(
    P: LatticeFunctional,
    t: float,
    v: LatticeField,
    w: LatticeField,
    direction_v: LatticeField,
    direction_w: LatticeField,
    eps: float,
) -> float:
    """Defect of the central-difference directional derivative against
    the inner product with the closed-form variational derivatives.

    Returns |(P(u+eps d) - P(u-eps d))/(2 eps) - <var, d>|, which should be
    O(eps^2) when the variational derivatives are correct.
    """
    plus = P.value(t, v + eps * direction_v, w + eps * direction_w)
    minus = P.value(t, v - eps * direction_v, w - eps * direction_w)
    fd = (plus - minus) / (2.0 * eps)
    exact = inner_product(P.var_v(t, v, w), direction_v) + inner_product(
        P.var_w(t, v, w), direction_w
    )
    return abs(fd - exact)
