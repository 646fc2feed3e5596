"""Shift-power difference operators on lattice fields.

Provides the elementary divided differences (right, left, central) and a
nonlocal skew-adjoint operator built from a convergent series over odd
shift powers.  The series coefficients are computed two independent ways:
the production path sums each coefficient's positive-term series directly,
and a cross-check path composes powers of the central difference.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _series
from .mesh import Boundary, LatticeField, Mesh, MeshError


class OperatorError(ValueError):
    pass


class AliasingWarning(UserWarning):
    """Operator support wraps all the way around a periodic mesh."""


@dataclass(frozen=True)
class ShiftSeriesOperator:
    """Finite linear combination of lattice shifts, optionally scaled by 1/h.

    The action is g_j = (1/h**h_scaling) * sum_k coeffs[k] * f_{j+k}.
    """

    coeffs: Mapping[int, float]
    h_scaling: int = 0
    skew: bool = False

    def __post_init__(self):
        clean = {int(k): float(c) for k, c in self.coeffs.items() if c != 0.0}
        object.__setattr__(self, "coeffs", MappingProxyType(clean))
        if self.h_scaling < 0:
            raise OperatorError(f"h_scaling must be nonnegative, got {self.h_scaling}")
        if self.skew:
            if clean.get(0, 0.0) != 0.0:
                raise OperatorError("skew operator has a nonzero 0-shift coefficient")
            for k, c in clean.items():
                if clean.get(-k) != -c:
                    raise OperatorError(
                        f"skew operator coefficients are not antisymmetric at k={k}"
                    )

    @property
    def support(self) -> int:
        """Largest |shift offset| with a nonzero coefficient."""
        return max((abs(k) for k in self.coeffs), default=0)

    def apply(self, f: LatticeField) -> LatticeField:
        return apply(self, f)

    def adjoint(self) -> "ShiftSeriesOperator":
        return adjoint(self)

    def compose(self, other: "ShiftSeriesOperator") -> "ShiftSeriesOperator":
        """Operator product self ∘ other by coefficient convolution."""
        out: dict[int, float] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0.0) + c1 * c2
        return ShiftSeriesOperator(out, self.h_scaling + other.h_scaling)

    def scaled(self, factor: float) -> "ShiftSeriesOperator":
        return ShiftSeriesOperator(
            {k: factor * c for k, c in self.coeffs.items()},
            self.h_scaling,
            self.skew,
        )

    def symbol(self, kappa: float, h: float) -> complex:
        """Fourier symbol: the operator's eigenvalue on exp(i*kappa*x)."""
        return sum(
            c * np.exp(1j * kappa * h * k) for k, c in self.coeffs.items()
        ) / h**self.h_scaling


IDENTITY = ShiftSeriesOperator({0: 1.0})
D_PLUS = ShiftSeriesOperator({1: 1.0, 0: -1.0}, h_scaling=1)
D_MINUS = ShiftSeriesOperator({0: 1.0, -1: -1.0}, h_scaling=1)
D_ZERO = ShiftSeriesOperator({1: 0.5, -1: -0.5}, h_scaling=1, skew=True)


def apply(op: ShiftSeriesOperator, f: LatticeField) -> LatticeField:
    """Apply a shift-series operator to a field under its mesh's boundary mode."""
    mesh = f.mesh
    n = mesh.n_points
    if op.support >= n and mesh.boundary is Boundary.PERIODIC:
        # Folding a wrap-around stencil is exact for periodic lattice data and
        # preserves antisymmetry of the coefficients, so we allow it loudly.
        warnings.warn(
            f"operator support {op.support} wraps around a periodic mesh of "
            f"{n} points; stencil folds onto itself",
            AliasingWarning,
            stacklevel=2,
        )
    out = np.zeros(n)
    vals = f.values
    if mesh.boundary is Boundary.PERIODIC:
        for k, c in op.coeffs.items():
            out += c * np.roll(vals, -k)
    else:
        for k, c in op.coeffs.items():
            out += c * mesh.shift_values(vals, k)
    if op.h_scaling:
        out /= mesh.h**op.h_scaling
    return LatticeField(mesh, out, validate=False)


def adjoint(op: ShiftSeriesOperator) -> ShiftSeriesOperator:
    """Adjoint with respect to the h-weighted inner product: k -> -k."""
    return ShiftSeriesOperator(
        {-k: c for k, c in op.coeffs.items()}, op.h_scaling, op.skew
    )


def d_plus(f: LatticeField) -> LatticeField:
    """Right divided difference (f_{j+1} - f_j)/h."""
    return apply(D_PLUS, f)


def d_minus(f: LatticeField) -> LatticeField:
    """Left divided difference (f_j - f_{j-1})/h."""
    return apply(D_MINUS, f)


def d_zero(f: LatticeField) -> LatticeField:
    """Central divided difference (f_{j+1} - f_{j-1})/(2h)."""
    return apply(D_ZERO, f)


def second_difference(f: LatticeField) -> LatticeField:
    """Three-point second divided difference (f_{j+1} - 2 f_j + f_{j-1})/h^2."""
    return d_minus(d_plus(f))


def compute_alpha(K: int) -> np.ndarray:
    """Odd-power expansion coefficients alpha_1, alpha_3, ..., alpha_{2K+1}.

    Closed form alpha_{2k+1} = (-1)^k (2k-1)!! / (2^k k! (2k+1)), evaluated
    by the term-to-term ratio to avoid factorial overflow.
    """
    if K < 0:
        raise OperatorError(f"K must be nonnegative, got {K}")
    alpha = np.empty(K + 1)
    alpha[0] = 1.0
    for k in range(K):
        alpha[k + 1] = alpha[k] * (
            -((2 * k + 1) ** 2) / (2.0 * (k + 1) * (2 * k + 3))
        )
    return alpha


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coefficients of the nonlocal central-derivative series.

    alpha holds the odd-power expansion coefficients up to order 2K+1; c
    holds the shift-series coefficients c_0..c_P with a tail estimate from
    the convergence proof's term bound.
    """

    alpha: np.ndarray
    c: np.ndarray
    truncation_k: int
    truncation_p: int
    tail_estimate: float
    stop_indices: np.ndarray = field(default=None, repr=False)


_C_CACHE: dict[tuple[int, float], SeriesCoefficients] = {}


def compute_c(
    P: int, tol: float = 1e-12, tail_correction: bool = True
) -> SeriesCoefficients:
    """Sum the coefficient series for c_0..c_P to relative term tolerance tol.

    Each |c_p| is accumulated from its positive-term series until the current
    term drops below tol times the partial sum; the sign is (-1)^p.  The
    neglected tail closely matches the analytic term bound
    1/(pi k (k+1+p)) e^(1/12k) summed past the stopping index, so that bound
    is added back as a correction (tail_correction=True, the default),
    leaving coefficients accurate to roughly tol.  Results are cached
    in-process (the strict stopping rule is expensive at small tol).
    """
    if P < 0:
        raise OperatorError(f"P must be nonnegative, got {P}")
    if not tol > 0:
        raise OperatorError(f"tol must be positive, got {tol}")
    key = (P, tol, tail_correction)
    if key in _C_CACHE:
        return _C_CACHE[key]
    c = np.empty(P + 1)
    stops = np.empty(P + 1, dtype=np.int64)
    tail = 0.0
    for p in range(P + 1):
        s, k_stop = _series.sum_coefficient_series(p, tol)
        bound = _series.tail_bound(p, k_stop)
        if tail_correction:
            s += bound
        c[p] = s if p % 2 == 0 else -s
        stops[p] = k_stop
        tail = max(tail, bound)
    result = SeriesCoefficients(
        alpha=compute_alpha(P),
        c=c,
        truncation_k=P,
        truncation_p=P,
        tail_estimate=float(tail),
        stop_indices=stops,
    )
    _C_CACHE[key] = result
    return result


def build_dtilde0(P: int, tol: float = 1e-12) -> ShiftSeriesOperator:
    """Truncated nonlocal central-derivative operator.

    Shift-series form (1/2h) * sum_p c_p (S_{2p+1} - S_{-(2p+1)}) truncated
    at p = P; exactly skew-adjoint for every truncation.
    """
    series = compute_c(P, tol)
    coeffs: dict[int, float] = {}
    for p, cp in enumerate(series.c):
        coeffs[2 * p + 1] = cp / 2.0
        coeffs[-(2 * p + 1)] = -cp / 2.0
    return ShiftSeriesOperator(coeffs, h_scaling=1, skew=True)


def dtilde0_from_alpha(K: int) -> ShiftSeriesOperator:
    """Cross-check route: sum_{k<=K} alpha_{2k+1} h^{2k} D0^{2k+1} as one stencil.

    Composes explicit central-difference powers; the h^{2k} prefactor cancels
    the extra 1/h powers of D0^{2k+1}, leaving a single overall 1/h.
    """
    alpha = compute_alpha(K)
    d0_squared = D_ZERO.compose(D_ZERO)
    power = D_ZERO
    total: dict[int, float] = {}
    for k in range(K + 1):
        if k > 0:
            power = power.compose(d0_squared)
        for off, coef in power.coeffs.items():
            total[off] = total.get(off, 0.0) + alpha[k] * coef
    # Composition roundoff can break exact antisymmetry; restore it so the
    # skew flag holds bit-for-bit.
    sym = {off: 0.5 * (total.get(off, 0.0) - total.get(-off, 0.0)) for off in total}
    return ShiftSeriesOperator(sym, h_scaling=1, skew=True)


def dtilde0_symbol(series: SeriesCoefficients, kappa: float, h: float) -> float:
    """Real Fourier symbol of the truncated operator on exp(i*kappa*x)."""
    p = np.arange(series.truncation_p + 1)
    return float(np.sum(series.c * np.sin((2 * p + 1) * kappa * h)) / h)
