"""Scalar potentials for the wave system (V) and the Schrödinger system (F)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Potential:
    """Scalar potential with its first and second derivatives.

    For the wave system the argument is the field value v; for the
    Schrödinger system it is the squared modulus z = v^2 + w^2.
    """

    name: str
    value: ArrayFn
    deriv: ArrayFn
    second_deriv: ArrayFn
    quadratic_coefficient: float | None = None

    @property
    def is_quadratic(self) -> bool:
        return self.quadratic_coefficient is not None


def zero_potential() -> Potential:
    return Potential(
        "zero",
        lambda u: np.zeros_like(u),
        lambda u: np.zeros_like(u),
        lambda u: np.zeros_like(u),
        quadratic_coefficient=0.0,
    )


def quadratic_potential(C: float) -> Potential:
    """V(v) = C v^2 / 2 (linear wave; Klein-Gordon mass term for C > 0)."""
    return Potential(
        f"quadratic(C={C:g})",
        lambda u: 0.5 * C * u**2,
        lambda u: C * u,
        lambda u: C * np.ones_like(u),
        quadratic_coefficient=float(C),
    )


def quartic_potential(C: float = 1.0) -> Potential:
    """V(v) = C v^4 / 4, a genuinely nonlinear wave potential."""
    return Potential(
        f"quartic(C={C:g})",
        lambda u: 0.25 * C * u**4,
        lambda u: C * u**3,
        lambda u: 3.0 * C * u**2,
    )


def cubic_focusing(C: float = 1.0) -> Potential:
    """F(z) = C z^2 / 2, giving the cubic Schrödinger nonlinearity F'(z) z."""
    return Potential(
        f"cubic(C={C:g})",
        lambda z: 0.5 * C * z**2,
        lambda z: C * z,
        lambda z: C * np.ones_like(z),
    )


WAVE_POTENTIALS = {
    "zero": lambda C: zero_potential(),
    "quadratic": quadratic_potential,
    "quartic": quartic_potential,
}

NLS_POTENTIALS = {
    "zero": lambda C: zero_potential(),
    "cubic": cubic_focusing,
}
