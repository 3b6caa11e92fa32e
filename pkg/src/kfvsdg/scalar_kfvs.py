"""Kinetic split fluxes for the scalar convection-diffusion equation.

The transported quantity is attached to a Maxwellian velocity distribution
g(v, u) = u * sqrt(beta/pi) * exp(-beta (v - c)^2).  Integrating v*g over the
half spaces v > 0 and v < 0 gives closed-form split fluxes in terms of the
error function; the numerical flux upwinds molecules by their direction of
motion, F(u_plus, u_minus) = F_plus(u_plus) + F_minus(u_minus), where
``plus`` is the left-of-face trace (see meshbasis docs).

A first-order Chapman-Enskog correction with relaxation time tau = 2*beta*mu
extends the splitting to the diffusive flux -mu*u_x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .meshbasis import InvalidArgumentError


@dataclass(frozen=True)
class ScalarKinetics:
    """Advection speed, kinetic parameter and diffusion coefficient.

    beta is a free parameter of the kinetic model; beta -> inf recovers the
    plain upwind flux.  All published runs reproduced here use beta = 1.
    """

    c: float = 1.0
    beta: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if self.beta <= 0:
            raise InvalidArgumentError(f"kinetic parameter beta must be positive, got {self.beta}")
        if self.mu < 0:
            raise InvalidArgumentError(f"diffusion coefficient must be nonnegative, got {self.mu}")


@dataclass(frozen=True)
class SplitCoeffs:
    """Half-space moments of the unit Maxwellian.

    a_plus + a_minus = 1, b_plus + b_minus = 0, b_plus >= 0; s = c*sqrt(beta).
    """

    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    s: float


def split_coeffs(c: float, beta: float) -> SplitCoeffs:
    """A and B coefficients of the half-space flux integrals."""
    if beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")
    s = c * np.sqrt(beta)
    e = float(erf(s))
    g = float(np.exp(-s * s) / (2.0 * np.sqrt(np.pi * beta)))
    return SplitCoeffs(a_plus=0.5 * (1.0 + e), a_minus=0.5 * (1.0 - e),
                       b_plus=g, b_minus=-g, s=float(s))


def split_flux(u, c: float, beta: float, side: str) -> np.ndarray:
    """Half-space convective flux F_side(u) = c*u*A_side + u*B_side."""
    k = split_coeffs(c, beta)
    if side == "+":
        return c * np.asarray(u) * k.a_plus + np.asarray(u) * k.b_plus
    if side == "-":
        return c * np.asarray(u) * k.a_minus + np.asarray(u) * k.b_minus
    raise InvalidArgumentError(f"side must be '+' or '-', got {side!r}")


def dissipation_coefficient(c: float, beta: float) -> float:
    """Jump-dissipation rate D = c*erf(s) + exp(-s^2)/sqrt(pi*beta), always > 0.

    D is even in c and tends to |c| (the upwind value) as beta -> inf.
    """
    if beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")
    s = c * np.sqrt(beta)
    return float(c * erf(s) + np.exp(-s * s) / np.sqrt(np.pi * beta))


def convective_numerical_flux(u_plus, u_minus, c: float, beta: float):
    """Kinetic upwind flux, equal to a central flux plus jump dissipation.

    F = (c*u_plus + c*u_minus)/2 + D*(u_plus - u_minus)/2; consistent with
    F(u, u) = c*u and identical to F_plus(u_plus) + F_minus(u_minus).
    """
    d = dissipation_coefficient(c, beta)
    return 0.5 * c * (np.asarray(u_plus) + np.asarray(u_minus)) \
        + 0.5 * d * (np.asarray(u_plus) - np.asarray(u_minus))


def diffusive_split_flux(u_x, mu: float, side: str, coeffs: SplitCoeffs):
    """Half-space diffusive flux F_d_side(u_x) = -mu * u_x * A_side."""
    if mu < 0:
        raise InvalidArgumentError(f"mu must be nonnegative, got {mu}")
    a = coeffs.a_plus if side == "+" else coeffs.a_minus
    if side not in ("+", "-"):
        raise InvalidArgumentError(f"side must be '+' or '-', got {side!r}")
    return -mu * np.asarray(u_x) * a


def diffusive_numerical_flux(ux_plus, ux_minus, mu: float, coeffs: SplitCoeffs):
    """Total diffusive face flux F_d = -mu*(ux_plus*A_plus + ux_minus*A_minus)."""
    return -mu * (np.asarray(ux_plus) * coeffs.a_plus + np.asarray(ux_minus) * coeffs.a_minus)
