"""Thermodynamics of a polytropic ideal gas in one space dimension.

Owns the three state representations used by the Navier-Stokes solver and
the exact conversions between them:

  conserved  U = (rho, rho*u, rho*e)         with e = eps + u^2/2, eps = p/(rho*(gamma-1))
  primitive  (rho, u, T)                     with p = rho*R*T, beta = 1/(2*R*T)
  entropy    V = d(eta)/dU                   for eta = -rho*s/(gamma-1), s = ln(p/rho^gamma)

V is the exact gradient of eta (verified against finite differences in the
tests), so its first component carries the additive constant gamma/(gamma-1)
relative to the common shorthand that drops state-independent terms; the
constant cancels from every jump, gradient and boundary construction the
scheme uses.

All functions are vectorized over leading axes; states may hold scalars or
arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meshbasis import InvalidArgumentError


class PositivityError(FloatingPointError):
    """A state left the physical region (rho <= 0 or internal energy <= 0).

    ``where`` holds the offending flat indices when array input was given.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class InvalidEntropyStateError(ValueError):
    """Entropy variables with v3 >= 0 do not correspond to a physical state."""


@dataclass(frozen=True)
class GasModel:
    """Ratio of specific heats, gas constant, Prandtl number and viscosity law.

    The viscosity law is mu(T) = mu_ref * (T / t_ref)**omega; omega = 0 gives
    a constant coefficient.  Heat conduction follows from the Prandtl number,
    kappa = mu * gamma * R / ((gamma - 1) * Pr).
    """

    gamma: float = 7.0 / 5.0
    R: float = 1.0
    prandtl: float = 2.0 / 3.0
    mu_ref: float = 0.0
    t_ref: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise InvalidArgumentError("gamma must exceed 1")
        if self.R <= 0 or self.prandtl <= 0:
            raise InvalidArgumentError("gas constant and Prandtl number must be positive")
        if self.mu_ref < 0 or self.t_ref <= 0:
            raise InvalidArgumentError("viscosity law parameters out of range")

    @property
    def cp(self) -> float:
        return self.gamma * self.R / (self.gamma - 1.0)

    @property
    def cv(self) -> float:
        return self.R / (self.gamma - 1.0)

    def viscosity(self, T):
        if self.omega == 0.0:
            return self.mu_ref * np.ones_like(np.asarray(T, dtype=float))
        return self.mu_ref * (np.asarray(T) / self.t_ref) ** self.omega

    def conductivity(self, T):
        return self.viscosity(T) * self.gamma * self.R / ((self.gamma - 1.0) * self.prandtl)

    def sound_speed(self, T):
        return np.sqrt(self.gamma * self.R * np.asarray(T))


@dataclass(frozen=True)
class PrimitiveState1D:
    """Density, velocity, temperature; pressure and beta are derived."""

    rho: np.ndarray
    u: np.ndarray
    T: np.ndarray

    def pressure(self, gas: GasModel):
        return self.rho * gas.R * self.T

    def beta(self, gas: GasModel):
        """Kinetic parameter of the Maxwellian, 1/(2RT)."""
        return 1.0 / (2.0 * gas.R * self.T)


@dataclass(frozen=True)
class EntropyState1D:
    """Entropy variables (v1, v2, v3) with v3 = -1/(RT) < 0."""

    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([np.asarray(self.v1), np.asarray(self.v2), np.asarray(self.v3)], axis=-1)


def _check_positive(rho, eint, context: str):
    bad = ~((np.asarray(rho) > 0) & (np.asarray(eint) > 0))
    if np.any(bad):
        where = np.flatnonzero(np.atleast_1d(bad))
        raise PositivityError(
            f"non-physical state in {context}: rho or internal energy <= 0 "
            f"at flat indices {where[:8].tolist()}"
            + ("..." if where.size > 8 else ""),
            where=where)


def conserved_to_primitive(U: np.ndarray, gas: GasModel) -> PrimitiveState1D:
    """Invert U = (rho, rho*u, rho*e); raises PositivityError off the physical set."""
    U = np.asarray(U, dtype=float)
    rho = U[..., 0]
    u = U[..., 1] / rho
    eint = U[..., 2] / rho - 0.5 * u * u        # eps = e - u^2/2
    _check_positive(rho, eint, "conserved_to_primitive")
    T = eint * (gas.gamma - 1.0) / gas.R
    return PrimitiveState1D(rho=rho, u=u, T=T)


def primitive_to_conserved(prim: PrimitiveState1D, gas: GasModel) -> np.ndarray:
    rho, u, T = (np.asarray(a, dtype=float) for a in (prim.rho, prim.u, prim.T))
    _check_positive(rho, T, "primitive_to_conserved")
    eint = gas.R * T / (gas.gamma - 1.0)
    return np.stack([rho, rho * u, rho * (eint + 0.5 * u * u)], axis=-1)


def physical_entropy(prim: PrimitiveState1D, gas: GasModel):
    """s = ln(p / rho^gamma) with the additive constant set to zero."""
    p = prim.pressure(gas)
    return np.log(p) - gas.gamma * np.log(prim.rho)


def conserved_to_entropy(U: np.ndarray, gas: GasModel) -> EntropyState1D:
    """Exact entropy variables V = d(eta)/dU."""
    prim = conserved_to_primitive(U, gas)
    s = physical_entropy(prim, gas)
    rt = gas.R * prim.T
    g = gas.gamma
    v1 = (g - s) / (g - 1.0) - 0.5 * prim.u ** 2 / rt
    v2 = prim.u / rt
    v3 = -1.0 / rt
    return EntropyState1D(v1=v1, v2=v2, v3=v3)


def entropy_to_primitive(V: np.ndarray, gas: GasModel) -> PrimitiveState1D:
    V = np.asarray(V, dtype=float)
    v1, v2, v3 = V[..., 0], V[..., 1], V[..., 2]
    if np.any(v3 >= 0):
        raise InvalidEntropyStateError("entropy state requires v3 < 0")
    g = gas.gamma
    rt = -1.0 / v3
    T = rt / gas.R
    u = -v2 / v3
    s = g - (g - 1.0) * (v1 + 0.5 * u ** 2 / rt)
    rho = np.exp((np.log(rt) - s) / (g - 1.0))
    return PrimitiveState1D(rho=rho, u=u, T=T)


def entropy_to_conserved(V: np.ndarray, gas: GasModel) -> np.ndarray:
    return primitive_to_conserved(entropy_to_primitive(V, gas), gas)


def entropy_pair(U: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """Entropy eta = -rho*s/(gamma-1) and its flux theta = eta*u."""
    prim = conserved_to_primitive(U, gas)
    s = physical_entropy(prim, gas)
    eta = -prim.rho * s / (gas.gamma - 1.0)
    return eta, eta * prim.u


def entropy_flux_potential(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """Legendre dual of the entropy flux, theta* = V . F(U) - theta."""
    from .kfvs import euler_flux  # local import; kfvs depends on this module
    V = conserved_to_entropy(U, gas).as_array()
    _, theta = entropy_pair(U, gas)
    return np.einsum("...c,...c->...", V, euler_flux(conserved_to_primitive(U, gas), gas)) - theta


def dUdV(V: np.ndarray, gas: GasModel) -> np.ndarray:
    """Jacobian dU/dV, the symmetric positive definite symmetrizer.

    Closed form in primitive quantities; rows/columns ordered like U.
    """
    prim = entropy_to_primitive(np.asarray(V, dtype=float), gas)
    rho, u, T = prim.rho, prim.u, prim.T
    p = prim.pressure(gas)
    eps = gas.R * T / (gas.gamma - 1.0)
    e = eps + 0.5 * u * u
    E = rho * e
    m = rho * u
    a0 = np.empty(np.shape(rho) + (3, 3))
    a0[..., 0, 0] = rho
    a0[..., 0, 1] = m
    a0[..., 0, 2] = E
    a0[..., 1, 0] = m
    a0[..., 1, 1] = p + rho * u * u
    a0[..., 1, 2] = (E + p) * u
    a0[..., 2, 0] = E
    a0[..., 2, 1] = (E + p) * u
    a0[..., 2, 2] = rho * e * e + p * (eps + u * u)
    return a0


def transport(prim: PrimitiveState1D, gas: GasModel, du_dx, dT_dx) -> tuple[np.ndarray, np.ndarray]:
    """Shear stress and heat flux, tau = (4/3) mu u_x and q = -kappa T_x."""
    tau = (4.0 / 3.0) * gas.viscosity(prim.T) * np.asarray(du_dx)
    q = -gas.conductivity(prim.T) * np.asarray(dT_dx)
    return tau, q
