"""Kinetic flux vector splitting for the 1-D Euler and Navier-Stokes fluxes.

Half-space moments of the Maxwellian give closed-form inviscid split fluxes;
the first Chapman-Enskog correction gives viscous split fluxes expressed in
the shear stress tau and heat flux q.  A face flux upwinds molecules by sign
of velocity: H = F_plus(left state) + F_minus(right state), following the
trace convention of :mod:`kfvsdg.meshbasis` (plus = left of the face).

Also provides the entropy-dissipation diagnostic that samples the systems
generalization of Osher's E-flux inequality along the straight segment
between two entropy states.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

from .gas import (
    GasModel,
    PrimitiveState1D,
    entropy_flux_potential,
    entropy_to_conserved,
    entropy_to_primitive,
    primitive_to_conserved,
)
from .meshbasis import InvalidArgumentError


def _split_weights(prim: PrimitiveState1D, gas: GasModel, side: str):
    """A and B coefficients at the molecular-speed ratio s = u*sqrt(beta)."""
    beta = prim.beta(gas)
    s = prim.u * np.sqrt(beta)
    b = np.exp(-s * s) / (2.0 * np.sqrt(np.pi * beta))
    if side == "+":
        return 0.5 * (1.0 + erf(s)), b
    if side == "-":
        return 0.5 * (1.0 - erf(s)), -b
    raise InvalidArgumentError(f"side must be '+' or '-', got {side!r}")


def euler_flux(prim: PrimitiveState1D, gas: GasModel) -> np.ndarray:
    """Exact inviscid flux (rho*u, p + rho*u^2, (rho*e + p)*u)."""
    U = primitive_to_conserved(prim, gas)
    p = prim.pressure(gas)
    re = U[..., 2]
    return np.stack([U[..., 1], p + prim.rho * prim.u ** 2, (re + p) * prim.u], axis=-1)


def viscous_flux(prim: PrimitiveState1D, tau, q) -> np.ndarray:
    """Exact viscous flux (0, -tau, -tau*u + q)."""
    tau = np.asarray(tau, dtype=float)
    q = np.asarray(q, dtype=float)
    zero = np.zeros_like(tau)
    return np.stack([zero, -tau, -tau * prim.u + q], axis=-1)


def euler_split(prim: PrimitiveState1D, gas: GasModel, side: str) -> np.ndarray:
    """Half-space inviscid flux; the two sides sum to the exact Euler flux."""
    a, b = _split_weights(prim, gas, side)
    U = primitive_to_conserved(prim, gas)
    rho, u = prim.rho, prim.u
    p = prim.pressure(gas)
    re = U[..., 2]
    return np.stack([
        rho * u * a + rho * b,
        (p + rho * u * u) * a + rho * u * b,
        (re + p) * u * a + (re + 0.5 * p) * b,
    ], axis=-1)


def euler_kfvs_flux(prim_plus: PrimitiveState1D, prim_minus: PrimitiveState1D,
                    gas: GasModel) -> np.ndarray:
    """Inviscid face flux F_plus(left trace) + F_minus(right trace)."""
    return euler_split(prim_plus, gas, "+") + euler_split(prim_minus, gas, "-")


def viscous_split(prim: PrimitiveState1D, tau, q, gas: GasModel, side: str) -> np.ndarray:
    """Half-space viscous flux from the Chapman-Enskog distribution.

    The two sides sum exactly to (0, -tau, -tau*u + q); note the nonzero mass
    component of each half: streaming molecules carry a viscous mass flux that
    only cancels in the sum.
    """
    a, b = _split_weights(prim, gas, side)
    beta = prim.beta(gas)
    u = prim.u
    tau = np.asarray(tau, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.stack([
        -(tau + 0.8 * beta * u * q) * beta * b,
        -tau * a + 0.8 * beta * q * b,
        (-u * tau + q) * a - (1.5 * tau + 0.4 * beta * u * q) * b,
    ], axis=-1)


def viscous_split_linear(prim: PrimitiveState1D, gas: GasModel, side: str):
    """Coefficient vectors (G_tau, G_q) with viscous_split = tau*G_tau + q*G_q.

    The half-range viscous flux is linear in (tau, q) at a frozen state; the
    adjoint stabilization terms in the DG scheme need that linear map applied
    to test-function data, so it is exposed separately.
    """
    a, b = _split_weights(prim, gas, side)
    beta = prim.beta(gas)
    u = np.asarray(prim.u, dtype=float)
    g_tau = np.stack([-beta * b, -a + 0.0 * b, -u * a - 1.5 * b], axis=-1)
    g_q = np.stack([-0.8 * beta ** 2 * u * b, 0.8 * beta * b, a - 0.4 * beta * u * b], axis=-1)
    return g_tau, g_q


def ns_kfvs_flux(prim_plus: PrimitiveState1D, tau_plus, q_plus,
                 prim_minus: PrimitiveState1D, tau_minus, q_minus,
                 gas: GasModel) -> np.ndarray:
    """Total face flux H = H_c + H_d_plus + H_d_minus.

    Each viscous half uses only its own side's trace data; the split parts
    are available separately through :func:`viscous_split`.
    """
    return (euler_kfvs_flux(prim_plus, prim_minus, gas)
            + viscous_split(prim_plus, tau_plus, q_plus, gas, "+")
            + viscous_split(prim_minus, tau_minus, q_minus, gas, "-"))


def entropy_numerical_flux(U_plus: np.ndarray, U_minus: np.ndarray, gas: GasModel) -> np.ndarray:
    """Consistent numerical flux for the entropy flux theta.

    Theta(V+, V-) = avg(V) . H_c - avg(theta*); Theta(V, V) = theta.
    """
    from .gas import conserved_to_entropy
    v_p = conserved_to_entropy(U_plus, gas).as_array()
    v_m = conserved_to_entropy(U_minus, gas).as_array()
    from .gas import conserved_to_primitive
    hc = euler_kfvs_flux(conserved_to_primitive(U_plus, gas),
                         conserved_to_primitive(U_minus, gas), gas)
    pot = 0.5 * (entropy_flux_potential(U_plus, gas) + entropy_flux_potential(U_minus, gas))
    return np.einsum("...c,...c->...", 0.5 * (v_p + v_m), hc) - pot


def eflux_diagnostic(V_plus: np.ndarray, V_minus: np.ndarray, gas: GasModel,
                     n_samples: int = 33, flux=None) -> np.ndarray:
    """Sampled minimum of [V] . (H - F(Vbar(s))) over the segment s in [0, 1].

    Vbar(s) = s*V_plus + (1-s)*V_minus; a nonnegative value indicates the
    E-flux entropy inequality holds at the sampled points.  Every sample is
    converted back to a physical state and positivity-checked; a segment that
    leaves the physical region raises PositivityError identifying the sample.
    ``flux`` overrides the face flux (default: the KFVS flux) so alternative
    fluxes can be screened with the same diagnostic.

    Vectorized over leading axes; returns the per-pair minimum.
    """
    V_plus = np.asarray(V_plus, dtype=float)
    V_minus = np.asarray(V_minus, dtype=float)
    if flux is None:
        h = euler_kfvs_flux(entropy_to_primitive(V_plus, gas),
                            entropy_to_primitive(V_minus, gas), gas)
    else:
        h = flux(entropy_to_primitive(V_plus, gas), entropy_to_primitive(V_minus, gas), gas)
    jump = V_plus - V_minus
    samples = np.linspace(0.0, 1.0, n_samples)
    out = np.full(V_plus.shape[:-1], np.inf)
    for s in samples:
        vbar = s * V_plus + (1.0 - s) * V_minus
        try:
            prim = entropy_to_primitive(vbar, gas)
            fbar = euler_flux(prim, gas)
        except (FloatingPointError, ValueError) as exc:
            raise type(exc)(f"segment state at s={s:.4f} is non-physical: {exc}") from exc
        val = np.einsum("...c,...c->...", jump, h - fbar)
        out = np.minimum(out, val)
    return out
