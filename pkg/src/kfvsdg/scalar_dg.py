"""Semi-discrete DG residuals for scalar convection-diffusion.

Three stabilization variants of the same face-coupled weak form:

  unstabilized    volume terms + total kinetic face flux only (the naive
                  scheme; unstable when diffusion dominates)
  non_symmetric   adds the split-flux adjoint terms with epsilon = -1 (NIPG)
                  and an optional interior penalty
  symmetric       epsilon = +1 (SIPG); requires a positive penalty constant

The assembled right-hand side is the explicit time derivative of the modal
coefficients (the diagonal mass matrix is inverted in place), suitable for
method-of-lines integration.  Periodic meshes only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .meshbasis import Basis, DGField, InvalidArgumentError, Mesh1D
from .scalar_kfvs import (
    ScalarKinetics,
    dissipation_coefficient,
    split_coeffs,
)

VARIANTS = ("unstabilized", "non_symmetric", "symmetric")


class UnsupportedBoundaryError(ValueError):
    """Scalar assembly supports periodic meshes only."""


class IdentityNotApplicableError(ValueError):
    """Requested an energy/entropy identity outside its regime of validity."""


@dataclass(frozen=True)
class ScalarSchemeConfig:
    """Variant selection, penalty constant and physics for the scalar scheme."""

    kinetics: ScalarKinetics
    variant: str = "non_symmetric"
    c_ip: float = 10.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidArgumentError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.c_ip < 0:
            raise InvalidArgumentError("penalty constant must be nonnegative")
        if self.variant == "symmetric" and self.c_ip <= 0:
            raise InvalidArgumentError("the symmetric variant is stable only with a positive penalty")

    @property
    def epsilon(self) -> int:
        """Sign of the adjoint stabilization term; 0 disables it."""
        if self.variant == "non_symmetric":
            return -1
        if self.variant == "symmetric":
            return +1
        return 0

    @property
    def stabilized(self) -> bool:
        return self.variant != "unstabilized"


def _volume_matrices(basis: Basis) -> tuple[np.ndarray, np.ndarray]:
    """Reference matrices K[m,n] = int P_n P_m' and S[m,n] = int P_n' P_m'."""
    w = basis.weights
    conv = np.einsum("q,nq,mq->mn", w, basis.phi, basis.dphi)
    stiff = np.einsum("q,nq,mq->mn", w, basis.dphi, basis.dphi)
    return conv, stiff


def assemble_rhs(u_h: DGField, cfg: ScalarSchemeConfig) -> DGField:
    """Time derivative of the modal coefficients for the configured variant."""
    mesh, basis = u_h.mesh, u_h.basis
    if not mesh.periodic:
        raise UnsupportedBoundaryError("scalar convection-diffusion runs are periodic")
    c, beta, mu = cfg.kinetics.c, cfg.kinetics.beta, cfg.kinetics.mu
    coeffs = u_h.coeffs[:, :, 0]
    h = mesh.h
    conv_mat, stiff_mat = _volume_matrices(basis)
    kin = split_coeffs(c, beta)
    d = dissipation_coefficient(c, beta)

    # volume: -int c u phi' + mu int u' phi'
    res = -c * coeffs @ conv_mat.T
    if mu > 0:
        res += (2.0 * mu / h) * coeffs @ stiff_mat.T

    # face data; face f couples elements ((f-1) % N, f)
    u_p, u_m = (a[:, 0] for a in u_h.face_traces())
    ux_p, ux_m = (a[:, 0] for a in u_h.face_deriv_traces())
    jump = u_p - u_m

    flux = 0.5 * c * (u_p + u_m) + 0.5 * d * jump
    if mu > 0:
        flux = flux - mu * (ux_p * kin.a_plus + ux_m * kin.a_minus)

    # scatter F*[phi]: element e owns face e+1 on its right, face e on its left
    res += np.roll(flux, -1)[:, None] * basis.phi_right[None, :]
    res -= flux[:, None] * basis.phi_left[None, :]

    if cfg.stabilized and mu > 0:
        eps = cfg.epsilon
        # adjoint term eps * F_d(phi') * [u] built from the split viscous fluxes
        adj_right = -mu * (2.0 / h) * kin.a_plus * basis.dphi_right
        adj_left = -mu * (2.0 / h) * kin.a_minus * basis.dphi_left
        res += eps * np.roll(jump, -1)[:, None] * adj_right[None, :]
        res += eps * jump[:, None] * adj_left[None, :]
        if cfg.c_ip > 0:
            delta = cfg.c_ip * (mu / h) * jump
            res += np.roll(delta, -1)[:, None] * basis.phi_right[None, :]
            res -= delta[:, None] * basis.phi_left[None, :]

    out = u_h.zeros_like()
    out.coeffs[:, :, 0] = -res / (0.5 * h * basis.mass)[None, :]
    return out


def assemble_operator(mesh: Mesh1D, basis: Basis, cfg: ScalarSchemeConfig) -> sp.csr_matrix:
    """The (linear) semi-discrete operator L with dc/dt = L c as a sparse matrix.

    Built by applying :func:`assemble_rhs` to unit coefficient vectors so the
    matrix path and the matrix-free path cannot drift apart.
    """
    n, k1 = mesh.n_elements, basis.n_modes
    ndof = n * k1
    probe = DGField(mesh, basis, 1)
    cols = np.empty((ndof, ndof))
    for j in range(ndof):
        probe.coeffs[:] = 0.0
        probe.coeffs[j // k1, j % k1, 0] = 1.0
        cols[:, j] = assemble_rhs(probe, cfg).coeffs[:, :, 0].ravel()
    cols[np.abs(cols) < 1e-300] = 0.0
    return sp.csr_matrix(cols)


def energy(u_h: DGField) -> float:
    """Discrete energy, half the squared L2 norm."""
    return 0.5 * u_h.l2_norm_sq()


def energy_budget(u_h: DGField, cfg: ScalarSchemeConfig) -> dict[str, float]:
    """Terms of the global energy identity for the non-symmetric variant.

    residual_power + dissipation_jump + dissipation_volume +
    dissipation_penalty = 0 holds to roundoff when epsilon = -1; for the
    symmetric variant no per-term identity exists and the call raises.
    """
    if cfg.variant != "non_symmetric":
        raise IdentityNotApplicableError(
            "the term-by-term energy identity holds only for the non-symmetric variant")
    mesh, basis = u_h.mesh, u_h.basis
    mu, h = cfg.kinetics.mu, mesh.h
    d = dissipation_coefficient(cfg.kinetics.c, cfg.kinetics.beta)
    dudt = assemble_rhs(u_h, cfg)
    mass = 0.5 * h * basis.mass
    residual_power = float(np.einsum("em,em,m->", dudt.coeffs[:, :, 0], u_h.coeffs[:, :, 0], mass))
    u_p, u_m = (a[:, 0] for a in u_h.face_traces())
    jump2 = np.sum((u_p - u_m) ** 2)
    _, stiff = _volume_matrices(basis)
    grad2 = (2.0 / h) * float(np.einsum("em,mn,en->", u_h.coeffs[:, :, 0], stiff, u_h.coeffs[:, :, 0]))
    return {
        "residual_power": residual_power,
        "dissipation_jump": 0.5 * d * jump2,
        "dissipation_volume": mu * grad2,
        "dissipation_penalty": cfg.c_ip * (mu / h) * jump2,
    }


def cell_energy_fluxes(u_h: DGField, cfg: ScalarSchemeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Numerical energy fluxes at every face, consistent with (c/2)u^2 and -mu*u*u_x.

    Returns (convective, diffusive) arrays over faces.  The convective flux is
    F_c*avg(u) - (c/2)*avg(u^2); the diffusive one pairs each split flux with
    the opposite-side trace.
    """
    c, beta, mu = cfg.kinetics.c, cfg.kinetics.beta, cfg.kinetics.mu
    kin = split_coeffs(c, beta)
    d = dissipation_coefficient(c, beta)
    u_p, u_m = (a[:, 0] for a in u_h.face_traces())
    ux_p, ux_m = (a[:, 0] for a in u_h.face_deriv_traces())
    f_c = 0.5 * c * (u_p + u_m) + 0.5 * d * (u_p - u_m)
    fbar_c = f_c * 0.5 * (u_p + u_m) - 0.5 * c * 0.5 * (u_p ** 2 + u_m ** 2)
    fbar_d = (-mu * ux_p * kin.a_plus) * u_m + (-mu * ux_m * kin.a_minus) * u_p
    return fbar_c, fbar_d


def cell_energy_balance(u_h: DGField, cfg: ScalarSchemeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Left- and right-hand sides of the per-cell energy balance.

    For the non-symmetric variant without penalty,
      d/dt(0.5 int u^2) + [Fbar_c + Fbar_d] = -mu int (u_x)^2
                                              - (D/4)([u]_l^2 + [u]_r^2)
    element by element; both sides are returned so callers can check the
    identity and the sign.  Requires variant == non_symmetric and c_ip == 0.
    """
    if cfg.variant != "non_symmetric" or cfg.c_ip != 0:
        raise IdentityNotApplicableError(
            "the per-cell balance is exact only for the non-symmetric variant without penalty")
    mesh, basis = u_h.mesh, u_h.basis
    mu, h = cfg.kinetics.mu, mesh.h
    d = dissipation_coefficient(cfg.kinetics.c, cfg.kinetics.beta)
    dudt = assemble_rhs(u_h, cfg)
    mass = 0.5 * h * basis.mass
    de_dt = np.einsum("em,em,m->e", dudt.coeffs[:, :, 0], u_h.coeffs[:, :, 0], mass)
    fbar_c, fbar_d = cell_energy_fluxes(u_h, cfg)
    fbar = fbar_c + fbar_d
    flux_diff = np.roll(fbar, -1) - fbar  # right face minus left face per element
    u_p, u_m = (a[:, 0] for a in u_h.face_traces())
    jump2 = (u_p - u_m) ** 2
    _, stiff = _volume_matrices(basis)
    grad2 = (2.0 / h) * np.einsum("em,mn,en->e", u_h.coeffs[:, :, 0], stiff, u_h.coeffs[:, :, 0])
    lhs = de_dt + flux_diff
    rhs = -mu * grad2 - 0.25 * d * (jump2 + np.roll(jump2, -1))
    return lhs, rhs


def diffusive_bilinear_matrix(mesh: Mesh1D, basis: Basis, cfg: ScalarSchemeConfig) -> np.ndarray:
    """Dense matrix of the diffusive bilinear form a_eps(v, w) on coefficients.

    a_eps collects the volume gradient term, both adjoint face terms and the
    penalty; it is symmetric for epsilon = +1 and generically non-symmetric
    for epsilon = -1.
    """
    if not cfg.stabilized:
        raise IdentityNotApplicableError("the unstabilized variant has no a_eps form")
    n, k1 = mesh.n_elements, basis.n_modes
    mu, h = cfg.kinetics.mu, mesh.h
    kin = split_coeffs(cfg.kinetics.c, cfg.kinetics.beta)
    _, stiff = _volume_matrices(basis)
    ndof = n * k1

    def face_data(coeffs):
        f = DGField(mesh, basis, 1)
        f.coeffs[:, :, 0] = coeffs
        u_p, u_m = (a[:, 0] for a in f.face_traces())
        ux_p, ux_m = (a[:, 0] for a in f.face_deriv_traces())
        return u_p - u_m, -mu * (ux_p * kin.a_plus + ux_m * kin.a_minus)

    basis_vecs = np.eye(ndof).reshape(ndof, n, k1)
    jumps = np.empty((ndof, mesh.n_interior_faces))
    fluxes = np.empty_like(jumps)
    for i, vec in enumerate(basis_vecs):
        jumps[i], fluxes[i] = face_data(vec)
    vol = np.einsum("inm,mk,jnk->ij", basis_vecs, stiff, basis_vecs) * (2.0 * mu / h)
    a = vol + fluxes @ jumps.T + cfg.epsilon * jumps @ fluxes.T \
        + cfg.c_ip * (mu / h) * jumps @ jumps.T
    return a
