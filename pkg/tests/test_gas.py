"""Gas state conversions, entropy variables and transport coefficients."""

import numpy as np
import pytest

from kfvsdg.gas import (
    GasModel,
    InvalidEntropyStateError,
    PositivityError,
    PrimitiveState1D,
    conserved_to_entropy,
    conserved_to_primitive,
    dUdV,
    entropy_pair,
    entropy_to_conserved,
    physical_entropy,
    primitive_to_conserved,
    transport,
)
from kfvsdg.kfvs import euler_flux

RNG = np.random.default_rng(41)
AIR = GasModel(gamma=1.4, R=1.0, prandtl=2.0 / 3.0, mu_ref=1.0)


def random_states(n, umax=3.0):
    rho = RNG.uniform(0.1, 10.0, n)
    u = RNG.uniform(-umax, umax, n)
    T = RNG.uniform(0.1, 10.0, n)
    return PrimitiveState1D(rho=rho, u=u, T=T)


def test_primitive_round_trip_closed_forms():
    prim = PrimitiveState1D(rho=1.0, u=0.0, T=1.0)
    U = primitive_to_conserved(prim, AIR)
    assert np.allclose(U, [1.0, 0.0, 2.5])

    back = conserved_to_primitive(np.array([1.0, 1.0, 3.0]), AIR)
    assert back.u == pytest.approx(1.0)
    assert back.T == pytest.approx(1.0)      # eps = 3 - 1/2 = 2.5 -> T = 2.5*0.4
    assert back.pressure(AIR) == pytest.approx(1.0)


def test_round_trips_randomized():
    prim = random_states(200)
    U = primitive_to_conserved(prim, AIR)
    back = conserved_to_primitive(U, AIR)
    assert np.allclose(back.rho, prim.rho, rtol=1e-14)
    assert np.allclose(back.u, prim.u, rtol=0, atol=1e-13 * np.max(np.abs(prim.u)))
    assert np.allclose(back.T, prim.T, rtol=1e-13)

    V = conserved_to_entropy(U, AIR).as_array()
    U2 = entropy_to_conserved(V, AIR)
    assert np.max(np.abs(U2 - U) / np.maximum(1.0, np.abs(U))) < 1e-12


def test_positivity_violations_carry_indices():
    with pytest.raises(PositivityError):
        conserved_to_primitive(np.array([1.0, 0.0, -1.0]), AIR)
    bad = np.array([[1.0, 0.0, 2.5], [1.0, 4.0, 2.5]])  # second has eps < 0
    with pytest.raises(PositivityError) as err:
        conserved_to_primitive(bad, AIR)
    assert err.value.where.tolist() == [1]


def test_entropy_variables_rest_state():
    # s = 0 at rho = T = R = 1; V = ((gamma - s)/(gamma - 1) - u^2/(2RT), u/RT, -1/RT)
    U = primitive_to_conserved(PrimitiveState1D(1.0, 0.0, 1.0), AIR)
    V = conserved_to_entropy(U, AIR)
    assert V.v1 == pytest.approx(1.4 / 0.4, rel=1e-14)
    assert V.v2 == pytest.approx(0.0, abs=1e-15)
    assert V.v3 == pytest.approx(-1.0, rel=1e-14)


def test_entropy_variables_match_entropy_gradient():
    # central finite differences of eta(U)
    prim = random_states(20)
    U = primitive_to_conserved(prim, AIR)
    V = conserved_to_entropy(U, AIR).as_array()
    for i in range(len(prim.rho)):
        grad = np.empty(3)
        for c in range(3):
            d = 1e-6 * max(1.0, abs(U[i, c]))
            up, um = U[i].copy(), U[i].copy()
            up[c] += d
            um[c] -= d
            ep = entropy_pair(up, AIR)[0]
            em = entropy_pair(um, AIR)[0]
            grad[c] = (ep - em) / (2 * d)
        assert np.max(np.abs(grad - V[i]) / np.maximum(1.0, np.abs(V[i]))) < 1e-6


def test_entropy_pair_values_and_flux_identity():
    U = primitive_to_conserved(PrimitiveState1D(1.0, 0.0, 1.0), AIR)
    eta, theta = entropy_pair(U, AIR)
    assert eta == pytest.approx(0.0, abs=1e-14)
    assert theta == pytest.approx(0.0, abs=1e-14)

    prim = PrimitiveState1D(2.0, 3.0, 1.0)
    U = primitive_to_conserved(prim, AIR)
    s = np.log(2.0 / 2.0 ** 1.4)
    eta, theta = entropy_pair(U, AIR)
    assert eta == pytest.approx(-2.0 * s / 0.4, rel=1e-14)
    assert theta == pytest.approx(eta * 3.0, rel=1e-14)


def test_entropy_flux_gradient_identity():
    # theta'(U) = eta'(U) F'(U), checked with finite differences
    prim = random_states(10, umax=2.0)
    U = primitive_to_conserved(prim, AIR)
    V = conserved_to_entropy(U, AIR).as_array()
    for i in range(len(prim.rho)):
        theta_grad = np.empty(3)
        vf = np.empty(3)
        for c in range(3):
            d = 1e-6 * max(1.0, abs(U[i, c]))
            up, um = U[i].copy(), U[i].copy()
            up[c] += d
            um[c] -= d
            theta_grad[c] = (entropy_pair(up, AIR)[1] - entropy_pair(um, AIR)[1]) / (2 * d)
            fp = euler_flux(conserved_to_primitive(up, AIR), AIR)
            fm = euler_flux(conserved_to_primitive(um, AIR), AIR)
            vf[c] = np.dot(V[i], (fp - fm) / (2 * d))
        assert np.max(np.abs(theta_grad - vf)) < 1e-5 * max(1.0, np.max(np.abs(vf)))


def test_dudv_symmetry_spd_and_fd():
    prim = random_states(30, umax=2.0)
    U = primitive_to_conserved(prim, AIR)
    V = conserved_to_entropy(U, AIR).as_array()
    a0 = dUdV(V, AIR)
    assert np.max(np.abs(a0 - np.swapaxes(a0, -1, -2))) < 1e-12 * np.max(np.abs(a0))
    for i in range(len(prim.rho)):
        np.linalg.cholesky(a0[i])  # SPD: must not raise
        fd = np.empty((3, 3))
        for c in range(3):
            d = 1e-7 * max(1.0, abs(V[i, c]))
            vp, vm = V[i].copy(), V[i].copy()
            vp[c] += d
            vm[c] -= d
            fd[:, c] = (entropy_to_conserved(vp, AIR) - entropy_to_conserved(vm, AIR)) / (2 * d)
        assert np.max(np.abs(fd - a0[i]) / np.maximum(1.0, np.abs(a0[i]))) < 1e-6


def test_dudv_rejects_nonphysical_entropy_state():
    with pytest.raises(InvalidEntropyStateError):
        dUdV(np.array([0.0, 0.0, 0.5]), AIR)


def test_entropy_convex_along_segments():
    # midpoint inequality eta((a+b)/2) <= (eta(a) + eta(b))/2
    pa = random_states(50)
    pb = random_states(50)
    Ua = primitive_to_conserved(pa, AIR)
    Ub = primitive_to_conserved(pb, AIR)
    eta_mid = entropy_pair(0.5 * (Ua + Ub), AIR)[0]
    eta_avg = 0.5 * (entropy_pair(Ua, AIR)[0] + entropy_pair(Ub, AIR)[0])
    assert np.all(eta_mid <= eta_avg + 1e-12 * np.abs(eta_avg))


def test_transport_closed_forms():
    prim = PrimitiveState1D(1.0, 0.0, 1.0)
    tau, q = transport(prim, AIR, 0.0, 0.0)
    assert tau == 0.0 and q == 0.0
    tau, q = transport(prim, AIR, 3.0, 0.0)
    assert tau == pytest.approx(4.0)

    shock_gas = GasModel(gamma=5.0 / 3.0, R=1.0, prandtl=2.0 / 3.0,
                         mu_ref=0.0005, t_ref=1.0, omega=0.8)
    assert shock_gas.viscosity(2.0) == pytest.approx(8.705505633e-4, rel=1e-9)
    # kappa = mu cp / Pr
    prim2 = PrimitiveState1D(1.0, 0.0, 2.0)
    _, q2 = transport(prim2, shock_gas, 0.0, 1.0)
    mu2 = shock_gas.viscosity(2.0)
    assert q2 == pytest.approx(-mu2 * shock_gas.cp / shock_gas.prandtl, rel=1e-13)


def test_beta_consistency_with_kinetics():
    prim = PrimitiveState1D(1.0, 0.0, 1.0)
    assert prim.beta(AIR) == pytest.approx(0.5)
    # entropy of an isentropic compression stays constant
    s0 = physical_entropy(PrimitiveState1D(1.0, 0.0, 1.0), AIR)
    rho2 = 2.0
    T2 = rho2 ** (AIR.gamma - 1.0)
    s1 = physical_entropy(PrimitiveState1D(rho2, 0.0, T2), AIR)
    assert s1 == pytest.approx(s0, abs=1e-14)
