"""Mesh, Legendre basis, quadrature, projection and trace tests."""

import numpy as np
import pytest

from kfvsdg.meshbasis import (
    Basis,
    DGField,
    InvalidArgumentError,
    MissingNeighborError,
    build_uniform_mesh,
    gauss_quadrature,
    legendre_eval,
    project,
    trace,
    trace_deriv,
)


def test_uniform_mesh_spacing():
    mesh = build_uniform_mesh(-1.0, 1.0, 20, periodic=True)
    assert mesh.h == pytest.approx(0.1)
    assert len(mesh.faces) == 21
    mesh2 = build_uniform_mesh(0.0, 1.0, 40, periodic=False)
    assert np.allclose(mesh2.faces, np.arange(41) * 0.025)


def test_mesh_invalid_arguments():
    with pytest.raises(InvalidArgumentError):
        build_uniform_mesh(0.0, 1.0, 0, periodic=False)
    with pytest.raises(InvalidArgumentError):
        build_uniform_mesh(1.0, 0.0, 10)


def test_legendre_closed_forms():
    vals, ders = legendre_eval(3, 0.0)
    assert vals[2] == pytest.approx(-0.5, abs=1e-15)
    vals, ders = legendre_eval(1, 1.0)
    assert vals[1] == pytest.approx(1.0, abs=1e-15)
    assert ders[1] == pytest.approx(1.0, abs=1e-15)
    vals, _ = legendre_eval(3, 0.5)
    assert vals[3] == pytest.approx(-0.4375, abs=1e-15)   # (5x^3 - 3x)/2


def test_legendre_derivative_consistency():
    # central differences of the recurrence values
    xi = np.linspace(-0.9, 0.9, 7)
    eps = 1e-6
    vals_p, _ = legendre_eval(5, xi + eps)
    vals_m, _ = legendre_eval(5, xi - eps)
    _, ders = legendre_eval(5, xi)
    assert np.allclose((vals_p - vals_m) / (2 * eps), ders, atol=1e-8)


def test_gauss_rules():
    nodes, weights = gauss_quadrature(2)
    assert np.allclose(np.sort(nodes), [-1 / np.sqrt(3), 1 / np.sqrt(3)])
    assert np.allclose(weights, [1.0, 1.0])
    nodes, weights = gauss_quadrature(1)
    assert nodes[0] == pytest.approx(0.0, abs=1e-15)
    assert weights[0] == pytest.approx(2.0)
    nodes, weights = gauss_quadrature(3)
    assert np.dot(weights, nodes ** 4) == pytest.approx(2.0 / 5.0, rel=1e-14)
    with pytest.raises(InvalidArgumentError):
        gauss_quadrature(0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reference_mass_matrix_diagonal(k):
    basis = Basis(k)
    gram = np.einsum("q,mq,nq->mn", basis.weights, basis.phi, basis.phi)
    expected = np.diag(2.0 / (2.0 * np.arange(k + 1) + 1.0))
    assert np.max(np.abs(gram - expected)) < 1e-14


def test_projection_constant_and_linear():
    mesh = build_uniform_mesh(-1.0, 1.0, 4)
    basis = Basis(2)
    f = project(lambda x: 3.0 * np.ones_like(x), mesh, basis)
    assert np.allclose(f.coeffs[:, 0, 0], 3.0)
    assert np.max(np.abs(f.coeffs[:, 1:, 0])) < 1e-14

    one = build_uniform_mesh(-1.0, 1.0, 1)
    g = project(lambda x: x, one, Basis(1))
    assert np.allclose(g.coeffs[0, :, 0], [0.0, 1.0], atol=1e-15)


def test_projection_reproduces_polynomials_through_traces():
    mesh = build_uniform_mesh(0.0, 2.0, 5, periodic=False)
    basis = Basis(2)
    poly = lambda x: 1.0 + 2.0 * x - 0.5 * x ** 2
    f = project(poly, mesh, basis)
    left, right = f.element_traces()
    assert np.allclose(left[:, 0], poly(mesh.faces[:-1]), atol=1e-13)
    assert np.allclose(right[:, 0], poly(mesh.faces[1:]), atol=1e-13)


def test_projection_error_decays_cubically_for_p2():
    # oracle: dense-quadrature L2 error of the projection of -sin(pi x)
    errs = []
    for n in (10, 20, 40):
        mesh = build_uniform_mesh(-1.0, 1.0, n)
        basis = Basis(2)
        f = project(lambda x: -np.sin(np.pi * x), mesh, basis)
        fine = Basis(2, quad_order=10)
        x = mesh.centers[:, None] + 0.5 * mesh.h * fine.nodes[None, :]
        uh = np.einsum("emc,mq->eqc", f.coeffs, fine.phi)[:, :, 0]
        err2 = 0.5 * mesh.h * np.einsum("q,eq->", fine.weights, (uh + np.sin(np.pi * x)) ** 2)
        errs.append(np.sqrt(err2))
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(rates - 3.0) < 0.1)


def test_traces_continuous_field_has_zero_jump():
    mesh = build_uniform_mesh(-1.0, 1.0, 8)
    f = project(lambda x: np.cos(np.pi * x), mesh, Basis(3))
    up, um = f.face_traces()
    # projection of a smooth periodic function: jumps are small but nonzero;
    # a projected polynomial of degree <= k is reproduced exactly
    g = project(lambda x: 0.25 * x ** 2 - x, build_uniform_mesh(-1, 1, 8, periodic=False), Basis(2))
    for face in range(1, 8):
        assert trace(g, face, "+")[0] == pytest.approx(trace(g, face, "-")[0], abs=1e-13)


def test_trace_orientation_piecewise_constants():
    # elements hold 1 | 2; at the shared face the left ("+") trace is 1
    mesh = build_uniform_mesh(0.0, 2.0, 2, periodic=False)
    f = DGField(mesh, Basis(1), 1)
    f.coeffs[0, 0, 0] = 1.0
    f.coeffs[1, 0, 0] = 2.0
    assert trace(f, 1, "+")[0] == pytest.approx(1.0)
    assert trace(f, 1, "-")[0] == pytest.approx(2.0)
    up, um = f.face_traces()
    assert (up - um)[0, 0] == pytest.approx(-1.0)


def test_trace_missing_neighbor():
    mesh = build_uniform_mesh(0.0, 1.0, 3, periodic=False)
    f = DGField(mesh, Basis(1), 1)
    with pytest.raises(MissingNeighborError):
        trace(f, 0, "+")
    with pytest.raises(MissingNeighborError):
        trace(f, 3, "-")


def test_trace_periodic_wraparound():
    mesh = build_uniform_mesh(0.0, 1.0, 3, periodic=True)
    f = DGField(mesh, Basis(0), 1)
    f.coeffs[:, 0, 0] = [5.0, 6.0, 7.0]
    assert trace(f, 0, "+")[0] == pytest.approx(7.0)
    assert trace(f, 3, "-")[0] == pytest.approx(5.0)
    assert trace(f, 0, "-")[0] == pytest.approx(5.0)


def test_derivative_traces_match_analytic():
    mesh = build_uniform_mesh(-1.0, 1.0, 10, periodic=False)
    f = project(lambda x: x ** 2, mesh, Basis(2))
    for face in range(1, 10):
        x = mesh.faces[face]
        assert trace_deriv(f, face, "+")[0] == pytest.approx(2 * x, abs=1e-12)
        assert trace_deriv(f, face, "-")[0] == pytest.approx(2 * x, abs=1e-12)


def test_quadrature_orthogonality_at_order_kplus1():
    k = 3
    basis = Basis(k, quad_order=k + 1)
    for m in range(k + 1):
        for n in range(k + 1):
            val = np.dot(basis.weights, basis.phi[m] * basis.phi[n])
            ref = 2.0 / (2 * m + 1) if m == n else 0.0
            assert val == pytest.approx(ref, abs=1e-14)


def test_l2_norm_and_sampling():
    mesh = build_uniform_mesh(-1.0, 1.0, 16)
    f = project(lambda x: -np.sin(np.pi * x), mesh, Basis(3))
    assert f.l2_norm_sq() == pytest.approx(1.0, rel=1e-6)
    x, vals = f.sample(10)
    assert x.shape == (160,)
    assert vals.shape == (160, 1)
    assert np.max(np.abs(vals[:, 0] + np.sin(np.pi * x))) < 1e-3
