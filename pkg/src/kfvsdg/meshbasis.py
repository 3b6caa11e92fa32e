"""1-D meshes, modal Legendre bases, Gauss quadrature and broken fields.

The discrete solution lives in the broken space of polynomials of degree k
on a partition of the domain into elements.  Each element carries modal
Legendre coefficients, so the element mass matrix is diagonal and explicit
time stepping needs no linear solve.

Face/trace convention
---------------------
At a face, ``plus`` denotes the limit taken from the element to the LEFT of
the face and ``minus`` the limit from the element to the RIGHT:

    u^+(x) = lim_{eps->0+} u(x - eps),     u^-(x) = lim_{eps->0+} u(x + eps)

so the jump is [u] = u^+ - u^- = u_left - u_right.  With this orientation a
kinetic upwind flux is F^+(u^+) + F^-(u^-): molecules moving rightward carry
the left-element state.  All face-coupled modules in this package rely on
this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InvalidArgumentError(ValueError):
    """Raised for arguments that violate a documented precondition."""


class MissingNeighborError(LookupError):
    """Requested a trace from a side that has no neighboring element."""


def build_uniform_mesh(x_min: float, x_max: float, n: int, periodic: bool = True) -> "Mesh1D":
    """Uniform mesh of ``n`` elements on [x_min, x_max]."""
    if n < 1:
        raise InvalidArgumentError(f"need at least one element, got n={n}")
    if not x_max > x_min:
        raise InvalidArgumentError(f"inverted interval [{x_min}, {x_max}]")
    faces = np.linspace(x_min, x_max, n + 1)
    return Mesh1D(x_min=float(x_min), x_max=float(x_max), n_elements=n,
                  periodic=periodic, faces=faces)


@dataclass(frozen=True)
class Mesh1D:
    """Partition of [x_min, x_max] into elements with strictly increasing faces.

    ``faces`` has length ``n_elements + 1``; for a periodic mesh face 0 is
    identified with face ``n_elements``.
    """

    x_min: float
    x_max: float
    n_elements: int
    periodic: bool
    faces: np.ndarray

    def __post_init__(self):
        if len(self.faces) != self.n_elements + 1:
            raise InvalidArgumentError("faces array must have n_elements + 1 entries")
        if np.any(np.diff(self.faces) <= 0):
            raise InvalidArgumentError("faces must be strictly increasing")

    @property
    def h(self) -> float:
        """Uniform element width (meshes here are always uniform)."""
        return (self.x_max - self.x_min) / self.n_elements

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.faces[:-1] + self.faces[1:])

    @property
    def n_interior_faces(self) -> int:
        """Number of distinct coupling faces (periodic wraps the end face)."""
        return self.n_elements if self.periodic else self.n_elements - 1

    def to_physical(self, element: int, xi) -> np.ndarray:
        """Map reference coordinates xi in [-1, 1] to element coordinates."""
        return self.centers[element] + 0.5 * self.h * np.asarray(xi)


def legendre_eval(k: int, xi) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of P_0..P_k at xi via the three-term recurrence.

    Returns arrays of shape (k+1,) + shape(xi).  xi outside [-1, 1] is
    permitted (extrapolation), no clamping is applied.
    """
    if k < 0:
        raise InvalidArgumentError("polynomial degree must be nonnegative")
    xi = np.asarray(xi, dtype=float)
    vals = np.zeros((k + 1,) + xi.shape)
    ders = np.zeros_like(vals)
    vals[0] = 1.0
    if k >= 1:
        vals[1] = xi
        ders[1] = 1.0
    for n in range(1, k):
        vals[n + 1] = ((2 * n + 1) * xi * vals[n] - n * vals[n - 1]) / (n + 1)
        ders[n + 1] = ders[n - 1] + (2 * n + 1) * vals[n]
    return vals, ders


def gauss_quadrature(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], exact for degree <= 2q-1."""
    if q < 1:
        raise InvalidArgumentError(f"quadrature needs at least one node, got q={q}")
    return np.polynomial.legendre.leggauss(q)


@dataclass(frozen=True)
class Basis:
    """Modal Legendre basis P_0..P_degree on [-1, 1] with a Gauss rule.

    The quadrature order defaults to degree + 2 which integrates polynomials
    of degree 2k+3 exactly; pass a larger ``quad_order`` to refine nonlinear
    flux integrands.

    Precomputed tables (all on the reference element):
      phi[m, q], dphi[m, q]   basis values/derivatives at quadrature nodes
      phi_left, phi_right     traces P_m(-1), P_m(+1)
      dphi_left, dphi_right   derivative traces P_m'(-1), P_m'(+1)
      mass                    diagonal reference mass entries 2/(2m+1)
    """

    degree: int
    quad_order: int = 0  # 0 means degree + 2
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)
    dphi: np.ndarray = field(init=False, repr=False)
    phi_left: np.ndarray = field(init=False, repr=False)
    phi_right: np.ndarray = field(init=False, repr=False)
    dphi_left: np.ndarray = field(init=False, repr=False)
    dphi_right: np.ndarray = field(init=False, repr=False)
    mass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.degree < 0:
            raise InvalidArgumentError("basis degree must be nonnegative")
        q = self.quad_order if self.quad_order else self.degree + 2
        object.__setattr__(self, "quad_order", q)
        nodes, weights = gauss_quadrature(q)
        vals, ders = legendre_eval(self.degree, nodes)
        edge_vals, edge_ders = legendre_eval(self.degree, np.array([-1.0, 1.0]))
        m = np.arange(self.degree + 1)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "phi", vals)
        object.__setattr__(self, "dphi", ders)
        object.__setattr__(self, "phi_left", edge_vals[:, 0].copy())
        object.__setattr__(self, "phi_right", edge_vals[:, 1].copy())
        object.__setattr__(self, "dphi_left", edge_ders[:, 0].copy())
        object.__setattr__(self, "dphi_right", edge_ders[:, 1].copy())
        object.__setattr__(self, "mass", 2.0 / (2.0 * m + 1.0))

    @property
    def n_modes(self) -> int:
        return self.degree + 1


class DGField:
    """Discontinuous piecewise-polynomial field.

    ``coeffs`` is indexed (element, mode, component).  Scalars use
    n_components = 1; gas dynamics uses 3.
    """

    def __init__(self, mesh: Mesh1D, basis: Basis, n_components: int = 1,
                 coeffs: np.ndarray | None = None):
        self.mesh = mesh
        self.basis = basis
        self.n_components = n_components
        shape = (mesh.n_elements, basis.n_modes, n_components)
        if coeffs is None:
            coeffs = np.zeros(shape)
        elif coeffs.shape != shape:
            raise InvalidArgumentError(f"coefficient shape {coeffs.shape} != {shape}")
        self.coeffs = coeffs

    def copy(self) -> "DGField":
        return DGField(self.mesh, self.basis, self.n_components, self.coeffs.copy())

    def zeros_like(self) -> "DGField":
        return DGField(self.mesh, self.basis, self.n_components)

    # -- pointwise evaluation ------------------------------------------------

    def at_quadrature(self) -> np.ndarray:
        """Field values at the basis quadrature nodes, shape (elem, q, comp)."""
        return np.einsum("emc,mq->eqc", self.coeffs, self.basis.phi)

    def deriv_at_quadrature(self) -> np.ndarray:
        """d/dx values at quadrature nodes (includes the 2/h map factor)."""
        scale = 2.0 / self.mesh.h
        return scale * np.einsum("emc,mq->eqc", self.coeffs, self.basis.dphi)

    def eval_at(self, xi: np.ndarray) -> np.ndarray:
        """Evaluate on each element at reference points xi, shape (elem, len(xi), comp)."""
        vals, _ = legendre_eval(self.basis.degree, np.asarray(xi, dtype=float))
        return np.einsum("emc,mq->eqc", self.coeffs, vals)

    def deriv_at(self, xi: np.ndarray) -> np.ndarray:
        _, ders = legendre_eval(self.basis.degree, np.asarray(xi, dtype=float))
        return (2.0 / self.mesh.h) * np.einsum("emc,mq->eqc", self.coeffs, ders)

    # -- element boundary traces ----------------------------------------------

    def element_traces(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-element endpoint values: (left endpoint, right endpoint)."""
        left = np.einsum("emc,m->ec", self.coeffs, self.basis.phi_left)
        right = np.einsum("emc,m->ec", self.coeffs, self.basis.phi_right)
        return left, right

    def element_deriv_traces(self) -> tuple[np.ndarray, np.ndarray]:
        scale = 2.0 / self.mesh.h
        left = scale * np.einsum("emc,m->ec", self.coeffs, self.basis.dphi_left)
        right = scale * np.einsum("emc,m->ec", self.coeffs, self.basis.dphi_right)
        return left, right

    def face_traces(self) -> tuple[np.ndarray, np.ndarray]:
        """Plus/minus traces at each coupling face.

        Face i sits between elements (i-1, i) for i = 1..N-1; a periodic mesh
        adds the wrap face 0 between elements (N-1, 0).  Returns
        (u_plus, u_minus) with shape (n_interior_faces, comp); row order puts
        the wrap face first for periodic meshes so that face index f couples
        elements (f-1 mod N, f).
        """
        el_left, el_right = self.element_traces()
        return self._gather_faces(el_left, el_right)

    def face_deriv_traces(self) -> tuple[np.ndarray, np.ndarray]:
        el_left, el_right = self.element_deriv_traces()
        return self._gather_faces(el_left, el_right)

    def _gather_faces(self, el_left, el_right):
        if self.mesh.periodic:
            plus = np.roll(el_right, 1, axis=0)   # face f <- right endpoint of element f-1
            minus = el_left                        # face f <- left endpoint of element f
        else:
            plus = el_right[:-1]
            minus = el_left[1:]
        return plus, minus

    # -- norms -----------------------------------------------------------------

    def l2_norm_sq(self) -> float:
        """Exact integral of u^2 over the domain via Legendre orthogonality."""
        jac = 0.5 * self.mesh.h
        return float(jac * np.einsum("emc,m->", self.coeffs ** 2, self.basis.mass))

    def sample(self, points_per_element: int = 10) -> tuple[np.ndarray, np.ndarray]:
        """Equispaced samples inside every element for plot files."""
        xi = np.linspace(-1.0, 1.0, points_per_element)
        vals = self.eval_at(xi)
        x = self.mesh.centers[:, None] + 0.5 * self.mesh.h * xi[None, :]
        return x.ravel(), vals.reshape(-1, self.n_components)


def project(f, mesh: Mesh1D, basis: Basis, n_components: int = 1,
            quad_order: int | None = None) -> DGField:
    """Element-wise L2 projection of a callable onto the broken space.

    ``f`` maps an array of coordinates to values, either shape (npts,) for
    scalars or (npts, n_components).  Exact (up to roundoff) for polynomial
    input of degree <= basis.degree.
    """
    if quad_order is not None and quad_order != basis.quad_order:
        quad = Basis(basis.degree, quad_order)
    else:
        quad = basis
    x = mesh.centers[:, None] + 0.5 * mesh.h * quad.nodes[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    if fx.ndim == 1:
        fx = fx[:, None]
    fx = fx.reshape(mesh.n_elements, quad.nodes.size, n_components)
    # c_m = <f, P_m> / <P_m, P_m>; the h/2 Jacobians cancel
    moments = np.einsum("q,eqc,mq->emc", quad.weights, fx, quad.phi)
    field_ = DGField(mesh, basis, n_components)
    field_.coeffs[:] = moments / basis.mass[None, :, None]
    return field_


def trace(field_: DGField, face: int, side: str) -> np.ndarray:
    """Solution trace at one face; ``side`` is "+" (left element) or "-".

    For a periodic mesh, face 0 and face N are the same face.  Requesting the
    missing side of a boundary face on a wall mesh raises
    MissingNeighborError; boundary data is supplied by boundary operators in
    the Navier-Stokes assembly instead.
    """
    return _trace_impl(field_, face, side, field_.element_traces())


def trace_deriv(field_: DGField, face: int, side: str) -> np.ndarray:
    """d/dx trace at one face, same conventions as :func:`trace`."""
    return _trace_impl(field_, face, side, field_.element_deriv_traces())


def _trace_impl(field_: DGField, face: int, side: str, endpoint_values) -> np.ndarray:
    mesh = field_.mesh
    n = mesh.n_elements
    if side not in ("+", "-"):
        raise InvalidArgumentError(f"side must be '+' or '-', got {side!r}")
    if not 0 <= face <= n:
        raise InvalidArgumentError(f"face index {face} out of range 0..{n}")
    el_left, el_right = endpoint_values
    if side == "+":
        elem = face - 1
        if elem < 0:
            if not mesh.periodic:
                raise MissingNeighborError("face 0 has no element on its left")
            elem = n - 1
        return el_right[elem]
    elem = face % n if mesh.periodic else face
    if elem >= n:
        raise MissingNeighborError(f"face {face} has no element on its right")
    return el_left[elem]
