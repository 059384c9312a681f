"""Boundary-integral assembly for the plate wave problem.

Collocation with the 2D Laplace free-space kernel ``u* = ln(1/r)/(2pi)``
over linear boundary elements produces the influence matrices H and G.
The inertia term is carried to the boundary with the radial basis
``f = 1 + r`` and its particular solution ``psi = r^2/4 + r^3/9``
(``lap psi = f``), giving a dense mass matrix. Applying the plate
boundary conditions and eliminating the unknown clamped-edge tractions
by a block solve reduces everything to ``m u'' + k u = load_map * P(t)``
in the unknown displacements.

Flux is discontinuous where the boundary turns, so traction unknowns are
stored per element side: mid-edge nodes own one traction degree of
freedom, the four corner nodes own two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .errors import DegenerateElementError, SingularBlockError, SingularFError
from .mesh import DIRICHLET, LOAD, BoundaryMesh

_TWO_PI = 2.0 * np.pi
_GAUSS_POINTS = 8


@dataclass(frozen=True)
class TractionTable:
    """Bookkeeping of per-side traction degrees of freedom.

    ``node`` and ``element`` give, per traction dof, the boundary node it
    sits on and the element supplying its normal. ``elem_dofs[e]`` holds
    the (start, end) traction dof of element ``e``. ``value`` is the
    prescribed traction: a float, :data:`~elastoinverse.mesh.LOAD` for the
    loaded edge, or ``None`` where the traction is unknown.
    """

    node: np.ndarray
    element: np.ndarray
    elem_dofs: np.ndarray
    value: list

    @property
    def n_dofs(self) -> int:
        return len(self.node)

    def loaded(self) -> np.ndarray:
        return np.array([a for a, v in enumerate(self.value) if v == LOAD], dtype=int)

    def unknown(self) -> np.ndarray:
        return np.array([a for a, v in enumerate(self.value) if v is None], dtype=int)


@dataclass(frozen=True)
class InfluenceMatrices:
    """Collocated boundary-integral operators.

    ``H_bem`` acts on nodal displacements (boundary then internal); its
    diagonal carries the free term, fixed by the rigid-body identity
    ``H @ 1 = 0``. ``G_bem`` acts on per-side nodal tractions; its
    singular entries use the closed-form integral of the log kernel.
    """

    H_bem: np.ndarray
    G_bem: np.ndarray
    tractions: TractionTable = field(repr=False)


@dataclass(frozen=True)
class DualReciprocityBasis:
    """Radial interpolation data and the resulting mass matrix."""

    F_mat: np.ndarray
    Psi_mat: np.ndarray
    Eta_mat: np.ndarray
    M_mass: np.ndarray
    f_condition: float
    wave_speed: float


@dataclass(frozen=True)
class ReducedSystem:
    """Second-order system ``m u'' + k u = load_map * P(t)``.

    ``dof_index`` maps each reduced dof to its ``(mesh node, quantity)``;
    all reduced dofs are displacements, tractions having been eliminated.
    """

    m_mat: np.ndarray
    k_mat: np.ndarray
    load_map: np.ndarray
    dof_index: list
    wave_speed: float

    @property
    def n_dof(self) -> int:
        return self.m_mat.shape[0]

    def dof_of_node(self, node: int) -> int:
        for i, (n, _) in enumerate(self.dof_index):
            if n == node:
                return i
        raise KeyError(node)


def _build_traction_table(mesh: BoundaryMesh) -> TractionTable:
    n_el = len(mesh.elements)
    elem_dofs = np.full((n_el, 2), -1, dtype=int)
    node: list[int] = []
    element: list[int] = []
    value: list = []

    for i in range(mesh.n_boundary):
        prev_e = (i - 1) % n_el
        next_e = i
        na, nb = mesh.normals[prev_e], mesh.normals[next_e]
        smooth = abs(float(na[0] * nb[1] - na[1] * nb[0])) < 1e-12
        if smooth:
            dof = len(node)
            node.append(i)
            element.append(next_e)
            value.append(mesh.element_bc[next_e][1])
            elem_dofs[prev_e, 1] = dof
            elem_dofs[next_e, 0] = dof
        else:
            dof = len(node)
            node.append(i)
            element.append(prev_e)
            value.append(mesh.element_bc[prev_e][1])
            elem_dofs[prev_e, 1] = dof
            dof = len(node)
            node.append(i)
            element.append(next_e)
            value.append(mesh.element_bc[next_e][1])
            elem_dofs[next_e, 0] = dof

    return TractionTable(
        node=np.array(node, dtype=int),
        element=np.array(element, dtype=int),
        elem_dofs=elem_dofs,
        value=value,
    )


def _singular_g_weights(length: float) -> tuple[float, float]:
    """Integrals of ``u*`` times the linear shape functions over an
    element when the source sits on one of its ends.

    Returns (weight of the near-end shape function, far-end weight)."""
    ln_l = np.log(length)
    near = length / _TWO_PI * (0.75 - 0.5 * ln_l)
    far = length / _TWO_PI * (0.25 - 0.5 * ln_l)
    return near, far


def assemble_influence(mesh: BoundaryMesh) -> InfluenceMatrices:
    """Collocate the log kernel and its normal derivative on the mesh.

    Off-element entries use Gauss-Legendre quadrature; the log-singular
    G entries use the analytic endpoint formulas; H diagonals follow from
    the rigid-body row-sum identity (free terms included implicitly).

    Raises
    ------
    DegenerateElementError
        If an element has (numerically) zero length.
    """
    n_total = mesh.n_boundary + mesh.n_internal
    tract = _build_traction_table(mesh)
    H = np.zeros((n_total, n_total))
    G = np.zeros((n_total, tract.n_dofs))

    xg, wg = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    t_param = (xg + 1.0) / 2.0  # element parameter in [0, 1]
    X = mesh.nodes

    for e in range(len(mesh.elements)):
        a, b = mesh.elements[e]
        start, end = X[a], X[b]
        length = float(np.linalg.norm(end - start))
        if length < 1e-14:
            raise DegenerateElementError(f"element {e} has zero length")
        normal = mesh.normals[e]
        dof_s, dof_e = tract.elem_dofs[e]

        pts = start[None, :] + np.outer(t_param, end - start)  # (q, 2)
        jac = length / 2.0

        rvec = pts[None, :, :] - X[:, None, :]  # (n_total, q, 2)
        r2 = np.einsum("iqk,iqk->iq", rvec, rvec)
        r = np.sqrt(r2)
        singular = np.zeros(n_total, dtype=bool)
        singular[[a, b]] = True

        with np.errstate(divide="ignore", invalid="ignore"):
            ustar = -np.log(r) / _TWO_PI
            tstar = -np.einsum("iqk,k->iq", rvec, normal) / (_TWO_PI * r2)
        ustar[singular] = 0.0
        tstar[singular] = 0.0

        w_s = wg * (1.0 - t_param) * jac
        w_e = wg * t_param * jac
        H[:, a] += tstar @ w_s
        H[:, b] += tstar @ w_e
        G[:, dof_s] += ustar @ w_s
        G[:, dof_e] += ustar @ w_e

        near, far = _singular_g_weights(length)
        G[a, dof_s] += near
        G[a, dof_e] += far
        G[b, dof_e] += near
        G[b, dof_s] += far
        # H gains nothing from an element containing the source: the
        # kernel's normal derivative vanishes on a straight element
        # through the collocation point.

    for i in range(n_total):
        if i < mesh.n_boundary:
            H[i, i] = 0.0
            H[i, i] = -H[i, :].sum()
        else:
            H[i, i] = 1.0

    return InfluenceMatrices(H_bem=H, G_bem=G, tractions=tract)


def assemble_dual_reciprocity(
    mesh: BoundaryMesh, infl: InfluenceMatrices, c: float = 1.0
) -> DualReciprocityBasis:
    """Build the radial interpolation matrices and the mass matrix.

    Centers are all collocation nodes. ``F[i, j] = 1 + |x_i - x_j|``;
    ``Psi`` evaluates the particular solutions at the nodes and ``Eta``
    their normal derivative at the traction dofs, so that
    ``M = (H @ Psi - G @ Eta) @ inv(F) / c^2``.

    Raises
    ------
    SingularFError
        If the interpolation matrix is numerically singular
        (condition estimate above 1e14).
    """
    X = mesh.nodes
    diff = X[:, None, :] - X[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    F = 1.0 + dist
    cond = float(np.linalg.cond(F))
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularFError(f"radial interpolation matrix condition {cond:.3e}")

    Psi = dist**2 / 4.0 + dist**3 / 9.0

    tract = infl.tractions
    y = X[tract.node]  # (n_t, 2)
    nrm = mesh.normals[tract.element]  # (n_t, 2)
    rvec = y[:, None, :] - X[None, :, :]  # (n_t, centers, 2)
    r = np.linalg.norm(rvec, axis=2)
    # psi'(r) dr/dn = (r/2 + r^2/3)(rvec.n)/r; the 1/r cancels, so the
    # coincident case needs no special handling.
    Eta = (0.5 + r / 3.0) * np.einsum("tjk,tk->tj", rvec, nrm)

    rhs = infl.H_bem @ Psi - infl.G_bem @ Eta
    M = np.linalg.solve(F.T, rhs.T).T / c**2

    return DualReciprocityBasis(
        F_mat=F, Psi_mat=Psi, Eta_mat=Eta, M_mass=M, f_condition=cond, wave_speed=float(c)
    )


def reduce_system(
    mesh: BoundaryMesh, infl: InfluenceMatrices, basis: DualReciprocityBasis
) -> ReducedSystem:
    """Apply boundary conditions and eliminate the unknown tractions.

    Prescribed displacements (clamped edge) drop out; prescribed
    tractions move to the right-hand side, the loaded-edge columns of G
    summing into the load influence vector. The clamped-edge traction
    unknowns are removed by solving the collocation rows at the clamped
    nodes for them (a Schur complement on those rows), leaving a square
    second-order system in the unknown displacements.

    Raises
    ------
    SingularBlockError
        If the traction-elimination block is singular.
    """
    free = mesh.free_nodes()
    clamped = mesh.dirichlet_nodes()
    tract = infl.tractions
    unknown_t = tract.unknown()
    loaded_t = tract.loaded()

    g = infl.G_bem[:, loaded_t].sum(axis=1)
    S1 = basis.M_mass[:, free]
    H1 = infl.H_bem[:, free]
    G2 = infl.G_bem[:, unknown_t]

    G2_cc = G2[clamped, :]
    try:
        elim = np.linalg.solve(
            G2_cc, np.column_stack([S1[clamped, :], H1[clamped, :], g[clamped, None]])
        )
    except np.linalg.LinAlgError as err:
        raise SingularBlockError("clamped-edge traction block is singular") from err

    n_free = len(free)
    coupled = G2[free, :] @ elim
    # The mass matrix collects the inertia terms of the weighted-residual
    # statement, which sit on the opposite side of the equation from the
    # H u - G t boundary terms; moving them across flips the sign.
    m = -(S1[free, :] - coupled[:, :n_free])
    k = H1[free, :] - coupled[:, n_free : 2 * n_free]
    load_map = g[free] - coupled[:, -1]

    dof_index = [(int(n), "displacement") for n in free]
    return ReducedSystem(
        m_mat=m,
        k_mat=k,
        load_map=load_map,
        dof_index=dof_index,
        wave_speed=basis.wave_speed,
    )


def solve_static(mesh: BoundaryMesh, infl: InfluenceMatrices, p0: float = 1.0) -> np.ndarray:
    """Static solution under a unit-pattern edge load of magnitude p0.

    Solves ``H u = G t`` with the plate boundary conditions and returns
    the displacement at every node (zeros on the clamped edge). Useful
    as a sanity anchor: the exact static field is ``u = p0 (1 - x1)``.
    """
    free = mesh.free_nodes()
    clamped = mesh.dirichlet_nodes()
    tract = infl.tractions
    unknown_t = tract.unknown()
    g = infl.G_bem[:, tract.loaded()].sum(axis=1)

    n_total = mesh.n_boundary + mesh.n_internal
    A = np.zeros((n_total, n_total))
    A[:, : len(free)] = infl.H_bem[:, free]
    A[:, len(free) :] = -infl.G_bem[:, unknown_t]
    x = np.linalg.solve(A, g * p0)

    u = np.zeros(n_total)
    u[free] = x[: len(free)]
    u[clamped] = 0.0
    return u


def dump_matrix(mat: np.ndarray, stream: IO[str]) -> None:
    """Write a dense matrix row-major, 17 significant digits per entry."""
    mat = np.atleast_2d(mat)
    for row in mat:
        stream.write(" ".join(format(v, ".16e") for v in row))
        stream.write("\n")
