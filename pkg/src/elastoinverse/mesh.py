"""Discretized geometry of the unit square plate.

The plate occupies (0,1)x(0,1). Its boundary is split into straight
linear elements traversed counterclockwise from the corner (0,0), and a
(possibly empty) set of interior collocation points is appended after
the boundary nodes. Boundary conditions:

* edge x1 = 1: clamped, displacement fixed to zero;
* edges x2 = 0 and x2 = 1: traction free;
* edge x1 = 0: uniform traction carrying the unknown load magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .errors import NoNodeError, NonDivisibleLengthError, PointOutsideError

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
#: Sentinel used as the bc value on the loaded edge.
LOAD = "LOAD"

#: Edge labels indexed by side number (counterclockwise from (0,0)).
_EDGES = ("bottom", "right", "top", "left")


@dataclass(frozen=True)
class BoundaryMesh:
    """Boundary-element mesh of the unit square with interior points.

    Attributes
    ----------
    nodes : (n_boundary + n_internal, 2) float array
        Node coordinates, boundary nodes (counterclockwise from (0,0))
        followed by internal points.
    elements : (n_boundary, 2) int array
        Start/end node index of each linear element; the elements form a
        single closed counterclockwise loop.
    normals : (n_boundary, 2) float array
        Unit outward normal of each element.
    bc_tags : list of (kind, value)
        Per boundary node: ``("dirichlet", 0.0)``, ``("neumann", 0.0)``
        or ``("neumann", "LOAD")``. Nodes are assigned to exactly one
        group; the clamped edge wins at its corners, the loaded edge
        wins at the remaining two.
    element_bc : list of (kind, value)
        Per element, from the edge the element lies on. ``value`` is
        ``None`` on the clamped edge (traction unknown there).
    """

    nodes: np.ndarray
    elements: np.ndarray
    normals: np.ndarray
    bc_tags: list = field(repr=False)
    element_bc: list = field(repr=False)
    n_boundary: int = 0
    n_internal: int = 0

    def dirichlet_nodes(self) -> np.ndarray:
        """Indices of boundary nodes with prescribed displacement."""
        return np.array(
            [i for i in range(self.n_boundary) if self.bc_tags[i][0] == DIRICHLET],
            dtype=int,
        )

    def free_nodes(self) -> np.ndarray:
        """Indices of nodes (boundary + internal) with unknown displacement."""
        dirichlet = set(self.dirichlet_nodes().tolist())
        total = self.n_boundary + self.n_internal
        return np.array([i for i in range(total) if i not in dirichlet], dtype=int)


def build_square_plate(
    element_length: float, internal_points: Sequence[Sequence[float]] = ()
) -> BoundaryMesh:
    """Mesh the unit square boundary with equal linear elements.

    Parameters
    ----------
    element_length : float
        Element size; must divide 1.0 to within 1e-12.
    internal_points : sequence of (x1, x2)
        Interior collocation points, each strictly inside the square.

    Returns
    -------
    BoundaryMesh

    Raises
    ------
    NonDivisibleLengthError
        If ``1/element_length`` is not an integer.
    PointOutsideError
        If an internal point lies on or outside the boundary.
    """
    if element_length <= 0:
        raise NonDivisibleLengthError(f"element length must be positive, got {element_length}")
    per_side = 1.0 / element_length
    n_side = round(per_side)
    if n_side < 1 or abs(per_side - n_side) > 1e-12 * per_side:
        raise NonDivisibleLengthError(
            f"element length {element_length} does not divide the unit side length"
        )

    for pt in internal_points:
        x1, x2 = float(pt[0]), float(pt[1])
        if not (0.0 < x1 < 1.0 and 0.0 < x2 < 1.0):
            raise PointOutsideError(f"internal point ({x1}, {x2}) is not strictly inside the plate")

    h = 1.0 / n_side
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    boundary = []
    node_side = []  # side index each node starts on
    for side in range(4):
        sx, sy = corners[side]
        ex, ey = corners[(side + 1) % 4]
        for i in range(n_side):
            t = i * h
            boundary.append((sx + (ex - sx) * t, sy + (ey - sy) * t))
            node_side.append(side)

    n_boundary = len(boundary)
    nodes = np.array(boundary + [(float(p[0]), float(p[1])) for p in internal_points])
    elements = np.column_stack(
        [np.arange(n_boundary), (np.arange(n_boundary) + 1) % n_boundary]
    )

    # Outward normal of a counterclockwise loop: rotate the tangent by -90 deg.
    tangents = nodes[elements[:, 1]] - nodes[elements[:, 0]]
    lengths = np.linalg.norm(tangents, axis=1)
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]]) / lengths[:, None]

    element_bc = []
    for e in range(n_boundary):
        side = node_side[elements[e, 0]]
        if _EDGES[side] == "right":
            element_bc.append((DIRICHLET, None))
        elif _EDGES[side] == "left":
            element_bc.append((NEUMANN, LOAD))
        else:
            element_bc.append((NEUMANN, 0.0))

    bc_tags = []
    for i in range(n_boundary):
        x1 = nodes[i, 0]
        if abs(x1 - 1.0) <= 1e-12:
            bc_tags.append((DIRICHLET, 0.0))
        elif abs(x1) <= 1e-12:
            bc_tags.append((NEUMANN, LOAD))
        else:
            bc_tags.append((NEUMANN, 0.0))

    return BoundaryMesh(
        nodes=nodes,
        elements=elements,
        normals=normals,
        bc_tags=bc_tags,
        element_bc=element_bc,
        n_boundary=n_boundary,
        n_internal=len(internal_points),
    )


def locate_node(mesh: BoundaryMesh, point: Sequence[float], tol: float = 1e-9) -> int:
    """Index of the mesh node within ``tol`` of ``point``.

    Raises
    ------
    NoNodeError
        If no node lies within the tolerance.
    """
    p = np.asarray(point, dtype=float)
    dist = np.linalg.norm(mesh.nodes - p[None, :], axis=1)
    idx = int(np.argmin(dist))
    if dist[idx] > tol:
        raise NoNodeError(f"no mesh node within {tol} of ({p[0]}, {p[1]})")
    return idx


def write_mesh(mesh: BoundaryMesh, stream: IO[str]) -> None:
    """Write the plain-text mesh table.

    One node per line ``index x1 x2 tag value`` followed by one element
    per line ``e start end nx ny``. Internal nodes are tagged
    ``internal 0``. Ordering is deterministic.
    """
    for i in range(mesh.n_boundary + mesh.n_internal):
        x1, x2 = mesh.nodes[i]
        if i < mesh.n_boundary:
            kind, value = mesh.bc_tags[i]
            val = value if value == LOAD else format(float(value), ".16e")
        else:
            kind, val = "internal", "0"
        stream.write(f"{i} {x1:.16e} {x2:.16e} {kind} {val}\n")
    for e in range(len(mesh.elements)):
        s, t = mesh.elements[e]
        nx, ny = mesh.normals[e]
        stream.write(f"e {s} {t} {nx:.16e} {ny:.16e}\n")


def perimeter(mesh: BoundaryMesh) -> float:
    """Total length of the element loop (4.0 for the unit square)."""
    d = mesh.nodes[mesh.elements[:, 1]] - mesh.nodes[mesh.elements[:, 0]]
    return float(np.sum(np.linalg.norm(d, axis=1)))
