import numpy as np
import pytest

from elastoinverse.assembly import (
    assemble_dual_reciprocity,
    assemble_influence,
    reduce_system,
)
from elastoinverse.experiments import build_plate_model
from elastoinverse.integrator import StateSpaceModel, build_transition
from elastoinverse.mesh import build_square_plate


@pytest.fixture(scope="session")
def paper_mesh():
    """The benchmark discretization: 0.1 elements, one interior point."""
    return build_square_plate(0.1, [(0.5, 0.5)])


@pytest.fixture(scope="session")
def paper_chain(paper_mesh):
    infl = assemble_influence(paper_mesh)
    basis = assemble_dual_reciprocity(paper_mesh, infl, 1.0)
    reduced = reduce_system(paper_mesh, infl, basis)
    return paper_mesh, infl, basis, reduced


@pytest.fixture(scope="session")
def default_plate():
    """The stock experiment pipeline (denser interior grid)."""
    return build_plate_model()


def make_oscillator(m=1.0, k=4.0, phi=1.0, dt=0.1, n_squarings=20):
    """Single-dof test system in first-order form, with its stepper."""
    A = np.array([[0.0, 1.0], [-k / m, 0.0]])
    force_map = np.array([0.0, phi / m])
    model = StateSpaceModel(A_state=A, force_map=force_map, n_dof=1, dof_lookup={0: 0})
    trans = build_transition(model, dt, n_squarings)
    return model, trans


def random_stable_model(rng, n):
    """Random undamped system: SPD stiffness in companion form."""
    W = rng.standard_normal((n, n))
    W = W @ W.T + n * np.eye(n)
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -W
    force_map = np.concatenate([np.zeros(n), rng.standard_normal(n)])
    return StateSpaceModel(
        A_state=A, force_map=force_map, n_dof=n, dof_lookup={i: i for i in range(n)}
    )
