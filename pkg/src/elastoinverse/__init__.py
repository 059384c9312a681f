"""Boundary-only reconstruction of dynamic plate edge loads.

The toolkit couples three pieces: a boundary-element spatial
discretization of the plate wave equation whose inertia term is carried
to the boundary by radial-basis interpolation, an exponential-matrix
time stepper that is exact for loads varying linearly within a step,
and a dynamic-programming smoother with first-order Tikhonov
regularization that recovers an unknown edge-load history from sparse,
noisy displacement or velocity measurements.
"""

from .assembly import (
    DualReciprocityBasis,
    InfluenceMatrices,
    ReducedSystem,
    assemble_dual_reciprocity,
    assemble_influence,
    dump_matrix,
    reduce_system,
    solve_static,
)
from .dpfilter import (
    AugmentedModel,
    BackwardPass,
    EstimationResult,
    FilterWeights,
    LCurveResult,
    augment,
    backward_sweep,
    batch_qp_oracle,
    estimate,
    forward_sweep,
    l_curve_select,
)
from .errors import ElastoInverseError
from .experiments import (
    InverseScenario,
    MeasurementSet,
    PlateModel,
    SensorChannel,
    build_plate_model,
    make_measurements,
    paper_figure_scenarios,
    run_forward,
    run_inverse,
    run_sweep,
)
from .integrator import (
    StateSpaceModel,
    TransitionSet,
    build_state_space,
    build_transition,
    precise_expm,
    simulate,
    step_forward,
)
from .mesh import BoundaryMesh, build_square_plate, locate_node, write_mesh
from .signals import LoadSignal, add_noise, analytic_rod_response

__version__ = "0.1.0"

__all__ = [
    "AugmentedModel",
    "BackwardPass",
    "BoundaryMesh",
    "DualReciprocityBasis",
    "ElastoInverseError",
    "EstimationResult",
    "FilterWeights",
    "InfluenceMatrices",
    "InverseScenario",
    "LCurveResult",
    "LoadSignal",
    "MeasurementSet",
    "PlateModel",
    "ReducedSystem",
    "SensorChannel",
    "StateSpaceModel",
    "TransitionSet",
    "add_noise",
    "analytic_rod_response",
    "assemble_dual_reciprocity",
    "assemble_influence",
    "augment",
    "backward_sweep",
    "batch_qp_oracle",
    "build_plate_model",
    "build_square_plate",
    "build_state_space",
    "build_transition",
    "dump_matrix",
    "estimate",
    "forward_sweep",
    "l_curve_select",
    "locate_node",
    "make_measurements",
    "paper_figure_scenarios",
    "precise_expm",
    "reduce_system",
    "run_forward",
    "run_inverse",
    "run_sweep",
    "simulate",
    "solve_static",
    "step_forward",
    "write_mesh",
]
