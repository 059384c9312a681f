"""Walk the regularization trade-off and find the L-curve corner.

Too little smoothing reproduces the measurement noise in the load
estimate; too much flattens the load. Sweeping the Tikhonov weight
traces the residual/smoothness trade-off, whose corner (here: the point
of largest deviation from the endpoint chord in normalized log-log
coordinates) marks the balanced choice. Since the experiment is
synthetic we can also show the truth-optimal weight for comparison.
"""

import numpy as np

from elastoinverse import (
    FilterWeights,
    LoadSignal,
    augment,
    build_plate_model,
    estimate,
    l_curve_select,
    make_measurements,
    run_forward,
)
from elastoinverse.experiments import DEFAULT_SENSOR_POINTS, SensorChannel

plate = build_plate_model()
load = LoadSignal("periodic", 1.0, 1.0)
fwd = run_forward(plate, load, t_end=20.0)
sensors = [
    SensorChannel("A", DEFAULT_SENSOR_POINTS["A"], "velocity"),
    SensorChannel("C", DEFAULT_SENSOR_POINTS["C"], "velocity"),
]
ms = make_measurements(plate, fwd, sensors, noise_pct=0.10, seed=3)
aug = augment(plate.transition, plate.state_space, [(n, q) for _, n, q in ms.channels])

grid = np.logspace(-5, 3, 17)
lres = l_curve_select(aug, FilterWeights(B_reg=1.0), ms.noisy, grid)

truth = fwd.load_samples
n_steps = len(truth) - 1
cut = int(0.9 * n_steps)
print(f"{'B':>10s} {'residual':>12s} {'smoothness':>12s} {'load error':>11s}")
best = (np.inf, None)
for p in lres.points:
    res = estimate(aug, FilterWeights(B_reg=p.b), ms.noisy)
    err = np.linalg.norm(res.load_history[1 : cut + 1, 0] - truth[1 : cut + 1])
    err /= np.linalg.norm(truth[1 : cut + 1])
    if err < best[0]:
        best = (err, p.b)
    marker = "  <- corner" if p.selected else ""
    print(f"{p.b:10.3g} {p.residual_norm:12.4e} {p.smoothness_norm:12.4e} {err:11.4f}{marker}")

print(f"\ncorner choice B = {lres.chosen_b:.3g}")
print(f"truth-optimal B = {best[1]:.3g} (error {best[0]:.4f}); "
      "the corner lands within a decade without ever seeing the truth")
