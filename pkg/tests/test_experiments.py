import numpy as np
import pytest

from elastoinverse.errors import UnknownSensorError
from elastoinverse.experiments import (
    DEFAULT_SENSOR_POINTS,
    InverseScenario,
    SensorChannel,
    load_metrics,
    make_measurements,
    paper_figure_scenarios,
    run_forward,
    run_inverse,
    run_sweep,
    sweep_rows,
)
from elastoinverse.mesh import locate_node
from elastoinverse.signals import HEAVISIDE, PERIODIC, ZERO, LoadSignal, analytic_rod_response

A_VEL = SensorChannel("A", DEFAULT_SENSOR_POINTS["A"], "velocity")
C_VEL = SensorChannel("C", DEFAULT_SENSOR_POINTS["C"], "velocity")


class TestRunForward:
    def test_zero_load_zero_histories(self, default_plate):
        fwd = run_forward(default_plate, LoadSignal(ZERO), 5.0)
        assert np.all(fwd.states == 0.0)
        assert np.all(fwd.load_samples == 0.0)

    def test_heaviside_matches_rod_benchmark(self, default_plate):
        fwd = run_forward(default_plate, LoadSignal(HEAVISIDE, 1.0), 8.0)
        node = locate_node(default_plate.mesh, (0.0, 0.5))
        dof = default_plate.reduced.dof_of_node(node)
        u = fwd.states[:, dof]
        u_rod, _ = analytic_rod_response(0.0, fwd.times, LoadSignal(HEAVISIDE, 1.0), n_modes=400)
        assert np.linalg.norm(u - u_rod) / np.linalg.norm(u_rod) < 0.05

    def test_periodic_steady_amplitude(self, default_plate):
        load = LoadSignal(PERIODIC, 1.0, 1.0)
        fwd = run_forward(default_plate, load, 20.0)
        node = locate_node(default_plate.mesh, (0.0, 0.5))
        dof = default_plate.reduced.dof_of_node(node)
        late = fwd.times >= 10.0
        u_rod, _ = analytic_rod_response(0.0, fwd.times, load, n_modes=400)
        amp = np.max(np.abs(fwd.states[late, dof]))
        amp_rod = np.max(np.abs(u_rod[late]))
        assert amp == pytest.approx(amp_rod, rel=0.10)


class TestMeasurements:
    def test_noise_bound_and_channels(self, default_plate):
        fwd = run_forward(default_plate, LoadSignal(PERIODIC, 1.0, 1.0), 10.0)
        ms = make_measurements(default_plate, fwd, [A_VEL, C_VEL], 0.10, seed=4)
        assert ms.exact.shape == (100, 2)
        for k in range(2):
            amp = np.max(np.abs(ms.exact[:, k]))
            assert np.max(np.abs(ms.noisy[:, k] - ms.exact[:, k])) <= 0.5 * 0.10 * amp
        assert not np.array_equal(ms.noisy[:, 0], ms.noisy[:, 1])

    def test_deterministic_given_seed(self, default_plate):
        fwd = run_forward(default_plate, LoadSignal(PERIODIC, 1.0, 1.0), 5.0)
        a = make_measurements(default_plate, fwd, [A_VEL], 0.2, seed=11)
        b = make_measurements(default_plate, fwd, [A_VEL], 0.2, seed=11)
        assert np.array_equal(a.noisy, b.noisy)

    def test_unknown_sensor_point(self, default_plate):
        fwd = run_forward(default_plate, LoadSignal(PERIODIC, 1.0, 1.0), 5.0)
        off_lattice = SensorChannel("X", (0.33, 0.33), "velocity")
        with pytest.raises(UnknownSensorError):
            make_measurements(default_plate, fwd, [off_lattice], 0.1, seed=0)
        clamped = SensorChannel("Y", (1.0, 0.5), "displacement")
        with pytest.raises(UnknownSensorError):
            make_measurements(default_plate, fwd, [clamped], 0.1, seed=0)


class TestMetrics:
    def test_windows_and_values(self):
        truth = np.ones(101)
        recon = np.ones(101)
        recon[95:] += 1.0  # corrupt the final window only
        m = load_metrics(truth, recon)
        assert m["rel_l2_trunc"] == pytest.approx(0.0, abs=1e-15)
        assert m["rel_l2_last"] > 0.5
        assert m["rel_l2_full"] > 0.0
        assert m["plateau_mean"] == pytest.approx(1.0)
        assert m["sum_abs_error"] == pytest.approx(6.0)

    def test_xcorr_perfect(self):
        truth = np.sin(np.linspace(0, 6, 101))
        m = load_metrics(truth, truth.copy())
        assert m["xcorr_trunc"] == pytest.approx(1.0, abs=1e-12)


class TestRunInverse:
    def test_noise_free_recovery(self, default_plate):
        sc = InverseScenario(
            load=LoadSignal(PERIODIC, 1.0, 1.0),
            sensors=(A_VEL, C_VEL),
            noise_pct=0.0,
            seed=1,
        )
        with pytest.warns(RuntimeWarning, match="FLAT_CURVE"):
            result = run_inverse(default_plate, sc)
        assert result.metrics["rel_l2_trunc"] < 0.02

    def test_fixed_regularization_path(self, default_plate):
        sc = InverseScenario(
            load=LoadSignal(PERIODIC, 1.0, 1.0),
            sensors=(A_VEL, C_VEL),
            noise_pct=0.05,
            seed=1,
            regularization=1.0,
        )
        result = run_inverse(default_plate, sc)
        assert result.chosen_b == 1.0
        assert result.lcurve is None
        assert result.metrics["rel_l2_trunc"] < 0.15

    def test_deterministic(self, default_plate):
        sc = InverseScenario(
            load=LoadSignal(HEAVISIDE, 1.0),
            sensors=(C_VEL,),
            noise_pct=0.2,
            seed=3,
            regularization=0.1,
            t_end=6.0,
        )
        r1 = run_inverse(default_plate, sc)
        r2 = run_inverse(default_plate, sc)
        assert np.array_equal(r1.estimation.load_history, r2.estimation.load_history)


class TestLCurveOnPlate:
    def test_corner_within_decade_of_truth_optimum(self, default_plate):
        # Truth-aware sweep over the same grid as the corner search.
        from elastoinverse.dpfilter import FilterWeights, augment, estimate, l_curve_select
        from elastoinverse.experiments import DEFAULT_B_GRID

        fwd = run_forward(default_plate, LoadSignal(PERIODIC, 1.0, 1.0), 20.0)
        ms = make_measurements(default_plate, fwd, [A_VEL, C_VEL], 0.10, seed=3)
        aug = augment(
            default_plate.transition,
            default_plate.state_space,
            [(n, q) for _, n, q in ms.channels],
        )
        lres = l_curve_select(aug, FilterWeights(B_reg=1.0), ms.noisy, DEFAULT_B_GRID)

        truth = fwd.load_samples
        cut = int(0.9 * (len(truth) - 1))
        best = (np.inf, None)
        for b in DEFAULT_B_GRID:
            res = estimate(aug, FilterWeights(B_reg=float(b)), ms.noisy)
            err = np.linalg.norm(res.load_history[1 : cut + 1, 0] - truth[1 : cut + 1])
            if err < best[0]:
                best = (err, float(b))
        assert abs(np.log10(lres.chosen_b / best[1])) <= 1.0

    def test_noise_free_choice_stays_small(self, default_plate):
        from elastoinverse.dpfilter import FilterWeights, augment, l_curve_select
        from elastoinverse.experiments import DEFAULT_B_GRID

        fwd = run_forward(default_plate, LoadSignal(PERIODIC, 1.0, 1.0), 12.0)
        ms = make_measurements(default_plate, fwd, [A_VEL, C_VEL], 0.0, seed=3)
        aug = augment(
            default_plate.transition,
            default_plate.state_space,
            [(n, q) for _, n, q in ms.channels],
        )
        with pytest.warns(RuntimeWarning, match="FLAT_CURVE"):
            lres = l_curve_select(aug, FilterWeights(B_reg=1.0), ms.noisy, DEFAULT_B_GRID)
        # No trade-off to balance: the fallback sits at the small end of
        # the grid, far below where over-smoothing errors appear.
        assert lres.chosen_b <= 1.0


class TestSweep:
    def test_stock_scenarios_cover_matrix(self):
        scenarios = paper_figure_scenarios(seed=10)
        assert len(scenarios) == 12
        assert [s.name for s in scenarios] == [f"fig{i:02d}" for i in range(2, 14)]
        kinds = {s.load.kind for s in scenarios}
        assert kinds == {PERIODIC, HEAVISIDE}
        assert {s.noise_pct for s in scenarios} == {0.05, 0.10, 0.20, 0.40}
        # distinct seeds per scenario
        assert len({s.seed for s in scenarios}) == 12

    def test_single_scenario_sweep_equals_run_inverse(self, default_plate):
        sc = InverseScenario(
            load=LoadSignal(PERIODIC, 1.0, 1.0),
            sensors=(C_VEL,),
            noise_pct=0.05,
            seed=21,
            regularization=0.5,
            t_end=10.0,
            name="solo",
        )
        direct = run_inverse(default_plate, sc)
        swept = run_sweep(default_plate, [sc], workers=1)
        rows = sweep_rows(swept)
        assert rows[0]["scenario"] == "solo"
        assert rows[0]["rel_l2_trunc"] == direct.metrics["rel_l2_trunc"]

    def test_worker_cap_env(self, monkeypatch):
        from elastoinverse.experiments import sweep_workers

        monkeypatch.setenv("ELASTOINVERSE_THREADS", "1")
        assert sweep_workers() == 1
        monkeypatch.setenv("ELASTOINVERSE_THREADS", "not-a-number")
        assert sweep_workers() >= 1
        monkeypatch.delenv("ELASTOINVERSE_THREADS")
        assert sweep_workers() >= 1

    def test_parallel_matches_serial(self, default_plate):
        scenarios = [
            InverseScenario(
                load=LoadSignal(PERIODIC, 1.0, 1.0),
                sensors=(C_VEL,),
                noise_pct=0.1,
                seed=30 + i,
                regularization=0.5,
                t_end=8.0,
                name=f"s{i}",
            )
            for i in range(3)
        ]
        serial = sweep_rows(run_sweep(default_plate, scenarios, workers=1))
        parallel = sweep_rows(run_sweep(default_plate, scenarios, workers=3))
        assert serial == parallel
