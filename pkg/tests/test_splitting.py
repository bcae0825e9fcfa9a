import numpy as np
import pytest

from logsplit import spectral as sp
from logsplit import splitting as spl

LAM = -16.0
N = 64


def gaussian_coeffs(modes=N, lam=LAM):
    # stationary-profile data exp(lam x^2 / 2); boundary value ~ e^{-8 pi^2}
    grid = sp.TorusGrid.for_modes(modes, oversample=4)
    u0 = np.exp(lam / 2 * grid.axis_nodes**2).astype(complex)
    return sp.forward(sp.PhysicalField(grid, u0), modes=modes)


def exact_phase_solution(t, modes=N, lam=LAM):
    # the profile only rotates: u(t) = e^{i lam t} u0 for this data
    f = gaussian_coeffs(modes, lam)
    return sp.SpectralField(f.grid, np.exp(1j * lam * t) * f.coeffs)


class TestConfig:
    def test_time_grid_must_divide(self):
        with pytest.raises(ValueError, match="integer"):
            spl.SolverConfig(lam=-1.0, tau=0.3, final_time=1.0, modes=8)

    def test_near_integer_ratio_accepted(self):
        cfg = spl.SolverConfig(lam=-1.0, tau=0.1 + 1e-12, final_time=1.0, modes=8)
        assert cfg.steps == 10

    def test_snapshot_mapping_nearest_step(self):
        cfg = spl.SolverConfig(
            lam=-1.0, tau=2.0**-7, final_time=1.0, modes=8, snapshot_times=(0.4, 0.7, 1.0)
        )
        assert cfg.snapshot_steps == {51: 0.4, 90: 0.7, 128: 1.0}

    def test_snapshot_collision_rejected(self):
        with pytest.raises(ValueError, match="both map to step"):
            spl.SolverConfig(
                lam=-1.0, tau=0.25, final_time=1.0, modes=8, snapshot_times=(0.4, 0.45)
            )

    def test_snapshot_outside_range(self):
        with pytest.raises(ValueError, match="outside"):
            spl.SolverConfig(lam=-1.0, tau=0.25, final_time=1.0, modes=8, snapshot_times=(1.5,))

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            spl.SolverConfig(lam=0.0, tau=0.1, final_time=1.0, modes=8)
        with pytest.raises(ValueError):
            spl.SolverConfig(lam=-1.0, tau=0.1, final_time=1.0, modes=0)
        with pytest.raises(ValueError):
            spl.SolverConfig(lam=-1.0, tau=0.1, final_time=1.0, modes=8, eps=-1e-3)


class TestStep:
    def test_step_matches_run_bitwise(self):
        cfg = spl.SolverConfig(lam=LAM, tau=2.0**-6, final_time=10 * 2.0**-6, modes=N)
        state = spl.init_state(cfg, gaussian_coeffs())
        for _ in range(10):
            state = spl.step(state, cfg)
        traj = spl.run(cfg, gaussian_coeffs())
        np.testing.assert_array_equal(state.field.coeffs, traj.final.field.coeffs)
        assert state.mass == traj.final.mass

    def test_mass_abort(self):
        cfg = spl.SolverConfig(lam=LAM, tau=2.0**-6, final_time=1.0, modes=N)
        state = spl.init_state(cfg, gaussian_coeffs())
        poisoned = spl.SolverState(state.step, state.time, state.field, state.mass * 1e-6)
        with pytest.raises(spl.SolverAbort, match="mass grew"):
            spl.step(poisoned, cfg)

    def test_first_step_structure(self):
        # one step applied by hand: nonlinear phase, project, free phase
        cfg = spl.SolverConfig(lam=-2.0, tau=0.125, final_time=0.125, modes=12)
        f = gaussian_coeffs(12, -2.0)
        state = spl.init_state(cfg, f)
        nxt = spl.step(state, cfg)

        from logsplit import nonlinear as nl
        from logsplit import propagator as pr

        phys = sp.synthesize(state.field)
        flowed = nl.log_flow(phys, cfg.tau, cfg.lam)
        projected = sp.forward(flowed, modes=cfg.modes)
        manual = pr.free_flow(projected, cfg.tau)
        np.testing.assert_allclose(nxt.field.coeffs, manual.coeffs, atol=1e-15)


class TestRun:
    def test_init_state_projects_or_pads(self):
        cfg = spl.SolverConfig(lam=-1.0, tau=0.25, final_time=1.0, modes=10)
        big = gaussian_coeffs(20)
        st = spl.init_state(cfg, big)
        assert st.field.grid.modes == 10
        np.testing.assert_array_equal(st.field.coeffs, big.coeffs[10:31])
        small = gaussian_coeffs(4)
        st2 = spl.init_state(cfg, small)
        assert st2.field.coeffs[0] == 0.0

    def test_mass_never_increases(self):
        rng = np.random.default_rng(11)
        k = np.arange(-N, N + 1)
        c = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) / (1.0 + np.abs(k)) ** 0.9
        cfg = spl.SolverConfig(lam=-1.0, tau=2.0**-8, final_time=0.25, modes=N)
        traj = spl.run(cfg, c)
        ratios = traj.mass_values[1:] / traj.mass_values[:-1]
        assert np.all(ratios <= 1.0 + spl.MASS_STEP_TOL)

    def test_mass_drift_tiny_on_smooth_data(self):
        cfg = spl.SolverConfig(lam=LAM, tau=2.0**-9, final_time=0.5, modes=N)
        traj = spl.run(cfg, gaussian_coeffs())
        drift = np.max(np.abs(traj.mass_values / traj.mass_values[0] - 1.0))
        assert drift < 1e-10

    def test_snapshots_collected_with_labels(self):
        cfg = spl.SolverConfig(
            lam=LAM, tau=2.0**-7, final_time=1.0, modes=32, snapshot_times=(0.0, 0.4, 1.0)
        )
        traj = spl.run(cfg, gaussian_coeffs(32))
        assert [s.step for s in traj.snapshots] == [0, 51, 128]
        snap = traj.snapshot_at(0.4)
        assert snap.step == 51
        np.testing.assert_array_equal(traj.snapshot_at(1.0).field.coeffs, traj.final.field.coeffs)
        with pytest.raises(KeyError):
            traj.snapshot_at(0.5)

    def test_first_order_convergence_on_rotating_profile(self):
        exact = exact_phase_solution(0.5)
        errs = []
        for j in (7, 8, 9, 10):
            cfg = spl.SolverConfig(lam=LAM, tau=2.0**-j, final_time=0.5, modes=N)
            traj = spl.run(cfg, gaussian_coeffs())
            errs.append(
                np.sqrt(2 * np.pi) * np.linalg.norm(traj.final.field.coeffs - exact.coeffs)
            )
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(slopes > 0.9) and np.all(slopes < 1.1), slopes

    def test_regularised_run_close_to_exact_flow_run(self):
        # eps-flow differs from the exact flow by O(lam T eps) in L^2
        base = spl.SolverConfig(lam=LAM, tau=2.0**-7, final_time=0.25, modes=N)
        reg = spl.SolverConfig(lam=LAM, tau=2.0**-7, final_time=0.25, modes=N, eps=1e-8)
        a = spl.run(base, gaussian_coeffs()).final.field.coeffs
        b = spl.run(reg, gaussian_coeffs()).final.field.coeffs
        gap = np.sqrt(2 * np.pi) * np.linalg.norm(a - b)
        assert 0 < gap < 32 * 0.25 * 1e-8 * 10

    def test_run_does_not_mutate_input(self):
        c = gaussian_coeffs(16)
        before = c.coeffs.copy()
        cfg = spl.SolverConfig(lam=-1.0, tau=0.125, final_time=0.5, modes=16)
        spl.run(cfg, c)
        np.testing.assert_array_equal(c.coeffs, before)
