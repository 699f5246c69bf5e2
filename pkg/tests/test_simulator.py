# test_simulator.py
"""Strang-split simulator: oracle comparisons, conservation, positivity and blowup detection."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rdlab.callbacks import Events, callbacks
from rdlab.errors import BlowupSuspectedError, ValidationError
from rdlab.grid import Field, Grid
from rdlab.networks import get_network, polynomial_network
from rdlab.simulator import (
    SolverConfig,
    benchmark_config,
    diagnostics,
    entropy_density,
    initial_profile,
    simulate,
    step,
    whole_space_extent,
)

GRID16 = Grid.uniform(1, 1.0, 16)


def constant_config(net, levels, t_end=1.0, diffusivities=None, **solver):
    u0 = initial_profile(GRID16, net.species_count, "constant", levels=levels)
    d = diffusivities or (1.0,) * net.species_count
    return SolverConfig(network=net, diffusivities=d, grid=GRID16, initial_data=u0, t_end=t_end, **solver)


def ode_oracle(net, u0, t_end):
    sol = integrate.solve_ivp(lambda t, u: net.rates(u), (0.0, t_end), u0, method="DOP853",
                              rtol=1e-12, atol=1e-14)
    return sol.y[:, -1]


class TestStep:
    def test_zero_field_preserves_means(self, rng):
        net = get_network("zero_field")
        state = [Field(GRID16, rng.uniform(0, 2, 16)) for _ in range(2)]
        new = step(state, 0.1, net, (1.0, 3.0))
        for before, after in zip(state, new):
            assert after.mean() == pytest.approx(before.mean(), abs=1e-12)

    def test_equilibrium_is_unchanged(self, four):
        state = [Field.constant(GRID16, 1.0) for _ in range(4)]
        new = step(state, 0.01, four, (1.0, 10.0, 0.1, 5.0))
        for u in new:
            np.testing.assert_allclose(u.values, 1.0, atol=1e-14)

    def test_constant_state_matches_ode_oracle(self, four):
        u0 = np.array([2.0, 1.0, 1.0, 1.0])
        dt = 5e-3
        state = [Field.constant(GRID16, c) for c in u0]
        new = step(state, dt, four, (1.0, 10.0, 0.1, 5.0))
        expected = ode_oracle(four, u0, dt)
        for u, e in zip(new, expected):
            np.testing.assert_allclose(u.values, e, atol=1e-6)

    def test_rejects_bad_input(self, four):
        state = [Field.constant(GRID16, 1.0) for _ in range(4)]
        with pytest.raises(ValidationError):
            step(state, 0.0, four, (1.0,) * 4)
        state[0] = Field.constant(GRID16, -1.0)
        with pytest.raises(ValidationError):
            step(state, 0.1, four, (1.0,) * 4)


class TestSolverConfig:
    @pytest.mark.parametrize("kwargs", [
        {"diffusivities": (1.0, 0.0, 1.0, 1.0)},
        {"diffusivities": (1.0, 1.0)},
        {"t_end": 0.0},
        {"dt_min": 1.0, "dt_max": 0.1},
        {"snapshot_stride": 0.0},
    ])
    def test_invalid(self, four, kwargs):
        base = dict(network=four, diffusivities=(1.0,) * 4, grid=GRID16,
                    initial_data=initial_profile(GRID16, 4, "constant"), t_end=1.0)
        base.update(kwargs)
        with pytest.raises(ValidationError):
            SolverConfig(**base)

    def test_species_identically_zero(self, four):
        with pytest.raises(ValidationError):
            constant_config(four, (1.0, 0.0, 1.0, 1.0))

    def test_snapshot_mesh_ends_at_t_end(self, four):
        config = constant_config(four, (1.0,) * 4, t_end=0.1, snapshot_stride=0.03)
        times = config.snapshot_times()
        assert times[0] == 0.0 and times[-1] == 0.1
        assert np.all(np.diff(times) <= 0.03 + 1e-15)


class TestDiagnostics:
    def test_zero_state(self):
        record = diagnostics([Field.constant(GRID16, 0.0)] * 3)
        assert record.mass == 0.0 and record.entropy == 0.0

    def test_unit_state(self):
        record = diagnostics([Field.constant(GRID16, 1.0)] * 3)
        assert record.mass == pytest.approx(3.0)
        assert record.entropy == pytest.approx(3 * 2 * np.log(2))

    def test_entropy_nonnegative(self, rng):
        assert np.all(entropy_density(rng.uniform(0, 100, 1000)) >= 0)


class TestSimulate:
    def test_converges_to_equilibrium(self, four):
        config = constant_config(four, (2.0, 1.0, 1.0, 1.0), t_end=1.0, dt_max=2.5e-4)
        traj = simulate(config, progress=False)
        assert traj.completed and traj.times[-1] == 1.0
        expected = ode_oracle(four, [2.0, 1.0, 1.0, 1.0], 1.0)
        np.testing.assert_allclose(traj.states[-1].reshape(4, -1), expected[:, None] * np.ones((4, 16)), atol=1e-6)
        np.testing.assert_allclose(traj.masses, 5.0, rtol=1e-9)
        u = traj.states[-1][:, 0]
        # the imbalance u1 u3 - u2 u4 solves x' = -5x from x = 1
        assert u[0] * u[2] - u[1] * u[3] == pytest.approx(np.exp(-5.0), abs=1e-6)

    def test_benchmark_conserves_mass_and_positivity(self):
        traj = simulate(benchmark_config(points=64, t_end=0.25), progress=False)
        assert traj.completed
        drift = np.max(np.abs(traj.masses - traj.masses[0])) / traj.masses[0]
        assert drift <= 1e-8
        assert min(r.min_value for r in traj.diagnostics) >= 0.0
        assert np.all(np.diff(traj.times) > 0)

    def test_linear_decay_mass(self):
        net = get_network("linear_decay")
        config = benchmark_config(net, points=32, t_end=1.0, dt_max=1e-3)
        traj = simulate(config, progress=False)
        assert traj.masses[-1] == pytest.approx(np.exp(-1.0) * traj.masses[0], rel=1e-6)

    def test_dissipative_network_mass_nonincreasing(self):
        net = get_network("dissipative_four_species")
        config = benchmark_config(net, points=32, t_end=0.25)
        traj = simulate(config, progress=False)
        stride = np.diff(traj.times)
        assert np.all(np.diff(traj.masses) <= 1e-8 * traj.masses[0] * stride)

    def test_entropy_tilted_by_K_decreases(self):
        traj = simulate(benchmark_config(points=64, t_end=0.25), progress=False)
        tilted = np.exp(-8.0 * traj.times) * traj.entropies
        assert np.all(np.diff(tilted) <= 1e-6 * tilted[:-1])

    def test_runs_are_deterministic(self):
        a = simulate(benchmark_config(points=32, t_end=0.1), progress=False)
        b = simulate(benchmark_config(points=32, t_end=0.1), progress=False)
        np.testing.assert_array_equal(a.states, b.states)
        assert a.stats["accepted"] == b.stats["accepted"]

    def test_events_are_triggered(self):
        seen = []
        callbacks.register(Events.SNAPSHOT, lambda **kw: seen.append(kw["time"]))
        callbacks.register(Events.RUN_COMPLETE, lambda **kw: seen.append("done"))
        traj = simulate(benchmark_config(points=32, t_end=0.1), progress=False)
        assert seen[:-1] == list(traj.times[1:])
        assert seen[-1] == "done"

    def test_two_dimensional_run(self):
        traj = simulate(benchmark_config(points=16, t_end=0.05, dim=2), progress=False)
        assert traj.states.shape[1:] == (4, 16, 16)
        np.testing.assert_allclose(traj.masses, traj.masses[0], rtol=1e-9)

    def test_blowup_carries_partial_trajectory(self):
        squares = polynomial_network("squares", ("X", "Y"), [[(1.0, (2, 0))], [(1.0, (0, 2))]],
                                     growth_constant=1.0)
        config = constant_config(squares, (2.0, 2.0), t_end=1.0)
        with pytest.raises(BlowupSuspectedError) as info:
            simulate(config, progress=False)
        partial = info.value.trajectory
        assert partial is not None and not partial.completed
        # u' = u^2 from u = 2 blows up at t = 1/2; Heun lags the exact solution slightly
        assert partial.times[-1] < 0.55
        assert partial.stats["rejected"] > 0

    @given(amplitude=st.floats(min_value=0.1, max_value=5.0),
           d=st.lists(st.floats(min_value=0.05, max_value=20.0), min_size=4, max_size=4))
    @settings(max_examples=10, deadline=None)
    def test_positivity_and_conservation(self, amplitude, d):
        config = benchmark_config(diffusivities=d, points=16, t_end=0.05, amplitude=amplitude)
        traj = simulate(config, progress=False)
        assert min(r.min_value for r in traj.diagnostics) >= 0.0
        np.testing.assert_allclose(traj.masses, traj.masses[0], rtol=1e-9)

    @pytest.mark.slow
    def test_full_benchmark_conserves_mass(self):
        config = benchmark_config(points=256, t_end=1.0)
        assert config.diffusivities == (1.0, 10.0, 0.1, 5.0)
        traj = simulate(config, progress=False)
        assert traj.completed and traj.times[-1] == 1.0
        drift = np.max(np.abs(traj.masses - traj.masses[0])) / traj.masses[0]
        assert drift <= 1e-8
        assert min(r.min_value for r in traj.diagnostics) >= 0.0
        assert traj.stats["wall_time"] < 60.0

    @pytest.mark.slow
    def test_sup_norm_stable_under_refinement(self):
        sups = [simulate(benchmark_config(points=n), progress=False).sup_norm() for n in (128, 256, 512)]
        assert abs(sups[1] - sups[0]) < 0.05 * sups[0]
        assert abs(sups[2] - sups[1]) < 0.05 * sups[1]


class TestProfiles:
    @pytest.mark.parametrize("profile", ["constant", "bump", "compact", "cosine", "modes"])
    def test_profiles_are_nonnegative(self, profile):
        fields = initial_profile(Grid.uniform(2, 1.0, 16), 4, profile)
        assert all(f.min() >= 0 and f.max() > 0 for f in fields)

    def test_compact_has_no_background(self):
        fields = initial_profile(Grid.uniform(1, 1.0, 64), 2, "compact", base=0.5, width=0.2)
        for f in fields:
            assert f.values[0] == 0.0 and f.values[-1] == 0.0
            assert f.max() > 0.9

    def test_unknown_profile(self):
        with pytest.raises(ValidationError):
            initial_profile(GRID16, 2, "square")

    def test_whole_space_extent(self):
        assert whole_space_extent((1.0, 4.0), 1.0) == pytest.approx(16.0)
        assert whole_space_extent((1e-4,), 1.0, minimum=1.0) == 1.0
