"""
Tests for Models, Stepping and the Runner
"""

import math

import numpy as np
import pytest

from diagnostics import conserved_quantities, hs_norm
from dynamics import (
    BlowUpError,
    ModelSpec,
    SimulationState,
    Splitting,
    cfl_dt,
    delta_sqg,
    dissipative_delta_sqg,
    explicit_modes,
    log_dissipative,
    normalize,
    ohkitani,
    random_band,
    rhs,
    run,
    shear,
    step_rk4,
    trajectory,
    velocity_amplitude,
)
from spectral import (
    GridError,
    MultiplierSpec,
    SpectralField,
    SymbolFamily,
    hermitian_defect,
    l2_inner,
    make_grid,
)
from storage import SimulationConfig


def small_band(n: int = 32, seed: int = 0, amplitude: float = 0.1) -> SpectralField:
    return random_band(make_grid(n), 1, 4, seed=seed, target=amplitude, normalization="l2")


def fixed_config(**sections) -> SimulationConfig:
    data = {
        "grid": {"n": 16},
        "time": {"mode": "fixed", "dt": 0.01, "t_end": 0.05},
        "ic": {"kind": "modes", "modes": []},
    }
    data.update(sections)
    return SimulationConfig.model_validate(data)


class TestModels:
    """Test suite for model presets."""

    def test_ohkitani_sign(self):
        """Test the log-SQG law carries sign -1."""
        model = ohkitani()

        assert model.biot_savart.family is SymbolFamily.LOG10
        assert model.biot_savart.sign == -1
        assert model.dissipation is None

    def test_delta_sqg(self):
        """Test the power law and its rescaled-time form."""
        plain = delta_sqg(0.2)
        rescaled = delta_sqg(0.2, rescaled_time=True)

        assert plain.biot_savart.family is SymbolFamily.POWER_SHIFT
        assert plain.time_scale == 1.0
        assert rescaled.biot_savart.family is SymbolFamily.RESCALED
        assert rescaled.time_scale == pytest.approx(5.0)

    def test_rescaled_time_needs_rescaled_law(self):
        """Test the time variable and the law must agree."""
        with pytest.raises(ValueError):
            ModelSpec(biot_savart=MultiplierSpec(family=SymbolFamily.LOG10), rescaled_time=True)

    def test_dissipation_rate(self):
        """Test kappa * psi on the grid, scaled in rescaled time."""
        grid = make_grid(16)
        model = log_dissipative(beta=2.0, kappa=0.5)
        rate = model.dissipation_rate(grid)

        assert rate[1, 0] == pytest.approx(0.5 * math.log(11.0) ** 2)
        assert ohkitani().dissipation_rate(grid) is None

        scaled = dissipative_delta_sqg(0.25, kappa=1.0, rescaled_time=True)
        assert scaled.dissipation_rate(grid)[1, 0] == pytest.approx(4.0 * math.log(11.0))

    def test_with_options(self):
        """Test options revalidate the model."""
        model = ohkitani().with_options(splitting=Splitting.LAWSON)

        assert model.splitting is Splitting.LAWSON
        assert model.biot_savart.sign == -1


class TestInitialConditions:
    """Test suite for initial-condition builders."""

    def test_random_band_normalized(self):
        """Test the H^5 norm equals the target and the mean is zero."""
        theta = random_band(make_grid(32), 2, 6, seed=11, target=3.0)

        assert hs_norm(theta, 5.0) == pytest.approx(3.0)
        assert theta.mean == 0.0
        assert hermitian_defect(theta.grid, theta.coeffs) == 0.0

    def test_random_band_deterministic(self):
        """Test equal seeds give identical coefficients."""
        a = random_band(make_grid(16), 1, 4, seed=5)
        b = random_band(make_grid(16), 1, 4, seed=5)
        c = random_band(make_grid(16), 1, 4, seed=6)

        assert np.array_equal(a.coeffs, b.coeffs)
        assert not np.array_equal(a.coeffs, c.coeffs)

    def test_random_band_bounds(self):
        """Test bands past the cutoff or without modes are refused."""
        grid = make_grid(16)
        with pytest.raises(GridError):
            random_band(grid, 1, 6, seed=0)
        with pytest.raises(GridError):
            random_band(grid, 3, 2, seed=0)
        with pytest.raises(GridError):
            random_band(grid, 0, 0, seed=0)

    def test_explicit_modes(self):
        """Test the conjugate partner is filled in."""
        grid = make_grid(16)
        theta = explicit_modes(grid, [(1, 2, 0.3, 0.4)])

        assert theta.coeffs[1, 2] == pytest.approx(0.3 + 0.4j)
        assert theta.coeffs[15, 14] == pytest.approx(0.3 - 0.4j)
        assert hermitian_defect(grid, theta.coeffs) == 0.0

    def test_normalize_zero(self):
        """Test zero stays zero."""
        zero = SpectralField.zeros(make_grid(8))

        assert normalize(zero, 1.0) is zero


class TestRightHandSide:
    """Test suite for the pseudo-spectral tendency."""

    def test_shear_is_steady(self):
        """Test cos x1 has zero tendency under every law."""
        theta = shear(make_grid(16))
        state = SimulationState(t=0.0, theta=theta)

        for model in (ohkitani(), delta_sqg(0.3)):
            assert np.all(rhs(state, model).coeffs == 0.0)

    def test_tendency_is_hermitian_and_mean_free(self):
        """Test the tendency is a real, mean-free field."""
        state = SimulationState(t=0.0, theta=small_band())
        out = rhs(state, ohkitani())

        assert out.coeffs[0, 0] == 0.0
        assert hermitian_defect(out.grid, out.coeffs) <= 1e-14

    @pytest.mark.parametrize("model", [ohkitani(), delta_sqg(0.2)], ids=["ohkitani", "delta_sqg"])
    def test_advection_is_skew(self, model):
        """Test the transport term is L2-orthogonal to theta."""
        theta = small_band(seed=3, amplitude=1.0)
        out = rhs(SimulationState(t=0.0, theta=theta), model)
        scale = math.sqrt(l2_inner(theta, theta) * l2_inner(out, out))

        assert scale > 0
        assert abs(l2_inner(theta, out)) <= 1e-12 * scale

    def test_dissipation_term(self):
        """Test -kappa psi theta is added when requested."""
        theta = shear(make_grid(16))
        model = log_dissipative(beta=1.0, kappa=0.2)
        out = rhs(SimulationState(t=0.0, theta=theta), model)
        bare = rhs(SimulationState(t=0.0, theta=theta), model, include_dissipation=False)

        assert out.coeffs[1, 0] == pytest.approx(-0.2 * math.log(11.0) * 0.5)
        assert np.all(bare.coeffs == 0.0)


class TestStepping:
    """Test suite for integrating-factor RK4."""

    def test_shear_unchanged(self):
        """Test one step leaves the shear steady state alone."""
        theta = shear(make_grid(16))
        new = step_rk4(SimulationState(t=0.0, theta=theta), ohkitani(), 0.1)

        assert np.array_equal(new.theta.coeffs, theta.coeffs)
        assert new.t == pytest.approx(0.1)
        assert new.step_count == 1

    @pytest.mark.parametrize("model", [ohkitani(), delta_sqg(0.1)], ids=["ohkitani", "delta_sqg"])
    def test_shear_steady_over_1000_steps(self, model):
        """Test the shear survives 1000 steps bit for bit."""
        theta = shear(make_grid(16))
        final = trajectory(theta, model, 0.01, 1000, every=1000)[-1]

        assert np.array_equal(final.theta.coeffs, theta.coeffs)
        assert final.t == pytest.approx(10.0)

    def test_dissipative_shear_decays_exactly(self):
        """Test the shear under log dissipation follows exp(-kappa log(11) t)."""
        theta = shear(make_grid(16))
        model = log_dissipative(beta=1.0, kappa=0.1)
        final = trajectory(theta, model, 0.01, 1000, every=1000)[-1]
        expected = math.exp(-0.1 * math.log(11.0) * final.t) * theta.coeffs

        assert np.allclose(final.theta.coeffs, expected, rtol=1e-10, atol=1e-16)

    def test_rescaled_time_matches_plain_time(self):
        """Test tau = delta t stepping reproduces the plain delta-SQG run."""
        delta, dt, steps = 0.1, 0.01, 20
        theta = small_band(seed=5, amplitude=1.0)
        plain = trajectory(theta, delta_sqg(delta), dt, steps, every=steps)[-1]
        rescaled = trajectory(theta, delta_sqg(delta, rescaled_time=True), delta * dt, steps, every=steps)[-1]
        gap = hs_norm(plain.theta - rescaled.theta, 0.0)

        assert rescaled.t == pytest.approx(delta * plain.t)
        assert gap <= 1e-12 * hs_norm(plain.theta, 0.0)

    @pytest.mark.parametrize("model", [
        log_dissipative(beta=1.0, kappa=0.5),
        dissipative_delta_sqg(0.2, 0.5),
    ], ids=["log_dissipative", "dissipative_delta_sqg"])
    def test_dissipative_l2_nonincreasing(self, model):
        """Test L2 never grows along a dissipative run."""
        states = trajectory(small_band(seed=6, amplitude=1.0), model, 0.01, 50)
        norms = [hs_norm(st.theta, 0.0) for st in states]

        assert all(b <= a for a, b in zip(norms, norms[1:]))
        assert norms[-1] < norms[0]

    def test_conservation(self):
        """Test L2 and Gamma-energy drift stays at time-stepping error."""
        model = ohkitani()
        state = SimulationState(t=0.0, theta=small_band(seed=2))
        before = conserved_quantities(state.theta, model)
        for _ in range(20):
            state = step_rk4(state, model, 1e-3)
        after = conserved_quantities(state.theta, model)

        assert after.l2 == pytest.approx(before.l2, rel=1e-8)
        assert after.gamma_energy == pytest.approx(before.gamma_energy, rel=1e-8)

    @pytest.mark.parametrize("splitting", [Splitting.STRANG, Splitting.LAWSON])
    def test_pure_dissipation_is_exact(self, splitting):
        """Test each mode decays by exp(-kappa psi dt) without advection."""
        model = log_dissipative(beta=1.0, kappa=0.5, advection=False, splitting=splitting)
        theta = small_band(n=16)
        new = step_rk4(SimulationState(t=0.0, theta=theta), model, 0.2)
        factor = np.exp(-0.2 * model.dissipation_rate(theta.grid))

        assert np.allclose(new.theta.coeffs, factor * theta.coeffs, rtol=1e-13, atol=1e-16)

    def test_fourth_order(self):
        """Test each halving of dt divides the error by about 16 at order-one amplitude."""
        model = ohkitani()
        theta = small_band(n=32, seed=4, amplitude=1.0)
        T = 0.1

        def final(dt):
            steps = round(T / dt)
            return trajectory(theta, model, dt, steps, every=steps)[-1].theta

        reference = final(T / 640)
        errors = [hs_norm(final(T / k) - reference, 0.0) for k in (10, 20, 40)]
        orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]

        assert errors[-1] > 1e3 * hs_norm(reference, 0.0) * np.finfo(float).eps
        assert min(orders) >= 3.8

    def test_rejects_nonpositive_dt(self):
        """Test dt must be positive."""
        with pytest.raises(ValueError):
            step_rk4(SimulationState(t=0.0, theta=shear(make_grid(8))), ohkitani(), 0.0)

    def test_non_finite_raises_blowup(self):
        """Test overflowing coefficients raise BlowUpError with the last state."""
        theta = small_band(n=16).scaled(1e200)
        state = SimulationState(t=0.5, theta=theta, step_count=7)

        with pytest.raises(BlowUpError) as info:
            step_rk4(state, ohkitani(), 0.1)

        assert info.value.last_state is state
        assert info.value.step == 8
        assert info.value.t == pytest.approx(0.6)


class TestTimeControl:
    """Test suite for velocity amplitude and CFL."""

    def test_velocity_amplitude(self):
        """Test sup |u| = log(a + 1) for cos x1."""
        state = SimulationState(t=0.0, theta=shear(make_grid(16)))

        assert velocity_amplitude(state, ohkitani()) == pytest.approx(math.log(11.0))

    def test_cfl(self):
        """Test dt = cfl dx / u_max, capped by dt_max."""
        state = SimulationState(t=0.0, theta=shear(make_grid(16)))
        expected = 0.5 * state.grid.dx / math.log(11.0)

        assert cfl_dt(state, ohkitani(), 0.5, 1.0) == pytest.approx(expected)
        assert cfl_dt(state, ohkitani(), 0.5, 1e-3) == 1e-3

    def test_cfl_zero_velocity(self):
        """Test zero data falls back to dt_max."""
        state = SimulationState(t=0.0, theta=SpectralField.zeros(make_grid(8)))

        assert cfl_dt(state, ohkitani(), 0.5, 0.02) == 0.02

    def test_cfl_range(self):
        """Test the CFL number must lie in (0, 1]."""
        state = SimulationState(t=0.0, theta=shear(make_grid(8)))
        with pytest.raises(ValueError):
            cfl_dt(state, ohkitani(), 0.0, 0.1)
        with pytest.raises(ValueError):
            cfl_dt(state, ohkitani(), 1.5, 0.1)


class TestTrajectory:
    """Test suite for fixed-step trajectories."""

    def test_sampling(self):
        """Test samples every `every` steps plus the last one."""
        theta = shear(make_grid(16))

        states = trajectory(theta, ohkitani(), 0.1, 5, every=2)

        assert [s.step_count for s in states] == [0, 2, 4, 5]
        assert [s.t for s in states] == [0.0, 0.2, 0.4, 0.5]

    def test_zero_steps(self):
        """Test zero steps returns the initial state only."""
        states = trajectory(shear(make_grid(8)), ohkitani(), 0.1, 0)

        assert len(states) == 1

    def test_negative_steps(self):
        """Test negative step counts are refused."""
        with pytest.raises(ValueError):
            trajectory(shear(make_grid(8)), ohkitani(), 0.1, -1)

    def test_blowup_attaches_samples(self):
        """Test BlowUpError carries the samples gathered before it."""
        theta = small_band(n=16).scaled(1e200)

        with pytest.raises(BlowUpError) as info:
            trajectory(theta, ohkitani(), 0.1, 3)

        assert len(info.value.states) == 1
        assert info.value.states[0].t == 0.0


class TestRunner:
    """Test suite for configured runs."""

    def test_zero_horizon(self):
        """Test t_end = 0 yields one record and the initial checkpoint."""
        config = fixed_config(time={"mode": "fixed", "dt": 0.01, "t_end": 0.0})
        result = run(config)

        assert len(result.series) == 1
        assert len(result.checkpoints) == 1
        assert result.final.t == 0.0

    def test_zero_data_stays_zero(self):
        """Test zero data is a fixed point."""
        result = run(fixed_config())

        assert result.final.t == pytest.approx(0.05)
        assert result.final.step_count == 5
        assert len(result.series) == 6
        assert result.series.max_of("l2") == 0.0
        assert result.series.max_of("u_max") == 0.0

    def test_checkpoint_times(self):
        """Test requested times are hit exactly."""
        config = fixed_config(
            ic={"kind": "shear"},
            output={"checkpoint_times": [0.02]},
        )
        result = run(config)

        assert [s.t for s in result.checkpoints] == [0.0, 0.02, 0.05]

    def test_record_every(self):
        """Test diagnostics are thinned by record_every."""
        config = fixed_config(output={"record_every": 2})

        assert len(run(config).series) == 4

    def test_cfl_mode(self):
        """Test CFL steps land on t_end."""
        config = fixed_config(
            ic={"kind": "shear"},
            time={"mode": "cfl", "cfl": 0.5, "dt_max": 0.02, "t_end": 0.1},
        )
        result = run(config)

        assert result.final.t == 0.1
        assert result.series.relative_drift("l2") == pytest.approx(0.0, abs=1e-14)

    def test_observer(self):
        """Test the observer sees every recorded state."""
        seen = []
        result = run(fixed_config(), observer=seen.append)

        assert len(seen) == len(result.series)

    def test_velocity_ceiling(self):
        """Test exceeding u_max_ceiling raises with the partial series."""
        config = fixed_config(
            ic={"kind": "shear"},
            time={"mode": "fixed", "dt": 0.01, "t_end": 0.05, "u_max_ceiling": 1.0},
        )

        with pytest.raises(BlowUpError) as info:
            run(config)

        assert len(info.value.series) == 1
        assert info.value.last_state.t == 0.0
