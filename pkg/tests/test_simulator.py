import math

import numpy as np
import pytest

from shemass.errors import ConfigError, DomainError, NumericalBlowup
from shemass.kernels import heat_kernel
from shemass.profiles import make_profile
from shemass.simulator import (
    GridSpec,
    NonlinearitySpec,
    run_ensemble,
    simulate_pair,
    step_noise,
    write_stats_csv,
    STATS_COLUMNS,
)

LINEAR = NonlinearitySpec.linear(1.0)
ZERO = NonlinearitySpec.zero()


def small_grid(**kw):
    args = dict(half_length=4, dx=1 / 16, t_end=0.25, time_quantum=0.05)
    args.update(kw)
    return GridSpec(**args)


def test_grid_snapping():
    g = GridSpec(16, 1 / 32, 0.5, time_quantum=0.05)
    assert g.dt == pytest.approx(0.05 / 103, rel=1e-15)
    assert g.n_steps == 1030 and g.n_nodes == 1025 and g.n_cells == 1023
    assert GridSpec(3.01, 0.5, 1.0).half_length == 3.5
    assert GridSpec(3.0, 0.5, 1.0).half_length == 3.0
    assert GridSpec(4, 0.25, 1.0, boundary="neumann_zero").n_cells == 33


def test_grid_rejects_unstable_or_inconsistent_setups():
    with pytest.raises(ConfigError):
        GridSpec(4, 1 / 16, 0.25, dt=1 / 128)  # theta dt / (2 dx^2) = 1
    with pytest.raises(ConfigError):
        GridSpec(4, 1 / 16, 0.25, time_quantum=0.1)
    with pytest.raises(ConfigError):
        GridSpec(4, 1 / 16, 0.25, boundary="periodic")
    with pytest.raises(ConfigError):
        GridSpec(-1, 1 / 16, 0.25)
    assert GridSpec(4, 1 / 16, 0.25, dt=1 / 256).cfl_ratio == 0.5


def test_nonlinearity_constraints():
    with pytest.raises(DomainError):
        NonlinearitySpec.linear(-1)
    with pytest.raises(DomainError):
        NonlinearitySpec.custom([0.5, 1], [0, 1])
    with pytest.raises(DomainError):
        NonlinearitySpec.custom([0, 1], [0.1, 1])
    with pytest.raises(DomainError):
        NonlinearitySpec.custom([0, 1, 2], [0, 2, 1], lip_constant=1.0)
    with pytest.raises(DomainError):
        NonlinearitySpec("quadratic")
    s = NonlinearitySpec.custom([0, 1, 2], [0, 2, 2])
    assert s.lip_constant == 2.0
    assert s(-3.0) == 0.0 and s(0.5) == 1.0 and s(10.0) == 2.0
    assert LINEAR(-2.0) == 0.0 and LINEAR(2.0) == 2.0


def test_nonlinearity_from_callable():
    s = NonlinearitySpec.from_callable(np.sin, math.pi / 2, n=513)
    assert s.lip_constant == pytest.approx(1.0, abs=1e-5)
    assert s(1.0) == pytest.approx(math.sin(1.0), abs=1e-5)


def test_step_noise_is_deterministic_and_standard():
    g = GridSpec(16, 1 / 32, 0.5, time_quantum=0.05)
    assert np.array_equal(step_noise(g, 5, 3, 7), step_noise(g, 5, 3, 7))
    draws = np.concatenate([step_noise(g, 11, 0, k) for k in range(978)])
    assert draws.size > 10**6 - 1000
    assert abs(draws.mean()) <= 4 / math.sqrt(draws.size)
    assert abs(draws.var() - 1) <= 0.01


def test_simulator_uses_step_noise():
    g = small_grid(t_end=0.05)
    u0 = make_profile("indicator", g, a=-1, b=1)
    r = simulate_pair(g, u0, None, LINEAR, None, seed=9, path_index=4,
                      save_stride=g.n_steps)
    # march the scheme by hand with the published noise
    u = u0.samples.copy()
    c = g.cfl_ratio
    for k in range(g.n_steps):
        z = step_noise(g, 9, 4, k)
        new = u.copy()
        inner = slice(1, -1)
        lap = u[2:] - 2 * u[1:-1] + u[:-2]
        new[inner] = u[inner] + c * lap + np.maximum(u[inner], 0) * g.noise_scale * z
        u = new
    assert np.allclose(r.final_u, u, rtol=0, atol=1e-12)
    assert r.mass_u[-1] == pytest.approx(g.dx * u[1:-1].sum(), abs=1e-12)


def test_deterministic_heat_flow_matches_heat_kernel():
    errors = []
    for dx in (1 / 8, 1 / 16):
        g = GridSpec(8, dx, 0.5, time_quantum=0.5)
        samples = heat_kernel(1.0, g.x)
        samples[[0, -1]] = 0.0
        u0 = make_profile("custom", g, samples=samples)
        r = simulate_pair(g, u0, None, ZERO, None, seed=0, path_index=0, save_stride=g.n_steps)
        errors.append(np.max(np.abs(r.final_u - heat_kernel(1.5, g.x))))
        assert errors[-1] <= 0.1 * dx ** 2
    assert math.log2(errors[0] / errors[1]) == pytest.approx(2, abs=0.2)


def test_zero_data_stays_zero():
    g = small_grid()
    zero = make_profile("constant", g, value=0.0)
    r = simulate_pair(g, zero, zero, LINEAR, LINEAR, seed=1, path_index=0, save_stride=1)
    assert np.all(r.mass_u == 0) and np.all(r.final_u == 0)
    assert np.all(r.cov_rhs_increments == 0)


def test_same_path_is_bit_identical_and_noise_is_shared():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    a = simulate_pair(g, u0, u0, LINEAR, LINEAR, seed=3, path_index=2, save_stride=1)
    b = simulate_pair(g, u0, u0, LINEAR, LINEAR, seed=3, path_index=2, save_stride=1)
    assert np.array_equal(a.mass_u, b.mass_u) and np.array_equal(a.final_u, b.final_u)
    assert np.array_equal(a.final_u, a.final_v)
    assert np.array_equal(a.mass_u, a.mass_v)
    single = simulate_pair(g, u0, None, LINEAR, None, seed=3, path_index=2, save_stride=1)
    assert np.array_equal(single.mass_u, a.mass_u)
    assert len(a.times) == len(a.mass_u) == g.n_steps + 1


def test_save_stride_must_divide_steps():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    with pytest.raises(ConfigError):
        simulate_pair(g, u0, None, LINEAR, None, 0, 0, save_stride=g.n_steps + 1)


def test_profiles_must_sit_on_the_simulation_grid():
    g = small_grid()
    other = make_profile("indicator", small_grid(dx=1 / 8), a=-1, b=1)
    with pytest.raises(DomainError):
        simulate_pair(g, other, None, LINEAR, None, 0, 0)
    full = make_profile("constant", g, value=1.0)
    with pytest.raises(DomainError):
        simulate_pair(g, full, None, LINEAR, None, 0, 0)


def test_blowup_names_the_step():
    g = small_grid(t_end=0.25)
    u0 = make_profile("indicator", g, a=-1, b=1, value=1e300)
    with pytest.raises(NumericalBlowup) as info:
        simulate_pair(g, u0, None, NonlinearitySpec.linear(1e12), None, 0, 0)
    assert info.value.step > 0 and info.value.path_index == 0
    assert "step" in str(info.value)


def test_neumann_conserves_mass_without_noise():
    g = small_grid(boundary="neumann_zero")
    u0 = make_profile("gaussian_bump", g, center=2.5, width=0.15, mass=1.0)
    r = simulate_pair(g, u0, None, ZERO, None, 0, 0, save_stride=1)
    assert np.allclose(r.mass_u, r.mass_u[0], rtol=0, atol=1e-12)


def test_ensemble_without_noise_is_exactly_degenerate():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    st = run_ensemble(g, u0, u0, ZERO, ZERO, seed=0, n_paths=8, save_stride=26)
    assert np.all(st.cov_uv == 0) and np.all(st.cov_rhs == 0) and np.all(st.se_cov == 0)


def test_forced_equal_paths_give_zero_covariance():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    st = run_ensemble(g, u0, u0, LINEAR, LINEAR, seed=0, n_paths=2, save_stride=26,
                      path_indices=[5, 5])
    assert np.all(st.cov_uv == 0)


def test_ensemble_needs_two_paths():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    with pytest.raises(DomainError):
        run_ensemble(g, u0, None, LINEAR, None, 0, n_paths=1)


def test_ensemble_independent_of_blocks_and_threads():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    v0 = make_profile("indicator", g, a=-0.5, b=1.5)
    args = (g, u0, v0, LINEAR, LINEAR, 21, 50)
    a = run_ensemble(*args, save_stride=26, workers=1, block_size=64)
    b = run_ensemble(*args, save_stride=26, workers=3, block_size=7)
    for name in ("mass_u", "mass_v", "cov_rhs_paths", "cov_uv", "se_cov", "frac_negative"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_ensemble_paths_equal_single_paths():
    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    st = run_ensemble(g, u0, u0, LINEAR, LINEAR, seed=4, n_paths=3, save_stride=26)
    one = simulate_pair(g, u0, u0, LINEAR, LINEAR, seed=4, path_index=2, save_stride=26)
    assert np.array_equal(st.mass_u[2], one.mass_u)
    assert np.array_equal(st.cov_rhs_paths[2], np.cumsum(one.cov_rhs_increments))


def test_stats_csv_columns():
    import io

    g = small_grid()
    u0 = make_profile("indicator", g, a=-1, b=1)
    st = run_ensemble(g, u0, None, LINEAR, None, seed=0, n_paths=4, save_stride=26)
    buf = io.StringIO()
    write_stats_csv(st, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(STATS_COLUMNS)
    assert len(lines) == 1 + st.times.size
    assert st.index_of(0.1) == 2
    with pytest.raises(ConfigError):
        st.index_of(0.07)


@pytest.mark.slow
def test_martingale_mean_at_desk_scale():
    g = GridSpec(6, 1 / 32, 0.25, time_quantum=0.05)
    u0 = make_profile("indicator", g, a=-1, b=1)
    st = run_ensemble(g, u0, None, LINEAR, None, seed=2, n_paths=1024, save_stride=103)
    assert np.all(np.abs(st.mean_mass_u - 2) <= 4 * st.se_mass_u + 0.04)


@pytest.mark.slow
def test_mesh_refinement_changes_mean_mass_within_noise():
    means = []
    for dx in (1 / 16, 1 / 32):
        g = GridSpec(4, dx, 0.25, time_quantum=0.25)
        u0 = make_profile("indicator", g, a=-1, b=1)
        st = run_ensemble(g, u0, None, LINEAR, None, seed=8, n_paths=4096,
                          save_stride=g.n_steps)
        means.append((st.mean_mass_u[-1], st.se_mass_u[-1]))
    (m1, s1), (m2, s2) = means
    assert abs(m1 - m2) < 4 * math.hypot(s1, s2)
