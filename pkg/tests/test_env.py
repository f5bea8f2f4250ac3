"""Environment contract: observations, episode bookkeeping, probe
interpolation, determinism, field snapshots."""

import numpy as np
import pytest

from jetcool.env import (EnvConfig, ProbeLayout, ThermalEnv, bilinear_sample,
                         probe_read, read_field_csv, write_field_csv)
from jetcool.errors import ConfigError, InputError, StateError
from jetcool.thermal import (FluidPlateProps, JetFlowModel, ThermalGrid,
                             reward_fn, surface_avg_temperature)

PROPS = FluidPlateProps()


def small_cfg(**kw):
    base = dict(episode_duration=1.0, dt=0.01, decision_interval=10,
                nx=24, ny=12)
    base.update(kw)
    return EnvConfig(**base)


# ── config validation ─────────────────────────────────────────────────


def test_default_config_shape():
    cfg = EnvConfig()
    assert cfg.decisions_per_episode == 1000
    assert cfg.obs_dim == 11


def test_config_rejects_fractional_step_counts():
    with pytest.raises(ConfigError):
        EnvConfig(episode_duration=1.005, dt=0.01)
    with pytest.raises(ConfigError):
        EnvConfig(episode_duration=1.1, dt=0.01, decision_interval=7)
    with pytest.raises(ConfigError):
        EnvConfig(decision_interval=0)
    with pytest.raises(ConfigError):
        EnvConfig(n_actions=1)
    with pytest.raises(ConfigError):
        EnvConfig(band=-1.0)


def test_config_dict_roundtrip():
    cfg = small_cfg(n_actions=6, probe_offset=0.005)
    again = EnvConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_probe_layout_bounds():
    with pytest.raises(ConfigError):
        ProbeLayout.evenly_spaced(PROPS, 5, offset=0.5)
    with pytest.raises(ConfigError):
        ProbeLayout.evenly_spaced(PROPS, 0, offset=0.001)
    lay = ProbeLayout.evenly_spaced(PROPS, 5, offset=0.001)
    assert lay.n_probes == 5
    xs = [p[0] for p in lay.points]
    assert xs == sorted(xs)
    assert all(0.0 < x < PROPS.x_max for x in xs)


# ── interpolation ─────────────────────────────────────────────────────


def test_bilinear_cell_center_is_exact():
    rng = np.random.default_rng(1)
    vals = rng.uniform(280.0, 320.0, (8, 6))
    dx, dy = 0.0125, 0.0125
    x = (3 + 0.5) * dx
    y = (2 + 0.5) * dy
    assert bilinear_sample(vals, dx, dy, x, y) == vals[3, 2]


def test_bilinear_midpoint_averages():
    vals = np.zeros((8, 6))
    vals[3, 2], vals[4, 2] = 10.0, 20.0
    dx, dy = 0.0125, 0.0125
    x = (4.0) * dx       # midway between centers of cells 3 and 4
    y = (2 + 0.5) * dy
    assert bilinear_sample(vals, dx, dy, x, y) == pytest.approx(15.0, abs=1e-12)


def test_bilinear_clamps_at_borders():
    vals = np.arange(12.0).reshape(4, 3)
    # below the first cell center row: clamped, no extrapolation
    v = bilinear_sample(vals, 0.01, 0.01, 0.0, 0.0)
    assert v == vals[0, 0]


def test_probe_read_uniform_field():
    cfg = small_cfg()
    grid = ThermalGrid.make(PROPS, cfg.nx, cfg.ny, T0=297.0)
    jet = JetFlowModel.for_props(PROPS, 0.3)
    lay = ProbeLayout.evenly_spaced(PROPS, 5, 0.001)
    obs = probe_read(grid, jet, lay, PROPS, prev_action_frac=0.25)
    assert obs.shape == (11,)
    assert np.allclose(obs[:5], 297.0 / PROPS.T_d, rtol=0, atol=1e-14)
    assert np.all(obs[5:10] >= 0.0)
    assert np.all(obs[5:10] <= 1.0)
    assert obs[10] == 0.25


def test_probe_speed_scales_with_level():
    grid = ThermalGrid.make(PROPS, 48, 24)
    lay = ProbeLayout.evenly_spaced(PROPS, 5, 0.001)
    lo = probe_read(grid, JetFlowModel.for_props(PROPS, 0.2), lay, PROPS)
    hi = probe_read(grid, JetFlowModel.for_props(PROPS, 0.8), lay, PROPS)
    assert np.allclose(hi[5:10], 4.0 * lo[5:10], rtol=1e-12)


# ── episode mechanics ─────────────────────────────────────────────────


def test_reset_observation():
    env = ThermalEnv(small_cfg())
    obs = env.reset()
    assert obs.shape == (env.obs_dim,)
    # probe temperatures read the ambient start: 288/303
    assert np.allclose(obs[:5], PROPS.T_inf / PROPS.T_d, rtol=0, atol=1e-14)
    assert obs[-1] == 0.0
    assert env.surface_temperature() == pytest.approx(PROPS.T_inf, abs=1e-12)
    # velocities correspond to the lowest level
    env2 = ThermalEnv(small_cfg())
    assert np.array_equal(env2.reset(), obs)


def test_step_contract():
    env = ThermalEnv(small_cfg())
    with pytest.raises(StateError):
        env.step(0)
    env.reset()
    obs, r, done = env.step(3)
    assert obs.shape == (11,)
    assert obs[-1] == pytest.approx(3 / 9)
    assert not done
    assert r == reward_fn(surface_avg_temperature(env.grid), PROPS.T_d)
    with pytest.raises(InputError):
        env.step(10)
    with pytest.raises(InputError):
        env.step(-1)


def test_episode_ends_after_exact_decision_count():
    env = ThermalEnv(small_cfg())
    env.reset()
    flags = [env.step(1)[2] for _ in range(env.decisions_per_episode)]
    assert flags == [False] * 9 + [True]
    assert env.time_s == pytest.approx(1.0)
    with pytest.raises(StateError):
        env.step(0)
    # reset rewinds everything
    obs = env.reset()
    assert np.allclose(obs[:5], PROPS.T_inf / PROPS.T_d, atol=1e-14)
    assert not env.done


def test_trajectory_determinism():
    actions = np.random.default_rng(9).integers(0, 10, 30)
    outs = []
    for _ in range(2):
        env = ThermalEnv(small_cfg(episode_duration=3.0))
        obs = [env.reset()]
        rewards = []
        for a in actions:
            o, r, _ = env.step(int(a))
            obs.append(o)
            rewards.append(r)
        outs.append((np.array(obs), np.array(rewards)))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])


def test_monotone_approach_to_steady_at_max_action():
    cfg = EnvConfig(episode_duration=30.0)
    env = ThermalEnv(cfg)
    env.reset()
    traj = []
    for _ in range(env.decisions_per_episode):
        env.step(cfg.n_actions - 1)
        traj.append(env.surface_temperature())
    traj = np.array(traj)
    sign = np.sign(traj[-1] - traj[0])
    assert np.all(sign * np.diff(traj) >= -1e-8)


def test_rewards_track_band_membership():
    env = ThermalEnv(EnvConfig(episode_duration=20.0))
    env.reset()
    rewards = [env.step(4)[1] for _ in range(env.decisions_per_episode)]
    # mid level holds the plate in the band almost immediately
    assert np.mean(np.array(rewards) == 1.0) > 0.95


# ── field snapshots ───────────────────────────────────────────────────


def test_field_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    grid = ThermalGrid.make(PROPS, 12, 8)
    grid.T += rng.uniform(-5.0, 5.0, grid.T.shape)
    path = tmp_path / "field.csv"
    write_field_csv(grid, path)
    nx, ny, dx, dy, vals = read_field_csv(path)
    assert (nx, ny) == (12, 8)
    assert dx == grid.dx and dy == grid.dy
    assert np.array_equal(vals, grid.T)


def test_field_csv_shape_guard(tmp_path):
    grid = ThermalGrid.make(PROPS, 12, 8)
    with pytest.raises(InputError):
        write_field_csv(grid, tmp_path / "x.csv", values=np.zeros((3, 3)))
