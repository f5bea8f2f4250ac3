"""Training, greedy evaluation, and constant-action baselines.

A run is driven by one RunConfig and a single seed; the loop is strictly
single-threaded, so every output except wall-clock timing is
reproducible byte for byte.
"""

import json
import math
import os
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from .agent import DQNAgent
from .checkpoint import (agent_from_checkpoint, checkpoint_dict,
                         load_checkpoint, save_checkpoint)
from .config import resolve_output_dir, resolve_output_path, write_run_config
from .env import ThermalEnv, write_field_csv
from .errors import InputError, NumericError, StabilityError
from .metrics import (HISTORY_HEADER, MetricsRow, write_csv,
                      write_metrics_csv, write_timings_csv)
from .rl import EpsilonSchedule
from .thermal import ThermalGrid

MAX_NONFINITE_STREAK = 100


@dataclass
class TrainResult:
    agent: DQNAgent
    rows: list
    out_dir: str
    checkpoint_path: str
    aborted_episodes: list


def _summary_json(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(payload, sort_keys=True, allow_nan=False,
                           indent=2) + "\n")


def train(run_cfg, verbose=False):
    """Run the configured number of training episodes and write metrics,
    timings, the resolved config, and the final checkpoint."""
    out_dir = resolve_output_dir(run_cfg)
    os.makedirs(out_dir, exist_ok=True)
    env = ThermalEnv(run_cfg.env)
    agent = DQNAgent(env.obs_dim, env.n_actions, run_cfg.agent,
                     seed=run_cfg.seed)
    per_episode = env.decisions_per_episode
    total_decisions = max(1, run_cfg.n_episodes * per_episode)
    schedule = EpsilonSchedule(
        start=run_cfg.agent.eps_start, end=run_cfg.agent.eps_end,
        decay_steps=max(1, round(run_cfg.agent.eps_decay_frac * total_decisions)))
    t_d, band = env.props.T_d, run_cfg.env.band

    rows, wall_clocks, aborted = [], [], []
    nonfinite_streak = 0
    global_decision = 0
    for ep in range(run_cfg.n_episodes):
        t0 = time.perf_counter()
        obs = env.reset()
        prev_v = env.action_velocity(0)
        rewards, t_surfs, dvs = [], [], []
        ep_aborted = False
        for _ in range(per_episode):
            eps = schedule.value(global_decision)
            action = agent.act(obs, eps)
            try:
                nxt, reward, done = env.step(action)
            except StabilityError as e:
                print(f"episode {ep} aborted by solver: {e}", file=sys.stderr)
                aborted.append(ep)
                ep_aborted = True
                break
            agent.observe(obs, action, reward, nxt, done)
            try:
                agent.learn_step()
                nonfinite_streak = 0
            except NumericError:
                nonfinite_streak += 1
                if nonfinite_streak > MAX_NONFINITE_STREAK:
                    raise NumericError(
                        f"training diverged: {nonfinite_streak} non-finite "
                        f"learning steps in a row") from None
            v = env.action_velocity(action)
            t_surf = env.surface_temperature()
            rewards.append(reward)
            t_surfs.append(t_surf)
            dvs.append(abs(v - prev_v))
            prev_v = v
            obs = nxt
            global_decision += 1
        agent.episodes_seen += 1
        total = math.fsum(rewards)
        n = len(rewards)
        row = MetricsRow(
            episode=ep,
            total_reward=total,
            normalized_reward=100.0 * total / per_episode,
            mean_t_surf=math.fsum(t_surfs) / n if n else float(env.props.T_inf),
            min_t_surf=min(t_surfs) if n else float(env.props.T_inf),
            max_t_surf=max(t_surfs) if n else float(env.props.T_inf),
            mean_abs_dv=math.fsum(dvs) / n if n else 0.0,
            in_band_fraction=(sum(1 for t in t_surfs if abs(t - t_d) < band) / n
                              if n else 0.0),
            epsilon_end=schedule.value(global_decision),
        )
        rows.append(row)
        wall_clocks.append(time.perf_counter() - t0)
        if verbose:
            flag = " [aborted]" if ep_aborted else ""
            print(f"episode {ep:3d}: normalized reward "
                  f"{row.normalized_reward:6.2f}, in-band "
                  f"{row.in_band_fraction:.3f}, eps {row.epsilon_end:.3f}"
                  f"{flag}", file=sys.stderr)

    write_metrics_csv(os.path.join(out_dir, "metrics.csv"), rows)
    write_timings_csv(os.path.join(out_dir, "timings.csv"), wall_clocks)
    write_run_config(run_cfg, os.path.join(out_dir, "config.ini"))
    ckpt_path = os.path.join(out_dir, "checkpoint.json")
    save_checkpoint(agent, ckpt_path)
    return TrainResult(agent=agent, rows=rows, out_dir=out_dir,
                       checkpoint_path=ckpt_path, aborted_episodes=aborted)


def _rollout(env, pick_action, out_dir, prefix):
    """Greedy or constant-action rollout sharing the evaluate schema."""
    decision_dt = env.cfg.dt * env.cfg.decision_interval
    t_d, band = env.props.T_d, env.cfg.band
    obs = env.reset()
    history = []
    field_sum = np.zeros_like(env.grid.T)
    done = False
    k = 0
    while not done:
        action = pick_action(obs)
        obs, reward, done = env.step(action)
        k += 1
        t_surf = env.surface_temperature()
        history.append(((k * decision_dt), env.action_velocity(action),
                        t_surf, t_surf / t_d, reward))
        field_sum += env.grid.T
    n = len(history)
    t_surfs = [h[2] for h in history]
    rewards = [h[4] for h in history]
    tail = t_surfs[-max(1, n // 10):]
    summary = {
        "decisions": n,
        "duration_s": n * decision_dt,
        "total_reward": math.fsum(rewards),
        "mean_reward": math.fsum(rewards) / n,
        "in_band_fraction": sum(1 for t in t_surfs if abs(t - t_d) < band) / n,
        "final_t_surf": t_surfs[-1],
        "final_t_star": t_surfs[-1] / t_d,
        "tail_mean_t_surf": math.fsum(tail) / len(tail),
        "tail_mean_t_star": math.fsum(tail) / len(tail) / t_d,
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, f"{prefix}.csv"), HISTORY_HEADER,
                  history)
        _summary_json(os.path.join(out_dir, f"{prefix}_summary.json"), summary)
        avg = ThermalGrid(nx=env.grid.nx, ny=env.grid.ny, dx=env.grid.dx,
                          dy=env.grid.dy, T=field_sum / n)
        write_field_csv(avg, os.path.join(out_dir, f"{prefix}_tavg_field.csv"))
    return history, summary


def evaluate(ckpt, run_cfg, out_dir=None):
    """Greedy rollout of a checkpointed agent; never touches the replay
    buffer. Returns (per-decision history, summary dict)."""
    if isinstance(ckpt, (str, os.PathLike)):
        ckpt = load_checkpoint(ckpt)
    elif isinstance(ckpt, DQNAgent):
        ckpt = checkpoint_dict(ckpt)
    env_cfg = replace(run_cfg.env, episode_duration=run_cfg.eval_duration)
    env = ThermalEnv(env_cfg)
    agent = agent_from_checkpoint(ckpt, expect_obs_dim=env.obs_dim,
                                  expect_n_actions=env.n_actions)
    return _rollout(env, agent.greedy_action,
                    None if out_dir is None else resolve_output_path(out_dir),
                    "eval")


def run_baseline(level, run_cfg, out_dir=None, duration=None):
    """Constant-action rollout at one velocity level."""
    env_cfg = replace(run_cfg.env,
                      episode_duration=duration or run_cfg.eval_duration)
    env = ThermalEnv(env_cfg)
    k = int(level)
    if not 0 <= k < env.n_actions:
        raise InputError(f"level must lie in [0, {env.n_actions})")
    return _rollout(env, lambda obs: k,
                    None if out_dir is None else resolve_output_path(out_dir),
                    f"baseline_L{k}")
