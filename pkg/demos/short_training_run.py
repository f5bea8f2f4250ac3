# A complete but scaled-down training run: coarse grid, short episodes,
# a dozen episodes. Takes well under a minute and shows the whole
# pipeline (train, checkpoint, reload, greedy evaluation) end to end.

import os
import tempfile
from dataclasses import replace

from jetcool.config import RunConfig
from jetcool.env import EnvConfig
from jetcool.train import evaluate, train

out = tempfile.mkdtemp(prefix="jetcool_demo_")

cfg = RunConfig(
    experiment="demo",
    seed=0,
    n_episodes=12,
    eval_duration=10.0,
    output_dir=out,
    env=EnvConfig(episode_duration=10.0, nx=48, ny=24),
)
cfg = replace(cfg, agent=replace(cfg.agent, learn_start=100, batch_size=32,
                                 hidden=(32, 32)))

print(f"training 12 short episodes into {out}")
result = train(cfg, verbose=True)

print("\nper-episode normalized reward:")
print("  " + " ".join(f"{r.normalized_reward:5.1f}" for r in result.rows))

history, summary = evaluate(result.checkpoint_path, cfg)
print(f"\ngreedy evaluation: in-band fraction "
      f"{summary['in_band_fraction']:.3f}, final T* "
      f"{summary['final_t_star']:.4f}")
print(f"outputs: {sorted(os.listdir(out))}")
