# The built-in variant sweep at toy scale: four agent configurations,
# three seeds each, a couple of short episodes per run. The full-scale
# counterpart (default config, 100 episodes) is what the acceptance
# tests run; this just shows the mechanics and the output layout.
#
# Expect the three non-dueling cells to coincide here: with only ~100
# learner steps the double estimator and the target-update style have
# not had time to steer the policy apart (the dueling head differs from
# step one because its architecture changes the initialization).

import os
import tempfile
from dataclasses import replace

from jetcool.config import RunConfig
from jetcool.env import EnvConfig
from jetcool.sweep import sweep

out = tempfile.mkdtemp(prefix="jetcool_sweep_")
base = RunConfig(
    n_episodes=3,
    eval_duration=5.0,
    output_dir=out,
    env=EnvConfig(episode_duration=5.0, nx=32, ny=16),
)
base = replace(base, agent=replace(base.agent, learn_start=50, batch_size=16,
                                   hidden=(16, 16)))

results = sweep(base, "variant", seeds=(0, 1, 2))

print("\nfinal normalized reward by cell and seed:")
for label, by_seed in results.items():
    finals = [by_seed[s]["rows"][-1].normalized_reward for s in (0, 1, 2)]
    print(f"  {label:12s} " + "  ".join(f"{f:5.1f}" for f in finals))

print(f"\nlong-form and summary CSVs under {out}:")
for name in sorted(os.listdir(out)):
    print(f"  {name}")
