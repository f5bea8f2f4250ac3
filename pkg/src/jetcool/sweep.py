"""Comparison sweeps over probe layout, episode budget, or learner
variant, each cell trained and evaluated over a shared seed set."""

import math
import os
from dataclasses import replace

from .config import resolve_output_dir
from .errors import InputError
from .metrics import write_csv
from .train import evaluate, train

SWEEP_AXES = ("layout", "episodes", "variant")

# axis value -> (label, config transform)
LAYOUT_OFFSETS = ((0.001, "L1mm"), (0.005, "L5mm"), (0.010, "L10mm"))
EPISODE_COUNTS = ((50, "ep50"), (100, "ep100"), (150, "ep150"))
VARIANT_CELLS = (("vanilla", "hard", "vanilla"),
                 ("double", "soft", "double-soft"),
                 ("double", "hard", "double-hard"),
                 ("duel", "soft", "duel"))


def sweep_cells(base_cfg, axis):
    """(label, RunConfig) pairs for one sweep axis."""
    if axis == "layout":
        return [(label, replace(base_cfg,
                                env=replace(base_cfg.env, probe_offset=off)))
                for off, label in LAYOUT_OFFSETS]
    if axis == "episodes":
        return [(label, replace(base_cfg, n_episodes=n))
                for n, label in EPISODE_COUNTS]
    if axis == "variant":
        return [(label, replace(base_cfg,
                                agent=replace(base_cfg.agent, variant=var,
                                              target_update=upd)))
                for var, upd, label in VARIANT_CELLS]
    raise InputError(f"unknown sweep axis {axis!r}; pick one of {SWEEP_AXES}")


def _std(xs):
    n = len(xs)
    mean = math.fsum(xs) / n
    return math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / n)


def sweep(base_cfg, axis, seeds=(0, 1, 2), verbose=False):
    """Train and evaluate every (cell, seed); returns nested results and
    writes a long-format CSV plus a per-run summary CSV."""
    if len(seeds) < 3:
        raise InputError("sweeps need at least 3 seeds")
    base_out = resolve_output_dir(base_cfg)
    results = {}
    long_rows = []
    summary_rows = []
    for label, cell_cfg in sweep_cells(base_cfg, axis):
        results[label] = {}
        for seed in seeds:
            run_cfg = replace(
                cell_cfg, seed=int(seed),
                experiment=f"{base_cfg.experiment}-{axis}-{label}-s{seed}",
                output_dir=os.path.join(base_cfg.output_dir, axis, label,
                                        f"seed{seed}"))
            if verbose:
                print(f"sweep cell {axis}/{label} seed {seed}", flush=True)
            tr = train(run_cfg, verbose=verbose)
            _, ev = evaluate(tr.agent, run_cfg, out_dir=run_cfg.output_dir)
            results[label][seed] = {"rows": tr.rows, "eval": ev,
                                    "out_dir": tr.out_dir}
            for row in tr.rows:
                long_rows.append([label, seed, row.episode,
                                  row.normalized_reward, row.total_reward,
                                  row.in_band_fraction, row.epsilon_end])
            norm = [r.normalized_reward for r in tr.rows]
            summary_rows.append([
                label, seed,
                norm[-1] if norm else 0.0,
                math.fsum(norm[-10:]) / len(norm[-10:]) if norm else 0.0,
                _std(norm[-30:]) if norm else 0.0,
                ev["in_band_fraction"],
            ])
    os.makedirs(base_out, exist_ok=True)
    write_csv(os.path.join(base_out, f"sweep_{axis}.csv"),
              [axis, "seed", "episode", "normalized_reward", "total_reward",
               "in_band_fraction", "epsilon_end"], long_rows)
    write_csv(os.path.join(base_out, f"sweep_{axis}_summary.csv"),
              [axis, "seed", "final_normalized_reward",
               "last10_mean_normalized", "last30_std_normalized",
               "eval_in_band_fraction"], summary_rows)
    return results
