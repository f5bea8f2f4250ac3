"""Per-episode training metrics and the CSV schemas the harness emits.

metrics.csv is fully deterministic for a (config, seed) pair; wall-clock
durations go to a separate timings.csv so determinism checks can compare
metrics byte for byte.
"""

import csv
import math
from dataclasses import dataclass, fields

from .errors import FormatError, InputError


@dataclass(frozen=True)
class MetricsRow:
    episode: int
    total_reward: float          # raw per-decision sum
    normalized_reward: float     # 100 * total / decisions per episode
    mean_t_surf: float
    min_t_surf: float
    max_t_surf: float
    mean_abs_dv: float           # mean |velocity change| per decision, m/s
    in_band_fraction: float
    epsilon_end: float           # exploration rate after the episode

    def __post_init__(self):
        if not 0.0 <= self.in_band_fraction <= 1.0:
            raise InputError("in_band_fraction must lie in [0, 1]")
        if self.normalized_reward > 100.0 + 1e-9:
            raise InputError("normalized reward cannot exceed 100")


METRICS_HEADER = [f.name for f in fields(MetricsRow)]
HISTORY_HEADER = ["time_s", "action_velocity", "t_surf", "t_star", "reward"]


def _cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise FormatError(f"non-finite value {v!r} in CSV")
        return format(v, ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            if len(row) != len(header):
                raise FormatError(f"row width {len(row)} != header {len(header)}")
            f.write(",".join(_cell(v) for v in row) + "\n")
    return path


def write_metrics_csv(path, rows):
    return write_csv(path, METRICS_HEADER,
                     [[getattr(r, name) for name in METRICS_HEADER]
                      for r in rows])


def read_metrics_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != METRICS_HEADER:
            raise FormatError(f"unexpected metrics header {header}")
        for rec in reader:
            vals = dict(zip(METRICS_HEADER, rec))
            rows.append(MetricsRow(episode=int(vals["episode"]),
                                   **{k: float(vals[k]) for k in METRICS_HEADER
                                      if k != "episode"}))
    return rows


def write_timings_csv(path, wall_clocks):
    return write_csv(path, ["episode", "wall_clock_s"],
                     [[i, w] for i, w in enumerate(wall_clocks)])
