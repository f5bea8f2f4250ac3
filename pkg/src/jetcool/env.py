"""Episodic control environment around the thermal surrogate.

An episode is a fixed span of simulated time. Each agent decision picks a
jet velocity level, the solver advances a fixed number of steps (with
internal sub-stepping to stay inside the stability bound), and the agent
observes probe readings plus its previous action. The environment itself
is deterministic: identical action sequences give bit-identical
trajectories.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError, StateError
from .thermal import (FluidPlateProps, JetFlowModel, ThermalGrid,
                      advect_diffuse_step, compute_face_velocities,
                      reward_fn, stability_limit, surface_avg_temperature)


@dataclass(frozen=True)
class ProbeLayout:
    """Measurement points (x, y) in meters, all at one wall offset."""

    points: tuple

    @classmethod
    def evenly_spaced(cls, props, n_probes=5, offset=0.001):
        if n_probes < 1:
            raise ConfigError("need at least one probe")
        if not 0.0 < offset < props.H:
            raise ConfigError(f"probe offset {offset} outside (0, {props.H})")
        xs = (np.arange(n_probes) + 0.5) * props.x_max / n_probes
        return cls(points=tuple((float(x), float(offset)) for x in xs))

    def validate_inside(self, props):
        for (x, y) in self.points:
            if not (0.0 <= x <= props.x_max and 0.0 < y < props.H):
                raise ConfigError(f"probe ({x}, {y}) outside the domain")

    @property
    def n_probes(self):
        return len(self.points)


@dataclass(frozen=True)
class EnvConfig:
    episode_duration: float = 100.0   # s
    dt: float = 0.01                  # solver step, s
    decision_interval: int = 10       # solver steps per agent decision
    n_actions: int = 10
    nx: int = 96
    ny: int = 48
    n_probes: int = 5
    probe_offset: float = 0.001       # m, wall-normal probe distance
    cfl_safety: float = 0.9
    band: float = 2.0                 # K, reward band half-width
    props: FluidPlateProps = field(default_factory=FluidPlateProps)

    def __post_init__(self):
        if self.dt <= 0.0 or self.episode_duration <= 0.0:
            raise ConfigError("dt and episode_duration must be positive")
        n_steps = self.episode_duration / self.dt
        if abs(n_steps - round(n_steps)) > 1e-9 * max(1.0, n_steps):
            raise ConfigError("episode_duration must be a whole number of dt steps")
        if self.decision_interval < 1:
            raise ConfigError("decision_interval must be >= 1")
        if round(n_steps) % self.decision_interval != 0:
            raise ConfigError("episode must be a whole number of decisions")
        if self.n_actions < 2:
            raise ConfigError("need at least 2 velocity levels")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ConfigError("cfl_safety must be in (0, 1]")
        if self.band <= 0.0:
            raise ConfigError("band must be positive")

    @property
    def decisions_per_episode(self):
        return round(self.episode_duration / self.dt) // self.decision_interval

    @property
    def obs_dim(self):
        return 2 * self.n_probes + 1

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "episode_duration", "dt", "decision_interval", "n_actions",
            "nx", "ny", "n_probes", "probe_offset", "cfl_safety", "band")}
        d["props"] = {k: getattr(self.props, k) for k in (
            "d", "V_inf", "T_inf", "T_d", "rho", "mu", "k", "cp",
            "H_over_d", "plate_len_over_d", "q_flux")}
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        props = FluidPlateProps(**d.pop("props", {}))
        return cls(props=props, **d)


# ── probe sampling ────────────────────────────────────────────────────


def _bilinear_coords(nx, ny, dx, dy, x, y):
    """Cell-center bilinear stencil for a point, clamped at the borders."""
    gx = x / dx - 0.5
    gy = y / dy - 0.5
    i0 = min(max(int(math.floor(gx)), 0), nx - 2)
    j0 = min(max(int(math.floor(gy)), 0), ny - 2)
    fx = min(max(gx - i0, 0.0), 1.0)
    fy = min(max(gy - j0, 0.0), 1.0)
    return i0, j0, fx, fy


def bilinear_sample(values, dx, dy, x, y):
    nx, ny = values.shape
    i0, j0, fx, fy = _bilinear_coords(nx, ny, dx, dy, x, y)
    return ((1.0 - fx) * (1.0 - fy) * values[i0, j0]
            + fx * (1.0 - fy) * values[i0 + 1, j0]
            + (1.0 - fx) * fy * values[i0, j0 + 1]
            + fx * fy * values[i0 + 1, j0 + 1])


def probe_read(grid, jet, layout, props, prev_action_frac=0.0):
    """Observation vector: probe temperatures over T_d, probe speeds over
    V_inf, then the previous action as a fraction of the level range.

    Both fields are sampled by bilinear interpolation between cell
    centers; the speed field is evaluated at the stencil's cell centers
    from the analytic flow.
    """
    layout.validate_inside(props)
    n = layout.n_probes
    obs = np.empty(2 * n + 1)
    for p, (x, y) in enumerate(layout.points):
        obs[p] = bilinear_sample(grid.T, grid.dx, grid.dy, x, y) / props.T_d
        i0, j0, fx, fy = _bilinear_coords(grid.nx, grid.ny, grid.dx, grid.dy, x, y)
        xc = (np.array([i0, i0 + 1], dtype=np.float64) + 0.5) * grid.dx
        yc = (np.array([j0, j0 + 1], dtype=np.float64) + 0.5) * grid.dy
        u, v = jet.velocity(xc[:, None], yc[None, :])
        speed = np.hypot(u, v)
        obs[n + p] = ((1.0 - fx) * (1.0 - fy) * speed[0, 0]
                      + fx * (1.0 - fy) * speed[1, 0]
                      + (1.0 - fx) * fy * speed[0, 1]
                      + fx * fy * speed[1, 1]) / props.V_inf
    obs[2 * n] = prev_action_frac
    if not np.all(np.isfinite(obs)):
        raise StateError("non-finite observation")
    return obs


# ── the environment ───────────────────────────────────────────────────


class ThermalEnv:
    """reset/step interface over the plate-cooling surrogate."""

    def __init__(self, cfg=None):
        self.cfg = cfg = cfg if cfg is not None else EnvConfig()
        props = cfg.props
        self.props = props
        self.layout = ProbeLayout.evenly_spaced(props, cfg.n_probes,
                                                cfg.probe_offset)
        self.layout.validate_inside(props)
        self.grid = ThermalGrid.make(props, cfg.nx, cfg.ny)
        self.levels = np.linspace(0.1, 1.0, cfg.n_actions) * props.V_inf
        # per-level solver plan: faces and substep count are fixed by the
        # level, so compute them once
        self._jets = []
        self._faces = []
        self._n_sub = []
        self._dt_sub = []
        for v in self.levels:
            jet = JetFlowModel.for_props(props, float(v))
            faces = compute_face_velocities(jet, self.grid)
            limit = stability_limit(self.grid, props, *faces)
            n_sub = max(1, math.ceil(cfg.dt / (cfg.cfl_safety * limit)))
            self._jets.append(jet)
            self._faces.append(faces)
            self._n_sub.append(n_sub)
            self._dt_sub.append(cfg.dt / n_sub)
        self._action = 0
        self._decisions = 0
        self._started = False

    @property
    def n_actions(self):
        return self.cfg.n_actions

    @property
    def obs_dim(self):
        return self.cfg.obs_dim

    @property
    def decisions_per_episode(self):
        return self.cfg.decisions_per_episode

    @property
    def time_s(self):
        return self._decisions * self.cfg.decision_interval * self.cfg.dt

    @property
    def done(self):
        return self._started and self._decisions >= self.decisions_per_episode

    def action_velocity(self, action):
        return float(self.levels[action])

    def surface_temperature(self):
        return surface_avg_temperature(self.grid)

    def _observe(self):
        frac = self._action / (self.cfg.n_actions - 1)
        return probe_read(self.grid, self._jets[self._action], self.layout,
                          self.props, frac)

    def reset(self):
        self.grid.T[:, :] = self.props.T_inf
        self._action = 0
        self._decisions = 0
        self._started = True
        return self._observe()

    def step(self, action):
        if not self._started:
            raise StateError("step before reset")
        if self.done:
            raise StateError("episode is over; reset first")
        a = int(action)
        if a != action or not 0 <= a < self.cfg.n_actions:
            raise InputError(f"action must be an integer in [0, {self.cfg.n_actions})")
        self._action = a
        for _ in range(self.cfg.decision_interval):
            advect_diffuse_step(self.grid, self._jets[a], self.props,
                                self._dt_sub[a], faces=self._faces[a],
                                n_steps=self._n_sub[a])
        self._decisions += 1
        reward = reward_fn(self.surface_temperature(), self.props.T_d,
                           self.cfg.band)
        return self._observe(), reward, self.done


# ── field snapshots ───────────────────────────────────────────────────


def write_field_csv(grid, path, values=None):
    """Temperature snapshot: one header row nx,ny,dx,dy then the field
    values row-major (x varies slowest), one row per x index."""
    vals = grid.T if values is None else values
    if vals.shape != (grid.nx, grid.ny):
        raise InputError("field shape does not match the grid")
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{grid.nx},{grid.ny},{grid.dx!r},{grid.dy!r}\n")
        for i in range(grid.nx):
            f.write(",".join(repr(float(t)) for t in vals[i]) + "\n")


def read_field_csv(path):
    """Inverse of write_field_csv: returns (nx, ny, dx, dy, values)."""
    with open(path, "r", encoding="utf-8") as f:
        head = f.readline().strip().split(",")
        if len(head) != 4:
            raise InputError("bad field header")
        nx, ny = int(head[0]), int(head[1])
        dx, dy = float(head[2]), float(head[3])
        vals = np.empty((nx, ny))
        for i in range(nx):
            row = f.readline().strip().split(",")
            if len(row) != ny:
                raise InputError(f"bad field row {i}")
            vals[i] = [float(t) for t in row]
    return nx, ny, dx, dy, vals
