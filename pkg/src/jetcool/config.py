"""Run configuration: one INI file fully determines a run.

Sections: [run] for orchestration, [env] for the environment, [agent]
for the learner, and optional [props] for fluid/plate overrides. Every
key must be known; typos fail loudly instead of silently using a
default. config_version pins the file syntax.
"""

import configparser
import os
from dataclasses import dataclass, field, fields, replace

from .agent import AgentConfig
from .env import EnvConfig
from .errors import ConfigError
from .thermal import FluidPlateProps

CONFIG_VERSION = 1

OUTPUT_ROOT_VAR = "JETCOOL_OUTPUT_ROOT"


@dataclass(frozen=True)
class RunConfig:
    experiment: str = "run"
    seed: int = 0
    n_episodes: int = 100
    eval_duration: float = 100.0
    output_dir: str = "runs/run"
    env: EnvConfig = field(default_factory=EnvConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)

    def __post_init__(self):
        if self.n_episodes < 0:
            raise ConfigError("n_episodes must be >= 0")
        if self.eval_duration <= 0.0:
            raise ConfigError("eval_duration must be positive")
        if not self.experiment:
            raise ConfigError("experiment name must be non-empty")


def resolve_output_path(path):
    """A relative output path lands under the output-root env var when
    that is set; absolute paths and unset root pass through."""
    root = os.environ.get(OUTPUT_ROOT_VAR, "")
    if root and not os.path.isabs(path):
        return os.path.join(root, path)
    return path


def resolve_output_dir(cfg):
    return resolve_output_path(cfg.output_dir)


def _parse_bool(s):
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_hidden(s):
    try:
        return tuple(int(p) for p in s.replace(" ", "").split(",") if p)
    except ValueError as e:
        raise ConfigError(f"bad hidden layer list {s!r}") from e


def _coerce(section, key, raw, annotation):
    try:
        if annotation is int:
            return int(raw)
        if annotation is float:
            return float(raw)
        if annotation is bool:
            return _parse_bool(raw)
        if annotation is tuple:
            return _parse_hidden(raw)
        return raw
    except ValueError as e:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {e}") from e


def _section_kwargs(parser, section, dataclass_type, skip=()):
    known = {f.name: f.type for f in fields(dataclass_type)
             if f.name not in skip}
    out = {}
    if not parser.has_section(section):
        return out
    for key, raw in parser.items(section):
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        out[key] = _coerce(section, key, raw, known[key])
    return out


def load_run_config(path, seed=None):
    parser = configparser.ConfigParser(interpolation=None)
    # field names are case-sensitive (V_inf vs v_inf)
    parser.optionxform = str
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section in parser.sections():
        if section not in ("run", "env", "agent", "props"):
            raise ConfigError(f"unknown section [{section}]")

    run_kw = {}
    if parser.has_section("run"):
        known = {"config_version": int, "experiment": str, "seed": int,
                 "n_episodes": int, "eval_duration": float, "output_dir": str}
        for key, raw in parser.items("run"):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in [run]")
            run_kw[key] = _coerce("run", key, raw, known[key])
    version = run_kw.pop("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"config_version {version} unsupported "
                          f"(this build reads version {CONFIG_VERSION})")

    props_kw = _section_kwargs(parser, "props", FluidPlateProps)
    env_kw = _section_kwargs(parser, "env", EnvConfig, skip=("props",))
    agent_kw = _section_kwargs(parser, "agent", AgentConfig)

    props = FluidPlateProps(**props_kw)
    env_cfg = EnvConfig(props=props, **env_kw)
    agent_cfg = AgentConfig(**agent_kw)
    cfg = RunConfig(env=env_cfg, agent=agent_cfg, **run_kw)
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    return cfg


def dump_run_config(cfg):
    """Canonical INI text for a RunConfig; load_run_config inverts it."""
    lines = ["[run]",
             f"config_version = {CONFIG_VERSION}",
             f"experiment = {cfg.experiment}",
             f"seed = {cfg.seed}",
             f"n_episodes = {cfg.n_episodes}",
             f"eval_duration = {cfg.eval_duration!r}",
             f"output_dir = {cfg.output_dir}",
             "", "[env]"]
    for f in fields(EnvConfig):
        if f.name == "props":
            continue
        v = getattr(cfg.env, f.name)
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float)
                     else f"{f.name} = {v}")
    lines += ["", "[props]"]
    for f in fields(FluidPlateProps):
        v = getattr(cfg.env.props, f.name)
        lines.append(f"{f.name} = {v!r}")
    lines += ["", "[agent]"]
    for f in fields(AgentConfig):
        v = getattr(cfg.agent, f.name)
        if f.name == "hidden":
            lines.append(f"hidden = {','.join(str(h) for h in v)}")
        elif isinstance(v, float):
            lines.append(f"{f.name} = {v!r}")
        else:
            lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def write_run_config(cfg, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_run_config(cfg))
