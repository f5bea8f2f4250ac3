"""Agent checkpoints: canonical JSON, byte-stable across save/load/save.

The file holds the agent's full learning state (parameters, optimizer
moments, counters, rng streams) plus the environment signature it was
trained against. Replay contents are deliberately not persisted.
"""

import json

from .agent import DQNAgent
from .errors import ConfigError, FormatError

CHECKPOINT_VERSION = 1


def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def checkpoint_dict(agent):
    return {"format_version": CHECKPOINT_VERSION, "state": agent.to_state()}


def save_checkpoint(agent_or_dict, path):
    ck = (agent_or_dict if isinstance(agent_or_dict, dict)
          else checkpoint_dict(agent_or_dict))
    try:
        text = _canonical(ck)
    except (TypeError, ValueError) as e:
        raise FormatError(f"checkpoint not serializable: {e}") from e
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def load_checkpoint(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            ck = json.load(f)
    except OSError as e:
        raise FormatError(f"cannot read checkpoint {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"corrupt checkpoint {path!r}: {e.msg} "
                          f"at offset {e.pos}") from e
    if not isinstance(ck, dict) or "format_version" not in ck:
        raise FormatError("checkpoint lacks a format_version")
    if ck["format_version"] != CHECKPOINT_VERSION:
        raise FormatError(f"checkpoint format_version {ck['format_version']} "
                          f"unsupported (this build reads {CHECKPOINT_VERSION})")
    if "state" not in ck:
        raise FormatError("checkpoint lacks agent state")
    return ck


def agent_from_checkpoint(ck, expect_obs_dim=None, expect_n_actions=None):
    state = ck["state"]
    if expect_obs_dim is not None and state["obs_dim"] != expect_obs_dim:
        raise ConfigError(f"checkpoint expects obs_dim {state['obs_dim']}, "
                          f"environment provides {expect_obs_dim}")
    if expect_n_actions is not None and state["n_actions"] != expect_n_actions:
        raise ConfigError(f"checkpoint expects n_actions {state['n_actions']}, "
                          f"environment provides {expect_n_actions}")
    return DQNAgent.from_state(state)
