"""DQN agent assembly: network variant, replay, exploration, target policy.

The four variants share one code path. ``variant`` picks the architecture
(plain net vs dueling head) and the bootstrap rule (max vs decoupled
argmax/eval); ``target_update`` picks hard copies on an interval or a soft
blend every learner step.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, InputError
from .net import AdamState, LayerSpec, adam_step, init_network, make_dueling_head
from .rl import (
    ReplayBuffer,
    Transition,
    hard_update,
    q_loss_and_grad,
    select_action,
    soft_update,
    td_target_double,
    td_target_vanilla,
)

VARIANTS = ("vanilla", "double", "duel", "double_duel")
TARGET_UPDATES = ("hard", "soft")


@dataclass(frozen=True)
class AgentConfig:
    variant: str = "double"
    target_update: str = "soft"
    tau: float = 0.001
    hard_interval: int = 1000
    gamma: float = 0.99
    batch_size: int = 64
    learn_start: int = 1000
    replay_capacity: int = 50000
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    hidden: tuple = (64, 64)
    duel_hidden: int = 32
    grad_clip: float = 10.0
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_frac: float = 0.3
    bootstrap_time_limit: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.target_update not in TARGET_UPDATES:
            raise ConfigError(f"unknown target_update {self.target_update!r}")
        if not (0.0 < self.tau <= 1.0):
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau}")
        if self.hard_interval < 1:
            raise ConfigError("hard_interval must be >= 1")
        if not (0.0 <= self.gamma <= 1.0):
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.batch_size < 1 or self.replay_capacity < self.batch_size:
            raise ConfigError("need replay_capacity >= batch_size >= 1")
        if self.learn_start < self.batch_size:
            raise ConfigError("learn_start must be >= batch_size")
        if not self.hidden:
            raise ConfigError("hidden must name at least one layer")
        if not (0.0 < self.eps_decay_frac <= 1.0):
            raise ConfigError("eps_decay_frac must lie in (0, 1]")

    @property
    def uses_double_targets(self):
        return self.variant in ("double", "double_duel")

    @property
    def uses_dueling_head(self):
        return self.variant in ("duel", "double_duel")

    def to_dict(self):
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["hidden"] = tuple(d["hidden"])
        return cls(**d)


def build_model(obs_dim, n_actions, cfg, seed):
    """Online network for the configured variant."""
    if obs_dim < 1 or n_actions < 2:
        raise InputError("need obs_dim >= 1 and n_actions >= 2")
    if cfg.uses_dueling_head:
        return make_dueling_head(obs_dim, n_actions, cfg.hidden, cfg.duel_hidden, seed)
    layers = []
    prev = obs_dim
    for h in cfg.hidden:
        layers.append(LayerSpec(prev, h, "relu"))
        prev = h
    layers.append(LayerSpec(prev, n_actions, "identity"))
    return init_network(layers, seed)


class DQNAgent:
    """Online/target model pair with replay and one-step Adam learning."""

    def __init__(self, obs_dim, n_actions, cfg, seed):
        self.obs_dim = int(obs_dim)
        self.n_actions = int(n_actions)
        self.cfg = cfg
        self.seed = int(seed)
        ss = np.random.SeedSequence(seed).spawn(3)
        net_seed = int(ss[0].generate_state(1)[0])
        self.online = build_model(obs_dim, n_actions, cfg, net_seed)
        self.target = self.online.copy()
        self.adam = AdamState.fresh(self.online.n_params, lr=cfg.lr, beta1=cfg.beta1,
                                    beta2=cfg.beta2, eps=cfg.adam_eps)
        self.buffer = ReplayBuffer(cfg.replay_capacity)
        self.rng_action = np.random.default_rng(ss[1])
        self.rng_buffer = np.random.default_rng(ss[2])
        self.decision_steps = 0
        self.learner_steps = 0
        self.episodes_seen = 0

    # ── acting ────────────────────────────────────────────────────────

    def q_values(self, obs):
        return self.online.forward(obs)

    def act(self, obs, eps):
        return select_action(self.q_values(obs), eps, self.rng_action)

    def greedy_action(self, obs):
        # pure argmax, no rng consumed; ties go to the lowest index
        return int(np.argmax(self.q_values(obs)))

    # ── experience ────────────────────────────────────────────────────

    def observe(self, s, a, r, s_next, env_done):
        """Store one environment step. Episode-end here is a time limit, so
        by default the transition still bootstraps through s_next."""
        if env_done and self.cfg.bootstrap_time_limit:
            t = Transition(s=s, a=a, r=r, gamma_next=self.cfg.gamma,
                           s_next=s_next, done=False)
        elif env_done:
            t = Transition(s=s, a=a, r=r, gamma_next=0.0, s_next=s_next, done=True)
        else:
            t = Transition(s=s, a=a, r=r, gamma_next=self.cfg.gamma,
                           s_next=s_next, done=False)
        self.buffer.push(t)
        self.decision_steps += 1

    def ready(self):
        return len(self.buffer) >= max(self.cfg.learn_start, self.cfg.batch_size)

    # ── learning ──────────────────────────────────────────────────────

    def learn_step(self):
        """One minibatch gradient step plus the configured target update.

        Returns the TD loss, or None when the buffer is still warming up.
        Numeric failures propagate as NumericError for the caller to count.
        """
        if not self.ready():
            return None
        batch = self.buffer.sample_minibatch(self.cfg.batch_size, self.rng_buffer)
        if self.cfg.uses_double_targets:
            y = td_target_double(batch, self.online, self.target)
        else:
            y = td_target_vanilla(batch, self.target)
        loss, grads = q_loss_and_grad(batch, y, self.online, clip_norm=self.cfg.grad_clip)
        new_params, self.adam = adam_step(self.online.get_params(), grads, self.adam)
        self.online.set_params(new_params)
        self.learner_steps += 1
        if self.cfg.target_update == "soft":
            soft_update(self.target, self.online, self.cfg.tau)
        elif self.learner_steps % self.cfg.hard_interval == 0:
            hard_update(self.target, self.online)
        return loss

    # ── checkpoint state ──────────────────────────────────────────────

    def to_state(self):
        return {
            "obs_dim": self.obs_dim,
            "n_actions": self.n_actions,
            "seed": self.seed,
            "agent_config": self.cfg.to_dict(),
            "online_params": self.online.get_params().tolist(),
            "target_params": self.target.get_params().tolist(),
            "adam": {
                "m": self.adam.m.tolist(),
                "v": self.adam.v.tolist(),
                "t": self.adam.t,
                "lr": self.adam.lr,
                "beta1": self.adam.beta1,
                "beta2": self.adam.beta2,
                "eps": self.adam.eps,
            },
            "counters": {
                "decision_steps": self.decision_steps,
                "learner_steps": self.learner_steps,
                "episodes_seen": self.episodes_seen,
            },
            "rng": {
                "action": self.rng_action.bit_generator.state,
                "buffer": self.rng_buffer.bit_generator.state,
            },
        }

    @classmethod
    def from_state(cls, state):
        cfg = AgentConfig.from_dict(state["agent_config"])
        agent = cls(state["obs_dim"], state["n_actions"], cfg, state["seed"])
        agent.online.set_params(np.array(state["online_params"]))
        agent.target.set_params(np.array(state["target_params"]))
        a = state["adam"]
        agent.adam = AdamState(m=np.array(a["m"]), v=np.array(a["v"]), t=int(a["t"]),
                               lr=a["lr"], beta1=a["beta1"], beta2=a["beta2"], eps=a["eps"])
        c = state["counters"]
        agent.decision_steps = int(c["decision_steps"])
        agent.learner_steps = int(c["learner_steps"])
        agent.episodes_seen = int(c["episodes_seen"])
        agent.rng_action.bit_generator.state = state["rng"]["action"]
        agent.rng_buffer.bit_generator.state = state["rng"]["buffer"]
        return agent
