"""Tests for agent assembly: variants, bootstrap policy, update cadence."""

import numpy as np
import pytest

from jetcool.agent import AgentConfig, DQNAgent, build_model
from jetcool.errors import ConfigError
from jetcool.net import DenseNet, DuelingHead


def small_cfg(**kw):
    base = dict(batch_size=8, learn_start=8, replay_capacity=64,
                hidden=(16, 16), duel_hidden=8)
    base.update(kw)
    return AgentConfig(**base)


def fill_and_learn(agent, steps, rng):
    for i in range(steps):
        s = rng.normal(size=agent.obs_dim)
        s2 = rng.normal(size=agent.obs_dim)
        agent.observe(s, int(rng.integers(agent.n_actions)), float(rng.normal()),
                      s2, env_done=False)
        agent.learn_step()


def test_config_validation():
    with pytest.raises(ConfigError):
        AgentConfig(variant="triple")
    with pytest.raises(ConfigError):
        AgentConfig(target_update="sometimes")
    with pytest.raises(ConfigError):
        AgentConfig(tau=0.0)
    with pytest.raises(ConfigError):
        AgentConfig(batch_size=128, replay_capacity=64)


def test_variant_architectures():
    assert isinstance(build_model(6, 4, small_cfg(variant="vanilla"), 0), DenseNet)
    assert isinstance(build_model(6, 4, small_cfg(variant="double"), 0), DenseNet)
    assert isinstance(build_model(6, 4, small_cfg(variant="duel"), 0), DuelingHead)
    assert isinstance(build_model(6, 4, small_cfg(variant="double_duel"), 0), DuelingHead)


def test_target_starts_as_copy():
    agent = DQNAgent(5, 3, small_cfg(), seed=0)
    assert np.array_equal(agent.online.get_params(), agent.target.get_params())
    agent.online.set_params(agent.online.get_params() + 1.0)
    assert not np.array_equal(agent.online.get_params(), agent.target.get_params())


def test_observe_time_limit_bootstraps_by_default():
    agent = DQNAgent(2, 2, small_cfg(), seed=1)
    agent.observe(np.zeros(2), 0, 1.0, np.ones(2), env_done=True)
    t = agent.buffer.snapshot()[0]
    assert not t.done
    assert t.gamma_next == agent.cfg.gamma


def test_observe_time_limit_terminal_when_disabled():
    agent = DQNAgent(2, 2, small_cfg(bootstrap_time_limit=False), seed=1)
    agent.observe(np.zeros(2), 0, 1.0, np.ones(2), env_done=True)
    t = agent.buffer.snapshot()[0]
    assert t.done
    assert t.gamma_next == 0.0


def test_learn_waits_for_learn_start():
    agent = DQNAgent(3, 2, small_cfg(learn_start=16, batch_size=8), seed=2)
    rng = np.random.default_rng(0)
    for _ in range(15):
        agent.observe(rng.normal(size=3), 0, 0.0, rng.normal(size=3), False)
        assert agent.learn_step() is None
    agent.observe(rng.normal(size=3), 0, 0.0, rng.normal(size=3), False)
    assert agent.learn_step() is not None
    assert agent.learner_steps == 1


def test_soft_update_moves_target_every_step():
    agent = DQNAgent(3, 2, small_cfg(target_update="soft", tau=0.5), seed=3)
    rng = np.random.default_rng(1)
    before = agent.target.get_params()
    fill_and_learn(agent, 10, rng)
    assert not np.array_equal(agent.target.get_params(), before)
    # with tau=0.5 the target tracks the online net closely
    gap = np.max(np.abs(agent.target.get_params() - agent.online.get_params()))
    assert gap < 0.1


def test_hard_update_only_on_interval():
    agent = DQNAgent(3, 2, small_cfg(target_update="hard", hard_interval=5), seed=4)
    rng = np.random.default_rng(2)
    init_target = agent.target.get_params()
    fill_and_learn(agent, 4, rng)  # 4 learner steps: no copy yet
    assert np.array_equal(agent.target.get_params(), init_target)
    fill_and_learn(agent, 1, rng)  # 5th learner step triggers the copy
    assert np.array_equal(agent.target.get_params(), agent.online.get_params())


def test_learning_runs_for_every_variant():
    rng = np.random.default_rng(3)
    for variant in ("vanilla", "double", "duel", "double_duel"):
        agent = DQNAgent(4, 3, small_cfg(variant=variant), seed=5)
        fill_and_learn(agent, 20, rng)
        assert agent.learner_steps == 20 - 8 + 1
        assert np.all(np.isfinite(agent.online.get_params()))


def test_agent_determinism():
    def run():
        agent = DQNAgent(4, 3, small_cfg(), seed=11)
        rng = np.random.default_rng(7)
        fill_and_learn(agent, 30, rng)
        return agent.online.get_params()

    assert np.array_equal(run(), run())


def test_state_roundtrip_preserves_behavior():
    agent = DQNAgent(4, 3, small_cfg(), seed=13)
    rng = np.random.default_rng(9)
    fill_and_learn(agent, 25, rng)
    clone = DQNAgent.from_state(agent.to_state())
    obs = rng.normal(size=(20, 4))
    for o in obs:
        assert agent.greedy_action(o) == clone.greedy_action(o)
        assert np.array_equal(agent.q_values(o), clone.q_values(o))
    # rng streams must continue identically after restore
    assert agent.act(obs[0], 0.7) == clone.act(obs[0], 0.7)
