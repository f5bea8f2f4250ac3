"""Value-based RL building blocks: replay, exploration, TD targets, tabular.

The deep ops work on any model exposing forward_batch / backward_batch /
get_params / set_params (DenseNet or DuelingHead). Targets are always
computed from an explicit target model and handed to the loss as constants,
so no gradient ever flows through the bootstrap.
"""

import threading
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError, StateError


@dataclass(frozen=True, eq=False)
class Transition:
    """One (s, a, r, s') step. ``gamma_next`` is the discount applied to the
    bootstrap from s'; it is 0 exactly when the transition is terminal."""

    s: object
    a: int
    r: float
    gamma_next: float
    s_next: object
    done: bool

    def __post_init__(self):
        if int(self.a) != self.a or self.a < 0:
            raise InputError(f"action must be a nonnegative integer, got {self.a!r}")
        if not np.isfinite(self.r):
            raise InputError("reward must be finite")
        if not (0.0 <= self.gamma_next <= 1.0):
            raise InputError(f"gamma_next must lie in [0, 1], got {self.gamma_next}")
        if self.done != (self.gamma_next == 0.0):
            raise InputError("done must hold exactly when gamma_next == 0")


class ReplayBuffer:
    """Fixed-capacity FIFO ring with uniform sampling (with replacement).

    One writer and one reader may operate concurrently; a lock guards the
    ring so a sample never sees a half-written slot.
    """

    def __init__(self, capacity):
        if capacity < 1:
            raise InputError("capacity must be >= 1")
        self.capacity = int(capacity)
        self._items = []
        self._cursor = 0
        self._lock = threading.Lock()

    def __len__(self):
        with self._lock:
            return len(self._items)

    def push(self, transition):
        if not isinstance(transition, Transition):
            raise InputError("push expects a Transition")
        with self._lock:
            if len(self._items) < self.capacity:
                self._items.append(transition)
            else:
                # overwrite the oldest slot
                self._items[self._cursor] = transition
                self._cursor = (self._cursor + 1) % self.capacity

    def snapshot(self):
        """Current contents, oldest first."""
        with self._lock:
            return self._items[self._cursor:] + self._items[:self._cursor]

    def sample_minibatch(self, n, rng):
        if n < 0:
            raise InputError("sample size must be >= 0")
        if n == 0:
            return []
        with self._lock:
            size = len(self._items)
            if size == 0:
                raise StateError("cannot sample from an empty buffer")
            idx = rng.integers(0, size, size=n)
            return [self._items[i] for i in idx]


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear decay from start to end over decay_steps, then constant."""

    start: float = 1.0
    end: float = 0.05
    decay_steps: int = 30000

    def __post_init__(self):
        if not (0.0 <= self.end <= self.start <= 1.0):
            raise InputError("need 0 <= end <= start <= 1")
        if self.decay_steps < 1:
            raise InputError("decay_steps must be >= 1")

    def value(self, step):
        if step < 0:
            raise InputError("step must be >= 0")
        if step >= self.decay_steps:
            return self.end
        return self.start + (self.end - self.start) * (step / self.decay_steps)


def select_action(q, eps, rng):
    """Epsilon-greedy over a Q-value vector. Greedy ties break to the lowest
    index. Always consumes exactly one uniform draw, plus one integer draw
    when the exploratory branch is taken."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] < 1:
        raise InputError(f"q must be a nonempty vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InputError("q contains non-finite values")
    if not (0.0 <= eps <= 1.0):
        raise InputError(f"eps must lie in [0, 1], got {eps}")
    if rng.random() < eps:
        return int(rng.integers(q.shape[0]))
    return int(np.argmax(q))


# ── TD targets and loss ───────────────────────────────────────────────


def _stack(batch, attr):
    return np.stack([np.asarray(getattr(t, attr), dtype=np.float64) for t in batch])


def _check_batch(batch):
    if not batch:
        raise InputError("batch must be nonempty")


def td_target_vanilla(batch, target_model):
    """y_i = r_i + gamma_next_i * max_a Q_target(s'_i, a)."""
    _check_batch(batch)
    S2 = _stack(batch, "s_next")
    q_next = target_model.forward_batch(S2)
    r = np.array([t.r for t in batch])
    g = np.array([t.gamma_next for t in batch])
    return r + g * q_next.max(axis=1)


def td_target_double(batch, online_model, target_model):
    """Action chosen by the online net, evaluated by the target net."""
    _check_batch(batch)
    S2 = _stack(batch, "s_next")
    a_star = np.argmax(online_model.forward_batch(S2), axis=1)
    q_next = target_model.forward_batch(S2)
    r = np.array([t.r for t in batch])
    g = np.array([t.gamma_next for t in batch])
    return r + g * q_next[np.arange(len(batch)), a_star]


def q_loss_and_grad(batch, y, model, clip_norm=10.0):
    """Mean squared TD error and its clipped parameter gradient.

    y is treated as a constant vector, so the result carries no dependence
    on however the targets were produced.
    """
    _check_batch(batch)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (len(batch),):
        raise InputError(f"y must have shape ({len(batch)},), got {y.shape}")
    S = _stack(batch, "s")
    actions = np.array([t.a for t in batch])
    if np.any(actions >= model.out_dim):
        raise InputError("action index out of range for model output")
    Q = model.forward_batch(S)
    picked = Q[np.arange(len(batch)), actions]
    diff = picked - y
    loss = float(np.mean(diff * diff))
    if not np.isfinite(loss):
        raise NumericError("non-finite TD loss")
    dL_dQ = np.zeros_like(Q)
    dL_dQ[np.arange(len(batch)), actions] = 2.0 * diff / len(batch)
    grads, _ = model.backward_batch(S, dL_dQ)
    norm = float(np.linalg.norm(grads))
    if not np.isfinite(norm):
        raise NumericError("non-finite TD gradient")
    if norm > clip_norm:
        grads = grads * (clip_norm / norm)
    return loss, grads


# ── target-network updates ────────────────────────────────────────────


def _check_same_shape(target_model, online_model):
    if target_model.n_params != online_model.n_params \
            or target_model.in_dim != online_model.in_dim \
            or target_model.out_dim != online_model.out_dim:
        raise InputError("target and online models differ in shape")


def hard_update(target_model, online_model):
    """Copy online parameters into the target model (deep copy)."""
    _check_same_shape(target_model, online_model)
    target_model.set_params(online_model.get_params())


def soft_update(target_model, online_model, tau):
    """theta_target <- tau * theta_online + (1 - tau) * theta_target."""
    if not (0.0 < tau <= 1.0):
        raise InputError(f"tau must lie in (0, 1], got {tau}")
    _check_same_shape(target_model, online_model)
    blended = tau * online_model.get_params() + (1.0 - tau) * target_model.get_params()
    target_model.set_params(blended)


# ── tabular control ───────────────────────────────────────────────────


@dataclass(frozen=True)
class TabularMDP:
    """Finite MDP with dense transition tensor T[s, a, s'] and rewards R[s, a]."""

    transitions: np.ndarray
    rewards: np.ndarray
    gamma: float

    def __post_init__(self):
        T, R = self.transitions, self.rewards
        if T.ndim != 3 or T.shape[0] != T.shape[2]:
            raise InputError(f"transition tensor must be (S, A, S), got {T.shape}")
        if R.shape != T.shape[:2]:
            raise InputError(f"rewards must be (S, A), got {R.shape}")
        if np.any(T < 0) or not np.allclose(T.sum(axis=2), 1.0, atol=1e-12):
            raise InputError("each T[s, a] must be a probability distribution")
        if not (0.0 <= self.gamma < 1.0):
            raise InputError("gamma must lie in [0, 1)")

    @property
    def n_states(self):
        return self.transitions.shape[0]

    @property
    def n_actions(self):
        return self.transitions.shape[1]


def random_mdp(n_states, n_actions, gamma, seed):
    """Dense random MDP with uniform-Dirichlet rows and U[0,1) rewards."""
    rng = np.random.default_rng(seed)
    T = rng.random((n_states, n_actions, n_states))
    T = T / T.sum(axis=2, keepdims=True)
    R = rng.random((n_states, n_actions))
    return TabularMDP(transitions=T, rewards=R, gamma=gamma)


def tabular_q_update(Q, transition, alpha, gamma):
    """One sampled Q-learning update on table entry (s, a), in place.

    The bootstrap uses the transition's done flag: terminal steps back up
    the bare reward.
    """
    if not (0.0 < alpha <= 1.0):
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if not (0.0 <= gamma <= 1.0):
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    s, a = int(transition.s), int(transition.a)
    if not (0 <= s < Q.shape[0] and 0 <= a < Q.shape[1]):
        raise InputError(f"state/action ({s}, {a}) outside table {Q.shape}")
    if transition.done:
        target = transition.r
    else:
        s2 = int(transition.s_next)
        if not (0 <= s2 < Q.shape[0]):
            raise InputError(f"next state {s2} outside table {Q.shape}")
        target = transition.r + gamma * float(np.max(Q[s2]))
    Q[s, a] += alpha * (target - Q[s, a])
    return Q


def expected_q_sweep(Q, mdp, alpha=1.0):
    """Synchronous expected Q-learning sweep over every (s, a), in place.

    With alpha = 1 this is exactly one Bellman optimality backup.
    """
    if not (0.0 < alpha <= 1.0):
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    best_next = Q.max(axis=1)
    target = mdp.rewards + mdp.gamma * mdp.transitions @ best_next
    Q += alpha * (target - Q)
    return Q


def value_iteration_oracle(mdp, tol=1e-9, max_iter=1_000_000):
    """Q* by value iteration, run until the sup-norm residual drops below tol."""
    if tol <= 0.0:
        raise InputError("tol must be positive")
    Q = np.zeros((mdp.n_states, mdp.n_actions))
    for _ in range(max_iter):
        Q_next = mdp.rewards + mdp.gamma * mdp.transitions @ Q.max(axis=1)
        if float(np.max(np.abs(Q_next - Q))) < tol:
            return Q_next
        Q = Q_next
    raise NumericError(f"value iteration failed to reach tol={tol} in {max_iter} iterations")


def discounted_return(rewards, gamma):
    """Sum of gamma**k * r_k over the reward sequence."""
    if not (0.0 <= gamma <= 1.0):
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    total = 0.0
    weight = 1.0
    for r in rewards:
        total += weight * float(r)
        weight *= gamma
    return total
