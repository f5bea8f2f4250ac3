# Sampled Q-learning on a small random MDP, tracked against the
# value-iteration fixed point. The sup-norm error shrinks roughly like
# the visit counts' harmonic step sizes allow.

import numpy as np

from jetcool.rl import (Transition, random_mdp, tabular_q_update,
                        value_iteration_oracle)

mdp = random_mdp(n_states=5, n_actions=2, gamma=0.4, seed=7)
Q_star = value_iteration_oracle(mdp, tol=1e-12)
print("Q* from value iteration:")
print(np.round(Q_star, 4))

rng = np.random.default_rng(7)
Q = np.zeros((5, 2))
visits = np.zeros((5, 2), dtype=np.int64)

print("\nsamples    sup-norm error")
for k in range(1, 200_001):
    s = int(rng.integers(5))
    a = int(rng.integers(2))
    s2 = int(rng.choice(5, p=mdp.transitions[s, a]))
    visits[s, a] += 1
    t = Transition(s=s, a=a, r=float(mdp.rewards[s, a]),
                   gamma_next=1.0, s_next=s2, done=False)
    tabular_q_update(Q, t, alpha=1.0 / visits[s, a], gamma=mdp.gamma)
    if k in (1000, 5000, 20000, 50000, 100000, 200000):
        err = float(np.max(np.abs(Q - Q_star)))
        print(f"{k:7d}    {err:.2e}")
