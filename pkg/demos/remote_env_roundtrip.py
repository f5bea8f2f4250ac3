"""
Running the environment behind a socket
=======================================

The training loop only ever sees reset() and step(), so the environment
can live in another process (or another machine) behind a line-based
JSON protocol. Here a server thread wraps one env instance, a client
connects over loopback TCP, and both are driven with the same actions to
show the trajectories agree bit for bit.
"""

import threading

import numpy as np

from jetcool.bridge import EnvServer, RemoteEnv
from jetcool.env import EnvConfig, ThermalEnv

cfg = EnvConfig(episode_duration=5.0, nx=48, ny=24)

server = EnvServer(ThermalEnv(cfg))
thread = threading.Thread(target=server.serve_forever, args=(1,), daemon=True)
thread.start()
print(f"server listening on {server.address}")

local = ThermalEnv(cfg)
rng = np.random.default_rng(3)
actions = rng.integers(0, cfg.n_actions, cfg.decisions_per_episode)

with RemoteEnv.connect(server.address, timeout=30.0) as remote:
    print(f"handshake: obs_dim={remote.obs_dim}, n_actions={remote.n_actions}")
    obs_l = local.reset()
    obs_r = remote.reset()
    worst = float(np.max(np.abs(obs_l - obs_r)))
    for a in actions:
        obs_l, r_l, done_l = local.step(int(a))
        obs_r, r_r, done_r = remote.step(int(a))
        worst = max(worst, float(np.max(np.abs(obs_l - obs_r))),
                    abs(r_l - r_r))

server.shutdown()
thread.join()

print(f"drove {len(actions)} decisions through the socket")
print(f"largest local-vs-remote deviation: {worst}")
assert worst == 0.0
