"""Wire protocol: codec fidelity, server session behavior, client
contract, loopback transparency."""

import socket
import subprocess
import sys
import threading
import time

import numpy as np
import pytest

from jetcool.bridge import (EnvServer, EnvSpec, PROTOCOL_VERSION, RemoteEnv,
                            decode_message, encode_message, env_spec_of)
from jetcool.env import EnvConfig, ThermalEnv
from jetcool.errors import CodecError, InputError, ProtocolError


def tiny_env():
    return ThermalEnv(EnvConfig(episode_duration=2.0, dt=0.01,
                                decision_interval=10, nx=24, ny=12))


# ── codec ─────────────────────────────────────────────────────────────


def test_roundtrip_result_message():
    msg = {"kind": "result", "obs": [0.95], "reward": 1.0, "done": False}
    assert decode_message(encode_message(msg)) == msg


def test_non_json_line_is_codec_error_with_offset():
    with pytest.raises(CodecError) as ei:
        decode_message("not json")
    assert ei.value.offset >= 0
    with pytest.raises(CodecError):
        decode_message('{"kind": "step", ')
    with pytest.raises(CodecError):
        decode_message('[1, 2, 3]')        # no kind
    with pytest.raises(CodecError):
        decode_message('{"kind": 7}')


def test_non_finite_numbers_rejected_both_ways():
    with pytest.raises(CodecError):
        encode_message({"kind": "result", "reward": float("inf")})
    with pytest.raises(CodecError):
        encode_message({"kind": "result", "obs": [float("nan")]})
    with pytest.raises(CodecError):
        decode_message('{"kind": "result", "reward": NaN}')
    with pytest.raises(CodecError):
        decode_message('{"kind": "result", "reward": 1e999}')


def test_large_float_payload_roundtrips_losslessly():
    rng = np.random.default_rng(17)
    vals = rng.standard_normal(10_000) * 10.0 ** rng.integers(-300, 300, 10_000)
    vals[:4] = [0.0, -0.0, 5e-324, 1.7976931348623157e308]
    msg = {"kind": "result", "obs": [float(v) for v in vals],
           "reward": 0.1, "done": True}
    back = decode_message(encode_message(msg))
    assert back == msg
    assert all(a == b for a, b in zip(back["obs"], msg["obs"]))


def test_random_messages_roundtrip():
    rng = np.random.default_rng(23)
    for _ in range(100):
        msg = {"kind": "result",
               "obs": [float(v) for v in rng.standard_normal(rng.integers(1, 40))],
               "reward": float(rng.standard_normal()),
               "done": bool(rng.integers(0, 2))}
        assert decode_message(encode_message(msg)) == msg


def test_env_spec_validation():
    with pytest.raises(InputError):
        EnvSpec(obs_dim=0, n_actions=10, max_decisions_per_episode=100)
    spec = env_spec_of(tiny_env())
    assert (spec.obs_dim, spec.n_actions) == (11, 10)
    assert spec.max_decisions_per_episode == 20
    assert spec.protocol_version == PROTOCOL_VERSION


# ── TCP sessions ──────────────────────────────────────────────────────


@pytest.fixture
def server():
    srv = EnvServer(tiny_env())
    threads = []

    def start(max_sessions):
        t = threading.Thread(target=srv.serve_forever, args=(max_sessions,),
                             daemon=True)
        t.start()
        threads.append(t)
        return srv

    yield start
    srv.shutdown()
    for t in threads:
        t.join(timeout=10.0)


def test_handshake_and_episode(server):
    srv = server(1)
    with RemoteEnv.connect(srv.address, timeout=30.0) as env:
        assert env.obs_dim == 11
        assert env.n_actions == 10
        obs = env.reset()
        assert obs.shape == (11,)
        for k in range(env.decisions_per_episode):
            obs, reward, done = env.step(4)
        assert done


def test_step_before_reset_and_bad_action(server):
    srv = server(1)
    with RemoteEnv.connect(srv.address, timeout=30.0) as env:
        with pytest.raises(ProtocolError, match="not_reset"):
            env.step(0)
        env.reset()
        with pytest.raises(ProtocolError, match="bad_step"):
            env.step(99)
        # session survives the rejected requests
        obs, reward, done = env.step(0)
        assert not done


def test_version_mismatch_rejected(server):
    # newer client against this server: the hello is refused
    srv = server(1)
    with socket.create_connection(("127.0.0.1", srv.port), timeout=30.0) as s:
        s.settimeout(30.0)
        r = s.makefile("r", encoding="utf-8", newline="\n")
        w = s.makefile("w", encoding="utf-8", newline="\n")
        w.write(encode_message({"kind": "hello", "version": 2}) + "\n")
        w.flush()
        reply = decode_message(r.readline())
        assert reply["kind"] == "error" and reply["error"] == "version_mismatch"


def test_client_rejects_wrong_server_version():
    def behavior(r, w, conn):
        decode_message(r.readline())
        w.write(encode_message({"kind": "spec", "obs_dim": 11, "n_actions": 10,
                                "max_decisions_per_episode": 20,
                                "version": 2}) + "\n")
        w.flush()
        conn.close()

    port = _fake_server(behavior)
    with pytest.raises(ProtocolError, match="version"):
        RemoteEnv.connect(f"127.0.0.1:{port}", timeout=30.0)


def test_malformed_line_keeps_session_alive(server):
    srv = server(1)
    with socket.create_connection(("127.0.0.1", srv.port), timeout=30.0) as s:
        s.settimeout(30.0)
        r = s.makefile("r", encoding="utf-8", newline="\n")
        w = s.makefile("w", encoding="utf-8", newline="\n")
        w.write("this is not json\n")
        w.flush()
        reply = decode_message(r.readline())
        assert reply["kind"] == "error" and reply["error"] == "bad_message"
        w.write('{"kind": "poke"}\n')
        w.flush()
        assert decode_message(r.readline())["error"] == "unexpected_kind"
        w.write(encode_message({"kind": "hello", "version": PROTOCOL_VERSION}) + "\n")
        w.flush()
        assert decode_message(r.readline())["kind"] == "spec"


def test_sequential_clients_get_fresh_episodes(server):
    srv = server(2)
    firsts = []
    for _ in range(2):
        with RemoteEnv.connect(srv.address, timeout=30.0) as env:
            obs = env.reset()
            firsts.append(obs)
            env.step(7)
    assert np.array_equal(firsts[0], firsts[1])


def test_loopback_matches_local_exactly(server):
    srv = server(1)
    rng = np.random.default_rng(31)
    actions = [int(a) for a in rng.integers(0, 10, 20)]
    local = tiny_env()
    lo = [local.reset()]
    lr = []
    for a in actions:
        o, r, d = local.step(a)
        lo.append(o)
        lr.append((r, d))
    with RemoteEnv.connect(srv.address, timeout=30.0) as env:
        ro = [env.reset()]
        rr = []
        for a in actions:
            o, r, d = env.step(a)
            ro.append(o)
            rr.append((r, d))
    assert all(np.array_equal(a, b) for a, b in zip(lo, ro))
    assert lr == rr


# ── failure paths ─────────────────────────────────────────────────────


def _fake_server(behavior):
    """Minimal scripted server for failure injection; returns its port."""
    lsock = socket.socket()
    lsock.bind(("127.0.0.1", 0))
    lsock.listen(1)
    port = lsock.getsockname()[1]

    def run():
        conn, _ = lsock.accept()
        r = conn.makefile("r", encoding="utf-8", newline="\n")
        w = conn.makefile("w", encoding="utf-8", newline="\n")
        behavior(r, w, conn)
        lsock.close()

    threading.Thread(target=run, daemon=True).start()
    return port


def test_server_death_mid_episode_surfaces_step_error():
    env_impl = tiny_env()

    def behavior(r, w, conn):
        for _ in range(2):      # hello + reset, then vanish
            line = r.readline()
            msg = decode_message(line)
            if msg["kind"] == "hello":
                spec = env_spec_of(env_impl)
                w.write(encode_message({"kind": "spec", "obs_dim": spec.obs_dim,
                                        "n_actions": spec.n_actions,
                                        "max_decisions_per_episode":
                                            spec.max_decisions_per_episode,
                                        "version": PROTOCOL_VERSION}) + "\n")
            else:
                w.write(encode_message(
                    {"kind": "obs", "obs": [0.0] * 11}) + "\n")
            w.flush()
        conn.close()

    port = _fake_server(behavior)
    env = RemoteEnv.connect(f"127.0.0.1:{port}", timeout=30.0)
    env.reset()
    with pytest.raises(ProtocolError, match="closed|connection"):
        env.step(0)


def test_step_timeout_surfaces_step_error():
    def behavior(r, w, conn):
        msg = decode_message(r.readline())
        assert msg["kind"] == "hello"
        w.write(encode_message({"kind": "spec", "obs_dim": 11, "n_actions": 10,
                                "max_decisions_per_episode": 20,
                                "version": PROTOCOL_VERSION}) + "\n")
        w.flush()
        r.readline()
        time.sleep(3.0)         # never answer within the client timeout
        conn.close()

    port = _fake_server(behavior)
    env = RemoteEnv.connect(f"127.0.0.1:{port}", timeout=0.5)
    with pytest.raises(ProtocolError, match="no response"):
        env.reset()


# ── stdio transport ───────────────────────────────────────────────────


def test_stdio_session_roundtrip():
    code = (
        "from jetcool.bridge import serve_env\n"
        "from jetcool.env import EnvConfig, ThermalEnv\n"
        "env = ThermalEnv(EnvConfig(episode_duration=1.0, dt=0.01,"
        " decision_interval=10, nx=24, ny=12))\n"
        "serve_env(env, 'stdio')\n"
    )
    proc = subprocess.Popen([sys.executable, "-c", code],
                            stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                            text=True, bufsize=1)
    try:
        env = RemoteEnv(proc.stdout, proc.stdin, timeout=60.0)
        assert env.obs_dim == 11
        obs = env.reset()
        local = ThermalEnv(EnvConfig(episode_duration=1.0, dt=0.01,
                                     decision_interval=10, nx=24, ny=12))
        assert np.array_equal(obs, local.reset())
        for a in (0, 3, 9, 4):
            ro, rr, rd = env.step(a)
            lo, lr, ld = local.step(a)
            assert np.array_equal(ro, lo)
            assert rr == lr and rd == ld
        env.close()
        assert proc.wait(timeout=30.0) == 0
    finally:
        proc.kill()
