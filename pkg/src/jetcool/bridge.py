"""Remote environment bridge: JSON-lines protocol over TCP or stdio.

Lets an external process stand in for the environment (or expose this
one). One JSON object per newline-terminated UTF-8 line; every request
gets exactly one response. The server owns a single mutable environment,
so it serves one client session at a time.

Message kinds: hello -> spec (handshake), reset -> obs, step -> result,
bye -> bye; error replies carry a short code plus detail. All numbers on
the wire must be finite; floats are serialized with enough digits to
round-trip exactly.
"""

import json
import socket
import sys
from dataclasses import dataclass

import numpy as np

from .errors import CodecError, InputError, ProtocolError, StateError

PROTOCOL_VERSION = 1

_KINDS = ("hello", "spec", "reset", "obs", "step", "result", "error", "bye")


@dataclass(frozen=True)
class EnvSpec:
    obs_dim: int
    n_actions: int
    max_decisions_per_episode: int
    protocol_version: int = PROTOCOL_VERSION

    def __post_init__(self):
        for name in ("obs_dim", "n_actions", "max_decisions_per_episode",
                     "protocol_version"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise InputError(f"{name} must be a positive integer")


def env_spec_of(env):
    return EnvSpec(obs_dim=int(env.obs_dim), n_actions=int(env.n_actions),
                   max_decisions_per_episode=int(env.decisions_per_episode))


# ── codec ─────────────────────────────────────────────────────────────


def _check_finite(obj):
    if isinstance(obj, float):
        if not np.isfinite(obj):
            raise CodecError(f"non-finite number {obj!r} in message")
    elif isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _check_finite(v)


def encode_message(msg):
    """Message dict -> one wire line (no trailing newline)."""
    if not isinstance(msg, dict) or not isinstance(msg.get("kind"), str):
        raise CodecError("message must be a dict with a string 'kind'")
    _check_finite(msg)
    try:
        return json.dumps(msg, allow_nan=False, sort_keys=True,
                          separators=(",", ":"))
    except (TypeError, ValueError) as e:
        raise CodecError(f"unencodable message: {e}") from e


def _reject_constant(token):
    raise CodecError(f"non-finite constant {token!r} on the wire")


def decode_message(line):
    """One wire line -> message dict. Parse errors carry a byte offset."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CodecError(f"bad utf-8: {e}", offset=e.start) from e
    try:
        msg = json.loads(line, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise CodecError(f"bad message line: {e.msg}", offset=e.pos) from e
    if not isinstance(msg, dict) or not isinstance(msg.get("kind"), str):
        raise CodecError("message must be a JSON object with a string 'kind'")
    _check_finite(msg)
    return msg


def _obs_list(obs):
    return [float(x) for x in np.asarray(obs).ravel()]


# ── server ────────────────────────────────────────────────────────────


def _error_msg(code, detail=""):
    return {"kind": "error", "error": code, "detail": detail}


def _serve_session(env, rfile, wfile):
    """One client session on a pair of text streams."""

    def send(msg):
        wfile.write(encode_message(msg) + "\n")
        wfile.flush()

    has_reset = False
    for line in rfile:
        if not line.strip():
            continue
        try:
            msg = decode_message(line)
        except CodecError as e:
            send(_error_msg("bad_message", f"{e} (offset {e.offset})"))
            continue
        kind = msg["kind"]
        if kind == "hello":
            if msg.get("version") != PROTOCOL_VERSION:
                send(_error_msg("version_mismatch",
                                f"server speaks version {PROTOCOL_VERSION}"))
            else:
                spec = env_spec_of(env)
                send({"kind": "spec", "obs_dim": spec.obs_dim,
                      "n_actions": spec.n_actions,
                      "max_decisions_per_episode": spec.max_decisions_per_episode,
                      "version": spec.protocol_version})
        elif kind == "reset":
            obs = env.reset()
            has_reset = True
            send({"kind": "obs", "obs": _obs_list(obs)})
        elif kind == "step":
            if not has_reset:
                send(_error_msg("not_reset", "step before reset"))
                continue
            try:
                obs, reward, done = env.step(msg.get("action"))
            except (InputError, StateError, TypeError) as e:
                send(_error_msg("bad_step", str(e)))
                continue
            send({"kind": "result", "obs": _obs_list(obs),
                  "reward": float(reward), "done": bool(done)})
        elif kind == "bye":
            send({"kind": "bye"})
            return
        else:
            send(_error_msg("unexpected_kind", f"cannot handle {kind!r}"))


class EnvServer:
    """TCP server exposing one environment, one client at a time."""

    def __init__(self, env, host="127.0.0.1", port=0):
        self.env = env
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(1)
        self.host, self.port = self._sock.getsockname()[:2]

    @property
    def address(self):
        return f"{self.host}:{self.port}"

    def serve_forever(self, max_sessions=None):
        served = 0
        while max_sessions is None or served < max_sessions:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                break  # shutdown() closed the listening socket
            with conn:
                rfile = conn.makefile("r", encoding="utf-8", newline="\n")
                wfile = conn.makefile("w", encoding="utf-8", newline="\n")
                try:
                    _serve_session(self.env, rfile, wfile)
                except (BrokenPipeError, ConnectionError, OSError):
                    pass  # client vanished; session over
                finally:
                    try:
                        self.env.reset()
                    except Exception:
                        pass
            served += 1

    def shutdown(self):
        try:
            self._sock.close()
        except OSError:
            pass


def serve_env(env, listen, max_sessions=None):
    """Blocking entry point: listen is "stdio" or a "host:port" address."""
    if listen == "stdio":
        _serve_session(env, sys.stdin, sys.stdout)
        return
    host, _, port = listen.rpartition(":")
    if not host:
        raise InputError("listen address must be host:port or stdio")
    server = EnvServer(env, host=host, port=int(port))
    print(f"serving environment on {server.address}", file=sys.stderr)
    try:
        server.serve_forever(max_sessions)
    finally:
        server.shutdown()


# ── client ────────────────────────────────────────────────────────────


class RemoteEnv:
    """Environment handle backed by a server; same reset/step contract."""

    def __init__(self, rfile, wfile, timeout=60.0, _closer=None):
        self._rfile = rfile
        self._wfile = wfile
        self._closer = _closer
        self.timeout = timeout
        reply = self._request({"kind": "hello", "version": PROTOCOL_VERSION},
                              "spec")
        if reply.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(
                f"server speaks protocol version {reply.get('version')}, "
                f"client requires {PROTOCOL_VERSION}")
        self.spec = EnvSpec(obs_dim=reply["obs_dim"],
                            n_actions=reply["n_actions"],
                            max_decisions_per_episode=reply["max_decisions_per_episode"],
                            protocol_version=reply["version"])

    @classmethod
    def connect(cls, address, timeout=60.0):
        host, _, port = address.rpartition(":")
        if not host:
            raise InputError("address must be host:port")
        sock = socket.create_connection((host, int(port)), timeout=timeout)
        sock.settimeout(timeout)
        rfile = sock.makefile("r", encoding="utf-8", newline="\n")
        wfile = sock.makefile("w", encoding="utf-8", newline="\n")
        return cls(rfile, wfile, timeout=timeout, _closer=sock.close)

    @property
    def obs_dim(self):
        return self.spec.obs_dim

    @property
    def n_actions(self):
        return self.spec.n_actions

    @property
    def decisions_per_episode(self):
        return self.spec.max_decisions_per_episode

    def _request(self, msg, expect_kind):
        try:
            self._wfile.write(encode_message(msg) + "\n")
            self._wfile.flush()
            line = self._rfile.readline()
        except (socket.timeout, TimeoutError) as e:
            raise ProtocolError(f"no response within {self.timeout} s") from e
        except (BrokenPipeError, ConnectionError, OSError, ValueError) as e:
            raise ProtocolError(f"connection failed: {e}") from e
        if not line:
            raise ProtocolError("connection closed by server")
        reply = decode_message(line)
        if reply["kind"] == "error":
            raise ProtocolError(
                f"server error {reply.get('error')!r}: {reply.get('detail', '')}")
        if reply["kind"] != expect_kind:
            raise ProtocolError(
                f"expected {expect_kind!r} reply, got {reply['kind']!r}")
        return reply

    def reset(self):
        reply = self._request({"kind": "reset"}, "obs")
        return np.asarray(reply["obs"], dtype=np.float64)

    def step(self, action):
        reply = self._request({"kind": "step", "action": int(action)}, "result")
        return (np.asarray(reply["obs"], dtype=np.float64),
                float(reply["reward"]), bool(reply["done"]))

    def close(self):
        try:
            self._request({"kind": "bye"}, "bye")
        except (ProtocolError, CodecError):
            pass
        if self._closer is not None:
            self._closer()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def remote_env(address, timeout=60.0):
    return RemoteEnv.connect(address, timeout=timeout)
