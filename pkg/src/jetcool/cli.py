"""Command-line entry points for training, evaluation, baselines,
sweeps, and serving the environment over the wire protocol."""

import argparse
import sys

from .bridge import serve_env
from .config import load_run_config
from .env import ThermalEnv
from .errors import (CodecError, ConfigError, FormatError, InputError,
                     NumericError, ProtocolError, StabilityError, StateError)
from .sweep import SWEEP_AXES, sweep
from .train import evaluate, run_baseline, train

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ABORTED = 3


def _build_parser():
    p = argparse.ArgumentParser(
        prog="jetcool",
        description="Impinging-jet plate cooling: DQN training harness "
                    "and surrogate environment tools.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train an agent from a config file")
    t.add_argument("--config", required=True)
    t.add_argument("--seed", type=int, default=None,
                   help="override the seed in the config")
    t.add_argument("--quiet", action="store_true")

    e = sub.add_parser("evaluate", help="greedy rollout of a checkpoint")
    e.add_argument("--ckpt", required=True)
    e.add_argument("--config", required=True)
    e.add_argument("--out", default=None,
                   help="output directory (default: the config's output_dir)")

    b = sub.add_parser("baseline", help="constant-action rollout")
    b.add_argument("--level", type=int, required=True)
    b.add_argument("--config", required=True)
    b.add_argument("--duration", type=float, default=None)
    b.add_argument("--out", default=None)

    s = sub.add_parser("sweep", help="layout / episodes / variant comparison")
    s.add_argument("--axis", required=True, choices=SWEEP_AXES)
    s.add_argument("--config", required=True)
    s.add_argument("--seeds", default="0,1,2",
                   help="comma-separated seed list (at least 3)")
    s.add_argument("--quiet", action="store_true")

    v = sub.add_parser("serve-env", help="serve the environment over "
                                         "JSON-lines (TCP or stdio)")
    v.add_argument("--env", default="thermal", choices=["thermal"])
    v.add_argument("--config", default=None,
                   help="config file for the environment (default settings "
                        "when omitted)")
    v.add_argument("--listen", required=True,
                   help='"host:port" or "stdio"')
    v.add_argument("--max-sessions", type=int, default=None)
    return p


def _cmd_train(args):
    cfg = load_run_config(args.config, seed=args.seed)
    result = train(cfg, verbose=not args.quiet)
    last = result.rows[-1].normalized_reward if result.rows else float("nan")
    print(f"trained {len(result.rows)} episodes; final normalized reward "
          f"{last:.2f}; checkpoint {result.checkpoint_path}")
    if result.aborted_episodes:
        print(f"aborted episodes: {result.aborted_episodes}", file=sys.stderr)
        return EXIT_ABORTED
    return EXIT_OK


def _cmd_evaluate(args):
    cfg = load_run_config(args.config)
    out = args.out if args.out is not None else cfg.output_dir
    _, summary = evaluate(args.ckpt, cfg, out_dir=out)
    print(f"evaluation: in-band fraction {summary['in_band_fraction']:.3f}, "
          f"mean reward {summary['mean_reward']:.4f} over "
          f"{summary['decisions']} decisions")
    return EXIT_OK


def _cmd_baseline(args):
    cfg = load_run_config(args.config)
    out = args.out if args.out is not None else cfg.output_dir
    _, summary = run_baseline(args.level, cfg, out_dir=out,
                              duration=args.duration)
    print(f"baseline level {args.level}: tail T* "
          f"{summary['tail_mean_t_star']:.4f}, in-band fraction "
          f"{summary['in_band_fraction']:.3f}")
    return EXIT_OK


def _cmd_sweep(args):
    cfg = load_run_config(args.config)
    seeds = tuple(int(s) for s in args.seeds.split(",") if s.strip())
    results = sweep(cfg, args.axis, seeds=seeds, verbose=not args.quiet)
    for label, by_seed in results.items():
        finals = [by_seed[s]["rows"][-1].normalized_reward
                  for s in seeds if by_seed[s]["rows"]]
        mean = sum(finals) / len(finals) if finals else float("nan")
        print(f"{args.axis} {label}: mean final normalized reward {mean:.2f}")
    return EXIT_OK


def _cmd_serve(args):
    if args.config is not None:
        env_cfg = load_run_config(args.config).env
        env = ThermalEnv(env_cfg)
    else:
        env = ThermalEnv()
    serve_env(env, args.listen, max_sessions=args.max_sessions)
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handlers = {"train": _cmd_train, "evaluate": _cmd_evaluate,
                "baseline": _cmd_baseline, "sweep": _cmd_sweep,
                "serve-env": _cmd_serve}
    try:
        return handlers[args.command](args)
    except (ConfigError, FormatError, InputError, CodecError,
            ProtocolError, StateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, StabilityError) as e:
        print(f"run aborted: {e}", file=sys.stderr)
        return EXIT_ABORTED
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
