"""Command-line entry point: train / eval / serve / replay / inspect.

Exit codes: 0 success, 1 usage error, 2 config validation error, 3 runtime
failure.  Every run directory receives a full config snapshot for
reproducibility; numeric hyperparameters come only from defaults, the config
file, or --set overrides (never environment variables).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (sections: sim, rewards, curriculum, ppo, teleop)")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.FIELD=VALUE",
        help="override a config value (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadgait", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run PPO training")
    _add_common(p_train)
    p_train.add_argument("--run-dir", default="runs/latest", help="output directory")
    p_train.add_argument("--envs", type=int, help="shorthand for --set ppo.n_envs=N")
    p_train.add_argument("--iters", type=int, help="shorthand for --set ppo.iterations=N")
    p_train.add_argument("--seed", type=int, help="shorthand for --set ppo.seed=N")
    p_train.add_argument("--resume", help="checkpoint to resume from")

    p_eval = sub.add_parser("eval", help="evaluation sweeps and sequences")
    _add_common(p_eval)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--out-dir", default="eval_out")
    p_eval.add_argument("--gait", action="append", help="gait(s) to sweep (default: all four)")
    p_eval.add_argument("--speeds", default="0,1,2,3", help="comma-separated vx commands")
    p_eval.add_argument("--terrain", default="flat", choices=["flat", "platforms"])
    p_eval.add_argument("--seeds", default="0,1,2")
    p_eval.add_argument("--duration", type=float, default=10.0, help="episode seconds")
    p_eval.add_argument("--heatmap", action="store_true", help="also produce the (vx, wz) tracking heatmap")
    p_eval.add_argument("--record-dir", help="dump first-seed episodes as JSONL session logs (UI-replayable)")
    p_eval.add_argument("--sequence", choices=["leap", "dance"], help="export a scripted schedule as JSON and exit")

    p_serve = sub.add_parser("serve", help="live teleoperation service")
    _add_common(p_serve)
    p_serve.add_argument("--checkpoint", required=True)
    p_serve.add_argument("--terrain", choices=["flat", "platforms"], help="shorthand for teleop.terrain")
    p_serve.add_argument("--port", type=int, help="shorthand for teleop.port")
    p_serve.add_argument("--record", help="session log path (JSONL)")

    p_replay = sub.add_parser("replay", help="render a session log to CSV")
    p_replay.add_argument("log", help="JSONL session log")
    p_replay.add_argument("--out", help="output CSV (default: <log>.csv)")

    p_inspect = sub.add_parser("inspect", help="print checkpoint architecture and metadata")
    p_inspect.add_argument("checkpoint")
    return parser


def cmd_train(args) -> int:
    from .configio import load_run_config
    from .ppo.trainer import Trainer
    from .sim import Terrain

    overrides = list(args.overrides)
    if args.envs is not None:
        overrides.append(f"ppo.n_envs={args.envs}")
    if args.iters is not None:
        overrides.append(f"ppo.iterations={args.iters}")
    if args.seed is not None:
        overrides.append(f"ppo.seed={args.seed}")
    cfg = load_run_config(args.config, overrides)
    os.makedirs(args.run_dir, exist_ok=True)
    cfg.save(os.path.join(args.run_dir, "run_config.json"))
    trainer = Trainer(
        args.run_dir,
        cfg.ppo,
        cfg.sim,
        cfg.rewards,
        cfg.curriculum,
        Terrain.flat(),
        config_snapshot={"provenance": cfg.provenance},
    )
    if args.resume:
        trainer.load(args.resume)

    def log(rec):
        print(
            f"iter {rec['iteration']:5d}  reward {rec['reward_total_mean']:.5f}  "
            f"vxy {rec['reward/vxy_tracking']:.5f}  bins {rec['curriculum_active_bins']}",
            flush=True,
        )

    path = trainer.train(log_cb=log)
    print(f"final checkpoint: {path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from .evalbench import heatmap_to_csv, run_sweep, scripted_sequence, velocity_heatmap

    os.makedirs(args.out_dir, exist_ok=True)
    if args.sequence:
        sched = scripted_sequence(args.sequence)
        out = os.path.join(args.out_dir, f"{args.sequence}_schedule.json")
        with open(out, "w") as f:
            json.dump(
                {
                    "name": args.sequence,
                    "control_hz": 50.0,
                    "times": sched.times.round(6).tolist(),
                    "task": sched.task.round(6).tolist(),
                    "behavior": sched.behavior.round(6).tolist(),
                },
                f,
            )
        print(f"wrote {out} ({len(sched)} samples)")
        return EXIT_OK

    gaits = tuple(args.gait) if args.gait else ("trot", "pronk", "pace", "bound")
    speeds = tuple(float(s) for s in args.speeds.split(","))
    seeds = tuple(int(s) for s in args.seeds.split(","))
    report = run_sweep(
        args.checkpoint,
        gaits=gaits,
        speeds=speeds,
        terrain_kind=args.terrain,
        seeds=seeds,
        duration_s=args.duration,
        record_dir=args.record_dir,
    )
    power_csv = os.path.join(args.out_dir, "power_sweep.csv")
    report.to_csv(power_csv)
    print(f"wrote {power_csv} ({len(report.rows)} conditions)")
    if args.heatmap:
        grid, vxs, wzs = velocity_heatmap(args.checkpoint)
        hm_csv = os.path.join(args.out_dir, "velocity_heatmap.csv")
        heatmap_to_csv(hm_csv, grid, vxs, wzs)
        print(f"wrote {hm_csv}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .configio import load_run_config
    from .teleop.service import TeleopService

    overrides = list(args.overrides)
    if args.terrain:
        overrides.append(f"teleop.terrain={args.terrain}")
    if args.port is not None:
        overrides.append(f"teleop.port={args.port}")
    if args.record:
        overrides.append(f"teleop.record_path={args.record}")
    cfg = load_run_config(args.config, overrides)
    service = TeleopService(args.checkpoint, cfg.teleop)
    print(f"serving on ws://{cfg.teleop.host}:{service.port} (terrain: {cfg.teleop.terrain})", flush=True)
    service.serve_forever()
    return EXIT_OK


def cmd_replay(args) -> int:
    from .teleop.protocol import read_session_log, replay_frames

    records, skipped = read_session_log(args.log)
    frames = replay_frames(records)
    if skipped:
        print(f"warning: skipped {skipped} corrupt line(s)", file=sys.stderr)
    out = args.out or args.log + ".csv"
    with open(out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(
            ["t", "x", "y", "z", "vx_cmd", "vy_cmd", "wz_cmd", "contact_FR", "contact_FL", "contact_RR", "contact_RL"]
        )
        for fr in frames:
            task = fr.get("commands", {}).get("task", {})
            w.writerow(
                [fr["t"], *fr["base_pos"], task.get("vx_mps"), task.get("vy_mps"), task.get("wz_radps")]
                + list(fr["foot_contact"])
            )
    print(f"wrote {out} ({len(frames)} frames)")
    return EXIT_OK


def cmd_inspect(args) -> int:
    from .nn import load_checkpoint

    arrays, meta = load_checkpoint(args.checkpoint)
    print(f"checkpoint: {args.checkpoint}")
    print(f"iteration: {meta.get('iteration')}")
    net_shapes = [list(arrays[k].shape) for k in sorted(arrays) if k.startswith("net_w")]
    est_shapes = [list(arrays[k].shape) for k in sorted(arrays) if k.startswith("est_w")]
    print(f"policy/value trunk: {net_shapes}")
    print(f"estimator: {est_shapes}")
    n_params = sum(a.size for k, a in arrays.items() if k.startswith(("net_", "est_", "log_std")))
    print(f"parameters: {n_params}")
    for section in ("ppo", "sim", "rewards", "curriculum"):
        if section in meta:
            print(f"[{section}] " + json.dumps(meta[section], sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    from .configio import ConfigError

    handlers = {
        "train": cmd_train,
        "eval": cmd_eval,
        "serve": cmd_serve,
        "replay": cmd_replay,
        "inspect": cmd_inspect,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
