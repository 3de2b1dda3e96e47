"""Evaluation protocols: mechanical power across gaits and speeds, platform
survival and tracking sweeps, velocity heatmaps, stepping-frequency measurement,
and the scripted leap/dance command sequences."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .gait import BehaviorCommand, GAIT_PRESETS, TaskCommand, gait_preset
from .ppo.env import VecGaitEnv
from .ppo.trainer import ActorCritic
from .rewards import WEIGHTS
from .sim import SimConfig, Terrain, generate_platforms


def mechanical_power(torques, joint_vels) -> np.ndarray:
    """Positive mechanical output power summed over joints: sum_i max(tau_i * qd_i, 0)."""
    p = np.asarray(torques) * np.asarray(joint_vels)
    return np.sum(np.maximum(p, 0.0), axis=-1)


def measure_stepping_frequency(contact_series: np.ndarray, control_hz: float = 50.0) -> np.ndarray:
    """Per-foot stepping frequency (Hz) from measured contact onsets.

    contact_series: (T, 4) boolean.  Onsets are debounced by requiring at least
    3 consecutive swing samples before a touchdown counts.
    """
    contact = np.asarray(contact_series, dtype=bool)
    t_steps = contact.shape[0]
    freqs = np.zeros(contact.shape[1])
    for foot in range(contact.shape[1]):
        swing_run = 0
        onsets = 0
        for t in range(t_steps):
            if contact[t, foot]:
                if swing_run >= 3:
                    onsets += 1
                swing_run = 0
            else:
                swing_run += 1
        freqs[foot] = onsets / (t_steps / control_hz)
    return freqs


@dataclass
class EvalReport:
    """Per-condition rows of aggregate metrics; serializable as CSV."""

    rows: list = field(default_factory=list)

    def add(self, **kwargs) -> None:
        self.rows.append(dict(kwargs))

    def to_csv(self, path: str) -> None:
        if not self.rows:
            return
        keys = list(self.rows[0].keys())
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=keys)
            w.writeheader()
            w.writerows(self.rows)

    def column(self, key: str) -> list:
        return [r[key] for r in self.rows]


class PolicyRunner:
    """Deterministic (mean-action) policy rollout on a manual-command env."""

    def __init__(self, checkpoint_path: str, terrain: Terrain | None = None, n_envs: int = 1, seed: int = 0):
        self.ac, self.meta = ActorCritic.from_checkpoint(checkpoint_path)
        sim_cfg = SimConfig(**self.meta["sim"])
        from .rewards import RewardConfig

        reward_cfg = RewardConfig(**self.meta["rewards"])
        self.env = VecGaitEnv(
            n_envs, sim_cfg, reward_cfg, terrain=terrain or Terrain.flat(), seed=seed, auto_commands=False
        )
        self.env.reset_all()

    def set_commands(self, task: TaskCommand | np.ndarray, behavior: BehaviorCommand | np.ndarray) -> None:
        t = task.as_array() if isinstance(task, TaskCommand) else np.asarray(task)
        b = behavior.as_array() if isinstance(behavior, BehaviorCommand) else np.asarray(behavior)
        self.env.set_commands(np.broadcast_to(t, (self.env.n, 3)), np.broadcast_to(b, (self.env.n, 8)))

    def step(self):
        """One policy step; returns (action, breakdown, done, info)."""
        pol_in = self.ac.policy_input(self.env.history_flat())
        a = self.ac.act_mean(pol_in)
        breakdown, done, info = self.env.step(a)
        return a, breakdown, done, info

    def reset(self) -> None:
        self.env.reset_all()


def run_episode(
    runner: PolicyRunner,
    task,
    behavior,
    duration_s: float = 10.0,
    settle_s: float = 1.0,
    record_path: str | None = None,
):
    """Fixed-command episode (after a settle period); returns per-step traces.

    Episode ends early on failure; survived fraction is time-to-failure over
    the requested duration.  With record_path the episode is written as a
    JSONL session log (same state-frame schema as the live service) so the
    pilot UI can replay it.
    """
    runner.reset()
    runner.set_commands(task, behavior)
    hz = runner.env.sim_cfg.control_hz
    n_settle = int(settle_s * hz)
    n_steps = int(duration_s * hz)
    recorder = None
    if record_path:
        from .teleop.protocol import SessionLogWriter

        recorder = SessionLogWriter(record_path)
    traces = {
        "power": [],
        "vxy_norm": [],
        "height_err": [],
        "contact": [],
        "v_body": [],
        "survived_steps": 0,
    }
    try:
        for _ in range(n_settle):
            _, _, done, _ = runner.step()
            if np.any(done):
                return traces
        for t in range(n_steps):
            a, breakdown, done, info = runner.step()
            rep = runner.env._last_report
            traces["power"].append(float(mechanical_power(rep.torques, runner.env.sim.qd)[0]))
            traces["vxy_norm"].append(float(breakdown["vxy_tracking"][0] / WEIGHTS["vxy_tracking"]))
            obs = runner.env.sim.observables(rep)
            traces["height_err"].append(float(abs(obs["base_height"][0] - runner.env.behavior[0, 4])))
            traces["contact"].append(rep.foot_contact[0].copy())
            traces["v_body"].append(obs["v_body"][0].copy())
            traces["survived_steps"] = t + 1
            if recorder is not None:
                recorder.write(_state_record(runner, breakdown, t / hz))
            if np.any(done):
                break
    finally:
        if recorder is not None:
            recorder.close()
    return traces


def _state_record(runner: PolicyRunner, breakdown: dict, t: float) -> dict:
    """One JSONL state frame in the live-service schema."""
    from .gait import BEHAVIOR_FIELDS, TASK_FIELDS

    snap = runner.env.snapshot()
    return {
        "t": round(t, 4),
        "type": "state",
        "v": 1,
        "base_pos": snap["base_pos"][0].round(4).tolist(),
        "base_quat": snap["base_quat"][0].round(5).tolist(),
        "q": snap["q"][0].round(4).tolist(),
        "foot_contact": snap["foot_contact"][0].astype(int).tolist(),
        "foot_force_z": snap["foot_force"][0, :, 2].round(2).tolist(),
        "desired_contact": snap["desired_contact"][0].round(3).tolist(),
        "rewards": {k: round(float(breakdown[k][0]), 6) for k in WEIGHTS},
        "reward_total": round(float(breakdown["total"][0]), 6),
        "commands": {
            "task": {f: round(float(v), 4) for f, v in zip(TASK_FIELDS, snap["task_cmd"][0])},
            "behavior": {f: round(float(v), 4) for f, v in zip(BEHAVIOR_FIELDS, snap["behavior"][0])},
        },
        "sequence": None,
    }


def run_sweep(
    checkpoint_path: str,
    gaits=("trot", "pronk", "pace", "bound"),
    speeds=(0.0, 1.0, 2.0, 3.0),
    terrain_kind: str = "flat",
    seeds=(0, 1, 2),
    duration_s: float = 10.0,
    freq_hz: float = 3.0,
    max_platform_height: float = 0.08,
    record_dir: str | None = None,
) -> EvalReport:
    """Power / tracking / survival across gait x speed conditions, mean +- std over seeds.

    With record_dir, the first seed of every condition is dumped as a JSONL
    session log the pilot UI can replay."""
    report = EvalReport()
    if record_dir:
        os.makedirs(record_dir, exist_ok=True)
    for gait in gaits:
        theta = gait_preset(gait)
        for speed in speeds:
            power, vxy, surv = [], [], []
            for seed in seeds:
                terrain = (
                    Terrain.flat()
                    if terrain_kind == "flat"
                    else generate_platforms(seed=seed, max_height_m=max_platform_height)
                )
                runner = PolicyRunner(checkpoint_path, terrain=terrain, seed=seed)
                b = BehaviorCommand(theta1=theta[0], theta2=theta[1], theta3=theta[2], freq_hz=freq_hz)
                rec = None
                if record_dir and seed == seeds[0]:
                    rec = os.path.join(record_dir, f"{gait}_v{speed:.1f}_{terrain_kind}.jsonl")
                tr = run_episode(runner, TaskCommand(vx_mps=speed), b, duration_s=duration_s, record_path=rec)
                if tr["power"]:
                    power.append(np.mean(tr["power"]))
                    vxy.append(np.mean(tr["vxy_norm"]))
                surv.append(tr["survived_steps"] / (duration_s * 50.0))
            report.add(
                gait=gait,
                speed_mps=speed,
                terrain=terrain_kind,
                power_mean=float(np.mean(power)) if power else float("nan"),
                power_std=float(np.std(power)) if power else float("nan"),
                vxy_tracking_mean=float(np.mean(vxy)) if vxy else float("nan"),
                survival_fraction=float(np.mean(surv)),
                n_seeds=len(seeds),
            )
    return report


def velocity_heatmap(
    checkpoint_path: str,
    vx_values=np.arange(-3.0, 3.01, 0.5),
    wz_values=np.arange(-5.0, 5.01, 1.0),
    gait: str = "trot",
    duration_s: float = 5.0,
    seed: int = 0,
) -> tuple:
    """Grid of mean normalized xy-velocity tracking reward over (vx, wz) commands."""
    theta = gait_preset(gait)
    grid = np.zeros((len(vx_values), len(wz_values)))
    for i, vx in enumerate(vx_values):
        for j, wz in enumerate(wz_values):
            runner = PolicyRunner(checkpoint_path, seed=seed)
            b = BehaviorCommand(theta1=theta[0], theta2=theta[1], theta3=theta[2])
            tr = run_episode(runner, TaskCommand(vx_mps=float(vx), wz_radps=float(wz)), b, duration_s=duration_s)
            grid[i, j] = np.mean(tr["vxy_norm"]) if tr["vxy_norm"] else 0.0
    return grid, vx_values, wz_values


def heatmap_to_csv(path: str, grid: np.ndarray, vx_values, wz_values) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["vx\\wz"] + [f"{v:.2f}" for v in wz_values])
        for i, vx in enumerate(vx_values):
            w.writerow([f"{vx:.2f}"] + [f"{grid[i, j]:.4f}" for j in range(len(wz_values))])


# ----------------------------------------------------------- scripted sequences


@dataclass
class Schedule:
    """Timed open-loop command schedule sampled at the control rate."""

    times: np.ndarray  # (T,)
    task: np.ndarray  # (T, 3)
    behavior: np.ndarray  # (T, 8)

    def __len__(self) -> int:
        return len(self.times)


def scripted_sequence(name: str, control_hz: float = 50.0) -> Schedule:
    """Open-loop parameter schedules for the two demo maneuvers.

    leap:  accelerate to 3 m/s at a trot with a 2->4 Hz frequency ramp (2 s),
           pronk at 2 Hz for 1 s, decelerate to rest at a trot (2 s).
    dance: 90 bpm routine, 16 beats; phase offsets mix {0, 0.25, 0.5} at 1.5 and
           3 Hz with body height and velocity modulation.
    """
    dt = 1.0 / control_hz
    if name == "leap":
        t_acc, t_pronk, t_dec = 2.0, 1.0, 2.0
        times = np.arange(0.0, t_acc + t_pronk + t_dec, dt)
        task = np.zeros((len(times), 3))
        beh = np.zeros((len(times), 8))
        for i, t in enumerate(times):
            if t < t_acc:
                frac = t / t_acc
                theta = gait_preset("trot")
                v = 3.0 * frac
                f = 2.0 + 2.0 * frac
                h = 0.30
            elif t < t_acc + t_pronk:
                theta = gait_preset("pronk")
                v = 3.0
                f = 2.0
                h = 0.30
            else:
                frac = (t - t_acc - t_pronk) / t_dec
                theta = gait_preset("trot")
                v = 3.0 * (1.0 - frac)
                f = 4.0 - 2.0 * frac
                h = 0.30
            task[i] = [v, 0.0, 0.0]
            beh[i] = [theta[0], theta[1], theta[2], f, h, 0.0, 0.25, 0.09]
        return Schedule(times, task, beh)

    if name == "dance":
        bpm = 90.0
        beat = 60.0 / bpm  # 2/3 s
        # (gait, theta tweak, freq, height, vx, wz), two beats per segment
        segments = [
            ("trot", 3.0, 0.30, 0.0, 0.0),
            ("pronk", 1.5, 0.24, 0.0, 0.0),
            ("trot", 3.0, 0.34, 0.3, 0.0),
            ("pace", 1.5, 0.30, 0.0, 1.0),
            ("bound", 3.0, 0.26, -0.3, 0.0),
            ("gallop", 3.0, 0.30, 0.0, -1.0),
            ("pronk", 1.5, 0.34, 0.0, 0.0),
            ("trot", 3.0, 0.30, 0.0, 0.0),
        ]
        total = len(segments) * 2 * beat
        times = np.arange(0.0, total, dt)
        task = np.zeros((len(times), 3))
        beh = np.zeros((len(times), 8))
        for i, t in enumerate(times):
            seg = segments[min(int(t / (2 * beat)), len(segments) - 1)]
            theta = gait_preset(seg[0])
            task[i] = [seg[3], 0.0, seg[4]]
            beh[i] = [theta[0], theta[1], theta[2], seg[1], seg[2], 0.0, 0.25, 0.12]
        return Schedule(times, task, beh)

    raise ValueError(f"unknown sequence {name!r}; valid: leap, dance")


def play_schedule(runner: PolicyRunner, schedule: Schedule):
    """Run a schedule open loop; returns (positions, contacts, v_body) traces."""
    runner.reset()
    pos, contacts, vels = [], [], []
    for i in range(len(schedule)):
        runner.set_commands(schedule.task[i], schedule.behavior[i])
        _, _, done, _ = runner.step()
        pos.append(runner.env.sim.base_pos[0].copy())
        contacts.append(runner.env._last_report.foot_contact[0].copy())
        vels.append(runner.env.sim.base_linvel[0].copy())
        if np.any(done):
            break
    return np.array(pos), np.array(contacts), np.array(vels)
