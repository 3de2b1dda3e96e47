"""Vectorized training/evaluation environment.

Couples the simulator with the gait clock, reward terms, command curriculum,
and observation history.  Actions are position-target offsets around the
nominal pose; desired contact states advance first, then the reward is
evaluated against the new state.

Two command modes:
  * auto (training): task commands from the curriculum grid, behavior commands
    from the structured sampler, refreshed mid-episode and on reset; episode
    tracking stats feed curriculum updates.
  * manual (eval/teleop): commands held until set_commands() is called.
"""

from __future__ import annotations

import numpy as np

from ..curriculum import CurriculumConfig, CurriculumGrid, normalized_tracking_scores, sample_behavior
from ..gait import desired_contact, foot_phases, timing_references, wrap_phase, DEFAULT_SMOOTHING_SIGMA
from ..rewards import RewardConfig, RewardInputs, compute_breakdown
from ..sim import QuadrupedSim, SimConfig, Terrain, termination_check
from ..sim.kinematics import hip_offsets
from .history import ObservationHistory, build_frame

ACTION_SCALE = 0.25  # rad of joint target per action unit
ACTION_CLIP = 4.0

TRACK_TERMS = ("vxy_tracking", "yaw_tracking", "swing_force", "stance_velocity")


class VecGaitEnv:
    def __init__(
        self,
        n_envs: int,
        sim_cfg: SimConfig | None = None,
        reward_cfg: RewardConfig | None = None,
        cur_cfg: CurriculumConfig | None = None,
        terrain: Terrain | None = None,
        seed: int = 0,
        auto_commands: bool = True,
    ):
        self.n = n_envs
        self.sim_cfg = sim_cfg or SimConfig()
        self.reward_cfg = reward_cfg or RewardConfig()
        self.cur_cfg = cur_cfg or CurriculumConfig()
        self.rng = np.random.default_rng(seed)
        self.sim = QuadrupedSim(n_envs, self.sim_cfg, terrain or Terrain.flat(), seed=seed)
        self.grid = CurriculumGrid(self.cur_cfg)
        self.auto_commands = auto_commands

        self.task_cmd = np.zeros((n_envs, 3))
        self.behavior = np.tile(np.array([0.5, 0.0, 0.0, 3.0, 0.30, 0.0, 0.25, 0.09]), (n_envs, 1))
        self.clock_t = np.zeros(n_envs)
        self.phases = foot_phases(self.clock_t, *self.behavior[:, 0:3].T)
        self.desired_c = desired_contact(self.phases)
        self.smoothing_sigma = DEFAULT_SMOOTHING_SIGMA

        self.action_prev = np.zeros((n_envs, 12))
        self.action_prev2 = np.zeros((n_envs, 12))
        self.ep_steps = np.zeros(n_envs, dtype=np.int64)
        self.resample_at = np.full(n_envs, 10**9, dtype=np.int64)
        self.bin_ij = np.zeros((n_envs, 2), dtype=np.int64)
        self.track_acc = np.zeros((n_envs, 4))
        self.track_n = np.zeros(n_envs, dtype=np.int64)

        self.history = ObservationHistory(n_envs)
        self.hip_xy = hip_offsets(self.sim_cfg)[:, :2]
        self.episode_count = 0
        self._last_report = None
        self.reset_all()

    # --------------------------------------------------------------- commands

    def _draw_resample_interval(self, m: int):
        lo, hi = self.cur_cfg.resample_steps
        return self.rng.integers(lo, hi + 1, size=m)

    def _sample_commands(self, idx) -> None:
        m = len(idx)
        cmd, bins = self.grid.sample_task(self.rng, m)
        self.task_cmd[idx] = cmd
        self.bin_ij[idx] = bins
        self.behavior[idx] = sample_behavior(self.rng, m, self.cur_cfg.theta_sigma)
        self.track_acc[idx] = 0.0
        self.track_n[idx] = 0

    def set_commands(self, task_cmd, behavior, idx=None) -> None:
        """Manual command injection (teleop/eval); applies before the next step."""
        idx = np.arange(self.n) if idx is None else np.atleast_1d(idx)
        self.task_cmd[idx] = task_cmd
        self.behavior[idx] = behavior

    def _flush_curriculum(self, idx) -> None:
        for i in np.atleast_1d(idx):
            if self.track_n[i] == 0:
                continue
            means = {k: self.track_acc[i, j] / self.track_n[i] for j, k in enumerate(TRACK_TERMS)}
            self.grid.update(self.bin_ij[i], normalized_tracking_scores(means))

    # ----------------------------------------------------------------- resets

    def reset_all(self) -> None:
        self._reset_envs(np.arange(self.n))

    def _reset_envs(self, idx) -> None:
        idx = np.atleast_1d(idx)
        if len(idx) == 0:
            return
        self.sim.reset_envs(idx, self.rng, sample_params=True)
        self.clock_t[idx] = 0.0
        self.ep_steps[idx] = 0
        self.action_prev[idx] = 0.0
        self.action_prev2[idx] = 0.0
        self.history.reset_envs(idx)
        self.episode_count += len(idx)
        if self.auto_commands:
            self._sample_commands(idx)
            self.resample_at[idx] = self._draw_resample_interval(len(idx))
        ph = foot_phases(self.clock_t[idx], *self.behavior[idx, 0:3].T)
        self.phases[idx] = ph
        self.desired_c[idx] = desired_contact(ph, self.smoothing_sigma)

    # ------------------------------------------------------------------- step

    def step(self, actions: np.ndarray):
        """Returns (breakdown, done, info).  breakdown['total'] is the scalar
        per-env reward; info carries timeout masks and terminal histories for
        bootstrap-aware advantage estimation."""
        a = np.clip(np.asarray(actions, dtype=np.float64), -ACTION_CLIP, ACTION_CLIP)
        targets = self.sim_cfg.nominal_joint_pos + ACTION_SCALE * a
        report = self.sim.step(targets)
        self._last_report = report

        # schedule first: advance the clock, then evaluate the new state against it
        self.clock_t = wrap_phase(self.clock_t + self.behavior[:, 3] / self.sim_cfg.control_hz)
        self.phases = foot_phases(self.clock_t, *self.behavior[:, 0:3].T)
        self.desired_c = desired_contact(self.phases, self.smoothing_sigma)

        obs = self.sim.observables(report)
        inputs = RewardInputs(
            v_xy=obs["v_body"][:, 0:2],
            v_z=self.sim.base_linvel[:, 2],
            w_xy=obs["w_body"][:, 0:2],
            wz=obs["w_body"][:, 2],
            base_height=obs["base_height"],
            pitch=obs["pitch"],
            foot_forces=report.foot_force_w,
            foot_vel_xy=report.foot_vel_w[..., 0:2],
            foot_heights=obs["foot_heights"],
            foot_xy_body=obs["foot_xy_body"],
            stance_mask=report.foot_contact,
            collision=report.collision,
            joint_limit=report.joint_limit_hit,
            torques=report.torques,
            qd=self.sim.qd,
            qdd=report.qdd,
            action=a,
            action_prev=self.action_prev,
            action_prev2=self.action_prev2,
        )
        breakdown = compute_breakdown(
            inputs, self.task_cmd, self.behavior, self.phases, self.desired_c, self.hip_xy, self.reward_cfg
        )

        self.ep_steps += 1
        elapsed = self.ep_steps / self.sim_cfg.control_hz
        failed, timeout = termination_check(self.sim, elapsed, report)
        done = failed | timeout

        for j, k in enumerate(TRACK_TERMS):
            self.track_acc[:, j] += breakdown[k]
        self.track_n += 1

        # shift the action history, then write the post-step frame
        self.action_prev2 = self.action_prev
        self.action_prev = a
        frame = build_frame(
            obs["gravity_dir_body"],
            obs["q_measured"] - self.sim_cfg.nominal_joint_pos,
            self.sim.qd,
            a,
            self.task_cmd,
            self.behavior,
            timing_references(self.phases),
        )
        self.history.push(frame)

        info = {"timeout": timeout & ~failed, "failed": failed}
        done_idx = np.nonzero(done)[0]
        if len(done_idx) > 0:
            info["terminal_idx"] = done_idx
            info["terminal_hist"] = self.history.flat()[done_idx].copy()
            if self.auto_commands:
                self._flush_curriculum(done_idx)
            self._reset_envs(done_idx)
            # replace terminal frames with the fresh post-reset observation
            self._push_reset_frames(done_idx)

        if self.auto_commands:
            due = np.nonzero(~done & (self.ep_steps >= self.resample_at))[0]
            if len(due) > 0:
                self._flush_curriculum(due)
                self._sample_commands(due)
                self.resample_at[due] = self.ep_steps[due] + self._draw_resample_interval(len(due))

        return breakdown, done, info

    def _push_reset_frames(self, idx) -> None:
        """Seed the (zeroed) history of freshly reset envs with their first frame."""
        rep = self.sim
        ground = rep.terrain.height_at(rep.base_pos[idx, 0], rep.base_pos[idx, 1])
        g_body = rep.gravity_body()[idx]
        g_dir = g_body / np.maximum(np.linalg.norm(g_body, axis=-1, keepdims=True), 1e-9)
        frame = build_frame(
            g_dir,
            (rep.q[idx] + rep.params.joint_calibration_rad[idx]) - self.sim_cfg.nominal_joint_pos,
            rep.qd[idx],
            self.action_prev[idx],
            self.task_cmd[idx],
            self.behavior[idx],
            timing_references(self.phases[idx]),
        )
        self.history.buf[idx, -1] = frame

    # ------------------------------------------------------------ observation

    def history_flat(self) -> np.ndarray:
        return self.history.flat()

    def estimator_targets(self) -> np.ndarray:
        """(N, 4) privileged targets: body-frame linear velocity and ground friction."""
        from ..sim.rotations import quat_rotate_inverse

        v_body = quat_rotate_inverse(self.sim.base_quat, self.sim.base_linvel)
        return np.concatenate([v_body, self.sim.params.friction[:, None]], axis=-1).astype(np.float32)

    def snapshot(self) -> dict:
        """Lightweight state view for telemetry (single- or multi-env)."""
        report = self._last_report
        obs = self.sim.observables(report) if report is not None else None
        return {
            "base_pos": self.sim.base_pos.copy(),
            "base_quat": self.sim.base_quat.copy(),
            "q": self.sim.q.copy(),
            "foot_contact": report.foot_contact.copy() if report is not None else np.zeros((self.n, 4), bool),
            "foot_force": report.foot_force_w.copy() if report is not None else np.zeros((self.n, 4, 3)),
            "foot_pos_w": report.foot_pos_w.copy() if report is not None else np.zeros((self.n, 4, 3)),
            "desired_contact": self.desired_c.copy(),
            "phases": self.phases.copy(),
            "task_cmd": self.task_cmd.copy(),
            "behavior": self.behavior.copy(),
            "base_height": obs["base_height"].copy() if obs else None,
            "v_body": obs["v_body"].copy() if obs else None,
        }
