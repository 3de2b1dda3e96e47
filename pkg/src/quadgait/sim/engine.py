"""Vectorized rigid-body quadruped simulator.

Model: the torso is a single rigid body carrying the leg point masses (lumped
at knees and feet); the 12 joints integrate against a reflected inertia and
couple to the base through contact forces and point-mass gravity loads.
Contacts are points (4 feet, 4 knees, 4 torso corners) against a heightfield,
with spring-damper normal forces and anchored Coulomb friction clamped to the
cone every substep.  Restitution scales the normal damping down (e=1 bounces,
e=0 sticks).

Integration: base linear state uses the constant-acceleration form
(x += v dt + a dt^2 / 2) so free flight is exact; joints and base rotation are
semi-implicit Euler at substep rate.  Joint position targets are applied with
a fixed latency of one control step.

All N environments step in lockstep with no cross-environment state; a single
step() call is deterministic given the state arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .kinematics import hip_offsets, leg_points
from .rotations import (
    quat_from_rotvec,
    quat_identity,
    quat_mul,
    quat_normalize,
    quat_rotate,
    quat_rotate_inverse,
    rpy_from_quat,
    yaw_from_quat,
    yaw_rotate_inverse_xy,
)
from .terrain import Terrain

# Randomization ranges for the sampled dynamics parameters.
DOMAIN_RANGES = {
    "payload_kg": (-1.0, 3.0),
    "motor_strength": (0.90, 1.10),
    "joint_calibration_rad": (-0.02, 0.02),
    "friction": (0.40, 1.00),
    "restitution": (0.00, 1.00),
    "gravity_offset_mps2": (-1.0, 1.0),
}


@dataclass
class DomainParams:
    """Per-environment dynamics randomization (struct of arrays)."""

    payload_kg: np.ndarray  # (N,)
    motor_strength: np.ndarray  # (N, 12)
    joint_calibration_rad: np.ndarray  # (N, 12)
    friction: np.ndarray  # (N,)
    restitution: np.ndarray  # (N,)
    gravity_offset_mps2: np.ndarray  # (N, 3)

    @classmethod
    def nominal(cls, n: int) -> "DomainParams":
        return cls(
            payload_kg=np.zeros(n),
            motor_strength=np.ones((n, 12)),
            joint_calibration_rad=np.zeros((n, 12)),
            friction=np.full(n, 0.8),
            restitution=np.zeros(n),
            gravity_offset_mps2=np.zeros((n, 3)),
        )

    @classmethod
    def sample(cls, n: int, rng: np.random.Generator) -> "DomainParams":
        r = DOMAIN_RANGES
        return cls(
            payload_kg=rng.uniform(*r["payload_kg"], size=n),
            motor_strength=rng.uniform(*r["motor_strength"], size=(n, 12)),
            joint_calibration_rad=rng.uniform(*r["joint_calibration_rad"], size=(n, 12)),
            friction=rng.uniform(*r["friction"], size=n),
            restitution=rng.uniform(*r["restitution"], size=n),
            gravity_offset_mps2=rng.uniform(*r["gravity_offset_mps2"], size=(n, 3)),
        )

    def assign(self, idx, other: "DomainParams", other_idx) -> None:
        for name in vars(self):
            getattr(self, name)[idx] = getattr(other, name)[other_idx]


@dataclass
class StepReport:
    """Per-control-step outputs the environment layer consumes."""

    foot_pos_w: np.ndarray  # (N, 4, 3)
    foot_vel_w: np.ndarray  # (N, 4, 3)
    foot_force_w: np.ndarray  # (N, 4, 3)
    foot_contact: np.ndarray  # (N, 4) bool, measured
    torques: np.ndarray  # (N, 12) applied at the last substep
    qdd: np.ndarray  # (N, 12) mean joint acceleration over the step
    collision: np.ndarray  # (N,) bool: knee or torso point touched ground
    base_contact: np.ndarray  # (N,) bool: torso box itself touched ground
    joint_limit_hit: np.ndarray  # (N,) bool
    friction_residual: np.ndarray  # (N,) max |f_t| - mu f_n seen during the step
    nonfinite: np.ndarray  # (N,) bool: state blew up, env needs reset


class QuadrupedSim:
    def __init__(self, n_envs: int, cfg: SimConfig | None = None, terrain: Terrain | None = None, seed: int = 0):
        self.cfg = cfg or SimConfig()
        self.terrain = terrain or Terrain.flat()
        self.n = n_envs
        n = n_envs

        self.base_pos = np.zeros((n, 3))
        self.base_quat = quat_identity(n)
        self.base_linvel = np.zeros((n, 3))  # world frame
        self.base_angvel = np.zeros((n, 3))  # body frame
        self.q = np.tile(self.cfg.nominal_joint_pos, (n, 1))
        self.qd = np.zeros((n, 12))

        self.params = DomainParams.nominal(n)
        self._target_buf = np.tile(self.cfg.nominal_joint_pos, (n, 1))  # latency buffer
        self.last_torques = np.zeros((n, 12))

        # 16 contact points: feet [0:4], knees [4:8], torso box corners [8:16]
        self._anchor_xy = np.zeros((n, 16, 2))
        self._anchor_active = np.zeros((n, 16), dtype=bool)

        self._hips = hip_offsets(self.cfg)
        cx, cy = self.cfg.torso_size_x_m / 2, self.cfg.torso_size_y_m / 2
        cz = self.cfg.torso_size_z_m / 2
        self._corners = np.array(
            [[sx * cx, sy * cy, sz * cz] for sx in (1, -1) for sy in (1, -1) for sz in (-1, 1)]
        )

        rng = np.random.default_rng(seed)
        self.reset_envs(np.arange(n), rng, sample_params=False, pose_noise=False)

    # ------------------------------------------------------------------ reset

    def reset_envs(self, idx, rng: np.random.Generator, sample_params: bool = True, pose_noise: bool = True) -> None:
        idx = np.atleast_1d(idx)
        m = len(idx)
        if m == 0:
            return
        if sample_params:
            fresh = DomainParams.sample(m, rng)
            self.params.assign(idx, fresh, np.arange(m))

        q = np.tile(self.cfg.nominal_joint_pos, (m, 1))
        z0 = self.terrain.height_at(np.zeros(m), np.zeros(m)) + self.cfg.nominal_height_m + 0.005
        pos = np.zeros((m, 3))
        pos[:, 2] = z0
        quat = quat_identity(m)
        if pose_noise:
            q += rng.uniform(-0.05, 0.05, size=(m, 12))
            pos[:, 2] += rng.uniform(0.0, 0.02, size=m)
            tilt = rng.uniform(-0.03, 0.03, size=(m, 3))
            tilt[:, 2] = 0.0
            quat = quat_normalize(quat_mul(quat, quat_from_rotvec(tilt)))

        self.q[idx] = q
        self.qd[idx] = 0.0
        self.base_pos[idx] = pos
        self.base_quat[idx] = quat
        self.base_linvel[idx] = 0.0
        self.base_angvel[idx] = 0.0
        self._target_buf[idx] = self.cfg.nominal_joint_pos
        self.last_torques[idx] = 0.0
        self._anchor_active[idx] = False
        self._anchor_xy[idx] = 0.0

    # ------------------------------------------------------------------- step

    @property
    def gravity_eff(self) -> np.ndarray:
        g = np.zeros((self.n, 3))
        g[:, 2] = -self.cfg.gravity_mps2
        return g + self.params.gravity_offset_mps2

    @property
    def total_mass(self) -> np.ndarray:
        return self.cfg.total_mass_kg + self.params.payload_kg

    def gravity_body(self) -> np.ndarray:
        """Effective gravity vector expressed in the torso frame (not normalized)."""
        return quat_rotate_inverse(self.base_quat, self.gravity_eff)

    def step(self, joint_targets: np.ndarray) -> StepReport:
        """Advance one control step.  Applies the previous step's targets (one
        control step of latency), then integrates cfg.substeps physics substeps."""
        cfg = self.cfg
        if cfg.latency_steps > 0:
            applied = self._target_buf.copy()
            self._target_buf[:] = joint_targets
        else:
            applied = np.asarray(joint_targets, dtype=np.float64)

        dt = cfg.dt_sub
        inertia = cfg.base_inertia
        m_tot = self.total_mass[:, None]
        g_eff = self.gravity_eff
        kn, cn = cfg.contact_kn, cfg.contact_cn
        kt, ct = cfg.friction_kt, cfg.friction_ct
        cn_eff = cn * (1.0 - self.params.restitution)[:, None]
        mu = self.params.friction[:, None]

        collision = np.zeros(self.n, dtype=bool)
        base_contact = np.zeros(self.n, dtype=bool)
        limit_hit = np.zeros(self.n, dtype=bool)
        fric_residual = np.full(self.n, -np.inf)
        qd_start = self.qd.copy()

        for _ in range(cfg.substeps):
            q_meas = self.q + self.params.joint_calibration_rad
            tau = self.params.motor_strength * (cfg.kp * (applied - q_meas) - cfg.kd * self.qd)
            tau = np.clip(tau, -cfg.torque_limit_nm, cfg.torque_limit_nm)

            knee_b, foot_b, jac_knee, jac_foot = leg_points(self.q, cfg)
            points_b = np.concatenate([foot_b, knee_b, np.broadcast_to(self._corners, (self.n, 8, 3))], axis=1)

            # world-frame positions and velocities of every contact point
            points_w = self.base_pos[:, None, :] + quat_rotate(self.base_quat[:, None, :], points_b)
            qd_leg = self.qd.reshape(self.n, 4, 3)
            v_joint_foot = np.einsum("nlxj,nlj->nlx", jac_foot, qd_leg)
            v_joint_knee = np.einsum("nlxj,nlj->nlx", jac_knee, qd_leg)
            v_joint = np.concatenate([v_joint_foot, v_joint_knee, np.zeros((self.n, 8, 3))], axis=1)
            v_rot = np.cross(self.base_angvel[:, None, :], points_b) + v_joint
            points_v = self.base_linvel[:, None, :] + quat_rotate(self.base_quat[:, None, :], v_rot)

            # normal force (spring-damper, no suction)
            ground = self.terrain.height_at(points_w[..., 0], points_w[..., 1])
            pen = ground - points_w[..., 2]
            in_contact = pen > 0.0
            fn = kn * pen - cn_eff * points_v[..., 2]
            fn = np.where(in_contact, np.maximum(fn, 0.0), 0.0)

            # anchored Coulomb friction, clamped to the cone
            new_contact = in_contact & ~self._anchor_active
            self._anchor_xy[new_contact] = points_w[..., :2][new_contact]
            self._anchor_active[:] = in_contact
            ft = -kt * (points_w[..., :2] - self._anchor_xy) - ct * points_v[..., :2]
            ft = np.where(in_contact[..., None], ft, 0.0)
            ft_norm = np.linalg.norm(ft, axis=-1)
            lim = mu * fn
            over = ft_norm > lim
            scale = np.where(over, lim / np.maximum(ft_norm, 1e-12), 1.0)
            ft = ft * scale[..., None]
            # slide the anchor so the spring matches the clamped force
            slid = over & in_contact
            if np.any(slid):
                target = points_w[..., :2] + (ft + ct * points_v[..., :2]) / kt
                self._anchor_xy[slid] = target[slid]
            fric_residual = np.maximum(fric_residual, np.max(np.linalg.norm(ft, axis=-1) - lim, axis=-1))

            f_world = np.concatenate([ft, fn[..., None]], axis=-1)
            collision |= np.any(in_contact[:, 4:], axis=1)
            base_contact |= np.any(in_contact[:, 8:], axis=1)

            # wrench on the base
            force = np.sum(f_world, axis=1) + m_tot * g_eff
            f_body = quat_rotate_inverse(self.base_quat[:, None, :], f_world)
            torque_b = np.sum(np.cross(points_b, f_body), axis=1)

            # joint dynamics: PD + contact + point-mass gravity - damping
            g_b = quat_rotate_inverse(self.base_quat, g_eff)
            tau_c = np.einsum("nlxj,nlx->nlj", jac_foot, f_body[:, 0:4]) + np.einsum(
                "nlxj,nlx->nlj", jac_knee, f_body[:, 4:8]
            )
            tau_g = cfg.foot_mass_kg * np.einsum("nlxj,nx->nlj", jac_foot, g_b) + cfg.knee_mass_kg * np.einsum(
                "nlxj,nx->nlj", jac_knee, g_b
            )
            qdd = (tau + (tau_c + tau_g).reshape(self.n, 12) - cfg.joint_damping * self.qd) / cfg.joint_reflected_inertia
            self.qd += qdd * dt
            # dry transmission friction as an impulse clamp: exact stop below the
            # breakaway increment, constant drag above it (finite-time settling)
            dvf = cfg.joint_friction_nm * dt / cfg.joint_reflected_inertia
            self.qd -= np.clip(self.qd, -dvf, dvf)
            self.qd = np.clip(self.qd, -60.0, 60.0)
            self.q += self.qd * dt

            lo, hi = cfg.joint_lower, cfg.joint_upper
            over_lim = (self.q < lo) | (self.q > hi)
            if np.any(over_lim):
                self.qd = np.where(over_lim, 0.0, self.qd)
                self.q = np.clip(self.q, lo, hi)
                limit_hit |= np.any(over_lim, axis=1)

            # base linear: semi-implicit (symplectic against contact springs); in
            # free flight add the constant-acceleration position term so ballistic
            # motion matches the closed form exactly
            acc = force / m_tot
            self.base_linvel += acc * dt
            airborne = ~np.any(fn > 0.0, axis=1)
            self.base_pos += self.base_linvel * dt
            self.base_pos -= np.where(airborne[:, None], 0.5 * g_eff * dt * dt, 0.0)

            # base angular (body frame): Euler's equation, semi-implicit
            w = self.base_angvel
            wdot = (torque_b - np.cross(w, w * inertia) - cfg.base_angular_damping * w) / inertia
            self.base_angvel = w + wdot * dt
            self.base_quat = quat_normalize(quat_mul(self.base_quat, quat_from_rotvec(self.base_angvel * dt)))

            self.last_torques = tau

        # release anchors for points that ended the step airborne
        qdd_step = (self.qd - qd_start) / cfg.dt_control

        finite = (
            np.isfinite(self.base_pos).all(axis=1)
            & np.isfinite(self.base_linvel).all(axis=1)
            & np.isfinite(self.q).all(axis=1)
            & np.isfinite(self.qd).all(axis=1)
        )

        return StepReport(
            foot_pos_w=points_w[:, 0:4],
            foot_vel_w=points_v[:, 0:4],
            foot_force_w=f_world[:, 0:4],
            foot_contact=fn[:, 0:4] > 1.0,
            torques=self.last_torques.copy(),
            qdd=qdd_step,
            collision=collision,
            base_contact=base_contact,
            joint_limit_hit=limit_hit,
            friction_residual=fric_residual,
            nonfinite=~finite,
        )

    # ------------------------------------------------------------ observables

    def observables(self, report: StepReport) -> dict:
        """Derived state the reward/observation layers consume, one dict per step."""
        roll, pitch, yaw = rpy_from_quat(self.base_quat)
        v_body = quat_rotate_inverse(self.base_quat, self.base_linvel)
        ground = self.terrain.height_at(self.base_pos[:, 0], self.base_pos[:, 1])
        foot_ground = self.terrain.height_at(report.foot_pos_w[..., 0], report.foot_pos_w[..., 1])
        rel = report.foot_pos_w[..., :2] - self.base_pos[:, None, :2]
        foot_xy_body = yaw_rotate_inverse_xy(yaw[:, None], rel)
        g_body = self.gravity_body()
        g_dir = g_body / np.maximum(np.linalg.norm(g_body, axis=-1, keepdims=True), 1e-9)
        return {
            "roll": roll,
            "pitch": pitch,
            "yaw": yaw,
            "v_body": v_body,
            "w_body": self.base_angvel.copy(),
            "base_height": self.base_pos[:, 2] - ground,
            "foot_heights": report.foot_pos_w[..., 2] - foot_ground,
            "foot_xy_body": foot_xy_body,
            "gravity_dir_body": g_dir,
            "q_measured": self.q + self.params.joint_calibration_rad,
        }


def termination_check(sim: QuadrupedSim, elapsed_s: np.ndarray, report: StepReport | None = None):
    """(failed, timeout) masks: body too low or too tilted, or the episode clock ran out."""
    cfg = sim.cfg
    roll, pitch, _ = rpy_from_quat(sim.base_quat)
    ground = sim.terrain.height_at(sim.base_pos[:, 0], sim.base_pos[:, 1])
    clearance = sim.base_pos[:, 2] - ground
    failed = (
        (clearance < cfg.min_base_clearance_m)
        | (np.abs(roll) > cfg.max_roll_pitch_rad)
        | (np.abs(pitch) > cfg.max_roll_pitch_rad)
    )
    if report is not None:
        failed |= report.nonfinite | report.base_contact
    timeout = np.asarray(elapsed_s) >= cfg.episode_length_s
    return failed, timeout
