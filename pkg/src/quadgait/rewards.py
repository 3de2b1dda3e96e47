"""Per-step reward terms and the multiplicative total.

Two positive task terms (velocity tracking), six style-conditioned auxiliary
terms (contact schedule, posture, foot placement, footswing), and ten fixed
auxiliary terms (stability / smoothness / effort penalties).  Every term is
returned already weight-multiplied; the total is

    total = task_sum * exp(c_aux * aux_sum)

so the agent is always paid for task progress, scaled down when auxiliary
objectives are violated.  All functions are vectorized over environments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Weight per term.  Task terms positive, auxiliary terms negative.
WEIGHTS = {
    "vxy_tracking": 0.02,
    "yaw_tracking": 0.01,
    "swing_force": -0.08,
    "stance_velocity": -0.08,
    "body_height": -0.2,
    "body_pitch": -0.1,
    "raibert_placement": -0.2,
    "footswing_height": -0.6,
    "z_velocity": -4e-4,
    "rollpitch_velocity": -2e-5,
    "foot_slip": -8e-4,
    "collision": -0.02,
    "joint_limit": -0.2,
    "torque": -2e-5,
    "joint_velocity": -2e-5,
    "joint_acceleration": -5e-9,
    "action_rate": -2e-3,
    "action_accel": -2e-3,
}

TASK_TERMS = ("vxy_tracking", "yaw_tracking")
AUX_TERMS = tuple(k for k in WEIGHTS if k not in TASK_TERMS)
ALL_TERMS = tuple(WEIGHTS.keys())


@dataclass
class RewardConfig:
    """Tracking widths and composition coefficient (all configurable)."""

    sigma_vxy: float = 0.25  # (m/s)^2
    sigma_wz: float = 0.25  # (rad/s)^2
    # swing-force width: full penalty at static per-foot loads (~40 N) yet real
    # gradient through the final unloading phase (|f| < ~20 N)
    sigma_cf: float = 400.0  # N^2
    sigma_cv: float = 1.0  # (m/s)^2
    # coupling of auxiliary penalties into the multiplicative total.  The
    # published constant (0.02, see compose_total's default) is far too weak to
    # shape gait at desk sample counts; 10.0 makes schedule/posture terms bite.
    c_aux: float = 10.0
    # footswing apex error is only meaningful near mid-swing
    swing_gate_halfwidth: float = 0.125
    contact_force_threshold_n: float = 1.0


def task_rewards(v_xy, wz, task_cmd, cfg: RewardConfig):
    """Weighted xy-velocity and yaw-rate tracking rewards.

    v_xy: (N, 2) body-frame planar velocity; wz: (N,) yaw rate;
    task_cmd: (N, 3) commanded (vx, vy, wz).
    """
    err_v = np.sum((v_xy - task_cmd[:, :2]) ** 2, axis=-1)
    err_w = (wz - task_cmd[:, 2]) ** 2
    r_vxy = WEIGHTS["vxy_tracking"] * np.exp(-err_v / cfg.sigma_vxy)
    r_wz = WEIGHTS["yaw_tracking"] * np.exp(-err_w / cfg.sigma_wz)
    return r_vxy, r_wz


def contact_schedule_rewards(foot_forces, foot_vel_xy, desired_c, cfg: RewardConfig):
    """Schedule-tracking penalties: force during swing, foot speed during stance.

    foot_forces: (N, 4, 3) contact force per foot; foot_vel_xy: (N, 4, 2)
    ground-plane foot velocity; desired_c: (N, 4) desired contact in [0, 1].
    Both terms are zero when every foot obeys the schedule and bounded below
    by 4x the weight.
    """
    f2 = np.sum(np.asarray(foot_forces) ** 2, axis=-1)
    v2 = np.sum(np.asarray(foot_vel_xy) ** 2, axis=-1)
    r_cf = WEIGHTS["swing_force"] * np.sum((1.0 - desired_c) * (1.0 - np.exp(-f2 / cfg.sigma_cf)), axis=-1)
    r_cv = WEIGHTS["stance_velocity"] * np.sum(desired_c * (1.0 - np.exp(-v2 / cfg.sigma_cv)), axis=-1)
    return r_cf, r_cv


def swing_height_gate(phases, desired_c, cfg: RewardConfig):
    """1 where the schedule says the foot should be near its swing apex."""
    near_apex = np.abs(np.asarray(phases) - 0.75) < cfg.swing_gate_halfwidth
    return (np.asarray(desired_c) < 0.5) & near_apex


def posture_rewards(base_height, pitch, foot_heights, phases, desired_c, behavior, cfg: RewardConfig):
    """Body-height, body-pitch, and footswing-apex tracking penalties.

    base_height: (N,) height above terrain; pitch: (N,) rad;
    foot_heights: (N, 4) foot height above terrain; behavior: (N, 8).
    """
    h_cmd = behavior[:, 4]
    pitch_cmd = behavior[:, 5]
    swing_cmd = behavior[:, 7]
    r_height = WEIGHTS["body_height"] * (base_height - h_cmd) ** 2
    r_pitch = WEIGHTS["body_pitch"] * (pitch - pitch_cmd) ** 2
    gate = swing_height_gate(phases, desired_c, cfg)
    err = (foot_heights - swing_cmd[:, None]) ** 2
    r_swing = WEIGHTS["footswing_height"] * np.sum(np.where(gate, err, 0.0), axis=-1)
    return r_height, r_pitch, r_swing


def raibert_sweep(phases, freq_hz):
    """Cyclic placement sweep in seconds: (phase - 0.25)/f over stance, mirrored
    over swing so the target is continuous and periodic."""
    p = np.asarray(phases)
    stance = (p - 0.25)
    swing = (0.75 - p)
    sweep = np.where(p < 0.5, stance, swing)
    return sweep / np.asarray(freq_hz)


def raibert_targets(task_cmd, behavior, phases, hip_xy):
    """Desired ground-plane foot positions in the yaw-aligned body frame.

    Neutral-hip projection with a lateral half-stance-width offset (sign by
    body side) plus a velocity feedforward that sweeps the target through the
    cycle; yaw rate enters through each hip's lever arm.

    task_cmd: (N, 3); behavior: (N, 8); phases: (N, 4); hip_xy: (4, 2).
    Returns (N, 4, 2).
    """
    n = task_cmd.shape[0]
    side = np.array([-1.0, 1.0, -1.0, 1.0])  # FR, FL, RR, RL
    base = np.broadcast_to(hip_xy, (n, 4, 2)).copy()
    base[:, :, 1] += side * behavior[:, 6:7] / 2.0

    sweep = raibert_sweep(phases, behavior[:, 3:4])  # (N, 4) seconds
    vx = task_cmd[:, 0:1]
    vy = task_cmd[:, 1:2]
    wz = task_cmd[:, 2:3]
    # velocity of each hip under the commanded twist
    hip_vx = vx - wz * hip_xy[None, :, 1]
    hip_vy = vy + wz * hip_xy[None, :, 0]
    base[:, :, 0] += sweep * hip_vx
    base[:, :, 1] += sweep * hip_vy
    return base


def raibert_reward(foot_xy_body, targets):
    """Weighted squared placement error summed over feet and both axes."""
    err = np.sum((np.asarray(foot_xy_body) - targets) ** 2, axis=(-1, -2))
    return WEIGHTS["raibert_placement"] * err


def fixed_aux_rewards(
    v_z,
    w_xy,
    foot_vel_xy,
    stance_mask,
    collision,
    joint_limit,
    torques,
    qd,
    qdd,
    action,
    action_prev,
    action_prev2,
):
    """The ten style-independent penalty terms, each weight-multiplied.

    stance_mask gates foot slip to feet with measured contact.  collision and
    joint_limit are boolean indicators per environment.
    """
    slip = np.sum(np.sum(np.asarray(foot_vel_xy) ** 2, axis=-1) * stance_mask, axis=-1)
    terms = {
        "z_velocity": np.asarray(v_z) ** 2,
        "rollpitch_velocity": np.sum(np.asarray(w_xy) ** 2, axis=-1),
        "foot_slip": slip,
        "collision": np.asarray(collision, dtype=np.float64),
        "joint_limit": np.asarray(joint_limit, dtype=np.float64),
        "torque": np.sum(np.asarray(torques) ** 2, axis=-1),
        "joint_velocity": np.sum(np.asarray(qd) ** 2, axis=-1),
        "joint_acceleration": np.sum(np.asarray(qdd) ** 2, axis=-1),
        "action_rate": np.sum((np.asarray(action_prev) - np.asarray(action)) ** 2, axis=-1),
        "action_accel": np.sum(
            (np.asarray(action_prev2) - 2.0 * np.asarray(action_prev) + np.asarray(action)) ** 2, axis=-1
        ),
    }
    return {k: WEIGHTS[k] * v for k, v in terms.items()}


def compose_total(task_sum, aux_sum, c_aux: float = 0.02):
    """total = task_sum * exp(c_aux * aux_sum); linear in the task reward and >= 0."""
    return np.asarray(task_sum) * np.exp(c_aux * np.asarray(aux_sum))


@dataclass
class RewardInputs:
    """Everything the reward terms need for one control step (arrays over N envs)."""

    v_xy: np.ndarray  # (N, 2) body-frame planar base velocity
    v_z: np.ndarray  # (N,)
    w_xy: np.ndarray  # (N, 2) body-frame roll/pitch rates
    wz: np.ndarray  # (N,)
    base_height: np.ndarray  # (N,) above terrain
    pitch: np.ndarray  # (N,)
    foot_forces: np.ndarray  # (N, 4, 3)
    foot_vel_xy: np.ndarray  # (N, 4, 2)
    foot_heights: np.ndarray  # (N, 4) above terrain
    foot_xy_body: np.ndarray  # (N, 4, 2) yaw-aligned, relative to base
    stance_mask: np.ndarray  # (N, 4) measured contact
    collision: np.ndarray  # (N,) bool
    joint_limit: np.ndarray  # (N,) bool
    torques: np.ndarray  # (N, 12)
    qd: np.ndarray  # (N, 12)
    qdd: np.ndarray  # (N, 12)
    action: np.ndarray  # (N, 12)
    action_prev: np.ndarray
    action_prev2: np.ndarray


def compute_breakdown(
    inputs: RewardInputs,
    task_cmd: np.ndarray,
    behavior: np.ndarray,
    phases: np.ndarray,
    desired_c: np.ndarray,
    hip_xy: np.ndarray,
    cfg: RewardConfig,
) -> dict:
    """All weighted terms plus task_sum / aux_sum / total, keyed by term name."""
    out = {}
    out["vxy_tracking"], out["yaw_tracking"] = task_rewards(inputs.v_xy, inputs.wz, task_cmd, cfg)
    out["swing_force"], out["stance_velocity"] = contact_schedule_rewards(
        inputs.foot_forces, inputs.foot_vel_xy, desired_c, cfg
    )
    out["body_height"], out["body_pitch"], out["footswing_height"] = posture_rewards(
        inputs.base_height, inputs.pitch, inputs.foot_heights, phases, desired_c, behavior, cfg
    )
    targets = raibert_targets(task_cmd, behavior, phases, hip_xy)
    out["raibert_placement"] = raibert_reward(inputs.foot_xy_body, targets)
    out.update(
        fixed_aux_rewards(
            inputs.v_z,
            inputs.w_xy,
            inputs.foot_vel_xy,
            inputs.stance_mask,
            inputs.collision,
            inputs.joint_limit,
            inputs.torques,
            inputs.qd,
            inputs.qdd,
            inputs.action,
            inputs.action_prev,
            inputs.action_prev2,
        )
    )
    out["task_sum"] = sum(out[k] for k in TASK_TERMS)
    out["aux_sum"] = sum(out[k] for k in AUX_TERMS)
    out["total"] = compose_total(out["task_sum"], out["aux_sum"], cfg.c_aux)
    return out
