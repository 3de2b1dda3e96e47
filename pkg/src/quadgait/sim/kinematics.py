"""Leg forward kinematics and point Jacobians, vectorized over (envs, legs).

Each leg: hip abduction about +x, hip flexion about +y, knee about +y.  The
abduction link offsets the thigh plane laterally by hip_link_m (sign by body
side).  Positions are in the torso frame (x forward, y left, z up), origin at
the torso center of mass.
"""

from __future__ import annotations

import numpy as np

from .config import SimConfig

# Foot order FR, FL, RR, RL; +1 = left side, -1 = right side.
SIDE_SIGN = np.array([-1.0, 1.0, -1.0, 1.0])


def hip_offsets(cfg: SimConfig) -> np.ndarray:
    """(4, 3) hip positions in the torso frame, order FR, FL, RR, RL."""
    hx, hy = cfg.hip_x_m, cfg.hip_y_m
    return np.array(
        [
            [hx, -hy, 0.0],
            [hx, hy, 0.0],
            [-hx, -hy, 0.0],
            [-hx, hy, 0.0],
        ]
    )


def leg_points(q: np.ndarray, cfg: SimConfig):
    """Knee and foot positions plus Jacobians for all four legs.

    q: (N, 12) joint angles ordered (FR, FL, RR, RL) x (abd, flex, knee).
    Returns knee (N,4,3), foot (N,4,3), J_knee (N,4,3,3), J_foot (N,4,3,3),
    all in the torso frame.
    """
    n = q.shape[0]
    qq = q.reshape(n, 4, 3)
    q1, q2, q3 = qq[..., 0], qq[..., 1], qq[..., 2]
    lt, lc, d = cfg.thigh_m, cfg.calf_m, cfg.hip_link_m
    side = SIDE_SIGN

    s1, c1 = np.sin(q1), np.cos(q1)
    s2, c2 = np.sin(q2), np.cos(q2)
    s23, c23 = np.sin(q2 + q3), np.cos(q2 + q3)

    # positions in the pre-abduction (hip) frame
    kx = -lt * s2
    ky = np.broadcast_to(side * d, kx.shape)
    kz = -lt * c2
    fx = kx - lc * s23
    fy = ky
    fz = kz - lc * c23

    def rot_x(px, py, pz):
        return px, c1 * py - s1 * pz, s1 * py + c1 * pz

    hips = hip_offsets(cfg)  # (4, 3)
    kxr, kyr, kzr = rot_x(kx, ky, kz)
    fxr, fyr, fzr = rot_x(fx, fy, fz)
    knee = np.stack([kxr, kyr, kzr], axis=-1) + hips
    foot = np.stack([fxr, fyr, fzr], axis=-1) + hips

    # Jacobian columns: d p / d q_i, rotated by the abduction
    def jac(px, py, pz, dx2, dz2, dx3, dz3):
        # d/dq1: derivative of the x-rotation
        j1 = np.stack([np.zeros_like(px), -s1 * py - c1 * pz, c1 * py - s1 * pz], axis=-1)
        j2 = np.stack([dx2, -s1 * dz2, c1 * dz2], axis=-1)
        j3 = np.stack([dx3, -s1 * dz3, c1 * dz3], axis=-1)
        return np.stack([j1, j2, j3], axis=-1)  # (N, 4, 3 xyz, 3 joints)

    dkx2, dkz2 = -lt * c2, lt * s2
    jac_knee = jac(kx, ky, kz, dkx2, dkz2, np.zeros_like(kx), np.zeros_like(kx))
    dfx2, dfz2 = -lt * c2 - lc * c23, lt * s2 + lc * s23
    dfx3, dfz3 = -lc * c23, lc * s23
    jac_foot = jac(fx, fy, fz, dfx2, dfz2, dfx3, dfz3)

    return knee, foot, jac_knee, jac_foot
