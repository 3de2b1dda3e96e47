"""Observation frames and the 30-step history buffer.

Frame layout (54 float32 values, bit-exact contract for checkpoint reuse):

    [ 0: 3]  gravity direction in the torso frame (unit vector)
    [ 3:15]  joint positions minus nominal pose (rad)
    [15:27]  joint velocities * 0.05
    [27:39]  previous action (policy output, clipped to [-4, 4])
    [39:42]  task command, normalized by range: vx/3, vy/0.6, wz/5
    [42:50]  behavior command, each channel mapped to [-1, 1] over its range
    [50:54]  timing references sin(2*pi*t_foot), raw

The flattened history is oldest frame first, newest last (zero-padded until 30
steps have elapsed); the policy input appends the 4 estimator outputs:

    policy_input = [flat history (1620), estimated body velocity (3), friction (1)]
"""

from __future__ import annotations

import numpy as np

from ..gait import BEHAVIOR_FIELDS, BEHAVIOR_RANGES

FRAME_DIM = 54
HISTORY_LEN = 30
HISTORY_DIM = FRAME_DIM * HISTORY_LEN  # 1620
ESTIMATE_DIM = 4
POLICY_INPUT_DIM = HISTORY_DIM + ESTIMATE_DIM  # 1624

QD_SCALE = 0.05
TASK_SCALE = np.array([1.0 / 3.0, 1.0 / 0.6, 1.0 / 5.0], dtype=np.float32)

_B_LO = np.array([BEHAVIOR_RANGES[f][0] for f in BEHAVIOR_FIELDS], dtype=np.float32)
_B_HI = np.array([BEHAVIOR_RANGES[f][1] for f in BEHAVIOR_FIELDS], dtype=np.float32)


def build_frame(gravity_dir, dq, qd, prev_action, task_cmd, behavior, refs) -> np.ndarray:
    """(N, 54) float32 observation frame; see module docstring for the layout."""
    n = gravity_dir.shape[0]
    frame = np.empty((n, FRAME_DIM), dtype=np.float32)
    frame[:, 0:3] = gravity_dir
    frame[:, 3:15] = dq
    frame[:, 15:27] = qd * QD_SCALE
    frame[:, 27:39] = prev_action
    frame[:, 39:42] = task_cmd * TASK_SCALE
    frame[:, 42:50] = (behavior - _B_LO) / (_B_HI - _B_LO) * 2.0 - 1.0
    frame[:, 50:54] = refs
    return frame


class ObservationHistory:
    """Rolling (n_envs, 30, 54) buffer; reset environments start zero-padded."""

    def __init__(self, n_envs: int):
        self.buf = np.zeros((n_envs, HISTORY_LEN, FRAME_DIM), dtype=np.float32)

    def push(self, frame: np.ndarray) -> None:
        self.buf[:, :-1] = self.buf[:, 1:]
        self.buf[:, -1] = frame

    def reset_envs(self, idx) -> None:
        self.buf[idx] = 0.0

    def flat(self) -> np.ndarray:
        """(n_envs, 1620), oldest frame first."""
        return self.buf.reshape(self.buf.shape[0], HISTORY_DIM)


def assemble_policy_input(hist_flat: np.ndarray, estimate: np.ndarray) -> np.ndarray:
    """Concatenate flattened history (1620) and estimator output (4) -> (N, 1624)."""
    if hist_flat.shape[-1] != HISTORY_DIM:
        raise ValueError(f"history must have {HISTORY_DIM} values, got {hist_flat.shape[-1]}")
    if estimate.shape[-1] != ESTIMATE_DIM:
        raise ValueError(f"estimate must have {ESTIMATE_DIM} values, got {estimate.shape[-1]}")
    return np.concatenate([hist_flat, estimate], axis=-1, dtype=np.float32)
