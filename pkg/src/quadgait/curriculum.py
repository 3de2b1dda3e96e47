"""Adaptive command sampling: a 2-D grid over (vx, yaw rate) that expands when
tracking rewards clear their thresholds, plus structured behavior sampling
(Gaussian around one of the four main gaits, everything else uniform)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gait import BEHAVIOR_RANGES, GAIT_PRESETS, TASK_RANGES, wrap_phase

MAIN_GAITS = ("pronk", "trot", "bound", "pace")


@dataclass
class CurriculumConfig:
    vx_initial: tuple = (-1.0, 1.0)
    wz_initial: tuple = (-1.0, 1.0)
    vx_max: tuple = (-3.0, 3.0)
    wz_max: tuple = (-5.0, 5.0)
    bin_size: float = 0.5
    # normalized-score thresholds: vxy tracking, yaw tracking, swing force, stance velocity
    thresholds: tuple = (0.8, 0.7, 0.95, 0.95)
    ema_coef: float = 0.2
    theta_sigma: float = 0.05  # gait-offset perturbation, wrapped
    resample_steps: tuple = (250, 500)  # mid-episode command refresh interval


class CurriculumGrid:
    """Active-bin mask over (vx, wz) with per-bin EMA of the threshold scores.

    Bins only activate adjacent to already-active bins and never deactivate, so
    the sampled region grows monotonically from the initial box to the max box.
    """

    def __init__(self, cfg: CurriculumConfig | None = None):
        self.cfg = cfg or CurriculumConfig()
        c = self.cfg
        self.n_vx = int(round((c.vx_max[1] - c.vx_max[0]) / c.bin_size))
        self.n_wz = int(round((c.wz_max[1] - c.wz_max[0]) / c.bin_size))
        self.active = np.zeros((self.n_vx, self.n_wz), dtype=bool)
        self.ema = np.zeros((self.n_vx, self.n_wz, 4))
        self.visited = np.zeros((self.n_vx, self.n_wz), dtype=bool)
        for i in range(self.n_vx):
            for j in range(self.n_wz):
                vx_lo, _ = self.bin_edges(i, j)[0]
                wz_lo, _ = self.bin_edges(i, j)[1]
                vx_hi = vx_lo + c.bin_size
                wz_hi = wz_lo + c.bin_size
                if (
                    vx_lo >= c.vx_initial[0] - 1e-9
                    and vx_hi <= c.vx_initial[1] + 1e-9
                    and wz_lo >= c.wz_initial[0] - 1e-9
                    and wz_hi <= c.wz_initial[1] + 1e-9
                ):
                    self.active[i, j] = True

    def bin_edges(self, i: int, j: int):
        c = self.cfg
        return (
            (c.vx_max[0] + i * c.bin_size, c.vx_max[0] + (i + 1) * c.bin_size),
            (c.wz_max[0] + j * c.bin_size, c.wz_max[0] + (j + 1) * c.bin_size),
        )

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    def active_extent(self):
        """((vx_lo, vx_hi), (wz_lo, wz_hi)) covered by active bins."""
        ii, jj = np.nonzero(self.active)
        c = self.cfg
        return (
            (c.vx_max[0] + ii.min() * c.bin_size, c.vx_max[0] + (ii.max() + 1) * c.bin_size),
            (c.wz_max[0] + jj.min() * c.bin_size, c.wz_max[0] + (jj.max() + 1) * c.bin_size),
        )

    def sample_task(self, rng: np.random.Generator, n: int = 1):
        """Uniform over active bins, then uniform within the bin; vy uniform in
        its fixed range.  Returns (commands (n, 3), bin indices (n, 2))."""
        ii, jj = np.nonzero(self.active)
        pick = rng.integers(0, len(ii), size=n)
        i, j = ii[pick], jj[pick]
        c = self.cfg
        vx = c.vx_max[0] + (i + rng.uniform(0.0, 1.0, size=n)) * c.bin_size
        wz = c.wz_max[0] + (j + rng.uniform(0.0, 1.0, size=n)) * c.bin_size
        vy = rng.uniform(*TASK_RANGES["vy_mps"], size=n)
        cmd = np.stack([vx, vy, wz], axis=-1)
        return cmd, np.stack([i, j], axis=-1)

    def update(self, bin_ij, scores) -> bool:
        """Fold normalized tracking scores into the bin's EMA; when every
        threshold is met, activate its 4-neighborhood (clipped to the max box).
        Returns True if any bin was newly activated."""
        i, j = int(bin_ij[0]), int(bin_ij[1])
        scores = np.asarray(scores, dtype=np.float64)
        if not self.visited[i, j]:
            self.ema[i, j] = scores
            self.visited[i, j] = True
        else:
            a = self.cfg.ema_coef
            self.ema[i, j] = (1.0 - a) * self.ema[i, j] + a * scores
        if not np.all(self.ema[i, j] >= np.asarray(self.cfg.thresholds)):
            return False
        expanded = False
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if 0 <= ni < self.n_vx and 0 <= nj < self.n_wz and not self.active[ni, nj]:
                self.active[ni, nj] = True
                expanded = True
        return expanded

    def to_csv(self, path: str) -> None:
        np.savetxt(path, self.active.astype(int), delimiter=",", fmt="%d")

    def state_arrays(self) -> dict:
        return {
            "curriculum_active": self.active.astype(np.uint8),
            "curriculum_ema": self.ema,
            "curriculum_visited": self.visited.astype(np.uint8),
        }

    def load_state_arrays(self, arrays: dict) -> None:
        self.active = arrays["curriculum_active"].astype(bool)
        self.ema = np.asarray(arrays["curriculum_ema"], dtype=np.float64)
        self.visited = arrays["curriculum_visited"].astype(bool)


def sample_behavior(rng: np.random.Generator, n: int = 1, theta_sigma: float = 0.05) -> np.ndarray:
    """(n, 8) behavior commands: one of the four main gaits plus wrapped Gaussian
    phase noise; the six scalar channels uniform within their ranges."""
    presets = np.array([GAIT_PRESETS[g] for g in MAIN_GAITS])
    pick = rng.integers(0, len(MAIN_GAITS), size=n)
    theta = presets[pick]
    if theta_sigma > 0.0:
        theta = wrap_phase(theta + rng.normal(0.0, theta_sigma, size=theta.shape))
    out = np.zeros((n, 8))
    out[:, 0:3] = theta
    for k, name in enumerate(("freq_hz", "body_height_m", "pitch_rad", "stance_width_m", "footswing_height_m")):
        lo, hi = BEHAVIOR_RANGES[name]
        out[:, 3 + k] = rng.uniform(lo, hi, size=n)
    return out


def normalized_tracking_scores(term_means: dict) -> np.ndarray:
    """Scores in [0, 1] as fractions of each term's per-step maximum: task terms
    divide by their weight; schedule terms (max 0, min -0.32) map to 1 + r/0.32."""
    from .rewards import WEIGHTS

    return np.array(
        [
            term_means["vxy_tracking"] / WEIGHTS["vxy_tracking"],
            term_means["yaw_tracking"] / WEIGHTS["yaw_tracking"],
            1.0 + term_means["swing_force"] / (abs(WEIGHTS["swing_force"]) * 4.0),
            1.0 + term_means["stance_velocity"] / (abs(WEIGHTS["stance_velocity"]) * 4.0),
        ]
    )
