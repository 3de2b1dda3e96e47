"""Heightfield terrain: flat ground and randomly placed platforms."""

from __future__ import annotations

import numpy as np


class Terrain:
    """Uniform-grid heightfield centered on the origin.

    Lookups snap to the containing cell (platform tops stay flat, edges stay
    sharp).  Queries outside the grid return the border height.
    """

    def __init__(self, heights: np.ndarray, cell_m: float):
        self.heights = np.asarray(heights, dtype=np.float64)
        self.cell_m = float(cell_m)
        ny, nx = self.heights.shape
        self.origin_x = -nx * cell_m / 2.0
        self.origin_y = -ny * cell_m / 2.0

    @classmethod
    def flat(cls, extent_m: float = 20.0, cell_m: float = 0.05) -> "Terrain":
        n = max(2, int(round(extent_m / cell_m)))
        return cls(np.zeros((n, n)), cell_m)

    @property
    def is_flat(self) -> bool:
        return bool(np.all(self.heights == 0.0))

    def height_at(self, x, y):
        """Terrain height under world (x, y); broadcasts over array inputs."""
        if self.is_flat:
            return np.zeros_like(np.asarray(x, dtype=np.float64))
        ix = np.clip(((np.asarray(x) - self.origin_x) / self.cell_m).astype(np.int64), 0, self.heights.shape[1] - 1)
        iy = np.clip(((np.asarray(y) - self.origin_y) / self.cell_m).astype(np.int64), 0, self.heights.shape[0] - 1)
        return self.heights[iy, ix]

    def to_csv(self, path: str) -> None:
        np.savetxt(path, self.heights, delimiter=",", fmt="%.4f")

    @classmethod
    def from_csv(cls, path: str, cell_m: float) -> "Terrain":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2), cell_m)


def generate_platforms(
    seed: int,
    extent_m: float = 12.0,
    max_height_m: float = 0.16,
    density: float = 0.35,
    cell_m: float = 0.05,
    clear_radius_m: float = 0.7,
) -> Terrain:
    """Non-overlapping rectangular platforms with uniform heights in [0, max].

    density is the target fraction of the arena covered.  A disk around the
    origin is kept clear so episodes start on level ground.
    """
    rng = np.random.default_rng(seed)
    terrain = Terrain.flat(extent_m, cell_m)
    if max_height_m <= 0.0:
        return terrain
    heights = terrain.heights
    n = heights.shape[0]
    target_cells = density * n * n
    covered = 0
    placed = []
    attempts = 0
    while covered < target_cells and attempts < 4000:
        attempts += 1
        sx = rng.uniform(0.4, 1.2)
        sy = rng.uniform(0.4, 1.2)
        cx = rng.uniform(-extent_m / 2 + sx, extent_m / 2 - sx)
        cy = rng.uniform(-extent_m / 2 + sy, extent_m / 2 - sy)
        h = rng.uniform(0.0, max_height_m)
        if abs(cx) < clear_radius_m + sx / 2 and abs(cy) < clear_radius_m + sy / 2:
            continue
        rect = (cx - sx / 2, cy - sy / 2, cx + sx / 2, cy + sy / 2)
        if any(not (rect[2] < r[0] or rect[0] > r[2] or rect[3] < r[1] or rect[1] > r[3]) for r in placed):
            continue
        placed.append(rect)
        i0 = int((rect[1] - terrain.origin_y) / cell_m)
        i1 = int((rect[3] - terrain.origin_y) / cell_m)
        j0 = int((rect[0] - terrain.origin_x) / cell_m)
        j1 = int((rect[2] - terrain.origin_x) / cell_m)
        heights[max(i0, 0) : min(i1, n), max(j0, 0) : min(j1, n)] = h
        covered += (i1 - i0) * (j1 - j0)
    return Terrain(heights, cell_m)
