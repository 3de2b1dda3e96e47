import numpy as np
import pytest

from quadgait.curriculum import (
    CurriculumConfig,
    CurriculumGrid,
    MAIN_GAITS,
    normalized_tracking_scores,
    sample_behavior,
)
from quadgait.gait import GAIT_PRESETS

PASSING = (0.85, 0.75, 0.96, 0.96)


def all_pass_round(grid):
    """One synchronized update round: every active bin reports passing scores."""
    for i, j in zip(*np.nonzero(grid.active.copy())):
        grid.update((i, j), PASSING)


def test_initial_region():
    g = CurriculumGrid()
    ext = g.active_extent()
    assert ext[0] == (-1.0, 1.0)
    assert ext[1] == (-1.0, 1.0)
    assert g.n_active == 16  # 4 x 4 bins at 0.5


def test_samples_within_active_region():
    g = CurriculumGrid()
    rng = np.random.default_rng(0)
    cmd, bins = g.sample_task(rng, 10000)
    assert cmd[:, 0].min() >= -1.0 and cmd[:, 0].max() <= 1.0
    assert cmd[:, 2].min() >= -1.0 and cmd[:, 2].max() <= 1.0
    assert cmd[:, 1].min() >= -0.6 and cmd[:, 1].max() <= 0.6


def test_update_activates_neighbors():
    g = CurriculumGrid()
    before = g.n_active
    # corner bin of the active block: two of its four neighbors are inactive
    expanded = g.update((4, 8), PASSING)
    assert expanded
    assert g.n_active == before + 2
    assert g.active[3, 8] and g.active[4, 7]


def test_update_below_threshold_no_change():
    g = CurriculumGrid()
    before = g.active.copy()
    assert not g.update((4, 8), (0.79, 0.9, 1.0, 1.0))
    assert np.array_equal(g.active, before)


def test_expansion_clipped_at_bounds():
    g = CurriculumGrid()
    for _ in range(30):
        all_pass_round(g)
    ext = g.active_extent()
    assert ext[0] == (-3.0, 3.0)
    assert ext[1] == (-5.0, 5.0)
    assert g.n_active == g.n_vx * g.n_wz


def test_monotone_growth():
    g = CurriculumGrid()
    rng = np.random.default_rng(1)
    prev = g.active.copy()
    for _ in range(200):
        i = rng.integers(0, g.n_vx)
        j = rng.integers(0, g.n_wz)
        g.update((i, j), rng.uniform(0, 1, 4))
        assert np.all(g.active >= prev)  # never shrinks
        prev = g.active.copy()


def test_full_extent_after_exact_rounds():
    # vx needs (3-1)/0.5 = 4 expansions per side; wz needs (5-1)/0.5 = 8
    g = CurriculumGrid()
    for k in range(8):
        vx_full = g.active_extent()[0] == (-3.0, 3.0)
        wz_full = g.active_extent()[1] == (-5.0, 5.0)
        assert vx_full == (k >= 4)
        assert not wz_full
        all_pass_round(g)
    assert g.active_extent() == ((-3.0, 3.0), (-5.0, 5.0))


def test_ema_gates_expansion():
    cfg = CurriculumConfig()
    g = CurriculumGrid(cfg)
    b = (4, 8)
    g.update(b, (0.0, 0.0, 0.0, 0.0))  # first visit pins the EMA low
    before = g.n_active
    g.update(b, PASSING)  # one passing report can't clear the EMA yet
    assert g.n_active == before
    for _ in range(40):
        g.update(b, (1.0, 1.0, 1.0, 1.0))
    assert g.n_active > before


def test_sample_behavior_ranges():
    rng = np.random.default_rng(0)
    b = sample_behavior(rng, 10000)
    assert b[:, 3].min() >= 1.5 and b[:, 3].max() <= 4.0  # freq
    assert b[:, 4].min() >= 0.10 and b[:, 4].max() <= 0.45  # height
    assert b[:, 5].min() >= -0.4 and b[:, 5].max() <= 0.4  # pitch
    assert b[:, 6].min() >= 0.05 and b[:, 6].max() <= 0.45  # stance width
    assert b[:, 7].min() >= 0.03 and b[:, 7].max() <= 0.25  # footswing
    assert np.all(b[:, 0:3] >= 0.0) and np.all(b[:, 0:3] < 1.0)


def test_sample_behavior_zero_sigma_hits_presets():
    rng = np.random.default_rng(0)
    b = sample_behavior(rng, 200, theta_sigma=0.0)
    presets = {GAIT_PRESETS[g] for g in MAIN_GAITS}
    for row in b[:, 0:3]:
        assert tuple(row) in presets


def test_normalized_scores():
    means = {
        "vxy_tracking": 0.02,
        "yaw_tracking": 0.01,
        "swing_force": 0.0,
        "stance_velocity": -0.32,
    }
    s = normalized_tracking_scores(means)
    assert np.allclose(s, [1.0, 1.0, 1.0, 0.0])


def test_state_round_trip():
    g = CurriculumGrid()
    all_pass_round(g)
    state = g.state_arrays()
    g2 = CurriculumGrid()
    g2.load_state_arrays(state)
    assert np.array_equal(g.active, g2.active)
    assert np.allclose(g.ema, g2.ema)


def test_grid_csv(tmp_path):
    g = CurriculumGrid()
    p = tmp_path / "grid.csv"
    g.to_csv(str(p))
    data = np.loadtxt(str(p), delimiter=",")
    assert data.shape == (g.n_vx, g.n_wz)
    assert data.sum() == 16
