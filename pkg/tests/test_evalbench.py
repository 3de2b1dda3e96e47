import numpy as np
import pytest

from quadgait.evalbench import (
    EvalReport,
    Schedule,
    heatmap_to_csv,
    measure_stepping_frequency,
    mechanical_power,
    scripted_sequence,
)


def test_power_zero_velocity():
    assert mechanical_power(np.ones(12), np.zeros(12)) == 0.0


def test_power_rectifies_negative_products():
    tau = np.ones(12)
    qd = -np.ones(12)
    assert mechanical_power(tau, qd) == 0.0


def test_power_mixed_products():
    tau = np.zeros(12)
    qd = np.zeros(12)
    tau[:4] = [2.0, -3.0, 1.0, 0.0]
    qd[:4] = [1.0, 1.0, 1.0, 1.0]
    assert mechanical_power(tau, qd) == pytest.approx(3.0)


def test_power_permutation_invariant():
    rng = np.random.default_rng(0)
    tau = rng.normal(size=12)
    qd = rng.normal(size=12)
    perm = rng.permutation(12)
    assert mechanical_power(tau, qd) == pytest.approx(mechanical_power(tau[perm], qd[perm]))


def test_power_batched():
    rng = np.random.default_rng(1)
    tau = rng.normal(size=(7, 12))
    qd = rng.normal(size=(7, 12))
    out = mechanical_power(tau, qd)
    assert out.shape == (7,)
    assert np.all(out >= 0.0)


def test_stepping_frequency_synthetic():
    # 2 Hz square contact wave sampled at 50 Hz for 10 s
    t = np.arange(500) / 50.0
    contact = ((t * 2.0) % 1.0 < 0.5)[:, None].repeat(4, axis=1)
    freqs = measure_stepping_frequency(contact)
    assert np.allclose(freqs, 2.0, atol=0.1)


def test_stepping_frequency_debounces_chatter():
    contact = np.zeros((500, 4), dtype=bool)
    contact[::2] = True  # 25 Hz chatter, never 3 consecutive swing samples
    freqs = measure_stepping_frequency(contact)
    assert np.all(freqs == 0.0)


def test_eval_report_csv(tmp_path):
    r = EvalReport()
    r.add(gait="trot", speed_mps=0.0, power_mean=9.1)
    r.add(gait="trot", speed_mps=1.0, power_mean=24.0)
    p = tmp_path / "report.csv"
    r.to_csv(str(p))
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "gait,speed_mps,power_mean"
    assert len(lines) == 3
    assert r.column("power_mean") == [9.1, 24.0]


def test_heatmap_csv_cell_count(tmp_path):
    vxs = np.arange(-1.0, 1.01, 0.5)
    wzs = np.arange(-2.0, 2.01, 1.0)
    grid = np.zeros((len(vxs), len(wzs)))
    p = tmp_path / "hm.csv"
    heatmap_to_csv(str(p), grid, vxs, wzs)
    lines = p.read_text().strip().splitlines()
    assert len(lines) == len(vxs) + 1
    assert len(lines[1].split(",")) == len(wzs) + 1


# ------------------------------------------------------------------ schedules


def test_leap_schedule_profile():
    s = scripted_sequence("leap")
    assert s.task[:, 0].max() == pytest.approx(3.0, abs=0.05)  # target speed
    # pronk segment: theta == (0,0,0) at 2 Hz for exactly 1 s
    pronk = (s.behavior[:, 0] == 0.0) & (s.behavior[:, 1] == 0.0) & (s.behavior[:, 2] == 0.0)
    assert pronk.sum() == pytest.approx(50, abs=1)
    assert np.all(s.behavior[pronk, 3] == 2.0)
    # trot frequency ramps 2 -> 4 Hz during acceleration
    acc = s.times < 2.0
    assert s.behavior[acc][0, 3] == pytest.approx(2.0, abs=0.05)
    assert s.behavior[acc][-1, 3] == pytest.approx(4.0, abs=0.05)
    # ends decelerating to rest
    assert s.task[-1, 0] == pytest.approx(0.0, abs=0.05)


def test_dance_schedule_constraints():
    s = scripted_sequence("dance")
    assert set(np.unique(s.behavior[:, 3])) == {1.5, 3.0}
    thetas = np.unique(s.behavior[:, 0:3])
    assert set(thetas) <= {0.0, 0.25, 0.5}
    # 16 beats at 90 bpm
    assert s.times[-1] == pytest.approx(16 * 60.0 / 90.0, abs=0.05)
    # height modulation present
    assert len(np.unique(s.behavior[:, 4])) > 1


def test_schedule_sampling_rate():
    s = scripted_sequence("leap", control_hz=50.0)
    assert np.allclose(np.diff(s.times), 0.02)
    assert len(s) == len(s.task) == len(s.behavior)


def test_unknown_sequence_rejected():
    with pytest.raises(ValueError, match="leap"):
        scripted_sequence("backflip")
