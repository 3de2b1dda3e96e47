import numpy as np
import pytest

from quadgait.sim import DomainParams, QuadrupedSim, SimConfig, Terrain, generate_platforms, termination_check
from quadgait.sim.engine import DOMAIN_RANGES
from quadgait.sim.kinematics import hip_offsets, leg_points
from quadgait.sim.rotations import rpy_from_quat


@pytest.fixture(scope="module")
def cfg():
    return SimConfig()


def nominal_targets(cfg, n):
    return np.tile(cfg.nominal_joint_pos, (n, 1))


# ------------------------------------------------------------------ kinematics


def test_fk_nominal_pose_geometry(cfg):
    q = nominal_targets(cfg, 1)
    knee, foot, _, _ = leg_points(q, cfg)
    hips = hip_offsets(cfg)
    # all feet at the nominal height, same fore/aft offset for every leg
    assert np.allclose(foot[0, :, 2], -cfg.nominal_height_m, atol=1e-9)
    offsets = foot[0, :, 0] - hips[:, 0]
    assert np.allclose(offsets, offsets[0], atol=1e-9)
    # lateral: abduction link pushes feet outward, mirrored left/right
    assert np.allclose(foot[0, 0, 1], -foot[0, 1, 1], atol=1e-9)
    assert np.allclose(knee[0, :, 2], -cfg.thigh_m * np.cos(cfg.nominal_flexion_rad), atol=1e-9)


def test_fk_jacobian_matches_finite_differences(cfg):
    rng = np.random.default_rng(0)
    q = nominal_targets(cfg, 1) + rng.uniform(-0.3, 0.3, (1, 12))
    _, _, jac_knee, jac_foot = leg_points(q, cfg)
    h = 1e-7
    for j in range(12):
        dq = np.zeros((1, 12))
        dq[0, j] = h
        _, fp, _, _ = leg_points(q + dq, cfg)
        _, fm, _, _ = leg_points(q - dq, cfg)
        fd = (fp - fm) / (2 * h)
        leg, joint = divmod(j, 3)
        assert np.allclose(jac_foot[0, leg, :, joint], fd[0, leg], atol=1e-5)


# --------------------------------------------------------------------- terrain


def test_flat_terrain_is_zero():
    t = Terrain.flat()
    assert t.is_flat
    xs = np.linspace(-5, 5, 11)
    assert np.all(t.height_at(xs, xs) == 0.0)


def test_platforms_zero_height_is_flat():
    t = generate_platforms(seed=0, max_height_m=0.0)
    assert t.is_flat


def test_platforms_deterministic_and_bounded():
    a = generate_platforms(seed=3, max_height_m=0.16)
    b = generate_platforms(seed=3, max_height_m=0.16)
    assert np.array_equal(a.heights, b.heights)
    assert a.heights.max() <= 0.16
    assert a.heights.min() >= 0.0
    assert not a.is_flat


def test_platform_heights_capped_many_seeds():
    tops = [generate_platforms(seed=s, max_height_m=0.16).heights.max() for s in range(20)]
    assert max(tops) <= 0.16


def test_terrain_csv_round_trip(tmp_path):
    t = generate_platforms(seed=1, max_height_m=0.1)
    p = tmp_path / "terrain.csv"
    t.to_csv(str(p))
    t2 = Terrain.from_csv(str(p), t.cell_m)
    assert np.allclose(t.heights, t2.heights, atol=1e-4)


# ---------------------------------------------------------------------- domain


def test_domain_params_within_ranges():
    rng = np.random.default_rng(0)
    p = DomainParams.sample(10000, rng)
    lo, hi = DOMAIN_RANGES["friction"]
    assert p.friction.min() >= lo and p.friction.max() <= hi
    lo, hi = DOMAIN_RANGES["payload_kg"]
    assert p.payload_kg.min() >= lo and p.payload_kg.max() <= hi
    lo, hi = DOMAIN_RANGES["restitution"]
    assert p.restitution.min() >= lo and p.restitution.max() <= hi
    assert np.abs(p.joint_calibration_rad).max() <= 0.02
    assert p.motor_strength.min() >= 0.90 and p.motor_strength.max() <= 1.10
    assert np.abs(p.gravity_offset_mps2).max() <= 1.0


def test_reset_determinism(cfg):
    def snap(seed):
        sim = QuadrupedSim(2, cfg, Terrain.flat(), seed=seed)
        rng = np.random.default_rng(seed)
        sim.reset_envs(np.arange(2), rng, sample_params=True)
        return sim.base_pos.copy(), sim.q.copy(), sim.params.friction.copy()

    a = snap(11)
    b = snap(11)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


# ------------------------------------------------------------------- dynamics


def test_static_equilibrium(cfg):
    sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=0)
    t = nominal_targets(cfg, 1)
    for _ in range(150):  # settle
        rep = sim.step(t)
    pos_before = sim.base_pos.copy()
    for _ in range(50):  # stays put
        rep = sim.step(t)
    assert np.linalg.norm(sim.base_linvel[0]) < 1e-3
    assert np.linalg.norm(sim.base_pos - pos_before) < 1e-3
    net = rep.foot_force_w[0, :, 2].sum()
    assert net == pytest.approx(cfg.total_mass_kg * cfg.gravity_mps2, rel=0.02)
    assert not rep.collision[0]


def test_drop_test_settles(cfg):
    sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=1)
    sim.params.restitution[:] = 0.0
    sim.base_pos[0, 2] = 0.5
    t = nominal_targets(cfg, 1)
    for _ in range(100):  # 2 s
        sim.step(t)
    assert np.linalg.norm(sim.base_linvel[0]) < 1e-3


def test_ballistic_closed_form():
    cfg = SimConfig(kp=0.0, kd=0.0, joint_friction_nm=0.0)
    sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=0)
    sim.base_pos[0] = [0.0, 0.0, 5.0]
    sim.base_linvel[0] = [1.0, -0.5, 2.0]
    p0, v0 = sim.base_pos[0].copy(), sim.base_linvel[0].copy()
    t = nominal_targets(cfg, 1)
    for _ in range(5):  # 0.1 s
        sim.step(t)
    g = np.array([0.0, 0.0, -cfg.gravity_mps2])
    expected = p0 + v0 * 0.1 + 0.5 * g * 0.1**2
    assert np.abs(sim.base_pos[0] - expected).max() < 1e-6


def test_friction_cone(cfg):
    sim = QuadrupedSim(8, cfg, Terrain.flat(), seed=7)
    rng = np.random.default_rng(7)
    sim.reset_envs(np.arange(8), rng, sample_params=True)
    worst = -np.inf
    for i in range(1250):  # 10^4 env-steps
        t = cfg.nominal_joint_pos + rng.uniform(-0.5, 0.5, (8, 12))
        rep = sim.step(t)
        worst = max(worst, rep.friction_residual.max())
        if np.any(rep.nonfinite):
            sim.reset_envs(np.nonzero(rep.nonfinite)[0], rng)
    assert worst <= 1e-6


def test_normal_forces_nonnegative(cfg):
    sim = QuadrupedSim(4, cfg, Terrain.flat(), seed=3)
    rng = np.random.default_rng(3)
    for _ in range(100):
        t = cfg.nominal_joint_pos + rng.uniform(-0.4, 0.4, (4, 12))
        rep = sim.step(t)
        assert np.all(rep.foot_force_w[..., 2] >= 0.0)


def test_action_latency_one_step(cfg):
    def run(change_at, n_steps):
        sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=0)
        t0 = nominal_targets(cfg, 1)
        taus = []
        for i in range(n_steps):
            t = t0 + 0.3 if i >= change_at else t0
            rep = sim.step(t)
            taus.append(rep.torques.copy())
        return taus

    base = run(change_at=99, n_steps=52)  # never changes
    moved = run(change_at=50, n_steps=52)
    assert np.array_equal(base[50], moved[50])  # zero effect at the issue step
    assert not np.allclose(base[51], moved[51])  # full effect one step later


def test_step_determinism(cfg):
    def run():
        sim = QuadrupedSim(2, cfg, Terrain.flat(), seed=5)
        rng = np.random.default_rng(5)
        sim.reset_envs(np.arange(2), rng, sample_params=True)
        for i in range(30):
            sim.step(cfg.nominal_joint_pos + 0.2 * np.sin(0.3 * i))
        return sim.base_pos.copy(), sim.q.copy(), sim.base_quat.copy()

    a, b, c = run()
    a2, b2, c2 = run()
    assert np.array_equal(a, a2) and np.array_equal(b, b2) and np.array_equal(c, c2)


def test_gravity_offset_measured(cfg):
    sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=0)
    sim.params.gravity_offset_mps2[0] = [0.0, 0.0, 1.0]
    g = sim.gravity_body()[0]
    assert np.linalg.norm(g) == pytest.approx(abs(-cfg.gravity_mps2 + 1.0), rel=1e-12)


def test_termination_check(cfg):
    sim = QuadrupedSim(3, cfg, Terrain.flat(), seed=0)
    # env 0 nominal, env 1 buried, env 2 rolled over
    sim.base_pos[1, 2] = 0.03
    sim.base_quat[2] = [np.cos(0.7), np.sin(0.7), 0.0, 0.0]  # roll = 1.4 rad
    failed, timeout = termination_check(sim, np.array([1.0, 1.0, 1.0]))
    assert not failed[0] and failed[1] and failed[2]
    assert not timeout.any()
    _, timeout = termination_check(sim, np.array([20.0, 1.0, 1.0]))
    assert timeout[0] and not timeout[1]


def test_nonfinite_flagging(cfg):
    sim = QuadrupedSim(1, cfg, Terrain.flat(), seed=0)
    sim.base_linvel[0, 0] = np.nan
    rep = sim.step(nominal_targets(cfg, 1))
    assert rep.nonfinite[0]
