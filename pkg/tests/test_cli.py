import json
import os

import numpy as np
import pytest

from quadgait.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from quadgait.configio import ConfigError, load_run_config


def test_config_defaults():
    cfg = load_run_config()
    assert cfg.ppo.n_envs == 256
    assert cfg.ppo.learning_rate == 1e-3
    assert cfg.provenance["ppo.n_envs"] == "default"


def test_config_precedence(tmp_path):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps({"ppo": {"n_envs": 64, "gamma": 0.98}, "sim": {"substeps": 4}}))
    cfg = load_run_config(str(f), ["ppo.n_envs=32"])
    assert cfg.ppo.n_envs == 32  # flag beats file
    assert cfg.ppo.gamma == 0.98  # file beats default
    assert cfg.sim.substeps == 4
    assert cfg.provenance["ppo.n_envs"] == "flag"
    assert cfg.provenance["ppo.gamma"] == "file"
    assert cfg.provenance["ppo.gae_lambda"] == "default"


def test_config_precedence_random_subsets(tmp_path):
    rng = np.random.default_rng(0)
    keys = [
        ("ppo.gamma", 0.9, 0.95),
        ("ppo.clip_range", 0.1, 0.3),
        ("sim.kp", 18.0, 22.0),
        ("rewards.sigma_vxy", 0.2, 0.3),
        ("curriculum.ema_coef", 0.1, 0.4),
    ]
    for trial in range(20):
        in_file = {k: v for k, (v, _) in zip([k for k, *_ in keys], [(v1, v2) for _, v1, v2 in keys]) if rng.random() < 0.5}
        as_flag = {k: v2 for k, _, v2 in keys if rng.random() < 0.5}
        file_dict = {}
        for k, v in in_file.items():
            sec, fld = k.split(".")
            file_dict.setdefault(sec, {})[fld] = v
        f = tmp_path / f"c{trial}.json"
        f.write_text(json.dumps(file_dict))
        cfg = load_run_config(str(f), [f"{k}={v}" for k, v in as_flag.items()])
        for k, v1, v2 in keys:
            sec, fld = k.split(".")
            actual = getattr(getattr(cfg, sec), fld)
            if k in as_flag:
                assert actual == v2 and cfg.provenance[k] == "flag"
            elif k in in_file:
                assert actual == v1 and cfg.provenance[k] == "file"
            else:
                assert cfg.provenance[k] == "default"


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="ppo.walrus"):
        load_run_config(None, ["ppo.walrus=1"])


def test_config_rejects_bad_value():
    with pytest.raises(ConfigError, match="ppo.n_envs"):
        load_run_config(None, ["ppo.n_envs=many"])


def test_config_validation_port():
    with pytest.raises(ConfigError, match="teleop.port"):
        load_run_config(None, ["teleop.port=-1"])


def test_cli_usage_error():
    assert main(["not-a-command"]) == EXIT_USAGE


def test_cli_serve_bad_port(capsys):
    rc = main(["serve", "--checkpoint", "x.ckpt", "--port", "-1"])
    assert rc == EXIT_CONFIG
    assert "teleop.port" in capsys.readouterr().err


def test_cli_train_smoke(tmp_path):
    run_dir = str(tmp_path / "run")
    rc = main(["train", "--run-dir", run_dir, "--envs", "4", "--iters", "2", "--seed", "0"])
    assert rc == EXIT_OK
    metrics = open(os.path.join(run_dir, "metrics.jsonl")).read().strip().splitlines()
    assert len(metrics) == 2
    assert os.path.exists(os.path.join(run_dir, "run_config.json"))
    assert os.path.exists(os.path.join(run_dir, "checkpoint_final.ckpt"))


def test_cli_inspect(tmp_path, capsys):
    run_dir = str(tmp_path / "run")
    main(["train", "--run-dir", run_dir, "--envs", "4", "--iters", "1"])
    rc = main(["inspect", os.path.join(run_dir, "checkpoint_final.ckpt")])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "policy/value trunk" in out and "estimator" in out
    assert "[512, 256, 128]" in out or "1624" in out


def test_cli_inspect_missing_file():
    assert main(["inspect", "/nonexistent/path.ckpt"]) == EXIT_RUNTIME


def test_cli_eval_sequence_export(tmp_path):
    out_dir = str(tmp_path / "eval")
    rc = main(["eval", "--checkpoint", "unused.ckpt", "--out-dir", out_dir, "--sequence", "leap"])
    assert rc == EXIT_OK
    data = json.load(open(os.path.join(out_dir, "leap_schedule.json")))
    assert data["name"] == "leap"
    assert len(data["times"]) == len(data["task"]) == len(data["behavior"])


def test_cli_replay(tmp_path):
    log = tmp_path / "session.jsonl"
    frames = [
        {
            "t": round(i * 0.05, 3),
            "type": "state",
            "base_pos": [0.0, 0.0, 0.3],
            "foot_contact": [1, 1, 1, 1],
            "commands": {"task": {"vx_mps": 0.5, "vy_mps": 0.0, "wz_radps": 0.0}},
        }
        for i in range(10)
    ]
    log.write_text("\n".join(json.dumps(f) for f in frames) + "\n")
    out = str(tmp_path / "out.csv")
    rc = main(["replay", str(log), "--out", out])
    assert rc == EXIT_OK
    lines = open(out).read().strip().splitlines()
    assert len(lines) == 11  # header + 10 frames


def test_run_config_snapshot_reproducible(tmp_path):
    from quadgait.configio import RunConfig

    cfg = load_run_config(None, ["ppo.n_envs=8", "ppo.seed=5"])
    snap_path = tmp_path / "snap.json"
    cfg.save(str(snap_path))
    cfg2 = load_run_config(str(snap_path))
    assert cfg2.ppo.n_envs == 8 and cfg2.ppo.seed == 5
    from quadgait.ppo import Trainer

    a = Trainer(str(tmp_path / "a"), cfg.ppo).collect_rollout()
    b = Trainer(str(tmp_path / "b"), cfg2.ppo).collect_rollout()
    assert np.allclose(a["returns"], b["returns"])
