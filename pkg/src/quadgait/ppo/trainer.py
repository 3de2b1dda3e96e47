"""PPO training loop: rollout collection, GAE, clipped-surrogate updates with a
shared policy/value trunk, a supervised domain estimator, return normalization,
JSONL metrics, and atomic checkpoints."""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from ..curriculum import CurriculumConfig
from ..nn import Adam, Mlp, load_checkpoint, save_checkpoint
from ..rewards import ALL_TERMS, RewardConfig
from ..sim import SimConfig, Terrain
from .env import VecGaitEnv
from .gae import gae, normalize_advantages
from .history import ESTIMATE_DIM, HISTORY_DIM, POLICY_INPUT_DIM, assemble_policy_input

LOG2PI = float(np.log(2.0 * np.pi))


@dataclass
class PpoConfig:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    rollout_steps: int = 21
    epochs: int = 5
    minibatches: int = 4
    entropy_coef: float = 0.01
    value_coef: float = 1.0
    clip_range: float = 0.2
    learning_rate: float = 1e-3  # initial; adapted toward desired_kl unless schedule="fixed"
    lr_schedule: str = "adaptive"  # bounded lr tracking desired_kl; "fixed" disables
    desired_kl: float = 0.03
    lr_bounds: tuple = (2e-4, 1e-3)
    reward_normalization: bool = True
    n_envs: int = 256  # 4096 at full scale; desk default
    iterations: int = 500  # budget is iteration-based; full-scale step counts are out of scope
    seed: int = 0
    log_std_init: float = 0.0
    hidden_sizes: tuple = (512, 256, 128)
    estimator_hidden: tuple = (256, 128)
    checkpoint_every: int = 100
    action_dim: int = 12


class ActorCritic:
    """Shared ELU trunk; output row = [12 action means | 1 value].  A separate
    MLP estimates body velocity and ground friction from the raw history; its
    output feeds the policy input but only its supervised loss trains it."""

    def __init__(self, cfg: PpoConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.net = Mlp([POLICY_INPUT_DIM, *cfg.hidden_sizes, cfg.action_dim + 1], rng=rng, out_gain=1.0)
        # small init on the action-mean rows keeps early policies near nominal
        self.net.weights[-1][:, : cfg.action_dim] *= 0.01
        self.log_std = np.full(cfg.action_dim, cfg.log_std_init, dtype=np.float32)
        self.estimator = Mlp([HISTORY_DIM, *cfg.estimator_hidden, ESTIMATE_DIM], rng=rng, out_gain=1.0)

    def parameters(self) -> list:
        return self.net.parameters() + [self.log_std]

    def policy_input(self, hist_flat: np.ndarray) -> np.ndarray:
        return assemble_policy_input(hist_flat, self.estimator.forward(hist_flat))

    def act(self, policy_in: np.ndarray, rng: np.random.Generator):
        out = self.net.forward(policy_in)
        mean, value = out[:, :-1], out[:, -1]
        std = np.exp(self.log_std)
        noise = rng.standard_normal(mean.shape).astype(np.float32)
        action = mean + std * noise
        logp = self._log_prob(action, mean)
        return action, logp, value, mean

    def act_mean(self, policy_in: np.ndarray) -> np.ndarray:
        return self.net.forward(policy_in)[:, :-1]

    def value(self, policy_in: np.ndarray) -> np.ndarray:
        return self.net.forward(policy_in)[:, -1]

    def _log_prob(self, action, mean):
        z = (action - mean) / np.exp(self.log_std)
        return -0.5 * np.sum(z * z, axis=-1) - np.sum(self.log_std) - 0.5 * self.cfg.action_dim * LOG2PI

    def entropy(self) -> float:
        return float(np.sum(self.log_std) + 0.5 * self.cfg.action_dim * (1.0 + LOG2PI))

    # ------------------------------------------------------------- checkpoint

    def state_arrays(self) -> dict:
        out = {"log_std": self.log_std}
        for i, (w, b) in enumerate(zip(self.net.weights, self.net.biases)):
            out[f"net_w{i}"] = w
            out[f"net_b{i}"] = b
        for i, (w, b) in enumerate(zip(self.estimator.weights, self.estimator.biases)):
            out[f"est_w{i}"] = w
            out[f"est_b{i}"] = b
        return out

    def load_state_arrays(self, arrays: dict) -> None:
        self.log_std = arrays["log_std"].copy()
        for i in range(len(self.net.weights)):
            self.net.weights[i] = arrays[f"net_w{i}"].copy()
            self.net.biases[i] = arrays[f"net_b{i}"].copy()
        for i in range(len(self.estimator.weights)):
            self.estimator.weights[i] = arrays[f"est_w{i}"].copy()
            self.estimator.biases[i] = arrays[f"est_b{i}"].copy()

    @classmethod
    def from_checkpoint(cls, path: str):
        arrays, meta = load_checkpoint(path)
        cfg = PpoConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in meta["ppo"].items()})
        ac = cls(cfg, np.random.default_rng(0))
        ac.load_state_arrays(arrays)
        return ac, meta


class ReturnNormalizer:
    """Scale rewards by the running std of the discounted return (Welford)."""

    def __init__(self, n_envs: int, gamma: float):
        self.gamma = gamma
        self.ret = np.zeros(n_envs)
        self.count = 1e-4
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, rewards: np.ndarray, dones: np.ndarray) -> np.ndarray:
        self.ret = rewards + self.gamma * self.ret * (1.0 - dones)
        for x in self.ret:
            self.count += 1.0
            d = x - self.mean
            self.mean += d / self.count
            self.m2 += d * (x - self.mean)
        return rewards / self.scale

    @property
    def scale(self) -> float:
        var = self.m2 / max(self.count - 1.0, 1.0)
        return float(np.sqrt(var) + 1e-8)

    def state_arrays(self) -> dict:
        return {"retnorm": np.array([self.count, self.mean, self.m2]), "retnorm_ret": self.ret}

    def load_state_arrays(self, arrays: dict) -> None:
        self.count, self.mean, self.m2 = arrays["retnorm"]
        self.ret = arrays["retnorm_ret"].copy()


class TrainingDiverged(RuntimeError):
    pass


class Trainer:
    def __init__(
        self,
        run_dir: str,
        ppo_cfg: PpoConfig | None = None,
        sim_cfg: SimConfig | None = None,
        reward_cfg: RewardConfig | None = None,
        cur_cfg: CurriculumConfig | None = None,
        terrain: Terrain | None = None,
        config_snapshot: dict | None = None,
    ):
        self.cfg = ppo_cfg or PpoConfig()
        self.run_dir = run_dir
        os.makedirs(run_dir, exist_ok=True)
        self.env = VecGaitEnv(
            self.cfg.n_envs, sim_cfg, reward_cfg, cur_cfg, terrain or Terrain.flat(), seed=self.cfg.seed
        )
        rng = np.random.default_rng(self.cfg.seed)
        self.ac = ActorCritic(self.cfg, rng)
        self.action_rng = np.random.default_rng(self.cfg.seed + 1)
        self.opt = Adam(self.ac.parameters(), lr=self.cfg.learning_rate)
        self.est_opt = Adam(self.ac.estimator.parameters(), lr=self.cfg.learning_rate)
        self.ret_norm = ReturnNormalizer(self.cfg.n_envs, self.cfg.gamma)
        self.iteration = 0
        self.config_snapshot = config_snapshot or {}
        self._metrics_path = os.path.join(run_dir, "metrics.jsonl")
        self._divergence_streak = 0

    # ---------------------------------------------------------------- rollout

    def collect_rollout(self):
        cfg = self.cfg
        t_steps, n = cfg.rollout_steps, cfg.n_envs
        obs = np.zeros((t_steps, n, POLICY_INPUT_DIM), dtype=np.float32)
        hists = np.zeros((t_steps, n, HISTORY_DIM), dtype=np.float32)
        actions = np.zeros((t_steps, n, cfg.action_dim), dtype=np.float32)
        logps = np.zeros((t_steps, n), dtype=np.float64)
        means = np.zeros((t_steps, n, cfg.action_dim), dtype=np.float32)
        values = np.zeros((t_steps, n), dtype=np.float64)
        rewards = np.zeros((t_steps, n), dtype=np.float64)
        raw_rewards = np.zeros((t_steps, n), dtype=np.float64)
        dones = np.zeros((t_steps, n), dtype=np.float64)
        term_values = np.zeros((t_steps, n), dtype=np.float64)
        est_targets = np.zeros((t_steps, n, ESTIMATE_DIM), dtype=np.float32)
        term_sums = {k: 0.0 for k in ALL_TERMS}
        episode_lengths = []

        for t in range(t_steps):
            hist = self.env.history_flat()
            est_tgt = self.env.estimator_targets()
            pol_in = self.ac.policy_input(hist)
            a, logp, v, mean = self.ac.act(pol_in, self.action_rng)
            ep_before = self.env.ep_steps.copy()
            breakdown, done, info = self.env.step(a)
            r = breakdown["total"]
            hists[t] = hist
            obs[t] = pol_in
            actions[t] = a
            means[t] = mean
            logps[t] = logp
            values[t] = v
            raw_rewards[t] = r
            dones[t] = done
            est_targets[t] = est_tgt
            for k in ALL_TERMS:
                term_sums[k] += float(np.mean(breakdown[k]))
            if np.any(info["timeout"]):
                t_idx = np.nonzero(info["timeout"])[0]
                order = {int(e): k for k, e in enumerate(info["terminal_idx"])}
                rows = [order[int(e)] for e in t_idx]
                term_hist = info["terminal_hist"][rows]
                term_values[t, t_idx] = self.ac.value(self.ac.policy_input(term_hist))
            if "terminal_idx" in info:
                episode_lengths.extend(ep_before[info["terminal_idx"]] + 1)

        if self.cfg.reward_normalization:
            for t in range(t_steps):
                rewards[t] = self.ret_norm.update(raw_rewards[t], dones[t])
            term_values_n = term_values
        else:
            rewards = raw_rewards
            term_values_n = term_values

        bootstrap = self.ac.value(self.ac.policy_input(self.env.history_flat()))
        adv, rets = gae(rewards, values, dones, bootstrap, self.cfg.gamma, self.cfg.gae_lambda, term_values_n)
        term_means = {k: v / t_steps for k, v in term_sums.items()}
        return {
            "obs": obs.reshape(-1, POLICY_INPUT_DIM),
            "hists": hists.reshape(-1, HISTORY_DIM),
            "actions": actions.reshape(-1, cfg.action_dim),
            "logp_old": logps.reshape(-1),
            "mean_old": means.reshape(-1, cfg.action_dim),
            "log_std_old": self.ac.log_std.copy(),
            "values_old": values.reshape(-1),
            "advantages": normalize_advantages(adv).reshape(-1),
            "returns": rets.reshape(-1),
            "est_targets": est_targets.reshape(-1, ESTIMATE_DIM),
            "term_means": term_means,
            "raw_reward_mean": float(raw_rewards.mean()),
            "episode_lengths": episode_lengths,
        }

    # ----------------------------------------------------------------- update

    def ppo_update(self, batch: dict) -> dict:
        cfg = self.cfg
        n_total = batch["obs"].shape[0]
        idx = np.arange(n_total)
        stats = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "clip_frac": 0.0, "est_mse": 0.0, "kl": 0.0}
        n_updates = 0
        std = None
        for _ in range(cfg.epochs):
            self.action_rng.shuffle(idx)
            for mb in np.array_split(idx, cfg.minibatches):
                x = batch["obs"][mb]
                a = batch["actions"][mb]
                adv = batch["advantages"][mb]
                ret = batch["returns"][mb]
                logp_old = batch["logp_old"][mb]
                b = len(mb)

                out = self.ac.net.forward(x, cache=True)
                mean, value = out[:, :-1], out[:, -1]
                std = np.exp(self.ac.log_std)
                z = (a - mean) / std
                logp = -0.5 * np.sum(z * z, axis=-1) - np.sum(self.ac.log_std) - 0.5 * cfg.action_dim * LOG2PI
                ratio = np.exp(logp - logp_old)
                unclipped = ratio * adv
                clipped = np.clip(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range) * adv
                policy_loss = -np.mean(np.minimum(unclipped, clipped))
                value_loss = np.mean((value - ret) ** 2)
                entropy = self.ac.entropy()
                loss = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy
                if not np.isfinite(loss):
                    raise TrainingDiverged(f"non-finite loss at iteration {self.iteration}")

                # gradient of the clipped surrogate w.r.t. (mean, log_std)
                use = (unclipped <= clipped).astype(np.float64)
                g_logp = -(adv * ratio * use) / b  # d policy_loss / d logp
                d_mean = (g_logp[:, None] * (z / std)).astype(np.float32)
                d_logstd = np.sum(g_logp[:, None] * (z * z - 1.0), axis=0) - cfg.entropy_coef
                d_value = (cfg.value_coef * 2.0 * (value - ret) / b)[:, None]
                upstream = np.concatenate([d_mean, d_value.astype(np.float32)], axis=1)
                grads, _ = self.ac.net.backward(upstream)
                self.opt.step(self.ac.parameters(), grads + [d_logstd.astype(np.float32)])

                # estimator: supervised MSE on privileged targets, same loop
                h = batch["hists"][mb]
                tgt = batch["est_targets"][mb]
                est_out = self.ac.estimator.forward(h, cache=True)
                est_err = est_out - tgt
                est_mse = float(np.mean(est_err**2))
                est_grads, _ = self.ac.estimator.backward(2.0 * est_err / est_err.size)
                self.est_opt.step(self.ac.estimator.parameters(), est_grads)

                if cfg.lr_schedule == "adaptive":
                    # exact diagonal-Gaussian KL(old || new) against the rollout policy
                    mu_old = batch["mean_old"][mb]
                    ls_old = batch["log_std_old"]
                    var = np.exp(2.0 * self.ac.log_std)
                    kl_exact = float(
                        np.mean(
                            np.sum(
                                self.ac.log_std
                                - ls_old
                                + (np.exp(2.0 * ls_old) + (mean - mu_old) ** 2) / (2.0 * var)
                                - 0.5,
                                axis=-1,
                            )
                        )
                    )
                    if kl_exact > 2.0 * cfg.desired_kl:
                        self.opt.lr = max(self.opt.lr / 1.5, cfg.lr_bounds[0])
                    elif kl_exact < cfg.desired_kl / 2.0:
                        self.opt.lr = min(self.opt.lr * 1.5, cfg.lr_bounds[1])
                    self.est_opt.lr = self.opt.lr

                stats["policy_loss"] += float(policy_loss)
                stats["value_loss"] += float(value_loss)
                stats["entropy"] += entropy
                stats["clip_frac"] += float(np.mean(np.abs(ratio - 1.0) > cfg.clip_range))
                stats["est_mse"] += est_mse
                stats["kl"] += float(np.mean(logp_old - logp))
                n_updates += 1
        return {k: v / n_updates for k, v in stats.items()}

    # ------------------------------------------------------------------ train

    def train(self, iterations: int | None = None, log_cb=None) -> str:
        iterations = iterations or self.cfg.iterations
        final_path = os.path.join(self.run_dir, "checkpoint_final.ckpt")
        with open(os.path.join(self.run_dir, "config.json"), "w") as f:
            json.dump(self._full_config(), f, indent=2)
        t_start = time.time()
        for _ in range(iterations):
            batch = self.collect_rollout()
            try:
                stats = self.ppo_update(batch)
                self._divergence_streak = 0
            except TrainingDiverged:
                self._divergence_streak += 1
                stats = {"policy_loss": float("nan"), "diverged": True}
                if self._divergence_streak >= 3:
                    self.save(final_path)
                    raise
            self.iteration += 1
            record = {
                "iteration": self.iteration,
                "time_s": round(time.time() - t_start, 2),
                "reward_total_mean": batch["raw_reward_mean"],
                "episode_len_mean": float(np.mean(batch["episode_lengths"])) if batch["episode_lengths"] else None,
                "curriculum_active_bins": self.env.grid.n_active,
                "return_scale": self.ret_norm.scale,
                **{f"reward/{k}": batch["term_means"][k] for k in ALL_TERMS},
                "ppo/lr": self.opt.lr,
                **{f"ppo/{k}": v for k, v in stats.items()},
            }
            with open(self._metrics_path, "a") as f:
                f.write(json.dumps(record) + "\n")
            if log_cb:
                log_cb(record)
            if self.iteration % self.cfg.checkpoint_every == 0:
                self.save(os.path.join(self.run_dir, f"checkpoint_{self.iteration:05d}.ckpt"))
        self.save(final_path)
        return final_path

    # ------------------------------------------------------------- checkpoint

    def _full_config(self) -> dict:
        return {
            "ppo": dataclasses.asdict(self.cfg),
            "sim": dataclasses.asdict(self.env.sim_cfg),
            "rewards": dataclasses.asdict(self.env.reward_cfg),
            "curriculum": dataclasses.asdict(self.env.cur_cfg),
            **self.config_snapshot,
        }

    def save(self, path: str) -> None:
        arrays = {}
        arrays.update(self.ac.state_arrays())
        arrays.update({f"opt_{k}": v for k, v in self.opt.state_arrays().items()})
        arrays.update({f"estopt_{k}": v for k, v in self.est_opt.state_arrays().items()})
        arrays.update(self.ret_norm.state_arrays())
        arrays.update(self.env.grid.state_arrays())
        meta = {
            "iteration": self.iteration,
            "format": "quadgait-checkpoint",
            **self._full_config(),
        }
        save_checkpoint(path, arrays, meta)

    def load(self, path: str) -> None:
        arrays, meta = load_checkpoint(path)
        self.ac.load_state_arrays(arrays)
        self.opt.load_state_arrays({k[len("opt_") :]: v for k, v in arrays.items() if k.startswith("opt_adam")})
        self.est_opt.load_state_arrays(
            {k[len("estopt_") :]: v for k, v in arrays.items() if k.startswith("estopt_adam")}
        )
        self.ret_norm.load_state_arrays(arrays)
        self.env.grid.load_state_arrays(arrays)
        self.iteration = int(meta["iteration"])
