"""Generalized advantage estimation over fixed-length rollouts."""

from __future__ import annotations

import numpy as np


def gae(rewards, values, dones, bootstrap_value, gamma: float, lam: float, terminal_values=None):
    """GAE(lambda) over a (T, N) rollout with bootstrap from the final state.

    dones cut credit across episode boundaries.  terminal_values (optional,
    (T, N)) carries V(s_terminal) for steps that ended by timeout, so the
    time-limit cut still bootstraps instead of pretending the return was zero.

    Returns (advantages, returns), both (T, N).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    t_steps, n = rewards.shape
    adv = np.zeros((t_steps, n))
    last = np.zeros(n)
    next_value = np.asarray(bootstrap_value, dtype=np.float64)
    for t in range(t_steps - 1, -1, -1):
        not_done = 1.0 - dones[t]
        boot = next_value * not_done
        if terminal_values is not None:
            boot = boot + terminal_values[t]
        delta = rewards[t] + gamma * boot - values[t]
        last = delta + gamma * lam * not_done * last
        adv[t] = last
        next_value = values[t]
    return adv, adv + values


def normalize_advantages(adv: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-std over the whole batch."""
    return (adv - adv.mean()) / (adv.std() + 1e-8)
