"""Gait timing: behavior/task commands, the per-foot phase clock, and desired contact states.

A gait is parameterized by three phase offsets (theta1, theta2, theta3) and a
stepping frequency.  A global cycle variable t advances by freq_hz / control_hz
each control tick and wraps in [0, 1).  Each foot runs at a fixed offset of t,
and its desired contact state is a smoothed square wave of its own phase:
stance over the first half cycle, swing over the second (duty factor 0.5).

Foot order everywhere in this package is (FR, FL, RR, RL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

CONTROL_HZ = 50.0
FOOT_NAMES = ("FR", "FL", "RR", "RL")
DEFAULT_SMOOTHING_SIGMA = 0.02  # cycle fraction; ~2% gives near-square schedules

# (theta1, theta2, theta3) for the named two-beat patterns.
GAIT_PRESETS = {
    "pronk": (0.0, 0.0, 0.0),
    "trot": (0.5, 0.0, 0.0),
    "bound": (0.0, 0.5, 0.0),
    "pace": (0.0, 0.0, 0.5),
    "gallop": (0.25, 0.0, 0.0),
}

# Sampling / clamp ranges for each command channel (teleop and the UI mirror these).
BEHAVIOR_RANGES = {
    "theta1": (0.0, 1.0),
    "theta2": (0.0, 1.0),
    "theta3": (0.0, 1.0),
    "freq_hz": (1.5, 4.0),
    "body_height_m": (0.10, 0.45),
    "pitch_rad": (-0.4, 0.4),
    "stance_width_m": (0.05, 0.45),
    "footswing_height_m": (0.03, 0.25),
}
TASK_RANGES = {
    "vx_mps": (-3.0, 3.0),
    "vy_mps": (-0.6, 0.6),
    "wz_radps": (-5.0, 5.0),
}

BEHAVIOR_FIELDS = tuple(BEHAVIOR_RANGES.keys())
TASK_FIELDS = tuple(TASK_RANGES.keys())


@dataclass
class TaskCommand:
    """Body-frame velocity command: forward, lateral, yaw rate."""

    vx_mps: float = 0.0
    vy_mps: float = 0.0
    wz_radps: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.vx_mps, self.vy_mps, self.wz_radps], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "TaskCommand":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass
class BehaviorCommand:
    """8-dim gait-style command: phase offsets, frequency, posture, footswing.

    Array order is (theta1, theta2, theta3, freq_hz, body_height_m, pitch_rad,
    stance_width_m, footswing_height_m).
    """

    theta1: float = 0.5  # trot by default
    theta2: float = 0.0
    theta3: float = 0.0
    freq_hz: float = 3.0
    body_height_m: float = 0.30
    pitch_rad: float = 0.0
    stance_width_m: float = 0.25
    footswing_height_m: float = 0.09

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in BEHAVIOR_FIELDS], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "BehaviorCommand":
        return cls(**{f: float(a[i]) for i, f in enumerate(BEHAVIOR_FIELDS)})

    def with_preset(self, name: str) -> "BehaviorCommand":
        t1, t2, t3 = gait_preset(name)
        out = BehaviorCommand(**{f: getattr(self, f) for f in BEHAVIOR_FIELDS})
        out.theta1, out.theta2, out.theta3 = t1, t2, t3
        return out


def gait_preset(name: str) -> tuple:
    """Phase-offset triple for a named gait.  Unknown names are rejected."""
    try:
        return GAIT_PRESETS[name]
    except KeyError:
        valid = ", ".join(sorted(GAIT_PRESETS))
        raise ValueError(f"unknown gait preset {name!r}; valid presets: {valid}") from None


def wrap_phase(x):
    """Wrap to [0, 1).  Works on scalars and arrays."""
    return np.asarray(x) - np.floor(x)


def foot_phases(t, theta1, theta2, theta3) -> np.ndarray:
    """Per-foot phases (FR, FL, RR, RL) for cycle variable t, each wrapped to [0, 1).

    Offsets: FR = t + theta2 + theta3, FL = t + theta1 + theta3,
    RR = t + theta1, RL = t + theta2.  Broadcasts over leading axes.
    """
    t = np.asarray(t, dtype=np.float64)
    fr = t + np.asarray(theta2) + np.asarray(theta3)
    fl = t + np.asarray(theta1) + np.asarray(theta3)
    rr = t + np.asarray(theta1)
    rl = t + np.asarray(theta2)
    return wrap_phase(np.stack([fr, fl, rr, rl], axis=-1))


def gauss_cdf(x, sigma):
    """CDF of a zero-mean normal with std sigma."""
    return 0.5 * (1.0 + erf(np.asarray(x, dtype=np.float64) / (sigma * math.sqrt(2.0))))


def desired_contact(phase, sigma: float = DEFAULT_SMOOTHING_SIGMA):
    """Desired contact level in [0, 1] for a foot phase in [0, 1).

    ~1 well inside (0, 0.5) (stance), ~0 well inside (0.5, 1) (swing), with a
    smooth CDF-shaped transition of width sigma at the boundaries.  The second
    product term carries the wrap so the trace is periodic.
    """
    p = wrap_phase(np.asarray(phase, dtype=np.float64))
    c = gauss_cdf(p, sigma) * (1.0 - gauss_cdf(p - 0.5, sigma)) + gauss_cdf(p - 1.0, sigma) * (
        1.0 - gauss_cdf(p - 1.5, sigma)
    )
    return np.clip(c, 0.0, 1.0)


def timing_references(phases) -> np.ndarray:
    """sin(2*pi*phase) per foot; the periodic clock channels the policy observes."""
    return np.sin(2.0 * math.pi * np.asarray(phases, dtype=np.float64))


@dataclass
class GaitClock:
    """Scalar-clock convenience wrapper around the vectorized phase math."""

    t: float = 0.0
    per_foot_phase: np.ndarray = field(default_factory=lambda: np.zeros(4))
    smoothing_sigma: float = DEFAULT_SMOOTHING_SIGMA

    def desired_contacts(self) -> np.ndarray:
        return desired_contact(self.per_foot_phase, self.smoothing_sigma)

    def timing_references(self) -> np.ndarray:
        return timing_references(self.per_foot_phase)


def advance_clock(clock: GaitClock, b: BehaviorCommand, control_hz: float = CONTROL_HZ) -> GaitClock:
    """Advance the global cycle variable one control tick and recompute foot phases."""
    if control_hz <= 0:
        raise ValueError("control_hz must be positive")
    t = float(wrap_phase(clock.t + b.freq_hz / control_hz))
    phases = foot_phases(t, b.theta1, b.theta2, b.theta3)
    return GaitClock(t=t, per_foot_phase=phases, smoothing_sigma=clock.smoothing_sigma)


def clamp_behavior(values: dict) -> tuple[dict, dict]:
    """Clamp behavior fields to their ranges; returns (clamped, {field: (raw, clamped)})."""
    out, clamped = {}, {}
    for f, (lo, hi) in BEHAVIOR_RANGES.items():
        if f not in values:
            continue
        raw = float(values[f])
        if f.startswith("theta"):
            v = float(wrap_phase(raw))  # phases live on the circle
        else:
            v = min(max(raw, lo), hi)
        out[f] = v
        if v != raw:
            clamped[f] = (raw, v)
    return out, clamped


def clamp_task(values: dict) -> tuple[dict, dict]:
    """Clamp task fields to their ranges; returns (clamped, {field: (raw, clamped)})."""
    out, clamped = {}, {}
    for f, (lo, hi) in TASK_RANGES.items():
        if f not in values:
            continue
        raw = float(values[f])
        v = min(max(raw, lo), hi)
        out[f] = v
        if v != raw:
            clamped[f] = (raw, v)
    return out, clamped
