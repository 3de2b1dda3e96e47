"""Simulator configuration: geometry, masses, actuation, contact, termination.

Geometry defaults describe a small ~15 kg quadruped with 0.21 m thigh/calf
links.  Everything here is plain data and serializes to a flat key-value JSON
object (see save/load at the bottom).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class SimConfig:
    control_hz: float = 50.0
    substeps: int = 8

    # geometry (m)
    hip_x_m: float = 0.19  # fore/aft hip offset from torso center
    hip_y_m: float = 0.095  # lateral hip offset
    hip_link_m: float = 0.08  # abduction link length
    thigh_m: float = 0.21
    calf_m: float = 0.21
    torso_size_x_m: float = 0.40
    torso_size_y_m: float = 0.20
    torso_size_z_m: float = 0.12

    # masses (kg); leg point masses are lumped at knee and foot
    torso_mass_kg: float = 12.0
    knee_mass_kg: float = 0.6
    foot_mass_kg: float = 0.2

    # actuation
    kp: float = 20.0
    kd: float = 0.5
    torque_limit_nm: float = 23.0
    joint_reflected_inertia: float = 0.02  # kg m^2
    joint_damping: float = 0.1  # N m s / rad, viscous transmission losses
    joint_friction_nm: float = 0.3  # N m, dry gearbox friction (impulse-clamped)
    latency_steps: int = 1  # control steps of action delay (20 ms at 50 Hz)

    # contact (penalty method)
    contact_kn: float = 6000.0  # N/m normal stiffness
    contact_cn: float = 150.0  # N s/m normal damping (scaled down by restitution)
    friction_kt: float = 4000.0  # N/m tangential anchor stiffness
    friction_ct: float = 60.0  # N s/m tangential damping
    base_angular_damping: float = 0.2  # N m s, kills residual rocking

    # joint limits per leg joint type (abduction, hip flexion, knee)
    abduction_limit_rad: float = 0.9
    flexion_lo_rad: float = -1.0
    flexion_hi_rad: float = 2.8
    knee_lo_rad: float = -2.7
    knee_hi_rad: float = -0.45

    # termination
    max_roll_pitch_rad: float = 1.2
    min_base_clearance_m: float = 0.05
    episode_length_s: float = 20.0

    gravity_mps2: float = 9.81

    @property
    def dt_control(self) -> float:
        return 1.0 / self.control_hz

    @property
    def dt_sub(self) -> float:
        return self.dt_control / self.substeps

    nominal_flexion_rad: float = 0.95
    nominal_knee_rad: float = -1.5

    @property
    def nominal_joint_pos(self) -> np.ndarray:
        """Standing crouch, feet under hips: (abduction, flexion, knee) x 4 legs."""
        return np.tile(np.array([0.0, self.nominal_flexion_rad, self.nominal_knee_rad]), 4)

    @property
    def nominal_height_m(self) -> float:
        return self.thigh_m * math.cos(self.nominal_flexion_rad) + self.calf_m * math.cos(
            self.nominal_flexion_rad + self.nominal_knee_rad
        )

    @property
    def total_mass_kg(self) -> float:
        return self.torso_mass_kg + 4.0 * (self.knee_mass_kg + self.foot_mass_kg)

    @property
    def joint_lower(self) -> np.ndarray:
        return np.tile(np.array([-self.abduction_limit_rad, self.flexion_lo_rad, self.knee_lo_rad]), 4)

    @property
    def joint_upper(self) -> np.ndarray:
        return np.tile(np.array([self.abduction_limit_rad, self.flexion_hi_rad, self.knee_hi_rad]), 4)

    @property
    def base_inertia(self) -> np.ndarray:
        """Diagonal body-frame inertia: torso box plus leg point masses lumped at the hips."""
        m = self.torso_mass_kg
        lx, ly, lz = self.torso_size_x_m, self.torso_size_y_m, self.torso_size_z_m
        ixx = m / 12.0 * (ly**2 + lz**2)
        iyy = m / 12.0 * (lx**2 + lz**2)
        izz = m / 12.0 * (lx**2 + ly**2)
        m_leg = self.knee_mass_kg + self.foot_mass_kg
        # legs hang ~0.2 m below the hip points on average
        zl = -0.2
        for sx in (self.hip_x_m, -self.hip_x_m):
            for sy in (self.hip_y_m, -self.hip_y_m):
                ixx += m_leg * (sy**2 + zl**2)
                iyy += m_leg * (sx**2 + zl**2)
                izz += m_leg * (sx**2 + sy**2)
        return np.array([ixx, iyy, izz])

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(dataclasses.asdict(self), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> "SimConfig":
        with open(path) as f:
            data = json.load(f)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sim config keys: {sorted(unknown)}")
        return cls(**data)
