"""Gait-conditioned quadruped locomotion: simulator, training stack, teleoperation."""

__version__ = "0.1.0"
