"""Live teleoperation service: one real-time simulator thread, a latest-command
mailbox fed by client I/O threads, and non-blocking state broadcasts.

The sim thread owns the environment and the policy.  Pending pilot commands
are applied atomically between control steps (all 11 scalars at once), so no
state frame ever reflects a half-applied command.  Sequence triggers (leap /
dance) play the corresponding open-loop schedule until it completes or `stop`
arrives; hold-last-command semantics apply when clients disconnect, with a
safety timeout that zeroes the velocity command.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ..evalbench import PolicyRunner, Schedule, scripted_sequence
from ..gait import BEHAVIOR_FIELDS, TASK_FIELDS
from ..rewards import ALL_TERMS
from ..sim import Terrain, generate_platforms
from .protocol import (
    PROTOCOL_VERSION,
    PilotCommand,
    SessionLogWriter,
    clamp_pilot_command,
    command_from_message,
    command_payload,
    decode_message,
    encode_message,
)
from .wsserver import WsServer


@dataclass
class TeleopConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    terrain: str = "flat"
    state_rate_hz: float = 20.0
    safety_timeout_s: float = 2.0  # no client traffic -> zero velocity command
    record_path: str | None = None
    realtime: bool = True  # False runs the loop flat out (tests)
    seed: int = 0


class TeleopService:
    def __init__(self, checkpoint_path: str, cfg: TeleopConfig | None = None):
        self.cfg = cfg or TeleopConfig()
        terrain = Terrain.flat() if self.cfg.terrain == "flat" else generate_platforms(seed=self.cfg.seed)
        self.runner = PolicyRunner(checkpoint_path, terrain=terrain, seed=self.cfg.seed)
        self.control_hz = self.runner.env.sim_cfg.control_hz

        self._mailbox_lock = threading.Lock()
        self._pending: PilotCommand | None = None
        self._active = PilotCommand()
        self._last_client_msg = time.monotonic()
        self._sequence: Schedule | None = None
        self._sequence_step = 0
        self._sequence_name = ""

        self._stop = threading.Event()
        self.step_count = 0
        self.session_time = 0.0
        self.step_periods: list[float] = []
        self._recorder = SessionLogWriter(self.cfg.record_path) if self.cfg.record_path else None
        self.frames_sent = 0

        self.server = WsServer(
            self.cfg.host, self.cfg.port, self._on_message, self._on_connect, self._on_disconnect
        )
        self.port = self.server.port
        self._sim_thread = threading.Thread(target=self._run_loop, daemon=True)

    # ------------------------------------------------------------- client I/O

    def _on_message(self, client, text: str) -> None:
        msg = decode_message(text)  # ValueError on violation -> client dropped
        self._last_client_msg = time.monotonic()
        if msg["type"] != "command":
            raise ValueError(f"clients may only send 'command' messages, got {msg['type']!r}")
        cmd = command_from_message(msg)
        clamped, report = clamp_pilot_command(cmd)
        if report:
            client.send_text(
                encode_message("clamp_notice", {"seq": cmd.seq_no, "fields": {k: list(v) for k, v in report.items()}})
            )
        with self._mailbox_lock:
            self._pending = clamped

    def _on_connect(self, client) -> None:
        client.send_text(
            encode_message(
                "session_event",
                {"event": "connected", "client_id": client.id, "control_hz": self.control_hz},
            )
        )

    def _on_disconnect(self, client, reason: str) -> None:
        pass  # hold-last-command semantics; safety timeout covers runaway

    # -------------------------------------------------------------- sim thread

    def _apply_pending(self) -> None:
        """Atomically swap in the latest pilot command at a step boundary."""
        with self._mailbox_lock:
            pending = self._pending
            self._pending = None
        if pending is None:
            return
        if pending.sequence == "stop":
            self._sequence = None
        elif pending.sequence in ("leap", "dance"):
            self._sequence = scripted_sequence(pending.sequence, self.control_hz)
            self._sequence_step = 0
            self._sequence_name = pending.sequence
            self._emit_event("sequence_started", sequence=pending.sequence)
        self._active = pending
        if self._recorder:
            self._recorder.write({"t": self.session_time, "type": "command", **command_payload(pending)})

    def _current_commands(self) -> tuple[np.ndarray, np.ndarray]:
        if self._sequence is not None:
            i = self._sequence_step
            if i >= len(self._sequence):
                self._sequence = None
                self._emit_event("sequence_finished", sequence=self._sequence_name)
            else:
                self._sequence_step += 1
                return self._sequence.task[i], self._sequence.behavior[i]
        task = self._active.task.as_array().copy()
        if time.monotonic() - self._last_client_msg > self.cfg.safety_timeout_s and self.cfg.realtime:
            task[:] = 0.0  # stale pilot: stop commanding velocity
        return task, self._active.behavior.as_array()

    def _run_loop(self) -> None:
        dt = 1.0 / self.control_hz
        next_deadline = time.monotonic() + dt
        last_step_t = time.monotonic()
        bcast_interval = self.control_hz / self.cfg.state_rate_hz
        next_bcast = 0.0
        while not self._stop.is_set():
            self._apply_pending()
            task, behavior = self._current_commands()
            self.runner.env.set_commands(task[None, :], behavior[None, :])
            _, breakdown, done, _ = self.runner.step()
            self.step_count += 1
            self.session_time = self.step_count * dt
            if np.any(done):
                self._emit_event("robot_reset", reason="failure_or_timeout")
            if self.step_count >= next_bcast:
                next_bcast += bcast_interval
                self._broadcast_state(breakdown)
            now = time.monotonic()
            self.step_periods.append(now - last_step_t)
            last_step_t = now
            if self.cfg.realtime:
                sleep = next_deadline - now
                if sleep > 0:
                    time.sleep(sleep)
                next_deadline = max(next_deadline + dt, now - 5 * dt)

    def _broadcast_state(self, breakdown: dict) -> None:
        snap = self.runner.env.snapshot()
        est = self.runner.ac.estimator.forward(self.runner.env.history_flat())[0]
        frame = {
            "t": round(self.session_time, 4),
            "base_pos": snap["base_pos"][0].round(4).tolist(),
            "base_quat": snap["base_quat"][0].round(5).tolist(),
            "q": snap["q"][0].round(4).tolist(),
            "foot_contact": snap["foot_contact"][0].astype(int).tolist(),
            "foot_force_z": snap["foot_force"][0, :, 2].round(2).tolist(),
            "foot_pos_w": snap["foot_pos_w"][0].round(4).tolist(),
            "desired_contact": snap["desired_contact"][0].round(3).tolist(),
            "estimate": [round(float(x), 4) for x in est],
            "rewards": {k: round(float(breakdown[k][0]), 6) for k in ALL_TERMS},
            "reward_total": round(float(breakdown["total"][0]), 6),
            "commands": {
                "task": {f: round(float(v), 4) for f, v in zip(TASK_FIELDS, snap["task_cmd"][0])},
                "behavior": {f: round(float(v), 4) for f, v in zip(BEHAVIOR_FIELDS, snap["behavior"][0])},
            },
            "sequence": self._sequence_name if self._sequence is not None else None,
        }
        text = encode_message("state", frame)
        self.server.broadcast(text)
        self.frames_sent += 1
        if self._recorder:
            self._recorder.write({"t": self.session_time, "type": "state", **frame})

    def _emit_event(self, event: str, **extra) -> None:
        self.server.broadcast(encode_message("session_event", {"event": event, **extra}))
        if self._recorder:
            self._recorder.write({"t": self.session_time, "type": "session_event", "event": event, **extra})

    # ---------------------------------------------------------------- control

    def start(self) -> None:
        self.server.start()
        self._sim_thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._sim_thread.join(timeout=2.0)
        self.server.stop()
        if self._recorder:
            self._recorder.close()

    def serve_forever(self) -> None:
        self.start()
        try:
            while True:
                time.sleep(0.5)
        except KeyboardInterrupt:
            self.stop()

    def pacing_stats(self, window_s: float = 10.0) -> dict:
        periods = self.step_periods[-int(window_s * self.control_hz) :]
        return {
            "mean_period_s": float(np.mean(periods)) if periods else float("nan"),
            "target_period_s": 1.0 / self.control_hz,
            "n": len(periods),
        }
