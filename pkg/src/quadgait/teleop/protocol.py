"""Wire protocol and session logs for the teleoperation service.

Messages are JSON objects with a version field `v` and a `type` of `state`,
`command`, `clamp_notice`, or `session_event`; over the socket each message is
one WebSocket text frame.  Command values are clamped to the command ranges on
ingest and clamping is echoed back.  Floats survive the JSON round trip to
within 1e-6 (documented tolerance; exact bit equality is not promised).

Session logs are JSONL: every command and state frame with a timestamp, one
object per line.  Corrupt lines are skipped (counted) on replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..gait import (
    BEHAVIOR_FIELDS,
    TASK_FIELDS,
    BehaviorCommand,
    TaskCommand,
    clamp_behavior,
    clamp_task,
    gait_preset,
)

PROTOCOL_VERSION = 1
SEQUENCES = ("leap", "dance", "stop")


@dataclass
class PilotCommand:
    """Resolved command values from a pilot: task + behavior (+ optional preset
    name applied to the phase offsets, + optional sequence trigger)."""

    task: TaskCommand = field(default_factory=TaskCommand)
    behavior: BehaviorCommand = field(default_factory=BehaviorCommand)
    preset: str | None = None
    sequence: str | None = None
    seq_no: int = 0


def clamp_pilot_command(cmd: PilotCommand) -> tuple[PilotCommand, dict]:
    """Clamp all 11 command scalars to their ranges; returns (clamped, report).

    report maps field name -> [raw, clamped] for every field that moved.
    Clamping an already-clamped command is the identity.
    """
    task_vals = {f: getattr(cmd.task, f) for f in TASK_FIELDS}
    beh_vals = {f: getattr(cmd.behavior, f) for f in BEHAVIOR_FIELDS}
    t_clamped, t_report = clamp_task(task_vals)
    b_clamped, b_report = clamp_behavior(beh_vals)
    out = PilotCommand(
        task=TaskCommand(**t_clamped),
        behavior=BehaviorCommand(**b_clamped),
        preset=cmd.preset,
        sequence=cmd.sequence,
        seq_no=cmd.seq_no,
    )
    if out.preset is not None:
        t1, t2, t3 = gait_preset(out.preset)
        out.behavior.theta1, out.behavior.theta2, out.behavior.theta3 = t1, t2, t3
    report = {**t_report, **b_report}
    return out, report


def encode_message(msg_type: str, payload: dict) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": msg_type, **payload})


def decode_message(text: str) -> dict:
    msg = json.loads(text)
    if not isinstance(msg, dict) or "type" not in msg:
        raise ValueError("message must be a JSON object with a 'type' field")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ValueError(f"unsupported protocol version {msg.get('v')!r}")
    return msg


def command_from_message(msg: dict) -> PilotCommand:
    """Parse a `command` message; missing fields keep their defaults."""
    task = TaskCommand(**{f: float(msg.get("task", {}).get(f, 0.0)) for f in TASK_FIELDS})
    beh_in = msg.get("behavior", {})
    behavior = BehaviorCommand()
    for f in BEHAVIOR_FIELDS:
        if f in beh_in:
            setattr(behavior, f, float(beh_in[f]))
    preset = msg.get("preset")
    sequence = msg.get("sequence")
    if sequence is not None and sequence not in SEQUENCES:
        raise ValueError(f"unknown sequence {sequence!r}; valid: {', '.join(SEQUENCES)}")
    return PilotCommand(task=task, behavior=behavior, preset=preset, sequence=sequence, seq_no=int(msg.get("seq", 0)))


def command_payload(cmd: PilotCommand) -> dict:
    return {
        "task": {f: getattr(cmd.task, f) for f in TASK_FIELDS},
        "behavior": {f: getattr(cmd.behavior, f) for f in BEHAVIOR_FIELDS},
        "preset": cmd.preset,
        "sequence": cmd.sequence,
        "seq": cmd.seq_no,
    }


class SessionLogWriter:
    """Append-only JSONL session log of commands and state frames."""

    def __init__(self, path: str):
        self._f = open(path, "a", buffering=1)

    def write(self, record: dict) -> None:
        self._f.write(json.dumps(record) + "\n")

    def close(self) -> None:
        self._f.close()


def read_session_log(path: str) -> tuple[list, int]:
    """Parse a session log; returns (records, n_corrupt_lines_skipped)."""
    records, skipped = [], 0
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                skipped += 1
    return records, skipped


def replay_frames(records: list) -> list:
    """State frames from a session log in time order (no simulator involved)."""
    return [r for r in records if r.get("type") == "state"]
