import json
import time

import numpy as np
import pytest

from quadgait.gait import BEHAVIOR_FIELDS, TASK_FIELDS, BehaviorCommand, TaskCommand
from quadgait.teleop.protocol import (
    PROTOCOL_VERSION,
    PilotCommand,
    clamp_pilot_command,
    command_from_message,
    command_payload,
    decode_message,
    encode_message,
    read_session_log,
    replay_frames,
    SessionLogWriter,
)
from quadgait.teleop.wsserver import WsClient, WsServer


def random_pilot_command(rng) -> PilotCommand:
    return PilotCommand(
        task=TaskCommand(*rng.uniform(-8, 8, 3)),
        behavior=BehaviorCommand(*rng.uniform(-2, 3, 8)),
    )


def test_clamp_reports_moved_fields():
    cmd = PilotCommand(behavior=BehaviorCommand(body_height_m=0.9))
    clamped, report = clamp_pilot_command(cmd)
    assert clamped.behavior.body_height_m == 0.45
    assert report["body_height_m"] == (0.9, 0.45)


def test_clamp_idempotent_fuzz():
    rng = np.random.default_rng(0)
    for _ in range(10000):
        cmd = random_pilot_command(rng)
        once, report1 = clamp_pilot_command(cmd)
        twice, report2 = clamp_pilot_command(once)
        assert report2 == {}
        assert twice == once


def test_clamp_applies_preset_exactly():
    cmd = PilotCommand(preset="bound", behavior=BehaviorCommand(theta1=0.3, theta2=0.1, theta3=0.9))
    clamped, _ = clamp_pilot_command(cmd)
    assert (clamped.behavior.theta1, clamped.behavior.theta2, clamped.behavior.theta3) == (0.0, 0.5, 0.0)


def test_message_round_trip_within_tolerance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        cmd, _ = clamp_pilot_command(random_pilot_command(rng))
        text = encode_message("command", command_payload(cmd))
        back = command_from_message(decode_message(text))
        for f in TASK_FIELDS:
            assert getattr(back.task, f) == pytest.approx(getattr(cmd.task, f), abs=1e-6)
        for f in BEHAVIOR_FIELDS:
            assert getattr(back.behavior, f) == pytest.approx(getattr(cmd.behavior, f), abs=1e-6)


def test_decode_rejects_bad_version():
    with pytest.raises(ValueError, match="version"):
        decode_message(json.dumps({"v": 99, "type": "command"}))


def test_decode_rejects_unknown_sequence():
    msg = decode_message(json.dumps({"v": 1, "type": "command", "sequence": "moonwalk"}))
    with pytest.raises(ValueError, match="moonwalk"):
        command_from_message(msg)


def test_session_log_round_trip(tmp_path):
    path = str(tmp_path / "session.jsonl")
    w = SessionLogWriter(path)
    w.write({"t": 0.0, "type": "state", "base_pos": [0, 0, 0.3]})
    w.write({"t": 0.02, "type": "command", "task": {}})
    w.write({"t": 0.05, "type": "state", "base_pos": [0, 0, 0.31]})
    w.close()
    records, skipped = read_session_log(path)
    assert skipped == 0
    assert len(records) == 3
    assert len(replay_frames(records)) == 2


def test_session_log_skips_corrupt_lines(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"t": 0, "type": "state"}\nnot json at all\n{"t": 1, "type": "state"}\n')
    records, skipped = read_session_log(str(path))
    assert skipped == 1
    assert len(records) == 2


def test_empty_session_log(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    records, skipped = read_session_log(str(path))
    assert records == [] and skipped == 0


# ------------------------------------------------------------------ websocket


def test_ws_echo_round_trip():
    received = []
    server = WsServer("127.0.0.1", 0, on_message=lambda c, t: received.append(t) or c.send_text("ack:" + t))
    server.start()
    try:
        client = WsClient("127.0.0.1", server.port)
        client.send_text('{"v": 1, "type": "command"}')
        reply = client.recv_text(timeout=2.0)
        assert reply == 'ack:{"v": 1, "type": "command"}'
        client.close()
    finally:
        server.stop()
    assert received == ['{"v": 1, "type": "command"}']


def test_ws_large_frame():
    server = WsServer("127.0.0.1", 0, on_message=lambda c, t: c.send_text(t))
    server.start()
    try:
        client = WsClient("127.0.0.1", server.port)
        big = "x" * 70000  # forces the 64-bit length path
        client.send_text(big)
        assert client.recv_text(timeout=3.0) == big
        client.close()
    finally:
        server.stop()


def test_ws_broadcast_to_multiple_clients():
    server = WsServer("127.0.0.1", 0, on_message=lambda c, t: None)
    server.start()
    try:
        a = WsClient("127.0.0.1", server.port)
        b = WsClient("127.0.0.1", server.port)
        deadline = time.time() + 2.0
        while len(server.clients) < 2 and time.time() < deadline:
            time.sleep(0.01)
        server.broadcast("hello")
        assert a.recv_text(timeout=2.0) == "hello"
        assert b.recv_text(timeout=2.0) == "hello"
        a.close()
        b.close()
    finally:
        server.stop()
