from .protocol import (
    PROTOCOL_VERSION,
    PilotCommand,
    clamp_pilot_command,
    decode_message,
    encode_message,
    SessionLogWriter,
    read_session_log,
)
from .service import TeleopService, TeleopConfig

__all__ = [
    "PROTOCOL_VERSION",
    "PilotCommand",
    "clamp_pilot_command",
    "decode_message",
    "encode_message",
    "SessionLogWriter",
    "read_session_log",
    "TeleopService",
    "TeleopConfig",
]
