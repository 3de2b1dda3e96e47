/**
 * Wire protocol mirror: message shapes, command ranges, clamping and
 * encode/decode. Values survive the JSON round trip to within 1e-6.
 */
export const PROTOCOL_VERSION = 1;
/** Command ranges; slider bounds must equal these exactly. */
export const BEHAVIOR_RANGES = {
    theta1: [0.0, 1.0],
    theta2: [0.0, 1.0],
    theta3: [0.0, 1.0],
    freq_hz: [1.5, 4.0],
    body_height_m: [0.1, 0.45],
    pitch_rad: [-0.4, 0.4],
    stance_width_m: [0.05, 0.45],
    footswing_height_m: [0.03, 0.25],
};
export const TASK_RANGES = {
    vx_mps: [-3.0, 3.0],
    vy_mps: [-0.6, 0.6],
    wz_radps: [-5.0, 5.0],
};
export const GAIT_PRESETS = {
    pronk: [0.0, 0.0, 0.0],
    trot: [0.5, 0.0, 0.0],
    bound: [0.0, 0.5, 0.0],
    pace: [0.0, 0.0, 0.5],
    gallop: [0.25, 0.0, 0.0],
};
export function defaultCommand() {
    return {
        task: { vx_mps: 0, vy_mps: 0, wz_radps: 0 },
        behavior: {
            theta1: 0.5,
            theta2: 0,
            theta3: 0,
            freq_hz: 3.0,
            body_height_m: 0.3,
            pitch_rad: 0,
            stance_width_m: 0.25,
            footswing_height_m: 0.09,
        },
        preset: "trot",
        sequence: null,
        seq: 0,
    };
}
const clampNum = (x, lo, hi) => Math.min(Math.max(x, lo), hi);
const wrapPhase = (x) => x - Math.floor(x);
/** Clamp every command scalar to its range (phases wrap). */
export function clampCommand(cmd) {
    const task = { ...cmd.task };
    const behavior = { ...cmd.behavior };
    for (const k of Object.keys(TASK_RANGES)) {
        const [lo, hi] = TASK_RANGES[k];
        task[k] = clampNum(task[k], lo, hi);
    }
    for (const k of Object.keys(BEHAVIOR_RANGES)) {
        if (k.startsWith("theta")) {
            behavior[k] = wrapPhase(behavior[k]);
        }
        else {
            const [lo, hi] = BEHAVIOR_RANGES[k];
            behavior[k] = clampNum(behavior[k], lo, hi);
        }
    }
    return { ...cmd, task, behavior };
}
export function encodeCommand(cmd) {
    return JSON.stringify({
        v: PROTOCOL_VERSION,
        type: "command",
        seq: cmd.seq,
        task: cmd.task,
        behavior: cmd.behavior,
        preset: cmd.preset,
        sequence: cmd.sequence,
    });
}
export function decodeServerMessage(text) {
    const msg = JSON.parse(text);
    if (msg.v !== PROTOCOL_VERSION)
        throw new Error(`unsupported protocol version ${msg.v}`);
    switch (msg.type) {
        case "state":
            return { kind: "state", frame: msg };
        case "clamp_notice":
            return { kind: "clamp_notice", seq: msg.seq, fields: msg.fields };
        case "session_event":
            return { kind: "session_event", ...msg };
        default:
            return { kind: "unknown", raw: msg };
    }
}
/** Round-trip helper used by tests and the replay loader. */
export function decodeCommand(text) {
    const msg = JSON.parse(text);
    if (msg.v !== PROTOCOL_VERSION || msg.type !== "command")
        throw new Error("not a command message");
    return {
        task: msg.task,
        behavior: msg.behavior,
        preset: msg.preset ?? null,
        sequence: msg.sequence ?? null,
        seq: msg.seq ?? 0,
    };
}
