/**
 * Input mapping: joystick axes, trigger pairs, knobs and preset buttons
 * resolve to a full PilotCommand. Two control modes split the many gait
 * parameters across the same physical sticks (toggled by a bumper/button),
 * mirroring the handheld-remote layout the service was designed around.
 *
 * The mapping is data driven (MAPPING_TABLE) so it can be displayed in the
 * UI and adjusted in one place.
 */
import { BEHAVIOR_RANGES, clampCommand, defaultCommand, GAIT_PRESETS, TASK_RANGES, } from "./protocol.js";
/** Which physical input drives which parameter in each mode. */
export const MAPPING_TABLE = {
    velocity: {
        leftY: { target: "task.vx_mps", invert: true },
        leftX: { target: "task.vy_mps", invert: false },
        rightX: { target: "task.wz_radps", invert: true },
        rightY: { target: "behavior.body_height_m", invert: true },
        triggers: { target: "behavior.freq_hz" },
    },
    style: {
        leftY: { target: "behavior.footswing_height_m", invert: true },
        leftX: { target: "behavior.stance_width_m", invert: false },
        rightY: { target: "behavior.pitch_rad", invert: true },
        rightX: { target: "behavior.body_height_m", invert: false },
        triggers: { target: "behavior.freq_hz" },
    },
};
function axisToRange(axis, lo, hi) {
    const t = (axis + 1) / 2; // -1..1 -> 0..1
    return lo + t * (hi - lo);
}
function setPath(cmd, path, value) {
    const [section, field] = path.split(".");
    if (section === "task")
        cmd.task[field] = value;
    else
        cmd.behavior[field] = value;
}
function rangeOf(path) {
    const [section, field] = path.split(".");
    return section === "task"
        ? TASK_RANGES[field]
        : BEHAVIOR_RANGES[field];
}
/**
 * Resolve widget/gamepad state to a concrete command. Stick axes map onto the
 * full parameter range of whatever they drive in the active mode; knobs pass
 * through; preset buttons overwrite the phase offsets exactly.
 */
export function commandFromInputs(sticks, knobs, preset, mode, seq) {
    const cmd = defaultCommand();
    cmd.behavior = { ...knobs.behavior };
    cmd.preset = preset;
    cmd.seq = seq;
    const table = MAPPING_TABLE[mode];
    for (const [stick, spec] of Object.entries(table)) {
        if (stick === "triggers") {
            const [lo, hi] = rangeOf(spec.target);
            const t = Math.max(sticks.rightTrigger, 0) - Math.max(sticks.leftTrigger, 0);
            setPath(cmd, spec.target, axisToRange(t, lo, hi));
            continue;
        }
        const axis = sticks[stick];
        if (axis === undefined || Math.abs(axis) < 1e-9)
            continue; // neutral stick: keep knob value
        const [lo, hi] = rangeOf(spec.target);
        setPath(cmd, spec.target, axisToRange(spec.invert ? -axis : axis, lo, hi));
    }
    if (preset && GAIT_PRESETS[preset]) {
        const [t1, t2, t3] = GAIT_PRESETS[preset];
        cmd.behavior.theta1 = t1;
        cmd.behavior.theta2 = t2;
        cmd.behavior.theta3 = t3;
    }
    return clampCommand(cmd);
}
export function neutralSticks() {
    return { leftX: 0, leftY: 0, rightX: 0, rightY: 0, leftTrigger: 0, rightTrigger: 0 };
}
/** Gamepad API adapter: standard layout, with a deadzone. */
export function sticksFromGamepad(pad, deadzone = 0.08) {
    const dz = (x) => (Math.abs(x) < deadzone ? 0 : x);
    return {
        leftX: dz(pad.axes[0] ?? 0),
        leftY: dz(pad.axes[1] ?? 0),
        rightX: dz(pad.axes[2] ?? 0),
        rightY: dz(pad.axes[3] ?? 0),
        leftTrigger: pad.buttons[6]?.value ?? 0,
        rightTrigger: pad.buttons[7]?.value ?? 0,
    };
}
