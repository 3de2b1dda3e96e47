import assert from "node:assert/strict";
import { test } from "node:test";
import { UiSessionModel } from "../src/model.js";
const stateMsg = (t, extra = {}) => JSON.stringify({
    v: 1,
    type: "state",
    t,
    base_pos: [0, 0, 0.3],
    base_quat: [1, 0, 0, 0],
    q: new Array(12).fill(0),
    foot_contact: [1, 1, 0, 0],
    foot_force_z: [40, 40, 0, 0],
    foot_pos_w: [],
    desired_contact: [1, 1, 0, 0],
    estimate: [0, 0, 0, 0.8],
    rewards: {},
    reward_total: 0.01,
    commands: {
        task: { vx_mps: 0, vy_mps: 0, wz_radps: 0 },
        behavior: {
            theta1: 0, theta2: 0, theta3: 0, freq_hz: 2,
            body_height_m: 0.3, pitch_rad: 0, stance_width_m: 0.25, footswing_height_m: 0.09,
        },
    },
    sequence: null,
    ...extra,
});
test("frames accumulate into bounded traces", () => {
    const m = new UiSessionModel();
    for (let i = 0; i < 400; i++)
        m.handleMessage(stateMsg(i * 0.05), i);
    assert.ok(m.traces.length > 0);
    const span = m.traces[m.traces.length - 1].t - m.traces[0].t;
    assert.ok(span <= m.traceHorizonS + 0.051, `span ${span}`);
    assert.equal(m.lastFrame.t, 399 * 0.05);
});
test("stale detection after one second without frames", () => {
    const m = new UiSessionModel();
    m.connection = "connected";
    m.handleMessage(stateMsg(0), 1000);
    assert.equal(m.isStale(1900), false);
    assert.equal(m.isStale(2100), true);
});
test("controls disabled unless connected", () => {
    const m = new UiSessionModel();
    assert.equal(m.controlsEnabled(), false);
    m.connection = "connected";
    assert.equal(m.controlsEnabled(), true);
    m.connection = "replay";
    assert.equal(m.controlsEnabled(), false);
});
test("pronk frames: all four desired-contact traces overlap", () => {
    const m = new UiSessionModel();
    m.handleMessage(stateMsg(0.1, { desired_contact: [0.7, 0.7, 0.7, 0.7] }), 0);
    const p = m.traces[0];
    assert.ok(p.desired.every((v) => v === p.desired[0]));
});
test("replay loader counts frames and skips corrupt lines", () => {
    const m = new UiSessionModel();
    const lines = [
        JSON.stringify({ t: 0.0, type: "state", ...JSON.parse(stateMsg(0.0)) }),
        "corrupt {{{",
        JSON.stringify({ t: 0.05, type: "command", task: {} }),
        JSON.stringify({ t: 0.1, type: "state", ...JSON.parse(stateMsg(0.1)) }),
    ].join("\n");
    const info = m.loadReplay(lines);
    assert.equal(info.frames, 2);
    assert.equal(info.commands, 1);
    assert.equal(info.skipped, 1);
    assert.equal(m.connection, "replay");
});
test("replay seek ingests frames in time order", () => {
    const m = new UiSessionModel();
    const lines = [0.0, 0.05, 0.1, 0.15]
        .map((t) => JSON.stringify({ ...JSON.parse(stateMsg(t)), type: "state" }))
        .join("\n");
    m.loadReplay(lines);
    m.seekReplay(0.07);
    assert.equal(m.traces.length, 2);
    m.seekReplay(1.0);
    assert.equal(m.traces.length, 4);
});
test("command timeline extracts frequency ramps for the plot", () => {
    const m = new UiSessionModel();
    const mk = (t, f) => {
        const rec = JSON.parse(stateMsg(t));
        rec.commands.behavior.freq_hz = f;
        return JSON.stringify(rec);
    };
    m.loadReplay([mk(0, 2.0), mk(0.5, 3.0), mk(1.0, 4.0)].join("\n"));
    const tl = m.commandTimeline();
    assert.deepEqual(tl.map((x) => x.freq), [2.0, 3.0, 4.0]);
});
