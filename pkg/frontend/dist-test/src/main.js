/**
 * Cockpit wiring: websocket session, widgets (sliders bound exactly to the
 * command ranges), on-screen joystick + Gamepad API, preset and sequence
 * buttons, live canvases, and offline replay of session logs.
 *
 * Commands are sent only on user input or preset/sequence activation, never
 * from the render loop.
 */
import { commandFromInputs, neutralSticks, sticksFromGamepad } from "./mapping.js";
import { describeClamp, UiSessionModel } from "./model.js";
import { BEHAVIOR_RANGES, defaultCommand, encodeCommand, GAIT_PRESETS, } from "./protocol.js";
import { drawContactTraces, drawRewardStrip, drawRobot } from "./render.js";
const model = new UiSessionModel();
let ws = null;
let mode = "velocity";
let preset = "trot";
const knobs = { ...defaultCommand().behavior };
let sticks = neutralSticks();
let usingGamepad = false;
const $ = (id) => document.getElementById(id);
function sendCommand(sequence = null) {
    if (!ws || ws.readyState !== WebSocket.OPEN)
        return;
    const cmd = commandFromInputs(sticks, { behavior: knobs }, preset, mode, model.nextSeq());
    cmd.sequence = sequence;
    ws.send(encodeCommand(cmd));
    $("draft").textContent = JSON.stringify(cmd, (_, v) => (typeof v === "number" ? +v.toFixed(3) : v));
}
function connect() {
    const url = $("server").value;
    model.connection = "connecting";
    ws = new WebSocket(url);
    ws.onopen = () => {
        model.connection = "connected";
        sendCommand();
    };
    ws.onmessage = (ev) => {
        try {
            const msg = model.handleMessage(String(ev.data), performance.now());
            if (msg.kind === "clamp_notice")
                $("clamps").textContent = describeClamp(model.clampNotices);
        }
        catch (e) {
            console.error("bad message", e);
        }
    };
    ws.onclose = () => {
        model.connection = "disconnected";
    };
    ws.onerror = () => {
        model.connection = "disconnected";
    };
}
// ------------------------------------------------------------------- widgets
function buildSliders() {
    const host = $("sliders");
    Object.keys(BEHAVIOR_RANGES).forEach((name) => {
        const [lo, hi] = BEHAVIOR_RANGES[name];
        const row = document.createElement("div");
        row.className = "slider-row";
        const label = document.createElement("label");
        label.textContent = name;
        const input = document.createElement("input");
        input.type = "range";
        input.min = String(lo);
        input.max = String(hi);
        input.step = "0.001";
        input.value = String(knobs[name]);
        input.dataset.field = name;
        const val = document.createElement("span");
        val.textContent = Number(knobs[name]).toFixed(2);
        input.addEventListener("input", () => {
            knobs[name] = Number(input.value);
            val.textContent = Number(input.value).toFixed(2);
            if (name.startsWith("theta"))
                preset = null; // manual phases override the preset
            sendCommand();
        });
        row.append(label, input, val);
        host.append(row);
    });
}
function buildPresets() {
    const host = $("presets");
    Object.keys(GAIT_PRESETS).forEach((name) => {
        const b = document.createElement("button");
        b.textContent = name;
        b.addEventListener("click", () => {
            preset = name;
            const [t1, t2, t3] = GAIT_PRESETS[name];
            knobs.theta1 = t1;
            knobs.theta2 = t2;
            knobs.theta3 = t3;
            syncSliders();
            sendCommand();
        });
        host.append(b);
    });
}
function syncSliders() {
    document.querySelectorAll("#sliders input").forEach((input) => {
        const f = input.dataset.field;
        input.value = String(knobs[f]);
        input.nextElementSibling.textContent = Number(knobs[f]).toFixed(2);
    });
}
// ------------------------------------------------------------------ joystick
function buildJoystick() {
    const canvas = $("joystick");
    const ctx = canvas.getContext("2d");
    let active = false;
    const draw = () => {
        ctx.clearRect(0, 0, canvas.width, canvas.height);
        ctx.strokeStyle = "#556";
        ctx.strokeRect(1, 1, canvas.width - 2, canvas.height - 2);
        const x = canvas.width / 2 + sticks.leftX * (canvas.width / 2 - 10);
        const y = canvas.height / 2 + sticks.leftY * (canvas.height / 2 - 10);
        ctx.fillStyle = "#529ee0";
        ctx.beginPath();
        ctx.arc(x, y, 8, 0, 2 * Math.PI);
        ctx.fill();
    };
    const update = (ev) => {
        const r = canvas.getBoundingClientRect();
        sticks.leftX = Math.max(-1, Math.min(1, ((ev.clientX - r.left) / r.width) * 2 - 1));
        sticks.leftY = Math.max(-1, Math.min(1, ((ev.clientY - r.top) / r.height) * 2 - 1));
        draw();
        sendCommand();
    };
    canvas.addEventListener("pointerdown", (e) => {
        active = true;
        canvas.setPointerCapture(e.pointerId);
        update(e);
    });
    canvas.addEventListener("pointermove", (e) => active && update(e));
    canvas.addEventListener("pointerup", () => {
        active = false;
        sticks.leftX = 0;
        sticks.leftY = 0;
        draw();
        sendCommand();
    });
    const yaw = $("yaw");
    yaw.addEventListener("input", () => {
        sticks.rightX = -Number(yaw.value);
        sendCommand();
    });
    draw();
}
// ------------------------------------------------------------------- gamepad
function pollGamepad() {
    const pads = navigator.getGamepads?.() ?? [];
    const pad = Array.from(pads).find((p) => p && p.connected);
    if (pad) {
        const next = sticksFromGamepad(pad);
        const changed = JSON.stringify(next) !== JSON.stringify(sticks);
        if (changed) {
            sticks = next;
            usingGamepad = true;
            sendCommand();
        }
        if (pad.buttons[4]?.pressed)
            setMode("velocity");
        if (pad.buttons[5]?.pressed)
            setMode("style");
    }
}
function setMode(m) {
    if (mode !== m) {
        mode = m;
        $("mode").textContent = `mode: ${mode}`;
        sendCommand();
    }
}
// -------------------------------------------------------------------- render
function renderLoop() {
    const frame = model.lastFrame;
    if (frame) {
        drawRobot($("side").getContext("2d"), frame, "side");
        drawRobot($("top").getContext("2d"), frame, "top");
        drawContactTraces($("traces").getContext("2d"), model.traces, model.traceHorizonS);
        drawRewardStrip($("rewards"), frame);
        $("estimate").textContent =
            `v est: [${frame.estimate.slice(0, 3).map((v) => v.toFixed(2)).join(", ")}] m/s   ` +
                `friction est: ${frame.estimate[3]?.toFixed(2)}  seq: ${frame.sequence ?? "-"}`;
    }
    const badge = $("status");
    badge.className = model.connection + (model.isStale(performance.now()) ? " stale" : "");
    badge.textContent = model.isStale(performance.now()) ? `${model.connection} (stale)` : model.connection;
    document.querySelectorAll("button.needs-conn").forEach((b) => {
        b.disabled = !model.controlsEnabled();
    });
    pollGamepad();
    requestAnimationFrame(renderLoop);
}
// -------------------------------------------------------------------- replay
let replayTimer = null;
function startReplay(text) {
    const info = model.loadReplay(text);
    $("events").textContent = `replay loaded: ${info.frames} frames, ${info.commands} commands, ${info.skipped} skipped`;
    if (replayTimer !== null)
        clearInterval(replayTimer);
    const t0 = model.replayFrames.length ? model.replayFrames[0].t : 0;
    const start = performance.now();
    replayTimer = window.setInterval(() => {
        const t = t0 + (performance.now() - start) / 1000;
        model.seekReplay(t);
        if (model.replayIndex >= model.replayFrames.length && replayTimer !== null) {
            clearInterval(replayTimer);
            replayTimer = null;
        }
    }, 33);
}
// ---------------------------------------------------------------------- init
window.addEventListener("DOMContentLoaded", () => {
    buildSliders();
    buildPresets();
    buildJoystick();
    $("connect").addEventListener("click", connect);
    $("mode-toggle").addEventListener("click", () => setMode(mode === "velocity" ? "style" : "velocity"));
    ["leap", "dance", "stop"].forEach((seq) => {
        $(`seq-${seq}`).addEventListener("click", () => sendCommand(seq));
    });
    $("replay-file").addEventListener("change", async (ev) => {
        const file = ev.target.files?.[0];
        if (file)
            startReplay(await file.text());
    });
    renderLoop();
});
