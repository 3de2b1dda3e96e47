/**
 * Session model: connection state, latest telemetry, pending command draft,
 * rolling contact-trace history for the plots, and offline replay of recorded
 * session logs. Pure state + transitions; rendering and sockets live
 * elsewhere so this is directly testable.
 */
import { decodeServerMessage } from "./protocol.js";
export class UiSessionModel {
    constructor() {
        this.connection = "disconnected";
        this.lastFrame = null;
        this.lastFrameAt = 0; // wall-clock ms of last frame
        this.clampNotices = {};
        this.events = [];
        this.traces = [];
        this.traceHorizonS = 4.0;
        this.seq = 0;
        // replay state
        this.replayFrames = [];
        this.replayCommands = [];
        this.replayIndex = 0;
    }
    handleMessage(text, nowMs) {
        const msg = decodeServerMessage(text);
        if (msg.kind === "state")
            this.ingestFrame(msg.frame, nowMs);
        else if (msg.kind === "clamp_notice")
            this.clampNotices = { ...this.clampNotices, ...msg.fields };
        else if (msg.kind === "session_event")
            this.events.push(String(msg.event));
        return msg;
    }
    ingestFrame(frame, nowMs) {
        this.lastFrame = frame;
        this.lastFrameAt = nowMs;
        this.traces.push({ t: frame.t, desired: frame.desired_contact, measured: frame.foot_contact });
        const cutoff = frame.t - this.traceHorizonS;
        while (this.traces.length > 0 && this.traces[0].t < cutoff)
            this.traces.shift();
    }
    /** Stale badge: no frame for more than a second while connected. */
    isStale(nowMs) {
        return this.connection === "connected" && this.lastFrame !== null && nowMs - this.lastFrameAt > 1000;
    }
    controlsEnabled() {
        return this.connection === "connected";
    }
    nextSeq() {
        return ++this.seq;
    }
    // ---------------------------------------------------------------- replay
    loadReplay(jsonl) {
        this.replayFrames = [];
        this.replayCommands = [];
        let skipped = 0;
        for (const line of jsonl.split("\n")) {
            const s = line.trim();
            if (!s)
                continue;
            let rec;
            try {
                rec = JSON.parse(s);
            }
            catch {
                skipped++;
                continue;
            }
            if (rec.type === "state")
                this.replayFrames.push(rec);
            else if (rec.type === "command")
                this.replayCommands.push({ t: rec.t, cmd: rec });
        }
        this.connection = "replay";
        this.replayIndex = 0;
        this.traces = [];
        return { frames: this.replayFrames.length, commands: this.replayCommands.length, skipped };
    }
    /** Advance replay to session time t, ingesting any frames passed over. */
    seekReplay(t) {
        while (this.replayIndex < this.replayFrames.length && this.replayFrames[this.replayIndex].t <= t) {
            this.ingestFrame(this.replayFrames[this.replayIndex], 0);
            this.replayIndex++;
        }
    }
    /** Command timeline for plotting (frequency and phase offsets over time). */
    commandTimeline() {
        const out = [];
        for (const f of this.replayFrames) {
            const b = f.commands.behavior;
            out.push({
                t: f.t,
                freq: b.freq_hz,
                theta: [b.theta1, b.theta2, b.theta3],
                vx: f.commands.task.vx_mps,
            });
        }
        return out;
    }
}
export function describeClamp(notices) {
    const parts = Object.entries(notices).map(([k, [raw, v]]) => `${k}: ${raw.toFixed(2)} -> ${v.toFixed(2)}`);
    return parts.join(", ");
}
