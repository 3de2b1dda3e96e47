/**
 * Session model: connection state, latest telemetry, pending command draft,
 * rolling contact-trace history for the plots, and offline replay of recorded
 * session logs. Pure state + transitions; rendering and sockets live
 * elsewhere so this is directly testable.
 */

import { decodeServerMessage, PilotCommand, ServerMessage, StateFrame } from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "connected" | "replay";

export interface TracePoint {
  t: number;
  desired: number[];
  measured: number[];
}

export class UiSessionModel {
  connection: ConnectionState = "disconnected";
  lastFrame: StateFrame | null = null;
  lastFrameAt = 0; // wall-clock ms of last frame
  clampNotices: Record<string, [number, number]> = {};
  events: string[] = [];
  traces: TracePoint[] = [];
  traceHorizonS = 4.0;
  seq = 0;

  // replay state
  replayFrames: StateFrame[] = [];
  replayCommands: { t: number; cmd: unknown }[] = [];
  replayIndex = 0;

  handleMessage(text: string, nowMs: number): ServerMessage {
    const msg = decodeServerMessage(text);
    if (msg.kind === "state") this.ingestFrame(msg.frame, nowMs);
    else if (msg.kind === "clamp_notice") this.clampNotices = { ...this.clampNotices, ...msg.fields };
    else if (msg.kind === "session_event") this.events.push(String((msg as Record<string, unknown>).event));
    return msg;
  }

  ingestFrame(frame: StateFrame, nowMs: number): void {
    this.lastFrame = frame;
    this.lastFrameAt = nowMs;
    this.traces.push({ t: frame.t, desired: frame.desired_contact, measured: frame.foot_contact });
    const cutoff = frame.t - this.traceHorizonS;
    while (this.traces.length > 0 && this.traces[0].t < cutoff) this.traces.shift();
  }

  /** Stale badge: no frame for more than a second while connected. */
  isStale(nowMs: number): boolean {
    return this.connection === "connected" && this.lastFrame !== null && nowMs - this.lastFrameAt > 1000;
  }

  controlsEnabled(): boolean {
    return this.connection === "connected";
  }

  nextSeq(): number {
    return ++this.seq;
  }

  // ---------------------------------------------------------------- replay

  loadReplay(jsonl: string): { frames: number; commands: number; skipped: number } {
    this.replayFrames = [];
    this.replayCommands = [];
    let skipped = 0;
    for (const line of jsonl.split("\n")) {
      const s = line.trim();
      if (!s) continue;
      let rec: Record<string, unknown>;
      try {
        rec = JSON.parse(s);
      } catch {
        skipped++;
        continue;
      }
      if (rec.type === "state") this.replayFrames.push(rec as unknown as StateFrame);
      else if (rec.type === "command") this.replayCommands.push({ t: rec.t as number, cmd: rec });
    }
    this.connection = "replay";
    this.replayIndex = 0;
    this.traces = [];
    return { frames: this.replayFrames.length, commands: this.replayCommands.length, skipped };
  }

  /** Advance replay to session time t, ingesting any frames passed over. */
  seekReplay(t: number): void {
    while (this.replayIndex < this.replayFrames.length && this.replayFrames[this.replayIndex].t <= t) {
      this.ingestFrame(this.replayFrames[this.replayIndex], 0);
      this.replayIndex++;
    }
  }

  /** Command timeline for plotting (frequency and phase offsets over time). */
  commandTimeline(): { t: number; freq: number; theta: [number, number, number]; vx: number }[] {
    const out: { t: number; freq: number; theta: [number, number, number]; vx: number }[] = [];
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

export function describeClamp(notices: Record<string, [number, number]>): string {
  const parts = Object.entries(notices).map(([k, [raw, v]]) => `${k}: ${raw.toFixed(2)} -> ${v.toFixed(2)}`);
  return parts.join(", ");
}
