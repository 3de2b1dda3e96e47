/**
 * Open-loop command schedules for the scripted maneuvers, mirrored from the
 * service so the replay timeline can be drawn without a round trip. Tests
 * pin these against fixtures exported by the backend, sample for sample.
 */

import { GAIT_PRESETS } from "./protocol.js";

export interface Schedule {
  times: number[];
  task: number[][]; // [vx, vy, wz]
  behavior: number[][]; // [t1, t2, t3, f, h, pitch, width, swing]
}

export function scriptedSequence(name: "leap" | "dance", controlHz = 50.0): Schedule {
  const dt = 1.0 / controlHz;
  const times: number[] = [];
  const task: number[][] = [];
  const behavior: number[][] = [];

  if (name === "leap") {
    const tAcc = 2.0,
      tPronk = 1.0,
      tDec = 2.0;
    const total = tAcc + tPronk + tDec;
    for (let i = 0; i * dt < total - 1e-9; i++) {
      const t = i * dt;
      let theta: [number, number, number], v: number, f: number;
      if (t < tAcc) {
        const frac = t / tAcc;
        theta = GAIT_PRESETS.trot;
        v = 3.0 * frac;
        f = 2.0 + 2.0 * frac;
      } else if (t < tAcc + tPronk) {
        theta = GAIT_PRESETS.pronk;
        v = 3.0;
        f = 2.0;
      } else {
        const frac = (t - tAcc - tPronk) / tDec;
        theta = GAIT_PRESETS.trot;
        v = 3.0 * (1.0 - frac);
        f = 4.0 - 2.0 * frac;
      }
      times.push(t);
      task.push([v, 0.0, 0.0]);
      behavior.push([theta[0], theta[1], theta[2], f, 0.3, 0.0, 0.25, 0.09]);
    }
    return { times, task, behavior };
  }

  // dance: 90 bpm, 8 two-beat segments
  const beat = 60.0 / 90.0;
  const segments: [keyof typeof GAIT_PRESETS, number, number, number, number][] = [
    ["trot", 3.0, 0.3, 0.0, 0.0],
    ["pronk", 1.5, 0.24, 0.0, 0.0],
    ["trot", 3.0, 0.34, 0.3, 0.0],
    ["pace", 1.5, 0.3, 0.0, 1.0],
    ["bound", 3.0, 0.26, -0.3, 0.0],
    ["gallop", 3.0, 0.3, 0.0, -1.0],
    ["pronk", 1.5, 0.34, 0.0, 0.0],
    ["trot", 3.0, 0.3, 0.0, 0.0],
  ];
  const total = segments.length * 2 * beat;
  for (let i = 0; i * dt < total - 1e-9; i++) {
    const t = i * dt;
    const seg = segments[Math.min(Math.floor(t / (2 * beat)), segments.length - 1)];
    const theta = GAIT_PRESETS[seg[0]];
    times.push(t);
    task.push([seg[3], 0.0, seg[4]]);
    behavior.push([theta[0], theta[1], theta[2], seg[1], seg[2], 0.0, 0.25, 0.12]);
  }
  return { times, task, behavior };
}
