import assert from "node:assert/strict";
import { test } from "node:test";

import {
  BEHAVIOR_RANGES,
  BehaviorCommand,
  clampCommand,
  decodeCommand,
  decodeServerMessage,
  defaultCommand,
  encodeCommand,
  GAIT_PRESETS,
  PilotCommand,
  TASK_RANGES,
  TaskCommand,
} from "../src/protocol.js";

function mulberry32(seed: number) {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

test("wire round trip within 1e-6 per field", () => {
  const rnd = mulberry32(1);
  for (let i = 0; i < 500; i++) {
    const cmd: PilotCommand = clampCommand({
      ...defaultCommand(),
      task: { vx_mps: rnd() * 8 - 4, vy_mps: rnd() * 4 - 2, wz_radps: rnd() * 12 - 6 },
      behavior: {
        theta1: rnd() * 2,
        theta2: rnd() * 2,
        theta3: rnd() * 2,
        freq_hz: rnd() * 6,
        body_height_m: rnd(),
        pitch_rad: rnd() * 2 - 1,
        stance_width_m: rnd(),
        footswing_height_m: rnd(),
      },
      seq: i,
    });
    const back = decodeCommand(encodeCommand(cmd));
    for (const k of Object.keys(cmd.task) as (keyof TaskCommand)[]) {
      assert.ok(Math.abs(back.task[k] - cmd.task[k]) < 1e-6, `${k}`);
    }
    for (const k of Object.keys(cmd.behavior) as (keyof BehaviorCommand)[]) {
      assert.ok(Math.abs(back.behavior[k] - cmd.behavior[k]) < 1e-6, `${k}`);
    }
    assert.equal(back.seq, cmd.seq);
  }
});

test("clamp keeps every field inside its range (fuzz)", () => {
  const rnd = mulberry32(7);
  for (let i = 0; i < 2000; i++) {
    const cmd = clampCommand({
      ...defaultCommand(),
      task: { vx_mps: rnd() * 100 - 50, vy_mps: rnd() * 100 - 50, wz_radps: rnd() * 100 - 50 },
      behavior: {
        theta1: rnd() * 20 - 10,
        theta2: rnd() * 20 - 10,
        theta3: rnd() * 20 - 10,
        freq_hz: rnd() * 100 - 50,
        body_height_m: rnd() * 10 - 5,
        pitch_rad: rnd() * 10 - 5,
        stance_width_m: rnd() * 10 - 5,
        footswing_height_m: rnd() * 10 - 5,
      },
    });
    for (const k of Object.keys(TASK_RANGES) as (keyof TaskCommand)[]) {
      const [lo, hi] = TASK_RANGES[k];
      assert.ok(cmd.task[k] >= lo && cmd.task[k] <= hi, `${k}=${cmd.task[k]}`);
    }
    for (const k of Object.keys(BEHAVIOR_RANGES) as (keyof BehaviorCommand)[]) {
      if (k.startsWith("theta")) {
        assert.ok(cmd.behavior[k] >= 0 && cmd.behavior[k] < 1, `${k}=${cmd.behavior[k]}`);
      } else {
        const [lo, hi] = BEHAVIOR_RANGES[k];
        assert.ok(cmd.behavior[k] >= lo && cmd.behavior[k] <= hi, `${k}=${cmd.behavior[k]}`);
      }
    }
  }
});

test("clamp is idempotent", () => {
  const rnd = mulberry32(3);
  for (let i = 0; i < 500; i++) {
    const once = clampCommand({
      ...defaultCommand(),
      task: { vx_mps: rnd() * 50 - 25, vy_mps: rnd() * 50 - 25, wz_radps: rnd() * 50 - 25 },
    });
    assert.deepEqual(clampCommand(once), once);
  }
});

test("preset values match the service exactly", () => {
  assert.deepEqual(GAIT_PRESETS.pronk, [0.0, 0.0, 0.0]);
  assert.deepEqual(GAIT_PRESETS.trot, [0.5, 0.0, 0.0]);
  assert.deepEqual(GAIT_PRESETS.bound, [0.0, 0.5, 0.0]);
  assert.deepEqual(GAIT_PRESETS.pace, [0.0, 0.0, 0.5]);
  assert.deepEqual(GAIT_PRESETS.gallop, [0.25, 0.0, 0.0]);
});

test("server message decode dispatch", () => {
  const state = decodeServerMessage(
    JSON.stringify({ v: 1, type: "state", t: 1.0, base_pos: [0, 0, 0.3], rewards: {}, commands: {} }),
  );
  assert.equal(state.kind, "state");
  const clamp = decodeServerMessage(
    JSON.stringify({ v: 1, type: "clamp_notice", seq: 3, fields: { body_height_m: [0.9, 0.45] } }),
  );
  assert.equal(clamp.kind, "clamp_notice");
  assert.throws(() => decodeServerMessage(JSON.stringify({ v: 2, type: "state" })));
});
