import assert from "node:assert/strict";
import { test } from "node:test";

import { commandFromInputs, neutralSticks } from "../src/mapping.js";
import { BEHAVIOR_RANGES, BehaviorCommand, defaultCommand, TASK_RANGES, TaskCommand } from "../src/protocol.js";

const knobs = () => ({ behavior: { ...defaultCommand().behavior } });

test("neutral inputs give zero velocity and the default gait", () => {
  const cmd = commandFromInputs(neutralSticks(), knobs(), "trot", "velocity", 1);
  assert.equal(cmd.task.vx_mps, 0);
  assert.equal(cmd.task.vy_mps, 0);
  assert.equal(cmd.task.wz_radps, 0);
  assert.deepEqual([cmd.behavior.theta1, cmd.behavior.theta2, cmd.behavior.theta3], [0.5, 0, 0]);
});

test("full forward stick commands the slider maximum vx", () => {
  const sticks = neutralSticks();
  sticks.leftY = -1; // stick up
  const cmd = commandFromInputs(sticks, knobs(), "trot", "velocity", 1);
  assert.equal(cmd.task.vx_mps, TASK_RANGES.vx_mps[1]); // 3.0 m/s
});

test("preset buttons emit exact phase offsets", () => {
  for (const [name, expected] of [
    ["bound", [0, 0.5, 0]],
    ["pace", [0, 0, 0.5]],
    ["pronk", [0, 0, 0]],
    ["gallop", [0.25, 0, 0]],
  ] as [string, number[]][]) {
    const cmd = commandFromInputs(neutralSticks(), knobs(), name, "velocity", 1);
    assert.deepEqual([cmd.behavior.theta1, cmd.behavior.theta2, cmd.behavior.theta3], expected);
  }
});

test("mode toggle reroutes the sticks", () => {
  const sticks = neutralSticks();
  sticks.leftY = -1;
  const vel = commandFromInputs(sticks, knobs(), "trot", "velocity", 1);
  const style = commandFromInputs(sticks, knobs(), "trot", "style", 1);
  assert.equal(vel.task.vx_mps, 3.0);
  assert.equal(style.task.vx_mps, 0.0); // style mode: stick drives footswing instead
  assert.equal(style.behavior.footswing_height_m, BEHAVIOR_RANGES.footswing_height_m[1]);
});

test("emitted values never leave the command ranges (random widget fuzz)", () => {
  let a = 123456789;
  const rnd = () => {
    a = (a * 1103515245 + 12345) % 2147483648;
    return a / 2147483648;
  };
  for (let i = 0; i < 3000; i++) {
    const sticks = {
      leftX: rnd() * 4 - 2,
      leftY: rnd() * 4 - 2,
      rightX: rnd() * 4 - 2,
      rightY: rnd() * 4 - 2,
      leftTrigger: rnd() * 2,
      rightTrigger: rnd() * 2,
    };
    const k = knobs();
    k.behavior.freq_hz = rnd() * 10;
    k.behavior.body_height_m = rnd() * 2;
    const mode = rnd() < 0.5 ? "velocity" : "style";
    const cmd = commandFromInputs(sticks, k, rnd() < 0.5 ? "trot" : null, mode as never, i);
    for (const key of Object.keys(TASK_RANGES) as (keyof TaskCommand)[]) {
      const [lo, hi] = TASK_RANGES[key];
      assert.ok(cmd.task[key] >= lo - 1e-12 && cmd.task[key] <= hi + 1e-12, `${key}`);
    }
    for (const key of Object.keys(BEHAVIOR_RANGES) as (keyof BehaviorCommand)[]) {
      if (key.startsWith("theta")) {
        assert.ok(cmd.behavior[key] >= 0 && cmd.behavior[key] < 1, key);
      } else {
        const [lo, hi] = BEHAVIOR_RANGES[key];
        assert.ok(cmd.behavior[key] >= lo - 1e-12 && cmd.behavior[key] <= hi + 1e-12, `${key}=${cmd.behavior[key]}`);
      }
    }
  }
});

test("triggers drive stepping frequency across its exact range", () => {
  const sticks = neutralSticks();
  sticks.rightTrigger = 1;
  let cmd = commandFromInputs(sticks, knobs(), "trot", "velocity", 1);
  assert.equal(cmd.behavior.freq_hz, BEHAVIOR_RANGES.freq_hz[1]);
  sticks.rightTrigger = 0;
  sticks.leftTrigger = 1;
  cmd = commandFromInputs(sticks, knobs(), "trot", "velocity", 1);
  assert.equal(cmd.behavior.freq_hz, BEHAVIOR_RANGES.freq_hz[0]);
});
