import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";
import { scriptedSequence } from "../src/schedules.js";
const here = dirname(fileURLToPath(import.meta.url));
function loadFixture(name) {
    return JSON.parse(readFileSync(join(here, "..", "..", "fixtures", `${name}_schedule.json`), "utf-8"));
}
for (const name of ["leap", "dance"]) {
    test(`${name} schedule matches the service fixture sample for sample`, () => {
        const fixture = loadFixture(name);
        const ours = scriptedSequence(name, fixture.control_hz);
        assert.equal(ours.times.length, fixture.times.length, "sample count");
        for (let i = 0; i < ours.times.length; i++) {
            assert.ok(Math.abs(ours.times[i] - fixture.times[i]) < 1e-6, `t[${i}]`);
            for (let j = 0; j < 3; j++) {
                assert.ok(Math.abs(ours.task[i][j] - fixture.task[i][j]) < 1e-6, `task[${i}][${j}]`);
            }
            for (let j = 0; j < 8; j++) {
                assert.ok(Math.abs(ours.behavior[i][j] - fixture.behavior[i][j]) < 1e-6, `behavior[${i}][${j}]`);
            }
        }
    });
}
test("leap timeline shows the 2->4 Hz ramp then 2 Hz pronk", () => {
    const s = scriptedSequence("leap");
    const acc = s.times.filter((t) => t < 2.0).length;
    assert.ok(Math.abs(s.behavior[0][3] - 2.0) < 0.05);
    assert.ok(Math.abs(s.behavior[acc - 1][3] - 4.0) < 0.05);
    const pronk = s.behavior.filter((b) => b[0] === 0 && b[1] === 0 && b[2] === 0);
    assert.ok(Math.abs(pronk.length - 50) <= 1); // 1 s at 50 Hz
    for (const b of pronk)
        assert.equal(b[3], 2.0);
});
test("dance uses only the beat-compatible frequencies", () => {
    const s = scriptedSequence("dance");
    const freqs = new Set(s.behavior.map((b) => b[3]));
    assert.deepEqual([...freqs].sort(), [1.5, 3.0]);
});
