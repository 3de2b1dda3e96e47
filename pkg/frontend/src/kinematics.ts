/**
 * Forward kinematics for drawing: mirrors the simulator's leg geometry
 * (abduction about x, hip flexion and knee about y, lateral hip link).
 */

export const GEOM = {
  hipX: 0.19,
  hipY: 0.095,
  hipLink: 0.08,
  thigh: 0.21,
  calf: 0.21,
  torso: { x: 0.4, y: 0.2, z: 0.12 },
};

export const FOOT_NAMES = ["FR", "FL", "RR", "RL"] as const;
const SIDE = [-1, 1, -1, 1];
const HIP = [
  [GEOM.hipX, -GEOM.hipY, 0],
  [GEOM.hipX, GEOM.hipY, 0],
  [-GEOM.hipX, -GEOM.hipY, 0],
  [-GEOM.hipX, GEOM.hipY, 0],
];

export interface LegPoints {
  hip: [number, number, number];
  knee: [number, number, number];
  foot: [number, number, number];
}

/** Torso-frame points for leg i given its (abduction, flexion, knee) angles. */
export function legPoints(i: number, q1: number, q2: number, q3: number): LegPoints {
  const d = SIDE[i] * GEOM.hipLink;
  const kx = -GEOM.thigh * Math.sin(q2);
  const kz = -GEOM.thigh * Math.cos(q2);
  const fx = kx - GEOM.calf * Math.sin(q2 + q3);
  const fz = kz - GEOM.calf * Math.cos(q2 + q3);
  const c1 = Math.cos(q1),
    s1 = Math.sin(q1);
  const rot = (x: number, y: number, z: number): [number, number, number] => [
    x,
    c1 * y - s1 * z,
    s1 * y + c1 * z,
  ];
  const [hx, hy, hz] = HIP[i];
  const k = rot(kx, d, kz);
  const f = rot(fx, d, fz);
  return {
    hip: [hx, hy, hz],
    knee: [hx + k[0], hy + k[1], hz + k[2]],
    foot: [hx + f[0], hy + f[1], hz + f[2]],
  };
}

/** Rotate a torso-frame point by the base quaternion (w,x,y,z) and offset. */
export function toWorld(
  p: [number, number, number],
  basePos: [number, number, number],
  q: [number, number, number, number],
): [number, number, number] {
  const [w, x, y, z] = q;
  const [vx, vy, vz] = p;
  // v + 2 * cross(u, cross(u, v) + w v), u = (x, y, z)
  const cx1 = y * vz - z * vy + w * vx;
  const cy1 = z * vx - x * vz + w * vy;
  const cz1 = x * vy - y * vx + w * vz;
  return [
    basePos[0] + vx + 2 * (y * cz1 - z * cy1),
    basePos[1] + vy + 2 * (z * cx1 - x * cz1),
    basePos[2] + vz + 2 * (x * cy1 - y * cx1),
  ];
}
